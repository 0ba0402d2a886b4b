#include "stokeslab/formal_variational.hpp"

namespace stokeslab {

TauSeries b_series(const TauSeries& r, const BigComplex& eta, const NfTable& a, int N) {
    int fl = -(N + 4);
    TauSeries r2 = TauSeries::mul(r, r, fl);
    TauSeries b = r2;
    b *= BigComplex(-3L) * eta;
    TauSeries rp = TauSeries::constant(BigComplex(1L), fl);
    rp = TauSeries::mul(rp, r2, fl);  // r^2
    for (int l = 3;; ++l) {
        rp = TauSeries::mul(rp, r2, fl);  // r^{2l-2}
        auto top = rp.top_exponent(drop_threshold());
        if (!top || *top < fl) break;
        BigComplex c = nf_coeff(a, 0, l);
        if (!c.is_zero()) {
            BigComplex w = c;
            w.mul_si(l * (2 * l - 1));
            w = w / BigComplex(BigFloat::pow2(l - 1), BigFloat(0L));
            TauSeries t = rp;
            t *= -w;
            b += t;
        }
    }
    return b;
}

TauSeries w22_series(const TauSeries& r, const BigComplex& kappa, const TauSeries& b, int N) {
    (void)r;
    // w22 = sum_{k<=1} w_k tau^{2k+1},  (2k(2k+1)-6) w_k = sum_{j=k-2}^{-2} w_{k-j-1} b_j
    // with b_j the coefficient of tau^{2j} in b and w_1 = 1/(5 kappa).
    std::map<int, BigComplex> w;
    w[1] = BigComplex(1L) / (BigComplex(5L) * kappa);
    int kmin = -(N + 1) / 2 - 1;
    for (int k = 0; k >= kmin; --k) {
        BigComplex s(0L);
        for (int j = k - 2; j <= -2; ++j) {
            auto it = w.find(k - j - 1);
            if (it == w.end()) continue;
            BigComplex bj = b.coef(2 * j).coef(0);
            if (bj.is_zero()) continue;
            s += it->second * bj;
        }
        long denom = 2L * k * (2L * k + 1L) - 6L;
        w[k] = s / BigComplex(denom);
    }
    TauSeries out(2 * kmin + 1);
    for (const auto& [k, c] : w)
        if (!c.is_zero()) out.at(2 * k + 1) = TrigPoly(c);
    out.set_parity_tag(Parity::odd);
    return out;
}

WBasis build_w_basis(const PolarSeries& ps, int N) {
    const BigFloat thr = drop_threshold();
    int fl = -(N + 3);
    WBasis wb;
    wb.b = b_series(ps.r, ps.eta, ps.a, N + 2);
    wb.w21 = ps.r.dtau();
    wb.w22 = w22_series(ps.r, ps.kappa, wb.b, N + 2);

    // g = sum_{l>=1} l a_{1,l} 2^{1-l} r^{2l-1}, odd
    TauSeries r2 = TauSeries::mul(ps.r, ps.r, fl);
    wb.g = TauSeries(fl);
    TauSeries rp = ps.r;
    for (int l = 1;; ++l) {
        if (l > 1) rp = TauSeries::mul(rp, r2, fl);
        auto top = rp.top_exponent(thr);
        if (!top || *top < fl) break;
        BigComplex c = nf_coeff(ps.a, 1, l);
        if (!c.is_zero()) {
            BigComplex wcoef = c;
            wcoef.mul_si(l);
            wcoef = wcoef / BigComplex(BigFloat::pow2(l - 1), BigFloat(0L));
            TauSeries t = rp;
            t *= wcoef;
            wb.g += t;
        }
    }
    // f = -1/r^2 - sum_{l>=0} a_{2,l} 2^{1-l} r^{2l}, even
    wb.f = -reciprocal(r2, fl);
    TauSeries rpe = TauSeries::constant(BigComplex(1L), fl);
    for (int l = 0;; ++l) {
        if (l > 0) rpe = TauSeries::mul(rpe, r2, fl);
        auto top = rpe.top_exponent(thr);
        if (!top || *top < fl) break;
        BigComplex c = nf_coeff(ps.a, 2, l);
        if (!c.is_zero()) {
            BigComplex wcoef = c;
            wcoef = wcoef / BigComplex(BigFloat::pow2(l - 1), BigFloat(0L));
            TauSeries t = rpe;
            t *= wcoef;
            wb.f -= t;
        }
        if (l > N) break;
    }

    // particular solutions by variation of constants; the integrands are
    // parity-protected against a tau^-1 term (LogObstruction otherwise)
    wb.w2_0 = wb.w22;
    TauSeries i_w21g = TauSeries::mul(wb.w21, wb.g, fl).antiderivative(thr);
    TauSeries i_w22g = TauSeries::mul(wb.w22, wb.g, fl).antiderivative(thr);
    wb.w2_1 = TauSeries::mul(wb.w22, i_w21g, fl) - TauSeries::mul(wb.w21, i_w22g, fl);
    wb.w1_0 = -TauSeries::mul(wb.g, wb.w2_0, fl).antiderivative(thr);
    wb.w1_1 = -TauSeries::mul(wb.g, wb.w2_1, fl).antiderivative(thr) + wb.f.antiderivative(thr);

    auto mk = [&](TauSeries a0, TauSeries a1, TauSeries a2, TauSeries a3) {
        TauSeries4 v;
        v[0] = std::move(a0);
        v[1] = std::move(a1);
        v[2] = std::move(a2);
        v[3] = std::move(a3);
        return v;
    };
    wb.w[0] = mk(wb.w1_1, wb.w2_1, TauSeries::constant(BigComplex(1L), fl), -wb.w2_1.dtau());
    wb.w[1] = mk(wb.w1_0, wb.w2_0, TauSeries(fl), -wb.w2_0.dtau());
    wb.w[2] = mk(TauSeries::constant(BigComplex(1L), fl), TauSeries(fl), TauSeries(fl), TauSeries(fl));
    TauSeries dtheta = ps.theta.dtau();
    TauSeries dr = ps.r.dtau();
    wb.w[3] = mk(dtheta, dr, TauSeries(fl), -dr.dtau());
    return wb;
}

TauSeriesMat polar_change_jacobian(const PolarSeries& ps, int N) {
    int fl = -(N + 3);
    TauSeries c = cos_series(ps.theta, fl);
    TauSeries s = sin_series(ps.theta, fl);
    TauSeries dr = ps.r.dtau();
    TauSeries rinv = reciprocal(ps.r, fl);
    TauSeriesMat L;
    for (auto& e : L.e) e = TauSeries(fl);
    // rows: xi components; columns: (theta, r, Theta, R) at Theta=0, R=-dr
    L(0, 0) = TauSeries::mul(dr, s, fl);
    L(0, 2) = -TauSeries::mul(rinv, s, fl);
    L(0, 3) = c;
    L(1, 0) = -TauSeries::mul(dr, c, fl);
    L(1, 2) = TauSeries::mul(rinv, c, fl);
    L(1, 3) = s;
    L(2, 0) = -TauSeries::mul(ps.r, s, fl);
    L(2, 1) = c;
    L(3, 0) = TauSeries::mul(ps.r, c, fl);
    L(3, 1) = s;
    return L;
}

TauSeriesMat assemble_Vhat(const WBasis& wb, const PolarSeries& ps, int N) {
    int fl = -(N + 2);
    TauSeriesMat L = polar_change_jacobian(ps, N + 1);
    TrigPoly cphi = TrigPoly::cos_mode(1, BigComplex(1L));
    TrigPoly sphi = TrigPoly::sin_mode(1, BigComplex(1L));
    TauSeriesMat V;
    for (int i = 0; i < 4; ++i) {
        TauSeries4 lw = L.mul_vec(wb.w[static_cast<size_t>(i)], fl);
        TauSeries4 v;
        v[0] = lw[0].mul_trig(cphi) - lw[1].mul_trig(sphi);
        v[1] = lw[0].mul_trig(sphi) + lw[1].mul_trig(cphi);
        v[2] = lw[2].mul_trig(cphi) - lw[3].mul_trig(sphi);
        v[3] = lw[2].mul_trig(sphi) + lw[3].mul_trig(cphi);
        V.set_col(i, v);
    }
    return V;
}

FormalFundamental assemble_Uhat(const WBasis& wb, const PolarSeries& ps, const PolyMap& phi,
                                const TauSeries4& Zhat, int N) {
    int fl = -(N + 2);
    TauSeriesMat V = assemble_Vhat(wb, ps, N);
    auto Dphi = jacobian(phi);
    SeriesPowerCache cache(Zhat, fl);
    TauSeriesMat DP;
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) DP(i, j) = compose_series(Dphi[static_cast<size_t>(4 * i + j)], cache, fl);
    FormalFundamental ff;
    ff.u_hat = TauSeriesMat::mul(DP, V, fl);
    ff.n_max = N;
    // block exponent pattern of the formal fundamental solution
    static const int pattern[4][4] = {{1, 2, -2, -3}, {1, 2, -2, -3}, {2, 3, -1, -2}, {2, 3, -1, -2}};
    BigFloat thr = sqrt(drop_threshold());
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) {
            auto top = ff.u_hat(i, j).top_exponent(thr);
            if (top && *top > pattern[i][j])
                throw PatternViolationError("U_hat entry (" + std::to_string(i + 1) + "," +
                                            std::to_string(j + 1) + ") leads at tau^" + std::to_string(*top) +
                                            " above the block order " + std::to_string(pattern[i][j]));
        }
    return ff;
}

FormalFundamental gauge_transform(const FormalFundamental& U, const std::array<BigComplex, 4>& C,
                                  const BigFloat& tol) {
    // C = [[c00, c01], [c10, c11]] must be symmetric
    if (norm1(C[1] - C[2]) > tol) throw SymmetryError("gauge matrix C is not symmetric");
    FormalFundamental out = U;
    for (int r = 0; r < 4; ++r) {
        // col0 += c00 col2 + c10 col3 ; col1 += c01 col2 + c11 col3
        TauSeries t0 = U.u_hat(r, 2);
        t0 *= C[0];
        TauSeries t1 = U.u_hat(r, 3);
        t1 *= C[2];
        out.u_hat(r, 0) += t0 + t1;
        TauSeries s0 = U.u_hat(r, 2);
        s0 *= C[1];
        TauSeries s1 = U.u_hat(r, 3);
        s1 *= C[3];
        out.u_hat(r, 1) += s0 + s1;
    }
    return out;
}

TauSeriesMat truncate_partial_sum_mat(const TauSeriesMat& u_hat, int n) {
    TauSeriesMat out;
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) {
            int f = (i < 2) ? -(n + 1) : -n;
            out(i, j) = u_hat(i, j).truncate_floor(f).as_exact_polynomial();
        }
    return out;
}

ResidualReport u_residual(const PreparedHamiltonian& ph, const TauSeries4& gamma_partial,
                          const TauSeriesMat& u_n, int n, const BigFloat& tol) {
    int fl = -(2 * n + 8);
    SeriesPowerCache cache(gamma_partial, fl);
    TauSeriesMat A;
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j)
            A(i, j) = compose_series(ph.DX[static_cast<size_t>(4 * i + j)], cache, fl);
    TauSeriesMat def = u_n.apply_D() - TauSeriesMat::mul(A, u_n, fl);
    ResidualReport rep;
    rep.weighted_norm = BigFloat(0L);
    rep.leading_exponent = fl;
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) {
            int w = (i < 2) ? n + 2 : n + 1;
            const TauSeries& s = def(i, j);
            if (s.empty()) continue;
            for (int k = s.lo(); k <= s.hi(); ++k) {
                BigFloat nk = s.coef(k).norm1();
                if (k > -w) {
                    if (nk > tol)
                        throw OrderViolationError("variational residual entry (" + std::to_string(i + 1) + "," +
                                                  std::to_string(j + 1) + ") has content at tau^" +
                                                  std::to_string(k) + " above the guaranteed order");
                    continue;
                }
                if (nk > tol && i < 2) rep.leading_exponent = std::max(rep.leading_exponent, k);
                rep.weighted_norm = max(rep.weighted_norm, nk);
            }
        }
    return rep;
}

FormalPipeline formal_pipeline(const PreparedHamiltonian& ph, int N, bool rotate_pi) {
    FormalPipeline out;
    out.nf = sokolskii_normalize(ph.H, N + 3);
    out.polar = polar_series(out.nf.eta(drop_threshold()), out.nf.a, N + 3, rotate_pi);
    out.z_hat = assemble_Zhat(out.polar, N + 2);
    out.separatrix = pullback(out.nf.phi, out.z_hat, N);
    out.separatrix.n_max = N;
    WBasis wb = build_w_basis(out.polar, N + 1);
    out.fundamental = assemble_Uhat(wb, out.polar, out.nf.phi, out.z_hat, N);
    return out;
}

}  // namespace stokeslab

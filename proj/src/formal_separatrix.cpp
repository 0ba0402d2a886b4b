#include "stokeslab/formal_separatrix.hpp"

#include "stokeslab/linalg.hpp"

namespace stokeslab {

namespace {

// RHS of the r-equation: -eta r^3 - sum_{j>=3} (2j a_{0,j}/2^j) r^{2j-1}.
TauSeries r_equation_rhs(const TauSeries& r, const BigComplex& eta, const NfTable& a, int floor) {
    TauSeries r2 = TauSeries::mul(r, r, floor);
    TauSeries rhs = TauSeries::mul(r2, r, floor);
    rhs *= -eta;
    TauSeries rpow = TauSeries::mul(r2, r, floor);  // r^3
    for (int j = 3;; ++j) {
        rpow = TauSeries::mul(rpow, r2, floor);  // r^{2j-1}
        auto top = rpow.top_exponent(drop_threshold());
        if (!top || *top < floor) break;
        BigComplex c = nf_coeff(a, 0, j);
        if (!c.is_zero()) {
            BigComplex w = c;
            w.mul_si(2 * j);
            w = w / BigComplex(BigFloat::pow2(j), BigFloat(0L));
            TauSeries t = rpow;
            t *= w;
            rhs -= t;
        }
    }
    return rhs;
}

BigComplex scalar_coef(const TauSeries& s, int k) { return s.coef(k).coef(0); }

}  // namespace

TauSeries r_series(const BigComplex& eta, const NfTable& a, int N, bool rotate_pi) {
    BigComplex kappa = kappa_from_eta(eta, drop_threshold());
    if (rotate_pi) kappa = -kappa;
    int floor = -(N + 3);
    TauSeries r = TauSeries::monomial(-1, TrigPoly(kappa), floor);
    r.set_parity_tag(Parity::odd);
    for (int k = 2; k <= N - 1; ++k) {
        // defect E = rhs - d^2_tau r; E_{-(k+3)} determines r_{k+1}
        TauSeries E = r_equation_rhs(r, eta, a, floor) - r.dtau().dtau();
        BigComplex e = scalar_coef(E, -(k + 3));
        if ((k + 1) % 2 == 0) continue;  // even coefficients stay zero
        BigComplex rk1 = e / BigComplex(static_cast<long>((k + 1) * (k + 2) - 6));
        if (!rk1.is_zero()) r.at(-(k + 1)) = TrigPoly(rk1);
    }
    r.set_parity_tag(Parity::odd);
    return r;
}

TauSeries theta_series(const TauSeries& r, const NfTable& a, int N) {
    int floor = -(N + 2);
    TauSeries dtheta(floor);
    TauSeries r2 = TauSeries::mul(r, r, floor);
    TauSeries rpow = TauSeries::constant(BigComplex(1L), floor);
    for (int j = 1;; ++j) {
        rpow = TauSeries::mul(rpow, r2, floor);  // r^{2j}
        auto top = rpow.top_exponent(drop_threshold());
        if (!top || *top < floor) break;
        BigComplex c = nf_coeff(a, 1, j);
        if (!c.is_zero()) {
            BigComplex w = c / BigComplex(BigFloat::pow2(j), BigFloat(0L));
            TauSeries t = rpow;
            t *= -w;
            dtheta += t;
        }
    }
    TauSeries theta = dtheta.antiderivative(drop_threshold());
    theta.set_parity_tag(Parity::odd);
    return theta;
}

PolarSeries polar_series(const BigComplex& eta, const NfTable& a, int N, bool rotate_pi) {
    PolarSeries ps;
    ps.eta = eta;
    ps.kappa = kappa_from_eta(eta, drop_threshold());
    if (rotate_pi) ps.kappa = -ps.kappa;
    ps.a = a;
    ps.order = N;
    ps.r = r_series(eta, a, N, rotate_pi);
    ps.theta = theta_series(ps.r, a, N);
    return ps;
}

TauSeries4 assemble_Zhat(const PolarSeries& ps, int N) {
    int floor = -(N + 1);
    TauSeries c = cos_series(ps.theta, floor);
    TauSeries s = sin_series(ps.theta, floor);
    TauSeries mdr = -ps.r.dtau();
    TauSeries4 xi;
    xi[0] = TauSeries::mul(mdr, c, floor);
    xi[1] = TauSeries::mul(mdr, s, floor);
    xi[2] = TauSeries::mul(ps.r, c, floor);
    xi[3] = TauSeries::mul(ps.r, s, floor);
    // Z = R_phi xi
    TrigPoly cphi = TrigPoly::cos_mode(1, BigComplex(1L));
    TrigPoly sphi = TrigPoly::sin_mode(1, BigComplex(1L));
    TauSeries4 Z;
    Z[0] = xi[0].mul_trig(cphi) - xi[1].mul_trig(sphi);
    Z[1] = xi[0].mul_trig(sphi) + xi[1].mul_trig(cphi);
    Z[2] = xi[2].mul_trig(cphi) - xi[3].mul_trig(sphi);
    Z[3] = xi[2].mul_trig(sphi) + xi[3].mul_trig(cphi);
    return Z;
}

FormalSeparatrix pullback(const PolyMap& phi, const TauSeries4& Z, int N) {
    for (int i = 0; i < 4; ++i) {
        auto top = Z[i].top_exponent(drop_threshold());
        if (top && *top > -1)
            throw WindowOverflowError("pullback: series component leads at tau^" + std::to_string(*top));
    }
    FormalSeparatrix fs;
    fs.gamma_hat = compose_series(phi, Z, -(N + 1));
    fs.n_max = N;
    fs.source = SeparatrixRoute::normal_form;
    return fs;
}

FormalSeparatrix formal_separatrix_nf(const PreparedHamiltonian& ph, int N, bool rotate_pi,
                                      NormalFormResult* nf_out) {
    NormalFormResult nf = sokolskii_normalize(ph.H, N + 1);
    PolarSeries ps = polar_series(nf.eta(drop_threshold()), nf.a, N + 1, rotate_pi);
    TauSeries4 Z = assemble_Zhat(ps, N + 1);
    FormalSeparatrix fs = pullback(nf.phi, Z, N);
    if (nf_out) *nf_out = std::move(nf);
    return fs;
}

TauSeries4 truncate_partial_sum(const TauSeries4& gamma_hat, int n) {
    TauSeries4 g;
    g[0] = gamma_hat[0].truncate_floor(-(n + 1)).as_exact_polynomial();
    g[1] = gamma_hat[1].truncate_floor(-(n + 1)).as_exact_polynomial();
    g[2] = gamma_hat[2].truncate_floor(-n).as_exact_polynomial();
    g[3] = gamma_hat[3].truncate_floor(-n).as_exact_polynomial();
    return g;
}

namespace {

// kernel vectors of (i m I - B) for m = +1 / -1, attached to e^{im phi}
TauSeries4 kernel_term(int m, int exponent, const BigComplex& c) {
    TauSeries4 t;
    BigComplex third = c;
    BigComplex fourth = (m == 1) ? -c.mul_i() : c.mul_i();
    t[2] = TauSeries::monomial(exponent, TrigPoly::mode(m, third));
    t[3] = TauSeries::monomial(exponent, TrigPoly::mode(m, fourth));
    return t;
}

struct ModeSystems {
    CMat4 B;
    std::array<CMatrix, 2> sing;   // (i m I - B) for m = +1, -1 as 4x4 CMatrix
    CVec4 left_null_plus, left_null_minus;

    ModeSystems() : B(resonance_linear_part()) {
        for (int s = 0; s < 2; ++s) {
            int m = (s == 0) ? 1 : -1;
            CMatrix A(4, 4);
            for (int i = 0; i < 4; ++i)
                for (int j = 0; j < 4; ++j) {
                    BigComplex v = -B(i, j);
                    if (i == j) v += BigComplex(0.0, static_cast<double>(m));
                    A.at(i, j) = v;
                }
            sing[static_cast<size_t>(s)] = A;
        }
        // left null vector w of (iI - B): w^H (iI - B) = 0  <=>  (iI-B)^H w = 0.
        // (iI-B)^H = -iI - B^T; solve by inspection using the kernel of the
        // transpose structure: components dual to the Jordan chain.
        // Numerically: least squares on the 4x5 stacked system.
        left_null_plus = left_null_of(1);
        left_null_minus = left_null_of(-1);
    }

    CVec4 left_null_of(int m) const {
        // kernel of (i m I - B)^H via lsq kernel computation
        CMatrix Ah(4, 4);
        const CMatrix& A = sing[static_cast<size_t>(m == 1 ? 0 : 1)];
        for (int i = 0; i < 4; ++i)
            for (int j = 0; j < 4; ++j) Ah.at(i, j) = conj(A.at(j, i));
        LsqResult sol = lsq_min_norm(Ah, CVecN(4, BigComplex(0L)), BigFloat::pow2(-40));
        if (sol.kernel.size() != 1) throw Error("unexpected kernel dimension for singular mode");
        CVec4 w;
        for (int i = 0; i < 4; ++i) w[i] = sol.kernel[0][static_cast<size_t>(i)];
        return w;
    }
};

// Defect X_H(G) - D(G) of a partial series.
TauSeries4 defect_of(const PreparedHamiltonian& ph, const TauSeries4& G, int floor) {
    TauSeries4 f = compose_series(ph.X, G, floor);
    TauSeries4 d = G.apply_D();
    return f - d;
}

CVec4 mode_coef(const TauSeries4& s, int k, int m) {
    CVec4 v;
    for (int i = 0; i < 4; ++i) v[i] = s[i].coef(k).coef(m);
    return v;
}

}  // namespace

FormalSeparatrix direct_solve(const PreparedHamiltonian& ph, int N, bool rotate_pi) {
    const BigFloat thr = drop_threshold();
    const BigFloat compat_tol = sqrt(thr);  // 10^(-digits/2)-ish
    BigComplex kappa = kappa_from_eta(ph.eta, thr);
    if (rotate_pi) kappa = -kappa;
    int floor = -(N + 2);

    ModeSystems sys;
    TauSeries4 G;  // partial sum
    // order 1: kernel-only solution matching Gamma0's leading term
    G[2] = TauSeries::monomial(-1, TrigPoly::cos_mode(1, kappa), floor);
    G[3] = TauSeries::monomial(-1, TrigPoly::sin_mode(1, kappa), floor);
    G[0] = TauSeries(floor);
    G[1] = TauSeries(floor);

    auto singular_residual = [&](const TauSeries4& def, int k, int m) {
        CVec4 rhs = mode_coef(def, -k, m);
        const CVec4& w = (m == 1) ? sys.left_null_plus : sys.left_null_minus;
        BigComplex s(0L);
        for (int i = 0; i < 4; ++i) s += conj(w[i]) * rhs[i];
        return s;
    };

    // Solves the order-k coefficient from the defect of the current state;
    // the singular modes m = +-1 take the minimum-norm solution (kernel
    // coefficients are fixed later by higher-order compatibility).
    auto solve_order = [&](const TauSeries4& def, int k) {
        TauSeries4 inc;
        for (int i = 0; i < 4; ++i) inc[i] = TauSeries(floor);
        int mspan = 0;
        for (int i = 0; i < 4; ++i) {
            const TrigPoly& t = def[i].coef(-k);
            if (!t.empty()) mspan = std::max({mspan, std::abs(t.lo_mode()), std::abs(t.hi_mode())});
        }
        for (int m = -mspan; m <= mspan; ++m) {
            CVec4 rhs = mode_coef(def, -k, m);
            if (rhs.norm1() <= thr) continue;
            CVec4 x;
            if (m == 1 || m == -1) {
                const CMatrix& A = sys.sing[static_cast<size_t>(m == 1 ? 0 : 1)];
                CVecN b(4);
                for (int i = 0; i < 4; ++i) b[static_cast<size_t>(i)] = rhs[i];
                LsqResult sol = lsq_min_norm(A, b, BigFloat::pow2(-static_cast<long>(default_precision()) / 2));
                for (int i = 0; i < 4; ++i) x[i] = sol.x[static_cast<size_t>(i)];
            } else {
                CMat4 A = CMat4::zero();
                for (int i = 0; i < 4; ++i)
                    for (int j = 0; j < 4; ++j) {
                        A(i, j) = -sys.B(i, j);
                        if (i == j) A(i, j) += BigComplex(0.0, static_cast<double>(m));
                    }
                x = A.solve(rhs);
            }
            for (int i = 0; i < 4; ++i)
                if (!x[i].is_zero()) inc[i].at(-k).add_to(m, x[i]);
        }
        return inc;
    };

    auto add4 = [](TauSeries4& dst, const TauSeries4& src) {
        for (int i = 0; i < 4; ++i) dst[i] += src[i];
    };

    // prev = state without the order-(k-1) coefficient; needed because the
    // repair of the order-k compatibility lives two orders back: for the
    // Jordan-block eigenvalue the left and right null vectors of (imI - B)
    // are orthogonal, so the (k-1)Gamma_{k-1} shift never reaches the
    // incompatible direction -- the coupling goes through the cubic terms,
    // i.e. through the kernel coefficient at order k-2.
    TauSeries4 prev = G;
    for (int k = 2; k <= N; ++k) {
        TauSeries4 def = defect_of(ph, G, floor);
        BigComplex rho_p = singular_residual(def, k, 1);
        BigComplex rho_m = singular_residual(def, k, -1);
        BigFloat scale = max(BigFloat(1L), def.max_coef_norm());
        if (max(norm1(rho_p), norm1(rho_m)) > compat_tol * scale) {
            if (k < 4)
                throw CompatibilityError("order " + std::to_string(k) + " compatibility defect " +
                                         max(norm1(rho_p), norm1(rho_m)).to_string());
            CMatrix S(2, 2);
            CVecN rhs2(2);
            rhs2[0] = -rho_p;
            rhs2[1] = -rho_m;
            for (int c = 0; c < 2; ++c) {
                int mc = (c == 0) ? 1 : -1;
                TauSeries4 base = prev;
                TauSeries4 kt = kernel_term(mc, -(k - 2), BigComplex(1L));
                base[2] += kt[2];
                base[3] += kt[3];
                TauSeries4 bdef = defect_of(ph, base, floor);
                add4(base, solve_order(bdef, k - 1));
                TauSeries4 pdef = defect_of(ph, base, floor);
                S.at(0, c) = singular_residual(pdef, k, 1) - rho_p;
                S.at(1, c) = singular_residual(pdef, k, -1) - rho_m;
            }
            LsqResult sol = lsq_min_norm(S, rhs2, BigFloat::pow2(-static_cast<long>(default_precision()) / 2));
            TauSeries4 corr = kernel_term(1, -(k - 2), sol.x[0]);
            TauSeries4 corr_m = kernel_term(-1, -(k - 2), sol.x[1]);
            corr[2] += corr_m[2];
            corr[3] += corr_m[3];
            add4(prev, corr);
            TauSeries4 ndef = defect_of(ph, prev, floor);
            G = prev;
            add4(G, solve_order(ndef, k - 1));
            def = defect_of(ph, G, floor);
            rho_p = singular_residual(def, k, 1);
            rho_m = singular_residual(def, k, -1);
            if (max(norm1(rho_p), norm1(rho_m)) > compat_tol * scale)
                throw CompatibilityError("order " + std::to_string(k) + " bordered residual " +
                                         max(norm1(rho_p), norm1(rho_m)).to_string());
        }
        prev = G;
        add4(G, solve_order(def, k));
        for (int i = 0; i < 4; ++i) G[i].prune();
    }

    FormalSeparatrix fs;
    fs.gamma_hat = G;
    fs.n_max = N;
    fs.source = SeparatrixRoute::direct;
    return fs;
}

ResidualReport residual(const PreparedHamiltonian& ph, const TauSeries4& gamma_n, int n,
                        const BigFloat& tol) {
    int floor = -(2 * n + 6);
    TauSeries4 def = gamma_n.apply_D() - compose_series(ph.X, gamma_n, floor);
    ResidualReport rep;
    rep.weighted_norm = BigFloat(0L);
    rep.leading_exponent = floor;
    for (int i = 0; i < 4; ++i) {
        int w = (i < 2) ? n + 2 : n + 1;
        const TauSeries& s = def[i];
        if (s.empty()) continue;
        for (int k = s.lo(); k <= s.hi(); ++k) {
            BigFloat nk = s.coef(k).norm1();
            if (k > -w) {
                if (nk > tol)
                    throw OrderViolationError("residual component " + std::to_string(i + 1) +
                                              " has content at tau^" + std::to_string(k) +
                                              " above the guaranteed order (norm " + nk.to_string() + ")");
                continue;
            }
            if (nk > tol && i < 2) rep.leading_exponent = std::max(rep.leading_exponent, k);
            rep.weighted_norm = max(rep.weighted_norm, nk);
        }
    }
    return rep;
}

}  // namespace stokeslab

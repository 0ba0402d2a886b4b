#include "stokeslab/normal_form.hpp"

#include "stokeslab/linalg.hpp"

#include <algorithm>

namespace stokeslab {

BigComplex NormalFormResult::eta(const BigFloat& tol) const {
    BigComplex e = coeff(0, 2);
    if (abs(e) <= tol)
        throw DegeneracyError("normal form is degenerate: I3^2 coefficient " + e.to_string());
    return e;
}

PolyFn lie_transform(const PolyFn& f, const PolyFn& chi, int dmax) {
    // sum_j (1/j!) ad_chi^j f with ad_chi(g) = {g, chi}; deg(chi) >= 3 raises
    // the degree by at least 1 per bracket, so the sum is finite.
    PolyFn acc = f.truncate_degree(dmax);
    PolyFn term = acc;
    BigComplex inv_fact(1L);
    for (int j = 1;; ++j) {
        term = poisson(term, chi).truncate_degree(dmax);
        if (term.empty()) break;
        inv_fact /= BigComplex(static_cast<long>(j));
        PolyFn add = term;
        add *= inv_fact;
        acc += add;
        if (j > 4 * dmax) throw Error("lie_transform failed to terminate (chi of degree < 3?)");
    }
    return acc.pruned(drop_threshold());
}

PolyMap lie_flow_map(const PolyFn& chi, int dmax) {
    PolyMap m;
    for (int i = 0; i < 4; ++i) m[i] = lie_transform(PolyFn::variable(i), chi, dmax);
    return m;
}

namespace {

// Canonical complexified rotation coordinates: x = Mz * z with
//   q1 = (z1 + z2)/sqrt2,  q2 = -i (z1 - z2)/sqrt2,
//   p1 = (z3 + z4)/sqrt2,  p2 =  i (z3 - z4)/sqrt2.
// The S^1 action becomes diagonal: z1 -> e^{i phi} z1, z2 -> e^{-i phi} z2,
// z3 -> e^{-i phi} z3, z4 -> e^{i phi} z4.
CMat4 zeta_matrix() {
    BigFloat is2 = BigFloat(1L) / sqrt(BigFloat(2L));
    BigComplex r(is2, BigFloat(0L));
    BigComplex mi(BigFloat(0L), -is2);  // -i/sqrt2
    BigComplex pi_(BigFloat(0L), is2);  // +i/sqrt2
    CMat4 M = CMat4::zero();
    M(0, 0) = r;   M(0, 1) = r;
    M(1, 0) = mi;  M(1, 1) = pi_;
    M(2, 2) = r;   M(2, 3) = r;
    M(3, 2) = pi_; M(3, 3) = mi;
    return M;
}

int weight(const Mono& m) { return m.e[0] - m.e[1] - m.e[2] + m.e[3]; }

std::vector<Mono> block_basis(int deg, int w) {
    std::vector<Mono> basis;
    for (int a = 0; a <= deg; ++a)
        for (int b = 0; b + a <= deg; ++b)
            for (int c = 0; a + b + c <= deg; ++c) {
                int d = deg - a - b - c;
                Mono m(a, b, c, d);
                if (weight(m) == w) basis.push_back(m);
            }
    return basis;
}

}  // namespace

NormalFormResult sokolskii_normalize(const PolyFn& H, int N) {
    const BigFloat check_tol = drop_threshold();
    // pivot threshold 2^(-precision/2)
    const BigFloat pivot_tol = BigFloat::pow2(-static_cast<long>(default_precision()) / 2);

    CMat4 Mz = zeta_matrix();
    CMat4 Mzi = Mz.inverse();

    PolyFn Hz = H.substitute_linear(Mz);
    PolyFn H2z = (-PolyFn::I1() + PolyFn::I2()).substitute_linear(Mz);
    {
        PolyFn d = H.degree_part(2) - (-PolyFn::I1() + PolyFn::I2());
        BigFloat err(0L);
        for (const auto& [k, c] : d.terms()) err += norm1(c);
        if (err > check_tol * BigFloat(1000L))
            throw ResonanceError("sokolskii_normalize requires H2 = -I1 + I2 (run normalize_quadratic first)");
    }
    PolyFn I1z = PolyFn::I1().substitute_linear(Mz).pruned(check_tol);
    PolyFn I3z = PolyFn::I3().substitute_linear(Mz).pruned(check_tol);

    NormalFormResult out;
    out.order = N;
    std::vector<PolyFn> generators;  // chi_d in zeta coordinates

    for (int d = 3; d <= N; ++d) {
        PolyFn Hd = Hz.degree_part(d).pruned(check_tol);
        PolyFn chi;  // degree-d generator in zeta coordinates
        // normal-form monomials present at this degree
        std::vector<std::pair<int, int>> nf_lk;
        std::vector<PolyFn> nf_poly;
        if (d % 2 == 0) {
            for (int l = 0; l <= d / 2; ++l) {
                int k = d / 2 - l;
                if (l + k < 2) continue;
                PolyFn p = PolyFn::constant(BigComplex(1L));
                for (int j = 0; j < l; ++j) p = p * I1z;
                for (int j = 0; j < k; ++j) p = p * I3z;
                nf_lk.emplace_back(l, k);
                nf_poly.push_back(p.pruned(check_tol));
            }
        }

        for (int w = -d; w <= d; ++w) {
            if ((w + d) % 2 != 0) continue;  // weight parity matches degree parity
            std::vector<Mono> basis = block_basis(d, w);
            if (basis.empty()) continue;
            std::map<std::uint32_t, int> index;
            for (size_t i = 0; i < basis.size(); ++i) index[basis[i].key()] = static_cast<int>(i);
            int nb = static_cast<int>(basis.size());
            int nf_cols = (w == 0) ? static_cast<int>(nf_poly.size()) : 0;

            // right-hand side: -H_d restricted to the block
            CVecN rhs(static_cast<size_t>(nb), BigComplex(0L));
            bool rhs_zero = true;
            for (const auto& [k, c] : Hd.terms()) {
                Mono m = Mono::from_key(k);
                if (weight(m) != w) continue;
                rhs[static_cast<size_t>(index.at(m.key()))] = -c;
                rhs_zero = false;
            }
            if (rhs_zero) continue;

            CMatrix A(nb, nb + nf_cols);
            for (int j = 0; j < nb; ++j) {
                PolyFn img = poisson(H2z, PolyFn::monomial(basis[static_cast<size_t>(j)], BigComplex(1L)));
                for (const auto& [k, c] : img.terms()) {
                    Mono m = Mono::from_key(k);
                    auto it = index.find(m.key());
                    if (it == index.end()) {
                        if (norm1(c) > check_tol * BigFloat(100L))
                            throw SolvabilityError("homological operator leaked outside its weight block");
                        continue;
                    }
                    A.at(it->second, j) = c;
                }
            }
            for (int j = 0; j < nf_cols; ++j)
                for (const auto& [k, c] : nf_poly[static_cast<size_t>(j)].terms()) {
                    Mono m = Mono::from_key(k);
                    auto it = index.find(m.key());
                    if (it != index.end()) A.at(it->second, nb + j) = c;
                }

            LsqResult sol = lsq_min_norm(A, rhs, pivot_tol);
            BigFloat scale = max(BigFloat(1L), vec_norm(rhs));
            if (sol.residual_norm > scale * BigFloat::pow2(-static_cast<long>(default_precision()) / 2))
                throw SolvabilityError("degree " + std::to_string(d) + " weight " + std::to_string(w) +
                                       ": residual off range+complement = " + sol.residual_norm.to_string());
            for (int j = 0; j < nb; ++j)
                if (!sol.x[static_cast<size_t>(j)].is_zero())
                    chi.add_to(basis[static_cast<size_t>(j)], sol.x[static_cast<size_t>(j)]);
            for (int j = 0; j < nf_cols; ++j) {
                BigComplex aval = -sol.x[static_cast<size_t>(nb + j)];
                if (norm1(aval) > check_tol) {
                    auto key = nf_lk[static_cast<size_t>(j)];
                    auto [it, fresh] = out.a.try_emplace(key, aval);
                    if (!fresh) it->second += aval;
                }
            }
        }

        chi = chi.pruned(check_tol);
        if (!chi.empty()) {
            Hz = lie_transform(Hz, chi, N);
            generators.push_back(chi);
        } else {
            generators.push_back(PolyFn());
        }
    }

    // Phi = flow_{chi_3} o ... o flow_{chi_N}: x_i o Phi = Lie_N(...Lie_3(x_i))
    PolyMap phiz, phiz_inv;
    for (int i = 0; i < 4; ++i) {
        PolyFn f = PolyFn::variable(i);
        for (const auto& chi : generators)
            if (!chi.empty()) f = lie_transform(f, chi, N);
        phiz[i] = f;
        PolyFn g = PolyFn::variable(i);
        for (auto it = generators.rbegin(); it != generators.rend(); ++it)
            if (!it->empty()) g = lie_transform(g, -*it, N);
        phiz_inv[i] = g;
    }
    // back to (q, p): Phi(x) = Mz phiz(Mz^{-1} x)
    auto convert = [&](const PolyMap& f) {
        std::array<PolyFn, 4> sub;
        for (int i = 0; i < 4; ++i) sub[static_cast<size_t>(i)] = f[i].substitute_linear(Mzi);
        PolyMap r;
        for (int i = 0; i < 4; ++i) {
            PolyFn s;
            for (int j = 0; j < 4; ++j) {
                if (Mz(i, j).is_zero()) continue;
                PolyFn t = sub[static_cast<size_t>(j)];
                t *= Mz(i, j);
                s += t;
            }
            r[i] = s.pruned(check_tol);
        }
        return r;
    };
    out.phi = convert(phiz);
    out.phi_inv = convert(phiz_inv);
    out.h_sharp = Hz.substitute_linear(Mzi).pruned(check_tol).truncate_degree(N);
    return out;
}

}  // namespace stokeslab

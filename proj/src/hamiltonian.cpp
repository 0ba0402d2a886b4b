#include "stokeslab/hamiltonian.hpp"

namespace stokeslab {

BigComplex kappa_from_eta(const BigComplex& eta, const BigFloat& tol) {
    if (abs(eta) <= tol)
        throw DegeneracyError("eta = " + eta.to_string() + " violates the non-degeneracy condition");
    return sqrt(BigComplex(-2L) / eta);
}

PreparedHamiltonian PreparedHamiltonian::assemble(const BigComplex& eta, const PolyFn& F) {
    for (const auto& [k, c] : F.terms()) {
        Mono m = Mono::from_key(k);
        if (m.weighted_order() < 5)
            throw ValidationError("F monomial q1^" + std::to_string(m.e[0]) + " q2^" +
                                  std::to_string(m.e[1]) + " p1^" + std::to_string(m.e[2]) + " p2^" +
                                  std::to_string(m.e[3]) + " has weighted order " +
                                  std::to_string(m.weighted_order()) + " < 5");
    }
    if (F.degree() > max_poly_degree())
        throw DegreeOverflowError("F degree " + std::to_string(F.degree()) + " exceeds configured bound " +
                                  std::to_string(max_poly_degree()));
    PreparedHamiltonian ph;
    ph.eta = eta;
    ph.F = F;
    ph.H = -PolyFn::I1() + PolyFn::I2() + eta * (PolyFn::I3() * PolyFn::I3()) + F;
    ph.X = vector_field(ph.H);
    ph.DX = jacobian(ph.X);
    BigFloat imag(0L);
    for (const auto& [k, c] : ph.H.terms()) imag = max(imag, abs(c.im()));
    ph.real_coefficients = imag <= drop_threshold();
    return ph;
}

CMat4 PreparedHamiltonian::jacobian_at(const CVec4& x) const {
    CMat4 r;
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) r(i, j) = DX[static_cast<size_t>(4 * i + j)].eval(x);
    return r;
}

CVec4 PreparedHamiltonian::field_at(const CVec4& x) const { return X.eval(x); }

CMat4 resonance_linear_part() {
    CMat4 B = CMat4::zero();
    B(0, 1) = BigComplex(-1L);
    B(1, 0) = BigComplex(1L);
    B(2, 0) = BigComplex(-1L);
    B(2, 3) = BigComplex(-1L);
    B(3, 1) = BigComplex(-1L);
    B(3, 2) = BigComplex(1L);
    return B;
}

PolyFn normalize_quadratic(const PolyFn& H, const BigFloat& tol, QuadScaling* scaling) {
    PolyFn H2 = H.degree_part(2);
    // expected shape: -alpha (q2 p1 - q1 p2) + iota/2 (q1^2 + q2^2)
    BigComplex c_q2p1 = H2.coef(Mono(0, 1, 1, 0));
    BigComplex c_q1p2 = H2.coef(Mono(1, 0, 0, 1));
    BigComplex c_q1q1 = H2.coef(Mono(2, 0, 0, 0));
    BigComplex c_q2q2 = H2.coef(Mono(0, 2, 0, 0));

    BigComplex alpha_c = -c_q2p1;
    if (abs(alpha_c.im()) > tol || alpha_c.re() <= BigFloat(0L))
        throw ResonanceError("quadratic part: expected -alpha(q2 p1 - q1 p2) with alpha > 0");
    if (norm1(c_q1p2 - alpha_c) > tol)
        throw ResonanceError("quadratic part: q1 p2 coefficient does not match -alpha I1");
    BigComplex iota2 = c_q1q1;
    if (norm1(c_q2q2 - iota2) > tol || abs(iota2.im()) > tol)
        throw ResonanceError("quadratic part: expected iota/2 (q1^2 + q2^2)");
    BigFloat iota_val = iota2.re() + iota2.re();
    int iota;
    if (abs(iota_val - BigFloat(1L)) <= tol)
        iota = 1;
    else if (abs(iota_val + BigFloat(1L)) <= tol)
        iota = -1;
    else
        throw ResonanceError("quadratic part: iota^2 != 1 (non-semisimple 1:-1 structure violated)");
    // no other quadratic monomials allowed
    PolyFn rest = H2;
    rest.add_to(Mono(0, 1, 1, 0), -c_q2p1);
    rest.add_to(Mono(1, 0, 0, 1), -c_q1p2);
    rest.add_to(Mono(2, 0, 0, 0), -c_q1q1);
    rest.add_to(Mono(0, 2, 0, 0), -c_q2q2);
    for (const auto& [k, c] : rest.terms())
        if (norm1(c) > tol) throw ResonanceError("quadratic part has extra monomials off the 1:-1 normal shape");

    BigFloat alpha = alpha_c.re();
    BigFloat ralpha = sqrt(alpha);
    // (q1,q2,p1,p2) -> (iota sqrt(alpha) q1, sqrt(alpha) q2, iota p1/sqrt(alpha), p2/sqrt(alpha))
    CMat4 M = CMat4::zero();
    M(0, 0) = BigComplex(ralpha * BigFloat(static_cast<long>(iota)), BigFloat(0L));
    M(1, 1) = BigComplex(ralpha, BigFloat(0L));
    M(2, 2) = BigComplex(BigFloat(static_cast<long>(iota)) / ralpha, BigFloat(0L));
    M(3, 3) = BigComplex(BigFloat(1L) / ralpha, BigFloat(0L));

    BigComplex hscale = BigComplex(BigFloat(static_cast<long>(iota)) / alpha, BigFloat(0L));
    PolyFn out = H.substitute_linear(M);
    out *= hscale;
    if (scaling) {
        scaling->alpha = alpha;
        scaling->iota = iota;
        scaling->map = M;
        scaling->h_scale = hscale;
    }
    return out;
}

CMat4 rotation_R(const BigFloat& phi) {
    BigFloat s(Prec{phi.prec()}), c(Prec{phi.prec()});
    sin_cos(s, c, phi);
    CMat4 R = CMat4::zero();
    for (int blk = 0; blk < 2; ++blk) {
        int o = 2 * blk;
        R(o, o) = BigComplex(c, BigFloat(0L));
        R(o, o + 1) = BigComplex(-s, BigFloat(0L));
        R(o + 1, o) = BigComplex(s, BigFloat(0L));
        R(o + 1, o + 1) = BigComplex(c, BigFloat(0L));
    }
    return R;
}

}  // namespace stokeslab

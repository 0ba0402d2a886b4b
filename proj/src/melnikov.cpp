#include "stokeslab/melnikov.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <vector>

namespace stokeslab {

namespace {

BigComplex cplx_cos(const BigComplex& z) {
    BigComplex e = exp(z.mul_i());
    BigComplex einv = BigComplex(1L) / e;
    return (e + einv) * BigComplex(0.5);
}
BigComplex cplx_sin(const BigComplex& z) {
    BigComplex e = exp(z.mul_i());
    BigComplex einv = BigComplex(1L) / e;
    return (e - einv) * BigComplex(0.0, -0.5);
}

}  // namespace

LeadingOrder::LeadingOrder(const BigComplex& eta_, bool rotate_pi)
    : eta(eta_), kappa(kappa_from_eta(eta_, drop_threshold())) {
    if (rotate_pi) kappa = -kappa;
}

CVec4 LeadingOrder::gamma0(const BigComplex& phi, const BigComplex& tau) const {
    if (norm1(tau) <= drop_threshold()) throw PoleError("Gamma0 has a pole at tau = 0");
    BigComplex it = BigComplex(1L) / tau;
    BigComplex it2 = it * it;
    BigComplex c = cplx_cos(phi), s = cplx_sin(phi);
    return CVec4(kappa * it2 * c, kappa * it2 * s, kappa * it * c, kappa * it * s);
}

CMat4 LeadingOrder::a0(const BigComplex& phi, const BigComplex& tau) const {
    PolyFn H0 = -PolyFn::I1() + PolyFn::I2() + eta * (PolyFn::I3() * PolyFn::I3());
    return stokeslab::jacobian_at(vector_field(H0), gamma0(phi, tau));
}

TauSeries4 LeadingOrder::gamma0_series() const {
    TauSeries4 g;
    g[0] = TauSeries::monomial(-2, TrigPoly::cos_mode(1, kappa));
    g[1] = TauSeries::monomial(-2, TrigPoly::sin_mode(1, kappa));
    g[2] = TauSeries::monomial(-1, TrigPoly::cos_mode(1, kappa));
    g[3] = TauSeries::monomial(-1, TrigPoly::sin_mode(1, kappa));
    return g;
}

TauSeriesMat LeadingOrder::u0_series() const {
    BigComplex i3k = BigComplex(1L) / (BigComplex(3L) * kappa);
    BigComplex i5k = BigComplex(1L) / (BigComplex(5L) * kappa);
    auto C = [](int k, const BigComplex& a) { return TauSeries::monomial(k, TrigPoly::cos_mode(1, a)); };
    auto S = [](int k, const BigComplex& a) { return TauSeries::monomial(k, TrigPoly::sin_mode(1, a)); };
    TauSeriesMat U;
    U(0, 0) = S(1, BigComplex(-2L) * i3k);
    U(0, 1) = C(2, BigComplex(-3L) * i5k);
    U(0, 2) = S(-2, -kappa);
    U(0, 3) = C(-3, BigComplex(-2L) * kappa);
    U(1, 0) = C(1, BigComplex(2L) * i3k);
    U(1, 1) = S(2, BigComplex(-3L) * i5k);
    U(1, 2) = C(-2, kappa);
    U(1, 3) = S(-3, BigComplex(-2L) * kappa);
    U(2, 0) = S(2, i3k);
    U(2, 1) = C(3, i5k);
    U(2, 2) = S(-1, -kappa);
    U(2, 3) = C(-2, -kappa);
    U(3, 0) = C(2, -i3k);
    U(3, 1) = S(3, i5k);
    U(3, 2) = C(-1, kappa);
    U(3, 3) = S(-2, -kappa);
    return U;
}

TauSeriesMat LeadingOrder::u0_inv_series() const { return symplectic_inverse_series(u0_series()); }

CMat4 LeadingOrder::u0(const BigComplex& phi, const BigComplex& tau) const {
    if (norm1(tau) <= drop_threshold()) throw PoleError("U0 has a pole at tau = 0");
    TauSeriesMat U = u0_series();
    CMat4 m;
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) m(i, j) = U(i, j).eval(phi, tau);
    return m;
}

CMat4 LeadingOrder::u0_inv(const BigComplex& phi, const BigComplex& tau) const {
    return symplectic_inverse(u0(phi, tau));
}

CMat4 symplectic_inverse(const CMat4& M) {
    // -J M^T J
    CMat4 T = M.transpose();
    CMat4 B;  // J T
    for (int j = 0; j < 4; ++j) {
        B(0, j) = T(2, j);
        B(1, j) = T(3, j);
        B(2, j) = -T(0, j);
        B(3, j) = -T(1, j);
    }
    CMat4 C;  // B J, then negate
    for (int i = 0; i < 4; ++i) {
        C(i, 0) = B(i, 2);
        C(i, 1) = B(i, 3);
        C(i, 2) = -B(i, 0);
        C(i, 3) = -B(i, 1);
    }
    return C;
}

TauSeriesMat symplectic_inverse_series(const TauSeriesMat& M) {
    TauSeriesMat T;
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) T(i, j) = M(j, i);
    TauSeriesMat B;
    for (int j = 0; j < 4; ++j) {
        B(0, j) = T(2, j);
        B(1, j) = T(3, j);
        B(2, j) = -T(0, j);
        B(3, j) = -T(1, j);
    }
    TauSeriesMat C;
    for (int i = 0; i < 4; ++i) {
        C(i, 0) = B(i, 2);
        C(i, 1) = B(i, 3);
        C(i, 2) = -B(i, 0);
        C(i, 3) = -B(i, 1);
    }
    return C;
}

namespace {

struct GaussLegendre {
    std::vector<BigFloat> x, w;  // nodes/weights on [-1, 1]
};

const GaussLegendre& gl_rule(int n) {
    static std::mutex mu;
    static std::map<std::pair<int, long>, GaussLegendre> cache;
    std::lock_guard<std::mutex> lock(mu);
    auto key = std::make_pair(n, static_cast<long>(default_precision()));
    auto it = cache.find(key);
    if (it != cache.end()) return it->second;
    GaussLegendre rule;
    rule.x.resize(static_cast<size_t>(n));
    rule.w.resize(static_cast<size_t>(n));
    BigFloat one(1L), two(2L);
    for (int i = 0; i < n; ++i) {
        double guess = std::cos(3.14159265358979323846 * (i + 0.75) / (n + 0.5));
        BigFloat xk(guess);
        BigFloat dpn(0L);
        for (int iter = 0; iter < 60; ++iter) {
            // P_n(xk) and P_{n-1}(xk)
            BigFloat p0(1L), p1 = xk;
            for (int k = 2; k <= n; ++k) {
                BigFloat pk = (BigFloat(2L * k - 1) * xk * p1 - BigFloat(static_cast<long>(k - 1)) * p0) /
                              BigFloat(static_cast<long>(k));
                p0 = p1;
                p1 = pk;
            }
            dpn = BigFloat(static_cast<long>(n)) * (xk * p1 - p0) / (xk * xk - one);
            BigFloat dx = p1 / dpn;
            xk -= dx;
            if (abs(dx) <= BigFloat::pow2(-static_cast<long>(default_precision()) + 8)) break;
        }
        // recompute dpn at the converged node for the weight
        BigFloat p0(1L), p1 = xk;
        for (int k = 2; k <= n; ++k) {
            BigFloat pk = (BigFloat(2L * k - 1) * xk * p1 - BigFloat(static_cast<long>(k - 1)) * p0) /
                          BigFloat(static_cast<long>(k));
            p0 = p1;
            p1 = pk;
        }
        dpn = BigFloat(static_cast<long>(n)) * (xk * p1 - p0) / (xk * xk - one);
        rule.x[static_cast<size_t>(n - 1 - i)] = xk;
        rule.w[static_cast<size_t>(n - 1 - i)] = two / ((one - xk * xk) * dpn * dpn);
    }
    return cache.emplace(key, std::move(rule)).first->second;
}

template <typename F>
void gl_apply(const GaussLegendre& rule, const F& f, const BigFloat& a, const BigFloat& b,
              std::vector<BigComplex>& acc) {
    BigFloat half = (b - a) * BigFloat(0.5);
    BigFloat mid = (a + b) * BigFloat(0.5);
    for (size_t i = 0; i < rule.x.size(); ++i) {
        BigFloat s = mid + half * rule.x[i];
        f(s, half * rule.w[i], acc);
    }
}

}  // namespace

BigComplex adaptive_quad(const std::function<BigComplex(const BigFloat&)>& f, const BigFloat& a,
                         const BigFloat& b, const BigFloat& tol) {
    const GaussLegendre& lo = gl_rule(32);
    const GaussLegendre& hi = gl_rule(64);
    struct Seg {
        BigFloat a, b;
        int depth;
    };
    std::vector<Seg> stack{{a, b, 0}};
    BigComplex total(0L);
    auto eval = [&](const GaussLegendre& rule, const BigFloat& x0, const BigFloat& x1) {
        BigComplex s(0L);
        BigFloat half = (x1 - x0) * BigFloat(0.5);
        BigFloat mid = (x0 + x1) * BigFloat(0.5);
        for (size_t i = 0; i < rule.x.size(); ++i) {
            BigComplex v = f(mid + half * rule.x[i]);
            s += BigComplex(half * rule.w[i], BigFloat(0L)) * v;
        }
        return s;
    };
    while (!stack.empty()) {
        Seg seg = stack.back();
        stack.pop_back();
        BigComplex vlo = eval(lo, seg.a, seg.b);
        BigComplex vhi = eval(hi, seg.a, seg.b);
        if (norm1(vhi - vlo) <= tol || seg.depth > 40) {
            total += vhi;
        } else {
            BigFloat mid = (seg.a + seg.b) * BigFloat(0.5);
            stack.push_back({seg.a, mid, seg.depth + 1});
            stack.push_back({mid, seg.b, seg.depth + 1});
        }
    }
    return total;
}

MelnikovOracle::MelnikovOracle(const BigComplex& eta, const PolyFn& P, bool rotate_pi)
    : lead_(eta, rotate_pi), P_(P) {
    PolyMap XP = vector_field(P_);
    forcing_ = compose_series(XP, lead_.gamma0_series(), TauSeries::kExactFloor);
    TauSeriesMat U0inv = lead_.u0_inv_series();
    TauSeries4 S = U0inv.mul_vec(forcing_, TauSeries::kExactFloor);
    for (int i = 0; i < 4; ++i) F0_[i] = -S[i];
}

namespace {

struct Term {
    int comp, k, m;
    BigComplex c;
};

std::vector<Term> series_terms(const TauSeries4& s) {
    std::vector<Term> terms;
    for (int i = 0; i < 4; ++i) {
        if (s[i].empty()) continue;
        for (int k = s[i].lo(); k <= s[i].hi(); ++k)
            for (const auto& [m, c] : s[i].coef(k).modes()) terms.push_back({i, k, m, c});
    }
    return terms;
}

// integral over the tail {s <= b} (side < 0) or {s >= b} (side > 0) of
// e^{i m s} (tau + s)^k by repeated integration by parts
BigComplex tail_integral(int m, int k, const BigComplex& tau, const BigFloat& b, int side,
                         const BigFloat& tol) {
    BigComplex u = tau + BigComplex(b, BigFloat(0L));
    if (m == 0) {
        if (k >= -1) throw DivergenceError("non-decaying mode-0 term in characteristic integral");
        // exact primitive (tau+s)^{k+1}/(k+1)
        BigComplex prim = (BigComplex(1L) / u.pow_ui(static_cast<unsigned long>(-(k + 1)))) /
                          BigComplex(static_cast<long>(k + 1));
        return (side < 0) ? prim : -prim;
    }
    BigComplex im(0.0, static_cast<double>(m));
    BigComplex bsign = (side < 0) ? BigComplex(1L) : BigComplex(-1L);
    BigComplex eimb = exp(BigComplex(BigFloat(0L), BigFloat(static_cast<long>(m)) * b));
    BigComplex upow = (k >= 0) ? u.pow_ui(static_cast<unsigned long>(k))
                               : BigComplex(1L) / u.pow_ui(static_cast<unsigned long>(-k));
    BigComplex uinv = BigComplex(1L) / u;
    BigComplex acc(0L);
    BigComplex coef(1L);
    long sigma = k;
    for (int j = 0; j < 400; ++j) {
        BigComplex term = bsign * coef * eimb * upow / im;
        acc += term;
        if (norm1(term) <= tol) return acc;
        coef *= -BigComplex(sigma) / im;
        upow *= uinv;
        sigma -= 1;
    }
    throw DivergenceError("characteristic tail integral did not converge");
}

}  // namespace

CVec4 MelnikovOracle::ray_integral(const TauSeries4& series, Side side, const BigComplex& phi,
                                   const BigComplex& tau, const BigFloat& tol, bool full_line) const {
    std::vector<Term> terms = series_terms(series);
    // symbolic decay check
    for (const auto& t : terms) {
        if (t.m == 0 && t.k >= -1)
            throw DivergenceError("perturbation does not decay along the characteristic (mode 0, tau^" +
                                  std::to_string(t.k) + ")");
        if (t.m != 0 && t.k >= 0)
            throw DivergenceError("perturbation does not decay along the characteristic (mode " +
                                  std::to_string(t.m) + ", tau^" + std::to_string(t.k) + ")");
    }
    double lt = -std::log(std::max(1e-300, tol.to_double()));
    BigFloat dist(std::max(100.0, 1.5 * lt + 40.0));
    BigFloat far = dist + abs(tau);

    // cut points: quadrature on [lo, hi], IBP tails beyond
    BigFloat lo(0L), hi(0L);
    bool want_minus = full_line || side == Side::minus;
    bool want_plus = full_line || side == Side::plus;
    if (want_minus) lo = -far;
    if (want_plus) hi = far;

    const GaussLegendre& rl = gl_rule(32);
    const GaussLegendre& rh = gl_rule(64);
    CVec4 quad(BigComplex(0L), BigComplex(0L), BigComplex(0L), BigComplex(0L));
    // panel evaluation of all four components at once
    auto eval_panel = [&](const GaussLegendre& rule, const BigFloat& x0, const BigFloat& x1) {
        std::array<BigComplex, 4> acc{BigComplex(0L), BigComplex(0L), BigComplex(0L), BigComplex(0L)};
        BigFloat half = (x1 - x0) * BigFloat(0.5);
        BigFloat mid = (x0 + x1) * BigFloat(0.5);
        for (size_t i = 0; i < rule.x.size(); ++i) {
            BigFloat s = mid + half * rule.x[i];
            BigComplex phis = phi + BigComplex(s, BigFloat(0L));
            BigComplex taus = tau + BigComplex(s, BigFloat(0L));
            BigComplex wgt(half * rule.w[i], BigFloat(0L));
            for (int c = 0; c < 4; ++c) acc[static_cast<size_t>(c)] += wgt * series[c].eval(phis, taus);
        }
        return acc;
    };
    struct Seg {
        BigFloat a, b;
        int depth;
    };
    std::vector<Seg> stack;
    // initial panels of length ~pi
    if (!(lo == hi)) {
        BigFloat len = hi - lo;
        int panels = std::max(1, static_cast<int>(len.to_double() / 3.0));
        BigFloat step = len / BigFloat(static_cast<long>(panels));
        for (int i = 0; i < panels; ++i)
            stack.push_back({lo + step * BigFloat(static_cast<long>(i)),
                             (i + 1 == panels) ? hi : lo + step * BigFloat(static_cast<long>(i + 1)), 0});
    }
    BigFloat panel_tol = tol / BigFloat(static_cast<long>(std::max<size_t>(stack.size(), 1)));
    while (!stack.empty()) {
        Seg seg = stack.back();
        stack.pop_back();
        auto alo = eval_panel(rl, seg.a, seg.b);
        auto ahi = eval_panel(rh, seg.a, seg.b);
        BigFloat err(0L);
        for (int c = 0; c < 4; ++c) err += norm1(ahi[static_cast<size_t>(c)] - alo[static_cast<size_t>(c)]);
        if (err <= panel_tol || seg.depth > 32) {
            for (int c = 0; c < 4; ++c) quad[c] += ahi[static_cast<size_t>(c)];
        } else {
            BigFloat mid = (seg.a + seg.b) * BigFloat(0.5);
            stack.push_back({seg.a, mid, seg.depth + 1});
            stack.push_back({mid, seg.b, seg.depth + 1});
        }
    }

    // tails
    CVec4 out = quad;
    BigFloat term_tol = tol / BigFloat(static_cast<long>(std::max<size_t>(terms.size(), 1)));
    for (const auto& t : terms) {
        BigComplex phase = exp(BigComplex(BigFloat(0L), BigFloat(0L)) + phi.mul_i() * BigComplex(static_cast<long>(t.m)));
        if (want_minus) out[t.comp] += t.c * phase * tail_integral(t.m, t.k, tau, lo, -1, term_tol);
        if (want_plus) out[t.comp] += t.c * phase * tail_integral(t.m, t.k, tau, hi, +1, term_tol);
    }
    return out;
}

CVec4 MelnikovOracle::first_order_xi(Side side, const BigComplex& phi, const BigComplex& tau,
                                     const BigFloat& tol) const {
    TauSeries4 S;
    for (int i = 0; i < 4; ++i) S[i] = -F0_[i];
    CVec4 integral = ray_integral(S, side, phi, tau, tol, false);
    CMat4 U0 = lead_.u0(phi, tau);
    CVec4 xi = U0 * integral;
    if (side == Side::plus) xi = xi * BigComplex(-1L);
    return xi;
}

BigComplex MelnikovOracle::I_integral(const BigComplex& phi, const BigComplex& tau,
                                      const BigFloat& tol) const {
    CVec4 full = ray_integral(F0_, Side::minus, phi, tau, tol, true);
    return full[0];
}

BigComplex MelnikovOracle::dtheta1_dnu(Side side, const BigFloat& sigma, const BigFloat& tol) const {
    const int nsamp = 8;
    BigFloat two_pi = BigFloat(2L) * BigFloat::pi();
    BigComplex acc(0L);
    for (int j = 0; j < nsamp; ++j) {
        BigFloat x = two_pi * BigFloat(static_cast<long>(j)) / BigFloat(static_cast<long>(nsamp));
        BigComplex tau(x, (side == Side::minus) ? -sigma : sigma);
        BigComplex val = I_integral(BigComplex(0L), tau, tol);
        // e^{-+ i (tau - phi)} with phi = 0
        BigComplex phase = exp((side == Side::minus) ? tau.mul_i() : -tau.mul_i());
        acc += val * phase;
    }
    acc = acc / BigComplex(static_cast<long>(nsamp));
    if (norm1(acc) <= tol * BigFloat(10L))
        throw NoiseFloorError("first-order derivative below the quadrature noise floor");
    return acc;
}

BigComplex residue_closed_form_q25(const BigComplex& eta, const BigComplex& phi,
                                   const BigComplex& tau) {
    if (tau.im().is_zero()) throw PoleError("residue formula requires Im tau != 0");
    int delta = tau.im().sign();
    BigComplex kappa = kappa_from_eta(eta, drop_threshold());
    BigComplex k5 = kappa.pow_ui(5);
    BigFloat pi = BigFloat::pi();
    BigFloat nine_fact(362880L);
    BigComplex z = (tau - phi) * BigComplex(static_cast<long>(delta));
    BigComplex e1 = exp(z.mul_i());
    BigComplex e3 = e1 * e1 * e1;
    BigComplex e5 = e3 * e1 * e1;
    BigComplex c1(BigFloat(5L) * pi / (BigFloat(8L) * nine_fact), BigFloat(0L));
    BigComplex c3(BigFloat(59049L) * BigFloat(5L) * pi / (BigFloat(16L) * nine_fact), BigFloat(0L));
    BigComplex c5(BigFloat(9765625L) * pi / (BigFloat(16L) * nine_fact), BigFloat(0L));
    // bracket without a leading delta factor: the delta-dependence lives
    // entirely in which exponentials decay (see the contour computation)
    return k5 * (c1 * e1 - c3 * e3 + c5 * e5);
}

}  // namespace stokeslab

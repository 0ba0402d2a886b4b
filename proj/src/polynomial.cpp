#include "stokeslab/polynomial.hpp"

#include <atomic>
#include <sstream>

namespace stokeslab {

namespace {
std::atomic<int> g_max_deg{16};
}

int max_poly_degree() { return g_max_deg.load(std::memory_order_relaxed); }
void set_max_poly_degree(int d) { g_max_deg.store(d, std::memory_order_relaxed); }

CVec4 CVec4::operator+(const CVec4& o) const {
    CVec4 r;
    for (int i = 0; i < 4; ++i) r[i] = v[static_cast<size_t>(i)] + o[i];
    return r;
}
CVec4 CVec4::operator-(const CVec4& o) const {
    CVec4 r;
    for (int i = 0; i < 4; ++i) r[i] = v[static_cast<size_t>(i)] - o[i];
    return r;
}
CVec4 CVec4::operator*(const BigComplex& s) const {
    CVec4 r;
    for (int i = 0; i < 4; ++i) r[i] = v[static_cast<size_t>(i)] * s;
    return r;
}
BigFloat CVec4::norm1() const {
    BigFloat s(0L);
    for (const auto& x : v) s += stokeslab::norm1(x);
    return s;
}

CMat4 CMat4::identity() {
    CMat4 r = zero();
    for (int i = 0; i < 4; ++i) r(i, i) = BigComplex(1L);
    return r;
}
CMat4 CMat4::zero() {
    CMat4 r;
    for (auto& x : r.m) x = BigComplex(0L);
    return r;
}
CMat4 CMat4::operator+(const CMat4& o) const {
    CMat4 r;
    for (size_t i = 0; i < 16; ++i) r.m[i] = m[i] + o.m[i];
    return r;
}
CMat4 CMat4::operator-(const CMat4& o) const {
    CMat4 r;
    for (size_t i = 0; i < 16; ++i) r.m[i] = m[i] - o.m[i];
    return r;
}
CMat4 CMat4::operator*(const CMat4& o) const {
    CMat4 r = zero();
    for (int i = 0; i < 4; ++i)
        for (int k = 0; k < 4; ++k)
            for (int j = 0; j < 4; ++j) r(i, j).add_mul((*this)(i, k), o(k, j));
    return r;
}
CVec4 CMat4::operator*(const CVec4& x) const {
    CVec4 r(BigComplex(0L), BigComplex(0L), BigComplex(0L), BigComplex(0L));
    for (int i = 0; i < 4; ++i)
        for (int k = 0; k < 4; ++k) r[i].add_mul((*this)(i, k), x[k]);
    return r;
}
CMat4 CMat4::operator*(const BigComplex& s) const {
    CMat4 r;
    for (size_t i = 0; i < 16; ++i) r.m[i] = m[i] * s;
    return r;
}
CVec4 CMat4::col(int c) const {
    return CVec4((*this)(0, c), (*this)(1, c), (*this)(2, c), (*this)(3, c));
}
CMat4 CMat4::transpose() const {
    CMat4 r;
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) r(i, j) = (*this)(j, i);
    return r;
}
BigFloat CMat4::norm1() const {
    BigFloat best(0L);
    for (int j = 0; j < 4; ++j) {
        BigFloat s(0L);
        for (int i = 0; i < 4; ++i) s += stokeslab::norm1((*this)(i, j));
        best = max(best, s);
    }
    return best;
}

namespace {
// LU with partial pivoting on a 4x4 working copy; returns pivoted L,U packed.
struct LU4 {
    std::array<BigComplex, 16> a;
    std::array<int, 4> piv;
    int sign = 1;

    explicit LU4(const CMat4& M) {
        a = M.m;
        for (int i = 0; i < 4; ++i) piv[static_cast<size_t>(i)] = i;
        for (int k = 0; k < 4; ++k) {
            int best = k;
            BigFloat bb = norm1(at(k, k));
            for (int i = k + 1; i < 4; ++i) {
                BigFloat t = norm1(at(i, k));
                if (t > bb) {
                    bb = t;
                    best = i;
                }
            }
            if (best != k) {
                for (int j = 0; j < 4; ++j) std::swap(at(k, j), at(best, j));
                std::swap(piv[static_cast<size_t>(k)], piv[static_cast<size_t>(best)]);
                sign = -sign;
            }
            if (at(k, k).is_zero()) throw Error("singular 4x4 matrix");
            for (int i = k + 1; i < 4; ++i) {
                at(i, k) = at(i, k) / at(k, k);
                for (int j = k + 1; j < 4; ++j) at(i, j).sub_mul(at(i, k), at(k, j));
            }
        }
    }
    BigComplex& at(int r, int c) { return a[static_cast<size_t>(4 * r + c)]; }
    const BigComplex& at(int r, int c) const { return a[static_cast<size_t>(4 * r + c)]; }

    CVec4 solve(const CVec4& b) const {
        CVec4 x;
        for (int i = 0; i < 4; ++i) x[i] = b[piv[static_cast<size_t>(i)]];
        for (int i = 1; i < 4; ++i)
            for (int j = 0; j < i; ++j) x[i].sub_mul(at(i, j), x[j]);
        for (int i = 3; i >= 0; --i) {
            for (int j = i + 1; j < 4; ++j) x[i].sub_mul(at(i, j), x[j]);
            x[i] = x[i] / at(i, i);
        }
        return x;
    }
};
}  // namespace

CVec4 CMat4::solve(const CVec4& b) const { return LU4(*this).solve(b); }

CMat4 CMat4::inverse() const {
    LU4 lu(*this);
    CMat4 r;
    for (int c = 0; c < 4; ++c) {
        CVec4 e(BigComplex(0L), BigComplex(0L), BigComplex(0L), BigComplex(0L));
        e[c] = BigComplex(1L);
        CVec4 x = lu.solve(e);
        for (int i = 0; i < 4; ++i) r(i, c) = x[i];
    }
    return r;
}

BigComplex CMat4::det() const {
    try {
        LU4 lu(*this);
        BigComplex d(static_cast<long>(lu.sign));
        for (int i = 0; i < 4; ++i) d *= lu.at(i, i);
        return d;
    } catch (const Error&) {
        return BigComplex(0L);
    }
}

BigComplex omega(const CVec4& x, const CVec4& y) {
    BigComplex r(0L);
    r.add_mul(x[0], y[2]);
    r.add_mul(x[1], y[3]);
    r.sub_mul(x[2], y[0]);
    r.sub_mul(x[3], y[1]);
    return r;
}

CVec4 Jmul(const CVec4& x) { return CVec4(x[2], x[3], -x[0], -x[1]); }

CMat4 symplectic_J() {
    CMat4 J = CMat4::zero();
    J(0, 2) = BigComplex(1L);
    J(1, 3) = BigComplex(1L);
    J(2, 0) = BigComplex(-1L);
    J(3, 1) = BigComplex(-1L);
    return J;
}

void PolyFn::check_degree(const Mono& m) const {
    // structural guard only (exponent packing); the configurable D_max is
    // enforced where polynomial *data* enters (hamiltonian assembly, config).
    if (m.deg() > 200)
        throw DegreeOverflowError("monomial degree " + std::to_string(m.deg()) + " exceeds structural bound");
}

PolyFn PolyFn::constant(const BigComplex& c) { return monomial(Mono(), c); }

PolyFn PolyFn::monomial(const Mono& m, const BigComplex& c) {
    PolyFn p;
    p.set(m, c);
    return p;
}

PolyFn PolyFn::variable(int i) {
    Mono m;
    m.e[i] = 1;
    return monomial(m, BigComplex(1L));
}

PolyFn PolyFn::I1() {
    PolyFn p;
    p.set(Mono(0, 1, 1, 0), BigComplex(1L));
    p.set(Mono(1, 0, 0, 1), BigComplex(-1L));
    return p;
}
PolyFn PolyFn::I2() {
    PolyFn p;
    p.set(Mono(2, 0, 0, 0), BigComplex(0.5));
    p.set(Mono(0, 2, 0, 0), BigComplex(0.5));
    return p;
}
PolyFn PolyFn::I3() {
    PolyFn p;
    p.set(Mono(0, 0, 2, 0), BigComplex(0.5));
    p.set(Mono(0, 0, 0, 2), BigComplex(0.5));
    return p;
}

BigComplex PolyFn::coef(const Mono& m) const {
    auto it = t_.find(m.key());
    return it == t_.end() ? BigComplex(0L) : it->second;
}

void PolyFn::set(const Mono& m, const BigComplex& c) {
    check_degree(m);
    if (c.is_zero())
        t_.erase(m.key());
    else
        t_[m.key()] = c;
}

void PolyFn::add_to(const Mono& m, const BigComplex& c) {
    check_degree(m);
    auto [it, fresh] = t_.try_emplace(m.key(), c);
    if (!fresh) {
        it->second += c;
        if (it->second.is_zero()) t_.erase(it);
    }
}

int PolyFn::degree() const {
    int d = -1;
    for (const auto& [k, c] : t_) d = std::max(d, Mono::from_key(k).deg());
    return d;
}

int PolyFn::min_weighted_order() const {
    int d = std::numeric_limits<int>::max();
    for (const auto& [k, c] : t_) d = std::min(d, Mono::from_key(k).weighted_order());
    return d;
}

PolyFn& PolyFn::operator+=(const PolyFn& o) {
    for (const auto& [k, c] : o.t_) add_to(Mono::from_key(k), c);
    return *this;
}
PolyFn& PolyFn::operator-=(const PolyFn& o) {
    for (const auto& [k, c] : o.t_) add_to(Mono::from_key(k), -c);
    return *this;
}
PolyFn PolyFn::operator-() const {
    PolyFn r;
    for (const auto& [k, c] : t_) r.t_[k] = -c;
    return r;
}
PolyFn& PolyFn::operator*=(const BigComplex& s) {
    if (s.is_zero()) {
        t_.clear();
        return *this;
    }
    for (auto& [k, c] : t_) c *= s;
    return *this;
}

PolyFn operator*(const PolyFn& a, const PolyFn& b) {
    PolyFn r;
    for (const auto& [ka, ca] : a.t_) {
        Mono ma = Mono::from_key(ka);
        for (const auto& [kb, cb] : b.t_) {
            Mono mb = Mono::from_key(kb);
            Mono m(ma.e[0] + mb.e[0], ma.e[1] + mb.e[1], ma.e[2] + mb.e[2], ma.e[3] + mb.e[3]);
            r.add_to(m, ca * cb);
        }
    }
    return r;
}

PolyFn PolyFn::truncate_degree(int dmax) const {
    PolyFn r;
    for (const auto& [k, c] : t_)
        if (Mono::from_key(k).deg() <= dmax) r.t_[k] = c;
    return r;
}

PolyFn PolyFn::degree_part(int d) const {
    PolyFn r;
    for (const auto& [k, c] : t_)
        if (Mono::from_key(k).deg() == d) r.t_[k] = c;
    return r;
}

PolyFn PolyFn::diff(int i) const {
    PolyFn r;
    for (const auto& [k, c] : t_) {
        Mono m = Mono::from_key(k);
        if (m.e[i] == 0) continue;
        int e = m.e[i];
        Mono d = m;
        d.e[i] = static_cast<std::uint8_t>(e - 1);
        BigComplex nc = c;
        nc.mul_si(e);
        r.add_to(d, nc);
    }
    return r;
}

PolyFn poisson(const PolyFn& f, const PolyFn& g) {
    PolyFn r;
    for (int i = 0; i < 2; ++i) {
        r += f.diff(i) * g.diff(i + 2);
        r -= f.diff(i + 2) * g.diff(i);
    }
    return r;
}

namespace {
template <typename T, typename MulFn>
const T& cached_power(std::map<std::uint32_t, T>& cache, const std::array<T, 4>& vars, const Mono& m,
                      const T& one, MulFn mul) {
    auto it = cache.find(m.key());
    if (it != cache.end()) return it->second;
    if (m.deg() == 0) return cache.emplace(m.key(), one).first->second;
    // reduce along the first nonzero exponent
    Mono red = m;
    int i = 0;
    while (red.e[i] == 0) ++i;
    red.e[i] -= 1;
    const T& sub = cached_power(cache, vars, red, one, mul);
    T val = mul(sub, vars[static_cast<size_t>(i)]);
    return cache.emplace(m.key(), std::move(val)).first->second;
}
}  // namespace

BigComplex PolyFn::eval(const CVec4& x) const {
    std::map<std::uint32_t, BigComplex> cache;
    std::array<BigComplex, 4> vars{x[0], x[1], x[2], x[3]};
    BigComplex one(1L);
    BigComplex acc(0L);
    for (const auto& [k, c] : t_) {
        const BigComplex& p = cached_power(cache, vars, Mono::from_key(k), one,
                                           [](const BigComplex& a, const BigComplex& b) { return a * b; });
        acc.add_mul(c, p);
    }
    return acc;
}

CVec4 PolyFn::gradient_at(const CVec4& x) const {
    CVec4 g;
    for (int i = 0; i < 4; ++i) g[i] = diff(i).eval(x);
    return g;
}

PolyFn PolyFn::substitute_linear(const CMat4& M) const {
    // images of the variables
    std::array<PolyFn, 4> img;
    for (int i = 0; i < 4; ++i) {
        PolyFn s;
        for (int j = 0; j < 4; ++j) {
            if (M(i, j).is_zero()) continue;
            s += M(i, j) * PolyFn::variable(j);
        }
        img[static_cast<size_t>(i)] = std::move(s);
    }
    std::map<std::uint32_t, PolyFn> cache;
    PolyFn one = PolyFn::constant(BigComplex(1L));
    PolyFn acc;
    for (const auto& [k, c] : t_) {
        const PolyFn& p = cached_power(cache, img, Mono::from_key(k), one,
                                       [](const PolyFn& a, const PolyFn& b) { return a * b; });
        PolyFn term = p;
        term *= c;
        acc += term;
    }
    return acc;
}

PolyFn PolyFn::conj_coeffs() const {
    PolyFn r;
    for (const auto& [k, c] : t_) r.t_[k] = conj(c);
    return r;
}

PolyFn PolyFn::pruned(const BigFloat& tol) const {
    PolyFn r;
    for (const auto& [k, c] : t_)
        if (norm1(c) > tol) r.t_[k] = c;
    return r;
}

std::string PolyFn::to_string() const {
    if (t_.empty()) return "0";
    static const char* names[4] = {"q1", "q2", "p1", "p2"};
    std::ostringstream os;
    bool first = true;
    for (const auto& [k, c] : t_) {
        Mono m = Mono::from_key(k);
        if (!first) os << " + ";
        os << "(" << c.to_string() << ")";
        for (int i = 0; i < 4; ++i)
            if (m.e[i]) {
                os << "*" << names[i];
                if (m.e[i] > 1) os << "^" << int(m.e[i]);
            }
        first = false;
    }
    return os.str();
}

PolyMap PolyMap::identity() {
    PolyMap f;
    for (int i = 0; i < 4; ++i) f[i] = PolyFn::variable(i);
    return f;
}

CVec4 PolyMap::eval(const CVec4& x) const {
    // share the power cache across the four components
    std::map<std::uint32_t, BigComplex> cache;
    std::array<BigComplex, 4> vars{x[0], x[1], x[2], x[3]};
    BigComplex one(1L);
    CVec4 r(BigComplex(0L), BigComplex(0L), BigComplex(0L), BigComplex(0L));
    for (int i = 0; i < 4; ++i) {
        for (const auto& [k, c] : comp[static_cast<size_t>(i)].terms()) {
            const BigComplex& p = cached_power(cache, vars, Mono::from_key(k), one,
                                               [](const BigComplex& a, const BigComplex& b) { return a * b; });
            r[i].add_mul(c, p);
        }
    }
    return r;
}

PolyMap PolyMap::truncate_degree(int dmax) const {
    PolyMap r;
    for (int i = 0; i < 4; ++i) r[i] = comp[static_cast<size_t>(i)].truncate_degree(dmax);
    return r;
}

int PolyMap::degree() const {
    int d = -1;
    for (const auto& f : comp) d = std::max(d, f.degree());
    return d;
}

PolyMap vector_field(const PolyFn& H) {
    PolyMap X;
    X[0] = H.diff(2);
    X[1] = H.diff(3);
    X[2] = -H.diff(0);
    X[3] = -H.diff(1);
    return X;
}

std::array<PolyFn, 16> jacobian(const PolyMap& X) {
    std::array<PolyFn, 16> J;
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) J[static_cast<size_t>(4 * i + j)] = X[i].diff(j);
    return J;
}

CMat4 jacobian_at(const PolyMap& X, const CVec4& x) {
    auto J = jacobian(X);
    CMat4 r;
    std::map<std::uint32_t, BigComplex> cache;
    std::array<BigComplex, 4> vars{x[0], x[1], x[2], x[3]};
    BigComplex one(1L);
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) {
            BigComplex acc(0L);
            for (const auto& [k, c] : J[static_cast<size_t>(4 * i + j)].terms()) {
                const BigComplex& p = cached_power(cache, vars, Mono::from_key(k), one,
                                                   [](const BigComplex& a, const BigComplex& b) { return a * b; });
                acc.add_mul(c, p);
            }
            r(i, j) = acc;
        }
    return r;
}

PolyMap compose(const PolyMap& f, const PolyMap& g, int dmax) {
    std::map<std::uint32_t, PolyFn> cache;
    PolyFn one = PolyFn::constant(BigComplex(1L));
    std::array<PolyFn, 4> vars{g[0], g[1], g[2], g[3]};
    auto mul = [dmax](const PolyFn& a, const PolyFn& b) { return (a * b).truncate_degree(dmax); };
    PolyMap r;
    for (int i = 0; i < 4; ++i) {
        PolyFn acc;
        for (const auto& [k, c] : f[i].terms()) {
            const PolyFn& p = cached_power(cache, vars, Mono::from_key(k), one, mul);
            PolyFn term = p;
            term *= c;
            acc += term;
        }
        r[i] = std::move(acc);
    }
    return r;
}

SeriesPowerCache::SeriesPowerCache(const TauSeries4& gamma, int min_floor)
    : g_(gamma), min_floor_(min_floor) {}

const TauSeries& SeriesPowerCache::get(const Mono& m) {
    int mf = min_floor_;
    static const TauSeries one = TauSeries::constant(BigComplex(1L));
    return cached_power(cache_, g_.comp, m, one,
                        [mf](const TauSeries& a, const TauSeries& b) { return TauSeries::mul(a, b, mf); });
}

TauSeries compose_series(const PolyFn& f, SeriesPowerCache& cache, int min_floor) {
    TauSeries acc(min_floor);
    for (const auto& [k, c] : f.terms()) {
        TauSeries t = cache.get(Mono::from_key(k));
        t *= c;
        acc += t;
    }
    return acc;
}

TauSeries4 compose_series(const PolyMap& X, const TauSeries4& gamma, int min_floor) {
    SeriesPowerCache cache(gamma, min_floor);
    TauSeries4 r;
    for (int i = 0; i < 4; ++i) r[i] = compose_series(X[i], cache, min_floor);
    return r;
}

}  // namespace stokeslab

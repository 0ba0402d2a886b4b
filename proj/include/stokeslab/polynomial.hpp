#ifndef STOKESLAB_POLYNOMIAL_HPP
#define STOKESLAB_POLYNOMIAL_HPP

#include "stokeslab/bigcomplex.hpp"
#include "stokeslab/errors.hpp"
#include "stokeslab/tauseries.hpp"

#include <array>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace stokeslab {

// Total-degree bound for polynomial data; exceeding it is a configuration
// error, not a silent truncation.
int max_poly_degree();
void set_max_poly_degree(int d);

/// Exponents of q1^a q2^b p1^c p2^d.
struct Mono {
    std::uint8_t e[4];

    Mono() : e{0, 0, 0, 0} {}
    Mono(int a, int b, int c, int d)
        : e{static_cast<std::uint8_t>(a), static_cast<std::uint8_t>(b),
           static_cast<std::uint8_t>(c), static_cast<std::uint8_t>(d)} {}

    int deg() const { return e[0] + e[1] + e[2] + e[3]; }
    // Grading with the q-variables of weight 2 and p-variables of weight 1.
    int weighted_order() const { return 2 * (e[0] + e[1]) + e[2] + e[3]; }
    std::uint32_t key() const {
        return (std::uint32_t(e[0]) << 24) | (std::uint32_t(e[1]) << 16) |
               (std::uint32_t(e[2]) << 8) | std::uint32_t(e[3]);
    }
    static Mono from_key(std::uint32_t k) {
        return Mono(int((k >> 24) & 0xff), int((k >> 16) & 0xff), int((k >> 8) & 0xff), int(k & 0xff));
    }
    friend bool operator==(const Mono& x, const Mono& y) { return x.key() == y.key(); }
    friend bool operator<(const Mono& x, const Mono& y) { return x.key() < y.key(); }
};

struct CVec4 {
    std::array<BigComplex, 4> v;

    CVec4() = default;
    CVec4(BigComplex a, BigComplex b, BigComplex c, BigComplex d)
        : v{std::move(a), std::move(b), std::move(c), std::move(d)} {}

    BigComplex& operator[](int i) { return v[static_cast<size_t>(i)]; }
    const BigComplex& operator[](int i) const { return v[static_cast<size_t>(i)]; }

    CVec4 operator+(const CVec4& o) const;
    CVec4 operator-(const CVec4& o) const;
    CVec4 operator*(const BigComplex& s) const;
    BigFloat norm1() const;
};

struct CMat4 {
    std::array<BigComplex, 16> m;

    BigComplex& operator()(int r, int c) { return m[static_cast<size_t>(4 * r + c)]; }
    const BigComplex& operator()(int r, int c) const { return m[static_cast<size_t>(4 * r + c)]; }

    static CMat4 identity();
    static CMat4 zero();
    CMat4 operator+(const CMat4& o) const;
    CMat4 operator-(const CMat4& o) const;
    CMat4 operator*(const CMat4& o) const;
    CVec4 operator*(const CVec4& x) const;
    CMat4 operator*(const BigComplex& s) const;
    CMat4 transpose() const;
    CVec4 col(int c) const;
    BigFloat norm1() const;  // max abs-sum over columns

    /// Solves A x = b by LU with partial pivoting.
    CVec4 solve(const CVec4& b) const;
    CMat4 inverse() const;
    BigComplex det() const;
};

/// Omega(x, y) = x^T J y with J = [[0, Id], [-Id, 0]].
BigComplex omega(const CVec4& x, const CVec4& y);
/// J x.
CVec4 Jmul(const CVec4& x);
CMat4 symplectic_J();

/// Sparse complex polynomial on (q1, q2, p1, p2). Coefficients are exact in
/// the sense that only evaluation rounds.
class PolyFn {
public:
    PolyFn() = default;

    static PolyFn constant(const BigComplex& c);
    static PolyFn monomial(const Mono& m, const BigComplex& c);
    static PolyFn variable(int i);  // 0..3 for q1,q2,p1,p2

    // Invariants of the 1:-1 resonance: I1 = q2 p1 - q1 p2,
    // I2 = (q1^2+q2^2)/2, I3 = (p1^2+p2^2)/2.
    static PolyFn I1();
    static PolyFn I2();
    static PolyFn I3();

    bool empty() const { return t_.empty(); }
    const std::map<std::uint32_t, BigComplex>& terms() const { return t_; }
    BigComplex coef(const Mono& m) const;
    void set(const Mono& m, const BigComplex& c);
    void add_to(const Mono& m, const BigComplex& c);

    int degree() const;  // max total degree, -1 when empty
    int min_weighted_order() const;

    PolyFn& operator+=(const PolyFn& o);
    PolyFn& operator-=(const PolyFn& o);
    friend PolyFn operator+(PolyFn a, const PolyFn& b) { a += b; return a; }
    friend PolyFn operator-(PolyFn a, const PolyFn& b) { a -= b; return a; }
    PolyFn operator-() const;
    PolyFn& operator*=(const BigComplex& s);
    friend PolyFn operator*(const BigComplex& s, PolyFn p) { p *= s; return p; }
    friend PolyFn operator*(const PolyFn& a, const PolyFn& b);

    PolyFn truncate_degree(int dmax) const;
    PolyFn degree_part(int d) const;

    /// Exact partial derivative with respect to variable i.
    PolyFn diff(int i) const;
    /// Poisson bracket {f, g} = sum_i df/dq_i dg/dp_i - df/dp_i dg/dq_i.
    friend PolyFn poisson(const PolyFn& f, const PolyFn& g);

    BigComplex eval(const CVec4& x) const;
    CVec4 gradient_at(const CVec4& x) const;

    /// Linear change of variables x -> M x (M acts on (q1,q2,p1,p2)).
    PolyFn substitute_linear(const CMat4& M) const;

    /// Coefficientwise complex conjugate.
    PolyFn conj_coeffs() const;

    /// Drop coefficients with norm1 <= tol.
    PolyFn pruned(const BigFloat& tol) const;

    std::string to_string() const;

private:
    void check_degree(const Mono& m) const;
    std::map<std::uint32_t, BigComplex> t_;
};

/// 4-component polynomial map on C^4.
struct PolyMap {
    std::array<PolyFn, 4> comp;

    PolyFn& operator[](int i) { return comp[static_cast<size_t>(i)]; }
    const PolyFn& operator[](int i) const { return comp[static_cast<size_t>(i)]; }

    static PolyMap identity();

    CVec4 eval(const CVec4& x) const;
    PolyMap truncate_degree(int dmax) const;
    int degree() const;
};

/// Hamiltonian vector field X_H = (dH/dp1, dH/dp2, -dH/dq1, -dH/dq2).
PolyMap vector_field(const PolyFn& H);

/// The 16 entries of DX (Jacobian of a polynomial map), row-major.
std::array<PolyFn, 16> jacobian(const PolyMap& X);
CMat4 jacobian_at(const PolyMap& X, const CVec4& x);

/// Composition of polynomial maps, truncated at degree dmax.
PolyMap compose(const PolyMap& f, const PolyMap& g, int dmax);

/// Shared cache of power-products Gamma1^a Gamma2^b Gamma3^c Gamma4^d.
class SeriesPowerCache {
public:
    SeriesPowerCache(const TauSeries4& gamma, int min_floor);
    const TauSeries& get(const Mono& m);

private:
    TauSeries4 g_;
    int min_floor_;
    std::map<std::uint32_t, TauSeries> cache_;
};

/// Polynomial evaluation in the truncated series algebra.
TauSeries compose_series(const PolyFn& f, SeriesPowerCache& cache, int min_floor);
TauSeries4 compose_series(const PolyMap& X, const TauSeries4& gamma, int min_floor);

}  // namespace stokeslab

#endif

#ifndef STOKESLAB_TAUSERIES_HPP
#define STOKESLAB_TAUSERIES_HPP

#include "stokeslab/trigpoly.hpp"

#include <array>
#include <limits>
#include <optional>
#include <string>
#include <vector>

namespace stokeslab {

// Largest positive tau exponent a series may develop; guards runaway windows.
int max_positive_exponent();
void set_max_positive_exponent(int e);

enum class Parity { even, odd, none };

/// Truncated series sum_k c_k(phi) tau^k with TrigPoly coefficients.
///
/// `floor()` is the guaranteed-exact part of the window: every exponent
/// >= floor() is represented exactly (up to the coefficient drop threshold);
/// exponents below floor() are unknown truncation tail. kExactFloor marks a
/// series with no tail at all (a Laurent polynomial). Every operation
/// computes the floor it can guarantee for its result.
class TauSeries {
public:
    static constexpr int kExactFloor = std::numeric_limits<int>::min() / 4;

    TauSeries() : floor_(kExactFloor), lo_(0) {}
    explicit TauSeries(int floor) : floor_(floor), lo_(floor) {}

    static TauSeries zero(int floor = kExactFloor) { return TauSeries(floor); }
    static TauSeries monomial(int k, TrigPoly c, int floor = kExactFloor);
    static TauSeries constant(const BigComplex& c, int floor = kExactFloor) {
        return monomial(0, TrigPoly(c), floor);
    }

    int floor() const { return floor_; }
    bool exact() const { return floor_ == kExactFloor; }
    bool empty() const { return c_.empty(); }

    // Stored window [lo, hi]; meaningful only when !empty().
    int lo() const { return lo_; }
    int hi() const { return lo_ + static_cast<int>(c_.size()) - 1; }
    // Highest / lowest exponent whose coefficient exceeds tol.
    std::optional<int> top_exponent(const BigFloat& tol) const;
    std::optional<int> bottom_exponent(const BigFloat& tol) const;

    const TrigPoly& coef(int k) const;
    TrigPoly& at(int k);  // extends window as needed (never below floor)

    std::optional<Parity> parity_tag() const { return parity_; }
    void set_parity_tag(std::optional<Parity> p) { parity_ = p; }
    /// Exponent parity determined by scanning coefficients above tol.
    Parity scan_parity(const BigFloat& tol) const;

    TauSeries& operator+=(const TauSeries& o);
    TauSeries& operator-=(const TauSeries& o);
    friend TauSeries operator+(TauSeries a, const TauSeries& b) { a += b; return a; }
    friend TauSeries operator-(TauSeries a, const TauSeries& b) { a -= b; return a; }
    TauSeries operator-() const;
    TauSeries& operator*=(const BigComplex& s);
    friend TauSeries operator*(const BigComplex& s, TauSeries a) { a *= s; return a; }
    TauSeries& mul_si(long n);

    /// Cauchy product, exact down to the guaranteed floor (optionally clamped
    /// to min_floor to keep windows bounded).
    static TauSeries mul(const TauSeries& a, const TauSeries& b, int min_floor = kExactFloor);
    friend TauSeries operator*(const TauSeries& a, const TauSeries& b) { return mul(a, b); }
    /// Product with a single TrigPoly (exponent 0).
    TauSeries mul_trig(const TrigPoly& t) const;

    /// D = d/dphi + d/dtau.
    TauSeries apply_D() const;
    TauSeries dphi() const;
    TauSeries dtau() const;
    /// Termwise tau^{k+1}/(k+1), integration constant 0. Throws
    /// LogObstructionError when the tau^{-1} coefficient exceeds tol.
    TauSeries antiderivative(const BigFloat& tol) const;

    /// Keep only exponents >= f (raises the floor).
    TauSeries truncate_floor(int f) const;
    /// Keep only exponents <= k (partial sum; floor unchanged).
    TauSeries truncate_top(int k) const;
    /// Reinterpret the stored window as an exact Laurent polynomial
    /// (used for partial sums, whose tail is zero by definition).
    TauSeries as_exact_polynomial() const;

    /// Re-expansion of tau -> tau + tau0 (binomial series, truncated at the
    /// result floor). Valid in the asymptotic regime |tau| >> |tau0|.
    TauSeries shift_tau(const BigComplex& tau0, int min_floor) const;
    /// phi -> phi + phi0.
    TauSeries shift_phi(const BigComplex& phi0) const;
    /// Coefficientwise conj with Fourier modes reflected:
    /// represents (phi,tau) |-> conj(f(conj(phi), conj(tau))).
    TauSeries conj_reflect() const;

    BigComplex eval(const BigComplex& phi, const BigComplex& tau) const;

    /// Max over the window of coefficient norm1.
    BigFloat max_coef_norm() const;
    void prune();

    std::string to_string() const;

    friend TauSeries reciprocal(const TauSeries& a, int min_floor);
    friend TauSeries cos_series(const TauSeries& a, int min_floor);
    friend TauSeries sin_series(const TauSeries& a, int min_floor);

private:
    void trim();
    int floor_;
    int lo_;
    std::vector<TrigPoly> c_;  // exponent lo_ + i
    std::optional<Parity> parity_;
};

/// 1/a for a series whose top coefficient is a nonzero constant mode.
TauSeries reciprocal(const TauSeries& a, int min_floor);
/// cos/sin of a series with top exponent <= -1.
TauSeries cos_series(const TauSeries& a, int min_floor);
TauSeries sin_series(const TauSeries& a, int min_floor);

struct CVec4;  // forward (hamiltonian module)
struct CMat4;

/// 4-component column of TauSeries.
struct TauSeries4 {
    std::array<TauSeries, 4> comp;

    TauSeries& operator[](int i) { return comp[static_cast<size_t>(i)]; }
    const TauSeries& operator[](int i) const { return comp[static_cast<size_t>(i)]; }

    TauSeries4 apply_D() const;
    TauSeries4 dphi() const;
    TauSeries4 dtau() const;
    TauSeries4 operator+(const TauSeries4& o) const;
    TauSeries4 operator-(const TauSeries4& o) const;
    TauSeries4 truncate_floor(int f) const;
    TauSeries4 shift(const BigComplex& phi0, const BigComplex& tau0, int min_floor) const;

    BigFloat max_coef_norm() const;
};

/// Series-valued symplectic pairing Omega(a,b) = a1 b3 + a2 b4 - a3 b1 - a4 b2.
TauSeries omega_series(const TauSeries4& a, const TauSeries4& b, int min_floor = TauSeries::kExactFloor);

/// 4x4 matrix of TauSeries (columns of formal solutions).
struct TauSeriesMat {
    std::array<TauSeries, 16> e;  // row-major

    TauSeries& operator()(int r, int c) { return e[static_cast<size_t>(4 * r + c)]; }
    const TauSeries& operator()(int r, int c) const { return e[static_cast<size_t>(4 * r + c)]; }

    TauSeries4 col(int c) const;
    void set_col(int c, const TauSeries4& v);

    TauSeriesMat apply_D() const;
    TauSeriesMat operator-(const TauSeriesMat& o) const;
    static TauSeriesMat mul(const TauSeriesMat& A, const TauSeriesMat& B, int min_floor);
    TauSeries4 mul_vec(const TauSeries4& v, int min_floor) const;
    /// A^T J A - J with J the standard symplectic matrix.
    TauSeriesMat symplectic_defect(int min_floor) const;
    TauSeriesMat truncate_floor(int f) const;
    TauSeriesMat shift(const BigComplex& phi0, const BigComplex& tau0, int min_floor) const;

    BigFloat max_coef_norm() const;
};

}  // namespace stokeslab

#endif

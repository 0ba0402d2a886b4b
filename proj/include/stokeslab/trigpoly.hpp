#ifndef STOKESLAB_TRIGPOLY_HPP
#define STOKESLAB_TRIGPOLY_HPP

#include "stokeslab/bigcomplex.hpp"
#include "stokeslab/errors.hpp"

#include <map>
#include <string>
#include <vector>

namespace stokeslab {

// Largest Fourier mode any TrigPoly may carry. Products whose result would
// exceed this bound throw ModeOverflowError.
int max_fourier_mode();
void set_max_fourier_mode(int m);

// Coefficients with norm1 below this are pruned. Default 2^(16 - precision).
BigFloat drop_threshold();
void set_drop_threshold_exponent(long e);  // threshold = 2^e
long drop_threshold_exponent();

/// Trigonometric polynomial sum_m c_m e^{i m phi}, m in [-M, M], stored in the
/// exponential basis (unique representation). Cos/sin views are conversions.
class TrigPoly {
public:
    TrigPoly() = default;
    explicit TrigPoly(const BigComplex& constant) { set(0, constant); }

    static TrigPoly mode(int m, const BigComplex& c) {
        TrigPoly t;
        t.set(m, c);
        return t;
    }
    // a*cos(m phi): modes +-m with coefficient a/2.
    static TrigPoly cos_mode(int m, const BigComplex& a);
    // a*sin(m phi): modes +-m with coefficients -+ i a/2.
    static TrigPoly sin_mode(int m, const BigComplex& a);

    bool empty() const { return c_.empty(); }
    int lo_mode() const { return c_.empty() ? 0 : c_.begin()->first; }
    int hi_mode() const { return c_.empty() ? 0 : c_.rbegin()->first; }

    const std::map<int, BigComplex>& modes() const { return c_; }
    BigComplex coef(int m) const {
        auto it = c_.find(m);
        return it == c_.end() ? BigComplex(0L) : it->second;
    }
    void set(int m, const BigComplex& v);
    void add_to(int m, const BigComplex& v);

    TrigPoly& operator+=(const TrigPoly& o);
    TrigPoly& operator-=(const TrigPoly& o);
    friend TrigPoly operator+(TrigPoly a, const TrigPoly& b) { a += b; return a; }
    friend TrigPoly operator-(TrigPoly a, const TrigPoly& b) { a -= b; return a; }
    TrigPoly operator-() const;
    friend TrigPoly operator*(const TrigPoly& a, const TrigPoly& b);
    TrigPoly& operator*=(const BigComplex& s);
    friend TrigPoly operator*(const BigComplex& s, TrigPoly t) { t *= s; return t; }

    /// Termwise d/dphi: c_m -> i m c_m.
    TrigPoly dphi() const;
    /// Coefficients conjugated with modes reflected; represents
    /// phi |-> conj(f(conj(phi))).
    TrigPoly conj_reflect() const;
    /// Multiply mode m by e^{i m phi0} (evaluation shift phi -> phi + phi0).
    TrigPoly shift_phi(const BigComplex& phi0) const;

    BigComplex eval(const BigFloat& phi) const;
    BigComplex eval(const BigComplex& phi) const;

    /// Sum of coefficient norm1's.
    BigFloat norm1() const;
    bool is_zero(const BigFloat& tol) const { return norm1() <= tol; }

    /// Drop coefficients with norm1 <= drop_threshold().
    void prune();

    std::string to_string() const;

    /// dense += a*b over the exponential basis; dense is indexed by
    /// mode - dense_lo and must cover [a.lo+b.lo, a.hi+b.hi].
    static void acc_mul(std::vector<BigComplex>& dense, int dense_lo,
                        const TrigPoly& a, const TrigPoly& b);
    static TrigPoly from_dense(const std::vector<BigComplex>& dense, int dense_lo);

private:
    std::map<int, BigComplex> c_;
};

}  // namespace stokeslab

#endif

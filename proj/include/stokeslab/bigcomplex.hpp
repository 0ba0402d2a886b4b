#ifndef STOKESLAB_BIGCOMPLEX_HPP
#define STOKESLAB_BIGCOMPLEX_HPP

#include "stokeslab/bigfloat.hpp"

#include <string>
#include <utility>

namespace stokeslab {

/// Complex number with arbitrary-precision real and imaginary parts.
/// Immutable-by-convention in shared data structures; the in-place
/// accumulation helpers are for local hot loops.
class BigComplex {
public:
    BigComplex() = default;
    explicit BigComplex(Prec p) : re_(p), im_(p) {}
    BigComplex(BigFloat re, BigFloat im) : re_(std::move(re)), im_(std::move(im)) {}
    BigComplex(long re) : re_(re), im_(0L) {}
    BigComplex(int re) : re_(static_cast<long>(re)), im_(0L) {}
    BigComplex(double re) : re_(re), im_(0.0) {}
    BigComplex(double re, double im) : re_(re), im_(im) {}

    static BigComplex from_string(std::string_view re, std::string_view im, mpfr_prec_t prec = 0) {
        return BigComplex(BigFloat::from_string(re, prec), BigFloat::from_string(im, prec));
    }
    static BigComplex i(mpfr_prec_t prec = 0) {
        mpfr_prec_t p = prec ? prec : default_precision();
        return BigComplex(BigFloat(0L, p), BigFloat(1L, p));
    }

    const BigFloat& re() const { return re_; }
    const BigFloat& im() const { return im_; }
    BigFloat& re() { return re_; }
    BigFloat& im() { return im_; }

    mpfr_prec_t prec() const { return re_.prec() > im_.prec() ? re_.prec() : im_.prec(); }

    bool is_zero() const { return re_.is_zero() && im_.is_zero(); }
    bool is_finite() const { return re_.is_finite() && im_.is_finite(); }

    friend BigComplex operator+(const BigComplex& a, const BigComplex& b) {
        return BigComplex(a.re_ + b.re_, a.im_ + b.im_);
    }
    friend BigComplex operator-(const BigComplex& a, const BigComplex& b) {
        return BigComplex(a.re_ - b.re_, a.im_ - b.im_);
    }
    BigComplex operator-() const { return BigComplex(-re_, -im_); }

    friend BigComplex operator*(const BigComplex& a, const BigComplex& b) {
        BigComplex r(Prec{a.prec() > b.prec() ? a.prec() : b.prec()});
        mpfr_fmms(r.re_.raw(), a.re_.raw(), b.re_.raw(), a.im_.raw(), b.im_.raw(), MPFR_RNDN);
        mpfr_fmma(r.im_.raw(), a.re_.raw(), b.im_.raw(), a.im_.raw(), b.re_.raw(), MPFR_RNDN);
        return r;
    }
    friend BigComplex operator*(const BigFloat& a, const BigComplex& b) {
        return BigComplex(a * b.re_, a * b.im_);
    }
    friend BigComplex operator/(const BigComplex& a, const BigComplex& b) {
        BigComplex r(Prec{a.prec() > b.prec() ? a.prec() : b.prec()});
        BigFloat den(Prec{r.prec()});
        mpfr_fmma(den.raw(), b.re_.raw(), b.re_.raw(), b.im_.raw(), b.im_.raw(), MPFR_RNDN);
        mpfr_fmma(r.re_.raw(), a.re_.raw(), b.re_.raw(), a.im_.raw(), b.im_.raw(), MPFR_RNDN);
        mpfr_fmms(r.im_.raw(), a.im_.raw(), b.re_.raw(), a.re_.raw(), b.im_.raw(), MPFR_RNDN);
        r.re_ /= den;
        r.im_ /= den;
        return r;
    }

    BigComplex& operator+=(const BigComplex& o) { re_ += o.re_; im_ += o.im_; return *this; }
    BigComplex& operator-=(const BigComplex& o) { re_ -= o.re_; im_ -= o.im_; return *this; }
    BigComplex& operator*=(const BigComplex& o) { *this = *this * o; return *this; }
    BigComplex& operator/=(const BigComplex& o) { *this = *this / o; return *this; }

    BigComplex& mul_si(long n) { re_.mul_si(n); im_.mul_si(n); return *this; }
    BigComplex& div_si(long n) { re_.div_si(n); im_.div_si(n); return *this; }
    // Multiply by i (rotates by pi/2).
    BigComplex mul_i() const { return BigComplex(-im_, re_); }

    /// *this += a*b without allocating a temporary complex.
    void add_mul(const BigComplex& a, const BigComplex& b) {
        thread_local BigFloat t(Prec{64});
        t.grow_prec(prec() > a.prec() ? prec() : a.prec());
        mpfr_fmms(t.raw(), a.re_.raw(), b.re_.raw(), a.im_.raw(), b.im_.raw(), MPFR_RNDN);
        re_ += t;
        mpfr_fmma(t.raw(), a.re_.raw(), b.im_.raw(), a.im_.raw(), b.re_.raw(), MPFR_RNDN);
        im_ += t;
    }
    /// *this -= a*b.
    void sub_mul(const BigComplex& a, const BigComplex& b) {
        thread_local BigFloat t(Prec{64});
        t.grow_prec(prec() > a.prec() ? prec() : a.prec());
        mpfr_fmms(t.raw(), a.re_.raw(), b.re_.raw(), a.im_.raw(), b.im_.raw(), MPFR_RNDN);
        re_ -= t;
        mpfr_fmma(t.raw(), a.re_.raw(), b.im_.raw(), a.im_.raw(), b.re_.raw(), MPFR_RNDN);
        im_ -= t;
    }

    friend BigComplex conj(const BigComplex& a) { return BigComplex(a.re_, -a.im_); }
    friend BigFloat abs(const BigComplex& a) { return hypot(a.re_, a.im_); }
    // Cheap norm |re|+|im|; equivalent to the modulus up to a factor sqrt(2).
    friend BigFloat norm1(const BigComplex& a) { return abs(a.re_) + abs(a.im_); }

    friend bool operator==(const BigComplex& a, const BigComplex& b) {
        return a.re_ == b.re_ && a.im_ == b.im_;
    }

    // Principal branch square root.
    friend BigComplex sqrt(const BigComplex& a);
    // exp(a) = e^{re}(cos im, sin im).
    friend BigComplex exp(const BigComplex& a);
    BigComplex pow_ui(unsigned long e) const;

    // e^{i x} for real x.
    static BigComplex exp_i(const BigFloat& x) {
        BigComplex r(x.prec());
        sin_cos(r.im_, r.re_, x);
        return r;
    }

    std::string to_string() const { return re_.to_string() + (im_.sign() < 0 ? " - " : " + ") + abs(im_).to_string() + "i"; }

private:
    BigFloat re_, im_;
};

BigComplex sqrt(const BigComplex& a);
BigComplex exp(const BigComplex& a);
// Namespace-scope declarations for the hidden friends (qualified lookup).
BigFloat abs(const BigComplex& a);
BigFloat norm1(const BigComplex& a);
BigComplex conj(const BigComplex& a);

}  // namespace stokeslab

#endif

#ifndef STOKESLAB_BIGFLOAT_HPP
#define STOKESLAB_BIGFLOAT_HPP

#include <mpfr.h>

#include <cstdint>
#include <string>
#include <string_view>
#include <utility>

namespace stokeslab {

// Process-wide working precision in bits. Individual values carry their own
// precision; this is the precision used when constructing fresh values.
mpfr_prec_t default_precision();
void set_default_precision(mpfr_prec_t bits);

// Number of decimal digits that round-trip at the given binary precision.
int decimal_digits(mpfr_prec_t bits);

/// Tag carrying an explicit precision request (mpfr_prec_t is a plain long,
/// so a bare constructor would collide with the integer-value constructor).
struct Prec {
    mpfr_prec_t bits;
};

/// Arbitrary-precision binary floating-point number (MPFR, round-to-nearest).
/// Arithmetic results carry the maximum precision of their operands.
class BigFloat {
public:
    BigFloat() { mpfr_init2(v_, default_precision()); mpfr_set_zero(v_, 1); }
    explicit BigFloat(Prec p) { mpfr_init2(v_, p.bits); mpfr_set_zero(v_, 1); }
    BigFloat(long n, mpfr_prec_t prec) { mpfr_init2(v_, prec); mpfr_set_si(v_, n, MPFR_RNDN); }
    BigFloat(int n) : BigFloat(static_cast<long>(n), default_precision()) {}
    BigFloat(long n) : BigFloat(n, default_precision()) {}
    BigFloat(double d) { mpfr_init2(v_, default_precision()); mpfr_set_d(v_, d, MPFR_RNDN); }

    BigFloat(const BigFloat& o) { mpfr_init2(v_, mpfr_get_prec(o.v_)); mpfr_set(v_, o.v_, MPFR_RNDN); }
    BigFloat(BigFloat&& o) noexcept {
        mpfr_init2(v_, 53);
        mpfr_swap(v_, o.v_);
    }
    BigFloat& operator=(const BigFloat& o) {
        if (this != &o) {
            if (mpfr_get_prec(v_) != mpfr_get_prec(o.v_)) mpfr_set_prec(v_, mpfr_get_prec(o.v_));
            mpfr_set(v_, o.v_, MPFR_RNDN);
        }
        return *this;
    }
    BigFloat& operator=(BigFloat&& o) noexcept { mpfr_swap(v_, o.v_); return *this; }
    ~BigFloat() { mpfr_clear(v_); }

    static BigFloat from_string(std::string_view s, mpfr_prec_t prec = 0);

    mpfr_prec_t prec() const { return mpfr_get_prec(v_); }
    // Raises precision (value preserved); never lowers it.
    void grow_prec(mpfr_prec_t p) { if (p > prec()) mpfr_prec_round(v_, p, MPFR_RNDN); }

    mpfr_ptr raw() { return v_; }
    mpfr_srcptr raw() const { return v_; }

    double to_double() const { return mpfr_get_d(v_, MPFR_RNDN); }
    // Decimal string with enough digits to reproduce the value exactly.
    std::string to_string() const;

    bool is_zero() const { return mpfr_zero_p(v_) != 0; }
    bool is_nan() const { return mpfr_nan_p(v_) != 0; }
    bool is_finite() const { return mpfr_number_p(v_) != 0; }
    int sign() const { return mpfr_sgn(v_); }

    friend BigFloat operator+(const BigFloat& a, const BigFloat& b) {
        BigFloat r(Prec{opprec(a, b)}); mpfr_add(r.v_, a.v_, b.v_, MPFR_RNDN); return r;
    }
    friend BigFloat operator-(const BigFloat& a, const BigFloat& b) {
        BigFloat r(Prec{opprec(a, b)}); mpfr_sub(r.v_, a.v_, b.v_, MPFR_RNDN); return r;
    }
    friend BigFloat operator*(const BigFloat& a, const BigFloat& b) {
        BigFloat r(Prec{opprec(a, b)}); mpfr_mul(r.v_, a.v_, b.v_, MPFR_RNDN); return r;
    }
    friend BigFloat operator/(const BigFloat& a, const BigFloat& b) {
        BigFloat r(Prec{opprec(a, b)}); mpfr_div(r.v_, a.v_, b.v_, MPFR_RNDN); return r;
    }
    BigFloat operator-() const { BigFloat r(Prec{prec()}); mpfr_neg(r.v_, v_, MPFR_RNDN); return r; }

    BigFloat& operator+=(const BigFloat& o) { grow_prec(o.prec()); mpfr_add(v_, v_, o.v_, MPFR_RNDN); return *this; }
    BigFloat& operator-=(const BigFloat& o) { grow_prec(o.prec()); mpfr_sub(v_, v_, o.v_, MPFR_RNDN); return *this; }
    BigFloat& operator*=(const BigFloat& o) { grow_prec(o.prec()); mpfr_mul(v_, v_, o.v_, MPFR_RNDN); return *this; }
    BigFloat& operator/=(const BigFloat& o) { grow_prec(o.prec()); mpfr_div(v_, v_, o.v_, MPFR_RNDN); return *this; }

    BigFloat& mul_si(long n) { mpfr_mul_si(v_, v_, n, MPFR_RNDN); return *this; }
    BigFloat& div_si(long n) { mpfr_div_si(v_, v_, n, MPFR_RNDN); return *this; }
    BigFloat& neg_inplace() { mpfr_neg(v_, v_, MPFR_RNDN); return *this; }

    friend bool operator==(const BigFloat& a, const BigFloat& b) { return mpfr_cmp(a.v_, b.v_) == 0; }
    friend bool operator<(const BigFloat& a, const BigFloat& b) { return mpfr_cmp(a.v_, b.v_) < 0; }
    friend bool operator<=(const BigFloat& a, const BigFloat& b) { return mpfr_cmp(a.v_, b.v_) <= 0; }
    friend bool operator>(const BigFloat& a, const BigFloat& b) { return mpfr_cmp(a.v_, b.v_) > 0; }
    friend bool operator>=(const BigFloat& a, const BigFloat& b) { return mpfr_cmp(a.v_, b.v_) >= 0; }

    friend BigFloat abs(const BigFloat& a) { BigFloat r(Prec{a.prec()}); mpfr_abs(r.v_, a.v_, MPFR_RNDN); return r; }
    friend BigFloat sqrt(const BigFloat& a) { BigFloat r(Prec{a.prec()}); mpfr_sqrt(r.v_, a.v_, MPFR_RNDN); return r; }
    friend BigFloat hypot(const BigFloat& a, const BigFloat& b) {
        BigFloat r(Prec{opprec(a, b)}); mpfr_hypot(r.v_, a.v_, b.v_, MPFR_RNDN); return r;
    }
    friend BigFloat log(const BigFloat& a) { BigFloat r(Prec{a.prec()}); mpfr_log(r.v_, a.v_, MPFR_RNDN); return r; }
    friend BigFloat exp(const BigFloat& a) { BigFloat r(Prec{a.prec()}); mpfr_exp(r.v_, a.v_, MPFR_RNDN); return r; }
    friend BigFloat pow_ui(const BigFloat& a, unsigned long e) {
        BigFloat r(Prec{a.prec()}); mpfr_pow_ui(r.v_, a.v_, e, MPFR_RNDN); return r;
    }
    friend BigFloat max(const BigFloat& a, const BigFloat& b) { return (a < b) ? b : a; }
    friend BigFloat min(const BigFloat& a, const BigFloat& b) { return (a < b) ? a : b; }

    static BigFloat pi(mpfr_prec_t prec = 0) {
        BigFloat r(Prec{prec ? prec : default_precision()});
        mpfr_const_pi(r.v_, MPFR_RNDN);
        return r;
    }
    // 2^e (exact).
    static BigFloat pow2(long e, mpfr_prec_t prec = 0) {
        BigFloat r(Prec{prec ? prec : default_precision()});
        mpfr_set_si(r.v_, 1, MPFR_RNDN);
        mpfr_mul_2si(r.v_, r.v_, e, MPFR_RNDN);
        return r;
    }

    friend void sin_cos(BigFloat& s, BigFloat& c, const BigFloat& x) {
        s.grow_prec(x.prec()); c.grow_prec(x.prec());
        mpfr_sin_cos(s.v_, c.v_, x.v_, MPFR_RNDN);
    }

private:
    static mpfr_prec_t opprec(const BigFloat& a, const BigFloat& b) {
        return a.prec() > b.prec() ? a.prec() : b.prec();
    }
    mpfr_t v_;
};

}  // namespace stokeslab

#endif

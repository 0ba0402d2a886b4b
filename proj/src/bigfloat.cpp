#include "stokeslab/bigcomplex.hpp"

#include <atomic>
#include <cmath>
#include <cstdio>
#include <stdexcept>
#include <vector>

namespace stokeslab {

namespace {
std::atomic<mpfr_prec_t> g_default_prec{192};
}

mpfr_prec_t default_precision() { return g_default_prec.load(std::memory_order_relaxed); }

void set_default_precision(mpfr_prec_t bits) {
    if (bits < 53) throw std::invalid_argument("precision_bits must be >= 53");
    g_default_prec.store(bits, std::memory_order_relaxed);
}

int decimal_digits(mpfr_prec_t bits) {
    return static_cast<int>(std::floor(static_cast<double>(bits) * 0.30102999566398119521)) ;
}

BigFloat BigFloat::from_string(std::string_view s, mpfr_prec_t prec) {
    BigFloat r(Prec{prec ? prec : default_precision()});
    std::string buf(s);
    if (mpfr_set_str(r.v_, buf.c_str(), 10, MPFR_RNDN) != 0 && !buf.empty() && buf != "nan") {
        // mpfr_set_str returns nonzero on failure or inexact ternary; distinguish:
        // it returns -1 on parse failure only via mpfr_strtofr; re-check with strtofr.
        mpfr_t t;
        mpfr_init2(t, r.prec());
        char* end = nullptr;
        mpfr_strtofr(t, buf.c_str(), &end, 10, MPFR_RNDN);
        bool ok = end && *end == '\0' && end != buf.c_str();
        mpfr_set(r.v_, t, MPFR_RNDN);
        mpfr_clear(t);
        if (!ok) throw std::invalid_argument("BigFloat: cannot parse '" + buf + "'");
    }
    return r;
}

std::string BigFloat::to_string() const {
    if (mpfr_nan_p(v_)) return "nan";
    if (mpfr_inf_p(v_)) return mpfr_sgn(v_) > 0 ? "inf" : "-inf";
    if (mpfr_zero_p(v_)) return mpfr_signbit(v_) ? "-0" : "0";
    int ndig = decimal_digits(prec()) + 3;
    mpfr_exp_t e;
    char* s = mpfr_get_str(nullptr, &e, 10, static_cast<size_t>(ndig), v_, MPFR_RNDN);
    std::string digits(s);
    mpfr_free_str(s);
    bool neg = !digits.empty() && digits[0] == '-';
    std::string mant = neg ? digits.substr(1) : digits;
    // strip trailing zeros, keep at least one digit
    size_t last = mant.find_last_not_of('0');
    mant = mant.substr(0, last == std::string::npos ? 1 : last + 1);
    std::string out = neg ? "-" : "";
    out += mant.substr(0, 1);
    if (mant.size() > 1) out += "." + mant.substr(1);
    out += "e" + std::to_string(static_cast<long>(e) - 1);
    return out;
}

BigComplex sqrt(const BigComplex& a) {
    mpfr_prec_t p = a.prec();
    if (a.im().is_zero()) {
        if (a.re().sign() >= 0) return BigComplex(sqrt(a.re()), BigFloat(0L, p));
        return BigComplex(BigFloat(0L, p), sqrt(-a.re()));
    }
    BigFloat r = hypot(a.re(), a.im());
    BigFloat half(0.5);
    if (a.re().sign() >= 0) {
        BigFloat re = sqrt((r + a.re()) * half);
        BigFloat im = a.im() / (re + re);
        return BigComplex(re, im);
    }
    BigFloat t = sqrt((r - a.re()) * half);
    BigFloat im = (a.im().sign() >= 0) ? t : -t;
    BigFloat re = a.im() / (im + im);
    return BigComplex(re, im);
}

BigComplex exp(const BigComplex& a) {
    BigFloat m = exp(a.re());
    BigComplex rot = BigComplex::exp_i(a.im());
    return BigComplex(m * rot.re(), m * rot.im());
}

BigComplex BigComplex::pow_ui(unsigned long e) const {
    BigComplex acc(1L);
    BigComplex base = *this;
    while (e) {
        if (e & 1UL) acc *= base;
        base *= base;
        e >>= 1UL;
    }
    return acc;
}

}  // namespace stokeslab

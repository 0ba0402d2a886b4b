#include "stokeslab/trigpoly.hpp"

#include <atomic>
#include <sstream>

namespace stokeslab {

namespace {
std::atomic<int> g_max_mode{96};
std::atomic<long> g_drop_exp{0};  // 0 means "derive from default precision"
}

int max_fourier_mode() { return g_max_mode.load(std::memory_order_relaxed); }
void set_max_fourier_mode(int m) { g_max_mode.store(m, std::memory_order_relaxed); }

long drop_threshold_exponent() {
    long e = g_drop_exp.load(std::memory_order_relaxed);
    if (e == 0) e = 16 - static_cast<long>(default_precision());
    return e;
}
void set_drop_threshold_exponent(long e) { g_drop_exp.store(e, std::memory_order_relaxed); }

BigFloat drop_threshold() { return BigFloat::pow2(drop_threshold_exponent()); }

TrigPoly TrigPoly::cos_mode(int m, const BigComplex& a) {
    if (m == 0) return TrigPoly(a);
    TrigPoly t;
    BigComplex half = a;
    half.div_si(2);
    t.set(m, half);
    t.set(-m, half);
    return t;
}

TrigPoly TrigPoly::sin_mode(int m, const BigComplex& a) {
    if (m == 0) return TrigPoly();
    TrigPoly t;
    BigComplex h = a;
    h.div_si(2);
    t.set(m, -h.mul_i());   // a/(2i) = -i a/2
    t.set(-m, h.mul_i());
    return t;
}

void TrigPoly::set(int m, const BigComplex& v) {
    if (std::abs(m) > max_fourier_mode())
        throw ModeOverflowError("TrigPoly mode " + std::to_string(m) + " exceeds bound");
    if (v.is_zero())
        c_.erase(m);
    else
        c_[m] = v;
}

void TrigPoly::add_to(int m, const BigComplex& v) {
    if (std::abs(m) > max_fourier_mode())
        throw ModeOverflowError("TrigPoly mode " + std::to_string(m) + " exceeds bound");
    auto [it, fresh] = c_.try_emplace(m, v);
    if (!fresh) it->second += v;
}

TrigPoly& TrigPoly::operator+=(const TrigPoly& o) {
    for (const auto& [m, v] : o.c_) add_to(m, v);
    return *this;
}

TrigPoly& TrigPoly::operator-=(const TrigPoly& o) {
    for (const auto& [m, v] : o.c_) add_to(m, -v);
    return *this;
}

TrigPoly TrigPoly::operator-() const {
    TrigPoly t;
    for (const auto& [m, v] : c_) t.c_[m] = -v;
    return t;
}

TrigPoly& TrigPoly::operator*=(const BigComplex& s) {
    if (s.is_zero()) {
        c_.clear();
        return *this;
    }
    for (auto& [m, v] : c_) v *= s;
    return *this;
}

TrigPoly operator*(const TrigPoly& a, const TrigPoly& b) {
    if (a.empty() || b.empty()) return TrigPoly();
    int lo = a.lo_mode() + b.lo_mode();
    int hi = a.hi_mode() + b.hi_mode();
    if (std::max(std::abs(lo), std::abs(hi)) > max_fourier_mode())
        throw ModeOverflowError("trig_product result mode exceeds bound");
    std::vector<BigComplex> dense(static_cast<size_t>(hi - lo + 1));
    TrigPoly::acc_mul(dense, lo, a, b);
    return TrigPoly::from_dense(dense, lo);
}

void TrigPoly::acc_mul(std::vector<BigComplex>& dense, int dense_lo,
                       const TrigPoly& a, const TrigPoly& b) {
    for (const auto& [ma, va] : a.c_)
        for (const auto& [mb, vb] : b.c_)
            dense[static_cast<size_t>(ma + mb - dense_lo)].add_mul(va, vb);
}

TrigPoly TrigPoly::from_dense(const std::vector<BigComplex>& dense, int dense_lo) {
    TrigPoly t;
    BigFloat thr = drop_threshold();
    for (size_t i = 0; i < dense.size(); ++i)
        if (stokeslab::norm1(dense[i]) > thr) t.c_[dense_lo + static_cast<int>(i)] = dense[i];
    return t;
}

TrigPoly TrigPoly::dphi() const {
    TrigPoly t;
    for (const auto& [m, v] : c_) {
        if (m == 0) continue;
        BigComplex w = v.mul_i();
        w.mul_si(m);
        t.c_[m] = w;
    }
    return t;
}

TrigPoly TrigPoly::conj_reflect() const {
    TrigPoly t;
    for (const auto& [m, v] : c_) t.c_[-m] = conj(v);
    return t;
}

TrigPoly TrigPoly::shift_phi(const BigComplex& phi0) const {
    TrigPoly t;
    for (const auto& [m, v] : c_) {
        BigComplex arg = phi0.mul_i();
        arg.mul_si(m);
        t.c_[m] = v * exp(arg);
    }
    return t;
}

BigComplex TrigPoly::eval(const BigFloat& phi) const {
    return eval(BigComplex(phi, BigFloat(0L, phi.prec())));
}

BigComplex TrigPoly::eval(const BigComplex& phi) const {
    if (c_.empty()) return BigComplex(0L);
    // Horner in E = e^{i phi} from the highest mode down to lo, then E^lo.
    BigComplex E = exp(phi.mul_i());
    BigComplex acc(0L);
    int prev = 0;
    bool first = true;
    for (auto it = c_.rbegin(); it != c_.rend(); ++it) {
        if (first) {
            acc = it->second;
            first = false;
        } else {
            for (int j = 0; j < prev - it->first; ++j) acc *= E;
            acc += it->second;
        }
        prev = it->first;
    }
    int lo = c_.begin()->first;
    if (lo > 0) {
        for (int j = 0; j < lo; ++j) acc *= E;
    } else if (lo < 0) {
        BigComplex Einv = BigComplex(1L) / E;
        for (int j = 0; j < -lo; ++j) acc *= Einv;
    }
    return acc;
}

BigFloat TrigPoly::norm1() const {
    BigFloat s(0L);
    for (const auto& [m, v] : c_) s += stokeslab::norm1(v);
    return s;
}

void TrigPoly::prune() {
    BigFloat thr = drop_threshold();
    for (auto it = c_.begin(); it != c_.end();)
        it = (stokeslab::norm1(it->second) <= thr) ? c_.erase(it) : std::next(it);
}

std::string TrigPoly::to_string() const {
    if (c_.empty()) return "0";
    std::ostringstream os;
    bool first = true;
    for (const auto& [m, v] : c_) {
        if (!first) os << " + ";
        os << "(" << v.to_string() << ")";
        if (m != 0) os << "*e^(" << m << "i phi)";
        first = false;
    }
    return os.str();
}

}  // namespace stokeslab

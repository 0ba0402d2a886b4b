#include "stokeslab/tauseries.hpp"

#include <atomic>
#include <cassert>
#include <sstream>
#include <stdexcept>

namespace stokeslab {

namespace {
std::atomic<int> g_max_pos_exp{24};

std::optional<Parity> combine_add(std::optional<Parity> a, std::optional<Parity> b) {
    if (!a || !b) return std::nullopt;
    if (*a == *b) return a;
    return std::nullopt;
}
std::optional<Parity> combine_mul(std::optional<Parity> a, std::optional<Parity> b) {
    if (!a || !b || *a == Parity::none || *b == Parity::none) return std::nullopt;
    return (*a == *b) ? Parity::even : Parity::odd;
}
std::optional<Parity> flip(std::optional<Parity> a) {
    if (!a || *a == Parity::none) return a;
    return (*a == Parity::even) ? Parity::odd : Parity::even;
}
}  // namespace

int max_positive_exponent() { return g_max_pos_exp.load(std::memory_order_relaxed); }
void set_max_positive_exponent(int e) { g_max_pos_exp.store(e, std::memory_order_relaxed); }

TauSeries TauSeries::monomial(int k, TrigPoly c, int floor) {
    TauSeries s(floor);
    if (k >= floor) {
        s.lo_ = k;
        s.c_.push_back(std::move(c));
        s.trim();
    }
    return s;
}

void TauSeries::trim() {
    size_t b = 0, e = c_.size();
    while (b < e && c_[b].empty()) ++b;
    while (e > b && c_[e - 1].empty()) --e;
    if (b == e) {
        c_.clear();
        lo_ = floor_;
        return;
    }
    if (b > 0) c_.erase(c_.begin(), c_.begin() + static_cast<long>(b));
    c_.resize(e - b);
    lo_ += static_cast<int>(b);
}

std::optional<int> TauSeries::top_exponent(const BigFloat& tol) const {
    for (int k = hi(); !c_.empty() && k >= lo_; --k)
        if (coef(k).norm1() > tol) return k;
    return std::nullopt;
}

std::optional<int> TauSeries::bottom_exponent(const BigFloat& tol) const {
    for (int k = lo_; !c_.empty() && k <= hi(); ++k)
        if (coef(k).norm1() > tol) return k;
    return std::nullopt;
}

const TrigPoly& TauSeries::coef(int k) const {
    static const TrigPoly kZero;
    if (c_.empty() || k < lo_ || k > hi()) return kZero;
    return c_[static_cast<size_t>(k - lo_)];
}

TrigPoly& TauSeries::at(int k) {
    if (k < floor_) throw std::logic_error("TauSeries::at below floor");
    if (c_.empty()) {
        lo_ = k;
        c_.emplace_back();
        return c_[0];
    }
    if (k < lo_) {
        c_.insert(c_.begin(), static_cast<size_t>(lo_ - k), TrigPoly());
        lo_ = k;
    } else if (k > hi()) {
        c_.resize(static_cast<size_t>(k - lo_ + 1));
    }
    return c_[static_cast<size_t>(k - lo_)];
}

Parity TauSeries::scan_parity(const BigFloat& tol) const {
    bool even = false, odd = false;
    for (int k = lo_; !c_.empty() && k <= hi(); ++k) {
        if (coef(k).norm1() <= tol) continue;
        ((k % 2) == 0 ? even : odd) = true;
    }
    if (even && odd) return Parity::none;
    if (odd) return Parity::odd;
    return Parity::even;  // all-zero counts as even
}

TauSeries& TauSeries::operator+=(const TauSeries& o) {
    parity_ = combine_add(parity_, o.parity_);
    floor_ = std::max(floor_, o.floor_);
    if (!o.c_.empty())
        for (int k = std::max(o.lo_, floor_); k <= o.hi(); ++k) at(k) += o.coef(k);
    if (!c_.empty() && lo_ < floor_) {
        c_.erase(c_.begin(), c_.begin() + static_cast<long>(std::min<size_t>(c_.size(), static_cast<size_t>(floor_ - lo_))));
        lo_ = floor_;
    }
    trim();
    return *this;
}

TauSeries& TauSeries::operator-=(const TauSeries& o) {
    TauSeries n = -o;
    return (*this += n);
}

TauSeries TauSeries::operator-() const {
    TauSeries r(*this);
    for (auto& t : r.c_) t = -t;
    return r;
}

TauSeries& TauSeries::operator*=(const BigComplex& s) {
    if (s.is_zero()) {
        c_.clear();
        lo_ = floor_;
        return *this;
    }
    for (auto& t : c_) t *= s;
    return *this;
}

TauSeries& TauSeries::mul_si(long n) {
    return (*this *= BigComplex(n));
}

TauSeries TauSeries::mul(const TauSeries& a, const TauSeries& b, int min_floor) {
    if ((a.exact() && a.empty()) || (b.exact() && b.empty())) return TauSeries();
    long f1 = std::numeric_limits<long>::min(), f2 = f1;
    if (!a.exact()) f1 = static_cast<long>(a.floor_) + (b.empty() ? b.floor_ - 1 : b.hi());
    if (!b.exact()) f2 = static_cast<long>(b.floor_) + (a.empty() ? a.floor_ - 1 : a.hi());
    long fl = std::max({f1, f2, static_cast<long>(min_floor == kExactFloor ? std::numeric_limits<long>::min() : min_floor)});
    int fc = (fl == std::numeric_limits<long>::min()) ? kExactFloor : static_cast<int>(fl);
    TauSeries r(fc);
    r.parity_ = combine_mul(a.parity_, b.parity_);
    if (a.empty() || b.empty()) return r;
    int hi_c = a.hi() + b.hi();
    if (hi_c > max_positive_exponent())
        throw WindowOverflowError("tau series product exponent " + std::to_string(hi_c) + " exceeds bound");
    int lo_c = std::max(fc, a.lo_ + b.lo_);
    if (hi_c < lo_c) return r;

    // Global Fourier-mode span of the result.
    int aml = 0, amh = 0, bml = 0, bmh = 0;
    for (const auto& t : a.c_) {
        if (t.empty()) continue;
        aml = std::min(aml, t.lo_mode());
        amh = std::max(amh, t.hi_mode());
    }
    for (const auto& t : b.c_) {
        if (t.empty()) continue;
        bml = std::min(bml, t.lo_mode());
        bmh = std::max(bmh, t.hi_mode());
    }
    int ml = aml + bml, mh = amh + bmh;
    if (std::max(std::abs(ml), std::abs(mh)) > max_fourier_mode())
        throw ModeOverflowError("tau series product Fourier mode exceeds bound");
    size_t span = static_cast<size_t>(mh - ml + 1);

    std::vector<std::vector<BigComplex>> dense(static_cast<size_t>(hi_c - lo_c + 1));
    for (int ka = a.lo_; ka <= a.hi(); ++ka) {
        const TrigPoly& ca = a.coef(ka);
        if (ca.empty()) continue;
        for (int kb = b.lo_; kb <= b.hi(); ++kb) {
            int k = ka + kb;
            if (k < lo_c) continue;
            const TrigPoly& cb = b.coef(kb);
            if (cb.empty()) continue;
            auto& row = dense[static_cast<size_t>(k - lo_c)];
            if (row.empty()) row.resize(span);
            TrigPoly::acc_mul(row, ml, ca, cb);
        }
    }
    for (size_t i = 0; i < dense.size(); ++i) {
        if (dense[i].empty()) continue;
        TrigPoly t = TrigPoly::from_dense(dense[i], ml);
        if (!t.empty()) r.at(lo_c + static_cast<int>(i)) = std::move(t);
    }
    r.trim();
    return r;
}

TauSeries TauSeries::mul_trig(const TrigPoly& t) const {
    TauSeries r(floor_);
    r.parity_ = parity_;
    if (t.empty()) return r;
    for (int k = lo_; !c_.empty() && k <= hi(); ++k) {
        if (coef(k).empty()) continue;
        TrigPoly p = coef(k) * t;
        if (!p.empty()) r.at(k) = std::move(p);
    }
    r.trim();
    return r;
}

TauSeries TauSeries::apply_D() const {
    TauSeries r(floor_);
    for (int k = lo_; !c_.empty() && k <= hi(); ++k) {
        const TrigPoly& ck = coef(k);
        if (ck.empty()) continue;
        TrigPoly d = ck.dphi();
        if (!d.empty()) r.at(k) += d;
        if (k != 0 && k - 1 >= floor_) {
            TrigPoly s = ck;
            s *= BigComplex(static_cast<long>(k));
            r.at(k - 1) += s;
        }
    }
    r.trim();
    return r;
}

TauSeries TauSeries::dphi() const {
    TauSeries r(floor_);
    r.parity_ = parity_;
    for (int k = lo_; !c_.empty() && k <= hi(); ++k) {
        TrigPoly d = coef(k).dphi();
        if (!d.empty()) r.at(k) = std::move(d);
    }
    r.trim();
    return r;
}

TauSeries TauSeries::dtau() const {
    TauSeries r(exact() ? kExactFloor : floor_ - 1);
    r.parity_ = flip(parity_);
    for (int k = lo_; !c_.empty() && k <= hi(); ++k) {
        if (k == 0 || coef(k).empty()) continue;
        TrigPoly s = coef(k);
        s *= BigComplex(static_cast<long>(k));
        r.at(k - 1) = std::move(s);
    }
    r.trim();
    return r;
}

TauSeries TauSeries::antiderivative(const BigFloat& tol) const {
    if (coef(-1).norm1() > tol)
        throw LogObstructionError("formal antiderivative: tau^{-1} coefficient present (|c| = " +
                                  coef(-1).norm1().to_string() + ")");
    TauSeries r(exact() ? kExactFloor : floor_ + 1);
    r.parity_ = flip(parity_);
    for (int k = lo_; !c_.empty() && k <= hi(); ++k) {
        if (k == -1 || coef(k).empty()) continue;
        TrigPoly s = coef(k);
        s *= BigComplex(1L) / BigComplex(static_cast<long>(k + 1));
        r.at(k + 1) = std::move(s);
    }
    r.trim();
    return r;
}

TauSeries TauSeries::truncate_floor(int f) const {
    TauSeries r(*this);
    r.floor_ = std::max(floor_, f);
    if (!r.c_.empty() && r.lo_ < r.floor_) {
        size_t cut = std::min(r.c_.size(), static_cast<size_t>(r.floor_ - r.lo_));
        r.c_.erase(r.c_.begin(), r.c_.begin() + static_cast<long>(cut));
        r.lo_ = r.floor_;
    }
    r.trim();
    return r;
}

TauSeries TauSeries::as_exact_polynomial() const {
    TauSeries r(*this);
    r.floor_ = kExactFloor;
    return r;
}

TauSeries TauSeries::truncate_top(int k) const {
    TauSeries r(*this);
    if (!r.c_.empty() && r.hi() > k) r.c_.resize(static_cast<size_t>(std::max(0, k - r.lo_ + 1)));
    r.trim();
    return r;
}

TauSeries TauSeries::shift_tau(const BigComplex& tau0, int min_floor) const {
    int f = exact() ? min_floor : std::max(floor_, min_floor);
    bool has_neg = !c_.empty() && lo_ < 0;
    TauSeries r(has_neg || !exact() ? f : kExactFloor);
    for (int k = lo_; !c_.empty() && k <= hi(); ++k) {
        const TrigPoly& ck = coef(k);
        if (ck.empty()) continue;
        if (k >= 0) {
            // (tau+tau0)^k: finite binomial.
            BigComplex w(1L);
            for (int j = k; j >= 0; --j) {
                // coefficient of tau^j: C(k, j) tau0^{k-j}
                if (j >= r.floor_ || r.exact()) {
                    TrigPoly t = ck;
                    t *= w;
                    if (!t.empty()) r.at(j) += t;
                }
                if (j > 0) {
                    w *= tau0;
                    w *= BigComplex(static_cast<long>(j));
                    w /= BigComplex(static_cast<long>(k - j + 1));
                }
            }
        } else {
            // (tau+tau0)^k = sum_{j>=0} C(k,j) tau0^j tau^{k-j}
            BigComplex w(1L);
            for (int j = 0; k - j >= r.floor_; ++j) {
                if (j > 0) {
                    w *= tau0;
                    w *= BigComplex(static_cast<long>(k - j + 1));
                    w /= BigComplex(static_cast<long>(j));
                }
                TrigPoly t = ck;
                t *= w;
                if (!t.empty()) r.at(k - j) += t;
            }
        }
    }
    r.prune();
    r.trim();
    return r;
}

TauSeries TauSeries::shift_phi(const BigComplex& phi0) const {
    TauSeries r(floor_);
    r.parity_ = parity_;
    for (int k = lo_; !c_.empty() && k <= hi(); ++k) {
        if (coef(k).empty()) continue;
        r.at(k) = coef(k).shift_phi(phi0);
    }
    r.trim();
    return r;
}

TauSeries TauSeries::conj_reflect() const {
    TauSeries r(floor_);
    r.parity_ = parity_;
    for (int k = lo_; !c_.empty() && k <= hi(); ++k) {
        if (coef(k).empty()) continue;
        r.at(k) = coef(k).conj_reflect();
    }
    r.trim();
    return r;
}

BigComplex TauSeries::eval(const BigComplex& phi, const BigComplex& tau) const {
    if (c_.empty()) return BigComplex(0L);
    BigComplex pos(0L);
    for (int k = hi(); k >= 0; --k) {
        pos *= tau;
        const TrigPoly& ck = coef(k);
        if (!ck.empty()) pos += ck.eval(phi);
    }
    BigComplex neg(0L);
    if (lo_ < 0) {
        BigComplex itau = BigComplex(1L) / tau;
        int ktop = std::min(-1, hi());
        BigComplex inner = coef(lo_).eval(phi);
        for (int k = lo_ + 1; k <= ktop; ++k) {
            inner *= itau;
            inner += coef(k).eval(phi);
        }
        for (int j = 0; j < -ktop; ++j) inner *= itau;
        neg = inner;
    }
    return pos + neg;
}

BigFloat TauSeries::max_coef_norm() const {
    BigFloat m(0L);
    for (const auto& t : c_) m = max(m, t.norm1());
    return m;
}

void TauSeries::prune() {
    for (auto& t : c_) t.prune();
    trim();
}

std::string TauSeries::to_string() const {
    std::ostringstream os;
    os << "[floor " << (exact() ? std::string("exact") : std::to_string(floor_)) << "] ";
    if (c_.empty()) {
        os << "0";
        return os.str();
    }
    bool first = true;
    for (int k = hi(); k >= lo_; --k) {
        if (coef(k).empty()) continue;
        if (!first) os << " + ";
        os << "(" << coef(k).to_string() << ")";
        if (k != 0) os << "*tau^" << k;
        first = false;
    }
    return os.str();
}

TauSeries reciprocal(const TauSeries& a, int min_floor) {
    BigFloat thr = drop_threshold();
    auto t = a.top_exponent(thr);
    if (!t) throw std::invalid_argument("reciprocal of (numerically) zero series");
    const TrigPoly& top = a.coef(*t);
    if (top.lo_mode() != 0 || top.hi_mode() != 0)
        throw std::invalid_argument("reciprocal: top coefficient must be a constant mode");
    BigComplex c = top.coef(0);
    // u = a * tau^{-t}/c - 1 has top exponent < 0
    TauSeries u = a;
    u *= (BigComplex(1L) / c);
    // shift exponents by -t
    TauSeries us(u.floor() == TauSeries::kExactFloor ? TauSeries::kExactFloor : u.floor() - *t);
    for (int k = u.lo(); !u.empty() && k <= u.hi(); ++k)
        if (!u.coef(k).empty()) us.at(k - *t) = u.coef(k);
    us.at(0) -= TrigPoly(BigComplex(1L));
    us.prune();

    // geometric series sum_j (-u)^j, truncated at relative floor
    int rel_floor = min_floor + *t;  // result floor min_floor <=> series-in-u floor min_floor + t
    if (!a.exact()) rel_floor = std::max(rel_floor, a.floor() - 2 * (*t) + *t);
    TauSeries geo = TauSeries::constant(BigComplex(1L), rel_floor);
    TauSeries pw = TauSeries::constant(BigComplex(1L), rel_floor);
    TauSeries mus = -us;
    while (true) {
        pw = TauSeries::mul(pw, mus, rel_floor);
        auto pt = pw.top_exponent(thr);
        if (!pt || *pt < rel_floor) break;
        geo += pw;
    }
    // result = tau^{-t}/c * geo
    TauSeries r(min_floor);
    for (int k = geo.lo(); !geo.empty() && k <= geo.hi(); ++k) {
        if (geo.coef(k).empty()) continue;
        if (k - *t < min_floor) continue;
        TrigPoly p = geo.coef(k);
        p *= (BigComplex(1L) / c);
        r.at(k - *t) = std::move(p);
    }
    r.prune();
    return r;
}

namespace {
TauSeries trig_series(const TauSeries& a, int min_floor, bool want_cos) {
    BigFloat thr = drop_threshold();
    auto t = a.top_exponent(thr);
    if (t && *t > -1) throw std::invalid_argument("cos/sin series require top exponent <= -1");
    TauSeries acc = want_cos ? TauSeries::constant(BigComplex(1L), min_floor) : TauSeries(min_floor);
    TauSeries pw = TauSeries::constant(BigComplex(1L), min_floor);
    long fact_step = 0;
    BigComplex coefsign(1L);
    // cos: sum (-1)^i a^{2i}/(2i)!;  sin: sum (-1)^i a^{2i+1}/(2i+1)!
    if (!want_cos) {
        pw = TauSeries::mul(pw, a, min_floor);
        acc += pw;
        fact_step = 1;
    }
    while (true) {
        pw = TauSeries::mul(TauSeries::mul(pw, a, min_floor), a, min_floor);
        auto pt = pw.top_exponent(thr);
        if (!pt || *pt < min_floor) break;
        fact_step += 2;
        coefsign = -coefsign;
        BigComplex invf(1L);
        for (long j = 2; j <= fact_step; ++j) invf /= BigComplex(j);
        TauSeries term = pw;
        term *= coefsign * invf;
        acc += term;
    }
    return acc;
}
}  // namespace

TauSeries cos_series(const TauSeries& a, int min_floor) { return trig_series(a, min_floor, true); }
TauSeries sin_series(const TauSeries& a, int min_floor) { return trig_series(a, min_floor, false); }

TauSeries4 TauSeries4::apply_D() const {
    TauSeries4 r;
    for (int i = 0; i < 4; ++i) r[i] = comp[static_cast<size_t>(i)].apply_D();
    return r;
}
TauSeries4 TauSeries4::dphi() const {
    TauSeries4 r;
    for (int i = 0; i < 4; ++i) r[i] = comp[static_cast<size_t>(i)].dphi();
    return r;
}
TauSeries4 TauSeries4::dtau() const {
    TauSeries4 r;
    for (int i = 0; i < 4; ++i) r[i] = comp[static_cast<size_t>(i)].dtau();
    return r;
}
TauSeries4 TauSeries4::operator+(const TauSeries4& o) const {
    TauSeries4 r(*this);
    for (int i = 0; i < 4; ++i) r[i] += o[i];
    return r;
}
TauSeries4 TauSeries4::operator-(const TauSeries4& o) const {
    TauSeries4 r(*this);
    for (int i = 0; i < 4; ++i) r[i] -= o[i];
    return r;
}
TauSeries4 TauSeries4::truncate_floor(int f) const {
    TauSeries4 r;
    for (int i = 0; i < 4; ++i) r[i] = comp[static_cast<size_t>(i)].truncate_floor(f);
    return r;
}
TauSeries4 TauSeries4::shift(const BigComplex& phi0, const BigComplex& tau0, int min_floor) const {
    TauSeries4 r;
    for (int i = 0; i < 4; ++i)
        r[i] = comp[static_cast<size_t>(i)].shift_tau(tau0, min_floor).shift_phi(phi0);
    return r;
}
BigFloat TauSeries4::max_coef_norm() const {
    BigFloat m(0L);
    for (const auto& s : comp) m = max(m, s.max_coef_norm());
    return m;
}

TauSeries omega_series(const TauSeries4& a, const TauSeries4& b, int min_floor) {
    TauSeries r = TauSeries::mul(a[0], b[2], min_floor);
    r += TauSeries::mul(a[1], b[3], min_floor);
    r -= TauSeries::mul(a[2], b[0], min_floor);
    r -= TauSeries::mul(a[3], b[1], min_floor);
    return r;
}

TauSeries4 TauSeriesMat::col(int c) const {
    TauSeries4 v;
    for (int r = 0; r < 4; ++r) v[r] = (*this)(r, c);
    return v;
}
void TauSeriesMat::set_col(int c, const TauSeries4& v) {
    for (int r = 0; r < 4; ++r) (*this)(r, c) = v[r];
}

TauSeriesMat TauSeriesMat::apply_D() const {
    TauSeriesMat r;
    for (size_t i = 0; i < 16; ++i) r.e[i] = e[i].apply_D();
    return r;
}
TauSeriesMat TauSeriesMat::operator-(const TauSeriesMat& o) const {
    TauSeriesMat r(*this);
    for (size_t i = 0; i < 16; ++i) r.e[i] -= o.e[i];
    return r;
}
TauSeriesMat TauSeriesMat::mul(const TauSeriesMat& A, const TauSeriesMat& B, int min_floor) {
    TauSeriesMat r;
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) {
            TauSeries s(min_floor);
            for (int k = 0; k < 4; ++k) s += TauSeries::mul(A(i, k), B(k, j), min_floor);
            r(i, j) = std::move(s);
        }
    return r;
}
TauSeries4 TauSeriesMat::mul_vec(const TauSeries4& v, int min_floor) const {
    TauSeries4 r;
    for (int i = 0; i < 4; ++i) {
        TauSeries s(min_floor);
        for (int k = 0; k < 4; ++k) s += TauSeries::mul((*this)(i, k), v[k], min_floor);
        r[i] = std::move(s);
    }
    return r;
}
TauSeriesMat TauSeriesMat::symplectic_defect(int min_floor) const {
    // (A^T J A)_{ij} = sum_k A_{ki} (JA)_{kj}; J = [[0, Id], [-Id, 0]]
    TauSeriesMat r;
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) {
            TauSeries s = omega_series(col(i), col(j), min_floor);
            r(i, j) = std::move(s);
        }
    // subtract J
    r(0, 2) -= TauSeries::constant(BigComplex(1L));
    r(1, 3) -= TauSeries::constant(BigComplex(1L));
    r(2, 0) += TauSeries::constant(BigComplex(1L));
    r(3, 1) += TauSeries::constant(BigComplex(1L));
    return r;
}
TauSeriesMat TauSeriesMat::truncate_floor(int f) const {
    TauSeriesMat r;
    for (size_t i = 0; i < 16; ++i) r.e[i] = e[i].truncate_floor(f);
    return r;
}
TauSeriesMat TauSeriesMat::shift(const BigComplex& phi0, const BigComplex& tau0, int min_floor) const {
    TauSeriesMat r;
    for (size_t i = 0; i < 16; ++i) r.e[i] = e[i].shift_tau(tau0, min_floor).shift_phi(phi0);
    return r;
}
BigFloat TauSeriesMat::max_coef_norm() const {
    BigFloat m(0L);
    for (const auto& s : e) m = max(m, s.max_coef_norm());
    return m;
}

}  // namespace stokeslab

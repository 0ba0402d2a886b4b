#include "stokeslab/taylor_flow.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>

namespace stokeslab {

void SectorConfig::validate() const {
    BigFloat quarter_pi = BigFloat::pi() / BigFloat(4L);
    if (!(theta_angle > BigFloat(0L)) || !(theta_angle < quarter_pi))
        throw ValidationError("sector angle must satisfy 0 < theta < pi/4");
    if (!(r > BigFloat(0L)) || !(h > BigFloat(0L)))
        throw ValidationError("sector radius and strip width must be positive");
}

namespace {
// |arg(z)| > theta  <=>  z outside the closed cone around R+.
bool outside_cone(const BigComplex& z, const BigFloat& theta) {
    if (z.re().sign() <= 0) return !(z.im().is_zero() && z.re().is_zero());
    // compare |Im z| with tan(theta) Re z
    BigFloat s(Prec{theta.prec()}), c(Prec{theta.prec()});
    sin_cos(s, c, theta);
    return abs(z.im()) * c > z.re() * s;
}
}  // namespace

bool SectorConfig::in_minus(const BigComplex& tau) const {
    return outside_cone(tau + BigComplex(r, BigFloat(0L)), theta_angle);
}
bool SectorConfig::in_plus(const BigComplex& tau) const {
    return outside_cone(BigComplex(r, BigFloat(0L)) - tau, theta_angle);
}

JetProgram JetProgram::compile(const std::vector<PolyFn>& outputs) {
    JetProgram p;
    std::map<std::uint32_t, int> node_of;  // monomial -> node index
    for (int i = 0; i < 4; ++i) {
        Mono m;
        m.e[i] = 1;
        node_of[m.key()] = i;
    }
    // recursively materialize power-product nodes
    std::function<int(const Mono&)> node_for = [&](const Mono& m) -> int {
        auto it = node_of.find(m.key());
        if (it != node_of.end()) return it->second;
        int i = 0;
        while (m.e[i] == 0) ++i;
        Mono red = m;
        red.e[i] -= 1;
        int sub = node_for(red);
        p.muls_.push_back({sub, i});
        int idx = 3 + static_cast<int>(p.muls_.size());
        node_of[m.key()] = idx;
        return idx;
    };
    for (const auto& f : outputs) {
        std::vector<std::pair<BigComplex, int>> terms;
        for (const auto& [k, c] : f.terms()) {
            Mono m = Mono::from_key(k);
            if (m.deg() == 0) {
                terms.emplace_back(c, -1);  // constant term
            } else {
                terms.emplace_back(c, node_for(m));
            }
        }
        p.out_.push_back(std::move(terms));
    }
    return p;
}

JetProgram::Work JetProgram::make_work(int order) const {
    Work w;
    w.order = order;
    w.jets.assign(static_cast<size_t>(num_nodes()),
                  std::vector<BigComplex>(static_cast<size_t>(order + 1)));
    return w;
}

void JetProgram::advance(Work& w, int j) const {
    for (size_t n = 0; n < muls_.size(); ++n) {
        const auto& [a, b] = muls_[n];
        const auto& ja = w.jets[static_cast<size_t>(a)];
        const auto& jb = w.jets[static_cast<size_t>(b)];
        BigComplex& c = w.jets[n + 4][static_cast<size_t>(j)];
        c = BigComplex(0L);
        for (int i = 0; i <= j; ++i) c.add_mul(ja[static_cast<size_t>(i)], jb[static_cast<size_t>(j - i)]);
    }
}

void JetProgram::outputs_at(const Work& w, int j, std::vector<BigComplex>& out) const {
    out.assign(out_.size(), BigComplex(0L));
    for (size_t k = 0; k < out_.size(); ++k) {
        for (const auto& [c, node] : out_[k]) {
            if (node < 0) {
                if (j == 0) out[k] += c;
            } else {
                out[k].add_mul(c, w.jets[static_cast<size_t>(node)][static_cast<size_t>(j)]);
            }
        }
    }
}

TaylorIntegrator::TaylorIntegrator(const PolyMap& X, bool with_variational)
    : variational(with_variational) {
    std::vector<PolyFn> comps(X.comp.begin(), X.comp.end());
    field = JetProgram::compile(comps);
    if (with_variational) {
        auto J = jacobian(X);
        jac = JetProgram::compile(std::vector<PolyFn>(J.begin(), J.end()));
    }
}

namespace {

int taylor_order(const BigFloat& tol) {
    double lt = std::log(std::max(1e-300, std::abs(tol.to_double())));
    int p = static_cast<int>(std::ceil(-0.5 * lt)) + 4;
    return std::clamp(p, 8, 120);
}

BigFloat coef_norm4(const std::vector<std::vector<BigComplex>>& jets, int j) {
    BigFloat s(0L);
    for (int i = 0; i < 4; ++i) s += norm1(jets[static_cast<size_t>(i)][static_cast<size_t>(j)]);
    return s;
}

// h such that |c_j| h^j <= tol for the last two orders (classic estimate)
BigFloat step_from_tail(const BigFloat& tol, const BigFloat& np, const BigFloat& npm1, int p) {
    double cp = std::max(np.to_double(), 1e-300);
    double cpm = std::max(npm1.to_double(), 1e-300);
    double h1 = std::pow(tol.to_double() / cp, 1.0 / p);
    double h2 = std::pow(tol.to_double() / cpm, 1.0 / (p - 1));
    double h = 0.85 * std::min(h1, h2);
    return BigFloat(std::max(h, 1e-60));
}

}  // namespace

FlowResult TaylorIntegrator::run(const CVec4& x0, const CMat4* m0, const BigFloat& s_total, int sign,
                                 const FlowOptions& opt) const {
    const int p = taylor_order(opt.ode_tol);
    FlowResult res;
    res.value = x0;
    res.has_matrix = (m0 != nullptr);
    if (m0) res.matrix = *m0;
    res.est_error = BigFloat(0L);
    if (s_total.is_zero()) return res;
    if (s_total < BigFloat(0L)) throw Error("integration length must be >= 0");

    JetProgram::Work wf = field.make_work(p);
    JetProgram::Work wj = (variational && m0) ? jac.make_work(p) : JetProgram::Work{};
    // jets for the 16 matrix entries and the 16 Jacobian entries
    std::vector<std::vector<BigComplex>> mjets, ajets;
    if (m0) {
        mjets.assign(16, std::vector<BigComplex>(static_cast<size_t>(p + 1)));
        ajets.assign(16, std::vector<BigComplex>(static_cast<size_t>(p + 1)));
    }
    std::vector<BigComplex> fout, jout;

    BigFloat s_done(0L);
    BigComplex sgn(static_cast<long>(sign));
    while (s_done < s_total) {
        if (res.steps++ > opt.max_steps) throw StepUnderflowError("step budget exhausted");
        BigFloat xn = res.value.norm1();
        if (xn > opt.blowup_bound)
            throw BlowUpError("orbit norm " + xn.to_string() + " exceeded the bounding ball");

        for (int i = 0; i < 4; ++i) wf.jets[static_cast<size_t>(i)][0] = res.value[i];
        if (m0) {
            for (int i = 0; i < 16; ++i) mjets[static_cast<size_t>(i)][0] = res.matrix.m[static_cast<size_t>(i)];
            for (int i = 0; i < 4; ++i) wj.jets[static_cast<size_t>(i)][0] = res.value[i];
        }

        for (int j = 0; j < p; ++j) {
            field.advance(wf, j);
            field.outputs_at(wf, j, fout);
            BigComplex inv(BigFloat(1L) / BigFloat(static_cast<long>(j + 1)), BigFloat(0L));
            for (int i = 0; i < 4; ++i) {
                BigComplex c = fout[static_cast<size_t>(i)] * sgn * inv;
                wf.jets[static_cast<size_t>(i)][static_cast<size_t>(j + 1)] = c;
                if (m0) wj.jets[static_cast<size_t>(i)][static_cast<size_t>(j + 1)] = c;
            }
            if (m0) {
                jac.advance(wj, j);
                jac.outputs_at(wj, j, jout);
                for (int k = 0; k < 16; ++k) ajets[static_cast<size_t>(k)][static_cast<size_t>(j)] = jout[static_cast<size_t>(k)];
                // M' = sign A M: coefficient j+1 of M_{ic} from the Cauchy
                // product of the A and M jets
                for (int i = 0; i < 4; ++i)
                    for (int c2 = 0; c2 < 4; ++c2) {
                        BigComplex acc(0L);
                        for (int k = 0; k < 4; ++k) {
                            const auto& arow = ajets[static_cast<size_t>(4 * i + k)];
                            const auto& mcol = mjets[static_cast<size_t>(4 * k + c2)];
                            for (int i2 = 0; i2 <= j; ++i2)
                                acc.add_mul(arow[static_cast<size_t>(i2)], mcol[static_cast<size_t>(j - i2)]);
                        }
                        mjets[static_cast<size_t>(4 * i + c2)][static_cast<size_t>(j + 1)] = acc * sgn * inv;
                    }
            }
        }

        // step size from the orbit tail (and the matrix tail when present)
        BigFloat np = coef_norm4(wf.jets, p);
        BigFloat npm1 = coef_norm4(wf.jets, p - 1);
        BigFloat mp(0L), mpm1(0L);
        if (m0) {
            BigFloat mscale(0L);
            for (int i = 0; i < 16; ++i) {
                mp += norm1(mjets[static_cast<size_t>(i)][static_cast<size_t>(p)]);
                mpm1 += norm1(mjets[static_cast<size_t>(i)][static_cast<size_t>(p - 1)]);
                mscale += norm1(mjets[static_cast<size_t>(i)][0]);
            }
            // relative tolerance for the matrix block (its entries grow ~tau^3)
            BigFloat rel = max(BigFloat(1L), mscale);
            mp = mp / rel;
            mpm1 = mpm1 / rel;
        }
        BigFloat h = step_from_tail(opt.ode_tol, max(np, mp), max(npm1, mpm1), p);
        BigFloat remaining = s_total - s_done;
        if (h > remaining) h = remaining;
        if (h < BigFloat::pow2(-80)) throw StepUnderflowError("Taylor step size underflow");

        // evaluate jets at h (Horner)
        BigComplex hc(h, BigFloat(0L));
        for (int i = 0; i < 4; ++i) {
            BigComplex acc = wf.jets[static_cast<size_t>(i)][static_cast<size_t>(p)];
            for (int j = p - 1; j >= 0; --j) {
                acc *= hc;
                acc += wf.jets[static_cast<size_t>(i)][static_cast<size_t>(j)];
            }
            res.value[i] = acc;
        }
        if (m0)
            for (int i = 0; i < 16; ++i) {
                BigComplex acc = mjets[static_cast<size_t>(i)][static_cast<size_t>(p)];
                for (int j = p - 1; j >= 0; --j) {
                    acc *= hc;
                    acc += mjets[static_cast<size_t>(i)][static_cast<size_t>(j)];
                }
                res.matrix.m[static_cast<size_t>(i)] = acc;
            }
        res.est_error += (np + mp) * pow_ui(h, static_cast<unsigned long>(p)) +
                         (npm1 + mpm1) * pow_ui(h, static_cast<unsigned long>(p - 1));
        s_done += h;
        BigFloat xn_post = res.value.norm1();
        if (xn_post > opt.blowup_bound)
            throw BlowUpError("orbit norm " + xn_post.to_string() + " exceeded the bounding ball");
    }
    return res;
}

FlowResult integrate_orbit(const PolyMap& X, const CVec4& x0, const BigFloat& s_total,
                           const FlowOptions& opt) {
    TaylorIntegrator ti(X, false);
    return ti.run(x0, nullptr, s_total, 1, opt);
}

namespace {

CVec4 eval_series4(const TauSeries4& g, const BigComplex& phi, const BigComplex& tau) {
    CVec4 v;
    for (int i = 0; i < 4; ++i) v[i] = g[i].eval(phi, tau);
    return v;
}

CMat4 eval_mat(const TauSeriesMat& u, const BigComplex& phi, const BigComplex& tau) {
    CMat4 m;
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) m(i, j) = u(i, j).eval(phi, tau);
    return m;
}

struct SeedChoice {
    BigFloat s0;
    BigFloat radius;
    BigFloat est;
};

// picks s0 > 0 with |tau -+ s0| ~ radius such that the order-n vs order-(n-2)
// partial-sum difference is below tol/10 (doubling the radius as needed)
SeedChoice choose_seed(const TauSeries4& gamma_hat, const BigComplex& phi, const BigComplex& tau,
                       int side_sign,  // -1: unstable (go left), +1: stable (go right)
                       const FlowOptions& opt) {
    TauSeries4 gn = truncate_partial_sum(gamma_hat, opt.seed_order);
    TauSeries4 gm = truncate_partial_sum(gamma_hat, opt.seed_order - 2);
    BigFloat radius = opt.seed_radius;
    BigFloat target = opt.ode_tol / BigFloat(10L);
    for (int attempt = 0; attempt <= opt.max_radius_doublings; ++attempt) {
        BigFloat im2 = tau.im() * tau.im();
        BigFloat re_target2 = radius * radius - im2;
        if (re_target2 > BigFloat(0L)) {
            BigFloat re_target = sqrt(re_target2);
            if (side_sign < 0) re_target = -re_target;
            BigFloat s0 = (tau.re() - re_target) * BigFloat(static_cast<long>(-side_sign));
            // s0 = side==-1 ? tau.re + re  : re_target - tau.re
            if (s0 > BigFloat(0L)) {
                BigComplex shift(BigFloat(static_cast<long>(side_sign)) * s0, BigFloat(0L));
                BigComplex phis = phi + shift, taus = tau + shift;
                CVec4 a = eval_series4(gn, phis, taus);
                CVec4 b = eval_series4(gm, phis, taus);
                BigFloat est = (a - b).norm1();
                if (est <= target) return {s0, radius, est};
            }
        }
        radius = radius + radius;
    }
    throw SeedAccuracyError("no admissible seed distance found (formal tail too large)");
}

}  // namespace

namespace {
BigFloat growth_factor(const BigFloat& radius, const BigComplex& tau) {
    BigFloat at = abs(tau);
    if (at.is_zero() || radius <= at) return BigFloat(1L);
    BigFloat q = radius / at;
    return q * q * q;
}
}  // namespace

FlowResult unstable_point(const PreparedHamiltonian& ph, const TauSeries4& gamma_hat,
                          const BigComplex& phi, const BigComplex& tau, const SectorConfig& sector,
                          const FlowOptions& opt) {
    sector.validate();
    if (!sector.in_minus(tau))
        throw ValidationError("tau is not in the unstable sector D^-");
    SeedChoice sc = choose_seed(gamma_hat, phi, tau, -1, opt);
    BigComplex shift(-sc.s0, BigFloat(0L));
    CVec4 x0 = eval_series4(truncate_partial_sum(gamma_hat, opt.seed_order), phi + shift, tau + shift);
    TaylorIntegrator ti(ph.X, false);
    FlowResult res = ti.run(x0, nullptr, sc.s0, 1, opt);
    res.est_error = (res.est_error + sc.est) * growth_factor(sc.radius, tau);
    res.seed_radius_used = sc.radius;
    return res;
}

FlowResult stable_point(const PreparedHamiltonian& ph, const TauSeries4& gamma_hat,
                        const BigComplex& phi, const BigComplex& tau, const SectorConfig& sector,
                        const FlowOptions& opt) {
    sector.validate();
    if (!sector.in_plus(tau))
        throw ValidationError("tau is not in the stable sector D^+");
    SeedChoice sc = choose_seed(gamma_hat, phi, tau, +1, opt);
    BigComplex shift(sc.s0, BigFloat(0L));
    CVec4 x0 = eval_series4(truncate_partial_sum(gamma_hat, opt.seed_order), phi + shift, tau + shift);
    TaylorIntegrator ti(ph.X, false);
    FlowResult res = ti.run(x0, nullptr, sc.s0, -1, opt);
    res.est_error = (res.est_error + sc.est) * growth_factor(sc.radius, tau);
    res.seed_radius_used = sc.radius;
    return res;
}

FlowResult fundamental_matrix_point(const PreparedHamiltonian& ph, const TauSeries4& gamma_hat,
                                    const TauSeriesMat& u_hat, const BigComplex& phi,
                                    const BigComplex& tau, const SectorConfig& sector,
                                    const FlowOptions& opt) {
    sector.validate();
    if (!sector.in_minus(tau))
        throw ValidationError("tau is not in the unstable sector D^-");
    SeedChoice sc = choose_seed(gamma_hat, phi, tau, -1, opt);
    BigComplex shift(-sc.s0, BigFloat(0L));
    BigComplex phis = phi + shift, taus = tau + shift;
    CVec4 x0 = eval_series4(truncate_partial_sum(gamma_hat, opt.seed_order), phis, taus);
    int un = std::max(3, opt.seed_order - 3);
    CMat4 U0 = eval_mat(truncate_partial_sum_mat(u_hat, un), phis, taus);
    CMat4 U0b = eval_mat(truncate_partial_sum_mat(u_hat, un - 2), phis, taus);
    BigFloat useed = (U0 - U0b).norm1();
    TaylorIntegrator ti(ph.X, true);
    FlowResult res = ti.run(x0, &U0, sc.s0, 1, opt);
    res.est_error = (res.est_error + sc.est + useed) * growth_factor(sc.radius, tau);
    res.seed_radius_used = sc.radius;
    return res;
}

}  // namespace stokeslab

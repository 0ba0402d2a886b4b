#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "stokeslab/formal_separatrix.hpp"
#include "test_util.hpp"

using namespace stokeslab;
using namespace stokeslab::testutil;

namespace {
const BigFloat kTight = tol_bits(150);
const BigFloat kOracle = tol_digits(30);

PolyFn q2_pow5() { return PolyFn::monomial(Mono(0, 5, 0, 0), BigComplex(1L)); }

TauSeries4 gamma0_series(const BigComplex& kappa, int floor) {
    TauSeries4 g;
    g[0] = TauSeries::monomial(-2, TrigPoly::cos_mode(1, kappa), floor);
    g[1] = TauSeries::monomial(-2, TrigPoly::sin_mode(1, kappa), floor);
    g[2] = TauSeries::monomial(-1, TrigPoly::cos_mode(1, kappa), floor);
    g[3] = TauSeries::monomial(-1, TrigPoly::sin_mode(1, kappa), floor);
    return g;
}

PolyFn nf_hamiltonian(const NfTable& a) {
    PolyFn H = -PolyFn::I1() + PolyFn::I2();
    for (const auto& [lk, c] : a) {
        PolyFn t = PolyFn::constant(c);
        for (int j = 0; j < lk.first; ++j) t = t * PolyFn::I1();
        for (int j = 0; j < lk.second; ++j) t = t * PolyFn::I3();
        H += t;
    }
    return H;
}

BigFloat defect_norm(const PolyMap& X, const TauSeries4& G) {
    int fl = std::min({G[0].floor(), G[1].floor(), G[2].floor(), G[3].floor()});
    TauSeries4 def = G.apply_D() - compose_series(X, G, fl);
    return def.max_coef_norm();
}
}  // namespace

TEST_CASE("r_series: integrable case is exactly kappa/tau") {
    NfTable a;
    a[{0, 2}] = BigComplex(-2L);
    TauSeries r = r_series(BigComplex(-2L), a, 9);
    CHECK(norm1(r.coef(-1).coef(0) - BigComplex(1L)) <= kTight);
    for (int k = 2; k <= 9; ++k) CHECK(r.coef(-k).norm1() <= kTight);
}

TEST_CASE("r_series: golden third coefficient") {
    // eta=-2 (kappa=1), a_{0,3}=8  =>  r_3 = -(1/8) a_{0,3} kappa^5 = -1
    NfTable a;
    a[{0, 2}] = BigComplex(-2L);
    a[{0, 3}] = BigComplex(8L);
    TauSeries r = r_series(BigComplex(-2L), a, 9);
    CHECK(norm1(r.coef(-1).coef(0) - BigComplex(1L)) <= kTight);
    CHECK(r.coef(-2).norm1() <= kTight);
    CHECK(norm1(r.coef(-3).coef(0) + BigComplex(1L)) <= kTight);
}

TEST_CASE("r_series: defect-substitution oracle, generic eta") {
    BigComplex eta(0.8, -1.4);
    NfTable a;
    a[{0, 2}] = eta;
    a[{0, 3}] = BigComplex(0.5, 0.2);
    a[{0, 4}] = BigComplex(-0.3, 0.1);
    int N = 14;
    TauSeries r = r_series(eta, a, N);
    CHECK(r.scan_parity(kTight) == Parity::odd);
    // residual of d^2 r + eta r^3 + sum 2j a_{0,j}/2^j r^{2j-1}
    int fl = -(N + 2);
    TauSeries r2 = TauSeries::mul(r, r, fl);
    TauSeries resid = r.dtau().dtau() + TauSeries::mul(TauSeries::mul(r2, r, fl), TauSeries::constant(eta), fl);
    TauSeries rp = TauSeries::mul(r2, r, fl);
    for (int j = 3; j <= 6; ++j) {
        rp = TauSeries::mul(rp, r2, fl);
        BigComplex c = nf_coeff(a, 0, j);
        if (c.is_zero()) continue;
        BigComplex w = c;
        w.mul_si(2 * j);
        w = w / BigComplex(BigFloat::pow2(j), BigFloat(0L));
        TauSeries t = rp;
        t *= w;
        resid += t;
    }
    CHECK(resid.max_coef_norm() <= kOracle);
    // kappa^2 = -2/eta forced by the recursion
    BigComplex k = r.coef(-1).coef(0);
    CHECK(norm1(k * k - BigComplex(-2L) / eta) <= kOracle);
}

TEST_CASE("theta_series examples") {
    BigComplex eta(-2L);
    NfTable a;
    a[{0, 2}] = eta;
    TauSeries r = r_series(eta, a, 9);
    // all a_{1,j} = 0 -> theta = 0
    TauSeries th0 = theta_series(r, a, 9);
    CHECK(th0.max_coef_norm() <= kTight);
    // a_{1,1} = eta -> leading coefficient -a_{1,1}/eta = -1
    a[{1, 1}] = eta;
    TauSeries r1 = r_series(eta, a, 9);
    TauSeries th1 = theta_series(r1, a, 9);
    CHECK(norm1(th1.coef(-1).coef(0) + BigComplex(1L)) <= kTight);
}

TEST_CASE("theta_series defect oracle with random a1") {
    BigComplex eta(1.1, 0.6);
    NfTable a;
    a[{0, 2}] = eta;
    a[{0, 3}] = BigComplex(0.3, -0.7);
    a[{1, 1}] = BigComplex(-0.9, 0.25);
    a[{1, 2}] = BigComplex(0.4, 0.4);
    int N = 12;
    TauSeries r = r_series(eta, a, N);
    TauSeries th = theta_series(r, a, N);
    CHECK(th.scan_parity(kTight) == Parity::odd);
    int fl = -(N + 1);
    TauSeries resid = th.dtau();
    TauSeries r2 = TauSeries::mul(r, r, fl);
    TauSeries rp = TauSeries::constant(BigComplex(1L), fl);
    for (int j = 1; j <= 5; ++j) {
        rp = TauSeries::mul(rp, r2, fl);
        BigComplex c = nf_coeff(a, 1, j);
        if (c.is_zero()) continue;
        TauSeries t = rp;
        t *= c / BigComplex(BigFloat::pow2(j), BigFloat(0L));
        resid += t;
    }
    CHECK(resid.max_coef_norm() <= kOracle);
}

TEST_CASE("assemble_Zhat: integrable case gives Gamma0") {
    BigComplex eta(-2L);
    NfTable a;
    a[{0, 2}] = eta;
    PolarSeries ps = polar_series(eta, a, 9);
    TauSeries4 Z = assemble_Zhat(ps, 9);
    TauSeries4 g0 = gamma0_series(BigComplex(1L), -10);
    for (int i = 0; i < 4; ++i) CHECK((Z[i] - g0[i]).max_coef_norm() <= kTight);
}

TEST_CASE("assemble_Zhat: defect against the normal-form field") {
    BigComplex eta(-0.7, 1.9);
    NfTable a;
    a[{0, 2}] = eta;
    a[{0, 3}] = BigComplex(0.21, 0.4);
    a[{1, 1}] = BigComplex(1.2, -0.5);
    a[{2, 0}] = BigComplex(0.15, 0.05);
    int N = 10;
    PolarSeries ps = polar_series(eta, a, N + 2);
    TauSeries4 Z = assemble_Zhat(ps, N);
    PolyMap X = vector_field(nf_hamiltonian(a));
    CHECK(defect_norm(X, Z) <= kOracle);
}

TEST_CASE("pullback: identity map and leading correction") {
    BigComplex eta(-2L);
    NfTable a;
    a[{0, 2}] = eta;
    BigComplex a11(0.65, -0.15);
    a[{1, 1}] = a11;
    int N = 8;
    PolarSeries ps = polar_series(eta, a, N + 2);
    TauSeries4 Z = assemble_Zhat(ps, N + 1);
    FormalSeparatrix fs = pullback(PolyMap::identity(), Z, N);
    for (int i = 0; i < 4; ++i)
        CHECK((fs.gamma_hat[i] - Z[i].truncate_floor(fs.gamma_hat[i].floor())).max_coef_norm() <= kTight);
    // leading tau^-1 correction (relative to the tau^-2 head) of components
    // 1,2 carries kappa a_{1,1}/eta with the angular parts sin/-cos
    BigComplex kappa = ps.kappa;
    BigComplex w = kappa * a11 / eta;
    TrigPoly c1 = fs.gamma_hat[0].coef(-3);
    TrigPoly c2 = fs.gamma_hat[1].coef(-3);
    CHECK((c1 - TrigPoly::sin_mode(1, w)).norm1() <= kOracle);
    CHECK((c2 - TrigPoly::cos_mode(1, -w)).norm1() <= kOracle);
}

TEST_CASE("formal separatrix via normal form: F=0 gives Gamma0 and H_nu solves DH") {
    BigComplex eta(-2L);
    PreparedHamiltonian ph0 = PreparedHamiltonian::assemble(eta, PolyFn());
    FormalSeparatrix fs0 = formal_separatrix_nf(ph0, 8);
    TauSeries4 g0 = gamma0_series(BigComplex(1L), -9);
    for (int i = 0; i < 4; ++i)
        CHECK((fs0.gamma_hat[i] - g0[i].truncate_floor(fs0.gamma_hat[i].floor())).max_coef_norm() <= kOracle);

    BigComplex nu(0.01, 0.0);
    PreparedHamiltonian ph = PreparedHamiltonian::assemble(eta, nu * q2_pow5());
    FormalSeparatrix fs = formal_separatrix_nf(ph, 8);
    CHECK(defect_norm(ph.X, fs.gamma_hat) <= kOracle);
    // form (2:formhatgamma): components 1,2 lead at tau^-2; 3,4 at tau^-1
    CHECK(*fs.gamma_hat[0].top_exponent(kOracle) == -2);
    CHECK(*fs.gamma_hat[2].top_exponent(kOracle) == -1);
}

TEST_CASE("direct_solve: F=0 gives Gamma0") {
    BigComplex eta(-2L);
    PreparedHamiltonian ph = PreparedHamiltonian::assemble(eta, PolyFn());
    FormalSeparatrix fs = direct_solve(ph, 9);
    TauSeries4 g0 = gamma0_series(BigComplex(1L), -11);
    for (int i = 0; i < 4; ++i)
        CHECK((fs.gamma_hat[i] - g0[i].truncate_floor(fs.gamma_hat[i].floor())).max_coef_norm() <= kOracle);
}

TEST_CASE("direct_solve agrees with the pullback route") {
    BigComplex eta(-2L);
    SUBCASE("F already in normal form") {
        PolyFn F = BigComplex(0.4, 0.0) * (PolyFn::I3() * PolyFn::I3() * PolyFn::I3());
        PreparedHamiltonian ph = PreparedHamiltonian::assemble(eta, F);
        int N = 8;
        FormalSeparatrix d = direct_solve(ph, N + 2);
        FormalSeparatrix nf = formal_separatrix_nf(ph, N + 2);
        TauSeries4 a = truncate_partial_sum(d.gamma_hat, N);
        TauSeries4 b = truncate_partial_sum(nf.gamma_hat, N);
        for (int i = 0; i < 4; ++i) CHECK((a[i] - b[i]).max_coef_norm() <= kOracle);
    }
    SUBCASE("generic F = nu q2^5") {
        BigComplex nu(0.02, 0.0);
        PreparedHamiltonian ph = PreparedHamiltonian::assemble(eta, nu * q2_pow5());
        int N = 8;
        FormalSeparatrix d = direct_solve(ph, N + 2);
        FormalSeparatrix nf = formal_separatrix_nf(ph, N + 2);
        TauSeries4 a = truncate_partial_sum(d.gamma_hat, N);
        TauSeries4 b = truncate_partial_sum(nf.gamma_hat, N);
        for (int i = 0; i < 4; ++i) CHECK((a[i] - b[i]).max_coef_norm() <= kOracle);
        // all equations through order N hold: residual() validates the
        // (2:eqestimateGamman)-shaped order pattern and would throw otherwise
        CHECK_NOTHROW(residual(ph, a, N, kOracle));
    }
}

TEST_CASE("residual of partial sums") {
    BigComplex eta(-2L);
    SUBCASE("integrable case: zero at any n") {
        PreparedHamiltonian ph = PreparedHamiltonian::assemble(eta, PolyFn());
        FormalSeparatrix fs = direct_solve(ph, 10);
        for (int n = 3; n <= 8; ++n) {
            ResidualReport rep = residual(ph, truncate_partial_sum(fs.gamma_hat, n), n, kOracle);
            CHECK(rep.weighted_norm <= kOracle);
        }
    }
    SUBCASE("H_nu at n=6: finite, low orders vanish") {
        BigComplex nu(0.001, 0.0);
        PreparedHamiltonian ph = PreparedHamiltonian::assemble(eta, nu * q2_pow5());
        FormalSeparatrix fs = direct_solve(ph, 12);
        ResidualReport r6 = residual(ph, truncate_partial_sum(fs.gamma_hat, 6), 6, kOracle);
        CHECK(r6.weighted_norm > kOracle);  // genuinely nonzero
        ResidualReport r8 = residual(ph, truncate_partial_sum(fs.gamma_hat, 8), 8, kOracle);
        CHECK(r8.weighted_norm > kOracle);
    }
    SUBCASE("incrementing n shifts the defect's leading order by the increment") {
        PolyFn F = BigComplex(0.4, 0.0) * (PolyFn::I3() * PolyFn::I3() * PolyFn::I3());
        PreparedHamiltonian ph = PreparedHamiltonian::assemble(eta, F);
        FormalSeparatrix fs = direct_solve(ph, 14);
        ResidualReport r6 = residual(ph, truncate_partial_sum(fs.gamma_hat, 6), 6, kOracle);
        ResidualReport r8 = residual(ph, truncate_partial_sum(fs.gamma_hat, 8), 8, kOracle);
        CHECK(r6.weighted_norm > kOracle);
        CHECK(r8.weighted_norm > kOracle);
        CHECK(r6.leading_exponent - r8.leading_exponent == 2);
        CHECK(r6.leading_exponent <= -8);
    }
}

TEST_CASE("translation freedom: shifted series still solves the equation") {
    BigComplex eta(-2L);
    BigComplex nu(0.05, 0.0);
    PreparedHamiltonian ph = PreparedHamiltonian::assemble(eta, nu * q2_pow5());
    FormalSeparatrix fs = direct_solve(ph, 10);
    BigComplex phi0(0.0, 0.0);
    BigComplex tau0(1L);
    TauSeries4 shifted = fs.gamma_hat.shift(phi0, tau0, -9);
    CHECK(defect_norm(ph.X, shifted) <= kOracle);
    BigComplex phi1(1L);
    TauSeries4 shifted2 = fs.gamma_hat.shift(phi1, BigComplex(0L), -9);
    CHECK(defect_norm(ph.X, shifted2) <= kOracle);
}

TEST_CASE("reality laws for the formal separatrix") {
    SUBCASE("eta < 0: real coefficients") {
        PreparedHamiltonian ph = PreparedHamiltonian::assemble(BigComplex(-2L), BigComplex(0.03) * q2_pow5());
        FormalSeparatrix fs = direct_solve(ph, 8);
        for (int i = 0; i < 4; ++i)
            CHECK((fs.gamma_hat[i].conj_reflect() - fs.gamma_hat[i]).max_coef_norm() <= kOracle);
    }
    SUBCASE("eta > 0: conjugation equals the phi -> phi+pi translate") {
        PreparedHamiltonian ph = PreparedHamiltonian::assemble(BigComplex(2L), BigComplex(0.03) * q2_pow5());
        FormalSeparatrix fs = direct_solve(ph, 8);
        BigComplex pi_c(BigFloat::pi(), BigFloat(0L));
        for (int i = 0; i < 4; ++i) {
            TauSeries lhs = fs.gamma_hat[i].conj_reflect();
            TauSeries rhs = fs.gamma_hat[i].shift_phi(pi_c);
            CHECK((lhs - rhs).max_coef_norm() <= kOracle);
        }
    }
}

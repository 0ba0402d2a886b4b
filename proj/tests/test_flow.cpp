#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "stokeslab/melnikov.hpp"
#include "stokeslab/taylor_flow.hpp"
#include "test_util.hpp"

using namespace stokeslab;
using namespace stokeslab::testutil;

namespace {
const BigFloat kOracle = tol_digits(30);

FlowOptions quick_opts() {
    FlowOptions opt;
    opt.ode_tol = tol_digits(28);
    opt.seed_order = 10;
    opt.seed_radius = BigFloat(40L);
    return opt;
}
}  // namespace

TEST_CASE("linear flow of H = I2") {
    // q constant, p(s) = p(0) - s q
    PolyMap X = vector_field(PolyFn::I2());
    Rng rng(1);
    CVec4 x0 = rng.vec4();
    BigFloat s(1.75);
    FlowResult r = integrate_orbit(X, x0, s, quick_opts());
    CVec4 expect = x0;
    expect[2] -= BigComplex(s, BigFloat(0L)) * x0[0];
    expect[3] -= BigComplex(s, BigFloat(0L)) * x0[1];
    CHECK((r.value - expect).norm1() <= kOracle);
}

TEST_CASE("integrable orbit follows Gamma0 exactly") {
    BigComplex eta(-2L);
    LeadingOrder lead(eta);
    PreparedHamiltonian ph = PreparedHamiltonian::assemble(eta, PolyFn());
    BigComplex tau0(2L);
    CVec4 x0 = lead.gamma0(BigComplex(0L), tau0);
    BigFloat s(2.5);
    FlowResult r = integrate_orbit(ph.X, x0, s, quick_opts());
    CVec4 expect = lead.gamma0(BigComplex(BigFloat(2.5), BigFloat(0L)), tau0 + BigComplex(BigFloat(2.5), BigFloat(0L)));
    CHECK((r.value - expect).norm1() <= kOracle);
    CHECK(r.est_error <= tol_digits(25));
}

TEST_CASE("energy conservation for a random polynomial hamiltonian") {
    Rng rng(2);
    PolyFn H = rng.poly(3, 8);
    H *= BigComplex(0.25);
    PolyMap X = vector_field(H);
    CVec4 x0 = rng.vec4(0.4);
    FlowOptions opt = quick_opts();
    BigFloat s(1L);
    FlowResult r = integrate_orbit(X, x0, s, opt);
    BigFloat drift = norm1(H.eval(r.value) - H.eval(x0));
    CHECK(drift <= BigFloat(10L) * opt.ode_tol * s + tol_digits(30));
}

TEST_CASE("unstable point reproduces Gamma0 in the integrable case") {
    BigComplex eta(-2L);
    LeadingOrder lead(eta);
    PreparedHamiltonian ph = PreparedHamiltonian::assemble(eta, PolyFn());
    FormalSeparatrix fs = direct_solve(ph, 12);
    SectorConfig sector;
    FlowOptions opt = quick_opts();
    BigComplex phi(0.3, 0.0), tau(-4.0, -12.0);
    FlowResult r = unstable_point(ph, fs.gamma_hat, phi, tau, sector, opt);
    CVec4 expect = lead.gamma0(phi, tau);
    CHECK((r.value - expect).norm1() <= tol_digits(27));
    // energy is exactly zero on the separatrix
    CHECK(norm1(ph.energy(r.value)) <= tol_digits(26));
}

TEST_CASE("group property of the unstable parameterization") {
    BigComplex eta(-2L);
    BigComplex nu(0.002, 0.0);
    PreparedHamiltonian ph = PreparedHamiltonian::assemble(eta, nu * PolyFn::monomial(Mono(0, 5, 0, 0), BigComplex(1L)));
    FormalSeparatrix fs = direct_solve(ph, 12);
    SectorConfig sector;
    FlowOptions opt = quick_opts();
    BigComplex phi(0L), tau(-5.0, -9.0);
    FlowResult a = unstable_point(ph, fs.gamma_hat, phi, tau, sector, opt);
    BigFloat t(1.5);
    FlowResult b = integrate_orbit(ph.X, a.value, t, opt);
    BigComplex tt(t, BigFloat(0L));
    FlowResult c = unstable_point(ph, fs.gamma_hat, phi + tt, tau + tt, sector, opt);
    CHECK((b.value - c.value).norm1() <= tol_digits(24));
}

TEST_CASE("stable point mirrors the unstable construction") {
    BigComplex eta(-2L);
    LeadingOrder lead(eta);
    PreparedHamiltonian ph = PreparedHamiltonian::assemble(eta, PolyFn());
    FormalSeparatrix fs = direct_solve(ph, 12);
    SectorConfig sector;
    FlowOptions opt = quick_opts();
    BigComplex phi(0.1, 0.0), tau(4.0, -12.0);
    FlowResult r = stable_point(ph, fs.gamma_hat, phi, tau, sector, opt);
    CVec4 expect = lead.gamma0(phi, tau);
    CHECK((r.value - expect).norm1() <= tol_digits(27));
    // wrong sector rejected
    CHECK_THROWS_AS(stable_point(ph, fs.gamma_hat, phi, BigComplex(-30.0, 0.0), sector, opt), ValidationError);
    CHECK_THROWS_AS(unstable_point(ph, fs.gamma_hat, phi, BigComplex(30.0, 0.0), sector, opt), ValidationError);
}

TEST_CASE("fundamental matrix point: U0 golden, symplectic, derivative columns") {
    BigComplex eta(-2L);
    LeadingOrder lead(eta);
    PreparedHamiltonian ph = PreparedHamiltonian::assemble(eta, PolyFn());
    FormalPipeline pipe = formal_pipeline(ph, 10);
    SectorConfig sector;
    FlowOptions opt = quick_opts();
    BigComplex phi(0.2, 0.0), tau(-3.0, -11.0);
    FlowResult r = fundamental_matrix_point(ph, pipe.separatrix.gamma_hat, pipe.fundamental.u_hat, phi,
                                            tau, sector, opt);
    REQUIRE(r.has_matrix);
    CMat4 expect = lead.u0(phi, tau);
    CHECK(mat_close(r.matrix, expect, tol_digits(24)));
    CHECK(norm1(r.matrix.det() - BigComplex(1L)) <= tol_digits(24));
    CMat4 J = symplectic_J();
    CHECK(mat_close(r.matrix.transpose() * J * r.matrix, J, tol_digits(24)));

    // columns 3,4 match finite differences of Gamma^- to sqrt(tol)
    BigFloat h = BigFloat::pow2(-40);
    BigComplex hh(h, BigFloat(0L));
    auto gm = [&](const BigComplex& p, const BigComplex& t) {
        return unstable_point(ph, pipe.separatrix.gamma_hat, p, t, sector, opt).value;
    };
    CVec4 dphi_fd = (gm(phi + hh, tau) - gm(phi - hh, tau)) * (BigComplex(0.5) / hh);
    CVec4 dtau_fd = (gm(phi, tau + hh) - gm(phi, tau - hh)) * (BigComplex(0.5) / hh);
    for (int i = 0; i < 4; ++i) {
        CHECK(norm1(r.matrix(i, 2) - dphi_fd[i]) <= tol_digits(14));
        CHECK(norm1(r.matrix(i, 3) - dtau_fd[i]) <= tol_digits(14));
    }
}

TEST_CASE("halving the tolerance moves the result by less than the reported error") {
    BigComplex eta(-2L);
    BigComplex nu(0.01, 0.0);
    PreparedHamiltonian ph = PreparedHamiltonian::assemble(eta, nu * PolyFn::monomial(Mono(0, 5, 0, 0), BigComplex(1L)));
    FormalSeparatrix fs = direct_solve(ph, 12);
    SectorConfig sector;
    FlowOptions opt = quick_opts();
    BigComplex phi(0L), tau(-6.0, -10.0);
    FlowResult coarse = unstable_point(ph, fs.gamma_hat, phi, tau, sector, opt);
    FlowOptions fine = opt;
    fine.ode_tol = opt.ode_tol * BigFloat(0.5);
    FlowResult refined = unstable_point(ph, fs.gamma_hat, phi, tau, sector, fine);
    CHECK((coarse.value - refined.value).norm1() <= coarse.est_error + tol_digits(31));
}

TEST_CASE("blow-up guard") {
    // dp/ds = q^2-ish unstable growth: H = q1^3 gives p1' = -3q1^2... use
    // H = -I1 + I2 with a huge start instead: the guard triggers on |x|
    PolyFn H = PolyFn::monomial(Mono(3, 0, 0, 0), BigComplex(1L));
    PolyMap X = vector_field(H);
    CVec4 x0(BigComplex(0L), BigComplex(0L), BigComplex(0L), BigComplex(0L));
    x0[0] = BigComplex(2L);  // q1' = 0, p1' = -3 q1^2 -> p grows linearly; harmless
    FlowOptions opt = quick_opts();
    opt.blowup_bound = BigFloat(3L);
    CHECK_THROWS_AS(integrate_orbit(X, x0, BigFloat(10L), opt), BlowUpError);
}

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "stokeslab/normal_form.hpp"
#include "test_util.hpp"

using namespace stokeslab;
using namespace stokeslab::testutil;

namespace {
const BigFloat kTight = tol_bits(150);
const BigFloat kOracle = tol_digits(30);

PolyFn prepared(const BigComplex& eta, const PolyFn& F) {
    return -PolyFn::I1() + PolyFn::I2() + eta * (PolyFn::I3() * PolyFn::I3()) + F;
}

PolyFn q2_pow5() { return PolyFn::monomial(Mono(0, 5, 0, 0), BigComplex(1L)); }

// sup-distance between coefficient tables
BigFloat table_dist(const NormalFormResult& x, const NormalFormResult& y) {
    BigFloat d(0L);
    for (const auto& [lk, v] : x.a) d = max(d, norm1(v - y.coeff(lk.first, lk.second)));
    for (const auto& [lk, v] : y.a) d = max(d, norm1(v - x.coeff(lk.first, lk.second)));
    return d;
}
}  // namespace

TEST_CASE("already-normal hamiltonian: identity transformation, exact table") {
    BigComplex eta(-2L);
    NormalFormResult nf = sokolskii_normalize(prepared(eta, PolyFn()), 8);
    CHECK(norm1(nf.coeff(0, 2) - eta) <= kTight);
    for (const auto& [lk, v] : nf.a)
        if (lk != std::make_pair(0, 2)) CHECK(norm1(v) <= kTight);
    PolyMap id = PolyMap::identity();
    for (int i = 0; i < 4; ++i) {
        PolyFn d = nf.phi[i] - id[i];
        BigFloat err(0L);
        for (const auto& [k, c] : d.terms()) err += norm1(c);
        CHECK(err <= kTight);
    }
}

TEST_CASE("already-normal hamiltonian with several invariant monomials") {
    BigComplex eta(0.75, 0.5);
    PolyFn F = BigComplex(2.0, -1.0) * (PolyFn::I1() * PolyFn::I3()) +
               BigComplex(0.5) * (PolyFn::I3() * PolyFn::I3() * PolyFn::I3()) +
               BigComplex(-1.25, 0.25) * (PolyFn::I1() * PolyFn::I1() * PolyFn::I1());
    NormalFormResult nf = sokolskii_normalize(prepared(eta, F), 8);
    CHECK(norm1(nf.coeff(0, 2) - eta) <= kTight);
    CHECK(norm1(nf.coeff(1, 1) - BigComplex(2.0, -1.0)) <= kTight);
    CHECK(norm1(nf.coeff(0, 3) - BigComplex(0.5)) <= kTight);
    CHECK(norm1(nf.coeff(3, 0) - BigComplex(-1.25, 0.25)) <= kTight);
}

TEST_CASE("nu q2^5: coefficients have no first-order-in-nu part") {
    BigComplex eta(-2L);
    BigComplex nu(1.0 / 64, 0.0);
    NormalFormResult plus = sokolskii_normalize(prepared(eta, nu * q2_pow5()), 8);
    NormalFormResult minus = sokolskii_normalize(prepared(eta, -BigComplex(1L) * nu * q2_pow5()), 8);
    // a(nu) - a(-nu) = 2 nu a^(1) + O(nu^3); the rotational average of q2^5
    // vanishes, so the difference must be zero well below |nu|.
    CHECK(table_dist(plus, minus) <= kOracle);
    // but the transformation does gain O(nu) generator terms
    PolyFn d = plus.phi[0] - PolyMap::identity()[0];
    BigFloat sz(0L);
    for (const auto& [k, c] : d.terms()) sz = max(sz, norm1(c));
    CHECK(sz > BigFloat(1e-6));
}

TEST_CASE("invariance of the coefficient table under symplectic conjugation") {
    BigComplex eta(-2L);
    BigComplex nu(0.125, 0.0);
    PolyFn H = prepared(eta, nu * q2_pow5());
    // random symplectic near-identity map as a time-1 polynomial flow
    Rng rng(99);
    PolyFn chi = BigComplex(0.07, -0.03) * PolyFn::monomial(Mono(1, 1, 1, 0), BigComplex(1L)) +
                 BigComplex(-0.05, 0.02) * PolyFn::monomial(Mono(0, 0, 2, 3), BigComplex(1L)) +
                 BigComplex(0.04, 0.01) * PolyFn::monomial(Mono(2, 0, 0, 1), BigComplex(1L));
    int N = 8;
    PolyFn Hc = lie_transform(H, chi, N + 2);
    NormalFormResult nf1 = sokolskii_normalize(H, N);
    NormalFormResult nf2 = sokolskii_normalize(Hc.truncate_degree(N + 2), N);
    CHECK(table_dist(nf1, nf2) <= kOracle);
}

TEST_CASE("phi is symplectic and invertible up to the truncation degree") {
    BigComplex eta(1.0, 0.0);
    BigComplex nu(0.2, 0.1);
    int N = 7;
    NormalFormResult nf = sokolskii_normalize(prepared(eta, nu * q2_pow5()), N);

    // phi o phi_inv = id up to degree N
    PolyMap comp = compose(nf.phi, nf.phi_inv, N);
    for (int i = 0; i < 4; ++i) {
        PolyFn d = comp[i] - PolyMap::identity()[i];
        BigFloat err(0L);
        for (const auto& [k, c] : d.terms()) err += norm1(c);
        CHECK(err <= tol_digits(40));
    }

    // (DPhi)^T J (DPhi) - J has only terms of degree > N - 1
    auto DP = jacobian(nf.phi);
    auto entry = [&](int i, int j) { return DP[static_cast<size_t>(4 * i + j)]; };
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) {
            // (DP^T J DP)_{ij} = sum_k DP_{ki} (J DP)_{kj}
            PolyFn s;
            for (int k = 0; k < 2; ++k) {
                s += entry(k, i) * entry(k + 2, j);
                s -= entry(k + 2, i) * entry(k, j);
            }
            BigComplex Jij(0L);
            if (i == 0 && j == 2) Jij = BigComplex(1L);
            if (i == 1 && j == 3) Jij = BigComplex(1L);
            if (i == 2 && j == 0) Jij = BigComplex(-1L);
            if (i == 3 && j == 1) Jij = BigComplex(-1L);
            s -= PolyFn::constant(Jij);
            PolyFn low = s.truncate_degree(N - 1).pruned(tol_digits(40));
            CHECK(low.empty());
        }
}

TEST_CASE("normal form commutes with rotations up to the truncation degree") {
    BigComplex eta(-2L);
    BigComplex nu(0.3, 0.0);
    int N = 8;
    NormalFormResult nf = sokolskii_normalize(prepared(eta, nu * q2_pow5()), N);
    PolyFn bracket = poisson(nf.h_sharp, PolyFn::I1());
    PolyFn low = bracket.truncate_degree(N).pruned(tol_digits(40));
    CHECK(low.empty());
}

TEST_CASE("extract_eta") {
    BigComplex eta(-2L);
    NormalFormResult nf = sokolskii_normalize(prepared(eta, PolyFn()), 6);
    CHECK(norm1(nf.eta(tol_digits(30)) - eta) <= kTight);

    NormalFormResult nf2 = sokolskii_normalize(prepared(BigComplex(1.0, 1.0), PolyFn()), 6);
    CHECK(norm1(nf2.eta(tol_digits(30)) - BigComplex(1.0, 1.0)) <= kTight);

    NormalFormResult nf0 = sokolskii_normalize(prepared(BigComplex(0L), PolyFn()), 6);
    CHECK_THROWS_AS(nf0.eta(tol_digits(30)), DegeneracyError);
}

TEST_CASE("wrong quadratic part is rejected") {
    PolyFn H = PolyFn::I2() + PolyFn::I3();
    CHECK_THROWS_AS(sokolskii_normalize(H, 6), ResonanceError);
}

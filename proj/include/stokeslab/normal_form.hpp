#ifndef STOKESLAB_NORMAL_FORM_HPP
#define STOKESLAB_NORMAL_FORM_HPP

#include "stokeslab/hamiltonian.hpp"
#include "stokeslab/polynomial.hpp"

#include <map>
#include <utility>

namespace stokeslab {

/// Result of the degree-by-degree normalization. The coefficient table maps
/// (l, k) to the coefficient of I1^l I3^k in H o Phi; eta is the (0,2) entry.
struct NormalFormResult {
    std::map<std::pair<int, int>, BigComplex> a;
    PolyMap phi;      // x = phi(z), near identity
    PolyMap phi_inv;  // inverse up to degree `order`
    PolyFn h_sharp;   // H o phi truncated at degree `order`
    int order = 0;

    BigComplex coeff(int l, int k) const {
        auto it = a.find({l, k});
        return it == a.end() ? BigComplex(0L) : it->second;
    }
    /// The I3^2 coefficient; throws DegeneracyError when |eta| <= tol.
    BigComplex eta(const BigFloat& tol) const;
};

/// Time-1 Lie transform f |-> f o flow_chi truncated at degree dmax.
PolyFn lie_transform(const PolyFn& f, const PolyFn& chi, int dmax);

/// Time-1 flow of the Hamiltonian chi as a polynomial map (degree dmax).
PolyMap lie_flow_map(const PolyFn& chi, int dmax);

/// Brings H (with H2 = -I1 + I2) to Sokol'skii normal form up to degree N.
/// Homological equations are solved degree by degree as explicit
/// least-squares systems on rotation-weight blocks; the complement basis is
/// the set of monomials I1^l I3^k, and generators carry no kernel component
/// (minimum-norm convention).
NormalFormResult sokolskii_normalize(const PolyFn& H, int N);

}  // namespace stokeslab

#endif

#ifndef STOKESLAB_HAMILTONIAN_HPP
#define STOKESLAB_HAMILTONIAN_HPP

#include "stokeslab/polynomial.hpp"

namespace stokeslab {

/// Principal square root of -2/eta. Throws DegeneracyError when |eta| is
/// below tol (the non-degeneracy condition of the resonance).
BigComplex kappa_from_eta(const BigComplex& eta, const BigFloat& tol);

/// Hamiltonian in prepared form H = -I1 + I2 + eta I3^2 + F where every
/// monomial of F has weighted order >= 5 (q of weight 2, p of weight 1).
struct PreparedHamiltonian {
    PolyFn H;
    BigComplex eta;
    PolyFn F;
    PolyMap X;                     // Hamiltonian vector field of H
    std::array<PolyFn, 16> DX;    // Jacobian entries of X, row-major
    bool real_coefficients = false;

    static PreparedHamiltonian assemble(const BigComplex& eta, const PolyFn& F);

    CMat4 jacobian_at(const CVec4& x) const;
    CVec4 field_at(const CVec4& x) const;
    BigComplex energy(const CVec4& x) const { return H.eval(x); }
};

/// Linear part B = DX_{-I1+I2}(0).
CMat4 resonance_linear_part();

/// Result of the (alpha, iota) scaling of the quadratic part.
struct QuadScaling {
    BigFloat alpha;
    int iota = 1;
    CMat4 map;            // x_old = map * x_new
    BigComplex h_scale;   // H was multiplied by this (iota/alpha)
};

/// Brings H with quadratic part -alpha I1 + iota I2 (alpha > 0, iota = +-1)
/// to one with quadratic part -I1 + I2, scaling time accordingly.
/// Throws ResonanceError when the quadratic part is not of that form within
/// tol (the 1:-1 non-semisimple structure).
PolyFn normalize_quadratic(const PolyFn& H, const BigFloat& tol, QuadScaling* scaling = nullptr);

/// Rotation R_phi acting diagonally on the q- and p-planes.
CMat4 rotation_R(const BigFloat& phi);

}  // namespace stokeslab

#endif

#ifndef STOKESLAB_MELNIKOV_HPP
#define STOKESLAB_MELNIKOV_HPP

#include "stokeslab/hamiltonian.hpp"

#include <functional>

namespace stokeslab {

enum class Side { minus, plus };

/// Explicit leading-order objects of the integrable Hamiltonian
/// H0 = -I1 + I2 + eta I3^2: Gamma0, A0 = DX_{H0}(Gamma0), U0 and its inverse.
struct LeadingOrder {
    BigComplex eta;
    BigComplex kappa;

    explicit LeadingOrder(const BigComplex& eta_, bool rotate_pi = false);

    CVec4 gamma0(const BigComplex& phi, const BigComplex& tau) const;
    CMat4 a0(const BigComplex& phi, const BigComplex& tau) const;
    CMat4 u0(const BigComplex& phi, const BigComplex& tau) const;
    CMat4 u0_inv(const BigComplex& phi, const BigComplex& tau) const;

    /// U0 and U0^{-1} as exact Laurent–Fourier series.
    TauSeriesMat u0_series() const;
    TauSeriesMat u0_inv_series() const;
    TauSeries4 gamma0_series() const;
};

/// Inverse of a symplectic matrix: -J M^T J.
CMat4 symplectic_inverse(const CMat4& M);
TauSeriesMat symplectic_inverse_series(const TauSeriesMat& M);

/// Adaptive Gauss-Legendre quadrature of a complex-valued function on [a,b].
BigComplex adaptive_quad(const std::function<BigComplex(const BigFloat&)>& f, const BigFloat& a,
                         const BigFloat& b, const BigFloat& tol);

/// First-order-in-nu oracle around Gamma0 for a polynomial perturbation P.
class MelnikovOracle {
public:
    MelnikovOracle(const BigComplex& eta, const PolyFn& P, bool rotate_pi = false);

    const LeadingOrder& leading() const { return lead_; }
    /// X_P(Gamma0) as an exact series (finite Laurent-Fourier sum).
    const TauSeries4& forcing_series() const { return forcing_; }
    /// F0 = -U0^{-1} X_P(Gamma0) as an exact series.
    const TauSeries4& F0_series() const { return F0_; }

    /// xi0^-(phi,tau) (side=minus) or xi0^+(phi,tau) (side=plus): the
    /// variation-of-constants integral along the characteristic ray,
    /// quadrature on a finite segment plus integration-by-parts tails.
    CVec4 first_order_xi(Side side, const BigComplex& phi, const BigComplex& tau,
                         const BigFloat& tol) const;

    /// I(phi,tau) = Omega(Delta0, dphi Gamma0) as the full-line integral of
    /// the first component of F0 along the characteristic.
    BigComplex I_integral(const BigComplex& phi, const BigComplex& tau, const BigFloat& tol) const;

    /// dTheta1^{+-}/dnu at nu=0: evaluates I e^{-+i(tau-phi)} on the line
    /// Im tau = -+sigma and extracts the constant Fourier mode.
    BigComplex dtheta1_dnu(Side side, const BigFloat& sigma, const BigFloat& tol) const;

private:
    CVec4 ray_integral(const TauSeries4& series, Side side, const BigComplex& phi,
                       const BigComplex& tau, const BigFloat& tol, bool full_line) const;

    LeadingOrder lead_;
    PolyFn P_;
    TauSeries4 forcing_;
    TauSeries4 F0_;
};

/// Closed-form residue evaluation of I(phi,tau) for P = q2^5.
BigComplex residue_closed_form_q25(const BigComplex& eta, const BigComplex& phi,
                                   const BigComplex& tau);

}  // namespace stokeslab

#endif

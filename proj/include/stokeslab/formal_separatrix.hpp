#ifndef STOKESLAB_FORMAL_SEPARATRIX_HPP
#define STOKESLAB_FORMAL_SEPARATRIX_HPP

#include "stokeslab/hamiltonian.hpp"
#include "stokeslab/normal_form.hpp"

#include <map>
#include <utility>

namespace stokeslab {

using NfTable = std::map<std::pair<int, int>, BigComplex>;

inline BigComplex nf_coeff(const NfTable& a, int l, int k) {
    auto it = a.find({l, k});
    return it == a.end() ? BigComplex(0L) : it->second;
}

/// Polar data of the formal separatrix in normal-form coordinates:
/// odd series r (leading kappa tau^-1) and theta (theta_0 = 0).
struct PolarSeries {
    TauSeries r;
    TauSeries theta;
    BigComplex kappa;
    BigComplex eta;
    NfTable a;
    int order = 0;  // coefficients computed down to tau^-order
};

/// Solves d^2_tau r = -eta r^3 - sum_j (2j a_{0,j}/2^j) r^{2j-1} in odd
/// formal series with r_1 = kappa (principal branch), r_2 = 0.
TauSeries r_series(const BigComplex& eta, const NfTable& a, int N, bool rotate_pi = false);

/// theta(tau) from d_tau theta = -sum_j (a_{1,j}/2^j) r^{2j}, theta_0 = 0.
TauSeries theta_series(const TauSeries& r, const NfTable& a, int N);

PolarSeries polar_series(const BigComplex& eta, const NfTable& a, int N, bool rotate_pi = false);

/// Z_hat(phi,tau) = R_phi xi(tau) with
/// xi = (-dr cos theta, -dr sin theta, r cos theta, r sin theta).
TauSeries4 assemble_Zhat(const PolarSeries& ps, int N);

enum class SeparatrixRoute { normal_form, direct };

struct FormalSeparatrix {
    TauSeries4 gamma_hat;
    int n_max = 0;
    SeparatrixRoute source = SeparatrixRoute::normal_form;
};

/// Gamma_hat = Phi o Z_hat.
FormalSeparatrix pullback(const PolyMap& phi, const TauSeries4& Z, int N);

/// Formal separatrix through the normal-form route; normalizes H to degree
/// N+1 internally (enough for series coefficients down to tau^-N).
FormalSeparatrix formal_separatrix_nf(const PreparedHamiltonian& ph, int N, bool rotate_pi = false,
                                      NormalFormResult* nf_out = nullptr);

/// Order-by-order triangular solve in the original coordinates. Singular
/// Fourier modes m = +-1 are handled by bordered least squares; their kernel
/// coefficients are fixed by the compatibility of the next order, which
/// reproduces the normal-form route's normalization.
FormalSeparatrix direct_solve(const PreparedHamiltonian& ph, int N, bool rotate_pi = false);

/// Partial sum Gamma_n: exponents >= -(n+1) in components 1,2 and >= -n in
/// components 3,4.
TauSeries4 truncate_partial_sum(const TauSeries4& gamma_hat, int n);

struct ResidualReport {
    BigFloat weighted_norm;     // sup of coefficient norms after weighting
    int leading_exponent = 0;   // top exponent of the defect (first two rows)
};

/// Defect D Gamma_n - X_H(Gamma_n), checked against the
/// (tau^{-n-2}, tau^{-n-2}, tau^{-n-1}, tau^{-n-1}) row pattern.
ResidualReport residual(const PreparedHamiltonian& ph, const TauSeries4& gamma_n, int n,
                        const BigFloat& tol);

}  // namespace stokeslab

#endif

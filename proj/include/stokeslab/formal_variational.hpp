#ifndef STOKESLAB_FORMAL_VARIATIONAL_HPP
#define STOKESLAB_FORMAL_VARIATIONAL_HPP

#include "stokeslab/formal_separatrix.hpp"

namespace stokeslab {

/// Basis of formal solutions of the variational equation in the polar
/// normal-form coordinates (theta, r, Theta, R).
struct WBasis {
    TauSeries w21, w22;                 // homogeneous solutions of d^2 w = b w
    TauSeries w2_0, w2_1, w1_0, w1_1;   // particular pieces
    TauSeries g, f, b;                  // coefficient series
    std::array<TauSeries4, 4> w;        // the four formal solutions w_1..w_4
};

/// b(tau) = -(3 eta r^2 + sum_{l>=3} l(2l-1) a_{0,l} 2^{1-l} r^{2l-2});
/// an even series with b_{-1} = 6 (coefficient of tau^-2).
TauSeries b_series(const TauSeries& r, const BigComplex& eta, const NfTable& a, int N);

/// Odd homogeneous solution w_{2,2} = tau^3/(5 kappa) + ... with the free
/// coefficient fixed so the Wronskian with w_{2,1} = dr is exactly 1.
TauSeries w22_series(const TauSeries& r, const BigComplex& kappa, const TauSeries& b, int N);

WBasis build_w_basis(const PolarSeries& ps, int N);

/// Jacobian of the polar change evaluated on (theta(tau), r(tau), 0, -dr).
TauSeriesMat polar_change_jacobian(const PolarSeries& ps, int N);

struct FormalFundamental {
    TauSeriesMat u_hat;
    int n_max = 0;
};

/// V_hat in normal-form coordinates: v_i = R_phi DLambda w_i.
TauSeriesMat assemble_Vhat(const WBasis& wb, const PolarSeries& ps, int N);

/// U_hat = DPhi(Z_hat) V_hat, with the block exponent pattern enforced.
FormalFundamental assemble_Uhat(const WBasis& wb, const PolarSeries& ps, const PolyMap& phi,
                                const TauSeries4& Zhat, int N);

/// U_hat E_C with E_C = [[Id, 0], [C, Id]], C a symmetric 2x2 block.
FormalFundamental gauge_transform(const FormalFundamental& U, const std::array<BigComplex, 4>& C,
                                  const BigFloat& tol);

/// Partial sum U_n: exponents >= -(n+1) in rows 1,2 and >= -n in rows 3,4.
TauSeriesMat truncate_partial_sum_mat(const TauSeriesMat& u_hat, int n);

/// Defect D U_n - DX_H(Gamma_{n+3}) U_n checked against the
/// (tau^{-n-2}, tau^{-n-1}) row pattern.
ResidualReport u_residual(const PreparedHamiltonian& ph, const TauSeries4& gamma_partial,
                          const TauSeriesMat& u_n, int n, const BigFloat& tol);

/// Everything the analytic stage needs, computed once per Hamiltonian.
struct FormalPipeline {
    NormalFormResult nf;
    PolarSeries polar;
    TauSeries4 z_hat;
    FormalSeparatrix separatrix;
    FormalFundamental fundamental;
};

FormalPipeline formal_pipeline(const PreparedHamiltonian& ph, int N, bool rotate_pi = false);

}  // namespace stokeslab

#endif

#ifndef STOKESLAB_STOKES_HPP
#define STOKESLAB_STOKES_HPP

#include "stokeslab/melnikov.hpp"
#include "stokeslab/taylor_flow.hpp"

namespace stokeslab {

struct ExtractionOptions {
    BigFloat sigma = BigFloat(20L);
    int samples = 64;          // power of two, >= 16
    BigFloat phi = BigFloat(0L);
    int threads = 1;
    bool cross_check = true;   // compare the DFT mode against the Omega-form
};

/// One-sided extraction result: the e^{-+iz} Fourier coefficient of
/// c(z) = U^{-1}(Gamma^+ - Gamma^-) on the line Im z = -+sigma.
struct ThetaResult {
    CVec4 theta;
    BigFloat noise_floor;      // magnitude of the should-be-absent modes
    BigFloat omega_defect;     // |DFT Theta1 - Omega-form Theta1|
    BigFloat est_error;        // propagated flow error, amplified by e^sigma
    BigFloat sigma_used;
};

struct StokesReport {
    CVec4 theta_minus, theta_plus;
    BigComplex K, J;
    BigFloat sigma_used;
    BigFloat est_rel_error;    // from the two-sigma comparison
    BigFloat sum_rule_defect;  // |Theta1 + Theta2| / max(|Theta1|, floor)
    BigFloat reality_defect;   // |conj(Theta-) + sgn(eta) Theta+| (real H only)
    bool real_hamiltonian = false;
    BigFloat noise_floor;
};

/// Gamma^+ - Gamma^-, both flows at matched tolerance.
CVec4 delta_point(const PreparedHamiltonian& ph, const TauSeries4& gamma_hat, const BigComplex& phi,
                  const BigComplex& tau, const SectorConfig& sector, const FlowOptions& opt,
                  BigFloat* est_error = nullptr);

ThetaResult extract_theta(const PreparedHamiltonian& ph, const FormalPipeline& pipe, Side side,
                          const SectorConfig& sector, const FlowOptions& opt,
                          const ExtractionOptions& ex);

/// K = Theta1+ Theta1-;  J = Omega(Theta+, Theta-).
std::pair<BigComplex, BigComplex> stokes_constants(const CVec4& theta_plus, const CVec4& theta_minus);

/// Full pipeline: both sides at sigma and at the confirmation sigma.
StokesReport stokes_report(const PreparedHamiltonian& ph, const FormalPipeline& pipe,
                           const SectorConfig& sector, const FlowOptions& opt,
                           const ExtractionOptions& ex, const BigFloat& confirm_sigma);

struct InvarianceRow {
    std::string label;
    BigComplex K, J;
    BigFloat k_rel_defect;
    BigFloat j_rel_defect;
};

/// Recomputes K, J under (a) a translation reparameterization, (b) a gauge
/// E_C, (c) a symplectic polynomial change of coordinates, and reports the
/// relative defects against the baseline.
std::vector<InvarianceRow> invariance_suite(const PreparedHamiltonian& ph, const FormalPipeline& pipe,
                                            const SectorConfig& sector, const FlowOptions& opt,
                                            const ExtractionOptions& ex, const StokesReport& baseline,
                                            const BigComplex& phi0, const BigComplex& tau0,
                                            const std::array<BigComplex, 4>& gaugeC,
                                            const PolyFn* change_generator, int pipeline_order);

}  // namespace stokeslab

#endif

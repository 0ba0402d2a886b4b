#ifndef STOKESLAB_TAYLOR_FLOW_HPP
#define STOKESLAB_TAYLOR_FLOW_HPP

#include "stokeslab/formal_variational.hpp"

namespace stokeslab {

/// Complex-tau sector D^-_r = { |arg(tau + r)| > theta } and its mirror D^+_r.
struct SectorConfig {
    BigFloat theta_angle = BigFloat(0.5235987755982988);  // pi/6
    BigFloat r = BigFloat(4L);
    BigFloat h = BigFloat(1L);

    void validate() const;
    bool in_minus(const BigComplex& tau) const;
    bool in_plus(const BigComplex& tau) const;
};

struct FlowOptions {
    BigFloat ode_tol = BigFloat(1e-35);
    int seed_order = 12;
    BigFloat seed_radius = BigFloat(50L);
    int max_radius_doublings = 8;
    BigFloat blowup_bound = BigFloat(1000L);
    long max_steps = 200000;
};

struct FlowResult {
    CVec4 value;
    CMat4 matrix;        // only with fundamental_matrix_point
    bool has_matrix = false;
    BigFloat est_error;  // accumulated local truncation estimate + seed error
    long steps = 0;
    BigFloat seed_radius_used;
};

/// Straight-line multiplication program compiled from polynomial components;
/// jets are propagated order by order (cost O(#muls * order^2) per step).
class JetProgram {
public:
    static JetProgram compile(const std::vector<PolyFn>& outputs);

    int num_nodes() const { return 4 + static_cast<int>(muls_.size()); }
    int num_outputs() const { return static_cast<int>(out_.size()); }

    struct Work;
    Work make_work(int order) const;
    /// Computes jet coefficients of every node at order j from the variable
    /// jets (which must be filled through order j).
    void advance(Work& w, int j) const;
    /// out[k][j] = output k coefficient at order j.
    void outputs_at(const Work& w, int j, std::vector<BigComplex>& out) const;

    struct Work {
        int order = 0;
        // flat [node][coef]; nodes 0..3 are the state variables
        std::vector<std::vector<BigComplex>> jets;
    };

private:
    struct MulNode {
        int a, b;
    };
    std::vector<MulNode> muls_;
    std::vector<std::vector<std::pair<BigComplex, int>>> out_;
};

/// Adaptive Taylor integration of dx/ds = sign * X(x) over s in [0, s_total],
/// optionally carrying the matrix variational equation dM/ds = sign * DX(x) M.
struct TaylorIntegrator {
    TaylorIntegrator(const PolyMap& X, bool with_variational);

    FlowResult run(const CVec4& x0, const CMat4* m0, const BigFloat& s_total, int sign,
                   const FlowOptions& opt) const;

    JetProgram field;
    JetProgram jac;  // 16 outputs, only when with_variational
    bool variational;
};

FlowResult integrate_orbit(const PolyMap& X, const CVec4& x0, const BigFloat& s_total,
                           const FlowOptions& opt);

/// Gamma^-(phi, tau): seeds with the formal partial sum far left on the
/// characteristic ray and integrates forward.
FlowResult unstable_point(const PreparedHamiltonian& ph, const TauSeries4& gamma_hat,
                          const BigComplex& phi, const BigComplex& tau, const SectorConfig& sector,
                          const FlowOptions& opt);

/// Gamma^+(phi, tau): seeds far right and integrates backward.
FlowResult stable_point(const PreparedHamiltonian& ph, const TauSeries4& gamma_hat,
                        const BigComplex& phi, const BigComplex& tau, const SectorConfig& sector,
                        const FlowOptions& opt);

/// Normalized fundamental solution U(phi, tau) along Gamma^-, seeded with the
/// formal U_n and integrated with the coupled matrix variational equation.
FlowResult fundamental_matrix_point(const PreparedHamiltonian& ph, const TauSeries4& gamma_hat,
                                    const TauSeriesMat& u_hat, const BigComplex& phi,
                                    const BigComplex& tau, const SectorConfig& sector,
                                    const FlowOptions& opt);

}  // namespace stokeslab

#endif

#ifndef STOKESLAB_ERRORS_HPP
#define STOKESLAB_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace stokeslab {

struct Error : std::runtime_error {
    explicit Error(const std::string& m) : std::runtime_error(m) {}
};

// series_core
struct ModeOverflowError : Error { using Error::Error; };
struct WindowOverflowError : Error { using Error::Error; };
struct LogObstructionError : Error { using Error::Error; };

// hamiltonian_model / config
struct DegreeOverflowError : Error { using Error::Error; };
struct ValidationError : Error { using Error::Error; };

// normal_form
struct ResonanceError : Error { using Error::Error; };
struct SolvabilityError : Error { using Error::Error; };
struct DegeneracyError : Error { using Error::Error; };

// formal_separatrix / formal_variational
struct CompatibilityError : Error { using Error::Error; };
struct OrderViolationError : Error { using Error::Error; };
struct PatternViolationError : Error { using Error::Error; };
struct SymmetryError : Error { using Error::Error; };

// analytic_flow
struct BlowUpError : Error { using Error::Error; };
struct StepUnderflowError : Error { using Error::Error; };
struct SeedAccuracyError : Error { using Error::Error; };
struct PoleError : Error { using Error::Error; };

// stokes_invariants / melnikov_oracle
struct NoiseFloorError : Error { using Error::Error; };
struct InconsistencyError : Error { using Error::Error; };
struct DivergenceError : Error { using Error::Error; };

}  // namespace stokeslab

#endif

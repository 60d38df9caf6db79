#ifndef GPE_PEAKS_REPORT_HPP
#define GPE_PEAKS_REPORT_HPP

#include <cstdint>
#include <string>

#include "gpe_peaks/energy.hpp"
#include "gpe_peaks/grid.hpp"
#include "gpe_peaks/helmholtz.hpp"

namespace gpe {

template <typename Scalar>
struct SolverOptions {
  Scalar step = Scalar(0.5);       // initial step tau_0
  int max_iter = 20000;
  Scalar grad_tol = Scalar(1e-8);  // discrete L^2 norm of the energy gradient
  bool precondition = true;        // apply (-kappa Lap + mu)^{-1} to the gradient
  std::uint64_t seed = 0;
  bool rescaled = true;
  HelmholtzBackend backend = HelmholtzBackend::kSpectral;

  void validate() const {
    if (!(step > 0)) throw Error(ErrorCode::kInvalidArgument, "solver step must be positive");
    if (!(grad_tol > 0)) throw Error(ErrorCode::kInvalidArgument, "grad_tol must be positive");
    if (max_iter < 0) throw Error(ErrorCode::kInvalidArgument, "max_iter must be >= 0");
  }

  bool operator==(const SolverOptions&) const = default;
};

/// Outcome of one ground-state solve. Energies are reported both as the
/// physical level c_eps = J_eps(u) and normalised by eps^N.
template <typename Scalar>
struct SolveReport {
  FieldPair<Scalar> state;
  Frame<Scalar> frame;
  Scalar eps = 0;
  Scalar c_eps = 0;
  Scalar c_eps_over_epsN = 0;
  EnergyBreakdown<Scalar> energy;  // in the solve's own frame
  Point<Scalar> peak;              // physical coordinates
  Point<Scalar> peak_grid;         // grid coordinates
  Scalar peak_value = 0;
  bool peak_unique = false;
  Scalar pde_residual = 0;  // sup norm
  Scalar pde_residual_l2 = 0;
  Scalar grad_norm = 0;
  int iterations = 0;
  bool converged = false;
  std::string status;  // "converged", "max_iter", "stalled" or an error code name
};

}  // namespace gpe

#endif  // GPE_PEAKS_REPORT_HPP

#ifndef GPE_PEAKS_ENERGY_HPP
#define GPE_PEAKS_ENERGY_HPP

#include <Eigen/Dense>

#include <cmath>

#include "gpe_peaks/error.hpp"
#include "gpe_peaks/grid.hpp"
#include "gpe_peaks/potentials.hpp"
#include "gpe_peaks/scalar_field.hpp"

namespace gpe {

/// How grid coordinates map to physical space.
///
/// Original frame: grid coordinates are physical, kinetic term -eps^2 Lap.
/// Rescaled frame: x_phys = anchor + eps * x_grid, kinetic term -Lap, and every
/// energy is J_eps / eps^N.
template <typename Scalar>
struct Frame {
  bool rescaled = true;
  Point<Scalar> anchor = Point<Scalar>::Zero(1);

  static Frame original(int dim) { return {false, Point<Scalar>::Zero(dim)}; }
  static Frame blowup(const Point<Scalar>& anchor) { return {true, anchor}; }
};

/// Parameters, potentials, grid and frame of one solve, with the potentials
/// sampled once on the grid.
template <typename Scalar>
class Problem {
 public:
  Problem(GpeParams<Scalar> params, PotentialSpec<Scalar> v1, PotentialSpec<Scalar> v2,
          Grid<Scalar> grid, Frame<Scalar> frame)
      : params_(params),
        v1_(std::move(v1)),
        v2_(std::move(v2)),
        grid_(std::move(grid)),
        frame_(std::move(frame)) {
    params_.validate();
    if (frame_.anchor.size() != grid_.dim()) {
      if (frame_.anchor.size() == 1 && frame_.anchor.isZero()) {
        frame_.anchor = Point<Scalar>::Zero(grid_.dim());
      } else {
        throw Error(ErrorCode::kInvalidArgument, "frame anchor dimension mismatch");
      }
    }
    samples1_ = Vec<Scalar>::Zero(grid_.size());
    samples2_ = Vec<Scalar>::Zero(grid_.size());
    for (Eigen::Index l = 0; l < grid_.size(); ++l) {
      const Point<Scalar> x = to_physical(grid_.point(l));
      samples1_(l) = eval_potential(v1_, x);
      samples2_(l) = eval_potential(v2_, x);
    }
  }

  const GpeParams<Scalar>& params() const { return params_; }
  const PotentialSpec<Scalar>& v1() const { return v1_; }
  const PotentialSpec<Scalar>& v2() const { return v2_; }
  const Grid<Scalar>& grid() const { return grid_; }
  const Frame<Scalar>& frame() const { return frame_; }
  int dim() const { return grid_.dim(); }

  /// Potential samples at every node.
  const Vec<Scalar>& potential1() const { return samples1_; }
  const Vec<Scalar>& potential2() const { return samples2_; }

  Scalar kinetic_coefficient() const {
    return frame_.rescaled ? Scalar(1) : params_.eps * params_.eps;
  }

  /// Length of one unit of grid coordinates, in peak widths of the limit profile.
  Scalar peak_width() const { return frame_.rescaled ? Scalar(1) : params_.eps; }

  /// eps^N for rescaled frames' energies; 1 otherwise.
  Scalar energy_unit() const {
    return frame_.rescaled ? Scalar(1) : std::pow(params_.eps, Scalar(dim()));
  }

  Point<Scalar> to_physical(const Point<Scalar>& x) const {
    return frame_.rescaled ? Point<Scalar>(frame_.anchor + params_.eps * x) : x;
  }

  Point<Scalar> to_grid(const Point<Scalar>& x) const {
    return frame_.rescaled ? Point<Scalar>((x - frame_.anchor) / params_.eps) : x;
  }

  Scalar potential_at(int component, const Point<Scalar>& x_grid) const {
    return eval_potential(component == 0 ? v1_ : v2_, to_physical(x_grid));
  }

  /// Gradient of x_grid -> V(to_physical(x_grid)).
  Point<Scalar> potential_gradient_at(int component, const Point<Scalar>& x_grid) const {
    Point<Scalar> g = potential_gradient(component == 0 ? v1_ : v2_, to_physical(x_grid));
    if (frame_.rescaled) g *= params_.eps;
    return g;
  }

  /// Same problem with a different eps and frame (potentials resampled).
  Problem with(Scalar eps, Frame<Scalar> frame) const {
    GpeParams<Scalar> p = params_;
    p.eps = eps;
    return Problem(p, v1_, v2_, grid_, std::move(frame));
  }

 private:
  GpeParams<Scalar> params_;
  PotentialSpec<Scalar> v1_;
  PotentialSpec<Scalar> v2_;
  Grid<Scalar> grid_;
  Frame<Scalar> frame_;
  Vec<Scalar> samples1_;
  Vec<Scalar> samples2_;
};

template <typename Scalar>
struct EnergyBreakdown {
  Scalar kinetic = 0;    // sum_i int kappa |grad u_i|^2
  Scalar potential = 0;  // sum_i int V_i u_i^2
  Scalar quartic = 0;    // B(u1, u2)
  Scalar total_J = 0;    // (kinetic + potential)/2 - quartic/4
  Scalar nehari_defect = 0;  // ||u||_X^2 - B

  Scalar norm_x() const { return kinetic + potential; }
};

/// B(u1, u2) = int a1 u1^4 + a2 u2^4 + 2 beta u1^2 u2^2.
template <typename Scalar>
Scalar interaction_B(const FieldPair<Scalar>& state, const GpeParams<Scalar>& params) {
  const auto s1 = state.u1.array().square();
  const auto s2 = state.u2.array().square();
  return integrate(state.grid, (params.a1 * s1.square() + params.a2 * s2.square() +
                                2 * params.beta * s1 * s2)
                                   .matrix());
}

template <typename Scalar>
EnergyBreakdown<Scalar> energy(const Problem<Scalar>& problem,
                               const FieldPair<Scalar>& state) {
  const auto& g = problem.grid();
  const Scalar kappa = problem.kinetic_coefficient();
  EnergyBreakdown<Scalar> e;
  e.kinetic = kappa * (gradient_energy(g, state.u1) + gradient_energy(g, state.u2));
  e.potential = integrate(g, (problem.potential1().array() * state.u1.array().square() +
                              problem.potential2().array() * state.u2.array().square())
                                 .matrix());
  e.quartic = interaction_B(state, problem.params());
  e.total_J = (e.kinetic + e.potential) / 2 - e.quartic / 4;
  e.nehari_defect = e.kinetic + e.potential - e.quartic;
  return e;
}

/// Scale t with t * state on the Nehari manifold: t^2 = ||state||_X^2 / B(state).
template <typename Scalar>
Scalar nehari_scale(const Problem<Scalar>& problem, const FieldPair<Scalar>& state) {
  const auto e = energy(problem, state);
  if (!(e.quartic > 0)) {
    throw Error(ErrorCode::kNonpositiveB, "B(state) <= 0: cannot project onto Nehari");
  }
  return std::sqrt(e.norm_x() / e.quartic);
}

/// Discrete L^2 gradient of J:
///   g_i = -kappa Lap u_i + V_i u_i - a_i u_i^3 - beta u_j^2 u_i  (zero on the boundary).
template <typename Scalar>
FieldPair<Scalar> energy_gradient(const Problem<Scalar>& problem,
                                  const FieldPair<Scalar>& state) {
  const auto& g = problem.grid();
  const auto& p = problem.params();
  const Scalar kappa = problem.kinetic_coefficient();
  FieldPair<Scalar> out{g, laplacian_apply(g, state.u1, kappa),
                        laplacian_apply(g, state.u2, kappa)};
  const auto s1 = state.u1.array().square();
  const auto s2 = state.u2.array().square();
  out.u1.array() += (problem.potential1().array() - p.a1 * s1 - p.beta * s2) * state.u1.array();
  out.u2.array() += (problem.potential2().array() - p.a2 * s2 - p.beta * s1) * state.u2.array();
  zero_boundary(g, out.u1);
  zero_boundary(g, out.u2);
  return out;
}

template <typename Scalar>
struct ClosedFormLevels {
  Scalar c_mu;
  Scalar cbar1;
  Scalar cbar2;
};

/// c^mu = mu^{2-N/2}/4 (a1 g1^2 + a2 g2^2 + 2 beta g1 g2) int w^4 and
/// cbar_i = mu^{2-N/2}/(4 a_i) int w^4.
template <typename Scalar>
ClosedFormLevels<Scalar> closed_form_levels(const GpeParams<Scalar>& params,
                                            const RadialProfile<Scalar>& profile) {
  const auto [g1, g2] = coupling_gammas(params);
  const Scalar m4 = scalar_norms(profile).m4;
  const Scalar scale = std::pow(params.mu, 2 - Scalar(profile.dim) / 2) / 4 * m4;
  const Scalar mix = params.a1 * g1 * g1 + params.a2 * g2 * g2 + 2 * params.beta * g1 * g2;
  return {scale * mix, scale / params.a1, scale / params.a2};
}

}  // namespace gpe

#endif  // GPE_PEAKS_ENERGY_HPP

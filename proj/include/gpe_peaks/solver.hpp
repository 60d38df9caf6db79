#ifndef GPE_PEAKS_SOLVER_HPP
#define GPE_PEAKS_SOLVER_HPP

// Ground states by preconditioned gradient descent on the Nehari manifold:
//   u <- Pi(max(u - tau P grad J(u), 0)),  Pi(v) = sqrt(X(v)/B(v)) v,
// with P = (-kappa Lap + mu)^{-1}. On the manifold J = X^2 / (4B), so a trial
// is accepted iff its projected energy does not increase.

#include <algorithm>
#include <atomic>
#include <cmath>
#include <array>
#include <cstdint>
#include <exception>
#include <functional>
#include <mutex>
#include <optional>
#include <random>
#include <thread>
#include <tuple>
#include <vector>

#include "gpe_peaks/asymptotics.hpp"
#include "gpe_peaks/diagnostics.hpp"
#include "gpe_peaks/energy.hpp"
#include "gpe_peaks/error.hpp"
#include "gpe_peaks/grid.hpp"
#include "gpe_peaks/helmholtz.hpp"
#include "gpe_peaks/report.hpp"
#include "gpe_peaks/scalar_field.hpp"

namespace gpe {

namespace detail {

/// Projected energy X^2/(4B) and the projection factor of v; nullopt if B <= 0.
template <typename Scalar>
std::optional<std::pair<Scalar, Scalar>> projected_level(const Problem<Scalar>& problem,
                                                         const FieldPair<Scalar>& v) {
  const auto e = energy(problem, v);
  if (!(e.quartic > 0)) return std::nullopt;
  const Scalar x = e.norm_x();
  return std::make_pair(x * x / (4 * e.quartic), std::sqrt(x / e.quartic));
}

template <typename Scalar>
Scalar l2_norm(const Grid<Scalar>& g, const FieldPair<Scalar>& f) {
  return std::sqrt(integrate(g, (f.u1.array().square() + f.u2.array().square()).matrix()));
}

}  // namespace detail

/// Fills the derived fields of a report (energies, residuals, peak).
template <typename Scalar>
void finalize_report(const Problem<Scalar>& problem, SolveReport<Scalar>& rep) {
  const auto& g = problem.grid();
  rep.frame = problem.frame();
  rep.eps = problem.params().eps;
  rep.energy = energy(problem, rep.state);
  const Scalar eps_n = std::pow(rep.eps, Scalar(g.dim()));
  if (problem.frame().rescaled) {
    rep.c_eps_over_epsN = rep.energy.total_J;
    rep.c_eps = rep.energy.total_J * eps_n;
  } else {
    rep.c_eps = rep.energy.total_J;
    rep.c_eps_over_epsN = rep.energy.total_J / eps_n;
  }
  const auto res = pde_residual(problem, rep.state);
  rep.pde_residual = res.sup;
  rep.pde_residual_l2 = res.l2;
  try {
    const auto pk = detect_peak(rep.state);
    rep.peak_grid = pk.location;
    rep.peak = problem.to_physical(pk.location);
    rep.peak_value = pk.value;
    rep.peak_unique = pk.unique;
  } catch (const Error&) {
    rep.peak_grid = Point<Scalar>::Zero(g.dim());
    rep.peak = problem.to_physical(rep.peak_grid);
    rep.peak_value = 0;
    rep.peak_unique = false;
  }
}

/// Runs the projected flow from `init`. Hitting max_iter or stalling yields a
/// report with converged = false; see require_converged.
template <typename Scalar>
SolveReport<Scalar> solve_ground_state(const Problem<Scalar>& problem,
                                       const FieldPair<Scalar>& init,
                                       const SolverOptions<Scalar>& opts = {}) {
  opts.validate();
  const auto& g = problem.grid();
  if (!(init.grid == g)) throw Error(ErrorCode::kInvalidArgument, "init lives on another grid");
  if (!problem.params().attractive_coupling()) {
    throw Error(ErrorCode::kInvalidArgument, "ground-state solves need beta > max(a1, a2)");
  }

  FieldPair<Scalar> u = init;
  u.u1 = u.u1.cwiseMax(Scalar(0));
  u.u2 = u.u2.cwiseMax(Scalar(0));
  zero_boundary(g, u.u1);
  zero_boundary(g, u.u2);
  auto start = detail::projected_level(problem, u);
  if (!start) throw Error(ErrorCode::kProjectionFailed, "B(init) <= 0");
  u.u1 *= start->second;
  u.u2 *= start->second;
  const Scalar level0 = start->first;
  Scalar level = level0;

  std::optional<HelmholtzSolver<Scalar>> precond;
  if (opts.precondition) {
    precond.emplace(g, problem.kinetic_coefficient(), problem.params().mu, opts.backend);
  }

  // Gradient, search direction and <g, P g> at the current iterate.
  auto direction = [&](const FieldPair<Scalar>& v) {
    auto grad = energy_gradient(problem, v);
    FieldPair<Scalar> dir = grad;
    if (precond) {
      dir.u1 = precond->apply(grad.u1);
      dir.u2 = precond->apply(grad.u2);
    }
    const Scalar slope = integrate(g, (grad.u1.array() * dir.u1.array() +
                                       grad.u2.array() * dir.u2.array()).matrix());
    return std::make_tuple(std::move(grad), std::move(dir), slope);
  };

  SolveReport<Scalar> rep;
  Scalar tau = opts.step;
  const Scalar tau_max = 1000 * opts.step;
  rep.status = "max_iter";
  auto [grad, dir, slope] = direction(u);
  int it = 0;
  for (;; ++it) {
    rep.grad_norm = detail::l2_norm(g, grad);
    const Scalar sup = std::max(grad.u1.cwiseAbs().maxCoeff(), grad.u2.cwiseAbs().maxCoeff());
    if (rep.grad_norm < opts.grad_tol && sup <= 10 * opts.grad_tol) {
      rep.converged = true;
      rep.status = "converged";
      break;
    }
    if (it >= opts.max_iter) break;

    bool accepted = false;
    for (int tries = 0; tries < 60 && !accepted; ++tries) {
      FieldPair<Scalar> trial{g, (u.u1 - tau * dir.u1).cwiseMax(Scalar(0)),
                              (u.u2 - tau * dir.u2).cwiseMax(Scalar(0))};
      const auto lv = detail::projected_level(problem, trial);
      if (lv && std::isfinite(lv->first)) {
        const Scalar change = lv->first - level;
        const Scalar predicted = tau * slope;
        const Scalar noise = Scalar(1e-12) * std::abs(level);
        bool take = false;
        std::optional<std::tuple<FieldPair<Scalar>, FieldPair<Scalar>, Scalar>> next;
        trial.u1 *= lv->second;
        trial.u2 *= lv->second;
        if (predicted > Scalar(100) * noise) {
          take = change <= -Scalar(1e-4) * predicted;
        } else if (change <= noise) {
          // Energy differences are at round-off level: require the
          // preconditioned gradient norm to shrink instead.
          next = direction(trial);
          take = std::get<2>(*next) <= slope;
        }
        if (take) {
          u = std::move(trial);
          level = lv->first;
          if (!next) next = direction(u);
          std::tie(grad, dir, slope) = std::move(*next);
          tau = std::min(tau * Scalar(1.1), tau_max);
          accepted = true;
          continue;
        }
      }
      tau /= 2;
    }
    if (!std::isfinite(level)) throw Error(ErrorCode::kNonFinite, "energy became non-finite");
    if (level > 10 * std::abs(level0)) throw Error(ErrorCode::kDiverged, "energy exceeded 10x its initial value");
    if (!accepted) {
      rep.status = "stalled";
      break;
    }
  }
  rep.iterations = it;
  rep.state = std::move(u);
  finalize_report(problem, rep);
  return rep;
}

template <typename Scalar>
const SolveReport<Scalar>& require_converged(const SolveReport<Scalar>& rep) {
  if (!rep.converged) {
    throw Error(ErrorCode::kNotConverged, "solve stopped (" + rep.status + ") with gradient norm " +
                                              std::to_string(double(rep.grad_norm)));
  }
  return rep;
}

enum class InitMode { kExplicitAtMinimum, kRandomBump };

/// Physical point where the explicit initial state is centred: the well
/// centre, (A, 0, ...) on the flattest ring, or the origin.
template <typename Scalar>
Point<Scalar> preferred_minimum(const PotentialSpec<Scalar>& v1, const PotentialSpec<Scalar>& v2,
                                const GpeParams<Scalar>& params,
                                const RadialProfile<Scalar>& profile) {
  const int dim = profile.dim;
  if (v1.kind() == PotentialKind::kRing && v2.kind() == PotentialKind::kRing) {
    const auto sites = minimum_sites(v1, v2, dim);
    const auto fs = flattest_set(sites, params, profile);
    return sites[fs.z0.front()].location;
  }
  if (v1.kind() == PotentialKind::kPolynomialWell && v2.kind() == PotentialKind::kPolynomialWell) {
    return minimum_sites(v1, v2, dim).front().location;
  }
  for (const auto* v : {&v1, &v2}) {
    const auto mins = declared_minima(*v, dim);
    if (!mins.empty()) return mins.front();
  }
  return Point<Scalar>::Zero(dim);
}

template <typename Scalar>
FieldPair<Scalar> default_init(const Problem<Scalar>& problem, const RadialProfile<Scalar>& profile,
                               InitMode mode, std::uint64_t seed = 0) {
  const auto& g = problem.grid();
  if (mode == InitMode::kExplicitAtMinimum) {
    const Point<Scalar> z =
        preferred_minimum(problem.v1(), problem.v2(), problem.params(), profile);
    return coupled_explicit_state(problem.params(), profile, g, problem.to_grid(z),
                                  problem.frame().rescaled)
        .state;
  }
  // Candidate centres: nodes at least four peak widths inside the box where
  // V1 + V2 lies in the lower half of its range there. A bump started on a
  // flat plateau would only feel exponentially small forces.
  const Scalar width = problem.peak_width();
  const Scalar margin = 4 * width;
  std::vector<Eigen::Index> inside;
  Scalar vmin = std::numeric_limits<Scalar>::infinity(), vmax = -vmin;
  const Vec<Scalar> vsum = problem.potential1() + problem.potential2();
  for_each_interior(g, [&](Eigen::Index l) {
    const Point<Scalar> x = g.point(l);
    for (int a = 0; a < g.dim(); ++a) {
      if (std::abs(x[a] - g.center()[a]) > g.half_width() - margin) return;
    }
    inside.push_back(l);
    vmin = std::min(vmin, vsum(l));
    vmax = std::max(vmax, vsum(l));
  });
  if (inside.empty()) throw Error(ErrorCode::kInvalidArgument, "box too small for a random bump");
  std::vector<Eigen::Index> low;
  for (const auto l : inside) {
    if (vsum(l) <= vmin + (vmax - vmin) / 2) low.push_back(l);
  }
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<Scalar> unit(0, 1);
  std::uniform_int_distribution<std::size_t> pick(0, low.size() - 1);
  Point<Scalar> c = g.point(low[pick(rng)]);
  for (int a = 0; a < g.dim(); ++a) c[a] += (unit(rng) - Scalar(0.5)) * g.spacing();
  const Scalar w1 = Scalar(0.5) + Scalar(1.5) * unit(rng);
  const Scalar w2 = Scalar(0.5) + Scalar(1.5) * unit(rng);
  auto state = FieldPair<Scalar>::zeros(g);
  for_each_interior(g, [&](Eigen::Index l) {
    const Scalar r2 = (g.point(l) - c).squaredNorm() / (width * width);
    const Scalar b = std::exp(-r2);
    state.u1(l) = w1 * b;
    state.u2(l) = w2 * b;
  });
  return state;
}

template <typename Scalar>
struct ClusterSummary {
  int n_clusters = 0;             // after alignment
  int n_clusters_unaligned = 0;   // identity alignment
  Scalar max_intra_distance = 0;  // aligned, over converged pairs sharing a cluster
  std::vector<int> failed_starts;
  std::vector<int> labels;  // aligned cluster per start, -1 if failed
};

template <typename Scalar>
struct MultistartResult {
  std::vector<SolveReport<Scalar>> reports;
  ClusterSummary<Scalar> summary;
};

namespace detail {

template <typename Scalar>
std::vector<int> greedy_clusters(int n, const std::vector<bool>& ok,
                                 const std::function<Scalar(int, int)>& dist, Scalar tol) {
  std::vector<int> labels(n, -1);
  std::vector<int> reps;
  for (int k = 0; k < n; ++k) {
    if (!ok[k]) continue;
    for (std::size_t c = 0; c < reps.size(); ++c) {
      if (dist(reps[c], k) <= tol) {
        labels[k] = static_cast<int>(c);
        break;
      }
    }
    if (labels[k] < 0) {
      labels[k] = static_cast<int>(reps.size());
      reps.push_back(k);
    }
  }
  return labels;
}

/// Runs job(k) for k in [0, n) on up to `threads` workers.
template <typename Job>
void parallel_for(int n, int threads, Job&& job) {
  threads = std::max(1, std::min(threads, n));
  if (threads == 1) {
    for (int k = 0; k < n; ++k) job(k);
    return;
  }
  std::atomic<int> next{0};
  std::vector<std::thread> pool;
  std::exception_ptr failure;
  std::mutex failure_mutex;
  for (int t = 0; t < threads; ++t) {
    pool.emplace_back([&] {
      for (int k = next++; k < n; k = next++) {
        try {
          job(k);
        } catch (...) {
          std::lock_guard<std::mutex> lock(failure_mutex);
          if (!failure) failure = std::current_exception();
        }
      }
    });
  }
  for (auto& th : pool) th.join();
  if (failure) std::rethrow_exception(failure);
}

}  // namespace detail

/// n_starts solves from random bumps seeded opts.seed + k, clustered by
/// relative L^2 distance; radial problems in 2D/3D are compared after optimal
/// rotation about the physical origin.
template <typename Scalar>
MultistartResult<Scalar> multistart(const Problem<Scalar>& problem,
                                    const RadialProfile<Scalar>& profile, int n_starts,
                                    const SolverOptions<Scalar>& opts = {},
                                    Scalar cluster_tol = Scalar(1e-2), int threads = 1) {
  if (n_starts < 1) throw Error(ErrorCode::kInvalidArgument, "n_starts must be >= 1");
  MultistartResult<Scalar> out;
  out.reports.resize(n_starts);
  std::vector<bool> ok(n_starts, false);
  detail::parallel_for(n_starts, threads, [&](int k) {
    try {
      const auto init = default_init(problem, profile, InitMode::kRandomBump, opts.seed + k);
      out.reports[k] = solve_ground_state(problem, init, opts);
      ok[k] = out.reports[k].converged;
    } catch (const Error& e) {
      out.reports[k].eps = problem.params().eps;
      out.reports[k].frame = problem.frame();
      out.reports[k].state = FieldPair<Scalar>::zeros(problem.grid());
      out.reports[k].status = to_string(e.code());
    }
  });

  const bool rotate = problem.dim() >= 2 && problem.v1().is_radial() && problem.v2().is_radial();
  const Point<Scalar> origin = problem.to_grid(Point<Scalar>::Zero(problem.dim()));
  const auto& reps = out.reports;
  std::function<Scalar(int, int)> plain = [&](int a, int b) {
    return relative_distance(reps[a].state, reps[b].state);
  };
  std::function<Scalar(int, int)> aligned = plain;
  if (rotate) {
    aligned = [&](int a, int b) { return rotation_align(reps[a].state, reps[b].state, origin).distance; };
  }
  auto& s = out.summary;
  s.labels = detail::greedy_clusters<Scalar>(n_starts, ok, aligned, cluster_tol);
  const auto unaligned = detail::greedy_clusters<Scalar>(n_starts, ok, plain, cluster_tol);
  for (int k = 0; k < n_starts; ++k) {
    if (!ok[k]) s.failed_starts.push_back(k);
    s.n_clusters = std::max(s.n_clusters, s.labels[k] + 1);
    s.n_clusters_unaligned = std::max(s.n_clusters_unaligned, unaligned[k] + 1);
  }
  for (int a = 0; a < n_starts; ++a) {
    for (int b = a + 1; b < n_starts; ++b) {
      if (ok[a] && ok[b] && s.labels[a] == s.labels[b]) {
        s.max_intra_distance = std::max(s.max_intra_distance, aligned(a, b));
      }
    }
  }
  return out;
}

/// Solves for each eps of a strictly decreasing list, warm-starting from the
/// previous state. Rescaled frames move the anchor to the previous peak (by
/// whole grid nodes); original frames shrink the previous state about its peak.
/// Failures are recorded in the reports and the sweep carries on.
template <typename Scalar>
std::vector<SolveReport<Scalar>> continuation_sweep(const Problem<Scalar>& base,
                                                    const RadialProfile<Scalar>& profile,
                                                    const std::vector<Scalar>& eps_list,
                                                    const SolverOptions<Scalar>& opts = {}) {
  for (std::size_t k = 0; k < eps_list.size(); ++k) {
    if (!(eps_list[k] > 0)) throw Error(ErrorCode::kInvalidArgument, "eps must be positive");
    if (k > 0 && !(eps_list[k] < eps_list[k - 1])) {
      throw Error(ErrorCode::kInvalidArgument, "eps_list must be strictly decreasing");
    }
  }
  std::vector<SolveReport<Scalar>> out;
  const auto& g = base.grid();
  const bool rescaled = base.frame().rescaled;
  std::optional<SolveReport<Scalar>> prev;
  for (const Scalar eps : eps_list) {
    SolveReport<Scalar> rep;
    try {
      std::optional<Problem<Scalar>> problem;
      FieldPair<Scalar> init = FieldPair<Scalar>::zeros(g);
      if (!prev) {
        Frame<Scalar> frame = base.frame();
        if (rescaled) {
          frame.anchor = preferred_minimum(base.v1(), base.v2(), base.params(), profile);
        }
        problem.emplace(base.with(eps, frame));
        init = default_init(*problem, profile, InitMode::kExplicitAtMinimum);
      } else if (rescaled) {
        // Shift the previous state by whole nodes so its peak sits near the grid centre.
        const int dim = g.dim();
        std::array<int, 3> shift{0, 0, 0};
        Point<Scalar> moved = Point<Scalar>::Zero(dim);
        for (int a = 0; a < dim; ++a) {
          shift[a] = static_cast<int>(std::lround((prev->peak_grid[a] - g.center()[a]) / g.spacing()));
          moved[a] = shift[a] * g.spacing();
        }
        Frame<Scalar> frame = prev->frame;
        frame.anchor = frame.anchor + prev->eps * moved;
        problem.emplace(base.with(eps, frame));
        for_each_interior(g, [&](Eigen::Index l) {
          auto idx = g.multi_index(l);
          for (int a = 0; a < dim; ++a) idx[a] += shift[a];
          for (int a = 0; a < dim; ++a) {
            if (idx[a] < 0 || idx[a] >= g.n_per_axis()) return;
          }
          const Eigen::Index src = g.linear_index(idx);
          init.u1(l) = prev->state.u1(src);
          init.u2(l) = prev->state.u2(src);
        });
      } else {
        problem.emplace(base.with(eps, Frame<Scalar>::original(g.dim())));
        const Point<Scalar> p = prev->peak_grid;
        const Scalar ratio = eps / prev->eps;
        for_each_interior(g, [&](Eigen::Index l) {
          const Point<Scalar> src = p + (g.point(l) - p) / ratio;
          init.u1(l) = sample(g, prev->state.u1, src);
          init.u2(l) = sample(g, prev->state.u2, src);
        });
      }
      rep = solve_ground_state(*problem, init, opts);
      prev = rep;
    } catch (const Error& e) {
      rep = SolveReport<Scalar>{};
      rep.eps = eps;
      rep.frame = base.frame();
      rep.state = FieldPair<Scalar>::zeros(g);
      rep.status = to_string(e.code());
      rep.converged = false;
    }
    out.push_back(std::move(rep));
  }
  return out;
}

}  // namespace gpe

#endif  // GPE_PEAKS_SOLVER_HPP

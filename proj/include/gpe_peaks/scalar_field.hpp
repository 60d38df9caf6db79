#ifndef GPE_PEAKS_SCALAR_FIELD_HPP
#define GPE_PEAKS_SCALAR_FIELD_HPP

// The positive radial solution w of  Lap w - w + w^3 = 0  in R^N, its moments,
// and the explicit coupled solution built from it under a constant potential.

#include <Eigen/Dense>

#include <cmath>
#include <type_traits>
#include <numbers>
#include <utility>

#include "gpe_peaks/error.hpp"
#include "gpe_peaks/grid.hpp"

namespace gpe {

template <typename Scalar>
struct RadialProfile {
  int dim = 1;
  Scalar r_max = 25;
  Scalar step = Scalar(1e-3);
  Vec<Scalar> w;   // w(k * step)
  Vec<Scalar> dw;  // w'(k * step)
  Scalar w0 = 0;
  Scalar decay_rate = 0;
  Scalar tail_amplitude = 0;  // w ~ tail_amplitude r^{-(N-1)/2} e^{-r} past r_max

  Scalar radius(Eigen::Index k) const { return Scalar(k) * step; }

  /// Cubic Hermite interpolation of the samples.
  Scalar value(Scalar r) const {
    r = std::abs(r);
    const Eigen::Index last = w.size() - 1;
    if (r >= radius(last)) {
      const Scalar decay = std::pow(r, -Scalar(dim - 1) / 2) * std::exp(-r);
      return tail_amplitude * decay;
    }
    const Eigen::Index k = static_cast<Eigen::Index>(r / step);
    const Scalar t = (r - radius(k)) / step;
    const Scalar t2 = t * t, t3 = t2 * t;
    return (2 * t3 - 3 * t2 + 1) * w(k) + (t3 - 2 * t2 + t) * step * dw(k) +
           (-2 * t3 + 3 * t2) * w(k + 1) + (t3 - t2) * step * dw(k + 1);
  }
};

namespace detail {

template <typename Scalar>
struct ShotResult {
  int verdict = 0;  // +1 overshoot (w crossed zero), -1 undershoot (w turned up)
  Eigen::Index steps = 0;
};

// Integrates w'' + (N-1)/r w' - w + w^3 = 0 from the series start with RK4.
// Records samples into w/dw when they are non-null.
template <typename Scalar>
ShotResult<Scalar> shoot(int dim, Scalar w0, Scalar step, Eigen::Index n_steps,
                         Vec<Scalar>* w, Vec<Scalar>* dw, Scalar stop_below) {
  const Scalar c = Scalar(dim - 1);
  auto rhs = [c](Scalar r, Scalar y, Scalar v) -> std::pair<Scalar, Scalar> {
    return {v, -c / r * v + y - y * y * y};
  };
  const Scalar curvature = (w0 - w0 * w0 * w0) / Scalar(dim);
  if (w) {
    (*w)(0) = w0;
    (*dw)(0) = 0;
  }
  // First step from the series expansion about r = 0.
  Scalar r = step;
  Scalar y = w0 + curvature * step * step / 2;
  Scalar v = curvature * step;
  ShotResult<Scalar> res;
  for (Eigen::Index k = 1; k <= n_steps; ++k) {
    if (w) {
      (*w)(k) = y;
      (*dw)(k) = v;
    }
    res.steps = k;
    if (y < 0) {
      res.verdict = 1;
      return res;
    }
    if (v > 0) {
      res.verdict = -1;
      return res;
    }
    if (y < stop_below) return res;
    if (k == n_steps) break;
    const auto [k1y, k1v] = rhs(r, y, v);
    const auto [k2y, k2v] = rhs(r + step / 2, y + step / 2 * k1y, v + step / 2 * k1v);
    const auto [k3y, k3v] = rhs(r + step / 2, y + step / 2 * k2y, v + step / 2 * k2v);
    const auto [k4y, k4v] = rhs(r + step, y + step * k3y, v + step * k3v);
    y += step / 6 * (k1y + 2 * k2y + 2 * k3y + k4y);
    v += step / 6 * (k1v + 2 * k2v + 2 * k3v + k4v);
    r += step;
  }
  return res;
}

// Decaying solution of the linearised equation, T(r) = r^{1-N/2} K_{N/2-1}(r),
// and its derivative (overall constants dropped).
template <typename Scalar>
std::pair<Scalar, Scalar> linear_tail(int dim, Scalar r) {
  if (dim == 1) return {std::exp(-r), -std::exp(-r)};
  if (dim == 3) {
    const Scalar e = std::exp(-r);
    return {e / r, -e * (1 / r + 1 / (r * r))};
  }
  const double rd = static_cast<double>(r);
  return {Scalar(std::cyl_bessel_k(0.0, rd)), Scalar(-std::cyl_bessel_k(1.0, rd))};
}

template <typename Scalar>
Scalar simpson(const Vec<Scalar>& f, Scalar step) {
  const Eigen::Index n = f.size() - 1;  // intervals, even by construction
  Scalar acc = f(0) + f(n);
  for (Eigen::Index k = 1; k < n; ++k) acc += (k % 2 ? 4 : 2) * f(k);
  return acc * step / 3;
}

}  // namespace detail

/// Surface area of the unit sphere S^{N-1}: 2, 2 pi, 4 pi.
template <typename Scalar>
Scalar unit_sphere_area(int dim) {
  const Scalar pi = std::numbers::pi_v<Scalar>;
  switch (dim) {
    case 1: return 2;
    case 2: return 2 * pi;
    default: return 4 * pi;
  }
}

/// Solves for the radial ground state of the scalar field equation. N = 1 uses
/// the closed form sqrt(2) sech r; N = 2, 3 shoot on w(0).
template <typename Scalar>
RadialProfile<Scalar> solve_radial_profile(int dim, Scalar tol = Scalar(1e-14),
                                           Scalar step = Scalar(1e-3),
                                           Scalar r_max = Scalar(25)) {
  if (dim < 1 || dim > 3) {
    throw Error(ErrorCode::kInvalidArgument, "profile dimension must be 1, 2 or 3");
  }
  if (!(tol > 0)) throw Error(ErrorCode::kInvalidArgument, "tol must be positive");
  RadialProfile<Scalar> p;
  p.dim = dim;
  p.step = step;
  Eigen::Index n_steps = static_cast<Eigen::Index>(std::llround(r_max / step));
  if (n_steps % 2) ++n_steps;  // even interval count for Simpson
  p.r_max = Scalar(n_steps) * step;
  p.w.resize(n_steps + 1);
  p.dw.resize(n_steps + 1);

  if (dim == 1) {
    const Scalar s2 = std::sqrt(Scalar(2));
    for (Eigen::Index k = 0; k <= n_steps; ++k) {
      const Scalar r = p.radius(k);
      const Scalar sech = 1 / std::cosh(r);
      p.w(k) = s2 * sech;
      p.dw(k) = -s2 * sech * std::tanh(r);
    }
    p.w0 = s2;
    p.tail_amplitude = 2 * s2;
  } else {
    Scalar lo = Scalar(0.1), hi = Scalar(10);
    if (detail::shoot(dim, lo, step, n_steps, static_cast<Vec<Scalar>*>(nullptr),
                      static_cast<Vec<Scalar>*>(nullptr), Scalar(0)).verdict != -1 ||
        detail::shoot(dim, hi, step, n_steps, static_cast<Vec<Scalar>*>(nullptr),
                      static_cast<Vec<Scalar>*>(nullptr), Scalar(0)).verdict != 1) {
      throw Error(ErrorCode::kNoGroundState, "shooting bracket [0.1, 10] failed");
    }
    for (int it = 0; it < 200; ++it) {
      const Scalar mid = (lo + hi) / 2;
      if (mid == lo || mid == hi || hi - lo <= tol * lo) break;
      const auto res = detail::shoot(dim, mid, step, n_steps,
                                     static_cast<Vec<Scalar>*>(nullptr),
                                     static_cast<Vec<Scalar>*>(nullptr), Scalar(0));
      if (res.verdict == 1) {
        hi = mid;
      } else if (res.verdict == -1) {
        lo = mid;
      } else {
        lo = hi = mid;
        break;
      }
    }
    p.w0 = (lo + hi) / 2;
    // Trust the shot down to w = 1e-6, then continue with the decaying
    // solution of the linearised equation.
    const auto res = detail::shoot(dim, p.w0, step, n_steps, &p.w, &p.dw, Scalar(1e-6));
    if (res.verdict != 0 || res.steps >= n_steps) {
      throw Error(ErrorCode::kNoGroundState, "shooting lost the decaying branch");
    }
    const Eigen::Index km = res.steps;
    const Scalar rm = p.radius(km);
    const Scalar scale = p.w(km) / detail::linear_tail(dim, rm).first;
    for (Eigen::Index k = km + 1; k <= n_steps; ++k) {
      const auto [t, dt] = detail::linear_tail(dim, p.radius(k));
      p.w(k) = scale * t;
      p.dw(k) = scale * dt;
    }
    const Scalar rl = p.r_max;
    p.tail_amplitude = p.w(n_steps) * std::pow(rl, Scalar(dim - 1) / 2) * std::exp(rl);
  }

  for (Eigen::Index k = 0; k < n_steps; ++k) {
    if (!(p.w(k) > 0) || !(p.w(k + 1) < p.w(k))) {
      throw Error(ErrorCode::kNoGroundState, "profile is not positive and decreasing");
    }
  }

  // Least-squares slope of log(r^{(N-1)/2} w) over r in [8, 16].
  Scalar sx = 0, sy = 0, sxx = 0, sxy = 0;
  int count = 0;
  for (Eigen::Index k = 0; k <= n_steps; ++k) {
    const Scalar r = p.radius(k);
    if (r < 8 || r > 16) continue;
    const Scalar y = std::log(p.w(k)) + Scalar(dim - 1) / 2 * std::log(r);
    sx += r;
    sy += y;
    sxx += r * r;
    sxy += r * y;
    ++count;
  }
  p.decay_rate = -(count * sxy - sx * sy) / (count * sxx - sx * sx);
  return p;
}

template <typename Scalar>
struct ScalarNorms {
  Scalar m2;  // int w^2
  Scalar g2;  // int |grad w|^2
  Scalar m4;  // int w^4
};

template <typename Scalar>
ScalarNorms<Scalar> scalar_norms(const RadialProfile<Scalar>& p) {
  const Eigen::Index n = p.w.size();
  Vec<Scalar> f2(n), fg(n), f4(n);
  for (Eigen::Index k = 0; k < n; ++k) {
    const Scalar jac = std::pow(p.radius(k), Scalar(p.dim - 1));
    const Scalar w2 = p.w(k) * p.w(k);
    f2(k) = jac * w2;
    fg(k) = jac * p.dw(k) * p.dw(k);
    f4(k) = jac * w2 * w2;
  }
  const Scalar area = unit_sphere_area<Scalar>(p.dim);
  return {area * detail::simpson(f2, p.step), area * detail::simpson(fg, p.step),
          area * detail::simpson(f4, p.step)};
}

/// Angular factor  int_{S^{N-1}} |omega_N|^p dsigma.
template <typename Scalar>
Scalar normal_moment_factor(int dim, Scalar p) {
  const Scalar pi = std::numbers::pi_v<Scalar>;
  return 2 * std::pow(pi, Scalar(dim - 1) / 2) * std::tgamma((p + 1) / 2) /
         std::tgamma((p + Scalar(dim)) / 2);
}

/// Radial integral  int_0^inf r^{p+N-1} w(r)^2 dr.
template <typename Scalar>
Scalar radial_moment_integral(const RadialProfile<Scalar>& prof, Scalar p) {
  const Eigen::Index n = prof.w.size();
  Vec<Scalar> f(n);
  for (Eigen::Index k = 0; k < n; ++k) {
    const Scalar r = prof.radius(k);
    const Scalar e = p + Scalar(prof.dim - 1);
    f(k) = (e == 0 ? Scalar(1) : std::pow(r, e)) * prof.w(k) * prof.w(k);
  }
  return detail::simpson(f, prof.step);
}

/// int_{R^N} |x_N|^p w^2 dx (moment in one fixed coordinate direction).
template <typename Scalar>
Scalar scalar_moment(const RadialProfile<Scalar>& prof, Scalar p) {
  if (!(p >= 0)) throw Error(ErrorCode::kInvalidArgument, "moment order must be >= 0");
  return normal_moment_factor(prof.dim, p) * radial_moment_integral(prof, p);
}

/// int_{R^N} |x|^p w^2 dx (radial moment).
template <typename Scalar>
Scalar scalar_radial_moment(const RadialProfile<Scalar>& prof, Scalar p) {
  if (!(p >= 0)) throw Error(ErrorCode::kInvalidArgument, "moment order must be >= 0");
  return unit_sphere_area<Scalar>(prof.dim) * radial_moment_integral(prof, p);
}

/// gamma_i = (beta - a_j) / (beta^2 - a1 a2); both must be positive.
template <typename Scalar>
std::pair<Scalar, Scalar> coupling_gammas(const GpeParams<Scalar>& params) {
  const Scalar det = params.beta * params.beta - params.a1 * params.a2;
  if (det == 0) {
    throw Error(ErrorCode::kGammaNonpositive, "beta^2 = a1 a2: gammas undefined");
  }
  const Scalar g1 = (params.beta - params.a2) / det;
  const Scalar g2 = (params.beta - params.a1) / det;
  if (!(g1 > 0) || !(g2 > 0)) {
    throw Error(ErrorCode::kGammaNonpositive,
                "beta lies in [min(a1,a2), max(a1,a2)]: no positive explicit state");
  }
  return {g1, g2};
}

template <typename Scalar>
struct ExplicitState {
  Scalar gamma1;
  Scalar gamma2;
  FieldPair<Scalar> state;
};

/// u_i(x) = sqrt(gamma_i mu) w(sqrt(mu) |x - center| / s), with s = 1 in
/// rescaled coordinates and s = eps otherwise.
template <typename Scalar>
ExplicitState<Scalar> coupled_explicit_state(const GpeParams<Scalar>& params,
                                             const RadialProfile<Scalar>& profile,
                                             const Grid<Scalar>& grid,
                                             const std::type_identity_t<Point<Scalar>>& center,
                                             bool rescaled = true) {
  const auto [g1, g2] = coupling_gammas(params);
  if (profile.dim != grid.dim()) {
    throw Error(ErrorCode::kInvalidArgument, "profile and grid dimensions differ");
  }
  const Scalar scale = std::sqrt(params.mu) / (rescaled ? Scalar(1) : params.eps);
  const Scalar amp1 = std::sqrt(g1 * params.mu), amp2 = std::sqrt(g2 * params.mu);
  auto state = FieldPair<Scalar>::zeros(grid);
  for_each_interior(grid, [&](Eigen::Index l) {
    const Scalar w = profile.value(scale * (grid.point(l) - center).norm());
    state.u1(l) = amp1 * w;
    state.u2(l) = amp2 * w;
  });
  return {g1, g2, std::move(state)};
}

}  // namespace gpe

#endif  // GPE_PEAKS_SCALAR_FIELD_HPP

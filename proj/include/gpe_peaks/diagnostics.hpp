#ifndef GPE_PEAKS_DIAGNOSTICS_HPP
#define GPE_PEAKS_DIAGNOSTICS_HPP

// Structure checks on computed states: equation residual, local Pohozaev
// identity on a ball, peak location, exponential decay rate, axial symmetry
// and optimal rotational alignment of two states.

#include <Eigen/Dense>
#include <Eigen/Geometry>

#include <algorithm>
#include <array>
#include <cmath>
#include <type_traits>
#include <limits>
#include <numbers>
#include <vector>

#include "gpe_peaks/energy.hpp"
#include "gpe_peaks/error.hpp"
#include "gpe_peaks/grid.hpp"

namespace gpe {

template <typename Scalar>
struct Residual {
  Scalar sup = 0;
  Scalar l2 = 0;
};

template <typename Scalar>
Residual<Scalar> pde_residual(const Problem<Scalar>& problem, const FieldPair<Scalar>& state) {
  const auto g = energy_gradient(problem, state);
  Residual<Scalar> r;
  r.sup = std::max(g.u1.cwiseAbs().maxCoeff(), g.u2.cwiseAbs().maxCoeff());
  r.l2 = std::sqrt(integrate(problem.grid(),
                             (g.u1.array().square() + g.u2.array().square()).matrix()));
  return r;
}

/// Gauss-Legendre nodes and weights on [-1, 1] (Golub-Welsch).
template <typename Scalar>
std::pair<Vec<Scalar>, Vec<Scalar>> gauss_legendre(int n) {
  using Mat = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
  Mat jacobi = Mat::Zero(n, n);
  for (int k = 1; k < n; ++k) {
    const Scalar b = Scalar(k) / std::sqrt(Scalar(4 * k * k - 1));
    jacobi(k, k - 1) = b;
    jacobi(k - 1, k) = b;
  }
  Eigen::SelfAdjointEigenSolver<Mat> es(jacobi);
  Vec<Scalar> weights = 2 * es.eigenvectors().row(0).transpose().array().square();
  return {es.eigenvalues(), weights};
}

template <typename Scalar>
struct PohozaevReport {
  int axis = 0;
  Scalar volume_term = 0;
  Scalar boundary_term = 0;
  Scalar defect = 0;
  Point<Scalar> ball_center;
  Scalar ball_radius = 0;
};

/// Local Pohozaev identity on the ball B(center, radius) (grid coordinates)
/// in direction `axis` (0-based):
///   sum_i int_B d_j V_i u_i^2
///     = sum_i int_dB (V_i u_i^2 - a_i/2 u_i^4) nu_j - beta int_dB u1^2 u2^2 nu_j
///       + kappa sum_i int_dB (|grad u_i|^2 nu_j - 2 d_nu u_i d_j u_i).
template <typename Scalar>
PohozaevReport<Scalar> pohozaev_residual(const Problem<Scalar>& problem,
                                         const FieldPair<Scalar>& state,
                                         const std::type_identity_t<Point<Scalar>>& center, Scalar radius,
                                         int axis) {
  const auto& g = problem.grid();
  const auto& p = problem.params();
  const int dim = g.dim();
  const Scalar h = g.spacing();
  if (axis < 0 || axis >= dim) throw Error(ErrorCode::kInvalidArgument, "axis out of range");
  if (!(radius > 0)) throw Error(ErrorCode::kInvalidArgument, "radius must be positive");
  for (int a = 0; a < dim; ++a) {
    if (std::abs(center[a] - g.center()[a]) + radius + 3 * h > g.half_width()) {
      throw Error(ErrorCode::kBallOutsideGrid, "Pohozaev ball leaves the grid interior");
    }
  }
  const Scalar kappa = problem.kinetic_coefficient();

  auto volume_density = [&](const Point<Scalar>& x, Scalar u1, Scalar u2) {
    return problem.potential_gradient_at(0, x)[axis] * u1 * u1 +
           problem.potential_gradient_at(1, x)[axis] * u2 * u2;
  };
  auto boundary_density = [&](const Point<Scalar>& x, const Point<Scalar>& nu) {
    const Scalar u1 = sample(g, state.u1, x), u2 = sample(g, state.u2, x);
    const Point<Scalar> g1 = sample_gradient(g, state.u1, x);
    const Point<Scalar> g2 = sample_gradient(g, state.u2, x);
    const Scalar v1 = problem.potential_at(0, x), v2 = problem.potential_at(1, x);
    const Scalar nj = nu[axis];
    Scalar val = (v1 * u1 * u1 - p.a1 / 2 * u1 * u1 * u1 * u1) * nj +
                 (v2 * u2 * u2 - p.a2 / 2 * u2 * u2 * u2 * u2) * nj -
                 p.beta * u1 * u1 * u2 * u2 * nj;
    val += kappa * (g1.squaredNorm() * nj - 2 * g1.dot(nu) * g1[axis]);
    val += kappa * (g2.squaredNorm() * nj - 2 * g2.dot(nu) * g2[axis]);
    return val;
  };

  PohozaevReport<Scalar> rep;
  rep.axis = axis;
  rep.ball_center = center;
  rep.ball_radius = radius;

  if (dim == 1) {
    // Trapezoid on {lo, interior nodes, hi}.
    const Scalar lo = center[0] - radius, hi = center[0] + radius;
    std::vector<std::pair<Scalar, Scalar>> pts;  // (x, density)
    auto at = [&](Scalar xv) {
      Point<Scalar> x(1);
      x[0] = xv;
      return volume_density(x, sample(g, state.u1, x), sample(g, state.u2, x));
    };
    pts.emplace_back(lo, at(lo));
    for (int i = 0; i < g.n_per_axis(); ++i) {
      const Scalar xv = g.coord(0, i);
      if (xv > lo && xv < hi) {
        Point<Scalar> x(1);
        x[0] = xv;
        pts.emplace_back(xv, volume_density(x, state.u1(i), state.u2(i)));
      }
    }
    pts.emplace_back(hi, at(hi));
    Scalar vol = 0;
    for (std::size_t k = 1; k < pts.size(); ++k) {
      vol += (pts[k].first - pts[k - 1].first) * (pts[k].second + pts[k - 1].second) / 2;
    }
    rep.volume_term = vol;
    Point<Scalar> xl(1), xr(1), nl(1), nr(1);
    xl[0] = lo;
    xr[0] = hi;
    nl[0] = -1;
    nr[0] = 1;
    rep.boundary_term = boundary_density(xl, nl) + boundary_density(xr, nr);
  } else {
    const int n_r = std::max(24, static_cast<int>(std::ceil(2 * radius / h)));
    const auto [rn, rw] = gauss_legendre<Scalar>(n_r);
    const Scalar two_pi = 2 * std::numbers::pi_v<Scalar>;
    if (dim == 2) {
      const int n_t = std::max(64, static_cast<int>(std::ceil(4 * two_pi * radius / h)));
      Scalar vol = 0;
      for (int k = 0; k < n_r; ++k) {
        const Scalar r = radius * (rn(k) + 1) / 2;
        Scalar ring = 0;
        for (int t = 0; t < n_t; ++t) {
          const Scalar th = two_pi * Scalar(t) / Scalar(n_t);
          Point<Scalar> x(2);
          x << center[0] + r * std::cos(th), center[1] + r * std::sin(th);
          ring += volume_density(x, sample(g, state.u1, x), sample(g, state.u2, x));
        }
        vol += rw(k) * radius / 2 * r * ring * two_pi / Scalar(n_t);
      }
      rep.volume_term = vol;
      Scalar bnd = 0;
      for (int t = 0; t < n_t; ++t) {
        const Scalar th = two_pi * Scalar(t) / Scalar(n_t);
        Point<Scalar> nu(2);
        nu << std::cos(th), std::sin(th);
        bnd += boundary_density(Point<Scalar>(center + radius * nu), nu);
      }
      rep.boundary_term = bnd * radius * two_pi / Scalar(n_t);
    } else {
      const int n_c = std::max(16, static_cast<int>(std::ceil(2 * radius / h)));
      const int n_p = 2 * n_c;
      const auto [cn, cw] = gauss_legendre<Scalar>(n_c);
      auto direction = [&](int c, int ph) {
        const Scalar ct = cn(c), st = std::sqrt(std::max(Scalar(0), 1 - ct * ct));
        const Scalar phi = two_pi * Scalar(ph) / Scalar(n_p);
        Point<Scalar> nu(3);
        nu << st * std::cos(phi), st * std::sin(phi), ct;
        return nu;
      };
      Scalar vol = 0;
      for (int k = 0; k < n_r; ++k) {
        const Scalar r = radius * (rn(k) + 1) / 2;
        Scalar shell = 0;
        for (int c = 0; c < n_c; ++c) {
          for (int ph = 0; ph < n_p; ++ph) {
            const Point<Scalar> x = center + r * direction(c, ph);
            shell += cw(c) * volume_density(x, sample(g, state.u1, x), sample(g, state.u2, x));
          }
        }
        vol += rw(k) * radius / 2 * r * r * shell * two_pi / Scalar(n_p);
      }
      rep.volume_term = vol;
      Scalar bnd = 0;
      for (int c = 0; c < n_c; ++c) {
        for (int ph = 0; ph < n_p; ++ph) {
          const Point<Scalar> nu = direction(c, ph);
          bnd += cw(c) * boundary_density(Point<Scalar>(center + radius * nu), nu);
        }
      }
      rep.boundary_term = bnd * radius * radius * two_pi / Scalar(n_p);
    }
  }
  rep.defect = std::abs(rep.volume_term - rep.boundary_term);
  return rep;
}

template <typename Scalar>
struct PeakInfo {
  Point<Scalar> location;  // grid coordinates
  Scalar value = 0;
  bool unique = true;
};

/// Maximum of u1 + u2, refined by a least-squares quadratic on the 3^dim
/// stencil around the best node.
template <typename Scalar>
PeakInfo<Scalar> detect_peak(const FieldPair<Scalar>& state) {
  const auto& g = state.grid;
  const int dim = g.dim();
  const Vec<Scalar> s = state.u1 + state.u2;
  Eigen::Index best = -1;
  Scalar best_val = -std::numeric_limits<Scalar>::infinity();
  for_each_interior(g, [&](Eigen::Index l) {
    if (s(l) > best_val) {
      best_val = s(l);
      best = l;
    }
  });
  if (!(best_val > 0)) throw Error(ErrorCode::kDegenerate, "state has no positive peak");

  // Offsets of the 3^dim stencil.
  std::vector<std::array<int, 3>> offsets;
  const int count = dim == 1 ? 3 : (dim == 2 ? 9 : 27);
  for (int c = 0; c < count; ++c) {
    std::array<int, 3> o{0, 0, 0};
    int rem = c;
    for (int a = dim - 1; a >= 0; --a) {
      o[a] = rem % 3 - 1;
      rem /= 3;
    }
    offsets.push_back(o);
  }
  const auto center_idx = g.multi_index(best);
  auto neighbour = [&](const std::array<int, 3>& base, const std::array<int, 3>& o) {
    std::array<int, 3> idx = base;
    for (int a = 0; a < dim; ++a) idx[a] += o[a];
    return g.linear_index(idx);
  };

  const int n_quad = dim * (dim + 1) / 2;
  const int n_basis = 1 + dim + n_quad;
  using Mat = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
  Mat design(count, n_basis);
  Vec<Scalar> rhs(count);
  for (int c = 0; c < count; ++c) {
    const auto& o = offsets[c];
    int col = 0;
    design(c, col++) = 1;
    for (int a = 0; a < dim; ++a) design(c, col++) = o[a];
    for (int a = 0; a < dim; ++a) {
      for (int b = a; b < dim; ++b) design(c, col++) = Scalar(o[a] * o[b]);
    }
    rhs(c) = s(neighbour(center_idx, o));
  }
  const Vec<Scalar> coef = design.colPivHouseholderQr().solve(rhs);
  Vec<Scalar> grad = coef.segment(1, dim);
  Mat hess = Mat::Zero(dim, dim);
  {
    int col = 1 + dim;
    for (int a = 0; a < dim; ++a) {
      for (int b = a; b < dim; ++b) {
        if (a == b) {
          hess(a, a) = 2 * coef(col++);
        } else {
          hess(a, b) = hess(b, a) = coef(col++);
        }
      }
    }
  }
  PeakInfo<Scalar> info;
  info.location = g.point(best);
  info.value = best_val;
  Eigen::SelfAdjointEigenSolver<Mat> es(hess);
  if (es.eigenvalues().maxCoeff() < 0) {
    const Vec<Scalar> delta = -hess.ldlt().solve(grad);
    if (delta.cwiseAbs().maxCoeff() <= 1) {
      for (int a = 0; a < dim; ++a) info.location[a] += g.spacing() * delta(a);
      info.value = coef(0) + grad.dot(delta) + delta.dot(hess * delta) / 2;
    }
  }

  // Another local maximum within 10% of the peak, away from the peak stencil?
  const Scalar threshold = Scalar(0.9) * best_val;
  for_each_interior(g, [&](Eigen::Index l) {
    if (!info.unique || s(l) < threshold || l == best) return;
    const auto idx = g.multi_index(l);
    int cheb = 0;
    for (int a = 0; a < dim; ++a) cheb = std::max(cheb, std::abs(idx[a] - center_idx[a]));
    if (cheb <= 1) return;
    for (const auto& o : offsets) {
      if (s(neighbour(idx, o)) > s(l)) return;
    }
    info.unique = false;
  });
  return info;
}

template <typename Scalar>
struct DecayFit {
  Scalar rate = 0;
  Scalar rms_residual = 0;
  bool poor_fit = false;
  int points = 0;
};

/// Least-squares slope of log(u1 + u2) against distance from the peak over
/// distances in [3, 6] peak widths. A fit whose rms log-residual exceeds 0.05
/// is flagged as poor (the data are not exponential there).
template <typename Scalar>
DecayFit<Scalar> decay_rate_fit(const FieldPair<Scalar>& state, const std::type_identity_t<Point<Scalar>>& peak,
                                Scalar width = 1) {
  const auto& g = state.grid;
  std::vector<std::pair<Scalar, Scalar>> pts;
  Scalar band_max = 0;
  for_each_interior(g, [&](Eigen::Index l) {
    const Scalar d = (g.point(l) - peak).norm();
    if (d < 3 * width || d > 6 * width) return;
    const Scalar v = state.u1(l) + state.u2(l);
    band_max = std::max(band_max, v);
    if (v >= Scalar(1e-13)) pts.emplace_back(d, std::log(v));
  });
  if (band_max < Scalar(1e-13) || pts.size() < 2) {
    throw Error(ErrorCode::kBandBelowFloor, "state is below 1e-13 in the fit band");
  }
  Scalar sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (const auto& [x, y] : pts) {
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  const Scalar cnt = Scalar(pts.size());
  const Scalar slope = (cnt * sxy - sx * sy) / (cnt * sxx - sx * sx);
  const Scalar icpt = (sy - slope * sx) / cnt;
  Scalar ss = 0;
  for (const auto& [x, y] : pts) {
    const Scalar e = y - (icpt + slope * x);
    ss += e * e;
  }
  DecayFit<Scalar> fit;
  fit.rate = -slope;
  fit.rms_residual = std::sqrt(ss / cnt);
  fit.poor_fit = fit.rms_residual > Scalar(0.05);
  fit.points = static_cast<int>(pts.size());
  return fit;
}

/// out(x) = f(center + R^T (x - center)): the field rotated by R about center.
template <typename Scalar, typename Derived>
Vec<Scalar> rotate_values(const Grid<Scalar>& g, const Eigen::MatrixBase<Derived>& f,
                          const Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>& rot,
                          const std::type_identity_t<Point<Scalar>>& center) {
  Vec<Scalar> out = Vec<Scalar>::Zero(g.size());
  const Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> rt = rot.transpose();
  for_each_interior(g, [&](Eigen::Index l) {
    const Point<Scalar> x = g.point(l);
    const Point<Scalar> src = center + rt * (x - center);
    out(l) = sample(g, f, src);
  });
  return out;
}

template <typename Scalar>
Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> rotation_2d(Scalar angle) {
  Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> r(2, 2);
  r << std::cos(angle), -std::sin(angle), std::sin(angle), std::cos(angle);
  return r;
}

/// Relative L^2 distance between each u_i and its average over the symmetry
/// group of the axis through axis_origin and axis_point (grid coordinates):
/// the reflection across that line in 2D, 16 equispaced rotations about it in 3D.
template <typename Scalar>
Scalar symmetry_deviation(const FieldPair<Scalar>& state, const std::type_identity_t<Point<Scalar>>& axis_point,
                          const std::type_identity_t<Point<Scalar>>& axis_origin) {
  using Mat = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
  const auto& g = state.grid;
  const int dim = g.dim();
  if (dim < 2) throw Error(ErrorCode::kInvalidArgument, "symmetry needs dim 2 or 3");
  const Point<Scalar> dir = axis_point - axis_origin;
  if (dir.norm() <= Scalar(1e-12) * g.half_width()) {
    throw Error(ErrorCode::kDegenerateAxis, "axis point coincides with the origin");
  }
  const Point<Scalar> d = dir.normalized();
  std::vector<Mat> group;
  if (dim == 2) {
    group.push_back(Mat(2 * d * d.transpose() - Mat::Identity(2, 2)));
  } else {
    const Eigen::Matrix<Scalar, 3, 1> axis(d[0], d[1], d[2]);
    for (int k = 1; k < 16; ++k) {
      const Scalar ang = 2 * std::numbers::pi_v<Scalar> * Scalar(k) / 16;
      group.push_back(Mat(Eigen::AngleAxis<Scalar>(ang, axis).toRotationMatrix()));
    }
  }
  const Scalar members = Scalar(group.size() + 1);
  Scalar diff = 0, total = 0;
  for (const Vec<Scalar>* u : {&state.u1, &state.u2}) {
    Vec<Scalar> avg = *u;
    for (const auto& r : group) avg += rotate_values(g, *u, r, axis_origin);
    avg /= members;
    diff += integrate(g, (*u - avg).array().square().matrix());
    total += integrate(g, u->array().square().matrix());
  }
  if (!(total > 0)) throw Error(ErrorCode::kDegenerate, "zero state");
  return std::sqrt(diff / total);
}

template <typename Scalar>
Scalar symmetry_deviation(const FieldPair<Scalar>& state, const std::type_identity_t<Point<Scalar>>& axis_point) {
  return symmetry_deviation(state, axis_point, Point<Scalar>::Zero(state.grid.dim()).eval());
}

template <typename Scalar>
struct Alignment {
  std::vector<Scalar> angles;  // 2D: {theta}; 3D: {tilt, axial}; radians
  Scalar distance = 0;         // relative L^2 distance after alignment
  Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> rotation;  // b ~ a rotated by this
};

namespace detail {

template <typename Scalar, typename F>
Scalar golden_section(F&& f, Scalar lo, Scalar hi, Scalar tol) {
  const Scalar inv_phi = (std::sqrt(Scalar(5)) - 1) / 2;
  Scalar c = hi - inv_phi * (hi - lo), d = lo + inv_phi * (hi - lo);
  Scalar fc = f(c), fd = f(d);
  while (hi - lo > tol) {
    if (fc < fd) {
      hi = d;
      d = c;
      fd = fc;
      c = hi - inv_phi * (hi - lo);
      fc = f(c);
    } else {
      lo = c;
      c = d;
      fc = fd;
      d = lo + inv_phi * (hi - lo);
      fd = f(d);
    }
  }
  return (lo + hi) / 2;
}

template <typename Scalar>
Scalar wrap_angle(Scalar a) {
  const Scalar pi = std::numbers::pi_v<Scalar>;
  a = std::fmod(a, 2 * pi);
  if (a <= -pi) a += 2 * pi;
  if (a > pi) a -= 2 * pi;
  return a;
}

}  // namespace detail

/// Finds the rotation about `center` (grid coordinates) that best maps a onto
/// b, minimising the L^2 distance of u1 + u2, and reports the pair distance.
template <typename Scalar>
Alignment<Scalar> rotation_align(const FieldPair<Scalar>& a, const FieldPair<Scalar>& b,
                                 const std::type_identity_t<Point<Scalar>>& center) {
  using Mat = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
  const auto& g = a.grid;
  const int dim = g.dim();
  if (!(a.grid == b.grid)) throw Error(ErrorCode::kInvalidArgument, "states on different grids");
  if (dim < 2) throw Error(ErrorCode::kInvalidArgument, "rotation alignment needs dim 2 or 3");
  const Vec<Scalar> sa = a.u1 + a.u2, sb = b.u1 + b.u2;
  if (!(sa.squaredNorm() > 0) || !(sb.squaredNorm() > 0)) {
    throw Error(ErrorCode::kDegenerate, "cannot align a zero state");
  }
  // rot maps a to b; compare a with b rotated back.
  auto misfit = [&](const Mat& rot) {
    return integrate(g, (sa - rotate_values(g, sb, Mat(rot.transpose()), center))
                            .array()
                            .square()
                            .matrix());
  };
  Alignment<Scalar> out;
  const Scalar pi = std::numbers::pi_v<Scalar>;
  if (dim == 2) {
    const int coarse = 72;
    Scalar best = 0, best_val = std::numeric_limits<Scalar>::infinity();
    for (int k = 0; k < coarse; ++k) {
      const Scalar th = 2 * pi * Scalar(k) / Scalar(coarse);
      const Scalar v = misfit(rotation_2d(th));
      if (v < best_val) {
        best_val = v;
        best = th;
      }
    }
    const Scalar span = 2 * pi / Scalar(coarse);
    const Scalar th = detail::golden_section(
        [&](Scalar t) { return misfit(rotation_2d(t)); }, best - span, best + span,
        Scalar(1e-7));
    out.angles = {detail::wrap_angle(th)};
    out.rotation = rotation_2d(th);
  } else {
    const Point<Scalar> pa = detect_peak(a).location - center;
    const Point<Scalar> pb = detect_peak(b).location - center;
    if (pa.norm() <= g.spacing() || pb.norm() <= g.spacing()) {
      throw Error(ErrorCode::kDegenerate, "peaks coincide with the rotation centre");
    }
    const Eigen::Matrix<Scalar, 3, 1> va(pa[0], pa[1], pa[2]), vb(pb[0], pb[1], pb[2]);
    // tilt maps the peak direction of a onto that of b.
    const Eigen::Matrix<Scalar, 3, 3> tilt =
        Eigen::Quaternion<Scalar>::FromTwoVectors(va, vb).toRotationMatrix();
    const Eigen::Matrix<Scalar, 3, 1> axis = vb.normalized();
    auto full = [&](Scalar phi) {
      return Mat(Eigen::AngleAxis<Scalar>(phi, axis).toRotationMatrix() * tilt);
    };
    const int coarse = 36;
    Scalar best = 0, best_val = std::numeric_limits<Scalar>::infinity();
    for (int k = 0; k < coarse; ++k) {
      const Scalar phi = 2 * pi * Scalar(k) / Scalar(coarse);
      const Scalar v = misfit(full(phi));
      if (v < best_val) {
        best_val = v;
        best = phi;
      }
    }
    const Scalar span = 2 * pi / Scalar(coarse);
    const Scalar phi = detail::golden_section([&](Scalar t) { return misfit(full(t)); },
                                              best - span, best + span, Scalar(1e-7));
    out.angles = {Eigen::AngleAxis<Scalar>(tilt).angle(), detail::wrap_angle(phi)};
    out.rotation = full(phi);
  }
  const Mat back = out.rotation.transpose();
  const Vec<Scalar> b1 = rotate_values(g, b.u1, back, center);
  const Vec<Scalar> b2 = rotate_values(g, b.u2, back, center);
  const Scalar num = integrate(g, ((a.u1 - b1).array().square() + (a.u2 - b2).array().square()).matrix());
  const Scalar den = integrate(g, (a.u1.array().square() + a.u2.array().square()).matrix());
  out.distance = std::sqrt(num / den);
  return out;
}

/// Relative L^2 distance sqrt(sum_i |a_i - b_i|^2 / sum_i |a_i|^2).
template <typename Scalar>
Scalar relative_distance(const FieldPair<Scalar>& a, const FieldPair<Scalar>& b) {
  const auto& g = a.grid;
  const Scalar num = integrate(g, ((a.u1 - b.u1).array().square() + (a.u2 - b.u2).array().square()).matrix());
  const Scalar den = integrate(g, (a.u1.array().square() + a.u2.array().square()).matrix());
  if (!(den > 0)) throw Error(ErrorCode::kDegenerate, "zero reference state");
  return std::sqrt(num / den);
}

}  // namespace gpe

#endif  // GPE_PEAKS_DIAGNOSTICS_HPP

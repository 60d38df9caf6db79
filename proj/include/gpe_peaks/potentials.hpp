#ifndef GPE_PEAKS_POTENTIALS_HPP
#define GPE_PEAKS_POTENTIALS_HPP

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include "gpe_peaks/error.hpp"
#include "gpe_peaks/grid.hpp"

namespace gpe {

enum class PotentialKind { kConstant, kPolynomialWell, kRing, kTabulated };

/// V = mu.
template <typename Scalar>
struct ConstantPotential {
  Scalar mu = 1;
  bool operator==(const ConstantPotential&) const = default;
};

/// V = mu + m |x - z|^p + skew * (x - z)_1^3 exp(-|x - z|^2).
///
/// The skew term is an optional smooth, odd remainder o(|x - z|^p) that breaks
/// the reflection symmetry about z while keeping z the unique minimum.
template <typename Scalar>
struct PolynomialWell {
  Scalar mu = 1;
  Point<Scalar> center = Point<Scalar>::Zero(1);
  Scalar coefficient = 1;
  Scalar exponent = 2;
  Scalar skew = 0;
  bool operator==(const PolynomialWell& o) const {
    return mu == o.mu && center.size() == o.center.size() && center == o.center &&
           coefficient == o.coefficient && exponent == o.exponent && skew == o.skew;
  }
};

template <typename Scalar>
struct RingTerm {
  Scalar radius = 1;       // A_j
  Scalar coefficient = 1;  // b_j
  Scalar exponent = 2;     // p_j
  bool operator==(const RingTerm&) const = default;
};

/// Radial potential with minimum mu exactly on the spheres |x| = A_j:
///   V = mu + sum_j bump_j * b_j ||x| - A_j|^p_j + (1 - sum_j bump_j) * plateau,
/// bump_j = 1 for ||x| - A_j| <= r0/2, 0 beyond r0, quintic smoothstep between.
template <typename Scalar>
struct RingPotential {
  Scalar mu = 1;
  std::vector<RingTerm<Scalar>> rings;
  Scalar r0 = 1;
  Scalar plateau = 1;
  bool operator==(const RingPotential&) const = default;
};

/// Tensor-product table with multilinear interpolation.
template <typename Scalar>
struct TabulatedPotential {
  Scalar mu = 1;
  std::vector<std::vector<Scalar>> axes;
  Vec<Scalar> values;  // row-major over axes
  bool operator==(const TabulatedPotential& o) const {
    return mu == o.mu && axes == o.axes && values.size() == o.values.size() &&
           values == o.values;
  }
};

template <typename Scalar>
using PotentialForm = std::variant<ConstantPotential<Scalar>, PolynomialWell<Scalar>,
                                   RingPotential<Scalar>, TabulatedPotential<Scalar>>;

/// A trapping potential together with the metadata describing its minima.
template <typename Scalar>
struct PotentialSpec {
  PotentialForm<Scalar> form = ConstantPotential<Scalar>{};

  PotentialKind kind() const { return static_cast<PotentialKind>(form.index()); }

  Scalar mu() const {
    return std::visit([](const auto& f) { return f.mu; }, form);
  }

  bool is_radial() const {
    return kind() == PotentialKind::kRing || kind() == PotentialKind::kConstant;
  }

  bool operator==(const PotentialSpec&) const = default;

  static PotentialSpec constant(Scalar mu) {
    if (!(mu > 0)) throw Error(ErrorCode::kInvalidArgument, "mu must be positive");
    return {ConstantPotential<Scalar>{mu}};
  }

  static PotentialSpec polynomial_well(Scalar mu, const Point<Scalar>& center,
                                       Scalar coefficient, Scalar exponent,
                                       Scalar skew = 0) {
    if (!(mu > 0)) throw Error(ErrorCode::kInvalidArgument, "mu must be positive");
    if (!(coefficient > 0)) {
      throw Error(ErrorCode::kInvalidArgument, "well coefficient m must be positive");
    }
    if (!(exponent > 1)) {
      throw Error(ErrorCode::kInvalidArgument, "well exponent p must exceed 1");
    }
    if (skew != 0) {
      // m|y|^p must dominate |skew| |y|^3 e^{-|y|^2} strictly for y != 0.
      if (exponent > 3) {
        throw Error(ErrorCode::kInvalidArgument, "skew requires exponent p <= 3");
      }
      const Scalar s2 = (3 - exponent) / 2;
      const Scalar bound = s2 > 0 ? std::pow(s2, s2) * std::exp(-s2) : Scalar(1);
      if (!(std::abs(skew) * bound < coefficient)) {
        throw Error(ErrorCode::kInvalidArgument,
                    "skew too large: the well would dip below mu");
      }
    }
    return {PolynomialWell<Scalar>{mu, center, coefficient, exponent, skew}};
  }

  static PotentialSpec ring(Scalar mu, std::vector<RingTerm<Scalar>> rings, Scalar r0,
                            Scalar plateau) {
    if (!(mu > 0)) throw Error(ErrorCode::kInvalidArgument, "mu must be positive");
    if (rings.empty()) throw Error(ErrorCode::kInvalidArgument, "ring list is empty");
    if (!(r0 > 0)) throw Error(ErrorCode::kInvalidArgument, "r0 must be positive");
    if (!(plateau > 0)) {
      throw Error(ErrorCode::kInvalidArgument, "plateau must be positive");
    }
    for (const auto& t : rings) {
      if (!(t.radius > 0)) throw Error(ErrorCode::kInvalidArgument, "ring radius A must be positive");
      if (!(t.coefficient > 0)) throw Error(ErrorCode::kInvalidArgument, "ring coefficient b must be positive");
      if (!(t.exponent > 1)) throw Error(ErrorCode::kInvalidArgument, "ring exponent p must exceed 1");
      if (!(r0 < t.radius)) {
        throw Error(ErrorCode::kInvalidArgument, "r0 must be smaller than every ring radius");
      }
    }
    std::vector<Scalar> radii;
    for (const auto& t : rings) radii.push_back(t.radius);
    std::sort(radii.begin(), radii.end());
    for (std::size_t k = 1; k < radii.size(); ++k) {
      const Scalar gap = radii[k] - radii[k - 1];
      if (gap == 0) throw Error(ErrorCode::kInvalidArgument, "ring radii must be distinct");
      // Bumps of neighbouring rings must not overlap.
      if (!(2 * r0 <= gap)) {
        throw Error(ErrorCode::kInvalidArgument, "r0 must not exceed half the ring gap");
      }
    }
    return {RingPotential<Scalar>{mu, std::move(rings), r0, plateau}};
  }

  static PotentialSpec tabulated(Scalar mu, std::vector<std::vector<Scalar>> axes,
                                 Vec<Scalar> values) {
    if (axes.empty() || axes.size() > 3) {
      throw Error(ErrorCode::kInvalidArgument, "tabulated potential needs 1-3 axes");
    }
    Eigen::Index count = 1;
    for (const auto& ax : axes) {
      if (ax.size() < 2) throw Error(ErrorCode::kInvalidArgument, "axis needs >= 2 nodes");
      for (std::size_t k = 1; k < ax.size(); ++k) {
        if (!(ax[k] > ax[k - 1])) {
          throw Error(ErrorCode::kInvalidArgument, "tabulated axes must increase");
        }
      }
      count *= static_cast<Eigen::Index>(ax.size());
    }
    if (values.size() != count) {
      throw Error(ErrorCode::kInvalidArgument, "tabulated value count mismatch");
    }
    const Scalar vmin = values.minCoeff();
    const Scalar tol = 1e-12 * std::max(Scalar(1), std::abs(mu));
    if (vmin < mu - tol) {
      throw Error(ErrorCode::kInvalidArgument, "tabulated values fall below mu");
    }
    return {TabulatedPotential<Scalar>{mu, std::move(axes), std::move(values)}};
  }
};

namespace detail {

template <typename Scalar>
Scalar smoothstep5(Scalar t) {
  return t * t * t * (t * (t * 6 - 15) + 10);
}

template <typename Scalar>
Scalar smoothstep5_derivative(Scalar t) {
  return 30 * t * t * (t - 1) * (t - 1);
}

// Bump in the distance d from the sphere, and its derivative in d.
template <typename Scalar>
std::pair<Scalar, Scalar> ring_bump(Scalar d, Scalar r0) {
  const Scalar half = r0 / 2;
  if (d <= half) return {Scalar(1), Scalar(0)};
  if (d >= r0) return {Scalar(0), Scalar(0)};
  const Scalar t = (d - half) / half;
  return {1 - smoothstep5(t), -smoothstep5_derivative(t) / half};
}

// Radial profile V(r) and dV/dr of a ring potential.
template <typename Scalar>
std::pair<Scalar, Scalar> ring_radial(const RingPotential<Scalar>& f, Scalar r,
                                      bool need_derivative) {
  Scalar value = f.mu + f.plateau;
  Scalar slope = 0;
  for (const auto& t : f.rings) {
    const Scalar rho = r - t.radius;
    const Scalar d = std::abs(rho);
    const auto [bump, dbump] = ring_bump(d, f.r0);
    if (bump == 0 && dbump == 0) continue;
    const Scalar term = t.coefficient * std::pow(d, t.exponent);
    value += bump * (term - f.plateau);
    if (need_derivative) {
      if (d == 0 && t.exponent < 2) {
        throw Error(ErrorCode::kNonDifferentiable,
                    "ring potential with p < 2 evaluated on its minimum sphere");
      }
      const Scalar sign = rho > 0 ? Scalar(1) : (rho < 0 ? Scalar(-1) : Scalar(0));
      const Scalar dterm =
          d == 0 ? Scalar(0)
                 : t.coefficient * t.exponent * std::pow(d, t.exponent - 1) * sign;
      slope += dbump * sign * (term - f.plateau) + bump * dterm;
    }
  }
  return {value, slope};
}

template <typename Scalar>
struct CellLocation {
  std::array<int, 3> cell{};
  std::array<Scalar, 3> frac{};
};

template <typename Scalar>
CellLocation<Scalar> locate(const TabulatedPotential<Scalar>& f, const Point<Scalar>& x) {
  CellLocation<Scalar> loc;
  for (std::size_t a = 0; a < f.axes.size(); ++a) {
    const auto& ax = f.axes[a];
    const Scalar xa = x[static_cast<Eigen::Index>(a)];
    if (xa < ax.front() || xa > ax.back()) {
      throw Error(ErrorCode::kExtrapolation, "point lies outside the tabulated range");
    }
    auto it = std::upper_bound(ax.begin(), ax.end(), xa);
    int k = static_cast<int>(it - ax.begin()) - 1;
    k = std::clamp(k, 0, static_cast<int>(ax.size()) - 2);
    loc.cell[a] = k;
    loc.frac[a] = (xa - ax[k]) / (ax[k + 1] - ax[k]);
  }
  return loc;
}

// Multilinear interpolant; if grad != nullptr also fills its gradient.
template <typename Scalar>
Scalar tabulated_eval(const TabulatedPotential<Scalar>& f, const Point<Scalar>& x,
                      Point<Scalar>* grad) {
  const int dim = static_cast<int>(f.axes.size());
  const auto loc = locate(f, x);
  Scalar value = 0;
  if (grad) *grad = Point<Scalar>::Zero(dim);
  for (int corner = 0; corner < (1 << dim); ++corner) {
    Eigen::Index linear = 0;
    Scalar weight = 1;
    std::array<Scalar, 3> factors{};
    for (int a = 0; a < dim; ++a) {
      const int bit = (corner >> (dim - 1 - a)) & 1;
      linear = linear * static_cast<Eigen::Index>(f.axes[a].size()) + loc.cell[a] + bit;
      factors[a] = bit ? loc.frac[a] : 1 - loc.frac[a];
      weight *= factors[a];
    }
    const Scalar v = f.values(linear);
    value += weight * v;
    if (grad) {
      for (int a = 0; a < dim; ++a) {
        const int bit = (corner >> (dim - 1 - a)) & 1;
        Scalar partial = bit ? Scalar(1) : Scalar(-1);
        partial /= f.axes[a][loc.cell[a] + 1] - f.axes[a][loc.cell[a]];
        for (int b = 0; b < dim; ++b) {
          if (b != a) partial *= factors[b];
        }
        (*grad)[a] += partial * v;
      }
    }
  }
  return value;
}

}  // namespace detail

template <typename Scalar>
Scalar eval_potential(const PotentialSpec<Scalar>& spec, const Point<Scalar>& x) {
  return std::visit(
      [&](const auto& f) -> Scalar {
        using T = std::decay_t<decltype(f)>;
        if constexpr (std::is_same_v<T, ConstantPotential<Scalar>>) {
          return f.mu;
        } else if constexpr (std::is_same_v<T, PolynomialWell<Scalar>>) {
          const Point<Scalar> y = x - f.center;
          const Scalar r = y.norm();
          Scalar v = f.mu + f.coefficient * std::pow(r, f.exponent);
          if (f.skew != 0) v += f.skew * y[0] * y[0] * y[0] * std::exp(-r * r);
          return v;
        } else if constexpr (std::is_same_v<T, RingPotential<Scalar>>) {
          return detail::ring_radial(f, x.norm(), false).first;
        } else {
          return detail::tabulated_eval(f, x, static_cast<Point<Scalar>*>(nullptr));
        }
      },
      spec.form);
}

template <typename Scalar>
Point<Scalar> potential_gradient(const PotentialSpec<Scalar>& spec, const Point<Scalar>& x) {
  return std::visit(
      [&](const auto& f) -> Point<Scalar> {
        using T = std::decay_t<decltype(f)>;
        const Eigen::Index dim = x.size();
        if constexpr (std::is_same_v<T, ConstantPotential<Scalar>>) {
          return Point<Scalar>::Zero(dim);
        } else if constexpr (std::is_same_v<T, PolynomialWell<Scalar>>) {
          const Point<Scalar> y = x - f.center;
          const Scalar r = y.norm();
          Point<Scalar> g = Point<Scalar>::Zero(dim);
          if (r == 0) {
            if (f.exponent < 2) {
              throw Error(ErrorCode::kNonDifferentiable,
                          "well with p < 2 evaluated at its centre");
            }
          } else {
            g = f.coefficient * f.exponent * std::pow(r, f.exponent - 2) * y;
          }
          if (f.skew != 0) {
            const Scalar e = std::exp(-r * r);
            const Scalar y1 = y[0];
            g -= 2 * f.skew * y1 * y1 * y1 * e * y;
            g[0] += 3 * f.skew * y1 * y1 * e;
          }
          return g;
        } else if constexpr (std::is_same_v<T, RingPotential<Scalar>>) {
          const Scalar r = x.norm();
          const Scalar slope = detail::ring_radial(f, r, true).second;
          if (r == 0) return Point<Scalar>::Zero(dim);
          return (slope / r) * x;
        } else {
          Point<Scalar> g;
          detail::tabulated_eval(f, x, &g);
          return g;
        }
      },
      spec.form);
}

/// Points where V attains mu: the well centre, one representative per ring
/// (on the first axis), or the minimising table node. Empty for constants.
template <typename Scalar>
std::vector<Point<Scalar>> declared_minima(const PotentialSpec<Scalar>& spec, int dim) {
  std::vector<Point<Scalar>> out;
  std::visit(
      [&](const auto& f) {
        using T = std::decay_t<decltype(f)>;
        if constexpr (std::is_same_v<T, PolynomialWell<Scalar>>) {
          out.push_back(f.center);
        } else if constexpr (std::is_same_v<T, RingPotential<Scalar>>) {
          for (const auto& t : f.rings) {
            Point<Scalar> p = Point<Scalar>::Zero(dim);
            p[0] = t.radius;
            out.push_back(p);
          }
        } else if constexpr (std::is_same_v<T, TabulatedPotential<Scalar>>) {
          Eigen::Index best;
          f.values.minCoeff(&best);
          Point<Scalar> p(static_cast<Eigen::Index>(f.axes.size()));
          for (int a = static_cast<int>(f.axes.size()) - 1; a >= 0; --a) {
            const auto len = static_cast<Eigen::Index>(f.axes[a].size());
            p[a] = f.axes[a][best % len];
            best /= len;
          }
          out.push_back(p);
        }
      },
      spec.form);
  return out;
}

/// Reads rows "x1,...,xdim,value" sampled on a tensor-product grid (any row
/// order, optional header line).
template <typename Scalar>
PotentialSpec<Scalar> load_tabulated_csv(const std::string& path, int dim, Scalar mu) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIo, "cannot open tabulated potential " + path);
  std::vector<std::vector<Scalar>> rows;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string cell;
    std::vector<Scalar> row;
    bool numeric = true;
    while (std::getline(ss, cell, ',')) {
      try {
        std::size_t used = 0;
        row.push_back(static_cast<Scalar>(std::stod(cell, &used)));
      } catch (const std::exception&) {
        numeric = false;
        break;
      }
    }
    if (!numeric) {
      if (line_no == 1) continue;  // header
      throw Error(ErrorCode::kParseError, path + ":" + std::to_string(line_no) +
                                              ": non-numeric entry");
    }
    if (static_cast<int>(row.size()) != dim + 1) {
      throw Error(ErrorCode::kParseError, path + ":" + std::to_string(line_no) +
                                              ": expected " + std::to_string(dim + 1) +
                                              " columns");
    }
    rows.push_back(std::move(row));
  }
  std::vector<std::vector<Scalar>> axes(dim);
  for (int a = 0; a < dim; ++a) {
    for (const auto& r : rows) axes[a].push_back(r[a]);
    std::sort(axes[a].begin(), axes[a].end());
    axes[a].erase(std::unique(axes[a].begin(), axes[a].end()), axes[a].end());
  }
  Eigen::Index count = 1;
  for (const auto& ax : axes) count *= static_cast<Eigen::Index>(ax.size());
  if (count != static_cast<Eigen::Index>(rows.size())) {
    throw Error(ErrorCode::kParseError, path + ": rows do not form a tensor-product grid");
  }
  Vec<Scalar> values = Vec<Scalar>::Constant(count, std::numeric_limits<Scalar>::quiet_NaN());
  for (const auto& r : rows) {
    Eigen::Index linear = 0;
    for (int a = 0; a < dim; ++a) {
      const auto pos = std::lower_bound(axes[a].begin(), axes[a].end(), r[a]) - axes[a].begin();
      linear = linear * static_cast<Eigen::Index>(axes[a].size()) + pos;
    }
    values(linear) = r[dim];
  }
  if (!values.allFinite()) {
    throw Error(ErrorCode::kParseError, path + ": duplicate or missing table nodes");
  }
  return PotentialSpec<Scalar>::tabulated(mu, std::move(axes), std::move(values));
}

}  // namespace gpe

#endif  // GPE_PEAKS_POTENTIALS_HPP

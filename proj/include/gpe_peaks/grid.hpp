#ifndef GPE_PEAKS_GRID_HPP
#define GPE_PEAKS_GRID_HPP

// Numerical substrate: parameters, tensor-product grids, sampled fields,
// trapezoidal quadrature, the Dirichlet five/seven-point Laplacian and cubic
// interpolation of grid samples at off-node points.

#include <Eigen/Dense>

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <string>

#include "gpe_peaks/error.hpp"

namespace gpe {

template <typename Scalar>
using Vec = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

/// A point of R^dim, dim <= 3. Fixed capacity so it never touches the heap.
template <typename Scalar>
using Point = Eigen::Matrix<Scalar, Eigen::Dynamic, 1, Eigen::ColMajor, 3, 1>;

/// Physical constants of one problem instance.
template <typename Scalar>
struct GpeParams {
  Scalar a1 = 1;
  Scalar a2 = 1;
  Scalar beta = 2;
  Scalar eps = 1;
  Scalar mu = 1;

  /// Ground-state solves require beta > max(a1, a2).
  bool attractive_coupling() const { return beta > std::max(a1, a2); }

  void validate() const {
    using std::isfinite;
    if (!(isfinite(a1) && isfinite(a2) && isfinite(beta) && isfinite(eps) &&
          isfinite(mu))) {
      throw Error(ErrorCode::kNonFinite, "GpeParams contains a non-finite value");
    }
    if (!(a1 > 0)) throw Error(ErrorCode::kInvalidArgument, "a1 must be positive");
    if (!(a2 > 0)) throw Error(ErrorCode::kInvalidArgument, "a2 must be positive");
    if (!(eps > 0)) throw Error(ErrorCode::kInvalidArgument, "eps must be positive");
    if (!(mu > 0)) throw Error(ErrorCode::kInvalidArgument, "mu must be positive");
  }

  bool operator==(const GpeParams&) const = default;
};

inline constexpr std::int64_t kDefaultMaxPoints = std::int64_t{1} << 24;

/// Uniform grid on center + [-L, L]^dim, n points per axis including both
/// boundary nodes. Linear indices are row-major: the last axis is fastest.
template <typename Scalar>
class Grid {
 public:
  Grid() = default;

  Grid(int dim, Scalar half_width, int n_per_axis, const Point<Scalar>& center)
      : dim_(dim),
        half_width_(half_width),
        n_(n_per_axis),
        spacing_(2 * half_width / Scalar(n_per_axis - 1)),
        center_(center) {
    size_ = 1;
    for (int a = 0; a < dim_; ++a) size_ *= n_;
  }

  int dim() const { return dim_; }
  Scalar half_width() const { return half_width_; }
  int n_per_axis() const { return n_; }
  Scalar spacing() const { return spacing_; }
  const Point<Scalar>& center() const { return center_; }
  Eigen::Index size() const { return size_; }

  /// Stride of `axis` in the linear index.
  Eigen::Index stride(int axis) const {
    Eigen::Index s = 1;
    for (int a = axis + 1; a < dim_; ++a) s *= n_;
    return s;
  }

  Scalar coord(int axis, int i) const {
    return center_[axis] - half_width_ + Scalar(i) * spacing_;
  }

  std::array<int, 3> multi_index(Eigen::Index linear) const {
    std::array<int, 3> idx{0, 0, 0};
    for (int a = dim_ - 1; a >= 0; --a) {
      idx[a] = static_cast<int>(linear % n_);
      linear /= n_;
    }
    return idx;
  }

  Eigen::Index linear_index(const std::array<int, 3>& idx) const {
    Eigen::Index linear = 0;
    for (int a = 0; a < dim_; ++a) linear = linear * n_ + idx[a];
    return linear;
  }

  Point<Scalar> point(Eigen::Index linear) const {
    const auto idx = multi_index(linear);
    Point<Scalar> x(dim_);
    for (int a = 0; a < dim_; ++a) x[a] = coord(a, idx[a]);
    return x;
  }

  bool is_boundary(Eigen::Index linear) const {
    const auto idx = multi_index(linear);
    for (int a = 0; a < dim_; ++a) {
      if (idx[a] == 0 || idx[a] == n_ - 1) return true;
    }
    return false;
  }

  /// Continuous index coordinate of x along `axis` (0 at the first node).
  Scalar index_coord(int axis, Scalar x) const {
    return (x - (center_[axis] - half_width_)) / spacing_;
  }

  bool contains(const Point<Scalar>& x) const {
    for (int a = 0; a < dim_; ++a) {
      if (std::abs(x[a] - center_[a]) > half_width_) return false;
    }
    return true;
  }

  bool operator==(const Grid& o) const {
    return dim_ == o.dim_ && n_ == o.n_ && half_width_ == o.half_width_ &&
           center_.size() == o.center_.size() && center_ == o.center_;
  }

 private:
  int dim_ = 1;
  Scalar half_width_ = 1;
  int n_ = 16;
  Scalar spacing_ = 0;
  Point<Scalar> center_ = Point<Scalar>::Zero(1);
  Eigen::Index size_ = 16;
};

template <typename Scalar>
Grid<Scalar> build_grid(int dim, Scalar half_width, int n_per_axis,
                        const Point<Scalar>& center,
                        std::int64_t max_points = kDefaultMaxPoints) {
  if (dim < 1 || dim > 3) {
    throw Error(ErrorCode::kInvalidArgument,
                "grid dimension must be 1, 2 or 3, got " + std::to_string(dim));
  }
  if (n_per_axis < 16) {
    throw Error(ErrorCode::kInvalidArgument, "n_per_axis must be at least 16");
  }
  if (!(half_width > 0) || !std::isfinite(static_cast<double>(half_width))) {
    throw Error(ErrorCode::kInvalidArgument, "half_width must be positive");
  }
  if (center.size() != dim) {
    throw Error(ErrorCode::kInvalidArgument, "center must have dim entries");
  }
  std::int64_t points = 1;
  for (int a = 0; a < dim; ++a) {
    points *= n_per_axis;
    if (points > max_points) {
      throw Error(ErrorCode::kMemoryCap,
                  "n_per_axis^dim exceeds the cap of " + std::to_string(max_points) +
                      " points");
    }
  }
  return Grid<Scalar>(dim, half_width, n_per_axis, center);
}

template <typename Scalar>
Grid<Scalar> build_grid(int dim, Scalar half_width, int n_per_axis) {
  return build_grid(dim, half_width, n_per_axis, Point<Scalar>::Zero(dim).eval());
}

/// A scalar sample on a grid; boundary nodes hold zero.
template <typename Scalar>
struct Field {
  Grid<Scalar> grid;
  Vec<Scalar> values;
};

/// Two-component state (u1, u2) on one grid.
template <typename Scalar>
struct FieldPair {
  Grid<Scalar> grid;
  Vec<Scalar> u1;
  Vec<Scalar> u2;

  static FieldPair zeros(const Grid<Scalar>& g) {
    return {g, Vec<Scalar>::Zero(g.size()), Vec<Scalar>::Zero(g.size())};
  }
};

/// Calls fn(linear_index) for every node off the boundary.
template <typename Scalar, typename Fn>
void for_each_interior(const Grid<Scalar>& g, Fn&& fn) {
  const int n = g.n_per_axis();
  switch (g.dim()) {
    case 1:
      for (int i = 1; i < n - 1; ++i) fn(Eigen::Index(i));
      break;
    case 2:
      for (int i = 1; i < n - 1; ++i) {
        const Eigen::Index row = Eigen::Index(i) * n;
        for (int j = 1; j < n - 1; ++j) fn(row + j);
      }
      break;
    default:
      for (int i = 1; i < n - 1; ++i) {
        for (int j = 1; j < n - 1; ++j) {
          const Eigen::Index row = (Eigen::Index(i) * n + j) * n;
          for (int k = 1; k < n - 1; ++k) fn(row + k);
        }
      }
  }
}

/// Sets every boundary node of v to zero.
template <typename Scalar, typename Derived>
void zero_boundary(const Grid<Scalar>& g, Eigen::DenseBase<Derived>& v) {
  const int n = g.n_per_axis();
  for (int a = 0; a < g.dim(); ++a) {
    const Eigen::Index s = g.stride(a);
    const Eigen::Index block = s * n;
    for (Eigen::Index start = 0; start < g.size(); start += block) {
      for (Eigen::Index l = start; l < start + s; ++l) {
        v.derived()(l) = Scalar(0);
        v.derived()(l + (n - 1) * s) = Scalar(0);
      }
    }
  }
}

/// Trapezoidal weight of one node: h^dim times 1/2 per boundary axis.
template <typename Scalar>
Scalar trapezoid_weight(const Grid<Scalar>& g, Eigen::Index linear) {
  const auto idx = g.multi_index(linear);
  Scalar w = 1;
  for (int a = 0; a < g.dim(); ++a) {
    w *= g.spacing();
    if (idx[a] == 0 || idx[a] == g.n_per_axis() - 1) w /= 2;
  }
  return w;
}

/// Trapezoidal quadrature of grid samples; accepts any Eigen expression.
template <typename Scalar, typename Derived>
Scalar integrate(const Grid<Scalar>& g, const Eigen::DenseBase<Derived>& f) {
  const auto& v = f.derived();
  if (v.size() != g.size()) {
    throw Error(ErrorCode::kInvalidArgument, "field size does not match grid");
  }
  const int n = g.n_per_axis();
  auto w = [n](int i) { return (i == 0 || i == n - 1) ? Scalar(0.5) : Scalar(1); };
  Scalar total = 0;
  switch (g.dim()) {
    case 1:
      for (int i = 0; i < n; ++i) total += w(i) * Scalar(v(i));
      break;
    case 2:
      for (int i = 0; i < n; ++i) {
        Scalar row = 0;
        const Eigen::Index base = Eigen::Index(i) * n;
        for (int j = 0; j < n; ++j) row += w(j) * Scalar(v(base + j));
        total += w(i) * row;
      }
      break;
    default:
      for (int i = 0; i < n; ++i) {
        Scalar plane = 0;
        for (int j = 0; j < n; ++j) {
          Scalar row = 0;
          const Eigen::Index base = (Eigen::Index(i) * n + j) * n;
          for (int k = 0; k < n; ++k) row += w(k) * Scalar(v(base + k));
          plane += w(j) * row;
        }
        total += w(i) * plane;
      }
  }
  for (int a = 0; a < g.dim(); ++a) total *= g.spacing();
  if (!std::isfinite(static_cast<double>(total))) {
    throw Error(ErrorCode::kNonFinite, "integrand is not finite");
  }
  return total;
}

template <typename Scalar>
Scalar integrate(const Field<Scalar>& f) {
  return integrate(f.grid, f.values);
}

/// Returns -coeff * Laplacian(f) on interior nodes (zero on the boundary),
/// second-order central differences with zero ghost values.
template <typename Scalar, typename Derived>
Vec<Scalar> laplacian_apply(const Grid<Scalar>& g, const Eigen::MatrixBase<Derived>& f,
                            Scalar coeff) {
  const auto& v = f.derived();
  Vec<Scalar> out = Vec<Scalar>::Zero(g.size());
  const Scalar scale = coeff / (g.spacing() * g.spacing());
  const int dim = g.dim();
  std::array<Eigen::Index, 3> strides{};
  for (int a = 0; a < dim; ++a) strides[a] = g.stride(a);
  for_each_interior(g, [&](Eigen::Index l) {
    Scalar acc = Scalar(2 * dim) * v(l);
    for (int a = 0; a < dim; ++a) acc -= v(l + strides[a]) + v(l - strides[a]);
    out(l) = scale * acc;
  });
  return out;
}

/// Field overload: -eps^2 Laplacian.
template <typename Scalar>
Field<Scalar> laplacian_apply(const Field<Scalar>& f, Scalar eps) {
  return {f.grid, laplacian_apply(f.grid, f.values, eps * eps)};
}

/// Sum over grid edges of squared forward differences, times h^dim. Equals
/// <-Lap f, f>_h for fields vanishing on the boundary.
template <typename Scalar, typename Derived>
Scalar gradient_energy(const Grid<Scalar>& g, const Eigen::MatrixBase<Derived>& f) {
  const auto& v = f.derived();
  const int n = g.n_per_axis();
  const int dim = g.dim();
  Scalar acc = 0;
  for (int a = 0; a < dim; ++a) {
    const Eigen::Index s = g.stride(a);
    // Node l has a forward neighbour along a unless its a-index is n-1.
    const Eigen::Index block = s * n;
    for (Eigen::Index start = 0; start < g.size(); start += block) {
      for (Eigen::Index l = start; l < start + block - s; ++l) {
        const Scalar d = v(l + s) - v(l);
        acc += d * d;
      }
    }
  }
  Scalar hd = 1;
  for (int a = 0; a < dim; ++a) hd *= g.spacing();
  return acc * hd / (g.spacing() * g.spacing());
}

namespace detail {

// Keys cubic convolution kernel, a = -1/2 (third-order accurate).
template <typename Scalar>
Scalar keys_kernel(Scalar x) {
  x = std::abs(x);
  if (x <= 1) return (Scalar(1.5) * x - Scalar(2.5)) * x * x + 1;
  if (x < 2) return ((Scalar(-0.5) * x + Scalar(2.5)) * x - 4) * x + 2;
  return 0;
}

}  // namespace detail

/// Cubic-convolution interpolation of node values at an arbitrary point in
/// grid coordinates. Nodes outside the grid count as zero (Dirichlet ghosts).
template <typename Scalar, typename Derived>
Scalar sample(const Grid<Scalar>& g, const Eigen::MatrixBase<Derived>& f,
              const Point<Scalar>& x) {
  const auto& v = f.derived();
  const int dim = g.dim();
  const int n = g.n_per_axis();
  std::array<int, 3> base{0, 0, 0};
  std::array<std::array<Scalar, 4>, 3> w{};
  for (int a = 0; a < dim; ++a) {
    const Scalar t = g.index_coord(a, x[a]);
    if (t < -2 || t > Scalar(n + 1)) return Scalar(0);
    const Scalar fl = std::floor(t);
    const Scalar fr = t - fl;
    base[a] = static_cast<int>(fl) - 1;
    w[a][0] = detail::keys_kernel(fr + 1);
    w[a][1] = detail::keys_kernel(fr);
    w[a][2] = detail::keys_kernel(1 - fr);
    w[a][3] = detail::keys_kernel(2 - fr);
  }
  auto inside = [n](int i) { return i >= 0 && i < n; };
  Scalar acc = 0;
  if (dim == 1) {
    for (int p = 0; p < 4; ++p) {
      const int i = base[0] + p;
      if (inside(i)) acc += w[0][p] * v(i);
    }
    return acc;
  }
  if (dim == 2) {
    for (int p = 0; p < 4; ++p) {
      const int i = base[0] + p;
      if (!inside(i)) continue;
      Scalar row = 0;
      for (int q = 0; q < 4; ++q) {
        const int j = base[1] + q;
        if (inside(j)) row += w[1][q] * v(Eigen::Index(i) * n + j);
      }
      acc += w[0][p] * row;
    }
    return acc;
  }
  for (int p = 0; p < 4; ++p) {
    const int i = base[0] + p;
    if (!inside(i)) continue;
    Scalar plane = 0;
    for (int q = 0; q < 4; ++q) {
      const int j = base[1] + q;
      if (!inside(j)) continue;
      Scalar row = 0;
      for (int r = 0; r < 4; ++r) {
        const int k = base[2] + r;
        if (inside(k)) row += w[2][r] * v((Eigen::Index(i) * n + j) * n + k);
      }
      plane += w[1][q] * row;
    }
    acc += w[0][p] * plane;
  }
  return acc;
}

/// Gradient of the interpolant by central differences with step h.
template <typename Scalar, typename Derived>
Point<Scalar> sample_gradient(const Grid<Scalar>& g, const Eigen::MatrixBase<Derived>& f,
                              const Point<Scalar>& x) {
  Point<Scalar> grad(g.dim());
  const Scalar h = g.spacing();
  for (int a = 0; a < g.dim(); ++a) {
    Point<Scalar> xp = x, xm = x;
    xp[a] += h;
    xm[a] -= h;
    grad[a] = (sample(g, f, xp) - sample(g, f, xm)) / (2 * h);
  }
  return grad;
}

}  // namespace gpe

#endif  // GPE_PEAKS_GRID_HPP

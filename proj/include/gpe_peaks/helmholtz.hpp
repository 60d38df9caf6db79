#ifndef GPE_PEAKS_HELMHOLTZ_HPP
#define GPE_PEAKS_HELMHOLTZ_HPP

// Solves (-kappa Lap_h + shift) x = b with homogeneous Dirichlet data: the
// preconditioner of the ground-state flow.

#include <Eigen/Dense>

#include <cmath>
#include <memory>
#include <numbers>
#include <type_traits>

#include "gpe_peaks/dst.hpp"
#include "gpe_peaks/error.hpp"
#include "gpe_peaks/grid.hpp"

namespace gpe {

enum class HelmholtzBackend {
  kSpectral,           // exact solve by sine transform (double only)
  kConjugateGradient,  // matrix-free CG, relative tolerance cg_tol
};

template <typename Scalar>
class HelmholtzSolver {
 public:
  HelmholtzSolver(const Grid<Scalar>& grid, Scalar kappa, Scalar shift,
                  HelmholtzBackend backend = HelmholtzBackend::kSpectral,
                  Scalar cg_tol = Scalar(1e-8))
      : grid_(grid), kappa_(kappa), shift_(shift), cg_tol_(cg_tol) {
    if (!(shift > 0) || !(kappa > 0)) {
      throw Error(ErrorCode::kInvalidArgument, "Helmholtz operator must be positive");
    }
    spectral_ = backend == HelmholtzBackend::kSpectral && std::is_same_v<Scalar, double>;
    if (spectral_) setup_spectral();
  }

  bool spectral() const { return spectral_; }

  Vec<Scalar> apply(const Vec<Scalar>& rhs) {
    return spectral_ ? apply_spectral(rhs) : apply_cg(rhs);
  }

 private:
  void setup_spectral() {
    const int m = grid_.n_per_axis() - 2;
    transform_ = std::make_unique<SineTransform>(grid_.dim(), m);
    const Scalar h = grid_.spacing();
    eig_.resize(m);
    for (int k = 0; k < m; ++k) {
      const Scalar s = std::sin(std::numbers::pi_v<Scalar> * Scalar(k + 1) / Scalar(2 * (m + 1)));
      eig_(k) = 4 * s * s / (h * h);
    }
    norm_ = 1;
    for (int a = 0; a < grid_.dim(); ++a) norm_ *= Scalar(2 * (m + 1));
  }

  Vec<Scalar> apply_spectral(const Vec<Scalar>& rhs) {
    const int n = grid_.n_per_axis();
    const int m = n - 2;
    const int dim = grid_.dim();
    double* buf = transform_->data();
    gather(rhs, buf);
    transform_->execute();
    Eigen::Index c = 0;
    if (dim == 1) {
      for (int i = 0; i < m; ++i, ++c) buf[c] /= double((kappa_ * eig_(i) + shift_) * norm_);
    } else if (dim == 2) {
      for (int i = 0; i < m; ++i) {
        for (int j = 0; j < m; ++j, ++c) {
          buf[c] /= double((kappa_ * (eig_(i) + eig_(j)) + shift_) * norm_);
        }
      }
    } else {
      for (int i = 0; i < m; ++i) {
        for (int j = 0; j < m; ++j) {
          for (int k = 0; k < m; ++k, ++c) {
            buf[c] /= double((kappa_ * (eig_(i) + eig_(j) + eig_(k)) + shift_) * norm_);
          }
        }
      }
    }
    transform_->execute();
    Vec<Scalar> out = Vec<Scalar>::Zero(grid_.size());
    scatter(buf, out);
    return out;
  }

  void gather(const Vec<Scalar>& v, double* buf) const {
    Eigen::Index c = 0;
    for_each_interior(grid_, [&](Eigen::Index l) { buf[c++] = static_cast<double>(v(l)); });
  }

  void scatter(const double* buf, Vec<Scalar>& v) const {
    Eigen::Index c = 0;
    for_each_interior(grid_, [&](Eigen::Index l) { v(l) = static_cast<Scalar>(buf[c++]); });
  }

  Vec<Scalar> apply_cg(const Vec<Scalar>& rhs) {
    auto op = [&](const Vec<Scalar>& x) -> Vec<Scalar> {
      Vec<Scalar> y = laplacian_apply(grid_, x, kappa_);
      y += shift_ * x;
      zero_boundary(grid_, y);
      return y;
    };
    Vec<Scalar> b = rhs;
    zero_boundary(grid_, b);
    Vec<Scalar> x = b / shift_;
    Vec<Scalar> r = b - op(x);
    Vec<Scalar> p = r;
    Scalar rr = r.squaredNorm();
    const Scalar target = cg_tol_ * cg_tol_ * b.squaredNorm();
    const Eigen::Index max_iter = 10 * grid_.size();
    for (Eigen::Index it = 0; it < max_iter && rr > target; ++it) {
      const Vec<Scalar> ap = op(p);
      const Scalar alpha = rr / p.dot(ap);
      x += alpha * p;
      r -= alpha * ap;
      const Scalar rr_new = r.squaredNorm();
      p = r + (rr_new / rr) * p;
      rr = rr_new;
    }
    return x;
  }

  Grid<Scalar> grid_;
  Scalar kappa_;
  Scalar shift_;
  Scalar cg_tol_;
  bool spectral_ = false;
  std::unique_ptr<SineTransform> transform_;
  Vec<Scalar> eig_;
  Scalar norm_ = 1;
};

}  // namespace gpe

#endif  // GPE_PEAKS_HELMHOLTZ_HPP

#ifndef GPE_PEAKS_ASYMPTOTICS_HPP
#define GPE_PEAKS_ASYMPTOTICS_HPP

// Small-eps structure: the second-order energy coefficients of each potential
// minimum, the flattest minima, fitting c_eps/eps^N = c_mu + (lambda/2) eps^p
// and the peak drift towards the concentration set.

#include <algorithm>
#include <cmath>
#include <type_traits>
#include <limits>
#include <utility>
#include <vector>

#include "gpe_peaks/error.hpp"
#include "gpe_peaks/grid.hpp"
#include "gpe_peaks/potentials.hpp"
#include "gpe_peaks/report.hpp"
#include "gpe_peaks/scalar_field.hpp"

namespace gpe {

/// Local data of one common minimum of V1 and V2: a sphere |x| = radius for
/// ring potentials, a point for wells. Component i behaves like
/// mu + b_i d^{p_i} in the distance d to the minimum.
template <typename Scalar>
struct MinimumSite {
  bool ring = true;
  Scalar radius = 0;
  Point<Scalar> location;
  Scalar b1 = 1, p1 = 2;
  Scalar b2 = 1, p2 = 2;
};

/// Pairs the minima of V1 and V2. Both must be rings with the same radii or
/// wells with the same centre.
template <typename Scalar>
std::vector<MinimumSite<Scalar>> minimum_sites(const PotentialSpec<Scalar>& v1,
                                               const PotentialSpec<Scalar>& v2, int dim) {
  std::vector<MinimumSite<Scalar>> out;
  if (v1.kind() == PotentialKind::kRing && v2.kind() == PotentialKind::kRing) {
    const auto& r1 = std::get<RingPotential<Scalar>>(v1.form);
    const auto& r2 = std::get<RingPotential<Scalar>>(v2.form);
    for (const auto& t1 : r1.rings) {
      auto it = std::find_if(r2.rings.begin(), r2.rings.end(),
                             [&](const auto& t2) { return t2.radius == t1.radius; });
      if (it == r2.rings.end()) {
        throw Error(ErrorCode::kInvalidArgument, "V1 and V2 rings must share their radii");
      }
      MinimumSite<Scalar> s;
      s.ring = true;
      s.radius = t1.radius;
      s.location = Point<Scalar>::Zero(dim);
      s.location[0] = t1.radius;
      s.b1 = t1.coefficient;
      s.p1 = t1.exponent;
      s.b2 = it->coefficient;
      s.p2 = it->exponent;
      out.push_back(s);
    }
    if (r1.rings.size() != r2.rings.size()) {
      throw Error(ErrorCode::kInvalidArgument, "V1 and V2 rings must share their radii");
    }
    return out;
  }
  if (v1.kind() == PotentialKind::kPolynomialWell && v2.kind() == PotentialKind::kPolynomialWell) {
    const auto& w1 = std::get<PolynomialWell<Scalar>>(v1.form);
    const auto& w2 = std::get<PolynomialWell<Scalar>>(v2.form);
    if (!(w1.center.size() == w2.center.size() && w1.center == w2.center)) {
      throw Error(ErrorCode::kInvalidArgument, "V1 and V2 wells must share their centre");
    }
    MinimumSite<Scalar> s;
    s.ring = false;
    s.location = w1.center;
    s.radius = w1.center.norm();
    s.b1 = w1.coefficient;
    s.p1 = w1.exponent;
    s.b2 = w2.coefficient;
    s.p2 = w2.exponent;
    out.push_back(s);
    return out;
  }
  throw Error(ErrorCode::kInvalidArgument,
              "minimum metadata needs two ring or two polynomial-well potentials");
}

/// lambda_bar = mu^{1-(N+p)/2} * coef * moment with p = min(p1, p2) and
/// coef = g1 b1, g1 b1 + g2 b2 or g2 b2 as p1 <, =, > p2. The moment is taken
/// in the coordinate normal to the sphere for rings and radially for wells.
template <typename Scalar>
Scalar lambda_bar(const MinimumSite<Scalar>& site, const GpeParams<Scalar>& params,
                  const RadialProfile<Scalar>& profile) {
  if (!(site.p1 > 1) || !(site.p2 > 1)) {
    throw Error(ErrorCode::kInvalidArgument, "exponents must exceed 1");
  }
  const auto [g1, g2] = coupling_gammas(params);
  Scalar coef;
  if (site.p1 < site.p2) {
    coef = g1 * site.b1;
  } else if (site.p1 == site.p2) {
    coef = g1 * site.b1 + g2 * site.b2;
  } else {
    coef = g2 * site.b2;
  }
  const Scalar p = std::min(site.p1, site.p2);
  const Scalar n = Scalar(profile.dim);
  const Scalar moment = site.ring ? scalar_moment(profile, p) : scalar_radial_moment(profile, p);
  return std::pow(params.mu, 1 - (n + p) / 2) * coef * moment;
}

template <typename Scalar>
struct FlattestSet {
  Scalar p0 = 0;
  std::vector<int> gamma;   // indices with p_j = p0
  Scalar lambda0 = 0;
  std::vector<int> z0;      // indices of gamma attaining lambda0
  std::vector<Scalar> z0_radii;
  std::vector<Scalar> lambdas;  // lambda_bar of every site
};

template <typename Scalar>
FlattestSet<Scalar> flattest_set(const std::vector<MinimumSite<Scalar>>& sites,
                                 const GpeParams<Scalar>& params,
                                 const RadialProfile<Scalar>& profile) {
  if (sites.empty()) throw Error(ErrorCode::kInvalidArgument, "no minimum sites");
  FlattestSet<Scalar> fs;
  fs.p0 = -1;
  for (const auto& s : sites) {
    fs.p0 = std::max(fs.p0, std::min(s.p1, s.p2));
    fs.lambdas.push_back(lambda_bar(s, params, profile));
  }
  fs.lambda0 = std::numeric_limits<Scalar>::infinity();
  for (int j = 0; j < static_cast<int>(sites.size()); ++j) {
    if (std::min(sites[j].p1, sites[j].p2) == fs.p0) {
      fs.gamma.push_back(j);
      fs.lambda0 = std::min(fs.lambda0, fs.lambdas[j]);
    }
  }
  for (int j : fs.gamma) {
    if (fs.lambdas[j] == fs.lambda0) {
      fs.z0.push_back(j);
      fs.z0_radii.push_back(sites[j].radius);
    }
  }
  return fs;
}

template <typename Scalar>
struct ExpansionFit {
  Scalar c_mu_ref = 0;
  Scalar p0_hat = 0;
  Scalar lambda0_hat = 0;
  Scalar r_squared = 0;
  std::vector<std::pair<Scalar, Scalar>> points_used;  // (eps, c_eps), eps decreasing
};

/// Regresses log(c_eps/eps^N - c_mu) on log(eps) over the (up to) four
/// smallest eps: slope p0_hat, intercept log(lambda0_hat / 2).
template <typename Scalar>
ExpansionFit<Scalar> fit_energy_expansion(std::vector<std::pair<Scalar, Scalar>> samples,
                                          Scalar c_mu, int dim) {
  if (samples.size() < 3) {
    throw Error(ErrorCode::kInvalidArgument, "expansion fit needs at least 3 samples");
  }
  std::sort(samples.begin(), samples.end(),
            [](const auto& a, const auto& b) { return a.first > b.first; });
  for (std::size_t k = 0; k < samples.size(); ++k) {
    if (!(samples[k].first > 0)) throw Error(ErrorCode::kInvalidArgument, "eps must be positive");
    if (k > 0 && !(samples[k].first < samples[k - 1].first)) {
      throw Error(ErrorCode::kInvalidArgument, "eps values must be distinct");
    }
  }
  if (samples.size() > 4) samples.erase(samples.begin(), samples.end() - 4);

  std::vector<Scalar> xs, ys;
  for (const auto& [eps, c] : samples) {
    const Scalar excess = c / std::pow(eps, Scalar(dim)) - c_mu;
    if (!(excess > 0)) {
      throw Error(ErrorCode::kNonpositiveExcess,
                  "c_eps/eps^N <= c_mu: sample is under-resolved");
    }
    xs.push_back(std::log(eps));
    ys.push_back(std::log(excess));
  }
  const Scalar n = Scalar(xs.size());
  Scalar mx = 0, my = 0;
  for (std::size_t k = 0; k < xs.size(); ++k) {
    mx += xs[k];
    my += ys[k];
  }
  mx /= n;
  my /= n;
  Scalar sxx = 0, sxy = 0, syy = 0;
  for (std::size_t k = 0; k < xs.size(); ++k) {
    sxx += (xs[k] - mx) * (xs[k] - mx);
    sxy += (xs[k] - mx) * (ys[k] - my);
    syy += (ys[k] - my) * (ys[k] - my);
  }
  ExpansionFit<Scalar> fit;
  fit.c_mu_ref = c_mu;
  fit.p0_hat = sxy / sxx;
  fit.lambda0_hat = 2 * std::exp(my - fit.p0_hat * mx);
  fit.r_squared = syy > 0 ? sxy * sxy / (sxx * syy) : Scalar(1);
  fit.points_used = std::move(samples);
  return fit;
}

/// Drift of each peak from the concentration set divided by eps: distance to
/// `point` for wells, ||x| - radius| for rings.
template <typename Scalar>
std::vector<std::pair<Scalar, Scalar>> concentration_rate(
    const std::vector<SolveReport<Scalar>>& reports, const std::type_identity_t<Point<Scalar>>& point) {
  std::vector<std::pair<Scalar, Scalar>> out;
  for (const auto& r : reports) {
    if (r.peak.size() != point.size()) continue;
    out.emplace_back(r.eps, (r.peak - point).norm() / r.eps);
  }
  return out;
}

template <typename Scalar>
std::vector<std::pair<Scalar, Scalar>> concentration_rate(
    const std::vector<SolveReport<Scalar>>& reports, Scalar radius) {
  std::vector<std::pair<Scalar, Scalar>> out;
  for (const auto& r : reports) {
    if (r.peak.size() == 0) continue;
    out.emplace_back(r.eps, std::abs(r.peak.norm() - radius) / r.eps);
  }
  return out;
}

}  // namespace gpe

#endif  // GPE_PEAKS_ASYMPTOTICS_HPP

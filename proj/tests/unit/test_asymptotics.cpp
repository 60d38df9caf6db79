#include <algorithm>
#include <cmath>
#include <numbers>

#include "doctest.h"
#include "gpe_peaks/asymptotics.hpp"
#include "gpe_peaks/solver.hpp"

using gpe::ErrorCode;
using Point = gpe::Point<double>;
using Spec = gpe::PotentialSpec<double>;
using Site = gpe::MinimumSite<double>;

namespace {

constexpr double kPi2 = std::numbers::pi * std::numbers::pi;

template <typename Fn>
ErrorCode code_of(Fn&& fn) {
  try {
    fn();
  } catch (const gpe::Error& e) {
    return e.code();
  }
  FAIL("expected gpe::Error");
  return ErrorCode::kInvalidArgument;
}

const gpe::RadialProfile<double>& profile(int dim) {
  static const gpe::RadialProfile<double> p[3] = {gpe::solve_radial_profile<double>(1),
                                                  gpe::solve_radial_profile<double>(2),
                                                  gpe::solve_radial_profile<double>(3)};
  return p[dim - 1];
}

Site ring_site(double radius, double b1, double p1, double b2, double p2, int dim = 1) {
  Site s;
  s.ring = true;
  s.radius = radius;
  s.location = Point::Zero(dim);
  s.location[0] = radius;
  s.b1 = b1;
  s.p1 = p1;
  s.b2 = b2;
  s.p2 = p2;
  return s;
}

gpe::SolveReport<double> report_at(double eps, const Point& peak) {
  gpe::SolveReport<double> r;
  r.eps = eps;
  r.peak = peak;
  return r;
}

}  // namespace

TEST_CASE("lambda_bar examples") {
  const gpe::GpeParams<double> params;  // a = (1, 1), beta = 2, mu = 1
  CHECK(gpe::lambda_bar(ring_site(2, 1, 2, 1, 2), params, profile(1)) ==
        doctest::Approx(2 * kPi2 / 9).epsilon(1e-6));
  CHECK(gpe::lambda_bar(ring_site(2, 1, 2, 1, 4), params, profile(1)) ==
        doctest::Approx(kPi2 / 9).epsilon(1e-6));
  // Mirror case: only the second component's term survives.
  CHECK(gpe::lambda_bar(ring_site(2, 1, 4, 3, 2), params, profile(1)) ==
        doctest::Approx(3 * kPi2 / 9).epsilon(1e-6));
  const double base = gpe::lambda_bar(ring_site(2, 1, 2, 1, 2), params, profile(1));
  CHECK(gpe::lambda_bar(ring_site(2, 10, 2, 10, 2), params, profile(1)) ==
        doctest::Approx(10 * base).epsilon(1e-12));
}

TEST_CASE("lambda_bar case boundary is discontinuous by exactly the second term") {
  gpe::GpeParams<double> params;
  params.a2 = 1.5;
  params.beta = 2.5;
  const auto [g1, g2] = gpe::coupling_gammas(params);
  for (int dim = 1; dim <= 3; ++dim) {
    const double equal = gpe::lambda_bar(ring_site(2, 1.3, 2, 0.7, 2, dim), params, profile(dim));
    const double below = gpe::lambda_bar(ring_site(2, 1.3, 2, 0.7, 2 + 1e-12, dim), params, profile(dim));
    const double moment = gpe::scalar_moment(profile(dim), 2.0);
    CHECK(equal - below == doctest::Approx(g2 * 0.7 * moment).epsilon(1e-8));
  }
}

TEST_CASE("lambda_bar mu scaling") {
  gpe::GpeParams<double> params;
  for (int dim = 1; dim <= 3; ++dim) {
    for (double p : {2.0, 3.0}) {
      params.mu = 1;
      const double at1 = gpe::lambda_bar(ring_site(2, 1, p, 1, p, dim), params, profile(dim));
      params.mu = 4;
      const double at4 = gpe::lambda_bar(ring_site(2, 1, p, 1, p, dim), params, profile(dim));
      CHECK(at4 / at1 == doctest::Approx(std::pow(4.0, 1 - (dim + p) / 2)).epsilon(1e-12));
    }
  }
}

TEST_CASE("lambda_bar for wells uses the radial moment") {
  const gpe::GpeParams<double> params;
  Site well = ring_site(0, 1, 2, 1, 2, 2);
  well.ring = false;
  const double radial = gpe::lambda_bar(well, params, profile(2));
  const double normal = gpe::lambda_bar(ring_site(2, 1, 2, 1, 2, 2), params, profile(2));
  // In 2D, int |x|^2 w^2 = 2 int x_2^2 w^2.
  CHECK(radial == doctest::Approx(2 * normal).epsilon(1e-10));
  Site well1 = ring_site(0, 1, 2, 1, 2, 1);
  well1.ring = false;
  CHECK(gpe::lambda_bar(well1, params, profile(1)) == doctest::Approx(2 * kPi2 / 9).epsilon(1e-6));
}

TEST_CASE("lambda_bar guards") {
  gpe::GpeParams<double> params;
  params.beta = 1;
  CHECK(code_of([&] { gpe::lambda_bar(ring_site(2, 1, 2, 1, 2), params, profile(1)); }) ==
        ErrorCode::kGammaNonpositive);
  CHECK(code_of([&] { gpe::lambda_bar(ring_site(2, 1, 1, 1, 2), gpe::GpeParams<double>{}, profile(1)); }) ==
        ErrorCode::kInvalidArgument);
}

TEST_CASE("minimum sites from potentials") {
  const auto v1 = Spec::ring(1.0, {{2.0, 1.0, 2.0}, {4.0, 2.0, 3.0}}, 0.5, 1.0);
  const auto v2 = Spec::ring(1.0, {{4.0, 1.0, 2.0}, {2.0, 3.0, 2.0}}, 0.5, 1.0);
  const auto sites = gpe::minimum_sites(v1, v2, 2);
  REQUIRE(sites.size() == 2);
  CHECK(sites[0].radius == 2.0);
  CHECK(sites[0].b2 == 3.0);
  CHECK(sites[1].p1 == 3.0);
  CHECK(sites[1].p2 == 2.0);
  CHECK(sites[1].location[0] == 4.0);

  const auto other = Spec::ring(1.0, {{3.0, 1.0, 2.0}}, 0.5, 1.0);
  CHECK(code_of([&] { gpe::minimum_sites(v1, other, 2); }) == ErrorCode::kInvalidArgument);
  const auto w1 = Spec::polynomial_well(1.0, Point::Zero(2), 1.0, 2.0);
  const auto w2 = Spec::polynomial_well(1.0, Point::Ones(2), 1.0, 2.0);
  CHECK(code_of([&] { gpe::minimum_sites(w1, w2, 2); }) == ErrorCode::kInvalidArgument);
  CHECK(code_of([&] { gpe::minimum_sites(w1, v1, 2); }) == ErrorCode::kInvalidArgument);
}

TEST_CASE("flattest set examples") {
  const gpe::GpeParams<double> params;
  {
    const auto fs = gpe::flattest_set<double>({ring_site(1, 1, 2, 1, 2), ring_site(3, 1, 4, 1, 4)},
                                              params, profile(1));
    CHECK(fs.p0 == 4.0);
    CHECK(fs.gamma == std::vector<int>{1});
    CHECK(fs.z0_radii == std::vector<double>{3.0});
  }
  {
    // lambda_bar = (2 pi^2/9, pi^2/9).
    const auto fs = gpe::flattest_set<double>({ring_site(1, 1, 2, 1, 2), ring_site(3, 1, 2, 1, 4)},
                                              params, profile(1));
    CHECK(fs.p0 == 2.0);
    CHECK(fs.gamma == std::vector<int>{0, 1});
    CHECK(fs.lambda0 == doctest::Approx(kPi2 / 9).epsilon(1e-6));
    CHECK(fs.z0_radii == std::vector<double>{3.0});
  }
  {
    const auto fs = gpe::flattest_set<double>({ring_site(2, 1, 2, 1, 2)}, params, profile(1));
    CHECK(fs.z0_radii == std::vector<double>{2.0});
  }
  CHECK(code_of([&] { gpe::flattest_set<double>({}, params, profile(1)); }) == ErrorCode::kInvalidArgument);
}

TEST_CASE("flattest set is invariant under ring permutations") {
  const gpe::GpeParams<double> params;
  std::vector<Site> sites = {ring_site(1, 1, 2, 1, 2, 2), ring_site(2, 0.5, 3, 1, 3, 2),
                             ring_site(3, 2, 3, 1, 4, 2), ring_site(4, 0.5, 3, 1, 3, 2)};
  std::sort(sites.begin(), sites.end(), [](const Site& a, const Site& b) { return a.radius < b.radius; });
  const auto ref = gpe::flattest_set(sites, params, profile(2));
  std::vector<double> ref_radii = ref.z0_radii;
  std::sort(ref_radii.begin(), ref_radii.end());
  CHECK(ref_radii == std::vector<double>{2.0, 4.0});
  do {
    const auto fs = gpe::flattest_set(sites, params, profile(2));
    std::vector<double> radii = fs.z0_radii;
    std::sort(radii.begin(), radii.end());
    CHECK(fs.p0 == ref.p0);
    CHECK(fs.lambda0 == ref.lambda0);
    CHECK(radii == ref_radii);
  } while (std::next_permutation(sites.begin(), sites.end(),
                                 [](const Site& a, const Site& b) { return a.radius < b.radius; }));
}

TEST_CASE("expansion fit recovers synthetic power laws") {
  for (int dim = 1; dim <= 3; ++dim) {
    std::vector<std::pair<double, double>> samples;
    for (double eps : {0.4, 0.3, 0.2, 0.1, 0.05}) {
      samples.emplace_back(eps, std::pow(eps, dim) * (0.8 + 1.5 * eps * eps));
    }
    const auto fit = gpe::fit_energy_expansion(samples, 0.8, dim);
    CHECK(std::abs(fit.p0_hat - 2) <= 1e-6);
    CHECK(std::abs(fit.lambda0_hat - 3) <= 1e-6);
    CHECK(1 - fit.r_squared < 1e-10);
    REQUIRE(fit.points_used.size() == 4);
    CHECK(fit.points_used.front().first == 0.3);
    CHECK(fit.points_used.back().first == 0.05);
  }
}

TEST_CASE("expansion fit guards") {
  CHECK(code_of([] { gpe::fit_energy_expansion<double>({{0.2, 1.0}, {0.1, 1.0}}, 0.5, 1); }) ==
        ErrorCode::kInvalidArgument);
  CHECK(code_of([] { gpe::fit_energy_expansion<double>({{0.2, 1.0}, {0.2, 1.0}, {0.1, 1.0}}, 0.5, 1); }) ==
        ErrorCode::kInvalidArgument);
  // c_eps / eps = 0.8 at eps = 0.1, not above c_mu = 0.9.
  CHECK(code_of([] {
          gpe::fit_energy_expansion<double>({{0.3, 0.3}, {0.2, 0.2}, {0.1, 0.08}}, 0.9, 1);
        }) == ErrorCode::kNonpositiveExcess);
}

TEST_CASE("concentration rates") {
  const Point z = Point::Zero(2);
  Point p(2);
  p << 0.03, -0.04;
  const auto rates = gpe::concentration_rate<double>({report_at(0.2, z), report_at(0.1, p)}, z);
  REQUIRE(rates.size() == 2);
  CHECK(rates[0].second == 0.0);
  CHECK(rates[1].second == doctest::Approx(0.5));

  Point on_ring(2);
  on_ring << 0.0, 2.0;
  Point off_ring(2);
  off_ring << 2.1, 0.0;
  const auto ring_rates = gpe::concentration_rate<double>({report_at(0.4, on_ring), report_at(0.2, off_ring)}, 2.0);
  CHECK(ring_rates[0].second == 0.0);
  CHECK(ring_rates[1].second == doctest::Approx(0.5));
}

TEST_CASE("peak drift of a skewed well shrinks faster than eps") {
  gpe::GpeParams<double> params;
  const auto v = Spec::polynomial_well(1.0, Point::Zero(1), 1.0, 2.0, 1.5);
  const gpe::Problem<double> prob(params, v, v, gpe::build_grid(1, 12.0, 481),
                                  gpe::Frame<double>::blowup(Point::Zero(1)));
  const auto reps = gpe::continuation_sweep(prob, profile(1), {0.4, 0.2, 0.1});
  for (const auto& r : reps) REQUIRE(r.converged);
  const auto rates = gpe::concentration_rate(reps, Point::Zero(1));
  CHECK(rates[0].second > rates[1].second);
  CHECK(rates[1].second > rates[2].second);
  CHECK(rates[2].second <= 0.2);
  CHECK(rates[2].second > 0);
}

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>

#include "doctest.h"
#include "gpe_peaks/grid.hpp"
#include "gpe_peaks/potentials.hpp"

using gpe::ErrorCode;
using Point = gpe::Point<double>;
using Spec = gpe::PotentialSpec<double>;

namespace {

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

Point pt(std::initializer_list<double> xs) {
  Point p(static_cast<Eigen::Index>(xs.size()));
  int k = 0;
  for (double x : xs) p[k++] = x;
  return p;
}

Spec simple_ring() { return Spec::ring(1.0, {{2.0, 1.0, 2.0}}, 1.0, 1.0); }

Point central_difference(const Spec& v, const Point& x, double h) {
  Point g(x.size());
  for (int a = 0; a < x.size(); ++a) {
    Point xp = x, xm = x;
    xp[a] += h;
    xm[a] -= h;
    g[a] = (gpe::eval_potential(v, xp) - gpe::eval_potential(v, xm)) / (2 * h);
  }
  return g;
}

Eigen::Matrix2d random_orthogonal(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> angle(0, 2 * M_PI);
  const double t = angle(rng);
  Eigen::Matrix2d q;
  q << std::cos(t), -std::sin(t), std::sin(t), std::cos(t);
  if (rng() % 2) q.col(1) *= -1;
  return q;
}

}  // namespace

TEST_CASE("eval_potential examples") {
  CHECK(gpe::eval_potential(Spec::constant(1.0), pt({3.0, -1.0})) == 1.0);
  const auto well = Spec::polynomial_well(1.0, Point::Zero(2), 1.0, 2.0);
  CHECK(gpe::eval_potential(well, pt({2.0, 0.0})) == doctest::Approx(5.0).epsilon(1e-15));
  const auto ring = simple_ring();
  CHECK(gpe::eval_potential(ring, pt({2.0, 0.0})) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(gpe::eval_potential(ring, pt({2.25, 0.0})) == doctest::Approx(1.0625).epsilon(1e-15));
  CHECK(gpe::eval_potential(ring, pt({0.0, -2.25})) == doctest::Approx(1.0625).epsilon(1e-15));
  // Outside every bump the plateau mu + plateau applies.
  CHECK(gpe::eval_potential(ring, pt({0.5, 0.0})) == doctest::Approx(2.0));
  CHECK(gpe::eval_potential(ring, pt({4.0, 0.0})) == doctest::Approx(2.0));
}

TEST_CASE("potential_gradient examples") {
  CHECK(gpe::potential_gradient(Spec::constant(1.0), pt({1.0, 2.0})).norm() == 0.0);
  const auto well = Spec::polynomial_well(1.0, Point::Zero(2), 1.0, 2.0);
  const Point g = gpe::potential_gradient(well, pt({1.5, -0.5}));
  CHECK(g[0] == doctest::Approx(3.0));
  CHECK(g[1] == doctest::Approx(-1.0));

  const auto ring = simple_ring();
  const Point x = pt({2.25, 0.0});
  const Point gr = gpe::potential_gradient(ring, x);
  CHECK(gr[0] == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(std::abs(gr[1]) <= 1e-15);
  CHECK((gr - central_difference(ring, x, 1e-4)).norm() <= 1e-6);
}

TEST_CASE("analytic gradients agree with central differences at second order") {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-3.5, 3.5);
  const std::vector<Spec> specs = {
      Spec::polynomial_well(1.0, pt({0.3, -0.2}), 1.5, 2.0),
      Spec::polynomial_well(2.0, pt({0.0, 0.0}), 1.0, 3.0, 0.5),
      Spec::polynomial_well(1.0, pt({0.0, 0.0}), 1.0, 2.5),
      Spec::ring(1.0, {{2.0, 1.0, 2.0}}, 1.0, 1.0),
      Spec::ring(1.0, {{1.5, 2.0, 3.0}, {3.0, 1.0, 2.0}}, 0.7, 0.5),
  };
  for (const auto& v : specs) {
    for (int k = 0; k < 50; ++k) {
      const Point x = pt({u(rng), u(rng)});
      const Point exact = gpe::potential_gradient(v, x);
      const Point fd1 = central_difference(v, x, 1e-3);
      const Point fd2 = central_difference(v, x, 5e-4);
      const double e1 = (fd1 - exact).norm(), e2 = (fd2 - exact).norm();
      // Second order: halving h divides the error by about 4 (or both are tiny).
      CHECK((e2 <= 1e-7 || e2 <= 0.3 * e1));
      CHECK(e1 <= 1e-4 * std::max(1.0, exact.norm()));
    }
  }
}

TEST_CASE("ring potential is radial and exact inside the inner band") {
  const auto ring = Spec::ring(1.0, {{1.5, 2.0, 3.0}, {3.0, 1.0, 2.0}}, 0.7, 0.5);
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> u(-4, 4);
  for (int k = 0; k < 200; ++k) {
    const Point x = pt({u(rng), u(rng)});
    const Point qx = random_orthogonal(rng) * x;
    CHECK(std::abs(gpe::eval_potential(ring, qx) - gpe::eval_potential(ring, x)) <= 1e-12);
  }
  std::uniform_real_distribution<double> d(-0.35, 0.35);
  for (int k = 0; k < 100; ++k) {
    const double s = d(rng);
    const double r1 = 1.5 + s, r2 = 3.0 + s;
    CHECK(std::abs(gpe::eval_potential(ring, pt({r1, 0.0})) - 1.0 - 2.0 * std::pow(std::abs(s), 3.0)) <= 1e-14);
    CHECK(std::abs(gpe::eval_potential(ring, pt({0.0, r2})) - 1.0 - s * s) <= 1e-14);
  }
}

TEST_CASE("potentials stay above mu and attain it at the declared minima") {
  const std::vector<Spec> specs = {
      Spec::polynomial_well(1.0, pt({0.5, -0.5}), 1.0, 2.0),
      Spec::polynomial_well(1.0, pt({0.0, 0.0}), 1.0, 2.0, 0.9),
      Spec::ring(1.0, {{2.0, 1.0, 2.0}}, 1.0, 1.0),
  };
  const auto g = gpe::build_grid(2, 4.0, 161);
  const double h = g.spacing();
  for (const auto& v : specs) {
    double vmin = 1e300;
    Point argmin;
    for (Eigen::Index l = 0; l < g.size(); ++l) {
      const double val = gpe::eval_potential(v, g.point(l));
      CHECK(val >= v.mu() - 1e-14);
      if (val < vmin) {
        vmin = val;
        argmin = g.point(l);
      }
    }
    const auto minima = gpe::declared_minima(v, 2);
    REQUIRE(!minima.empty());
    for (const auto& z : minima) CHECK(gpe::eval_potential(v, z) == doctest::Approx(v.mu()));
    // Local Lipschitz bound of V near the minimum times h.
    CHECK(vmin - v.mu() <= 4 * h * h + 1e-14);
    if (v.kind() == gpe::PotentialKind::kRing) {
      CHECK(std::abs(argmin.norm() - 2.0) <= h);
    } else {
      CHECK((argmin - minima[0]).norm() <= h);
    }
    // Box boundary stays above mu.
    CHECK(gpe::eval_potential(v, pt({4.0, 4.0})) > v.mu());
  }
}

TEST_CASE("non-differentiable points are rejected") {
  const auto well = Spec::polynomial_well(1.0, Point::Zero(2), 1.0, 1.5);
  CHECK(code_of([&] { gpe::potential_gradient(well, Point::Zero(2).eval()); }) ==
        ErrorCode::kNonDifferentiable);
  CHECK_NOTHROW(gpe::potential_gradient(well, pt({0.1, 0.0})));
  const auto ring = Spec::ring(1.0, {{2.0, 1.0, 1.5}}, 1.0, 1.0);
  CHECK(code_of([&] { gpe::potential_gradient(ring, pt({0.0, 2.0})); }) ==
        ErrorCode::kNonDifferentiable);
  // p >= 2 is differentiable at the minimum.
  CHECK(gpe::potential_gradient(simple_ring(), pt({2.0, 0.0})).norm() == 0.0);
}

TEST_CASE("constructor validation") {
  CHECK(code_of([] { Spec::constant(0.0); }) == ErrorCode::kInvalidArgument);
  CHECK(code_of([] { Spec::polynomial_well(1.0, Point::Zero(1), 1.0, 1.0); }) ==
        ErrorCode::kInvalidArgument);
  CHECK(code_of([] { Spec::polynomial_well(1.0, Point::Zero(1), -1.0, 2.0); }) ==
        ErrorCode::kInvalidArgument);
  CHECK(code_of([] { Spec::polynomial_well(1.0, Point::Zero(1), 1.0, 4.0, 0.1); }) ==
        ErrorCode::kInvalidArgument);
  // s = 1/2 for p = 2: |skew| (1/2)^(1/2) e^(-1/2) < m allows |skew| < 2.33.
  CHECK_NOTHROW(Spec::polynomial_well(1.0, Point::Zero(1), 1.0, 2.0, 2.3));
  CHECK(code_of([] { Spec::polynomial_well(1.0, Point::Zero(1), 1.0, 2.0, 2.4); }) ==
        ErrorCode::kInvalidArgument);
  CHECK(code_of([] { Spec::ring(1.0, {}, 1.0, 1.0); }) == ErrorCode::kInvalidArgument);
  CHECK(code_of([] { Spec::ring(1.0, {{2.0, 1.0, 2.0}, {2.0, 1.0, 2.0}}, 0.5, 1.0); }) ==
        ErrorCode::kInvalidArgument);
  CHECK(code_of([] { Spec::ring(1.0, {{2.0, 1.0, 2.0}, {2.5, 1.0, 2.0}}, 0.5, 1.0); }) ==
        ErrorCode::kInvalidArgument);
  CHECK(code_of([] { Spec::ring(1.0, {{2.0, 1.0, 1.0}}, 0.5, 1.0); }) ==
        ErrorCode::kInvalidArgument);
  CHECK(code_of([] { Spec::ring(1.0, {{0.5, 1.0, 2.0}}, 1.0, 1.0); }) ==
        ErrorCode::kInvalidArgument);
  CHECK(code_of([] {
          gpe::Vec<double> v(2);
          v << 0.5, 2.0;
          Spec::tabulated(1.0, {{0.0, 1.0}}, v);
        }) == ErrorCode::kInvalidArgument);
}

TEST_CASE("skewed well keeps its unique minimum at the centre") {
  const auto v = Spec::polynomial_well(1.0, Point::Zero(1), 1.0, 2.0, 2.0);
  for (double x = -3; x <= 3; x += 1e-3) {
    if (std::abs(x) < 1e-9) continue;
    CHECK(gpe::eval_potential(v, pt({x})) > 1.0);
  }
  // The skew really breaks reflection symmetry.
  CHECK(gpe::eval_potential(v, pt({0.5})) != gpe::eval_potential(v, pt({-0.5})));
}

TEST_CASE("tabulated potentials interpolate, extrapolation is an error") {
  gpe::Vec<double> values(6);
  values << 2.0, 1.0, 3.0, 4.0, 2.0, 5.0;  // axes x0 in {0,1}, x1 in {0,1,2}
  const auto tab = Spec::tabulated(1.0, {{0.0, 1.0}, {0.0, 1.0, 2.0}}, values);
  CHECK(gpe::eval_potential(tab, pt({0.0, 1.0})) == doctest::Approx(1.0));
  CHECK(gpe::eval_potential(tab, pt({0.5, 0.5})) == doctest::Approx((2 + 1 + 4 + 2) / 4.0));
  const Point g = gpe::potential_gradient(tab, pt({0.25, 0.5}));
  CHECK(g[0] == doctest::Approx(0.5 * (4 - 2) + 0.5 * (2 - 1)).epsilon(1e-12));
  CHECK(g[1] == doctest::Approx(0.75 * (1 - 2) + 0.25 * (2 - 4)).epsilon(1e-12));
  CHECK(code_of([&] { gpe::eval_potential(tab, pt({1.5, 0.5})); }) == ErrorCode::kExtrapolation);
  const auto mins = gpe::declared_minima(tab, 2);
  REQUIRE(mins.size() == 1);
  CHECK(mins[0][0] == 0.0);
  CHECK(mins[0][1] == 1.0);
}

TEST_CASE("tabulated CSV round trip") {
  const auto path = std::filesystem::temp_directory_path() / "gpe_peaks_tab_test.csv";
  {
    std::ofstream out(path);
    out << "x,value\n";
    for (int k = 10; k >= 0; --k) {
      const double x = -2.0 + 0.4 * k;
      out << x << "," << 1.0 + x * x << "\n";
    }
  }
  const auto tab = gpe::load_tabulated_csv<double>(path.string(), 1, 1.0);
  CHECK(gpe::eval_potential(tab, pt({0.0})) == doctest::Approx(1.0));
  CHECK(gpe::eval_potential(tab, pt({0.2})) == doctest::Approx(1.08));
  {
    std::ofstream out(path);
    out << "0,1\n1,oops\n";
  }
  CHECK(code_of([&] { gpe::load_tabulated_csv<double>(path.string(), 1, 1.0); }) ==
        ErrorCode::kParseError);
  std::filesystem::remove(path);
  CHECK(code_of([&] { gpe::load_tabulated_csv<double>(path.string(), 1, 1.0); }) ==
        ErrorCode::kIo);
}

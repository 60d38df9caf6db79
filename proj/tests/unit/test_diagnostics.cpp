#include <cmath>
#include <numbers>

#include "doctest.h"
#include "gpe_peaks/solver.hpp"

using gpe::ErrorCode;
using Point = gpe::Point<double>;
using Vec = gpe::Vec<double>;
using Spec = gpe::PotentialSpec<double>;
using State = gpe::FieldPair<double>;
using Problem = gpe::Problem<double>;
using Frame = gpe::Frame<double>;
using Grid = gpe::Grid<double>;

namespace {

constexpr double kPi = std::numbers::pi;

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

Point pt(std::initializer_list<double> xs) {
  Point p(static_cast<Eigen::Index>(xs.size()));
  int k = 0;
  for (double x : xs) p[k++] = x;
  return p;
}

template <typename Fn>
State synthetic(const Grid& g, Fn&& fn, double ratio = 0.5) {
  auto s = State::zeros(g);
  gpe::for_each_interior(g, [&](Eigen::Index l) {
    const double v = fn(g.point(l));
    s.u1(l) = v;
    s.u2(l) = ratio * v;
  });
  return s;
}

Problem constant_problem(const Grid& g, double mu = 1) {
  gpe::GpeParams<double> params;
  params.mu = mu;
  const auto v = Spec::constant(mu);
  return {params, v, v, g, Frame::blowup(Point::Zero(g.dim()))};
}

// 1D skewed quadratic well in rescaled coordinates, solved to tight tolerance.
gpe::SolveReport<double> skew_well_solution(int n, double eps) {
  gpe::GpeParams<double> params;
  params.eps = eps;
  params.a2 = 1.5;
  params.beta = 2.5;
  const auto v1 = Spec::polynomial_well(1.0, Point::Zero(1), 1.0, 2.0, 1.0);
  const auto v2 = Spec::polynomial_well(1.0, Point::Zero(1), 2.0, 2.0);
  const Problem prob(params, v1, v2, gpe::build_grid(1, 12.0, n), Frame::blowup(Point::Zero(1)));
  gpe::SolverOptions<double> opts;
  opts.grad_tol = 1e-10;
  return gpe::solve_ground_state(prob, gpe::default_init(prob, profile(1), gpe::InitMode::kExplicitAtMinimum), opts);
}

Problem skew_problem(const gpe::SolveReport<double>& rep) {
  gpe::GpeParams<double> params;
  params.eps = rep.eps;
  params.a2 = 1.5;
  params.beta = 2.5;
  const auto v1 = Spec::polynomial_well(1.0, Point::Zero(1), 1.0, 2.0, 1.0);
  const auto v2 = Spec::polynomial_well(1.0, Point::Zero(1), 2.0, 2.0);
  return {params, v1, v2, rep.state.grid, rep.frame};
}

}  // namespace

TEST_CASE("pde residual") {
  const auto g = gpe::build_grid(1, 20.0, 401);
  const auto prob = constant_problem(g);
  const auto zero = gpe::pde_residual(prob, State::zeros(g));
  CHECK(zero.sup == 0.0);
  CHECK(zero.l2 == 0.0);

  std::vector<double> sups;
  for (int n : {401, 801, 1601}) {
    const auto gn = gpe::build_grid(1, 20.0, n);
    const auto ex = gpe::coupled_explicit_state(constant_problem(gn).params(), profile(1), gn, Point::Zero(1));
    const auto r = gpe::pde_residual(constant_problem(gn), ex.state);
    CHECK(r.sup <= gn.spacing() * gn.spacing());
    CHECK(r.l2 <= r.sup * std::sqrt(40.0));
    sups.push_back(r.sup);
  }
  CHECK(sups[0] / sups[1] == doctest::Approx(4.0).epsilon(0.05));
  CHECK(sups[1] / sups[2] == doctest::Approx(4.0).epsilon(0.05));
}

TEST_CASE("Gauss-Legendre rule") {
  const auto [x, w] = gpe::gauss_legendre<double>(6);
  CHECK(w.sum() == doctest::Approx(2.0).epsilon(1e-14));
  for (int deg = 0; deg <= 11; ++deg) {
    const double exact = deg % 2 ? 0.0 : 2.0 / (deg + 1);
    CHECK(std::abs((w.array() * x.array().pow(deg)).sum() - exact) <= 1e-14);
  }
}

TEST_CASE("Pohozaev identity with constant potential") {
  for (int n : {401, 801}) {
    const auto g = gpe::build_grid(1, 20.0, n);
    const auto prob = constant_problem(g);
    const auto rep = gpe::solve_ground_state(prob, gpe::default_init(prob, profile(1), gpe::InitMode::kExplicitAtMinimum));
    REQUIRE(rep.converged);
    const auto poh = gpe::pohozaev_residual(prob, rep.state, pt({0.7}), 2.0, 0);
    CHECK(poh.volume_term == 0.0);
    CHECK(poh.defect == doctest::Approx(std::abs(poh.boundary_term)));
    CHECK(poh.defect <= g.spacing() * g.spacing());
  }
  // 2D: same statement with a circle.
  const auto g2 = gpe::build_grid(2, 10.0, 201);
  const auto prob2 = constant_problem(g2);
  const auto rep2 = gpe::solve_ground_state(prob2, gpe::default_init(prob2, profile(2), gpe::InitMode::kExplicitAtMinimum));
  REQUIRE(rep2.converged);
  const auto poh2 = gpe::pohozaev_residual(prob2, rep2.state, pt({0.5, -0.3}), 2.5, 1);
  CHECK(poh2.volume_term == 0.0);
  CHECK(poh2.defect <= 2 * g2.spacing() * g2.spacing());
}

TEST_CASE("Pohozaev defect converges at second order for a skewed well") {
  std::vector<double> defects;
  for (int n : {241, 481, 961}) {
    const auto rep = skew_well_solution(n, 0.5);
    REQUIRE(rep.converged);
    const auto poh = gpe::pohozaev_residual(skew_problem(rep), rep.state, pt({0.4}), 1.3, 0);
    CHECK(poh.defect >= 0);
    CHECK(std::abs(poh.volume_term) > 1e-3);
    defects.push_back(poh.defect);
  }
  CHECK(std::log2(defects[0] / defects[1]) >= 1.8);
  CHECK(std::log2(defects[1] / defects[2]) >= 1.8);
}

TEST_CASE("Pohozaev volume term vanishes on a large ball") {
  const auto rep = skew_well_solution(961, 0.5);
  REQUIRE(rep.converged);
  const auto prob = skew_problem(rep);
  const auto poh = gpe::pohozaev_residual(prob, rep.state, rep.peak_grid, 9.0, 0);
  CHECK(std::abs(poh.boundary_term) <= 1e-8);
  CHECK(std::abs(poh.volume_term) <= 1e-6);
}

TEST_CASE("Pohozaev argument checks") {
  const auto g = gpe::build_grid(2, 5.0, 51);
  const auto prob = constant_problem(g);
  const auto s = gpe::coupled_explicit_state(prob.params(), profile(2), g, Point::Zero(2)).state;
  CHECK(code_of([&] { gpe::pohozaev_residual(prob, s, pt({0.0, 0.0}), 4.9, 0); }) ==
        ErrorCode::kBallOutsideGrid);
  CHECK(code_of([&] { gpe::pohozaev_residual(prob, s, pt({3.0, 0.0}), 2.0, 0); }) ==
        ErrorCode::kBallOutsideGrid);
  CHECK(code_of([&] { gpe::pohozaev_residual(prob, s, pt({0.0, 0.0}), 2.0, 2); }) ==
        ErrorCode::kInvalidArgument);

  // In 1D the volume quadrature uses the grid nodes, and the kink sits on one.
  gpe::GpeParams<double> params;
  const auto kink = Spec::polynomial_well(1.0, Point::Zero(1), 1.0, 1.5);
  const auto g1 = gpe::build_grid(1, 5.0, 51);
  const Problem kinked(params, kink, kink, g1, Frame::original(1));
  const auto s1 = gpe::coupled_explicit_state(params, profile(1), g1, Point::Zero(1)).state;
  CHECK(code_of([&] { gpe::pohozaev_residual(kinked, s1, pt({0.05}), 1.0, 0); }) ==
        ErrorCode::kNonDifferentiable);
}

TEST_CASE("detect_peak on synthetic states") {
  const auto g = gpe::build_grid(2, 6.0, 121);
  const double h = g.spacing();
  const Point c = pt({1.0, -0.5});
  const auto on_node = synthetic(g, [&](const Point& x) { return profile(2).value((x - c).norm()); });
  const auto pk = gpe::detect_peak(on_node);
  CHECK((pk.location - c).norm() <= 1e-10);
  CHECK(pk.unique);
  CHECK(pk.value == doctest::Approx(1.5 * profile(2).w0).epsilon(1e-3));

  const Point off = pt({1.0 + 0.3 * h, -0.5 - 0.4 * h});
  const auto between = synthetic(g, [&](const Point& x) { return profile(2).value((x - off).norm()); });
  CHECK((gpe::detect_peak(between).location - off).norm() <= 2 * h * h);

  const auto twin = synthetic(g, [&](const Point& x) {
    return std::exp(-(x - pt({2.0, 0.0})).squaredNorm()) + std::exp(-(x - pt({-2.0, 0.0})).squaredNorm());
  });
  CHECK(!gpe::detect_peak(twin).unique);
  // A second maximum below 90% of the peak does not count.
  const auto minor = synthetic(g, [&](const Point& x) {
    return std::exp(-(x - pt({2.0, 0.0})).squaredNorm()) + 0.8 * std::exp(-(x - pt({-2.0, 0.0})).squaredNorm());
  });
  CHECK(gpe::detect_peak(minor).unique);

  CHECK(code_of([&] { gpe::detect_peak(State::zeros(g)); }) == ErrorCode::kDegenerate);
}

TEST_CASE("detect_peak is equivariant under whole-node shifts") {
  const auto g = gpe::build_grid(2, 6.0, 121);
  const double h = g.spacing();
  const Point c = pt({0.37, 0.21});
  const auto base = gpe::detect_peak(synthetic(g, [&](const Point& x) { return profile(2).value((x - c).norm()); }));
  for (int k : {1, 5, -7}) {
    const Point ck = c + pt({k * h, -2 * k * h});
    const auto moved = gpe::detect_peak(synthetic(g, [&](const Point& x) { return profile(2).value((x - ck).norm()); }));
    CHECK(std::abs(moved.location[0] - base.location[0] - k * h) <= 1e-12);
    CHECK(std::abs(moved.location[1] - base.location[1] + 2 * k * h) <= 1e-12);
  }
}

TEST_CASE("decay rate fits") {
  const auto g = gpe::build_grid(1, 20.0, 801);
  gpe::GpeParams<double> params;
  const auto ex = gpe::coupled_explicit_state(params, profile(1), g, Point::Zero(1)).state;
  const auto fit = gpe::decay_rate_fit(ex, Point::Zero(1));
  CHECK(fit.rate == doctest::Approx(1.0).epsilon(0.1));
  CHECK(!fit.poor_fit);

  params.mu = 4;
  const auto ex4 = gpe::coupled_explicit_state(params, profile(1), g, Point::Zero(1)).state;
  CHECK(gpe::decay_rate_fit(ex4, Point::Zero(1)).rate == doctest::Approx(2.0).epsilon(0.1));

  const auto gauss = synthetic(g, [](const Point& x) { return std::exp(-x.squaredNorm() / 8); });
  const auto gfit = gpe::decay_rate_fit(gauss, Point::Zero(1));
  CHECK(gfit.poor_fit);
  CHECK(gfit.rms_residual > 0.05);

  // Width scales the band: a state of width 2 read with width 2 decays at 1/2.
  const auto wide = synthetic(g, [](const Point& x) { return std::sqrt(2.0) / std::cosh(x[0] / 2); });
  CHECK(gpe::decay_rate_fit(wide, Point::Zero(1), 2.0).rate == doctest::Approx(0.5).epsilon(0.1));

  const auto narrow = synthetic(g, [](const Point& x) { return std::exp(-40 * std::abs(x[0])); });
  CHECK(code_of([&] { gpe::decay_rate_fit(narrow, Point::Zero(1)); }) == ErrorCode::kBandBelowFloor);
}

TEST_CASE("symmetry deviation") {
  const auto g = gpe::build_grid(2, 8.0, 161);
  const auto radial = synthetic(g, [](const Point& x) { return profile(2).value(x.norm()); });
  CHECK(gpe::symmetry_deviation(radial, pt({1.0, 1.0})) <= g.spacing() * g.spacing());

  // Symmetric about the line through the origin and (2, 1).
  const Point d = pt({2.0, 1.0}).normalized();
  const auto axial = synthetic(g, [&](const Point& x) { return profile(2).value((x - 2.2 * d).norm()); });
  CHECK(gpe::symmetry_deviation(axial, pt({2.0, 1.0})) <= 1e-3);
  CHECK(gpe::symmetry_deviation(axial, pt({1.0, 0.0})) > 0.1);

  const double delta = 0.05;
  const auto perturbed = synthetic(g, [&](const Point& x) {
    const double theta = std::atan2(x[1], x[0]);
    return profile(2).value(x.norm()) * (1 + delta * std::sin(theta));
  });
  CHECK(gpe::symmetry_deviation(perturbed, pt({1.0, 0.0})) >= delta / 2);

  CHECK(code_of([&] { gpe::symmetry_deviation(radial, pt({0.0, 0.0})); }) == ErrorCode::kDegenerateAxis);
  const auto g1 = gpe::build_grid(1, 8.0, 161);
  CHECK(code_of([&] { gpe::symmetry_deviation(State::zeros(g1), pt({1.0})); }) == ErrorCode::kInvalidArgument);
}

TEST_CASE("symmetry deviation in 3D") {
  const auto g = gpe::build_grid(3, 6.0, 49);
  const Point axis = pt({1.0, 1.0, 0.5});
  const Point c = 2.0 * axis.normalized();
  const auto axial = synthetic(g, [&](const Point& x) { return std::exp(-(x - c).squaredNorm()); });
  const double sym = gpe::symmetry_deviation(axial, axis);
  CHECK(sym <= 0.05 * g.spacing() * g.spacing());
  CHECK(sym >= 0);
  CHECK(gpe::symmetry_deviation(axial, pt({0.0, 0.0, 1.0})) > 0.1);
}

TEST_CASE("rotation alignment in 2D") {
  const auto g = gpe::build_grid(2, 8.0, 161);
  const auto a = synthetic(g, [](const Point& x) {
    return 1.5 * std::exp(-(x - pt({2.0, 0.5})).squaredNorm()) +
           0.7 * std::exp(-(x - pt({-1.0, 1.5})).squaredNorm() / 2);
  });
  const double theta = 37 * kPi / 180;
  State b = State::zeros(g);
  b.u1 = gpe::rotate_values(g, a.u1, gpe::rotation_2d(theta), Point::Zero(2));
  b.u2 = gpe::rotate_values(g, a.u2, gpe::rotation_2d(theta), Point::Zero(2));
  const auto al = gpe::rotation_align(a, b, Point::Zero(2));
  CHECK(al.angles[0] * 180 / kPi == doctest::Approx(37.0).epsilon(0.5 / 37));
  CHECK(al.distance <= 1e-3);
  CHECK(gpe::relative_distance(a, b) > 0.5);

  const auto self = gpe::rotation_align(a, a, Point::Zero(2));
  CHECK(std::abs(self.angles[0]) <= 1e-5);
  CHECK(self.distance <= 1e-8);

  CHECK(code_of([&] { gpe::rotation_align(State::zeros(g), a, Point::Zero(2)); }) == ErrorCode::kDegenerate);
}

TEST_CASE("rotation alignment in 3D") {
  const auto g = gpe::build_grid(3, 6.0, 49);
  const auto a = synthetic(g, [](const Point& x) {
    return std::exp(-(x - pt({2.0, 0.0, 0.0})).squaredNorm()) +
           0.5 * std::exp(-(x - pt({1.0, 1.5, 0.0})).squaredNorm());
  });
  const Eigen::Matrix3d r = (Eigen::AngleAxisd(0.6, Eigen::Vector3d(0.2, 0.3, 1.0).normalized()) *
                             Eigen::AngleAxisd(0.9, Eigen::Vector3d::UnitX()))
                                .toRotationMatrix();
  const Eigen::MatrixXd rd = r;
  State b = State::zeros(g);
  b.u1 = gpe::rotate_values(g, a.u1, rd, Point::Zero(3));
  b.u2 = gpe::rotate_values(g, a.u2, rd, Point::Zero(3));
  const auto al = gpe::rotation_align(a, b, Point::Zero(3));
  CHECK(al.distance <= 0.02);
  CHECK((al.rotation - rd).norm() <= 0.05);
  CHECK(gpe::relative_distance(a, b) > 0.5);
}

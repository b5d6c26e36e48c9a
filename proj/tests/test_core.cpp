#include <doctest.h>

#include "invfilter/core.hpp"
#include "test_util.hpp"

using namespace invfilter;
using testutil::vec;

TEST_CASE("eval_dynamics on the single integrator") {
  const auto s = testutil::single_integrator_1d();
  CHECK(eval_dynamics(s, vec({1.0}), vec({2.0}))[0] == doctest::Approx(2.0));
}

TEST_CASE("eval_dynamics with zero control returns the drift exactly") {
  const auto s = testutil::double_integrator_drift();
  const Vector x = vec({1.0, 3.0});
  const Vector xdot = eval_dynamics(s, x, vec({0.0}));
  const Vector f = s.drift(x);
  CHECK(xdot[0] == f[0]);
  CHECK(xdot[1] == f[1]);
}

TEST_CASE("eval_dynamics combines drift and input") {
  // hand evaluation: f(1,3) = (3,0), g u = (0, 0.5)
  const auto s = testutil::double_integrator_drift();
  const Vector xdot = eval_dynamics(s, vec({1.0, 3.0}), vec({0.5}));
  CHECK(xdot[0] == doctest::Approx(3.0));
  CHECK(xdot[1] == doctest::Approx(0.5));
}

TEST_CASE("eval_dynamics rejects dimension mismatches") {
  const auto s = testutil::single_integrator_1d();
  CHECK_THROWS_AS(eval_dynamics(s, vec({1.0, 2.0}), vec({0.0})),
                  ArgumentError);
  CHECK_THROWS_AS(eval_dynamics(s, vec({1.0}), vec({0.0, 0.0})),
                  ArgumentError);
}

TEST_CASE("dynamics agree with drift plus input over a control grid") {
  const auto s = testutil::double_integrator_drift();
  const Box ubox(vec({-2.0}), vec({2.0}));
  for (const Vector& x : grid_points(Box(vec({-1, -1}), vec({1, 1})), 25)) {
    for (const Vector& u : grid_points(ubox, 9)) {
      const Vector lhs = eval_dynamics(s, x, u);
      const Vector rhs = s.drift(x) + s.input_matrix(x) * u;
      CHECK((lhs - rhs).lpNorm<Eigen::Infinity>() <= 1e-12);
    }
  }
}

TEST_CASE("lie derivatives of h(x)=x on the single integrator") {
  const auto s = testutil::single_integrator_1d();
  const auto grad = [](const Vector& x) { return Vector::Ones(x.size()); };
  const LieDerivatives lie = lie_derivatives(grad, s, vec({1.0}));
  CHECK(lie.along_drift == doctest::Approx(0.0));
  CHECK(lie.along_input[0] == doctest::Approx(1.0));
}

TEST_CASE("lie derivatives of a constant function vanish") {
  const auto s = testutil::double_integrator_drift();
  const auto grad = [](const Vector& x) { return Vector::Zero(x.size()); };
  const LieDerivatives lie = lie_derivatives(grad, s, vec({1.0, 3.0}));
  CHECK(lie.along_drift == 0.0);
  CHECK(lie.along_input[0] == 0.0);
}

TEST_CASE("lie derivatives of h = x1 + x2 on the drift system") {
  // hand evaluation: grad.f = (1,1).(3,0) = 3, grad.g = (1,1).(0,1) = 1
  const auto s = testutil::double_integrator_drift();
  const auto grad = [](const Vector& x) { return Vector::Ones(x.size()); };
  const LieDerivatives lie = lie_derivatives(grad, s, vec({1.0, 3.0}));
  CHECK(lie.along_drift == doctest::Approx(3.0));
  CHECK(lie.along_input[0] == doctest::Approx(1.0));
}

TEST_CASE("lie derivatives are linear in the gradient") {
  const auto s = testutil::double_integrator_drift();
  const Vector x = vec({0.7, -1.2});
  const auto grad = [](const Vector& p) {
    Vector g(2);
    g << 2.0 * p[0], 1.0;
    return g;
  };
  const LieDerivatives base = lie_derivatives(grad, s, x);
  for (double c : {-1.0, 2.0}) {
    const auto scaled = [&](const Vector& p) -> Vector { return c * grad(p); };
    const LieDerivatives got = lie_derivatives(scaled, s, x);
    CHECK(got.along_drift == doctest::Approx(c * base.along_drift));
    CHECK(got.along_input[0] == doctest::Approx(c * base.along_input[0]));
  }
}

TEST_CASE("class_kappa values") {
  CHECK(class_kappa(2.0, 0.0) == 0.0);
  CHECK(class_kappa(2.0, 1.0) == doctest::Approx(0.5));
  CHECK(class_kappa(4.0, -2.0) == doctest::Approx(-0.5));
  CHECK_THROWS_AS(class_kappa(0.0, 1.0), ConfigError);
  CHECK_THROWS_AS(class_kappa(-1.0, 1.0), ConfigError);
}

TEST_CASE("class_kappa is monotone on sampled pairs") {
  const double k = 3.0;
  double prev = class_kappa(k, -5.0);
  for (double y = -4.5; y <= 5.0; y += 0.5) {
    const double cur = class_kappa(k, y);
    CHECK(cur > prev);
    prev = cur;
  }
}

TEST_CASE("objective canonicalization flips GE to LE") {
  const auto v = [](const Vector& x) { return x[0]; };
  const auto g = [](const Vector& x) { return Vector::Ones(x.size()); };
  const Objective ge = Objective::greater_equal(v, g, "separation");
  CHECK(ge.original_sense() == Sense::GE);
  CHECK(ge.value(vec({3.0})) == doctest::Approx(-3.0));
  CHECK(ge.gradient(vec({3.0}))[0] == doctest::Approx(-1.0));

  const Objective le = Objective::less_equal(v, g, "time");
  CHECK(le.original_sense() == Sense::LE);
  CHECK(le.value(vec({3.0})) == doctest::Approx(3.0));
}

TEST_CASE("bound entries") {
  const Bound inf = Bound::unbounded();
  CHECK(inf.is_unbounded());
  CHECK(inf.satisfied_by(1e300));
  CHECK_THROWS_AS(inf.value(), ArgumentError);
  CHECK_THROWS_AS(Bound::of(std::numeric_limits<double>::infinity()),
                  ConfigError);

  const Bound b = Bound::of(2.0);
  CHECK(b.satisfied_by(2.0));   // ties count as satisfied
  CHECK(!b.satisfied_by(2.0 + 1e-12));
}

TEST_CASE("priority table validation") {
  const Bound inf = Bound::unbounded();
  CHECK_NOTHROW(PriorityTable({{inf, Bound::of(1.0), Bound::of(0.5)}}));
  // level 0 must be unbounded
  CHECK_THROWS_AS(PriorityTable({{Bound::of(1.0), Bound::of(0.5)}}),
                  ConfigError);
  // loosening column
  CHECK_THROWS_AS(PriorityTable({{inf, Bound::of(0.5), Bound::of(1.0)}}),
                  ConfigError);
  // finite back to unbounded loosens as well
  CHECK_THROWS_AS(PriorityTable({{inf, Bound::of(0.5), inf}}), ConfigError);
  // ragged rows
  CHECK_THROWS_AS(PriorityTable({{inf, Bound::of(1.0)}, {inf}}), ConfigError);
}

TEST_CASE("box validation and membership") {
  CHECK_THROWS_AS(Box(vec({1.0}), vec({0.0})), ConfigError);
  CHECK_THROWS_AS(Box(vec({0.0, 0.0}), vec({1.0})), ConfigError);
  const Box b(vec({-1.0, 0.0}), vec({1.0, 2.0}));
  CHECK(b.contains(vec({0.0, 1.0})));
  CHECK(!b.contains(vec({0.0, 2.5})));
  CHECK(b.contains(vec({1.0 + 1e-10, 1.0}), 1e-9));
}

TEST_CASE("halfspace slack and zero-normal classification") {
  Halfspace ge{vec({1.0}), -0.5, Sense::GE};  // u >= -0.5
  CHECK(ge.slack(vec({0.0})) == doctest::Approx(0.5));
  CHECK(ge.satisfied(vec({-0.5})));
  CHECK(!ge.satisfied(vec({-0.6})));

  Halfspace degenerate{vec({0.0}), 1.0, Sense::GE};  // 0 >= 1
  CHECK(degenerate.has_zero_normal());
  CHECK(degenerate.vacuously_infeasible());
  Halfspace vacuous{vec({0.0}), 1.0, Sense::LE};  // 0 <= 1
  CHECK(!vacuous.vacuously_infeasible());
}

TEST_CASE("gradient check accepts correct gradients and flags wrong ones") {
  const auto f = [](const Vector& x) { return x[0] * x[0] + x[1]; };
  const auto good = [](const Vector& x) {
    Vector g(2);
    g << 2.0 * x[0], 1.0;
    return g;
  };
  const auto bad = [](const Vector& x) {
    Vector g(2);
    g << 2.0 * x[0] + 0.25, 1.0;
    return g;
  };
  const auto pts = grid_points(Box(vec({-1, -1}), vec({1, 1})), 16);
  CHECK(check_gradient(f, good, pts).pass);
  CHECK(!check_gradient(f, bad, pts).pass);
}

#include <doctest.h>

#include <random>

#include "invfilter/equivalence.hpp"
#include "test_util.hpp"

using namespace invfilter;
using testutil::vec;

namespace {

BarrierSpec barrier_identity(double k) {
  BarrierSpec b;
  b.h = [](const Vector& x) { return x[0]; };
  b.grad_h = [](const Vector& x) { return Vector::Ones(x.size()); };
  b.k_gain = k;
  b.domain = Box(vec({-2.0}), vec({2.0}));
  return b;
}

BarrierSpec barrier_sum_2d(double k) {
  BarrierSpec b;
  b.h = [](const Vector& x) { return x[0] + x[1]; };
  b.grad_h = [](const Vector& x) { return Vector::Ones(x.size()); };
  b.k_gain = k;
  b.domain = Box(vec({-2, -2}), vec({2, 2}));
  return b;
}

}  // namespace

TEST_CASE("reduction mirrors the barrier with a single zero bound") {
  const BclfProblem reduced = reduce_cbf_to_bclf(barrier_identity(2.0));
  REQUIRE(reduced.objectives().size() == 1);
  CHECK(reduced.k_gain() == 2.0);
  CHECK(reduced.table().top_level() == 1);
  CHECK(reduced.table().at(0, 0).is_unbounded());
  CHECK(reduced.table().at(0, 1).value() == 0.0);
  CHECK(reduced.objectives()[0].value(vec({1.5})) == doctest::Approx(-1.5));
  CHECK(reduced.objectives()[0].gradient(vec({1.5}))[0] ==
        doctest::Approx(-1.0));
}

TEST_CASE("reduction of a constant barrier is the negated constant") {
  BarrierSpec b = barrier_identity(1.0);
  b.h = [](const Vector&) { return 0.75; };
  b.grad_h = [](const Vector& x) { return Vector::Zero(x.size()); };
  const BclfProblem reduced = reduce_cbf_to_bclf(b);
  CHECK(reduced.objectives()[0].value(vec({0.3})) == doctest::Approx(-0.75));
}

TEST_CASE("double negation returns the original values") {
  const BarrierSpec b = barrier_sum_2d(1.0);
  const BclfProblem reduced = reduce_cbf_to_bclf(b);
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> dist(-2.0, 2.0);
  for (int i = 0; i < 100; ++i) {
    const Vector x = vec({dist(rng), dist(rng)});
    CHECK(std::abs(-reduced.objectives()[0].value(x) - b.h(x)) <= 1e-12);
    CHECK((-reduced.objectives()[0].gradient(x) - b.grad_h(x))
              .lpNorm<Eigen::Infinity>() <= 1e-12);
  }
}

TEST_CASE("admissible sets agree on the 1-D integrator") {
  const auto system = testutil::single_integrator_1d();
  const AgreementReport r =
      sets_agree(barrier_identity(2.0), system, Box(vec({-2.0}), vec({2.0})),
                 100, 100, 1e-9, SatRowMode::row_active, 17);
  CHECK(r.pass);
  CHECK(r.pairs == 10000);
  CHECK(r.disagreements == 0);
  CHECK(r.max_residual_gap <= 1e-12);
}

TEST_CASE("admissible sets agree on the drift system") {
  const auto system = testutil::double_integrator_drift();
  const AgreementReport r =
      sets_agree(barrier_sum_2d(1.0), system, Box(vec({-2.0}), vec({2.0})),
                 100, 100, 1e-9, SatRowMode::row_active, 23);
  CHECK(r.pass);
  CHECK(r.disagreements == 0);
  CHECK(r.max_residual_gap <= 1e-12);
}

TEST_CASE("literal level reading documents the below-set asymmetry") {
  const auto system = testutil::single_integrator_1d();
  const AgreementReport r =
      sets_agree(barrier_identity(0.5), system, Box(vec({-2.0}), vec({2.0})),
                 200, 50, 1e-9, SatRowMode::cpl_literal, 31);
  CHECK(r.pass);  // asymmetric pairs are reported, not counted against
  CHECK(r.negative_h_pairs > 0);
  CHECK(r.negative_h_asymmetric > 0);
  // the identity itself is independent of the level reading
  CHECK(r.max_residual_gap <= 1e-12);
}

TEST_CASE("mismatched gains break the agreement away from the boundary") {
  const auto system = testutil::single_integrator_1d();
  const AgreementReport r =
      sets_agree(barrier_identity(2.0), system, Box(vec({-2.0}), vec({2.0})),
                 100, 100, 1e-9, SatRowMode::row_active, 11,
                 /*bclf_k=*/4.0);
  CHECK(!r.pass);
  CHECK(r.disagreements > 0);
  CHECK(r.max_residual_gap > 1e-3);  // differ by (1/2 - 1/4) h
}

TEST_CASE("filter and priority controller coincide on the reduced problem") {
  const auto make_cases = [](auto system, const BarrierSpec& barrier,
                             const Box& ubox, int n_states) {
    const BclfProblem reduced = reduce_cbf_to_bclf(barrier);
    std::mt19937_64 rng(1234);
    std::uniform_real_distribution<double> dist(-2.0, 2.0);
    int compared = 0;
    while (compared < n_states) {
      Vector x(system.state_dim);
      for (int i = 0; i < x.size(); ++i) x[i] = dist(rng);
      if (barrier.h(x) < 0.0) continue;  // compare where the row is active
      ++compared;
      Vector nominal(system.control_dim);
      for (int i = 0; i < nominal.size(); ++i) nominal[i] = 3.0 * dist(rng);
      const Vector via_filter =
          cbf_filter(nominal, {cbf_constraint(barrier, system, x)}, ubox);
      const BclfControl via_priority =
          bclf_controller(reduced, system, x, nominal, ubox);
      CHECK((via_filter - via_priority.u).lpNorm<Eigen::Infinity>() <= 1e-9);
    }
  };
  make_cases(testutil::single_integrator_1d(), barrier_identity(2.0),
             Box(vec({-2.0}), vec({2.0})), 100);
  make_cases(testutil::double_integrator_drift(), barrier_sum_2d(1.0),
             Box(vec({-3.0}), vec({3.0})), 100);
}

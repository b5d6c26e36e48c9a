#include "invfilter/equivalence.hpp"

#include <cmath>
#include <random>

namespace invfilter {

BclfProblem reduce_cbf_to_bclf(const BarrierSpec& barrier, double epsilon) {
  barrier.validate();
  auto h = barrier.h;
  auto grad_h = barrier.grad_h;
  Objective v = Objective::less_equal(
      [h](const Vector& x) { return -h(x); },
      [grad_h](const Vector& x) -> Vector { return -grad_h(x); },
      "negated barrier");
  PriorityTable table({{Bound::unbounded(), Bound::of(0.0)}});
  std::vector<Objective> objectives;
  objectives.push_back(std::move(v));
  return BclfProblem(std::move(objectives), std::move(table), barrier.k_gain,
                     epsilon);
}

AgreementReport sets_agree(const BarrierSpec& barrier,
                           const ControlAffineSystem& system,
                           const Box& control_box, int state_samples,
                           int control_samples, double tol, SatRowMode mode,
                           std::uint64_t seed, double bclf_k) {
  barrier.validate();
  if (state_samples < 1 || control_samples < 1) {
    throw ArgumentError("sample counts must be >= 1");
  }
  BarrierSpec reduced_source = barrier;
  if (bclf_k > 0.0) reduced_source.k_gain = bclf_k;
  const BclfProblem reduced = reduce_cbf_to_bclf(reduced_source);

  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const auto draw = [&](const Box& box) {
    Vector p(box.dim());
    for (int a = 0; a < box.dim(); ++a) {
      p[a] = box.lower()[a] + unit(rng) * box.width(a);
    }
    return p;
  };

  AgreementReport report;
  for (int sx = 0; sx < state_samples; ++sx) {
    const Vector x = draw(barrier.domain);
    const CbfConstraint cbf = cbf_constraint(barrier, system, x);
    const bool below_safe_set = cbf.h_value < 0.0;

    // the finite bound row sits at level 1 of the reduced table
    const Halfspace sat_row = sat_row_halfspace(reduced, system, x, 0, 1);
    const bool row_applies =
        mode == SatRowMode::row_active || !below_safe_set;

    for (int su = 0; su < control_samples; ++su) {
      const Vector u = draw(control_box);
      ++report.pairs;
      if (below_safe_set) ++report.negative_h_pairs;

      const double r_cbf = cbf.residual_at(u);
      const double r_sat = sat_row.slack(u);
      report.max_residual_gap =
          std::max(report.max_residual_gap, std::abs(r_cbf - r_sat));

      if (!row_applies) {
        // cpl_literal below the safe set: U_sat has no finite row, so it
        // accepts u unconditionally while K_cbf may not
        if (r_cbf < -tol) ++report.negative_h_asymmetric;
        continue;
      }
      if (std::abs(r_cbf) < tol || std::abs(r_sat) < tol) {
        ++report.boundary_excluded;
        continue;
      }
      const bool in_cbf = r_cbf >= 0.0;
      const bool in_sat = r_sat >= 0.0;
      if (in_cbf != in_sat) {
        ++report.disagreements;
        if (report.disagreement_samples.size() < 32) {
          report.disagreement_samples.push_back({x, u, r_cbf, r_sat});
        }
      }
    }
  }
  report.pass = report.disagreements == 0;
  return report;
}

}  // namespace invfilter

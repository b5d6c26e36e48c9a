#pragma once

#include <cstdint>
#include <vector>

#include "invfilter/bclf.hpp"
#include "invfilter/cbf.hpp"
#include "invfilter/core.hpp"

namespace invfilter {

// Rewrites a barrier as a single-objective priority problem: V = -h,
// bounds [unbounded, 0], same k. With the linear class-K function the two
// admissible sets coincide; `epsilon` only matters for the improvement
// machinery and defaults to the scenario default.
BclfProblem reduce_cbf_to_bclf(const BarrierSpec& barrier,
                               double epsilon = 1e-2);

// How the reduced problem's bound row is selected when comparing sets.
//  row_active: the finite b=0 row is used at every state; the membership
//    identity then holds pointwise everywhere.
//  cpl_literal: the row applies only where the current priority level
//    selects it (h >= 0); below the safe set the level drops to 0, the
//    bound column is unbounded, and the comparison is reported as
//    asymmetric rather than as disagreement.
enum class SatRowMode { row_active, cpl_literal };

struct AgreementReport {
  long pairs{0};                // (x, u) pairs compared
  long disagreements{0};        // memberships differ outside the tol band
  long boundary_excluded{0};    // |residual| < tol on either side; skipped
  long negative_h_pairs{0};     // pairs sampled below the safe set
  long negative_h_asymmetric{0};  // cpl_literal only: U_sat free, K_cbf not
  double max_residual_gap{0.0};   // max |cbf residual - sat slack| observed
  bool pass{false};               // zero disagreements

  struct Sample {
    Vector x, u;
    double cbf_residual;
    double sat_slack;
  };
  std::vector<Sample> disagreement_samples;  // capped at 32
};

// Samples (x, u) pairs over the barrier domain and control box and
// compares K_cbf membership against U_sat membership of the reduced
// problem, tracking the residual identity alongside the boolean verdicts.
// `bclf_k` substitutes a different gain on the U_sat side (0 keeps the
// barrier's); useful for demonstrating that the identity needs equal k.
AgreementReport sets_agree(const BarrierSpec& barrier,
                           const ControlAffineSystem& system,
                           const Box& control_box, int state_samples,
                           int control_samples, double tol = 1e-9,
                           SatRowMode mode = SatRowMode::row_active,
                           std::uint64_t seed = 0, double bclf_k = 0.0);

}  // namespace invfilter

#include "invfilter/solver.hpp"

#include <Eigen/LU>
#include <cmath>
#include <optional>

namespace invfilter {
namespace {

constexpr double kFeasTol = 1e-9;
constexpr double kMultTol = 1e-10;
constexpr double kActiveTol = 1e-8;
constexpr double kRankTol = 1e-12;

// Canonical form a.u >= c.
struct Row {
  Vector a;
  double c;
  ConstraintId id;
};

struct Candidate {
  Vector point;
  std::vector<int> subset;       // row indices forming the active set
  std::vector<double> lambdas;   // multipliers for `subset`
};

// Canonicalizes halfspaces and box faces into GE rows. Zero-normal
// halfspaces never become rows: satisfiable ones are dropped, an
// unsatisfiable one aborts with itself as the certificate.
std::vector<Row> canonical_rows(const std::vector<Halfspace>& halfspaces,
                                const Box& box, int m,
                                std::vector<ConstraintId>* bad) {
  std::vector<Row> rows;
  for (size_t i = 0; i < halfspaces.size(); ++i) {
    const Halfspace& hs = halfspaces[i];
    if (hs.normal.size() != m) {
      throw ArgumentError("halfspace normal dimension mismatch");
    }
    const ConstraintId id{ConstraintId::Kind::halfspace, static_cast<int>(i)};
    if (hs.has_zero_normal()) {
      if (hs.vacuously_infeasible()) {
        if (bad) bad->push_back(id);
      }
      continue;
    }
    if (hs.sense == Sense::GE) {
      rows.push_back({hs.normal, hs.offset, id});
    } else {
      rows.push_back({-hs.normal, -hs.offset, id});
    }
  }
  for (int a = 0; a < m; ++a) {
    Vector e = Vector::Zero(m);
    e[a] = 1.0;
    rows.push_back({e, box.lower()[a], {ConstraintId::Kind::box_lower, a}});
    rows.push_back({-e, -box.upper()[a], {ConstraintId::Kind::box_upper, a}});
  }
  return rows;
}

double worst_violation(const std::vector<Row>& rows, const Vector& u) {
  double v = 0.0;
  for (const Row& r : rows) v = std::max(v, r.c - r.a.dot(u));
  return v;
}

// Searches linearly independent subsets of at most m rows for a KKT
// point of min |u - target|^2. Subsets are visited smallest-first in
// input order, so the result is deterministic; any KKT point of this
// strictly convex problem is the unique optimum.
std::optional<Candidate> find_kkt_point(const Vector& target,
                                        const std::vector<Row>& rows, int m) {
  const int k = static_cast<int>(rows.size());
  std::vector<int> subset;

  const auto try_subset = [&]() -> std::optional<Candidate> {
    const int s = static_cast<int>(subset.size());
    Vector u = target;
    std::vector<double> lambdas(s, 0.0);
    if (s > 0) {
      Matrix A(s, m);
      Vector rhs(s);
      for (int i = 0; i < s; ++i) {
        A.row(i) = rows[subset[i]].a;
        rhs[i] = rows[subset[i]].c - rows[subset[i]].a.dot(target);
      }
      Matrix gram = A * A.transpose();
      Eigen::FullPivLU<Matrix> lu(gram);
      lu.setThreshold(kRankTol);
      if (lu.rank() < s) return std::nullopt;  // dependent rows; a smaller
                                               // subset covers this face
      Vector lambda = lu.solve(rhs);
      for (int i = 0; i < s; ++i) {
        if (lambda[i] < -kMultTol) return std::nullopt;
        lambdas[i] = lambda[i];
      }
      u = target + A.transpose() * lambda;
    }
    if (worst_violation(rows, u) > kFeasTol) return std::nullopt;
    return Candidate{u, subset, lambdas};
  };

  // size 0: the unconstrained optimum
  if (auto c = try_subset()) return c;
  for (int size = 1; size <= std::min(m, k); ++size) {
    subset.assign(size, 0);
    for (int i = 0; i < size; ++i) subset[i] = i;
    while (true) {
      if (auto c = try_subset()) return c;
      int i = size - 1;
      while (i >= 0 && subset[i] == k - size + i) --i;
      if (i < 0) break;
      ++subset[i];
      for (int j = i + 1; j < size; ++j) subset[j] = subset[j - 1] + 1;
    }
  }
  return std::nullopt;
}

bool rows_feasible(const std::vector<Row>& rows, const Vector& anchor, int m) {
  return find_kkt_point(anchor, rows, m).has_value();
}

// Deletion filter: prunes rows whose removal keeps the system infeasible,
// leaving a minimal mutually unsatisfiable subset.
std::vector<ConstraintId> infeasibility_certificate(std::vector<Row> rows,
                                                    const Vector& anchor,
                                                    int m) {
  size_t i = 0;
  while (i < rows.size() && rows.size() > 1) {
    std::vector<Row> reduced = rows;
    reduced.erase(reduced.begin() + static_cast<long>(i));
    if (!rows_feasible(reduced, anchor, m)) {
      rows = std::move(reduced);
    } else {
      ++i;
    }
  }
  std::vector<ConstraintId> ids;
  ids.reserve(rows.size());
  for (const Row& r : rows) ids.push_back(r.id);
  return ids;
}

}  // namespace

SolveResult solve_min_norm(const MinNormProblem& problem) {
  const int m = problem.box.dim();
  if (m < 1) throw ArgumentError("control dimension must be >= 1");
  if (problem.target.size() != m) {
    throw ArgumentError("target/box dimension mismatch");
  }

  SolveResult result;
  std::vector<ConstraintId> vacuous;
  std::vector<Row> rows =
      canonical_rows(problem.halfspaces, problem.box, m, &vacuous);
  if (!vacuous.empty()) {
    result.status = SolveStatus::infeasible;
    result.certificate = vacuous;
    return result;
  }

  if (auto kkt = find_kkt_point(problem.target, rows, m)) {
    result.status = SolveStatus::optimal;
    result.point = kkt->point;
    result.max_violation = worst_violation(rows, kkt->point);
    // report every tight row; solving-subset rows carry their multipliers
    for (size_t r = 0; r < rows.size(); ++r) {
      if (std::abs(rows[r].a.dot(kkt->point) - rows[r].c) <= kActiveTol) {
        result.active_set.push_back(rows[r].id);
        double lambda = 0.0;
        for (size_t j = 0; j < kkt->subset.size(); ++j) {
          if (kkt->subset[j] == static_cast<int>(r)) lambda = kkt->lambdas[j];
        }
        result.multipliers.push_back(lambda);
      }
    }
    return result;
  }

  result.status = SolveStatus::infeasible;
  result.certificate =
      infeasibility_certificate(std::move(rows), problem.box.center(), m);
  return result;
}

FeasibilityResult feasible(const std::vector<Halfspace>& halfspaces,
                           const Box& box) {
  MinNormProblem probe{box.center(), halfspaces, box};
  SolveResult r = solve_min_norm(probe);
  FeasibilityResult out;
  out.feasible = r.status == SolveStatus::optimal;
  if (out.feasible) {
    out.witness = r.point;
  } else {
    out.certificate = r.certificate;
  }
  return out;
}

OracleResult oracle_min_norm(const MinNormProblem& problem,
                             int grid_points_per_axis) {
  const int m = problem.box.dim();
  if (m > 3) throw ArgumentError("oracle limited to control dimension <= 3");
  if (grid_points_per_axis < 1) throw ArgumentError("grid must be >= 1");

  OracleResult out;
  double best = std::numeric_limits<double>::infinity();
  std::vector<int> idx(m, 0);
  const auto coord = [&](int axis, int i) {
    if (grid_points_per_axis == 1) return problem.box.center()[axis];
    return problem.box.lower()[axis] +
           problem.box.width(axis) * i / double(grid_points_per_axis - 1);
  };
  while (true) {
    Vector u(m);
    for (int a = 0; a < m; ++a) u[a] = coord(a, idx[a]);
    bool ok = true;
    for (const Halfspace& hs : problem.halfspaces) {
      if (!hs.satisfied(u, kFeasTol)) {
        ok = false;
        break;
      }
    }
    if (ok) {
      const double d = (u - problem.target).squaredNorm();
      if (d < best) {
        best = d;
        out.status = SolveStatus::optimal;
        out.point = u;
      }
    }
    int a = m - 1;
    while (a >= 0 && ++idx[a] == grid_points_per_axis) idx[a--] = 0;
    if (a < 0) break;
  }
  return out;
}

}  // namespace invfilter

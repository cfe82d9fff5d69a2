#pragma once

#include <vector>

namespace fdmac::lp {

enum class Sense { LessEqual, GreaterEqual, Equal };

struct Term {
  int var = 0;
  double coef = 0.0;
};

struct Constraint {
  std::vector<Term> terms;
  Sense sense = Sense::LessEqual;
  double rhs = 0.0;
};

/// maximize objective . x  subject to constraints, x >= 0.
struct Problem {
  int num_vars = 0;
  std::vector<double> objective;
  std::vector<Constraint> constraints;
};

enum class Status { Optimal, Infeasible, Unbounded, IterationLimit };

const char* to_string(Status s);

struct Options {
  double tolerance = 1e-9;
  long max_iterations = 500000;
  /// Row updates of large pivots are spread over OpenMP threads.
  bool parallel = true;
};

struct Solution {
  Status status = Status::Infeasible;
  std::vector<double> x;
  double objective = 0.0;
  long iterations = 0;
};

/// Dense two-phase primal simplex. Entering column: most negative reduced
/// cost, ties to the lowest column index; leaving row: minimum ratio, ties to
/// the lowest basic variable index. A run of degenerate pivots switches to
/// Bland's rule until progress resumes. Results are deterministic for a
/// fixed input and independent of the thread count.
Solution solve(const Problem& problem, const Options& options = {});

}  // namespace fdmac::lp

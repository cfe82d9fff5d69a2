#include "fdmac/lp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace fdmac::lp {

const char* to_string(Status s) {
  switch (s) {
    case Status::Optimal: return "optimal";
    case Status::Infeasible: return "infeasible";
    case Status::Unbounded: return "unbounded";
    case Status::IterationLimit: return "iteration-limit";
  }
  return "?";
}

namespace {

constexpr int kDegenerateStreak = 64;

class Tableau {
 public:
  Tableau(const Problem& p, const Options& opt) : opt_(opt), n_(p.num_vars) {
    m_ = static_cast<int>(p.constraints.size());
    int slacks = 0;
    int arts = 0;
    for (const Constraint& c : p.constraints) {
      const Sense s = effective_sense(c);
      if (s != Sense::Equal) ++slacks;
      if (s != Sense::LessEqual) ++arts;
    }
    art_begin_ = n_ + slacks;
    cols_ = art_begin_ + arts;
    width_ = cols_ + 1;
    a_.assign(static_cast<std::size_t>(m_ + 2) * static_cast<std::size_t>(width_), 0.0);
    basis_.assign(static_cast<std::size_t>(m_), -1);

    int next_slack = n_;
    int next_art = art_begin_;
    for (int r = 0; r < m_; ++r) {
      const Constraint& c = p.constraints[static_cast<std::size_t>(r)];
      const double sign = c.rhs < 0.0 ? -1.0 : 1.0;
      const Sense s = effective_sense(c);
      for (const Term& t : c.terms) {
        if (t.var < 0 || t.var >= n_) throw std::invalid_argument("lp::solve: variable out of range");
        at(r, t.var) += sign * t.coef;
      }
      at(r, cols_) = sign * c.rhs;
      rhs_scale_ = std::max(rhs_scale_, std::fabs(c.rhs));
      if (s == Sense::LessEqual) {
        at(r, next_slack) = 1.0;
        basis_[static_cast<std::size_t>(r)] = next_slack++;
      } else {
        if (s == Sense::GreaterEqual) at(r, next_slack++) = -1.0;
        at(r, next_art) = 1.0;
        basis_[static_cast<std::size_t>(r)] = next_art++;
      }
    }
    for (int j = 0; j < n_; ++j) at(m_, j) = -p.objective[static_cast<std::size_t>(j)];
    for (int j = art_begin_; j < cols_; ++j) at(m_ + 1, j) = 1.0;
    for (int r = 0; r < m_; ++r) {
      if (basis_[static_cast<std::size_t>(r)] >= art_begin_) {
        for (int j = 0; j < width_; ++j) at(m_ + 1, j) -= at(r, j);
      }
    }
  }

  Status run() {
    if (art_begin_ < cols_) {
      const Status s1 = iterate(m_ + 1, true);
      if (s1 == Status::IterationLimit) return s1;
      const double infeas = -at(m_ + 1, cols_);
      if (infeas > 10.0 * opt_.tolerance * (1.0 + rhs_scale_)) return Status::Infeasible;
      drive_out_artificials();
    }
    return iterate(m_, false);
  }

  std::vector<double> primal() const {
    std::vector<double> x(static_cast<std::size_t>(n_), 0.0);
    for (int r = 0; r < m_; ++r) {
      const int b = basis_[static_cast<std::size_t>(r)];
      if (b < n_) x[static_cast<std::size_t>(b)] = std::max(0.0, at(r, cols_));
    }
    return x;
  }

  long iterations() const { return iterations_; }

 private:
  static Sense effective_sense(const Constraint& c) {
    if (c.rhs >= 0.0 || c.sense == Sense::Equal) return c.sense;
    return c.sense == Sense::LessEqual ? Sense::GreaterEqual : Sense::LessEqual;
  }

  double& at(int r, int c) {
    return a_[static_cast<std::size_t>(r) * static_cast<std::size_t>(width_) + static_cast<std::size_t>(c)];
  }
  double at(int r, int c) const {
    return a_[static_cast<std::size_t>(r) * static_cast<std::size_t>(width_) + static_cast<std::size_t>(c)];
  }

  Status iterate(int obj_row, bool phase_one) {
    const int allowed = phase_one ? cols_ : art_begin_;
    const double tol = opt_.tolerance;
    int degenerate = 0;
    for (;;) {
      if (iterations_ >= opt_.max_iterations) return Status::IterationLimit;
      const bool bland = degenerate >= kDegenerateStreak;
      int s = -1;
      double best = -tol;
      for (int j = 0; j < allowed; ++j) {
        const double d = at(obj_row, j);
        if (d < best) {
          s = j;
          if (bland) break;
          best = d;
        }
      }
      if (s < 0) return Status::Optimal;

      int r = -1;
      double ratio = std::numeric_limits<double>::infinity();
      for (int i = 0; i < m_; ++i) {
        const double coef = at(i, s);
        if (coef <= tol) continue;
        const double q = at(i, cols_) / coef;
        if (r < 0 || q < ratio - tol * (1.0 + std::fabs(ratio)) ||
            (q <= ratio + tol * (1.0 + std::fabs(ratio)) &&
             basis_[static_cast<std::size_t>(i)] < basis_[static_cast<std::size_t>(r)])) {
          r = i;
          ratio = std::min(ratio, q);
        }
      }
      if (r < 0) return Status::Unbounded;
      degenerate = ratio <= tol ? degenerate + 1 : 0;
      pivot(r, s);
    }
  }

  void drive_out_artificials() {
    for (int r = 0; r < m_; ++r) {
      if (basis_[static_cast<std::size_t>(r)] < art_begin_) continue;
      int s = -1;
      double best = opt_.tolerance;
      for (int j = 0; j < art_begin_; ++j) {
        if (std::fabs(at(r, j)) > best) {
          best = std::fabs(at(r, j));
          s = j;
        }
      }
      // A row with no structural or slack entry is redundant; its artificial
      // stays basic at zero and never re-enters.
      if (s >= 0) pivot(r, s);
    }
  }

  void pivot(int r, int s) {
    ++iterations_;
    const double inv = 1.0 / at(r, s);
    nz_.clear();
    for (int j = 0; j < width_; ++j) {
      double& v = at(r, j);
      if (v != 0.0) {
        v *= inv;
        nz_.push_back(j);
      }
    }
    at(r, s) = 1.0;
    const double* prow = &a_[static_cast<std::size_t>(r) * static_cast<std::size_t>(width_)];
    const int rows = m_ + 2;
    const bool sparse = nz_.size() * 2 < static_cast<std::size_t>(width_);
    const long work = static_cast<long>(rows) * static_cast<long>(sparse ? nz_.size() : width_);
    const int* nz = nz_.data();
    const int nnz = static_cast<int>(nz_.size());
#pragma omp parallel for schedule(static) if (opt_.parallel && work > (1L << 17))
    for (int i = 0; i < rows; ++i) {
      if (i == r) continue;
      double* row = &a_[static_cast<std::size_t>(i) * static_cast<std::size_t>(width_)];
      const double f = row[s];
      if (f == 0.0) continue;
      if (sparse) {
        for (int k = 0; k < nnz; ++k) row[nz[k]] -= f * prow[nz[k]];
      } else {
        for (int j = 0; j < width_; ++j) row[j] -= f * prow[j];
      }
      row[s] = 0.0;
    }
    basis_[static_cast<std::size_t>(r)] = s;
  }

  Options opt_;
  int n_ = 0;
  int m_ = 0;
  int art_begin_ = 0;
  int cols_ = 0;
  int width_ = 0;
  double rhs_scale_ = 0.0;
  long iterations_ = 0;
  std::vector<double> a_;
  std::vector<int> basis_;
  std::vector<int> nz_;
};

}  // namespace

Solution solve(const Problem& problem, const Options& options) {
  if (problem.num_vars < 0 || problem.objective.size() != static_cast<std::size_t>(problem.num_vars))
    throw std::invalid_argument("lp::solve: objective size must equal num_vars");
  Solution sol;
  if (problem.num_vars == 0) {
    sol.x = {};
    sol.status = Status::Optimal;
    for (const Constraint& c : problem.constraints) {
      const bool ok = (c.sense == Sense::LessEqual && c.rhs >= -options.tolerance) ||
                      (c.sense == Sense::GreaterEqual && c.rhs <= options.tolerance) ||
                      (c.sense == Sense::Equal && std::fabs(c.rhs) <= options.tolerance);
      if (!ok) sol.status = Status::Infeasible;
    }
    return sol;
  }
  Tableau t(problem, options);
  sol.status = t.run();
  sol.iterations = t.iterations();
  if (sol.status == Status::Optimal) {
    sol.x = t.primal();
    for (int j = 0; j < problem.num_vars; ++j)
      sol.objective += problem.objective[static_cast<std::size_t>(j)] * sol.x[static_cast<std::size_t>(j)];
  }
  return sol;
}

}  // namespace fdmac::lp

#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include "concord/errors.hpp"

namespace concord {

enum class Relation { LessEq, GreaterEq, Equal };
enum class LpStatus { Optimal, Infeasible, Unbounded };

/// Dense bounded-variable linear program:
///   minimize objective . x
///   subject to rows[i] . x (relations[i]) rhs[i] and lower <= x <= upper.
/// Bounds must be finite; every model variable lives in [0,1] or [-1,1].
struct LpProblem {
  std::vector<double> objective;
  std::vector<std::vector<double>> rows;
  std::vector<Relation> relations;
  std::vector<double> rhs;
  std::vector<double> lower;
  std::vector<double> upper;

  std::size_t num_vars() const { return objective.size(); }
  std::size_t num_rows() const { return rows.size(); }

  void validate() const {
    const std::size_t n = num_vars();
    const std::size_t m = num_rows();
    if (relations.size() != m || rhs.size() != m) {
      throw DimensionError("lp: rows, relations and rhs must have equal length");
    }
    if (lower.size() != n || upper.size() != n) {
      throw DimensionError("lp: bounds must match the objective length");
    }
    for (const auto& row : rows) {
      if (row.size() != n) {
        throw DimensionError("lp: constraint row width must match the objective length");
      }
      for (double v : row) {
        if (!std::isfinite(v)) throw ValidationError("lp: non-finite constraint coefficient");
      }
    }
    for (double v : objective) {
      if (!std::isfinite(v)) throw ValidationError("lp: non-finite objective coefficient");
    }
    for (double v : rhs) {
      if (!std::isfinite(v)) throw ValidationError("lp: non-finite right-hand side");
    }
    for (std::size_t j = 0; j < n; ++j) {
      if (!std::isfinite(lower[j]) || !std::isfinite(upper[j])) {
        throw ValidationError("lp: variable bounds must be finite");
      }
      if (lower[j] > upper[j]) {
        throw ValidationError("lp: lower bound exceeds upper bound at variable " +
                              std::to_string(j));
      }
    }
  }
};

struct LpSolution {
  LpStatus status = LpStatus::Infeasible;
  std::vector<double> x;         // present iff optimal
  double objective_value = 0.0;  // meaningful iff optimal
  long iterations = 0;
  bool used_bland = false;       // anti-cycling fallback engaged
};

namespace detail {

// Bounded-variable primal simplex with an explicitly maintained basis
// inverse. Columns are stored sparsely (the model LPs are mostly ordering
// chains), the inverse densely. Two phases: infeasible rows receive a
// single artificial column; phase one minimizes their sum. Pricing is
// Dantzig with a permanent switch to Bland's rule after a degenerate
// stall, which guarantees termination. All tie-breaks are by index, so a
// given problem always produces the same pivot sequence.
class BoundedSimplex {
 public:
  explicit BoundedSimplex(const LpProblem& p) : prob_(p) { p.validate(); }

  LpSolution solve() {
    setup();
    LpSolution out;
    if (nart_ > 0) {
      std::vector<double> phase1(ncols_, 0.0);
      for (std::size_t j = ncols_ - nart_; j < ncols_; ++j) phase1[j] = 1.0;
      const LpStatus s1 = run(phase1);
      if (s1 != LpStatus::Optimal) {
        throw SolverError("lp: phase one terminated abnormally");
      }
      double infeas = 0.0;
      for (std::size_t j = ncols_ - nart_; j < ncols_; ++j) infeas += xval_[j];
      if (infeas > kFeasTol * 0.1 * (1.0 + rhs_scale_)) {
        out.status = LpStatus::Infeasible;
        out.iterations = iterations_;
        out.used_bland = used_bland_;
        return out;
      }
      for (std::size_t j = ncols_ - nart_; j < ncols_; ++j) ub_[j] = 0.0;
    }

    LpStatus s2 = run(cost_);
    if (s2 == LpStatus::Optimal) {
      for (int round = 0; round < 2 && !certificate_ok(); ++round) {
        refactor();
        recompute_basics();
        if (basics_out_of_bounds() > kFeasTol) {
          throw SolverError("lp: numerical loss of feasibility");
        }
        s2 = run(cost_);
        if (s2 != LpStatus::Optimal) break;
      }
      if (s2 == LpStatus::Optimal && !certificate_ok()) {
        throw SolverError("lp: optimal point failed the feasibility certificate");
      }
    }

    out.status = s2;
    out.iterations = iterations_;
    out.used_bland = used_bland_;
    if (s2 == LpStatus::Optimal) {
      out.x.assign(xval_.begin(), xval_.begin() + static_cast<long>(nstruct_));
      double obj = 0.0;
      for (std::size_t j = 0; j < nstruct_; ++j) obj += prob_.objective[j] * xval_[j];
      out.objective_value = obj;
    }
    return out;
  }

 private:
  static constexpr double kPivotTol = 1e-10;
  static constexpr double kDualTol = 1e-9;
  static constexpr double kFeasTol = 1e-8;
  static constexpr double kBoundTol = 1e-10;
  static constexpr double kDegenTol = 1e-12;
  static constexpr double kInf = std::numeric_limits<double>::infinity();

  enum VStat : unsigned char { AtLower, AtUpper, Basic };

  void setup() {
    m_ = prob_.num_rows();
    nstruct_ = prob_.num_vars();
    rhs_scale_ = 0.0;
    for (double b : prob_.rhs) rhs_scale_ = std::max(rhs_scale_, std::abs(b));

    cols_.assign(nstruct_ + m_, {});
    for (std::size_t i = 0; i < m_; ++i) {
      const auto& row = prob_.rows[i];
      for (std::size_t j = 0; j < nstruct_; ++j) {
        if (row[j] != 0.0) cols_[j].emplace_back(static_cast<int>(i), row[j]);
      }
    }
    cost_.assign(nstruct_ + m_, 0.0);
    lb_.assign(nstruct_ + m_, 0.0);
    ub_.assign(nstruct_ + m_, 0.0);
    xval_.assign(nstruct_ + m_, 0.0);
    stat_.assign(nstruct_ + m_, AtLower);
    for (std::size_t j = 0; j < nstruct_; ++j) {
      cost_[j] = prob_.objective[j];
      lb_[j] = prob_.lower[j];
      ub_[j] = prob_.upper[j];
      if (std::abs(lb_[j]) <= std::abs(ub_[j])) {
        xval_[j] = lb_[j];
        stat_[j] = AtLower;
      } else {
        xval_[j] = ub_[j];
        stat_[j] = AtUpper;
      }
    }
    for (std::size_t i = 0; i < m_; ++i) {
      const std::size_t s = nstruct_ + i;
      cols_[s].emplace_back(static_cast<int>(i), 1.0);
      switch (prob_.relations[i]) {
        case Relation::LessEq:
          lb_[s] = 0.0;
          ub_[s] = kInf;
          break;
        case Relation::GreaterEq:
          lb_[s] = -kInf;
          ub_[s] = 0.0;
          break;
        case Relation::Equal:
          lb_[s] = 0.0;
          ub_[s] = 0.0;
          break;
      }
    }

    std::vector<double> act(m_, 0.0);
    for (std::size_t j = 0; j < nstruct_; ++j) {
      if (xval_[j] == 0.0) continue;
      for (const auto& [i, v] : cols_[j]) act[i] += v * xval_[j];
    }

    basis_.assign(m_, -1);
    std::vector<int> art_sign;
    std::vector<double> art_val;
    std::vector<int> art_row;
    for (std::size_t i = 0; i < m_; ++i) {
      const std::size_t s = nstruct_ + i;
      const double sval = prob_.rhs[i] - act[i];
      if (sval >= lb_[s] - 1e-11 && sval <= ub_[s] + 1e-11) {
        xval_[s] = sval;
        stat_[s] = Basic;
        basis_[i] = static_cast<int>(s);
      } else {
        const double clamped = std::clamp(sval, lb_[s], ub_[s]);
        xval_[s] = clamped;
        stat_[s] = (clamped == lb_[s]) ? AtLower : AtUpper;
        const double resid = sval - clamped;
        art_row.push_back(static_cast<int>(i));
        art_sign.push_back(resid > 0 ? 1 : -1);
        art_val.push_back(std::abs(resid));
      }
    }
    nart_ = art_row.size();
    ncols_ = nstruct_ + m_ + nart_;
    for (std::size_t k = 0; k < nart_; ++k) {
      cols_.push_back({{art_row[k], static_cast<double>(art_sign[k])}});
      cost_.push_back(0.0);
      lb_.push_back(0.0);
      ub_.push_back(kInf);
      xval_.push_back(art_val[k]);
      stat_.push_back(Basic);
      basis_[art_row[k]] = static_cast<int>(nstruct_ + m_ + k);
    }

    binv_.assign(m_ * m_, 0.0);
    for (std::size_t i = 0; i < m_; ++i) {
      const int bj = basis_[i];
      // slack columns are +e_i, artificial columns are +/-e_i
      binv_[i * m_ + i] = (cols_[bj][0].second > 0) ? 1.0 : -1.0;
    }

    y_.assign(m_, 0.0);
    w_.assign(m_, 0.0);
    iter_limit_ = 1000 + 60 * static_cast<long>(m_ + ncols_);
    stall_limit_ = 100 + 10 * static_cast<long>(m_);
  }

  double col_dot(std::size_t j, const std::vector<double>& y) const {
    double acc = 0.0;
    for (const auto& [i, v] : cols_[j]) acc += v * y[i];
    return acc;
  }

  void btran(const std::vector<double>& c) {
    std::fill(y_.begin(), y_.end(), 0.0);
    for (std::size_t i = 0; i < m_; ++i) {
      const double cb = c[basis_[i]];
      if (cb == 0.0) continue;
      const double* row = &binv_[i * m_];
      for (std::size_t k = 0; k < m_; ++k) y_[k] += cb * row[k];
    }
  }

  void ftran(std::size_t q) {
    std::fill(w_.begin(), w_.end(), 0.0);
    for (const auto& [i, v] : cols_[q]) {
      const double* colp = &binv_[i];
      for (std::size_t r = 0; r < m_; ++r) w_[r] += v * colp[r * m_];
    }
  }

  void refactor() {
    std::vector<double> bmat(m_ * m_, 0.0);
    for (std::size_t c = 0; c < m_; ++c) {
      for (const auto& [i, v] : cols_[basis_[c]]) bmat[i * m_ + c] = v;
    }
    std::fill(binv_.begin(), binv_.end(), 0.0);
    for (std::size_t i = 0; i < m_; ++i) binv_[i * m_ + i] = 1.0;
    for (std::size_t k = 0; k < m_; ++k) {
      std::size_t piv = k;
      double best = std::abs(bmat[k * m_ + k]);
      for (std::size_t r = k + 1; r < m_; ++r) {
        const double a = std::abs(bmat[r * m_ + k]);
        if (a > best) {
          best = a;
          piv = r;
        }
      }
      if (best < 1e-12) throw SolverError("lp: singular basis during refactorization");
      if (piv != k) {
        for (std::size_t c = 0; c < m_; ++c) {
          std::swap(bmat[piv * m_ + c], bmat[k * m_ + c]);
          std::swap(binv_[piv * m_ + c], binv_[k * m_ + c]);
        }
      }
      const double inv = 1.0 / bmat[k * m_ + k];
      for (std::size_t c = 0; c < m_; ++c) {
        bmat[k * m_ + c] *= inv;
        binv_[k * m_ + c] *= inv;
      }
      for (std::size_t r = 0; r < m_; ++r) {
        if (r == k) continue;
        const double f = bmat[r * m_ + k];
        if (f == 0.0) continue;
        for (std::size_t c = 0; c < m_; ++c) {
          bmat[r * m_ + c] -= f * bmat[k * m_ + c];
          binv_[r * m_ + c] -= f * binv_[k * m_ + c];
        }
      }
    }
  }

  void recompute_basics() {
    std::vector<double> rhseff(prob_.rhs);
    for (std::size_t j = 0; j < ncols_; ++j) {
      if (stat_[j] == Basic || xval_[j] == 0.0) continue;
      for (const auto& [i, v] : cols_[j]) rhseff[i] -= v * xval_[j];
    }
    for (std::size_t r = 0; r < m_; ++r) {
      const double* row = &binv_[r * m_];
      double acc = 0.0;
      for (std::size_t k = 0; k < m_; ++k) acc += row[k] * rhseff[k];
      xval_[basis_[r]] = acc;
    }
  }

  double basics_out_of_bounds() const {
    double worst = 0.0;
    for (std::size_t r = 0; r < m_; ++r) {
      const int j = basis_[r];
      worst = std::max(worst, lb_[j] - xval_[j]);
      worst = std::max(worst, xval_[j] - ub_[j]);
    }
    return worst;
  }

  bool certificate_ok() const {
    for (std::size_t i = 0; i < m_; ++i) {
      double act = 0.0;
      const auto& row = prob_.rows[i];
      for (std::size_t j = 0; j < nstruct_; ++j) act += row[j] * xval_[j];
      const double b = prob_.rhs[i];
      switch (prob_.relations[i]) {
        case Relation::LessEq:
          if (act > b + kFeasTol) return false;
          break;
        case Relation::GreaterEq:
          if (act < b - kFeasTol) return false;
          break;
        case Relation::Equal:
          if (std::abs(act - b) > kFeasTol) return false;
          break;
      }
    }
    for (std::size_t j = 0; j < nstruct_; ++j) {
      if (xval_[j] < lb_[j] - kBoundTol || xval_[j] > ub_[j] + kBoundTol) return false;
    }
    return true;
  }

  LpStatus run(const std::vector<double>& c) {
    while (true) {
      if (iterations_ >= iter_limit_) {
        throw SolverError("lp: iteration limit exceeded (" +
                          std::to_string(iter_limit_) + ")");
      }
      btran(c);

      std::size_t q = ncols_;
      int qdir = 0;
      double best_score = kDualTol;
      for (std::size_t j = 0; j < ncols_; ++j) {
        if (stat_[j] == Basic || lb_[j] == ub_[j]) continue;
        const double d = c[j] - col_dot(j, y_);
        double score;
        int dir;
        if (stat_[j] == AtLower && d < -kDualTol) {
          score = -d;
          dir = 1;
        } else if (stat_[j] == AtUpper && d > kDualTol) {
          score = d;
          dir = -1;
        } else {
          continue;
        }
        if (bland_) {
          q = j;
          qdir = dir;
          break;
        }
        if (score > best_score) {
          best_score = score;
          q = j;
          qdir = dir;
        }
      }
      if (q == ncols_) return LpStatus::Optimal;

      ftran(q);

      const double range = ub_[q] - lb_[q];
      double tmin = kInf;
      for (std::size_t r = 0; r < m_; ++r) {
        const double g = qdir * w_[r];
        const int bj = basis_[r];
        double t;
        if (g > kPivotTol) {
          if (lb_[bj] == -kInf) continue;
          t = (xval_[bj] - lb_[bj]) / g;
        } else if (g < -kPivotTol) {
          if (ub_[bj] == kInf) continue;
          t = (ub_[bj] - xval_[bj]) / (-g);
        } else {
          continue;
        }
        if (t < tmin) tmin = t;
      }
      if (tmin < 0.0) tmin = 0.0;

      if (tmin == kInf && range == kInf) return LpStatus::Unbounded;

      if (range <= tmin + 1e-12) {
        // bound flip: the entering variable jumps to its other bound
        for (std::size_t r = 0; r < m_; ++r) {
          if (w_[r] != 0.0) xval_[basis_[r]] -= range * qdir * w_[r];
        }
        xval_[q] = (stat_[q] == AtLower) ? ub_[q] : lb_[q];
        stat_[q] = (stat_[q] == AtLower) ? AtUpper : AtLower;
        ++iterations_;
        continue;
      }

      // leaving row: among near-minimal ratios prefer the largest pivot,
      // then the smallest row index
      std::size_t leave = m_;
      bool leave_to_upper = false;
      double best_piv = 0.0;
      for (std::size_t r = 0; r < m_; ++r) {
        const double g = qdir * w_[r];
        const int bj = basis_[r];
        double t;
        bool to_upper;
        if (g > kPivotTol) {
          if (lb_[bj] == -kInf) continue;
          t = (xval_[bj] - lb_[bj]) / g;
          to_upper = false;
        } else if (g < -kPivotTol) {
          if (ub_[bj] == kInf) continue;
          t = (ub_[bj] - xval_[bj]) / (-g);
          to_upper = true;
        } else {
          continue;
        }
        if (t <= tmin + 1e-9 && std::abs(w_[r]) > best_piv) {
          best_piv = std::abs(w_[r]);
          leave = r;
          leave_to_upper = to_upper;
        }
      }
      if (leave == m_) throw SolverError("lp: ratio test failed to select a pivot");

      const double theta = tmin;
      for (std::size_t r = 0; r < m_; ++r) {
        if (w_[r] != 0.0) xval_[basis_[r]] -= theta * qdir * w_[r];
      }
      xval_[q] = ((stat_[q] == AtLower) ? lb_[q] : ub_[q]) + qdir * theta;

      const int out = basis_[leave];
      stat_[out] = leave_to_upper ? AtUpper : AtLower;
      xval_[out] = leave_to_upper ? ub_[out] : lb_[out];
      basis_[leave] = static_cast<int>(q);
      stat_[q] = Basic;

      // binv update: eliminate the entering column from all other rows
      const double piv = w_[leave];
      double* rowL = &binv_[leave * m_];
      const double inv = 1.0 / piv;
      for (std::size_t k = 0; k < m_; ++k) rowL[k] *= inv;
      for (std::size_t r = 0; r < m_; ++r) {
        if (r == leave) continue;
        const double f = w_[r];
        if (f == 0.0) continue;
        double* rowR = &binv_[r * m_];
        for (std::size_t k = 0; k < m_; ++k) rowR[k] -= f * rowL[k];
      }

      ++iterations_;
      if (theta <= kDegenTol) {
        if (++degen_streak_ > stall_limit_ && !bland_) {
          bland_ = true;
          used_bland_ = true;
        }
      } else {
        degen_streak_ = 0;
      }
      if (++pivots_since_refactor_ >= refactor_interval_) {
        refactor();
        recompute_basics();
        pivots_since_refactor_ = 0;
      }
    }
  }

  const LpProblem& prob_;
  std::size_t m_ = 0, nstruct_ = 0, ncols_ = 0, nart_ = 0;
  double rhs_scale_ = 0.0;
  std::vector<std::vector<std::pair<int, double>>> cols_;
  std::vector<double> cost_, lb_, ub_, xval_;
  std::vector<VStat> stat_;
  std::vector<int> basis_;
  std::vector<double> binv_;
  std::vector<double> y_, w_;
  long iterations_ = 0;
  long pivots_since_refactor_ = 0;
  long degen_streak_ = 0;
  bool bland_ = false;
  bool used_bland_ = false;
  long iter_limit_ = 0;
  long stall_limit_ = 0;
  long refactor_interval_ = 500;
};

}  // namespace detail

/// Solves a dense bounded-variable LP. Deterministic: identical input
/// yields an identical pivot sequence and solution.
inline LpSolution solve_lp(const LpProblem& p) {
  detail::BoundedSimplex solver(p);
  return solver.solve();
}

}  // namespace concord

#include "tvnpn/lp.hpp"

#include "tvnpn/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

namespace tvnpn {

std::string_view to_string(LpStatus s) noexcept {
  switch (s) {
    case LpStatus::optimal: return "optimal";
    case LpStatus::infeasible: return "infeasible";
    case LpStatus::unbounded: return "unbounded";
    case LpStatus::iteration_limit: return "iteration_limit";
  }
  return "unknown";
}

namespace {

using Tableau = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

enum class PhaseResult { optimal, unbounded, iteration_limit };

class Simplex {
 public:
  Simplex(const Matrix& full, const Vector& rhs, std::vector<Index> basis, const LpOptions& opt)
      : full_(full), rhs_(rhs), basis_(std::move(basis)), m_(full.rows()), cols_(full.cols()),
        opt_(opt), t_(Tableau::Zero(full.rows() + 1, full.cols() + 1)) {
    t_.topLeftCorner(m_, cols_) = full_;
    t_.col(cols_).head(m_) = rhs_;
  }

  void set_cost(const Vector& cost) {
    cost_ = cost;
    price();
  }

  // Rebuilds the tableau as B^{-1} [A | b] from the original data, shedding
  // the round-off that accumulates over many pivots.
  bool reinvert() {
    Matrix bmat(m_, m_);
    for (Index i = 0; i < m_; ++i) bmat.col(i) = full_.col(basis_[static_cast<std::size_t>(i)]);
    const Eigen::FullPivLU<Matrix> lu(bmat);
    if (!lu.isInvertible()) return false;
    t_.topLeftCorner(m_, cols_) = lu.solve(full_);
    t_.col(cols_).head(m_) = lu.solve(rhs_);
    price();
    return true;
  }

  PhaseResult run(const std::vector<bool>& allowed, Index& iterations, Index limit) {
    const Index refresh = std::max<Index>(2 * m_, 20);
    for (int settle = 0;; ++settle) {
      const auto r = iterate(allowed, iterations, limit, refresh);
      if (r != PhaseResult::optimal) return r;
      // Confirm optimality on a freshly inverted tableau; round-off can hide
      // a negative reduced cost.
      if (!reinvert() || settle >= 3 || entering(allowed) < 0) return r;
    }
  }

  void pivot(Index r, Index c) {
    t_.row(r) /= t_(r, c);
    for (Index i = 0; i <= m_; ++i) {
      if (i == r) continue;
      const double f = t_(i, c);
      if (f != 0.0) t_.row(i) -= f * t_.row(r);
    }
    basis_[static_cast<std::size_t>(r)] = c;
  }

  Tableau& tableau() { return t_; }
  std::vector<Index>& basis() { return basis_; }

 private:
  // Reduced costs of cost_ written into the objective row (row m_).
  void price() {
    t_.row(m_).setZero();
    t_.row(m_).head(cols_) = cost_.transpose();
    for (Index i = 0; i < m_; ++i) {
      const double cb = cost_[basis_[static_cast<std::size_t>(i)]];
      if (cb != 0.0) t_.row(m_) -= cb * t_.row(i);
    }
  }

  Index entering(const std::vector<bool>& allowed) const {
    for (Index j = 0; j < cols_; ++j)
      if (allowed[static_cast<std::size_t>(j)] && t_(m_, j) < -opt_.pivot_tol) return j;
    return -1;
  }

  PhaseResult iterate(const std::vector<bool>& allowed, Index& iterations, Index limit,
                      Index refresh) {
    Index since = 0;
    while (true) {
      const Index enter = entering(allowed);
      if (enter < 0) return PhaseResult::optimal;
      if (iterations >= limit) return PhaseResult::iteration_limit;

      Index leave = -1;
      double best = std::numeric_limits<double>::infinity();
      for (Index i = 0; i < m_; ++i) {
        const double piv = t_(i, enter);
        if (piv <= opt_.pivot_tol) continue;
        const double ratio = std::max(0.0, t_(i, cols_)) / piv;
        if (leave < 0) {
          best = ratio;
          leave = i;
          continue;
        }
        const bool tie = std::abs(ratio - best) <= 1e-12 * (1.0 + std::abs(best));
        if (ratio < best && !tie) {
          best = ratio;
          leave = i;
        } else if (tie && basis_[static_cast<std::size_t>(i)] <
                              basis_[static_cast<std::size_t>(leave)]) {
          leave = i;
        }
      }
      if (leave < 0) return PhaseResult::unbounded;
      pivot(leave, enter);
      ++iterations;
      if (++since >= refresh) {
        since = 0;
        reinvert();
      }
    }
  }

  const Matrix& full_;
  const Vector& rhs_;
  std::vector<Index> basis_;
  Index m_;
  Index cols_;
  LpOptions opt_;
  Tableau t_;
  Vector cost_;
};

LpResult solve_once(const Vector& c, const Matrix& a, const Vector& b,
                    std::span<const RowSense> sense, const LpOptions& options) {
  const Index m = a.rows();
  const Index n = a.cols();

  // Column layout: [structural | slacks for <= rows | artificials].
  Index n_slack = 0;
  for (auto s : sense) n_slack += (s == RowSense::less_equal);
  std::vector<Index> slack_col(static_cast<std::size_t>(m), -1);
  std::vector<double> row_sign(static_cast<std::size_t>(m), 1.0);
  std::vector<bool> needs_art(static_cast<std::size_t>(m), false);
  Index n_art = 0;
  {
    Index next = n;
    for (Index i = 0; i < m; ++i) {
      const auto iu = static_cast<std::size_t>(i);
      if (sense[iu] == RowSense::less_equal) slack_col[iu] = next++;
      if (b[i] < 0.0) row_sign[iu] = -1.0;
      needs_art[iu] = sense[iu] == RowSense::equal || b[i] < 0.0;
      n_art += needs_art[iu];
    }
  }
  const Index cols = n + n_slack + n_art;

  // Equality-form matrix, kept for the final basis re-solve.
  Matrix full = Matrix::Zero(m, cols);
  Vector rhs(m);
  std::vector<Index> basis(static_cast<std::size_t>(m));
  {
    Index next_art = n + n_slack;
    for (Index i = 0; i < m; ++i) {
      const auto iu = static_cast<std::size_t>(i);
      const double s = row_sign[iu];
      full.row(i).head(n) = s * a.row(i);
      if (slack_col[iu] >= 0) full(i, slack_col[iu]) = s;
      rhs[i] = s * b[i];
      if (needs_art[iu]) {
        full(i, next_art) = 1.0;
        basis[iu] = next_art++;
      } else {
        basis[iu] = slack_col[iu];
      }
    }
  }

  Simplex sx(full, rhs, std::move(basis), options);
  const Index limit = options.max_iterations > 0 ? options.max_iterations : 50 * cols;
  LpResult result;
  std::vector<bool> allowed(static_cast<std::size_t>(cols), true);

  if (n_art > 0) {
    Vector phase1 = Vector::Zero(cols);
    phase1.tail(n_art).setOnes();
    sx.set_cost(phase1);
    const auto r1 = sx.run(allowed, result.iterations, limit);
    if (r1 == PhaseResult::iteration_limit) {
      result.status = LpStatus::iteration_limit;
      return result;
    }
    // Objective row RHS holds minus the phase-one objective.
    const double infeas = -sx.tableau()(m, cols);
    if (infeas > options.feasibility_tol * (1.0 + rhs.cwiseAbs().maxCoeff())) {
      result.status = LpStatus::infeasible;
      return result;
    }
    // Pivot artificials that stay basic at zero level out of the basis.
    for (Index i = 0; i < m; ++i) {
      if (sx.basis()[static_cast<std::size_t>(i)] < n + n_slack) continue;
      for (Index j = 0; j < n + n_slack; ++j) {
        if (std::abs(sx.tableau()(i, j)) > options.pivot_tol) {
          sx.pivot(i, j);
          break;
        }
      }
    }
    for (Index j = n + n_slack; j < cols; ++j) allowed[static_cast<std::size_t>(j)] = false;
  }

  Vector cost = Vector::Zero(cols);
  cost.head(n) = c;
  sx.set_cost(cost);
  const auto r2 = sx.run(allowed, result.iterations, limit);
  if (r2 == PhaseResult::iteration_limit) {
    result.status = LpStatus::iteration_limit;
    return result;
  }
  if (r2 == PhaseResult::unbounded) {
    result.status = LpStatus::unbounded;
    return result;
  }

  Vector xfull = Vector::Zero(cols);
  const auto& basis_final = sx.basis();
  for (Index i = 0; i < m; ++i)
    xfull[basis_final[static_cast<std::size_t>(i)]] = sx.tableau()(i, cols);

  // Re-solve B x_B = rhs from the original data to shed accumulated pivot
  // round-off. Skipped when a redundant row left an artificial in the basis.
  bool clean_basis = true;
  for (Index bi : basis_final) clean_basis = clean_basis && bi < n + n_slack;
  if (clean_basis && m > 0) {
    Matrix bmat(m, m);
    for (Index i = 0; i < m; ++i) bmat.col(i) = full.col(basis_final[static_cast<std::size_t>(i)]);
    Eigen::FullPivLU<Matrix> lu(bmat);
    if (lu.isInvertible()) {
      const Vector xb = lu.solve(rhs);
      if (xb.minCoeff() >= -1e-9) {
        xfull.setZero();
        for (Index i = 0; i < m; ++i)
          xfull[basis_final[static_cast<std::size_t>(i)]] = std::max(0.0, xb[i]);
      }
    }
  }

  result.x = xfull.head(n);
  result.objective = c.dot(result.x);
  result.status = LpStatus::optimal;
  return result;
}

bool satisfies(const LpResult& r, const Matrix& a, const Vector& b,
               std::span<const RowSense> sense, double tol) {
  const Vector ax = a * r.x;
  for (Index i = 0; i < a.rows(); ++i) {
    const double slack = tol * (1.0 + std::abs(b[i]));
    const double gap = ax[i] - b[i];
    if (gap > slack) return false;
    if (sense[static_cast<std::size_t>(i)] == RowSense::equal && -gap > slack) return false;
  }
  return r.x.size() == 0 || r.x.minCoeff() >= -tol;
}

}  // namespace

LpResult lp_solve(const Vector& c, const Matrix& a, const Vector& b, std::span<const RowSense> sense,
                  const LpOptions& options) {
  if (c.size() != a.cols() || b.size() != a.rows() || static_cast<Index>(sense.size()) != a.rows())
    throw Error(ErrorCode::dimension, "lp_solve: inconsistent problem dimensions");
  // A tiny pivot can wreck the tableau; a vertex that fails the original
  // constraints is recomputed with a coarser pivot tolerance.
  LpOptions opt = options;
  LpResult r;
  Index spent = 0;
  for (int attempt = 0; attempt < 3; ++attempt, opt.pivot_tol *= 100.0) {
    r = solve_once(c, a, b, sense, opt);
    spent += r.iterations;
    if (r.status != LpStatus::optimal || satisfies(r, a, b, sense, 1e-9)) break;
  }
  r.iterations = spent;
  return r;
}

}  // namespace tvnpn

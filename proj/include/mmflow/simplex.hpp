#pragma once

// Dense two-phase primal simplex with Bland's rule and dual extraction.
//
// Problems are stated as maximize c^T x subject to rows a_i^T x {<=,=,>=} b_i
// and x >= 0. Each row is first scaled by -1 if needed so that b_i >= 0, then
// receives one identity column (its slack for <=, an artificial otherwise)
// and, for >=, a surplus column. Artificials never re-enter the basis.
// The dual of row i is c_B^T B^{-1} e_i read off the identity column, with
// the sign restored for flipped rows, so that for a maximization a <= row has
// a nonnegative dual, a >= row a nonpositive one and an = row a free one.
//
// Works over `double` (pivot and optimality tolerances 1e-9 scaled by the
// data) and over `Rational` (exact; guarantees Bland's finite termination).

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "mmflow/rational.hpp"

namespace mmflow {

enum class Sense { LessEqual, Equal, GreaterEqual };
enum class LpStatus { Optimal, Infeasible, Unbounded };

inline const char* to_string(LpStatus s) {
  switch (s) {
    case LpStatus::Optimal: return "optimal";
    case LpStatus::Infeasible: return "infeasible";
    case LpStatus::Unbounded: return "unbounded";
  }
  return "?";
}

class LpError : public std::runtime_error {
 public:
  LpError(const std::string& what, LpStatus status) : std::runtime_error(what), status_(status) {}
  LpStatus status() const { return status_; }

 private:
  LpStatus status_;
};

template <typename Scalar>
struct LpTerm {
  std::size_t variable;
  Scalar coefficient;
};

template <typename Scalar>
struct LpConstraint {
  std::vector<LpTerm<Scalar>> terms;
  Sense sense = Sense::LessEqual;
  Scalar rhs{0};
};

/// maximize objective^T x over x >= 0 subject to the constraints.
template <typename Scalar>
class LinearProgram {
 public:
  std::size_t add_variable(Scalar objective_coefficient = Scalar(0)) {
    objective_.push_back(std::move(objective_coefficient));
    return objective_.size() - 1;
  }

  void set_objective(std::size_t variable, Scalar coefficient) {
    objective_.at(variable) = std::move(coefficient);
  }

  std::size_t add_constraint(std::vector<LpTerm<Scalar>> terms, Sense sense, Scalar rhs) {
    for (const auto& t : terms)
      if (t.variable >= objective_.size()) throw std::out_of_range("constraint names an unknown variable");
    constraints_.push_back({std::move(terms), sense, std::move(rhs)});
    return constraints_.size() - 1;
  }

  std::size_t num_variables() const { return objective_.size(); }
  std::size_t num_constraints() const { return constraints_.size(); }
  const std::vector<Scalar>& objective() const { return objective_; }
  const std::vector<LpConstraint<Scalar>>& constraints() const { return constraints_; }

 private:
  std::vector<Scalar> objective_;
  std::vector<LpConstraint<Scalar>> constraints_;
};

template <typename Scalar>
struct LpResult {
  LpStatus status = LpStatus::Infeasible;
  Scalar objective{0};
  std::vector<Scalar> values;
  std::vector<Scalar> duals;
  std::size_t pivots = 0;
};

struct LpOptions {
  std::size_t max_pivots = 5'000'000;
};

namespace detail {

template <typename Scalar>
class Tableau {
 public:
  Tableau(const LinearProgram<Scalar>& lp) : n_(lp.num_variables()), m_(lp.num_constraints()) {
    const auto& rows = lp.constraints();
    std::size_t surplus = 0;
    flipped_.assign(m_, false);
    std::vector<Sense> senses(m_);
    for (std::size_t i = 0; i < m_; ++i) {
      senses[i] = rows[i].sense;
      if (rows[i].rhs < 0) {
        flipped_[i] = true;
        if (senses[i] == Sense::LessEqual) senses[i] = Sense::GreaterEqual;
        else if (senses[i] == Sense::GreaterEqual) senses[i] = Sense::LessEqual;
      }
      if (senses[i] == Sense::GreaterEqual) ++surplus;
    }
    identity_begin_ = n_ + surplus;
    cols_ = identity_begin_ + m_;
    a_.assign(m_ * cols_, Scalar(0));
    b_.assign(m_, Scalar(0));
    artificial_.assign(cols_, false);
    basis_.assign(m_, 0);

    std::size_t next_surplus = n_;
    for (std::size_t i = 0; i < m_; ++i) {
      const Scalar sign = flipped_[i] ? Scalar(-1) : Scalar(1);
      for (const auto& t : rows[i].terms) at(i, t.variable) += sign * t.coefficient;
      b_[i] = sign * rows[i].rhs;
      if (senses[i] == Sense::GreaterEqual) at(i, next_surplus++) = Scalar(-1);
      const std::size_t id = identity_begin_ + i;
      at(i, id) = Scalar(1);
      artificial_[id] = senses[i] != Sense::LessEqual;
      basis_[i] = id;
    }

    if constexpr (!ScalarTraits<Scalar>::exact) {
      double scale = 1.0;
      for (const auto& x : a_) scale = std::max(scale, std::abs(x));
      for (const auto& x : b_) scale = std::max(scale, std::abs(x));
      eps_ = 1e-9 * scale;
    }
  }

  // Runs the simplex for objective c (length cols_). Returns false if unbounded.
  bool optimize(const std::vector<Scalar>& c, std::size_t& pivots, const LpOptions& options) {
    price(c);
    for (;;) {
      std::size_t entering = cols_;
      for (std::size_t j = 0; j < cols_; ++j) {
        if (artificial_[j] || is_basic(j)) continue;
        if (positive(reduced_[j])) {
          entering = j;
          break;
        }
      }
      if (entering == cols_) return true;

      std::size_t leaving = m_;
      Scalar best_ratio{0};
      for (std::size_t i = 0; i < m_; ++i) {
        const Scalar& coef = at(i, entering);
        if (!positive(coef)) continue;
        Scalar ratio = b_[i] / coef;
        if (leaving == m_ || less(ratio, best_ratio) ||
            (!less(best_ratio, ratio) && basis_[i] < basis_[leaving])) {
          leaving = i;
          best_ratio = ratio;
        }
      }
      if (leaving == m_) return false;
      pivot(leaving, entering);
      if (++pivots > options.max_pivots) throw LpError("simplex pivot limit reached", LpStatus::Infeasible);
    }
  }

  LpResult<Scalar> solve(const std::vector<Scalar>& objective, const LpOptions& options) {
    LpResult<Scalar> result;
    // Phase 1: maximize -sum(artificials).
    std::vector<Scalar> phase1(cols_, Scalar(0));
    bool any_artificial = false;
    for (std::size_t j = 0; j < cols_; ++j)
      if (artificial_[j]) {
        phase1[j] = Scalar(-1);
        any_artificial = true;
      }
    if (any_artificial) {
      optimize(phase1, result.pivots, options);
      Scalar infeasibility(0);
      for (std::size_t i = 0; i < m_; ++i)
        if (artificial_[basis_[i]]) infeasibility += b_[i];
      if (positive(infeasibility)) {
        result.status = LpStatus::Infeasible;
        return result;
      }
      // Drive zero-valued artificials out where a structural pivot exists.
      for (std::size_t i = 0; i < m_; ++i) {
        if (!artificial_[basis_[i]]) continue;
        for (std::size_t j = 0; j < identity_begin_ + m_; ++j) {
          if (artificial_[j] || is_basic(j) || !nonzero(at(i, j))) continue;
          pivot(i, j);
          ++result.pivots;
          break;
        }
      }
    }

    std::vector<Scalar> phase2(cols_, Scalar(0));
    for (std::size_t j = 0; j < n_; ++j) phase2[j] = objective[j];
    if (!optimize(phase2, result.pivots, options)) {
      result.status = LpStatus::Unbounded;
      return result;
    }

    result.status = LpStatus::Optimal;
    result.values.assign(n_, Scalar(0));
    for (std::size_t i = 0; i < m_; ++i)
      if (basis_[i] < n_) result.values[basis_[i]] = b_[i];
    result.objective = Scalar(0);
    for (std::size_t j = 0; j < n_; ++j) result.objective += objective[j] * result.values[j];
    result.duals.assign(m_, Scalar(0));
    for (std::size_t r = 0; r < m_; ++r) {
      Scalar y(0);
      for (std::size_t i = 0; i < m_; ++i) {
        const Scalar& cb = phase2[basis_[i]];
        if (nonzero(cb)) y += cb * at(i, identity_begin_ + r);
      }
      result.duals[r] = flipped_[r] ? Scalar(-y) : y;
    }
    return result;
  }

 private:
  Scalar& at(std::size_t i, std::size_t j) { return a_[i * cols_ + j]; }
  const Scalar& at(std::size_t i, std::size_t j) const { return a_[i * cols_ + j]; }

  bool is_basic(std::size_t j) const { return in_basis_.size() == cols_ && in_basis_[j]; }

  bool positive(const Scalar& x) const { return x > eps_; }
  bool nonzero(const Scalar& x) const {
    if constexpr (ScalarTraits<Scalar>::exact) return x != 0;
    else return std::abs(x) > eps_;
  }
  bool less(const Scalar& x, const Scalar& y) const {
    if constexpr (ScalarTraits<Scalar>::exact) return x < y;
    else return x < y - eps_;
  }

  void refresh_basis_flags() {
    in_basis_.assign(cols_, false);
    for (std::size_t j : basis_) in_basis_[j] = true;
  }

  // reduced_j = c_j - c_B^T B^{-1} A_j
  void price(const std::vector<Scalar>& c) {
    refresh_basis_flags();
    reduced_ = c;
    for (std::size_t i = 0; i < m_; ++i) {
      const Scalar& cb = c[basis_[i]];
      if (!nonzero(cb)) continue;
      for (std::size_t j = 0; j < cols_; ++j) {
        const Scalar& aij = at(i, j);
        if (nonzero(aij)) reduced_[j] -= cb * aij;
      }
    }
  }

  void pivot(std::size_t row, std::size_t col) {
    const Scalar inverse = Scalar(1) / at(row, col);
    std::vector<std::size_t> support;
    for (std::size_t j = 0; j < cols_; ++j) {
      Scalar& x = at(row, j);
      if (!nonzero(x)) {
        if constexpr (!ScalarTraits<Scalar>::exact) x = 0;
        continue;
      }
      x *= inverse;
      support.push_back(j);
    }
    at(row, col) = Scalar(1);
    b_[row] *= inverse;

    auto eliminate = [&](Scalar* target, Scalar& rhs, Scalar factor) {
      for (std::size_t j : support) target[j] -= factor * at(row, j);
      target[col] = Scalar(0);
      rhs -= factor * b_[row];
    };
    for (std::size_t i = 0; i < m_; ++i) {
      if (i == row) continue;
      const Scalar factor = at(i, col);
      if (!nonzero(factor)) {
        if constexpr (!ScalarTraits<Scalar>::exact) at(i, col) = 0;
        continue;
      }
      eliminate(&a_[i * cols_], b_[i], factor);
      if constexpr (!ScalarTraits<Scalar>::exact)
        if (b_[i] < 0 && b_[i] > -eps_) b_[i] = 0;
    }
    if (!reduced_.empty()) {
      const Scalar factor = reduced_[col];
      if (nonzero(factor)) {
        Scalar dummy(0);
        eliminate(reduced_.data(), dummy, factor);
      }
      reduced_[col] = Scalar(0);
    }
    in_basis_[basis_[row]] = false;
    basis_[row] = col;
    in_basis_[col] = true;
  }

  std::size_t n_, m_;
  std::size_t identity_begin_ = 0;
  std::size_t cols_ = 0;
  std::vector<Scalar> a_;
  std::vector<Scalar> b_;
  std::vector<Scalar> reduced_;
  std::vector<std::size_t> basis_;
  std::vector<bool> in_basis_;
  std::vector<bool> artificial_;
  std::vector<bool> flipped_;
  Scalar eps_{0};
};

}  // namespace detail

template <typename Scalar>
LpResult<Scalar> lp_solve(const LinearProgram<Scalar>& lp, const LpOptions& options = {}) {
  detail::Tableau<Scalar> tableau(lp);
  return tableau.solve(lp.objective(), options);
}

/// Among all optimal dual solutions of `lp` (whose optimum is `optimum`),
/// one minimizing max_{i in rows} y_i, found by solving the dual program with
/// that objective. Returns duals for every row, same sign convention as
/// lp_solve. Falls back to `fallback` if the auxiliary program fails.
template <typename Scalar>
std::vector<Scalar> balanced_duals(const LinearProgram<Scalar>& lp, const Scalar& optimum,
                                   const std::vector<std::size_t>& rows,
                                   const std::vector<Scalar>& fallback, const LpOptions& options = {}) {
  LinearProgram<Scalar> dual;
  const auto& cons = lp.constraints();
  // y_i = sign_i * (plus_i - minus_i); minus only for equality rows.
  std::vector<std::size_t> plus(cons.size()), minus(cons.size(), SIZE_MAX);
  std::vector<int> sign(cons.size(), 1);
  for (std::size_t i = 0; i < cons.size(); ++i) {
    plus[i] = dual.add_variable();
    if (cons[i].sense == Sense::Equal) minus[i] = dual.add_variable();
    if (cons[i].sense == Sense::GreaterEqual) sign[i] = -1;
  }
  const std::size_t t = dual.add_variable(Scalar(-1));

  std::vector<std::vector<LpTerm<Scalar>>> columns(lp.num_variables());
  std::vector<LpTerm<Scalar>> objective_row;
  for (std::size_t i = 0; i < cons.size(); ++i) {
    for (const auto& term : cons[i].terms) {
      const Scalar a = sign[i] > 0 ? term.coefficient : Scalar(-term.coefficient);
      columns[term.variable].push_back({plus[i], a});
      if (minus[i] != SIZE_MAX) columns[term.variable].push_back({minus[i], Scalar(-a)});
    }
    if (cons[i].rhs != 0) {
      const Scalar b = sign[i] > 0 ? cons[i].rhs : Scalar(-cons[i].rhs);
      objective_row.push_back({plus[i], b});
      if (minus[i] != SIZE_MAX) objective_row.push_back({minus[i], Scalar(-b)});
    }
  }
  for (std::size_t j = 0; j < lp.num_variables(); ++j)
    dual.add_constraint(std::move(columns[j]), Sense::GreaterEqual, lp.objective()[j]);
  Scalar bound = optimum;
  if constexpr (!ScalarTraits<Scalar>::exact) {
    using std::abs;
    bound += 1e-9 * (1 + abs(optimum));
  }
  dual.add_constraint(std::move(objective_row), Sense::LessEqual, bound);
  for (std::size_t i : rows) {
    std::vector<LpTerm<Scalar>> terms{{plus[i], Scalar(sign[i])}, {t, Scalar(-1)}};
    if (minus[i] != SIZE_MAX) terms.push_back({minus[i], Scalar(-sign[i])});
    dual.add_constraint(std::move(terms), Sense::LessEqual, Scalar(0));
  }

  const auto result = lp_solve(dual, options);
  if (result.status != LpStatus::Optimal) return fallback;
  std::vector<Scalar> y(cons.size());
  for (std::size_t i = 0; i < cons.size(); ++i) {
    Scalar v = result.values[plus[i]];
    if (minus[i] != SIZE_MAX) v -= result.values[minus[i]];
    y[i] = sign[i] > 0 ? v : Scalar(-v);
  }
  return y;
}

}  // namespace mmflow

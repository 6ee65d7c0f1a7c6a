#pragma once

#include <cstddef>
#include <optional>
#include <utility>
#include <vector>

#include "relumax/network.hpp"

namespace relumax::verify {

enum class Relation { kGe, kGt };

/// coeffs . x + offset  (>= | >)  0
struct Inequality {
  Vec coeffs;
  Rational offset;
  Relation rel = Relation::kGe;
};

class LinearSystem {
 public:
  explicit LinearSystem(std::size_t dim) : dim_(dim) {}

  std::size_t dim() const { return dim_; }
  const std::vector<Inequality>& rows() const { return rows_; }
  std::size_t size() const { return rows_.size(); }

  LinearSystem& add(Vec coeffs, Rational offset, Relation rel = Relation::kGe) {
    if (coeffs.size() != dim_) throw InvalidInput("linear system: coefficient vector has wrong dimension");
    rows_.push_back({std::move(coeffs), std::move(offset), rel});
    return *this;
  }
  LinearSystem& add(Inequality ineq) {
    return add(std::move(ineq.coeffs), std::move(ineq.offset), ineq.rel);
  }
  void pop_back() { rows_.pop_back(); }

  /// Every row holds at x (strict rows strictly).
  bool satisfied_by(const Vec& x) const {
    for (const auto& r : rows_) {
      const Rational v = dot(r.coeffs, x) + r.offset;
      if (r.rel == Relation::kGt ? v.sign() <= 0 : v.sign() < 0) return false;
    }
    return true;
  }

  /// Same rows with every relation relaxed to >=.
  bool closure_satisfied_by(const Vec& x) const {
    for (const auto& r : rows_)
      if ((dot(r.coeffs, x) + r.offset).sign() < 0) return false;
    return true;
  }

 private:
  std::size_t dim_;
  std::vector<Inequality> rows_;
};

namespace detail {

/// Dense exact simplex on  max c.z  s.t.  A z <= b, z >= 0, with Bland's
/// rule (no cycling). Two phases via one auxiliary variable.
class Simplex {
 public:
  Simplex(Matrix a, Vec b, Vec c) : m_(a.size()), n_(c.size()) {
    // columns: [0,n) structural, [n, n+m) slacks, n+m auxiliary
    cols_ = n_ + m_ + 1;
    aux_ = n_ + m_;
    t_.assign(m_, Vec(cols_));
    rhs_ = std::move(b);
    basis_.resize(m_);
    for (std::size_t i = 0; i < m_; ++i) {
      for (std::size_t j = 0; j < n_; ++j) t_[i][j] = std::move(a[i][j]);
      t_[i][n_ + i] = 1;
      t_[i][aux_] = -1;
      basis_[i] = n_ + i;
    }
    c_ = std::move(c);
  }

  enum class Status { kOptimal, kInfeasible, kUnbounded };

  Status solve() {
    std::size_t worst = m_;
    for (std::size_t i = 0; i < m_; ++i)
      if (rhs_[i].sign() < 0 && (worst == m_ || rhs_[i] < rhs_[worst])) worst = i;

    if (worst != m_) {
      // phase 1: maximise -aux
      obj_.assign(cols_, Rational());
      obj_[aux_] = -1;
      obj_value_ = Rational();
      pivot(worst, aux_);
      if (run() != Status::kOptimal) return Status::kInfeasible;  // cannot be unbounded
      if (obj_value_.sign() < 0) return Status::kInfeasible;
      for (std::size_t i = 0; i < m_; ++i) {
        if (basis_[i] != aux_) continue;
        for (std::size_t j = 0; j < cols_; ++j)
          if (j != aux_ && !t_[i][j].is_zero()) {
            pivot(i, j);
            break;
          }
      }
    }
    banned_aux_ = true;

    // phase 2: price out the basic columns of c
    obj_.assign(cols_, Rational());
    for (std::size_t j = 0; j < n_; ++j) obj_[j] = c_[j];
    obj_value_ = Rational();
    for (std::size_t i = 0; i < m_; ++i) {
      const Rational f = obj_[basis_[i]];
      if (f.is_zero()) continue;
      for (std::size_t j = 0; j < cols_; ++j)
        if (!t_[i][j].is_zero()) obj_[j] -= f * t_[i][j];
      obj_value_ += f * rhs_[i];
    }
    return run();
  }

  const Rational& objective() const { return obj_value_; }

  Vec primal() const {
    Vec z(n_);
    for (std::size_t i = 0; i < m_; ++i)
      if (basis_[i] < n_) z[basis_[i]] = rhs_[i];
    return z;
  }

 private:
  Status run() {
    for (;;) {
      std::size_t enter = cols_;
      for (std::size_t j = 0; j < cols_; ++j) {
        if (banned_aux_ && j == aux_) continue;
        if (obj_[j].sign() > 0) {
          enter = j;
          break;
        }
      }
      if (enter == cols_) return Status::kOptimal;
      std::size_t leave = m_;
      Rational best;
      for (std::size_t i = 0; i < m_; ++i) {
        if (t_[i][enter].sign() <= 0) continue;
        Rational ratio = rhs_[i] / t_[i][enter];
        if (leave == m_ || ratio < best || (ratio == best && basis_[i] < basis_[leave])) {
          leave = i;
          best = std::move(ratio);
        }
      }
      if (leave == m_) return Status::kUnbounded;
      pivot(leave, enter);
    }
  }

  void pivot(std::size_t row, std::size_t col) {
    const Rational piv = t_[row][col];
    for (auto& v : t_[row])
      if (!v.is_zero()) v /= piv;
    rhs_[row] /= piv;
    for (std::size_t i = 0; i < m_; ++i) {
      if (i == row || t_[i][col].is_zero()) continue;
      const Rational f = t_[i][col];
      for (std::size_t j = 0; j < cols_; ++j)
        if (!t_[row][j].is_zero()) t_[i][j] -= f * t_[row][j];
      rhs_[i] -= f * rhs_[row];
    }
    if (!obj_[col].is_zero()) {
      const Rational f = obj_[col];
      for (std::size_t j = 0; j < cols_; ++j)
        if (!t_[row][j].is_zero()) obj_[j] -= f * t_[row][j];
      obj_value_ += f * rhs_[row];
    }
    basis_[row] = col;
  }

  std::size_t m_, n_, cols_ = 0, aux_ = 0;
  Matrix t_;
  Vec rhs_, c_, obj_;
  Rational obj_value_;
  std::vector<std::size_t> basis_;
  bool banned_aux_ = false;
};

}  // namespace detail

/// Point of `box` satisfying every row of `sys` (strict rows strictly), or
/// nullopt when none exists. With `open_box` the point must also lie in the
/// box interior. Strictness is decided by maximising a common slack s
/// (capped at 1) and requiring s > 0; the witness is that optimal vertex.
inline std::optional<Vec> feasible(const LinearSystem& sys, const Box& box, bool open_box = false) {
  const std::size_t d = sys.dim();
  if (box.dim() != d) throw InvalidInput("feasible: box and system dimensions differ");

  bool strict = open_box;
  for (const auto& r : sys.rows()) strict = strict || r.rel == Relation::kGt;
  if (open_box)
    for (const auto& s : box.sides())
      if (s.lo == s.hi) return std::nullopt;

  // variables y = x - lo in [0, hi - lo], plus slack s when strict
  const std::size_t n = d + (strict ? 1 : 0);
  Matrix a;
  Vec b;
  auto row = [&]() { return Vec(n); };
  for (const auto& r : sys.rows()) {
    // r.coeffs.(y+lo) + offset >= [s]   <=>   -coeffs.y + [s] <= coeffs.lo + offset
    Vec v = row();
    Rational rhs = r.offset;
    for (std::size_t i = 0; i < d; ++i) {
      v[i] = -r.coeffs[i];
      rhs += r.coeffs[i] * box.side(i).lo;
    }
    if (r.rel == Relation::kGt) v[d] = 1;
    a.push_back(std::move(v));
    b.push_back(std::move(rhs));
  }
  for (std::size_t i = 0; i < d; ++i) {
    Vec up = row();
    up[i] = 1;
    if (open_box) up[d] = 1;
    a.push_back(std::move(up));
    b.push_back(box.side(i).hi - box.side(i).lo);
    if (open_box) {
      Vec down = row();
      down[i] = -1;
      down[d] = 1;
      a.push_back(std::move(down));
      b.push_back(Rational());
    }
  }
  Vec c(n);
  if (strict) {
    Vec cap = row();
    cap[d] = 1;
    a.push_back(std::move(cap));
    b.push_back(Rational(1));
    c[d] = 1;
  }

  detail::Simplex lp(std::move(a), std::move(b), std::move(c));
  if (lp.solve() != detail::Simplex::Status::kOptimal) return std::nullopt;
  if (strict && lp.objective().sign() <= 0) return std::nullopt;
  Vec z = lp.primal();
  Vec x(d);
  for (std::size_t i = 0; i < d; ++i) x[i] = z[i] + box.side(i).lo;
  return x;
}

}  // namespace relumax::verify

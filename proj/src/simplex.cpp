#include "dyndim/simplex.hpp"

#include "dyndim/error.hpp"

namespace dyndim {

namespace {

struct Tableau {
  // rows[i][j] for i in 0..m-1, j in 0..n; column n is the right-hand side
  std::vector<std::vector<Rat>> rows;
  std::vector<Rat> obj;  // reduced costs, obj[n] = -current value
  std::vector<int> basis;
  int n = 0;

  void pivot(int r, int col) {
    Rat p = rows[r][col];
    for (auto& v : rows[r]) v /= p;
    for (std::size_t i = 0; i < rows.size(); ++i) {
      if ((int)i == r || rows[i][col] == 0) continue;
      Rat f = rows[i][col];
      for (int j = 0; j <= n; ++j) rows[i][j] -= f * rows[r][j];
    }
    if (obj[col] != 0) {
      Rat f = obj[col];
      for (int j = 0; j <= n; ++j) obj[j] -= f * rows[r][j];
    }
    basis[r] = col;
  }

  // Bland: entering = least index with positive reduced cost; leaving = the
  // ratio-test row whose basic variable has least index
  LpStatus run(int allowed_cols) {
    while (true) {
      int col = -1;
      for (int j = 0; j < allowed_cols; ++j)
        if (obj[j] > 0) {
          col = j;
          break;
        }
      if (col < 0) return LpStatus::Optimal;
      int r = -1;
      Rat best;
      for (std::size_t i = 0; i < rows.size(); ++i) {
        if (rows[i][col] <= 0) continue;
        Rat ratio = rows[i][n] / rows[i][col];
        if (r < 0 || ratio < best || (ratio == best && basis[i] < basis[r])) {
          r = (int)i;
          best = ratio;
        }
      }
      if (r < 0) return LpStatus::Unbounded;
      pivot(r, col);
    }
  }
};

}  // namespace

LpResult lp_solve_max(const LpProblem& p) {
  int m = (int)p.a.size();
  int n = (int)p.c.size();
  if ((int)p.b.size() != m) throw ValidationError("rhs length does not match row count");
  for (const auto& row : p.a)
    if ((int)row.size() != n) throw ValidationError("ragged constraint matrix");

  Tableau t;
  t.n = n + m;  // artificial variable per row
  t.basis.resize(m);
  t.rows.assign(m, std::vector<Rat>(t.n + 1, Rat(0)));
  for (int i = 0; i < m; ++i) {
    bool neg = p.b[i] < 0;
    for (int j = 0; j < n; ++j) t.rows[i][j] = neg ? -p.a[i][j] : p.a[i][j];
    t.rows[i][t.n] = neg ? -p.b[i] : p.b[i];
    t.rows[i][n + i] = 1;
    t.basis[i] = n + i;
  }

  // Phase 1: maximize minus the artificial mass. With the artificial basis,
  // the reduced cost of a real column is the column sum, and the stored
  // right-hand entry is minus the objective value (zero iff feasible).
  t.obj.assign(t.n + 1, Rat(0));
  for (int i = 0; i < m; ++i) {
    for (int j = 0; j < n; ++j) t.obj[j] += t.rows[i][j];
    t.obj[t.n] += t.rows[i][t.n];
  }
  if (t.run(n) != LpStatus::Optimal) throw InternalError("phase one cannot be unbounded");
  if (t.obj[t.n] != 0) {
    LpResult res;
    res.status = LpStatus::Infeasible;
    return res;
  }
  // pivot surviving artificials out; a row with no real pivot is redundant
  for (int i = m - 1; i >= 0; --i) {
    if (t.basis[i] < n) continue;
    int col = -1;
    for (int j = 0; j < n; ++j)
      if (t.rows[i][j] != 0) {
        col = j;
        break;
      }
    if (col >= 0) {
      t.pivot(i, col);
    } else {
      t.rows.erase(t.rows.begin() + i);
      t.basis.erase(t.basis.begin() + i);
    }
  }

  // phase 2: original objective over the feasible basis
  t.obj.assign(t.n + 1, Rat(0));
  for (int j = 0; j < n; ++j) t.obj[j] = p.c[j];
  for (std::size_t i = 0; i < t.rows.size(); ++i) {
    int bj = t.basis[i];
    if (bj < n && p.c[bj] != 0) {
      Rat f = p.c[bj];
      for (int j = 0; j <= t.n; ++j) t.obj[j] -= f * t.rows[i][j];
    }
  }
  LpStatus st = t.run(n);
  LpResult res;
  res.status = st;
  if (st != LpStatus::Optimal) return res;
  res.x.assign(n, Rat(0));
  for (std::size_t i = 0; i < t.rows.size(); ++i)
    if (t.basis[i] < n) res.x[t.basis[i]] = t.rows[i][t.n];
  Rat val(0);
  for (int j = 0; j < n; ++j) val += p.c[j] * res.x[j];
  res.value = val;
  return res;
}

}  // namespace dyndim

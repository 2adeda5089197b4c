#include "knotnet/lp.hpp"

#include <cmath>
#include <limits>

namespace knotnet::lp {

namespace {

constexpr double kPivotEps = 1e-11;
constexpr double kCostEps = 1e-10;

class Tableau {
 public:
  Tableau(int rows, int cols) : rows_(rows), cols_(cols), t_((rows + 1) * (cols + 1), 0.0), basis_(rows, -1) {}

  double& at(int r, int c) { return t_[r * (cols_ + 1) + c]; }
  double& rhs(int r) { return at(r, cols_); }
  double& obj(int c) { return at(rows_, c); }
  std::vector<int>& basis() { return basis_; }

  void pivot(int pr, int pc) {
    double p = at(pr, pc);
    for (int c = 0; c <= cols_; ++c) at(pr, c) /= p;
    for (int r = 0; r <= rows_; ++r) {
      if (r == pr) continue;
      double f = at(r, pc);
      if (f == 0.0) continue;
      for (int c = 0; c <= cols_; ++c) at(r, c) -= f * at(pr, c);
      at(r, pc) = 0.0;
    }
    basis_[pr] = pc;
  }

  // Bland's rule on columns [0, allowed). Objective row holds negated reduced costs.
  Status run(int allowed) {
    const int max_iter = 50000;
    for (int it = 0; it < max_iter; ++it) {
      int pc = -1;
      for (int c = 0; c < allowed; ++c) {
        if (obj(c) < -kCostEps) {
          pc = c;
          break;
        }
      }
      if (pc < 0) return Status::Optimal;
      int pr = -1;
      double best = std::numeric_limits<double>::infinity();
      for (int r = 0; r < rows_; ++r) {
        double a = at(r, pc);
        if (a > kPivotEps) {
          double ratio = rhs(r) / a;
          if (ratio < best - 1e-14 || (std::fabs(ratio - best) <= 1e-14 && pr >= 0 && basis_[r] < basis_[pr])) {
            best = ratio;
            pr = r;
          }
        }
      }
      if (pr < 0) return Status::Unbounded;
      pivot(pr, pc);
    }
    return Status::Optimal;
  }

  int rows() const { return rows_; }
  int cols() const { return cols_; }

 private:
  int rows_;
  int cols_;
  std::vector<double> t_;
  std::vector<int> basis_;
};

}  // namespace

Result maximize(const std::vector<Vec>& A, const Vec& b, const Vec& c) {
  const int m = static_cast<int>(A.size());
  const int nv = static_cast<int>(c.size());
  int n_art = 0;
  for (int i = 0; i < m; ++i)
    if (b[i] < 0.0) ++n_art;

  // columns: structural | slack | artificial
  const int cols = nv + m + n_art;
  Tableau t(m, cols);
  int art = nv + m;
  for (int i = 0; i < m; ++i) {
    double sgn = b[i] < 0.0 ? -1.0 : 1.0;
    for (int j = 0; j < nv; ++j) t.at(i, j) = sgn * A[i][j];
    t.at(i, nv + i) = sgn;
    t.rhs(i) = sgn * b[i];
    if (sgn < 0.0) {
      t.at(i, art) = 1.0;
      t.basis()[i] = art;
      ++art;
    } else {
      t.basis()[i] = nv + i;
    }
  }

  Result res;
  if (n_art > 0) {
    // phase 1: maximize -sum(artificials)
    for (int i = 0; i < m; ++i) {
      if (t.basis()[i] >= nv + m) {
        for (int j = 0; j <= cols; ++j) {
          if (j >= nv + m && j < cols) continue;
          t.obj(j) -= t.at(i, j);
        }
      }
    }
    t.run(cols);
    if (t.obj(cols) < -1e-9 * (1.0 + max_abs(b))) {
      res.status = Status::Infeasible;
      return res;
    }
    // drive remaining artificials out of the basis
    for (int i = 0; i < m; ++i) {
      if (t.basis()[i] < nv + m) continue;
      for (int j = 0; j < nv + m; ++j) {
        if (std::fabs(t.at(i, j)) > 1e-9) {
          t.pivot(i, j);
          break;
        }
      }
    }
  }

  // phase 2 objective expressed over the current basis
  for (int j = 0; j <= cols; ++j) t.obj(j) = 0.0;
  for (int j = 0; j < nv; ++j) t.obj(j) = -c[j];
  for (int i = 0; i < m; ++i) {
    int bv = t.basis()[i];
    if (bv < nv && c[bv] != 0.0) {
      double cb = c[bv];
      for (int j = 0; j <= cols; ++j) t.obj(j) += cb * t.at(i, j);
    }
  }
  Status st = t.run(nv + m);
  res.status = st;
  if (st != Status::Optimal) return res;
  res.x.assign(nv, 0.0);
  for (int i = 0; i < m; ++i) {
    int bv = t.basis()[i];
    if (bv < nv) res.x[bv] = t.rhs(i);
  }
  res.value = dot(c, res.x);
  return res;
}

}  // namespace knotnet::lp

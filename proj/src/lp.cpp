#include "qmh/lp.hpp"

#include "qmh/kernels.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>

namespace qmh {

namespace {

constexpr double kPivEps = 1e-11;
constexpr double kEnterEps = 1e-9;

struct Tableau {
  std::size_t m, n, width; // rows, structural cols, total row length
  std::vector<double> t;   // (m+1) x width
  std::vector<std::size_t> basis;

  double* row(std::size_t i) { return t.data() + i * width; }
  double& at(std::size_t i, std::size_t j) { return t[i * width + j]; }

  void pivot(std::size_t r, std::size_t q) {
    const auto& k = kernels::ops();
    double piv = at(r, q);
    k.scal(1.0 / piv, row(r), width);
    at(r, q) = 1.0;
    for (std::size_t i = 0; i <= m; ++i) {
      if (i == r) continue;
      double f = at(i, q);
      if (f != 0.0) {
        k.axpy(-f, row(r), row(i), width);
        at(i, q) = 0.0;
      }
    }
    basis[r] = q;
  }
};

} // namespace

LpSolution simplex_solve(std::size_t rows, std::size_t cols, std::vector<double> a,
                         std::vector<double> b, std::vector<double> c,
                         const LpOptions& opts) {
  LpSolution sol;
  const std::size_t m = rows, n = cols;
  if ((m + 1) * (n + m + 1) > 400000000ull)
    throw BudgetError("LP tableau would exceed the memory budget");

  std::vector<double> sign(m, 1.0);
  for (std::size_t i = 0; i < m; ++i)
    if (b[i] < 0) {
      sign[i] = -1.0;
      b[i] = -b[i];
      for (std::size_t j = 0; j < n; ++j) a[i * n + j] = -a[i * n + j];
    }

  Tableau tb;
  tb.m = m;
  tb.n = n;
  tb.width = n + m + 1;
  tb.t.assign((m + 1) * tb.width, 0.0);
  tb.basis.resize(m);
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < n; ++j) tb.at(i, j) = a[i * n + j];
    tb.at(i, n + i) = 1.0;
    tb.at(i, tb.width - 1) = b[i];
    tb.basis[i] = n + i;
  }
  // phase-1 objective: minimize the artificial sum
  for (std::size_t j = 0; j < n; ++j) {
    double s = 0.0;
    for (std::size_t i = 0; i < m; ++i) s += tb.at(i, j);
    tb.at(m, j) = -s;
  }
  {
    double s = 0.0;
    for (std::size_t i = 0; i < m; ++i) s += b[i];
    tb.at(m, tb.width - 1) = s;
  }

  long iters = 0;
  bool bland = false;
  int stall = 0;
  double last_corner = tb.at(m, tb.width - 1);

  auto iterate = [&](bool phase1) -> LpStatus {
    for (;;) {
      if (iters >= opts.max_iters) return LpStatus::IterLimit;
      // entering column (structural only; artificials never re-enter)
      std::size_t q = tb.width;
      double best = -kEnterEps;
      for (std::size_t j = 0; j < n; ++j) {
        double d = tb.at(m, j);
        if (d < best) {
          if (bland) {
            q = j;
            break;
          }
          best = d;
          q = j;
        } else if (bland && d < -kEnterEps && q == tb.width) {
          q = j;
          break;
        }
      }
      if (q == tb.width) return LpStatus::Optimal;

      // ratio test
      std::size_t r = m;
      double best_ratio = 0.0, best_piv = 0.0;
      for (std::size_t i = 0; i < m; ++i) {
        double piv = tb.at(i, q);
        if (piv <= kPivEps) continue;
        double ratio = tb.at(i, tb.width - 1) / piv;
        bool take = false;
        if (r == m || ratio < best_ratio - 1e-12) {
          take = true;
        } else if (ratio < best_ratio + 1e-12) {
          if (bland) {
            take = tb.basis[i] < tb.basis[r];
          } else {
            // prefer kicking artificials out, then the larger pivot
            bool iart = tb.basis[i] >= n, rart = tb.basis[r] >= n;
            if (iart != rart) take = iart;
            else take = std::fabs(piv) > std::fabs(best_piv);
          }
        }
        if (take) {
          r = i;
          best_ratio = ratio;
          best_piv = piv;
        }
      }
      if (r == m) return phase1 ? LpStatus::IterLimit : LpStatus::Unbounded;

      tb.pivot(r, q);
      ++iters;

      double corner = tb.at(m, tb.width - 1);
      if (std::fabs(corner - last_corner) < 1e-13 * (1.0 + std::fabs(corner))) {
        if (++stall > 200 && !bland) bland = true;
      } else {
        stall = 0;
      }
      last_corner = corner;
    }
  };

  LpStatus st = iterate(true);
  sol.iterations = iters;
  double z1 = tb.at(m, tb.width - 1);
  double bsum = 0.0;
  for (std::size_t i = 0; i < m; ++i) bsum += b[i];
  double feas_eps = opts.tol * (1.0 + bsum);

  if (st == LpStatus::IterLimit) {
    sol.status = LpStatus::IterLimit;
    return sol;
  }
  if (z1 > feas_eps) {
    sol.status = LpStatus::Infeasible;
    sol.farkas.resize(m);
    for (std::size_t i = 0; i < m; ++i) sol.farkas[i] = sign[i] * (1.0 - tb.at(m, n + i));
    return sol;
  }

  // drive out any artificials still basic (redundant rows stay put)
  for (std::size_t r = 0; r < m; ++r) {
    if (tb.basis[r] < n) continue;
    for (std::size_t j = 0; j < n; ++j)
      if (std::fabs(tb.at(r, j)) > 1e-9) {
        tb.pivot(r, j);
        ++iters;
        break;
      }
  }

  // phase 2
  for (std::size_t j = 0; j < n; ++j) tb.at(m, j) = j < c.size() ? c[j] : 0.0;
  for (std::size_t j = n; j < tb.width; ++j) tb.at(m, j) = 0.0;
  for (std::size_t r = 0; r < m; ++r) {
    if (tb.basis[r] >= n) continue;
    double cb = tb.basis[r] < c.size() ? c[tb.basis[r]] : 0.0;
    if (cb != 0.0) kernels::ops().axpy(-cb, tb.row(r), tb.row(m), tb.width);
  }
  bland = false;
  stall = 0;
  last_corner = tb.at(m, tb.width - 1);
  st = iterate(false);
  sol.iterations = iters;
  if (st != LpStatus::Optimal) {
    sol.status = st;
    return sol;
  }

  sol.status = LpStatus::Optimal;
  sol.x.assign(n, 0.0);
  for (std::size_t r = 0; r < m; ++r)
    if (tb.basis[r] < n) sol.x[tb.basis[r]] = tb.at(r, tb.width - 1);
  sol.objective = 0.0;
  for (std::size_t j = 0; j < n && j < c.size(); ++j) sol.objective += c[j] * sol.x[j];
  sol.duals.resize(m);
  for (std::size_t i = 0; i < m; ++i) sol.duals[i] = sign[i] * (0.0 - tb.at(m, n + i));
  return sol;
}

namespace {

struct DenseLp {
  std::size_t rows, cols;
  std::vector<double> a, b;
};

DenseLp densify(const ConeProgram& p) {
  if (p.kind != ConeKind::Nonneg)
    throw InputError("lp solver expects a nonnegative-orthant program");
  DenseLp d;
  d.rows = p.equalities.size();
  d.cols = p.n;
  d.a.assign(d.rows * d.cols, 0.0);
  d.b.resize(d.rows);
  for (std::size_t e = 0; e < d.rows; ++e) {
    for (const auto& [idx, v] : p.equalities[e].f.c) d.a[e * d.cols + idx] += v;
    d.b[e] = p.equalities[e].rhs;
  }
  return d;
}

// exact-order-independent recomputation of one equality residual
double residual_of(const ConeProgram& p, std::size_t e, const std::vector<double>& x) {
  long double acc = 0.0;
  const auto& f = p.equalities[e].f.c;
  for (auto it = f.rbegin(); it != f.rend(); ++it) acc += (long double)it->second * x[it->first];
  return static_cast<double>(acc - (long double)p.equalities[e].rhs);
}

Verdict verdict_from(const ConeProgram& p, const DenseLp& d, const LpSolution& sol,
                     const LpOptions& opts) {
  Verdict v;
  v.iterations = sol.iterations;
  switch (sol.status) {
    case LpStatus::Optimal: {
      double worst = 0.0, neg = 0.0;
      for (double xv : sol.x) neg = std::min(neg, xv);
      for (std::size_t e = 0; e < p.equalities.size(); ++e)
        worst = std::max(worst, std::fabs(residual_of(p, e, sol.x)));
      v.residuals.max_equality = worst;
      v.residuals.max_cut = -neg;
      if (worst <= opts.tol * 100 + 1e-12 && neg >= -opts.tol) {
        v.status = Status::Feasible;
        v.conclusive = true;
        v.witness = sol.x;
      } else {
        v.status = Status::Undecided;
        v.detail = "witness failed independent verification";
      }
      break;
    }
    case LpStatus::Infeasible: {
      std::vector<double> y = sol.farkas;
      double ymax = 0.0;
      for (double yy : y) ymax = std::max(ymax, std::fabs(yy));
      if (ymax == 0.0) {
        v.status = Status::Undecided;
        v.detail = "empty Farkas certificate";
        break;
      }
      for (double& yy : y) yy /= ymax;
      double support = 0.0;
      for (std::size_t j = 0; j < d.cols; ++j) {
        long double acc = 0.0;
        for (std::size_t i = d.rows; i-- > 0;) acc += (long double)y[i] * d.a[i * d.cols + j];
        support = std::max(support, static_cast<double>(acc));
      }
      long double gap = 0.0;
      for (std::size_t i = 0; i < d.rows; ++i) gap += (long double)y[i] * d.b[i];
      Certificate cert;
      cert.type = "farkas";
      cert.multipliers = y;
      cert.gap = static_cast<double>(gap);
      cert.support_residual = support;
      if (support <= 1e-7 && cert.gap >= std::max(1e-7, 10.0 * support)) {
        v.status = Status::Infeasible;
        v.conclusive = true;
        v.certificate = std::move(cert);
      } else {
        v.status = Status::Undecided;
        v.certificate = std::move(cert);
        v.detail = "Farkas certificate failed independent verification";
      }
      break;
    }
    case LpStatus::Unbounded:
      v.status = Status::Undecided;
      v.detail = "unexpected unbounded phase";
      break;
    case LpStatus::IterLimit:
      v.status = Status::Undecided;
      v.detail = "iteration limit";
      break;
  }
  return v;
}

} // namespace

Verdict lp_feasibility(const ConeProgram& p, const LpOptions& opts) {
  auto t0 = std::chrono::steady_clock::now();
  DenseLp d = densify(p);
  LpSolution sol =
      simplex_solve(d.rows, d.cols, d.a, d.b, std::vector<double>(d.cols, 0.0), opts);
  Verdict v = verdict_from(p, d, sol, opts);
  v.wall_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0)
                  .count();
  return v;
}

LpOptimum lp_optimize(const ConeProgram& p, const std::vector<double>& objective, bool maximize,
                      const LpOptions& opts) {
  auto t0 = std::chrono::steady_clock::now();
  DenseLp d = densify(p);
  std::vector<double> c = objective;
  c.resize(d.cols, 0.0);
  if (maximize)
    for (double& v : c) v = -v;
  LpSolution sol = simplex_solve(d.rows, d.cols, d.a, d.b, c, opts);
  LpOptimum out;
  out.verdict = verdict_from(p, d, sol, opts);
  if (out.verdict.status == Status::Feasible) {
    long double acc = 0.0;
    for (std::size_t j = 0; j < sol.x.size() && j < objective.size(); ++j)
      acc += (long double)objective[j] * sol.x[j];
    out.value = static_cast<double>(acc);
  }
  out.verdict.wall_ms =
      std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
  return out;
}

} // namespace qmh

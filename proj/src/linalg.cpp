#include "qmh/linalg.hpp"

#include "qmh/kernels.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace qmh::linalg {

Matrix Matrix::identity(std::size_t n) {
  Matrix I(n, n);
  for (std::size_t i = 0; i < n; ++i) I.at(i, i) = 1.0;
  return I;
}

Matrix matmul(const Matrix& A, const Matrix& B) {
  assert(A.cols == B.rows);
  Matrix C(A.rows, B.cols);
  const auto& k = kernels::ops();
  for (std::size_t i = 0; i < A.rows; ++i)
    for (std::size_t p = 0; p < A.cols; ++p) {
      double v = A.at(i, p);
      if (v != 0.0) k.axpy(v, B.row(p), C.row(i), B.cols);
    }
  return C;
}

Matrix transpose(const Matrix& A) {
  Matrix T(A.cols, A.rows);
  for (std::size_t i = 0; i < A.rows; ++i)
    for (std::size_t j = 0; j < A.cols; ++j) T.at(j, i) = A.at(i, j);
  return T;
}

double max_abs_diff(const Matrix& A, const Matrix& B) {
  assert(A.rows == B.rows && A.cols == B.cols);
  double m = 0.0;
  for (std::size_t i = 0; i < A.a.size(); ++i)
    m = std::max(m, std::fabs(A.a[i] - B.a[i]));
  return m;
}

std::pair<std::size_t, std::size_t> packed_coords(std::size_t p, std::size_t n) {
  // row start s(i) = packed_index(i, i, n); invert approximately, then fix up.
  double nn = static_cast<double>(n);
  double disc = (2 * nn + 1) * (2 * nn + 1) - 8.0 * static_cast<double>(p);
  std::size_t i = 0;
  if (disc > 0) {
    double guess = (2 * nn + 1 - std::sqrt(disc)) / 2.0;
    i = guess > 0 ? static_cast<std::size_t>(guess) : 0;
    if (i >= n) i = n - 1;
  }
  while (i + 1 < n && packed_index(i + 1, i + 1, n) <= p) ++i;
  while (i > 0 && packed_index(i, i, n) > p) --i;
  return {i, i + (p - packed_index(i, i, n))};
}

SymEig jacobi_eigensym(const Matrix& A, int max_sweeps, double tol) {
  assert(A.rows == A.cols);
  const std::size_t n = A.rows;
  Matrix M = A;
  // enforce symmetry of the working copy
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) {
      double v = 0.5 * (M.at(i, j) + M.at(j, i));
      M.at(i, j) = M.at(j, i) = v;
    }
  Matrix V = Matrix::identity(n);
  const auto& k = kernels::ops();

  double frob = 0.0;
  for (double v : M.a) frob += v * v;
  frob = std::sqrt(frob);
  if (frob == 0.0) frob = 1.0;

  std::vector<double> rp(n), rq(n);
  for (int sweep = 0; sweep < max_sweeps; ++sweep) {
    double off = 0.0;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i + 1; j < n; ++j) off += M.at(i, j) * M.at(i, j);
    if (std::sqrt(2.0 * off) <= tol * frob) break;

    for (std::size_t p = 0; p < n; ++p)
      for (std::size_t q = p + 1; q < n; ++q) {
        double apq = M.at(p, q);
        if (std::fabs(apq) <= 1e-300) continue;
        double app = M.at(p, p), aqq = M.at(q, q);
        double theta = (aqq - app) / (2.0 * apq);
        double t = theta >= 0 ? -1.0 / (theta + std::sqrt(theta * theta + 1.0))
                              : 1.0 / (-theta + std::sqrt(theta * theta + 1.0));
        double c = 1.0 / std::sqrt(t * t + 1.0);
        double s = t * c;

        std::copy(M.row(p), M.row(p) + n, rp.begin());
        std::copy(M.row(q), M.row(q) + n, rq.begin());
        k.rot(rp.data(), rq.data(), c, s, n);
        for (std::size_t i = 0; i < n; ++i) {
          M.at(p, i) = rp[i];
          M.at(i, p) = rp[i];
          M.at(q, i) = rq[i];
          M.at(i, q) = rq[i];
        }
        M.at(p, p) = c * c * app + 2.0 * s * c * apq + s * s * aqq;
        M.at(q, q) = s * s * app - 2.0 * s * c * apq + c * c * aqq;
        M.at(p, q) = M.at(q, p) = 0.0;

        k.rot(V.row(p), V.row(q), c, s, n);
      }
  }

  SymEig out;
  out.values.resize(n);
  for (std::size_t i = 0; i < n; ++i) out.values[i] = M.at(i, i);
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return out.values[a] < out.values[b]; });
  SymEig sorted;
  sorted.values.resize(n);
  sorted.vectors = Matrix(n, n);
  for (std::size_t r = 0; r < n; ++r) {
    sorted.values[r] = out.values[order[r]];
    std::copy(V.row(order[r]), V.row(order[r]) + n, sorted.vectors.row(r));
  }
  return sorted;
}

double min_eigenvalue(const Matrix& A) {
  return jacobi_eigensym(A).values.front();
}

double psd_clip(Matrix& A) {
  SymEig e = jacobi_eigensym(A);
  double lmin = e.values.front();
  if (lmin >= 0.0) return lmin;
  const std::size_t n = A.rows;
  std::fill(A.a.begin(), A.a.end(), 0.0);
  const auto& k = kernels::ops();
  for (std::size_t r = 0; r < n; ++r) {
    double lam = e.values[r];
    if (lam <= 0.0) continue;
    const double* v = e.vectors.row(r);
    for (std::size_t i = 0; i < n; ++i) {
      double w = lam * v[i];
      if (w != 0.0) k.axpy(w, v, A.row(i), n);
    }
  }
  return lmin;
}

bool GrowingCholesky::border(const std::vector<double>& m12, double m22, double rel_tol) {
  assert(m12.size() == rows_.size());
  std::vector<double> l12 = m12;
  solve_lower(l12);
  double s = 0.0;
  for (double v : l12) s += v * v;
  double piv = m22 - s;
  if (piv <= rel_tol * std::max(std::fabs(m22), 1e-30)) return false;
  l12.push_back(std::sqrt(piv));
  rows_.push_back(std::move(l12));
  return true;
}

void GrowingCholesky::rank1_update(std::vector<double> v) {
  assert(v.size() == rows_.size());
  const std::size_t n = rows_.size();
  for (std::size_t k = 0; k < n; ++k) {
    if (v[k] == 0.0) continue;
    double a = rows_[k][k];
    double r = std::hypot(a, v[k]);
    double c = r / a;
    double s = v[k] / a;
    rows_[k][k] = r;
    for (std::size_t i = k + 1; i < n; ++i) {
      rows_[i][k] = (rows_[i][k] + s * v[i]) / c;
      v[i] = c * v[i] - s * rows_[i][k];
    }
  }
}

void GrowingCholesky::solve_lower(std::vector<double>& x) const {
  const std::size_t n = rows_.size();
  assert(x.size() <= n);
  for (std::size_t i = 0; i < x.size(); ++i) {
    double acc = x[i];
    acc -= kernels::ops().dot(rows_[i].data(), x.data(), i);
    x[i] = acc / rows_[i][i];
  }
}

void GrowingCholesky::solve_upper(std::vector<double>& x) const {
  const std::size_t n = x.size();
  for (std::size_t ii = n; ii-- > 0;) {
    double acc = x[ii];
    for (std::size_t j = ii + 1; j < n; ++j) acc -= rows_[j][ii] * x[j];
    x[ii] = acc / rows_[ii][ii];
  }
}

void GrowingCholesky::solve(std::vector<double>& x) const {
  solve_lower(x);
  solve_upper(x);
}

void SparseFunctional::add(std::size_t packed_idx, double v) {
  c.emplace_back(packed_idx, v);
}

void SparseFunctional::finalize() {
  std::sort(c.begin(), c.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });
  std::size_t out = 0;
  for (std::size_t i = 0; i < c.size();) {
    std::size_t j = i;
    double acc = 0.0;
    while (j < c.size() && c[j].first == c[i].first) acc += c[j++].second;
    if (acc != 0.0) c[out++] = {c[i].first, acc};
    i = j;
  }
  c.resize(out);
}

namespace {
inline bool is_diag(std::size_t p, std::size_t n) {
  auto [i, j] = packed_coords(p, n);
  return i == j;
}
} // namespace

double functional_norm2(const SparseFunctional& f, std::size_t n) {
  double s = 0.0;
  for (const auto& [p, v] : f.c) s += is_diag(p, n) ? v * v : 0.5 * v * v;
  return s;
}

double functional_dot(const SparseFunctional& f, const SparseFunctional& g, std::size_t n) {
  double s = 0.0;
  std::size_t a = 0, b = 0;
  while (a < f.c.size() && b < g.c.size()) {
    if (f.c[a].first < g.c[b].first) ++a;
    else if (g.c[b].first < f.c[a].first) ++b;
    else {
      double t = f.c[a].second * g.c[b].second;
      s += is_diag(f.c[a].first, n) ? t : 0.5 * t;
      ++a;
      ++b;
    }
  }
  return s;
}

double apply_functional(const SparseFunctional& f, const Matrix& X) {
  const std::size_t n = X.rows;
  double s = 0.0;
  for (const auto& [p, v] : f.c) {
    auto [i, j] = packed_coords(p, n);
    s += v * X.at(i, j);
  }
  return s;
}

void accumulate_functional(const SparseFunctional& f, double w, Matrix& X) {
  const std::size_t n = X.rows;
  for (const auto& [p, v] : f.c) {
    auto [i, j] = packed_coords(p, n);
    if (i == j) {
      X.at(i, i) += w * v;
    } else {
      X.at(i, j) += 0.5 * w * v;
      X.at(j, i) += 0.5 * w * v;
    }
  }
}

FunctionalSpan::FunctionalSpan(std::size_t matrix_side, double rank_tol)
    : side_(matrix_side), rank_tol_(rank_tol),
      dense_scratch_(packed_size(matrix_side), 0.0) {}

std::size_t FunctionalSpan::add(const SparseFunctional& f) {
  const std::size_t e = funcs_.size();
  double norm = std::sqrt(functional_norm2(f, side_));
  norms_.push_back(norm);

  SparseFunctional fn = f;
  if (norm > 0.0)
    for (auto& [p, v] : fn.c) v /= norm;
  else
    fn.c.clear();

  // stage fn densely with halved off-diagonal weights so that a gather with
  // raw coefficients of g yields <F_fn, F_g>
  for (const auto& [p, v] : fn.c)
    dense_scratch_[p] = is_diag(p, side_) ? v : 0.5 * v;

  auto gather = [&](const SparseFunctional& g) {
    double s = 0.0;
    for (const auto& [p, v] : g.c) s += v * dense_scratch_[p];
    return s;
  };

  const std::size_t r = indep_.size();
  std::vector<double> u(r);
  for (std::size_t j = 0; j < r; ++j) u[j] = gather(funcs_[indep_[j]]);

  bool independent = false;
  if (norm > 0.0) {
    std::vector<double> w = u;
    gram_indep_.solve_lower(w);
    double rho2 = 1.0;
    for (double x : w) rho2 -= x * x;
    independent = rho2 > rank_tol_;
  }

  if (independent) {
    // new cross-Gram column over existing members, then the new row
    std::vector<double> v(e);
    for (std::size_t i = 0; i < e; ++i) v[i] = gather(funcs_[i]);

    if (!gram_indep_.border(u, 1.0))
      independent = false;
    else {
      std::vector<double> m12(r, 0.0);
      double m22 = 0.0;
      for (std::size_t i = 0; i < e; ++i) {
        for (std::size_t j = 0; j < r; ++j) m12[j] += cross_[j][i] * v[i];
        m22 += v[i] * v[i];
      }
      if (!ctc_.border(m12, m22 + 1e-300, 0.0)) {
        // keep factors consistent: retry as dependent is not possible once
        // gram_indep_ grew, so force a tiny positive pivot instead
        throw std::runtime_error("FunctionalSpan: degenerate cross-Gram border");
      }
      for (std::size_t j = 0; j < r; ++j) cross_[j].push_back(u[j]);
      v.push_back(1.0);
      cross_.push_back(std::move(v));
      std::vector<double> newrow = u;
      newrow.push_back(1.0);
      ctc_.rank1_update(std::move(newrow));
      indep_.push_back(e);
    }
  }
  if (!independent) {
    for (std::size_t j = 0; j < r; ++j) cross_[j].push_back(u[j]);
    bool all_zero = std::all_of(u.begin(), u.end(), [](double x) { return x == 0.0; });
    if (!all_zero) ctc_.rank1_update(u);
  }

  for (const auto& [p, v] : fn.c) {
    (void)v;
    dense_scratch_[p] = 0.0;
  }
  std::vector<DecodedEntry> dec;
  dec.reserve(fn.c.size());
  for (const auto& [p, v] : fn.c) {
    auto [i, j] = packed_coords(p, side_);
    dec.push_back({i * side_ + j, j * side_ + i, v});
  }
  dec_.push_back(std::move(dec));
  funcs_.push_back(std::move(fn));
  return e;
}

double FunctionalSpan::value_of(std::size_t e, const Matrix& X) const {
  double s = 0.0;
  for (const auto& d : dec_[e]) s += d.c * X.a[d.flat];
  return s;
}

std::vector<double> FunctionalSpan::lstsq_matrix_coeffs(const std::vector<double>& t_all) const {
  std::vector<double> y(indep_.size());
  for (std::size_t j = 0; j < indep_.size(); ++j) y[j] = t_all[indep_[j]];
  gram_indep_.solve(y);
  return y;
}

std::vector<double> FunctionalSpan::cT(const std::vector<double>& t) const {
  const std::size_t r = indep_.size();
  std::vector<double> out(r, 0.0);
  for (std::size_t j = 0; j < r; ++j)
    out[j] = kernels::ops().dot(cross_[j].data(), t.data(), t.size());
  return out;
}

std::vector<double> FunctionalSpan::lstsq_coeffs(const std::vector<double>& t) const {
  std::vector<double> y = cT(t);
  ctc_.solve(y);
  return y;
}

std::vector<double> FunctionalSpan::predict(const std::vector<double>& y) const {
  std::vector<double> out(size(), 0.0);
  for (std::size_t j = 0; j < indep_.size(); ++j)
    if (y[j] != 0.0) kernels::ops().axpy(y[j], cross_[j].data(), out.data(), size());
  return out;
}

std::vector<double> FunctionalSpan::range_residual(const std::vector<double>& t) const {
  std::vector<double> p = predict(lstsq_coeffs(t));
  for (std::size_t i = 0; i < p.size(); ++i) p[i] = t[i] - p[i];
  return p;
}

void FunctionalSpan::accumulate_combination(const std::vector<double>& y, Matrix& X) const {
  for (std::size_t j = 0; j < indep_.size(); ++j) {
    double w = y[j];
    if (w == 0.0) continue;
    for (const auto& d : dec_[indep_[j]]) {
      if (d.flat == d.mirror) {
        X.a[d.flat] += w * d.c;
      } else {
        X.a[d.flat] += 0.5 * w * d.c;
        X.a[d.mirror] += 0.5 * w * d.c;
      }
    }
  }
}

std::vector<double> FunctionalSpan::expand_to_members(const std::vector<double>& y) const {
  std::vector<double> out(size(), 0.0);
  for (std::size_t j = 0; j < indep_.size(); ++j) out[indep_[j]] = y[j];
  return out;
}

std::vector<double> FunctionalSpan::evaluate_all(const Matrix& X) const {
  std::vector<double> out(size());
  for (std::size_t e = 0; e < size(); ++e) out[e] = value_of(e, X);
  return out;
}

std::size_t orthonormalize_columns(Matrix& V, double rel_tol) {
  const std::size_t n = V.rows, k = V.cols;
  auto col_dot = [&](std::size_t a, std::size_t b) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += V.at(i, a) * V.at(i, b);
    return s;
  };
  double max_norm = 0.0;
  for (std::size_t j = 0; j < k; ++j) max_norm = std::max(max_norm, std::sqrt(col_dot(j, j)));
  if (max_norm == 0.0) return 0;

  std::size_t rank = 0;
  for (std::size_t j = 0; j < k; ++j) {
    if (j != rank)
      for (std::size_t i = 0; i < n; ++i) V.at(i, rank) = V.at(i, j);
    for (int pass = 0; pass < 2; ++pass)
      for (std::size_t q = 0; q < rank; ++q) {
        double d = col_dot(rank, q);
        for (std::size_t i = 0; i < n; ++i) V.at(i, rank) -= d * V.at(i, q);
      }
    double norm = std::sqrt(col_dot(rank, rank));
    if (norm > rel_tol * max_norm) {
      for (std::size_t i = 0; i < n; ++i) V.at(i, rank) /= norm;
      ++rank;
    }
  }
  for (std::size_t j = rank; j < k; ++j)
    for (std::size_t i = 0; i < n; ++i) V.at(i, j) = 0.0;
  return rank;
}

} // namespace qmh::linalg

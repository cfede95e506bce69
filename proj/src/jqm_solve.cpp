#include "qmh/jqm_solve.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <set>

namespace qmh {

namespace {

using linalg::FunctionalSpan;
using linalg::Matrix;
using linalg::SparseFunctional;

SparseFunctional subset_functional(const OutcomeSet& a, std::size_t n) {
  SparseFunctional f;
  auto m = a.members();
  for (std::size_t u = 0; u < m.size(); ++u)
    for (std::size_t w = u; w < m.size(); ++w)
      f.add(linalg::packed_index(m[u], m[w], n), u == w ? 1.0 : 2.0);
  f.finalize();
  return f;
}

} // namespace

JqmResult jqm_solve(const ConeProgram& p, const JqmOptions& opts) {
  auto t0 = std::chrono::steady_clock::now();
  auto elapsed_s = [&] {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  };

  if (p.kind != ConeKind::FreeWithCuts)
    throw InputError("jqm_solve expects a free-variable program with lazy cuts");
  const std::size_t n = p.n;

  JqmResult res;
  Verdict& v = res.verdict;

  FunctionalSpan span(n);
  std::vector<double> bhat;  // per member: equality rhs (normalized) or 0 for cuts
  std::vector<double> norms;
  const std::size_t m_eq = p.equalities.size();
  for (const auto& eq : p.equalities) {
    double norm = std::sqrt(linalg::functional_norm2(eq.f, n));
    if (norm == 0.0) {
      if (std::fabs(eq.rhs) > opts.tol) {
        v.status = Status::Infeasible;
        v.conclusive = true;
        Certificate cert;
        cert.type = "inconsistent_equalities";
        cert.gap = std::fabs(eq.rhs);
        v.certificate = std::move(cert);
        { v.wall_ms = elapsed_s() * 1000.0; return res; }
      }
      norm = 1.0; // keep member indexing aligned; zero row contributes nothing
    }
    SparseFunctional f = eq.f;
    span.add(f);
    bhat.push_back(eq.rhs / norm);
    norms.push_back(norm);
  }

  std::set<std::vector<std::uint64_t>> cut_keys;
  auto add_cut = [&](const OutcomeSet& a) {
    if (!cut_keys.insert(a.words()).second) return false;
    span.add(subset_functional(a, n));
    bhat.push_back(0.0);
    norms.push_back(static_cast<double>(a.count())); // ||block(a,a)||_F = |a|
    res.cuts.push_back(a);
    return true;
  };
  // singleton diagonal cuts seed the positivity family
  for (std::size_t i = 0; i < n; ++i) {
    OutcomeSet a(n);
    a.set(i);
    add_cut(a);
  }

  long lp_iters = 0;
  int rounds = 0;
  for (;;) {
    ++rounds;
    const std::size_t m_tot = span.size();
    const std::size_t m_cut = m_tot - m_eq;

    // residual-operator columns: R t = t - C lstsq(t)
    std::vector<double> target(m_tot, 0.0);
    for (std::size_t e = 0; e < m_eq; ++e) target[e] = bhat[e];
    std::vector<double> g = span.range_residual(target);
    std::vector<std::vector<double>> cols(m_cut);
    for (std::size_t k = 0; k < m_cut; ++k) {
      std::vector<double> ek(m_tot, 0.0);
      ek[m_eq + k] = 1.0;
      cols[k] = span.range_residual(ek);
    }

    // rows with any significant entry
    std::vector<std::size_t> keep;
    for (std::size_t r = 0; r < m_tot; ++r) {
      double mx = std::fabs(g[r]);
      for (std::size_t k = 0; k < m_cut; ++k) mx = std::max(mx, std::fabs(cols[k][r]));
      if (mx > 1e-12) keep.push_back(r);
    }

    std::vector<double> a(keep.size() * m_cut);
    std::vector<double> rhs(keep.size());
    for (std::size_t r = 0; r < keep.size(); ++r) {
      for (std::size_t k = 0; k < m_cut; ++k) a[r * m_cut + k] = cols[k][keep[r]];
      rhs[r] = -g[keep[r]];
    }

    LpSolution lp = simplex_solve(keep.size(), m_cut, std::move(a), rhs,
                                  std::vector<double>(m_cut, 0.0), opts.lp);
    lp_iters += lp.iterations;
    v.iterations = lp_iters;

    if (lp.status == LpStatus::IterLimit || lp.status == LpStatus::Unbounded) {
      v.status = Status::Undecided;
      v.detail = "reduced LP did not terminate";
      { v.wall_ms = elapsed_s() * 1000.0; return res; }
    }

    if (lp.status == LpStatus::Infeasible) {
      // map the Farkas multipliers back to functional multipliers
      std::vector<double> yfull(m_tot, 0.0);
      for (std::size_t r = 0; r < keep.size(); ++r) yfull[keep[r]] = lp.farkas[r];
      std::vector<double> u = span.range_residual(yfull); // u = R y
      for (double& w : u) w = -w;                         // (lambda; mu) = -u
      double scale = 0.0;
      for (double w : u) scale = std::max(scale, std::fabs(w));
      if (scale < 1e-300) {
        v.status = Status::Undecided;
        v.detail = "degenerate infeasibility multipliers";
        { v.wall_ms = elapsed_s() * 1000.0; return res; }
      }
      for (double& w : u) w /= scale;
      // independent verification: the combination must vanish entrywise,
      // cut multipliers must be nonnegative, and the equality part must
      // have a positive fixed value on the affine set
      Matrix nmat(n, n);
      for (std::size_t e = 0; e < m_tot; ++e)
        if (u[e] != 0.0) linalg::accumulate_functional(span.normalized(e), u[e], nmat);
      double support = 0.0;
      for (double w : nmat.a) support = std::max(support, std::fabs(w));
      double mu_min = 0.0;
      for (std::size_t k = 0; k < m_cut; ++k) mu_min = std::min(mu_min, u[m_eq + k]);
      long double gap = 0.0;
      for (std::size_t e = 0; e < m_eq; ++e) gap += (long double)u[e] * bhat[e];
      Certificate cert;
      cert.type = "farkas";
      cert.multipliers.assign(u.begin(), u.end());
      for (std::size_t e = 0; e < m_tot; ++e) cert.multipliers[e] /= norms[e];
      cert.gap = static_cast<double>(gap);
      cert.support_residual = std::max(support, -mu_min);
      v.residuals = {};
      if (support <= 1e-7 && mu_min >= -1e-9 && cert.gap >= std::max(1e-7, 10.0 * support)) {
        v.status = Status::Infeasible;
        v.conclusive = true;
        v.certificate = std::move(cert);
      } else {
        v.status = Status::Undecided;
        v.certificate = std::move(cert);
        v.detail = "infeasibility multipliers failed verification";
      }
      { v.wall_ms = elapsed_s() * 1000.0; return res; }
    }

    // feasible reduced LP: materialize the decoherence matrix
    std::vector<double> t(m_tot, 0.0);
    for (std::size_t e = 0; e < m_eq; ++e) t[e] = bhat[e];
    for (std::size_t k = 0; k < m_cut; ++k) t[m_eq + k] = lp.x[k];
    std::vector<double> y = span.lstsq_coeffs(t);
    Matrix d(n, n);
    span.accumulate_combination(y, d);

    double worst = 0.0;
    for (std::size_t e = 0; e < m_eq; ++e) {
      double val = linalg::apply_functional(p.equalities[e].f, d);
      worst = std::max(worst, std::fabs(val - p.equalities[e].rhs) / std::max(1.0, norms[e]));
    }
    v.residuals.max_equality = worst;
    if (worst > 100 * opts.tol) {
      v.status = Status::Undecided;
      v.detail = "reduced solution drifted from the equality system";
      { v.wall_ms = elapsed_s() * 1000.0; return res; }
    }

    SeparationOptions sep = opts.separation;
    SeparationResult found = jqm_separation(d, sep);
    if (found.subsets.empty()) {
      v.status = Status::Feasible;
      v.conclusive = found.exact;
      if (!found.exact) v.detail = "heuristic separation found no violated subset";
      v.witness = d.a;
      v.witness_side = n;
      v.residuals.max_cut = 0.0;
      { v.wall_ms = elapsed_s() * 1000.0; return res; }
    }
    v.residuals.max_cut = -found.values.front();

    bool added = false;
    for (const auto& a2 : found.subsets)
      if (static_cast<int>(res.cuts.size()) < opts.cut_budget + static_cast<int>(n))
        added = add_cut(a2) || added;
    if (!added) {
      v.status = Status::Undecided;
      v.detail = "separation returned only known cuts (numerical stall)";
      v.witness = d.a;
      v.witness_side = n;
      { v.wall_ms = elapsed_s() * 1000.0; return res; }
    }
    if (static_cast<int>(res.cuts.size()) >= opts.cut_budget + static_cast<int>(n)) {
      v.status = Status::Undecided;
      v.detail = "cut budget exhausted";
      { v.wall_ms = elapsed_s() * 1000.0; return res; }
    }
    if (elapsed_s() > opts.time_budget_s) {
      v.status = Status::Undecided;
      v.detail = "time budget exhausted";
      { v.wall_ms = elapsed_s() * 1000.0; return res; }
    }
  }
}

} // namespace qmh

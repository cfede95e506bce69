#include "qmh/psd.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>

namespace qmh {

namespace {

using linalg::FunctionalSpan;
using linalg::Matrix;

struct NormalizedProgram {
  FunctionalSpan span;
  std::vector<double> bhat;        // normalized right-hand sides
  std::vector<std::size_t> orig;   // original equality index per member
  std::vector<double> norms;       // original row norms per member
};

// multipliers over span members, rescaled to the original equality rows
std::vector<double> to_original_multipliers(const NormalizedProgram& np, std::size_t n_orig,
                                            const std::vector<double>& nu_members) {
  std::vector<double> out(n_orig, 0.0);
  for (std::size_t e = 0; e < nu_members.size(); ++e)
    if (np.norms[e] > 0.0) out[np.orig[e]] += nu_members[e] / np.norms[e];
  return out;
}

} // namespace

Verdict psd_solve(const ConeProgram& p, const PsdOptions& opts) {
  auto t0 = std::chrono::steady_clock::now();
  auto finish = [&](Verdict v) {
    v.wall_ms =
        std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
    return v;
  };

  if (p.kind != ConeKind::Psd) throw InputError("psd_solve expects a PSD cone program");
  const std::size_t n = p.n;
  if (n > 512) throw BudgetError("matrix side too large for the built-in PSD solver");
  if (p.equalities.size() > 20000)
    throw BudgetError("too many equality rows for the built-in PSD solver");

  NormalizedProgram np{FunctionalSpan(n), {}, {}, {}};
  for (std::size_t e = 0; e < p.equalities.size(); ++e) {
    const Equality& eq = p.equalities[e];
    double norm = std::sqrt(linalg::functional_norm2(eq.f, n));
    if (norm == 0.0) {
      if (std::fabs(eq.rhs) > opts.tol) {
        // 0 = rhs with rhs != 0: certificate is the zero functional itself
        Verdict v;
        v.status = Status::Infeasible;
        v.conclusive = true;
        Certificate cert;
        cert.type = "inconsistent_equalities";
        cert.multipliers.assign(p.equalities.size(), 0.0);
        cert.multipliers[e] = eq.rhs > 0 ? -1.0 : 1.0;
        cert.gap = std::fabs(eq.rhs);
        v.certificate = std::move(cert);
        return finish(v);
      }
      continue;
    }
    np.span.add(eq.f);
    np.bhat.push_back(eq.rhs / norm);
    np.orig.push_back(e);
    np.norms.push_back(norm);
  }
  const std::size_t m = np.span.size();

  // consistency of the affine set as a linear system
  {
    std::vector<double> rr = np.span.range_residual(np.bhat);
    double worst = 0.0;
    for (double v : rr) worst = std::max(worst, std::fabs(v));
    if (worst > 1e-9) {
      double scale = 0.0;
      for (double v : rr) scale = std::max(scale, std::fabs(v));
      std::vector<double> nu(m);
      for (std::size_t e = 0; e < m; ++e) nu[e] = -rr[e] / scale;
      Matrix nmat(n, n);
      for (std::size_t e = 0; e < m; ++e)
        if (nu[e] != 0.0) linalg::accumulate_functional(np.span.normalized(e), nu[e], nmat);
      double support = 0.0;
      for (double v : nmat.a) support = std::max(support, std::fabs(v));
      long double gap = 0.0;
      for (std::size_t e = 0; e < m; ++e) gap -= (long double)nu[e] * np.bhat[e];
      Verdict v;
      Certificate cert;
      cert.type = "inconsistent_equalities";
      cert.multipliers = to_original_multipliers(np, p.equalities.size(), nu);
      cert.gap = static_cast<double>(gap);
      cert.support_residual = support;
      if (support <= 1e-8 && cert.gap > std::max(1e-9, 10.0 * support)) {
        v.status = Status::Infeasible;
        v.conclusive = true;
        v.certificate = std::move(cert);
        return finish(v);
      }
      // fall through to the iteration otherwise
    }
  }

  // start from the least-norm affine point (or the caller's warm start)
  Matrix x(n, n);
  if (opts.warm_start && opts.warm_start->rows == n) x = *opts.warm_start;
  {
    std::vector<double> t = np.span.evaluate_all(x);
    for (std::size_t e = 0; e < m; ++e) t[e] -= np.bhat[e];
    std::vector<double> y = np.span.lstsq_coeffs(t);
    for (double& v : y) v = -v;
    np.span.accumulate_combination(y, x);
  }

  Matrix corr(n, n); // Dykstra correction on the cone side
  Verdict v;
  double last_resid = 1e300;
  long sluggish = 0;

  for (long it = 0; it < opts.max_iters; ++it) {
    // cone side
    Matrix zpre = x;
    if (opts.use_dykstra)
      for (std::size_t q = 0; q < zpre.a.size(); ++q) zpre.a[q] += corr.a[q];
    Matrix z = zpre;
    double lmin = linalg::psd_clip(z);
    for (std::size_t q = 0; q < corr.a.size(); ++q) corr.a[q] = zpre.a[q] - z.a[q];

    // equality residual of the PSD-side iterate
    std::vector<double> t = np.span.evaluate_all(z);
    double resid = 0.0;
    for (std::size_t e = 0; e < m; ++e) {
      t[e] -= np.bhat[e];
      resid = std::max(resid, std::fabs(t[e]));
    }

    if (resid <= opts.tol) {
      // independent witness verification against the original rows
      double worst = 0.0;
      for (const auto& eq : p.equalities) {
        double norm = std::sqrt(linalg::functional_norm2(eq.f, n));
        double val = linalg::apply_functional(eq.f, z);
        double r = std::fabs(val - eq.rhs) / std::max(1.0, norm);
        worst = std::max(worst, r);
      }
      v.iterations = it + 1;
      v.residuals.max_equality = worst;
      v.residuals.min_eigenvalue = std::max(lmin, 0.0);
      if (worst <= 10 * opts.tol) {
        v.status = Status::Feasible;
        v.conclusive = true;
        v.witness = z.a;
        v.witness_side = n;
      } else {
        v.status = Status::Undecided;
        v.detail = "witness failed independent verification";
      }
      return finish(v);
    }

    bool stalled = resid > 0.9999 * last_resid;
    sluggish = stalled ? sluggish + 1 : 0;
    last_resid = resid;

    // certificate attempt: the cone-side deficit -corr is PSD by
    // construction; project it onto the constraint span and verify
    if ((it + 1) % opts.check_every == 0 || sluggish > 64) {
      sluggish = 0;
      Matrix nraw(n, n);
      for (std::size_t q = 0; q < nraw.a.size(); ++q) nraw.a[q] = -corr.a[q];
      double fnorm = 0.0;
      for (double w : nraw.a) fnorm += w * w;
      fnorm = std::sqrt(fnorm);
      if (fnorm > 1e-14) {
        std::vector<double> tn = np.span.evaluate_all(nraw);
        std::vector<double> y = np.span.lstsq_matrix_coeffs(tn);
        Matrix nmat(n, n);
        np.span.accumulate_combination(y, nmat);
        double nnorm = 0.0;
        for (double w : nmat.a) nnorm += w * w;
        nnorm = std::sqrt(nnorm);
        if (nnorm > 1e-14) {
          for (double& w : y) w /= nnorm;
          for (double& w : nmat.a) w /= nnorm;
          std::vector<double> nu_members = np.span.expand_to_members(y);
          long double gap = 0.0;
          for (std::size_t e = 0; e < m; ++e) gap += (long double)nu_members[e] * np.bhat[e];
          if (gap < -opts.cert_gap) {
            double nlmin = linalg::min_eigenvalue(nmat);
            if (nlmin >= -opts.cert_eig_slack) {
              Certificate cert;
              cert.type = "psd_separating";
              cert.multipliers = to_original_multipliers(np, p.equalities.size(), nu_members);
              cert.gap = static_cast<double>(-gap);
              cert.support_residual = std::max(0.0, -nlmin);
              v.status = Status::Infeasible;
              v.conclusive = true;
              v.certificate = std::move(cert);
              v.iterations = it + 1;
              v.residuals.max_equality = resid;
              return finish(v);
            }
          }
        }
      }
    }

    // affine side
    x = z;
    std::vector<double> y = np.span.lstsq_coeffs(t);
    for (double& w : y) w = -w;
    np.span.accumulate_combination(y, x);
  }

  v.status = Status::Undecided;
  v.iterations = opts.max_iters;
  v.residuals.max_equality = last_resid;
  v.detail = "alternating projections hit the iteration limit";
  return finish(v);
}

} // namespace qmh

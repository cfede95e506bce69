#include "qmh/conditions.hpp"

#include "qmh/kernels.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <map>
#include <random>
#include <set>

namespace qmh {

namespace {

using linalg::packed_index;
using linalg::SparseFunctional;

void add_block(SparseFunctional& f, const OutcomeSet& x, const OutcomeSet& y, std::size_t n,
               double w = 1.0) {
  // ordered-pair count convention: coefficient on packed (i,j) is the number
  // of ordered pairs from x X y landing on it, times w
  auto xm = x.members();
  auto ym = y.members();
  for (auto i : xm)
    for (auto j : ym)
      f.add(i <= j ? packed_index(i, j, n) : packed_index(j, i, n), w);
}

// D(X,Y) = P(X n Y) over fine pairs of every maximal context, plus the
// normalisation D(Xi,Xi) = 1. Shared by the jqm and spjqm compilers.
std::vector<Equality> atom_gram_equalities(const Behaviour& b, const std::string& prefix) {
  const std::size_t n = b.scenario->n_atoms();
  std::vector<Equality> eqs;
  for (std::size_t t = 0; t < b.ctx.size(); ++t) {
    const Measurement& m = b.ctx[t];
    for (std::size_t c = 0; c < m.n_cells(); ++c)
      for (std::size_t c2 = c; c2 < m.n_cells(); ++c2) {
        Equality e;
        add_block(e.f, m.cells[c], m.cells[c2], n);
        e.rhs = c == c2 ? b.probs[t][c] : 0.0;
        e.tag = prefix + (c == c2 ? ".gram" : ".gram");
        eqs.push_back(std::move(e));
      }
  }
  Equality norm;
  OutcomeSet xi(n, true);
  add_block(norm.f, xi, xi, n);
  norm.rhs = 1.0;
  norm.tag = prefix + ".normalisation";
  eqs.push_back(std::move(norm));
  return eqs;
}

} // namespace

ConeProgram compile_jpm(const Behaviour& b) {
  ConeProgram p;
  p.kind = ConeKind::Nonneg;
  p.n = b.scenario->n_atoms();
  p.condition = "jpm";
  for (std::size_t t = 0; t < b.ctx.size(); ++t)
    for (std::size_t c = 0; c < b.ctx[t].n_cells(); ++c) {
      Equality e;
      b.ctx[t].cells[c].for_each([&](std::size_t atom) { e.f.add(atom, 1.0); });
      e.rhs = b.probs[t][c];
      e.tag = "jpm.match";
      p.add(std::move(e));
    }
  Equality norm;
  for (std::size_t atom = 0; atom < p.n; ++atom) norm.f.add(atom, 1.0);
  norm.rhs = 1.0;
  norm.tag = "jpm.normalisation";
  p.add(std::move(norm));
  p.dedupe();
  return p;
}

ConeProgram compile_jqm(const Behaviour& b) {
  ConeProgram p;
  p.kind = ConeKind::FreeWithCuts;
  p.n = b.scenario->n_atoms();
  p.condition = "jqm";
  for (auto& e : atom_gram_equalities(b, "jqm")) {
    e.tag = e.tag == "jqm.gram" ? "jqm.decoherence" : e.tag;
    p.add(std::move(e));
  }
  p.dedupe();
  return p;
}

ConeProgram compile_spjqm(const Behaviour& b) {
  ConeProgram p;
  p.kind = ConeKind::Psd;
  p.n = b.scenario->n_atoms();
  p.condition = "spjqm";
  for (auto& e : atom_gram_equalities(b, "spjqm")) p.add(std::move(e));
  p.dedupe();
  return p;
}

ConeProgram compile_spjqmb(const Behaviour& b, bool validation_mode,
                           std::size_t recipe_budget) {
  const std::size_t n = b.scenario->n_atoms();
  ConeProgram p;
  p.kind = ConeKind::Psd;
  p.n = n;
  p.condition = "spjqmb";
  for (auto& e : atom_gram_equalities(b, "spjqm")) p.add(std::move(e));

  if (!validation_mode) {
    for (const auto& pair : branch_orthogonal_pairs(*b.scenario)) {
      Equality e;
      add_block(e.f, pair.x, pair.y, n);
      e.rhs = 0.0;
      e.tag = "spjqmb.branch_orthogonality";
      p.add(std::move(e));
    }
  } else {
    for (const auto& mb : enumerate_branching(*b.scenario, recipe_budget)) {
      std::vector<double> cellp = extend_to_branching(b, mb);
      for (std::size_t c = 0; c < mb.cells.size(); ++c)
        for (std::size_t c2 = c; c2 < mb.cells.size(); ++c2) {
          Equality e;
          add_block(e.f, mb.cells[c], mb.cells[c2], n);
          e.rhs = c == c2 ? cellp[c] : 0.0;
          e.tag = c == c2 ? "spjqmb.branch_prob" : "spjqmb.branch_decoherence";
          p.add(std::move(e));
        }
    }
  }
  p.dedupe();
  return p;
}

OutcomeIndexedProgram compile_q1(const Behaviour& b) {
  const Scenario& s = *b.scenario;
  OutcomeIndexedProgram out;
  std::map<OutcomeSet, std::size_t> index;
  std::vector<std::vector<std::size_t>> basic_outcome_idx(s.n_basics());
  for (int i = 0; i < s.n_basics(); ++i)
    for (int a = 0; a < s.space.cards[i]; ++a) {
      OutcomeSet x = s.basic_outcome(i, a);
      auto it = index.find(x);
      std::size_t id;
      if (it == index.end()) {
        id = out.index_sets.size();
        index.emplace(x, id);
        out.index_sets.push_back(x);
      } else {
        id = it->second;
      }
      basic_outcome_idx[i].push_back(id);
    }
  out.xi_index = out.index_sets.size();
  out.index_sets.push_back(OutcomeSet(s.n_atoms(), true));

  ConeProgram& p = out.prog;
  p.kind = ConeKind::Psd;
  p.n = out.index_sets.size();
  p.condition = "q1";
  const std::size_t side = p.n;
  auto entry = [&](std::size_t r, std::size_t c) {
    return r <= c ? packed_index(r, c, side) : packed_index(c, r, side);
  };

  // row sums against the Xi column, one family per basic measurement
  for (int i = 0; i < s.n_basics(); ++i) {
    std::vector<std::size_t> rows = basic_outcome_idx[i];
    rows.push_back(out.xi_index);
    for (std::size_t r : rows) {
      Equality e;
      e.f.add(entry(r, out.xi_index), 1.0);
      for (std::size_t y : basic_outcome_idx[i]) e.f.add(entry(r, y), -1.0);
      e.rhs = 0.0;
      e.tag = "q1.row_sum";
      p.add(std::move(e));
    }
  }

  // fixed entries for jointly performable pairs (a basic measurement is
  // jointly performable with itself)
  for (const auto& meas : s.all_measurements) {
    if (meas.size() != 1 && meas.size() != 2) continue;
    int i = meas.front(), j = meas.back();
    for (int a = 0; a < s.space.cards[i]; ++a)
      for (int aa = (i == j ? a : 0); aa < s.space.cards[j]; ++aa) {
        const OutcomeSet& x = out.index_sets[basic_outcome_idx[i][a]];
        const OutcomeSet& y = out.index_sets[basic_outcome_idx[j][aa]];
        Equality e;
        e.f.add(entry(basic_outcome_idx[i][a], basic_outcome_idx[j][aa]), 1.0);
        e.rhs = b.prob_of(x & y);
        e.tag = "q1.joint_prob";
        p.add(std::move(e));
      }
  }
  p.dedupe();
  return out;
}

OutcomeIndexedProgram compile_q1ab(const Behaviour& b) {
  const Scenario& s = *b.scenario;
  OutcomeIndexedProgram out;
  std::map<OutcomeSet, std::size_t> index;
  std::vector<std::vector<std::size_t>> cell_idx(b.ctx.size());
  for (std::size_t t = 0; t < b.ctx.size(); ++t)
    for (const auto& cell : b.ctx[t].cells) {
      auto it = index.find(cell);
      std::size_t id;
      if (it == index.end()) {
        id = out.index_sets.size();
        index.emplace(cell, id);
        out.index_sets.push_back(cell);
      } else {
        id = it->second;
      }
      cell_idx[t].push_back(id);
    }
  out.xi_index = out.index_sets.size();
  out.index_sets.push_back(OutcomeSet(s.n_atoms(), true));

  ConeProgram& p = out.prog;
  p.kind = ConeKind::Psd;
  p.n = out.index_sets.size();
  p.condition = "q1ab";
  const std::size_t side = p.n;
  auto entry = [&](std::size_t r, std::size_t c) {
    return r <= c ? packed_index(r, c, side) : packed_index(c, r, side);
  };

  // (a) within-context entries are the joint probabilities
  for (std::size_t t = 0; t < b.ctx.size(); ++t)
    for (std::size_t c = 0; c < b.ctx[t].n_cells(); ++c)
      for (std::size_t c2 = c; c2 < b.ctx[t].n_cells(); ++c2) {
        Equality e;
        e.f.add(entry(cell_idx[t][c], cell_idx[t][c2]), 1.0);
        e.rhs = c == c2 ? b.probs[t][c] : 0.0;
        e.tag = "q1ab.context_prob";
        p.add(std::move(e));
      }

  // decomposition of an outcome into the cells of a containing context
  auto decompose = [&](const OutcomeSet& x, std::size_t t) {
    std::vector<std::size_t> ids;
    for (std::size_t c = 0; c < b.ctx[t].n_cells(); ++c)
      if (b.ctx[t].cells[c].is_subset_of(x)) ids.push_back(cell_idx[t][c]);
    return ids;
  };

  // (b) additivity: the two decompositions of a shared outcome have equal
  // rows against every index column
  for (const auto& meas : s.all_measurements) {
    if (meas.empty()) continue;
    std::vector<std::size_t> owners;
    for (std::size_t t = 0; t < b.ctx.size(); ++t)
      if (std::includes(s.maximal_contexts[t].begin(), s.maximal_contexts[t].end(),
                        meas.begin(), meas.end()))
        owners.push_back(t);
    if (owners.size() < 2) continue;
    Measurement m = s.make_measurement(meas);
    for (const auto& cell : m.cells) {
      auto first = decompose(cell, owners[0]);
      for (std::size_t k = 1; k < owners.size(); ++k) {
        auto other = decompose(cell, owners[k]);
        for (std::size_t z = 0; z < side; ++z) {
          Equality e;
          for (std::size_t w : first) e.f.add(entry(w, z), 1.0);
          for (std::size_t w : other) e.f.add(entry(w, z), -1.0);
          e.rhs = 0.0;
          e.tag = "q1ab.additivity";
          p.add(std::move(e));
        }
      }
    }
  }

  // (c) cross-context orthogonality from the branching pairs
  for (const auto& pair : branch_orthogonal_pairs(s)) {
    int tx = s.covering_context(pair.ctx_x);
    int ty = s.covering_context(pair.ctx_y);
    auto xs = decompose(pair.x, static_cast<std::size_t>(tx));
    auto ys = decompose(pair.y, static_cast<std::size_t>(ty));
    Equality e;
    for (std::size_t w : xs)
      for (std::size_t v : ys) e.f.add(entry(w, v), 1.0);
    e.rhs = 0.0;
    e.tag = "q1ab.orthogonality";
    p.add(std::move(e));
  }

  // (d) every context's cells sum to the Xi row
  for (std::size_t t = 0; t < b.ctx.size(); ++t)
    for (std::size_t z = 0; z < side; ++z) {
      Equality e;
      for (std::size_t c = 0; c < b.ctx[t].n_cells(); ++c) e.f.add(entry(cell_idx[t][c], z), 1.0);
      e.f.add(entry(out.xi_index, z), -1.0);
      e.rhs = 0.0;
      e.tag = "q1ab.unit";
      p.add(std::move(e));
    }

  p.dedupe();
  return out;
}

namespace {

double subset_value_exact(const linalg::Matrix& d, const OutcomeSet& a) {
  auto m = a.members();
  double s = 0.0;
  for (auto i : m)
    for (auto j : m) s += d.at(i, j);
  return s;
}

struct Candidate {
  double value;
  OutcomeSet set;
};

void descent(const linalg::Matrix& d, OutcomeSet& a, double& val) {
  const std::size_t n = d.rows;
  std::vector<double> srow(n, 0.0); // srow[j] = sum_{i in a} d_ji
  a.for_each([&](std::size_t i) {
    for (std::size_t j = 0; j < n; ++j) srow[j] += d.at(i, j);
  });
  val = 0.0;
  a.for_each([&](std::size_t i) { val += srow[i]; });

  for (std::size_t step = 0; step < 6 * n + 16; ++step) {
    double best = -1e-14;
    std::size_t bestj = n;
    for (std::size_t j = 0; j < n; ++j) {
      double dj = a.test(j) ? -2.0 * srow[j] + d.at(j, j) : 2.0 * srow[j] + d.at(j, j);
      if (dj < best) {
        best = dj;
        bestj = j;
      }
    }
    if (bestj == n) break;
    double sgn = a.test(bestj) ? -1.0 : 1.0;
    if (a.test(bestj))
      a.reset(bestj);
    else
      a.set(bestj);
    for (std::size_t j = 0; j < n; ++j) srow[j] += sgn * d.at(bestj, j);
    val += best;
  }
}

} // namespace

SeparationResult jqm_separation(const linalg::Matrix& d, const SeparationOptions& opts) {
  const std::size_t n = d.rows;
  SeparationResult res;
  res.exact = n <= static_cast<std::size_t>(opts.exact_limit);

  auto push = [&](std::vector<Candidate>& cands, OutcomeSet a) {
    if (a.empty()) return;
    double v = subset_value_exact(d, a);
    if (v < -opts.violation_tol) cands.push_back({v, std::move(a)});
  };

  std::vector<Candidate> cands;
  if (res.exact) {
    // Gray-code walk over all subsets with incremental value updates;
    // candidates are re-verified exactly before being reported.
    std::vector<double> srow(n, 0.0);
    double val = 0.0;
    std::uint64_t cur = 0;
    std::vector<std::pair<double, std::uint64_t>> hits;
    for (std::uint64_t k = 1; k < (1ull << n); ++k) {
      std::uint64_t gray = k ^ (k >> 1);
      std::uint64_t flip = gray ^ cur;
      std::size_t j = static_cast<std::size_t>(std::countr_zero(flip));
      if (gray & flip) { // turning j on
        val += 2.0 * srow[j] + d.at(j, j);
        for (std::size_t q = 0; q < n; ++q) srow[q] += d.at(j, q);
      } else { // turning j off
        val += -2.0 * srow[j] + d.at(j, j);
        for (std::size_t q = 0; q < n; ++q) srow[q] -= d.at(j, q);
      }
      cur = gray;
      if (val < -opts.violation_tol) {
        hits.emplace_back(val, cur);
        if (hits.size() > 4096) {
          std::sort(hits.begin(), hits.end());
          hits.resize(64);
        }
      }
    }
    std::sort(hits.begin(), hits.end());
    if (hits.size() > 64) hits.resize(64);
    for (const auto& [hv, mask] : hits) {
      (void)hv;
      OutcomeSet a(n);
      for (std::size_t i = 0; i < n; ++i)
        if (mask & (1ull << i)) a.set(i);
      push(cands, std::move(a));
    }
  } else {
    std::mt19937_64 rng(opts.seed);
    // singletons and the best pairs make cheap deterministic starts
    for (std::size_t i = 0; i < n; ++i)
      if (d.at(i, i) < -opts.violation_tol) {
        OutcomeSet a(n);
        a.set(i);
        push(cands, std::move(a));
      }
    std::vector<Candidate> starts;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i + 1; j < n; ++j) {
        double v = d.at(i, i) + d.at(j, j) + 2.0 * d.at(i, j);
        if (starts.size() < 8 || v < starts.back().value) {
          OutcomeSet a(n);
          a.set(i);
          a.set(j);
          starts.push_back({v, std::move(a)});
          std::sort(starts.begin(), starts.end(),
                    [](const Candidate& p, const Candidate& q) { return p.value < q.value; });
          if (starts.size() > 8) starts.pop_back();
        }
      }
    for (auto& st : starts) {
      OutcomeSet a = st.set;
      double val;
      descent(d, a, val);
      push(cands, std::move(a));
    }
    std::bernoulli_distribution half(0.5), quarter(0.25);
    for (int rstart = 0; rstart < opts.restarts; ++rstart) {
      OutcomeSet a(n);
      bool dense = rstart % 2 == 0;
      for (std::size_t i = 0; i < n; ++i)
        if (dense ? half(rng) : quarter(rng)) a.set(i);
      double val;
      descent(d, a, val);
      push(cands, std::move(a));
    }
  }

  std::sort(cands.begin(), cands.end(),
            [](const Candidate& a, const Candidate& b) { return a.value < b.value; });
  std::set<std::vector<std::uint64_t>> seen;
  for (auto& c : cands) {
    if (static_cast<int>(res.subsets.size()) >= opts.max_results) break;
    if (!seen.insert(c.set.words()).second) continue;
    res.subsets.push_back(std::move(c.set));
    res.values.push_back(c.value);
  }
  return res;
}

linalg::Matrix extend_q1ab_witness(const linalg::Matrix& w, const OutcomeIndexedProgram& meta,
                                   const Scenario& s, ProjectorOrder order,
                                   double rank_cutoff) {
  const std::size_t side = meta.index_sets.size();
  if (w.rows != side || w.cols != side)
    throw InputError("witness size does not match the q1ab index");

  linalg::SymEig eig = linalg::jacobi_eigensym(w);
  double lmax = std::max(eig.values.back(), 0.0);
  if (lmax <= 0.0) throw InputError("witness matrix is not positive semidefinite");
  std::vector<std::size_t> keep;
  for (std::size_t k = 0; k < eig.values.size(); ++k)
    if (eig.values[k] > rank_cutoff * lmax) keep.push_back(k);
  const std::size_t r = keep.size();

  // Phi columns are the outcome vectors |X_s| in R^r
  linalg::Matrix phi(r, side);
  for (std::size_t q = 0; q < r; ++q) {
    double root = std::sqrt(eig.values[keep[q]]);
    for (std::size_t col = 0; col < side; ++col)
      phi.at(q, col) = root * eig.vectors.at(keep[q], col);
  }

  // orthonormal subspace bases for every non-distinguished basic outcome
  const int p = s.n_basics();
  std::vector<std::vector<linalg::Matrix>> bases(p); // [i][a-1] -> r x k
  for (int i = 0; i < p; ++i) {
    for (int a = 1; a < s.space.cards[i]; ++a) {
      OutcomeSet cyl = s.basic_outcome(i, a);
      std::vector<std::size_t> cols;
      for (std::size_t c = 0; c < side; ++c)
        if (c != meta.xi_index && meta.index_sets[c].is_subset_of(cyl)) cols.push_back(c);
      linalg::Matrix sub(r, cols.size());
      for (std::size_t q = 0; q < r; ++q)
        for (std::size_t cc = 0; cc < cols.size(); ++cc) sub.at(q, cc) = phi.at(q, cols[cc]);
      std::size_t rank = orthonormalize_columns(sub, 1e-8);
      linalg::Matrix basis(r, rank);
      for (std::size_t q = 0; q < r; ++q)
        for (std::size_t cc = 0; cc < rank; ++cc) basis.at(q, cc) = sub.at(q, cc);
      bases[i].push_back(std::move(basis));
    }
  }

  auto apply_projector = [&](int basic, int label, std::vector<double>& v) {
    auto project_onto = [&](const linalg::Matrix& basis, const std::vector<double>& x) {
      std::vector<double> out(x.size(), 0.0);
      for (std::size_t c = 0; c < basis.cols; ++c) {
        double coef = 0.0;
        for (std::size_t q = 0; q < basis.rows; ++q) coef += basis.at(q, c) * x[q];
        for (std::size_t q = 0; q < basis.rows; ++q) out[q] += coef * basis.at(q, c);
      }
      return out;
    };
    if (label > 0) {
      v = project_onto(bases[basic][label - 1], v);
    } else {
      // distinguished outcome: completeness relation E* = 1 - sum of the rest
      std::vector<double> acc = v;
      for (int a = 1; a < s.space.cards[basic]; ++a) {
        auto part = project_onto(bases[basic][a - 1], v);
        for (std::size_t q = 0; q < acc.size(); ++q) acc[q] -= part[q];
      }
      v = std::move(acc);
    }
  };

  const std::size_t n = s.n_atoms();
  linalg::Matrix vecs(n, r);
  for (std::size_t atom = 0; atom < n; ++atom) {
    std::vector<double> v(r);
    for (std::size_t q = 0; q < r; ++q) v[q] = phi.at(q, meta.xi_index);
    if (order == ProjectorOrder::DescendingBasics) {
      for (int f = p - 1; f >= 0; --f) apply_projector(f, s.space.label_of(atom, f), v);
    } else {
      for (int f = 0; f < p; ++f) apply_projector(f, s.space.label_of(atom, f), v);
    }
    for (std::size_t q = 0; q < r; ++q) vecs.at(atom, q) = v[q];
  }

  linalg::Matrix g(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i; j < n; ++j) {
      double v = kernels::ops().dot(vecs.row(i), vecs.row(j), r);
      g.at(i, j) = v;
      g.at(j, i) = v;
    }
  return g;
}

} // namespace qmh

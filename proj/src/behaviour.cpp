#include "qmh/behaviour.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace qmh {

Behaviour Behaviour::create(std::shared_ptr<const Scenario> s,
                            std::vector<std::vector<double>> probs) {
  Behaviour b;
  b.scenario = std::move(s);
  if (probs.size() != b.scenario->maximal_contexts.size())
    throw InputError("behaviour needs one probability block per maximal context");
  for (const auto& k : b.scenario->maximal_contexts)
    b.ctx.push_back(b.scenario->make_measurement(k));
  for (std::size_t t = 0; t < probs.size(); ++t)
    if (probs[t].size() != b.ctx[t].n_cells())
      throw InputError("probability block size mismatch in context " + std::to_string(t));
  b.probs = std::move(probs);
  return b;
}

bool Behaviour::is_outcome(const OutcomeSet& x) const {
  for (const auto& m : ctx) {
    bool ok = true;
    for (const auto& cell : m.cells)
      if (cell.intersects(x) && !cell.is_subset_of(x)) {
        ok = false;
        break;
      }
    if (ok) return true;
  }
  return false;
}

double Behaviour::prob_of(const OutcomeSet& x) const {
  for (std::size_t t = 0; t < ctx.size(); ++t) {
    bool ok = true;
    double p = 0.0;
    for (std::size_t c = 0; c < ctx[t].n_cells(); ++c) {
      const auto& cell = ctx[t].cells[c];
      if (cell.is_subset_of(x))
        p += probs[t][c];
      else if (cell.intersects(x)) {
        ok = false;
        break;
      }
    }
    if (ok) return p;
  }
  throw InputError("set is not an outcome of any doable measurement");
}

std::vector<ConsistencyIssue> validate(const Behaviour& b, double tol) {
  std::vector<ConsistencyIssue> issues;
  const Scenario& s = *b.scenario;

  for (std::size_t t = 0; t < b.ctx.size(); ++t) {
    double sum = 0.0;
    for (std::size_t c = 0; c < b.ctx[t].n_cells(); ++c) {
      double p = b.probs[t][c];
      sum += p;
      if (p < -tol)
        issues.push_back({"negative probability in context " + std::to_string(t) + " cell " +
                              std::to_string(c),
                          -p});
      if (p > 1 + tol)
        issues.push_back({"probability above one in context " + std::to_string(t) + " cell " +
                              std::to_string(c),
                          p - 1});
    }
    if (std::fabs(sum - 1.0) > tol)
      issues.push_back(
          {"context " + std::to_string(t) + " probabilities sum to " + std::to_string(sum),
           std::fabs(sum - 1.0)});
  }

  // marginal agreement on every shared (non-maximal) measurement
  for (const auto& basics : s.all_measurements) {
    Measurement m = s.make_measurement(basics);
    std::vector<std::vector<double>> marginals;
    std::vector<std::size_t> owners;
    for (std::size_t t = 0; t < b.ctx.size(); ++t) {
      if (!std::includes(s.maximal_contexts[t].begin(), s.maximal_contexts[t].end(),
                         basics.begin(), basics.end()))
        continue;
      std::vector<double> v(m.n_cells(), 0.0);
      for (std::size_t c = 0; c < b.ctx[t].n_cells(); ++c)
        v[m.cell_of_atom(s.space, b.ctx[t].cells[c].first_member())] += b.probs[t][c];
      marginals.push_back(std::move(v));
      owners.push_back(t);
    }
    for (std::size_t k = 1; k < marginals.size(); ++k)
      for (std::size_t c = 0; c < m.n_cells(); ++c) {
        double d = std::fabs(marginals[k][c] - marginals[0][c]);
        if (d > tol) {
          std::string name = "{";
          for (std::size_t q = 0; q < basics.size(); ++q)
            name += (q ? "," : "") + std::to_string(basics[q]);
          issues.push_back({"marginal of measurement " + name + "} cell " + std::to_string(c) +
                                " differs between contexts " + std::to_string(owners[0]) +
                                " and " + std::to_string(owners[k]),
                            d});
        }
      }
  }
  return issues;
}

Behaviour uniform_behaviour(std::shared_ptr<const Scenario> s) {
  std::vector<std::vector<double>> probs;
  const double n = static_cast<double>(s->n_atoms());
  for (const auto& k : s->maximal_contexts) {
    Measurement m = s->make_measurement(k);
    std::vector<double> v;
    for (const auto& cell : m.cells) v.push_back(static_cast<double>(cell.count()) / n);
    probs.push_back(std::move(v));
  }
  return Behaviour::create(std::move(s), std::move(probs));
}

Behaviour deterministic_behaviour(std::shared_ptr<const Scenario> s, std::size_t atom) {
  if (atom >= s->n_atoms()) throw InputError("atom index out of range");
  std::vector<std::vector<double>> probs;
  for (const auto& k : s->maximal_contexts) {
    Measurement m = s->make_measurement(k);
    std::vector<double> v(m.n_cells(), 0.0);
    v[m.cell_of_atom(s->space, atom)] = 1.0;
    probs.push_back(std::move(v));
  }
  return Behaviour::create(std::move(s), std::move(probs));
}

Behaviour mix(const Behaviour& a, const Behaviour& b, double weight_a) {
  if (!a.scenario->same_structure(*b.scenario)) throw InputError("scenario mismatch in mix");
  Behaviour out = a;
  for (std::size_t t = 0; t < out.probs.size(); ++t)
    for (std::size_t c = 0; c < out.probs[t].size(); ++c)
      out.probs[t][c] = weight_a * a.probs[t][c] + (1.0 - weight_a) * b.probs[t][c];
  return out;
}

std::shared_ptr<const Scenario> chsh_scenario() {
  Scenario s = build_scenario({2, 2, 2, 2}, {{0, 2}, {0, 3}, {1, 2}, {1, 3}});
  s.basic_names = {"A:x=0", "A:x=1", "B:y=0", "B:y=1"};
  return std::make_shared<const Scenario>(std::move(s));
}

bool is_chsh_structure(const Scenario& s) {
  return s.space.cards == std::vector<int>{2, 2, 2, 2} &&
         s.maximal_contexts ==
             std::vector<std::vector<int>>{{0, 2}, {0, 3}, {1, 2}, {1, 3}};
}

namespace {
void require_chsh(const Scenario& s) {
  if (!is_chsh_structure(s)) throw InputError("behaviour is not on the CHSH scenario");
}
// x setting of context t is t/2, y setting is t%2; cell index is a*2+b.
} // namespace

Behaviour pr_box() {
  auto s = chsh_scenario();
  std::vector<std::vector<double>> probs(4, std::vector<double>(4, 0.0));
  for (int t = 0; t < 4; ++t) {
    int x = t / 2, y = t % 2;
    for (int a = 0; a < 2; ++a)
      for (int bb = 0; bb < 2; ++bb)
        if ((a ^ bb) == (x & y)) probs[t][a * 2 + bb] = 0.5;
  }
  return Behaviour::create(std::move(s), std::move(probs));
}

Behaviour isotropic(double lambda) {
  if (lambda < 0.0 || lambda > 1.0) throw InputError("isotropic weight must be in [0,1]");
  return mix(pr_box(), uniform_behaviour(chsh_scenario()), lambda);
}

Behaviour correlator_behaviour(const std::array<double, 4>& e) {
  auto s = chsh_scenario();
  std::vector<std::vector<double>> probs(4, std::vector<double>(4, 0.0));
  for (int t = 0; t < 4; ++t) {
    if (std::fabs(e[t]) > 1.0) throw InputError("correlator out of [-1,1]");
    for (int a = 0; a < 2; ++a)
      for (int bb = 0; bb < 2; ++bb)
        probs[t][a * 2 + bb] = (1.0 + ((a ^ bb) ? -e[t] : e[t])) / 4.0;
  }
  return Behaviour::create(std::move(s), std::move(probs));
}

std::array<double, 4> chsh_correlators(const Behaviour& b) {
  require_chsh(*b.scenario);
  std::array<double, 4> e{};
  for (int t = 0; t < 4; ++t)
    e[t] = b.probs[t][0] - b.probs[t][1] - b.probs[t][2] + b.probs[t][3];
  return e;
}

double BellFunctional::value(const Behaviour& b) const {
  if (!scenario->same_structure(*b.scenario))
    throw InputError("functional/behaviour scenario mismatch");
  double v = 0.0;
  for (std::size_t t = 0; t < coef.size(); ++t)
    for (std::size_t c = 0; c < coef[t].size(); ++c) v += coef[t][c] * b.probs[t][c];
  return v;
}

BellFunctional chsh_functional() {
  BellFunctional f;
  f.scenario = chsh_scenario();
  const double sign[4] = {1.0, 1.0, 1.0, -1.0}; // S = E00 + E01 + E10 - E11
  for (int t = 0; t < 4; ++t) {
    std::vector<double> v(4);
    for (int a = 0; a < 2; ++a)
      for (int bb = 0; bb < 2; ++bb) v[a * 2 + bb] = sign[t] * ((a ^ bb) ? -1.0 : 1.0);
    f.coef.push_back(std::move(v));
  }
  return f;
}

double chsh_value(const Behaviour& b) {
  require_chsh(*b.scenario);
  auto e = chsh_correlators(b);
  return e[0] + e[1] + e[2] - e[3];
}

TlmReport tlm_check(const Behaviour& b, double corr_tol) {
  require_chsh(*b.scenario);
  TlmReport r;
  r.correlators = chsh_correlators(b);
  double asum = 0.0;
  std::array<double, 4> as{};
  for (int t = 0; t < 4; ++t) {
    double e = r.correlators[t];
    if (std::fabs(e) > 1.0 + corr_tol) throw InputError("correlator magnitude exceeds 1");
    as[t] = std::asin(std::clamp(e, -1.0, 1.0));
    asum += as[t];
  }
  r.max_combination = 0.0;
  for (int t = 0; t < 4; ++t)
    r.max_combination = std::max(r.max_combination, std::fabs(asum - 2.0 * as[t]));
  r.margin = std::numbers::pi - r.max_combination;
  r.satisfied = r.margin >= 0.0;
  return r;
}

std::vector<double> extend_to_branching(const Behaviour& b, const BranchingMeasurement& mb) {
  std::vector<double> out;
  out.reserve(mb.cells.size());
  for (const auto& cell : mb.cells) out.push_back(b.prob_of(cell));
  return out;
}

Behaviour compose_behaviours(const std::vector<Behaviour>& parts, std::size_t atom_budget) {
  if (parts.empty()) throw InputError("compose needs at least one behaviour");
  std::vector<Scenario> scns;
  for (const auto& p : parts) scns.push_back(*p.scenario);
  auto composed = std::make_shared<const Scenario>(compose_scenarios(scns, atom_budget));

  std::vector<std::vector<double>> probs;
  for (const auto& ctxk : composed->maximal_contexts) {
    // split the composed context back into per-part contexts
    std::vector<std::vector<int>> local(parts.size());
    int off = 0;
    std::vector<int> offs;
    for (const auto& p : parts) {
      offs.push_back(off);
      off += p.scenario->n_basics();
    }
    for (int i : ctxk) {
      std::size_t k = parts.size() - 1;
      while (i < offs[k]) --k;
      local[k].push_back(i - offs[k]);
    }
    std::vector<std::size_t> tidx(parts.size());
    std::vector<const std::vector<double>*> blocks(parts.size());
    std::vector<std::size_t> ncells(parts.size());
    for (std::size_t k = 0; k < parts.size(); ++k) {
      const auto& mcs = parts[k].scenario->maximal_contexts;
      auto it = std::find(mcs.begin(), mcs.end(), local[k]);
      if (it == mcs.end()) throw Error("composed context does not factor");
      tidx[k] = static_cast<std::size_t>(it - mcs.begin());
      blocks[k] = &parts[k].probs[tidx[k]];
      ncells[k] = blocks[k]->size();
    }
    std::size_t total = 1;
    for (auto c : ncells) total *= c;
    std::vector<double> v(total, 1.0);
    for (std::size_t cell = 0; cell < total; ++cell) {
      std::size_t rest = cell;
      for (std::size_t k = parts.size(); k-- > 0;) {
        v[cell] *= (*blocks[k])[rest % ncells[k]];
        rest /= ncells[k];
      }
    }
    probs.push_back(std::move(v));
  }
  return Behaviour::create(std::move(composed), std::move(probs));
}

} // namespace qmh

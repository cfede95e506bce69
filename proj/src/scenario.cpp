#include "qmh/scenario.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <map>
#include <set>

namespace qmh {

OutcomeSet::OutcomeSet(std::size_t n_atoms, bool filled)
    : n_(n_atoms), w_((n_atoms + 63) / 64, 0) {
  if (filled && n_ > 0) {
    for (auto& w : w_) w = ~0ull;
    std::size_t tail = n_ % 64;
    if (tail) w_.back() = (1ull << tail) - 1;
  }
}

std::size_t OutcomeSet::count() const {
  std::size_t c = 0;
  for (auto w : w_) c += std::popcount(w);
  return c;
}

bool OutcomeSet::test(std::size_t i) const { return (w_[i / 64] >> (i % 64)) & 1ull; }
void OutcomeSet::set(std::size_t i) { w_[i / 64] |= 1ull << (i % 64); }
void OutcomeSet::reset(std::size_t i) { w_[i / 64] &= ~(1ull << (i % 64)); }

bool OutcomeSet::empty() const {
  for (auto w : w_)
    if (w) return false;
  return true;
}

OutcomeSet OutcomeSet::operator&(const OutcomeSet& o) const {
  OutcomeSet r(n_);
  for (std::size_t k = 0; k < w_.size(); ++k) r.w_[k] = w_[k] & o.w_[k];
  return r;
}

OutcomeSet OutcomeSet::operator|(const OutcomeSet& o) const {
  OutcomeSet r(n_);
  for (std::size_t k = 0; k < w_.size(); ++k) r.w_[k] = w_[k] | o.w_[k];
  return r;
}

OutcomeSet OutcomeSet::complement() const {
  OutcomeSet r(n_, true);
  for (std::size_t k = 0; k < w_.size(); ++k) r.w_[k] &= ~w_[k];
  return r;
}

bool OutcomeSet::is_subset_of(const OutcomeSet& o) const {
  for (std::size_t k = 0; k < w_.size(); ++k)
    if (w_[k] & ~o.w_[k]) return false;
  return true;
}

bool OutcomeSet::intersects(const OutcomeSet& o) const {
  for (std::size_t k = 0; k < w_.size(); ++k)
    if (w_[k] & o.w_[k]) return true;
  return false;
}

std::size_t OutcomeSet::intersect_count(const OutcomeSet& o) const {
  std::size_t c = 0;
  for (std::size_t k = 0; k < w_.size(); ++k) c += std::popcount(w_[k] & o.w_[k]);
  return c;
}

bool OutcomeSet::operator<(const OutcomeSet& o) const {
  for (std::size_t k = 0; k < w_.size(); ++k) {
    std::uint64_t x = w_[k] ^ o.w_[k];
    if (x) {
      std::uint64_t low = x & (~x + 1);
      return (w_[k] & low) != 0; // the set holding the smallest distinguishing atom
    }
  }
  return false;
}

std::vector<std::size_t> OutcomeSet::members() const {
  std::vector<std::size_t> out;
  out.reserve(count());
  for_each([&](std::size_t i) { out.push_back(i); });
  return out;
}

std::size_t OutcomeSet::first_member() const {
  for (std::size_t k = 0; k < w_.size(); ++k)
    if (w_[k]) return k * 64 + std::countr_zero(w_[k]);
  return n_;
}

void OutcomeSet::for_each(const std::function<void(std::size_t)>& fn) const {
  for (std::size_t k = 0; k < w_.size(); ++k) {
    std::uint64_t w = w_[k];
    while (w) {
      fn(k * 64 + std::countr_zero(w));
      w &= w - 1;
    }
  }
}

NCSpace NCSpace::from_cards(std::vector<int> cards, std::size_t atom_budget) {
  if (cards.empty()) throw InputError("NC space needs at least one factor");
  NCSpace s;
  s.cards = std::move(cards);
  s.total = 1;
  for (int c : s.cards) {
    if (c < 1) throw InputError("factor cardinality must be >= 1");
    if (s.total > atom_budget / static_cast<std::size_t>(c))
      throw BudgetError("atom budget exceeded: |Xi| > " + std::to_string(atom_budget));
    s.total *= static_cast<std::size_t>(c);
  }
  s.strides.assign(s.cards.size(), 1);
  for (int f = static_cast<int>(s.cards.size()) - 2; f >= 0; --f)
    s.strides[f] = s.strides[f + 1] * static_cast<std::size_t>(s.cards[f + 1]);
  return s;
}

std::size_t NCSpace::atom_of(const std::vector<int>& labels) const {
  std::size_t a = 0;
  for (std::size_t f = 0; f < cards.size(); ++f) {
    if (labels[f] < 0 || labels[f] >= cards[f]) throw InputError("label out of range");
    a = a * static_cast<std::size_t>(cards[f]) + static_cast<std::size_t>(labels[f]);
  }
  return a;
}

std::vector<int> Measurement::cell_labels(std::size_t cell) const {
  std::vector<int> out(basics.size());
  for (int k = static_cast<int>(basics.size()) - 1; k >= 0; --k) {
    out[k] = static_cast<int>(cell % static_cast<std::size_t>(local_cards[k]));
    cell /= static_cast<std::size_t>(local_cards[k]);
  }
  return out;
}

std::size_t Measurement::cell_of_atom(const NCSpace& space, std::size_t atom) const {
  std::size_t c = 0;
  for (std::size_t k = 0; k < basics.size(); ++k)
    c = c * static_cast<std::size_t>(local_cards[k]) +
        static_cast<std::size_t>(space.label_of(atom, basics[k]));
  return c;
}

Measurement Scenario::make_measurement(const std::vector<int>& basics) const {
  Measurement m;
  m.basics = basics;
  std::sort(m.basics.begin(), m.basics.end());
  std::size_t ncells = 1;
  for (int i : m.basics) {
    if (i < 0 || i >= n_basics()) throw InputError("basic measurement index out of range");
    ncells *= static_cast<std::size_t>(space.cards[i]);
    m.local_cards.push_back(space.cards[i]);
  }
  m.cells.assign(ncells, OutcomeSet(space.total));
  for (std::size_t a = 0; a < space.total; ++a) m.cells[m.cell_of_atom(space, a)].set(a);
  return m;
}

OutcomeSet Scenario::basic_outcome(int i, int label) const {
  if (i < 0 || i >= n_basics()) throw InputError("basic measurement index out of range");
  if (label < 0 || label >= space.cards[i]) throw InputError("outcome label out of range");
  OutcomeSet x(space.total);
  for (std::size_t a = 0; a < space.total; ++a)
    if (space.label_of(a, i) == label) x.set(a);
  return x;
}

bool Scenario::has_measurement(const std::vector<int>& basics) const {
  std::vector<int> k = basics;
  std::sort(k.begin(), k.end());
  auto cmp = [](const std::vector<int>& a, const std::vector<int>& b) {
    if (a.size() != b.size()) return a.size() < b.size();
    return a < b;
  };
  return std::binary_search(all_measurements.begin(), all_measurements.end(), k, cmp);
}

int Scenario::covering_context(const std::vector<int>& basics) const {
  for (std::size_t c = 0; c < maximal_contexts.size(); ++c)
    if (std::includes(maximal_contexts[c].begin(), maximal_contexts[c].end(), basics.begin(),
                      basics.end()))
      return static_cast<int>(c);
  return -1;
}

namespace {

std::vector<std::vector<int>> downward_closure(const std::vector<std::vector<int>>& maximal,
                                               int n_basics) {
  std::set<std::vector<int>> all;
  all.insert({});
  for (int i = 0; i < n_basics; ++i) all.insert({i});
  for (const auto& ctx : maximal) {
    std::size_t k = ctx.size();
    for (std::size_t mask = 0; mask < (1ull << k); ++mask) {
      std::vector<int> sub;
      for (std::size_t b = 0; b < k; ++b)
        if (mask & (1ull << b)) sub.push_back(ctx[b]);
      all.insert(std::move(sub));
    }
  }
  std::vector<std::vector<int>> out(all.begin(), all.end());
  std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) {
    if (a.size() != b.size()) return a.size() < b.size();
    return a < b;
  });
  return out;
}

} // namespace

Scenario build_scenario(std::vector<int> factor_cards,
                        std::vector<std::vector<int>> maximal_contexts,
                        std::size_t atom_budget) {
  Scenario s;
  s.space = NCSpace::from_cards(std::move(factor_cards), atom_budget);
  const int p = s.n_basics();

  std::set<std::vector<int>> user;
  for (auto& ctx : maximal_contexts) {
    std::sort(ctx.begin(), ctx.end());
    ctx.erase(std::unique(ctx.begin(), ctx.end()), ctx.end());
    for (int i : ctx)
      if (i < 0 || i >= p) throw InputError("context index out of range");
    user.insert(ctx);
  }
  std::set<std::vector<int>> ctxs = user;
  // every basic measurement is performable on its own
  for (int i = 0; i < p; ++i) ctxs.insert({i});

  std::vector<std::vector<int>> kept;
  for (const auto& c : ctxs) {
    bool dominated = false;
    for (const auto& d : ctxs)
      if (c != d && std::includes(d.begin(), d.end(), c.begin(), c.end())) {
        dominated = true;
        break;
      }
    if (dominated) {
      if (user.count(c)) {
        std::string w = "dropping dominated context {";
        for (std::size_t k = 0; k < c.size(); ++k) w += (k ? "," : "") + std::to_string(c[k]);
        s.build_warnings.push_back(w + "}");
      }
    } else {
      kept.push_back(c);
    }
  }
  std::sort(kept.begin(), kept.end());
  s.maximal_contexts = std::move(kept);
  s.all_measurements = downward_closure(s.maximal_contexts, p);
  return s;
}

Scenario bell_scenario(int n, int m, int d, std::size_t atom_budget) {
  if (n < 1 || m < 1 || d < 1) throw InputError("bell_scenario needs n,m,d >= 1");
  std::vector<int> cards(static_cast<std::size_t>(n) * m, d);
  std::vector<std::vector<int>> contexts;
  std::vector<int> setting(n, 0);
  for (;;) {
    std::vector<int> ctx;
    for (int w = 0; w < n; ++w) ctx.push_back(w * m + setting[w]);
    contexts.push_back(ctx);
    int w = n - 1;
    while (w >= 0 && ++setting[w] == m) setting[w--] = 0;
    if (w < 0) break;
  }
  Scenario s = build_scenario(std::move(cards), std::move(contexts), atom_budget);
  for (int w = 0; w < n; ++w)
    for (int k = 0; k < m; ++k)
      s.basic_names.push_back("w" + std::to_string(w) + ":s" + std::to_string(k));
  return s;
}

Scenario compose_scenarios(const std::vector<Scenario>& parts, std::size_t atom_budget) {
  if (parts.empty()) throw InputError("compose needs at least one scenario");
  std::vector<int> cards;
  std::vector<int> offset(parts.size(), 0);
  for (std::size_t k = 0; k < parts.size(); ++k) {
    offset[k] = static_cast<int>(cards.size());
    cards.insert(cards.end(), parts[k].space.cards.begin(), parts[k].space.cards.end());
  }
  std::vector<std::vector<int>> contexts;
  std::vector<std::size_t> pick(parts.size(), 0);
  for (;;) {
    std::vector<int> ctx;
    for (std::size_t k = 0; k < parts.size(); ++k)
      for (int i : parts[k].maximal_contexts[pick[k]]) ctx.push_back(i + offset[k]);
    contexts.push_back(ctx);
    int k = static_cast<int>(parts.size()) - 1;
    while (k >= 0 && ++pick[k] == parts[k].maximal_contexts.size()) pick[k--] = 0;
    if (k < 0) break;
  }
  Scenario s = build_scenario(std::move(cards), std::move(contexts), atom_budget);
  for (std::size_t k = 0; k < parts.size(); ++k) {
    for (int i = 0; i < parts[k].n_basics(); ++i) {
      std::string base = parts[k].basic_names.empty()
                             ? ("m" + std::to_string(i))
                             : parts[k].basic_names[i];
      s.basic_names.push_back("s" + std::to_string(k) + "." + base);
    }
  }
  return s;
}

std::vector<OutcomeSet> algebra_outcomes(const Scenario& s, const Measurement& m) {
  const std::size_t k = m.n_cells();
  if (k > 20) throw BudgetError("algebra too large to enumerate (2^" + std::to_string(k) + ")");
  std::vector<OutcomeSet> out;
  out.reserve(1ull << k);
  for (std::size_t mask = 0; mask < (1ull << k); ++mask) {
    OutcomeSet u(s.n_atoms());
    for (std::size_t c = 0; c < k; ++c)
      if (mask & (1ull << c)) u = u | m.cells[c];
    out.push_back(std::move(u));
  }
  return out;
}

BranchingMeasurement make_branching(const Scenario& s, const std::vector<int>& first_basics,
                                    const std::vector<std::vector<int>>& second_basics) {
  BranchingMeasurement b;
  b.first = s.make_measurement(first_basics);
  if (second_basics.size() != b.first.n_cells())
    throw InputError("make_branching: one second-stage measurement per first-stage outcome");
  for (std::size_t c = 0; c < second_basics.size(); ++c) {
    Measurement m2 = s.make_measurement(second_basics[c]);
    if (!std::includes(m2.basics.begin(), m2.basics.end(), b.first.basics.begin(),
                       b.first.basics.end()))
      throw InputError("make_branching: second stage must include the first");
    if (!s.has_measurement(m2.basics))
      throw InputError("make_branching: second stage not in the scenario");
    b.second.push_back(std::move(m2));
  }
  for (std::size_t c = 0; c < b.first.n_cells(); ++c)
    for (const auto& cell : b.second[c].cells)
      if (cell.is_subset_of(b.first.cells[c]) && !cell.empty()) b.cells.push_back(cell);
  std::sort(b.cells.begin(), b.cells.end());
  return b;
}

std::vector<BranchingMeasurement> enumerate_branching(const Scenario& s,
                                                      std::size_t recipe_budget) {
  // count recipes up front
  double recipes = 0;
  std::vector<std::vector<std::size_t>> supersets(s.all_measurements.size());
  for (std::size_t mi = 0; mi < s.all_measurements.size(); ++mi) {
    const auto& m1 = s.all_measurements[mi];
    for (std::size_t mj = 0; mj < s.all_measurements.size(); ++mj)
      if (std::includes(s.all_measurements[mj].begin(), s.all_measurements[mj].end(),
                        m1.begin(), m1.end()))
        supersets[mi].push_back(mj);
    std::size_t ncells = 1;
    for (int i : m1) ncells *= static_cast<std::size_t>(s.space.cards[i]);
    recipes += std::pow(static_cast<double>(supersets[mi].size()), static_cast<double>(ncells));
    if (recipes > static_cast<double>(recipe_budget))
      throw BudgetError("branching enumeration budget exceeded");
  }

  std::vector<BranchingMeasurement> out;
  std::set<std::vector<std::uint64_t>> seen;
  for (std::size_t mi = 0; mi < s.all_measurements.size(); ++mi) {
    Measurement m1 = s.make_measurement(s.all_measurements[mi]);
    const std::size_t k = m1.n_cells();
    const auto& sup = supersets[mi];
    // cells of each candidate second measurement, bucketed by first-stage cell
    std::vector<Measurement> cand;
    std::vector<std::vector<std::vector<OutcomeSet>>> buckets; // [cand][first cell]
    for (std::size_t cj : sup) {
      Measurement m2 = s.make_measurement(s.all_measurements[cj]);
      std::vector<std::vector<OutcomeSet>> bk(k);
      for (const auto& cell : m2.cells) {
        if (cell.empty()) continue;
        for (std::size_t c = 0; c < k; ++c)
          if (cell.is_subset_of(m1.cells[c])) {
            bk[c].push_back(cell);
            break;
          }
      }
      cand.push_back(std::move(m2));
      buckets.push_back(std::move(bk));
    }

    std::vector<std::size_t> choice(k, 0);
    for (;;) {
      std::vector<OutcomeSet> cells;
      for (std::size_t c = 0; c < k; ++c)
        for (const auto& cell : buckets[choice[c]][c]) cells.push_back(cell);
      std::sort(cells.begin(), cells.end());
      std::vector<std::uint64_t> key;
      for (const auto& cell : cells)
        key.insert(key.end(), cell.words().begin(), cell.words().end());
      if (seen.insert(std::move(key)).second) {
        BranchingMeasurement b;
        b.first = m1;
        for (std::size_t c = 0; c < k; ++c) b.second.push_back(cand[choice[c]]);
        b.cells = std::move(cells);
        out.push_back(std::move(b));
      }
      int c = static_cast<int>(k) - 1;
      while (c >= 0 && ++choice[c] == cand.size()) choice[c--] = 0;
      if (c < 0) break;
    }
  }
  return out;
}

std::vector<OrthogonalPair> branch_orthogonal_pairs(const Scenario& s) {
  std::vector<OrthogonalPair> out;
  std::set<std::pair<std::vector<std::uint64_t>, std::vector<std::uint64_t>>> seen;
  const auto& meas = s.all_measurements;
  std::vector<Measurement> built;
  built.reserve(meas.size());
  for (const auto& k : meas) built.push_back(s.make_measurement(k));

  for (std::size_t a = 0; a < built.size(); ++a)
    for (std::size_t b = a; b < built.size(); ++b) {
      std::vector<int> shared;
      std::set_intersection(built[a].basics.begin(), built[a].basics.end(),
                            built[b].basics.begin(), built[b].basics.end(),
                            std::back_inserter(shared));
      if (shared.empty()) continue;
      for (std::size_t ca = 0; ca < built[a].n_cells(); ++ca)
        for (std::size_t cb = (a == b ? ca + 1 : std::size_t{0}); cb < built[b].n_cells(); ++cb) {
          auto la = built[a].cell_labels(ca);
          auto lb = built[b].cell_labels(cb);
          int witness = -1;
          for (int i : shared) {
            auto pa = std::lower_bound(built[a].basics.begin(), built[a].basics.end(), i) -
                      built[a].basics.begin();
            auto pb = std::lower_bound(built[b].basics.begin(), built[b].basics.end(), i) -
                      built[b].basics.begin();
            if (la[pa] != lb[pb]) {
              witness = i;
              break;
            }
          }
          if (witness < 0) continue;
          const OutcomeSet& x = built[a].cells[ca];
          const OutcomeSet& y = built[b].cells[cb];
          if (x.empty() || y.empty()) continue;
          const OutcomeSet& lo = x < y ? x : y;
          const OutcomeSet& hi = x < y ? y : x;
          auto key = std::make_pair(lo.words(), hi.words());
          if (!seen.insert(key).second) continue;
          OrthogonalPair p;
          p.x = lo;
          p.y = hi;
          p.ctx_x = x < y ? built[a].basics : built[b].basics;
          p.ctx_y = x < y ? built[b].basics : built[a].basics;
          p.shared_basic = witness;
          out.push_back(std::move(p));
        }
    }
  std::sort(out.begin(), out.end(), [](const OrthogonalPair& p, const OrthogonalPair& q) {
    if (!(p.x == q.x)) return p.x < q.x;
    return p.y < q.y;
  });
  return out;
}

} // namespace qmh

#include "qmh/cone_program.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <set>

namespace qmh {

void ConeProgram::dedupe(double rhs_tol) {
  std::map<std::vector<std::pair<std::size_t, double>>, std::size_t> seen;
  std::vector<Equality> kept;
  for (auto& e : equalities) {
    e.f.finalize();
    auto it = seen.find(e.f.c);
    if (it == seen.end()) {
      seen.emplace(e.f.c, kept.size());
      kept.push_back(std::move(e));
    } else {
      const Equality& prev = kept[it->second];
      if (std::fabs(prev.rhs - e.rhs) > rhs_tol)
        throw SignallingError("conflicting right-hand sides for one constraint (" + prev.tag +
                              " vs " + e.tag + "): " + std::to_string(prev.rhs) + " vs " +
                              std::to_string(e.rhs) +
                              "; the behaviour assigns an outcome two probabilities");
    }
  }
  equalities = std::move(kept);
}

std::vector<std::string> ConeProgram::tag_families() const {
  std::set<std::string> tags;
  for (const auto& e : equalities) tags.insert(e.tag);
  return {tags.begin(), tags.end()};
}

std::string ConeProgram::export_text() const {
  std::string out;
  const char* kind_name = kind == ConeKind::Psd ? "PSD" : "LINEAR";
  out += "kind " + std::string(kind_name) + " n " + std::to_string(n) + " condition " +
         condition + "\n";
  if (kind == ConeKind::FreeWithCuts) out += "vars free lazy subset-positivity\n";
  char buf[64];
  for (const auto& e : equalities) {
    std::string line;
    for (const auto& [idx, v] : e.f.c) {
      std::snprintf(buf, sizeof buf, "%.17g", v);
      line += "coef " + std::to_string(idx) + " " + buf + " ";
    }
    std::snprintf(buf, sizeof buf, "%.17g", e.rhs);
    line += "rhs " + std::string(buf) + " tag \"" + e.tag + "\"";
    out += line + "\n";
  }
  return out;
}

} // namespace qmh

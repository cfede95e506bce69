#include "qmh/membership.hpp"

namespace qmh {

const char* condition_name(Condition c) {
  switch (c) {
    case Condition::Jpm: return "jpm";
    case Condition::Jqm: return "jqm";
    case Condition::Spjqm: return "spjqm";
    case Condition::Spjqmb: return "spjqmb";
    case Condition::Q1: return "q1";
    case Condition::Q1ab: return "q1ab";
  }
  return "?";
}

std::optional<Condition> condition_from_name(const std::string& name) {
  for (Condition c : kAllConditions)
    if (name == condition_name(c)) return c;
  return std::nullopt;
}

Verdict check_condition(const Behaviour& b, Condition c, const CheckOptions& opts) {
  const long mult = 1L << (2 * std::min(opts.effort, 8));
  switch (c) {
    case Condition::Jpm: {
      LpOptions lp = opts.lp;
      lp.max_iters *= mult;
      return lp_feasibility(compile_jpm(b), lp);
    }
    case Condition::Jqm: {
      JqmOptions jq = opts.jqm;
      jq.lp.max_iters *= mult;
      jq.cut_budget = static_cast<int>(jq.cut_budget * mult);
      return jqm_solve(compile_jqm(b), jq).verdict;
    }
    case Condition::Spjqm:
    case Condition::Spjqmb:
    case Condition::Q1:
    case Condition::Q1ab: {
      PsdOptions ps = opts.psd;
      ps.max_iters *= mult;
      ConeProgram prog;
      if (c == Condition::Spjqm) prog = compile_spjqm(b);
      else if (c == Condition::Spjqmb) prog = compile_spjqmb(b, opts.spjqmb_validation);
      else if (c == Condition::Q1) prog = compile_q1(b).prog;
      else prog = compile_q1ab(b).prog;
      return psd_solve(prog, ps);
    }
  }
  return {};
}

std::vector<std::string> audit_inclusions(const std::map<Condition, Verdict>& verdicts) {
  std::vector<std::string> violations;
  auto feas = [&](Condition c) -> std::optional<bool> {
    auto it = verdicts.find(c);
    if (it == verdicts.end() || !it->second.conclusive) return std::nullopt;
    return it->second.status == Status::Feasible;
  };
  auto expect = [&](Condition smaller, Condition larger) {
    auto fs = feas(smaller), fl = feas(larger);
    if (fs && fl && *fs && !*fl)
      violations.push_back(std::string(condition_name(smaller)) + " feasible but " +
                           condition_name(larger) + " infeasible");
  };
  expect(Condition::Jpm, Condition::Q1ab);
  expect(Condition::Jpm, Condition::Spjqmb);
  expect(Condition::Jpm, Condition::Spjqm);
  expect(Condition::Jpm, Condition::Q1);
  expect(Condition::Jpm, Condition::Jqm);
  expect(Condition::Q1ab, Condition::Spjqm);
  expect(Condition::Spjqmb, Condition::Spjqm);
  expect(Condition::Spjqm, Condition::Q1);
  // the two compilations of the same set must agree
  auto fb = feas(Condition::Spjqmb), fq = feas(Condition::Q1ab);
  if (fb && fq && *fb != *fq)
    violations.push_back("spjqmb and q1ab verdicts disagree");
  return violations;
}

} // namespace qmh

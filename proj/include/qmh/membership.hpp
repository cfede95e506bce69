#pragma once

#include "qmh/bisect.hpp"
#include "qmh/conditions.hpp"
#include "qmh/jqm_solve.hpp"
#include "qmh/lp.hpp"
#include "qmh/psd.hpp"

#include <map>
#include <optional>
#include <string>

namespace qmh {

enum class Condition { Jpm, Jqm, Spjqm, Spjqmb, Q1, Q1ab };

const char* condition_name(Condition c);
std::optional<Condition> condition_from_name(const std::string& name);
inline constexpr Condition kAllConditions[] = {Condition::Jpm,    Condition::Jqm,
                                               Condition::Spjqm,  Condition::Spjqmb,
                                               Condition::Q1,     Condition::Q1ab};

struct CheckOptions {
  LpOptions lp;
  PsdOptions psd;
  JqmOptions jqm;
  bool spjqmb_validation = false;
  int effort = 0; // each level quadruples the iteration budgets
};

// Compile + solve one membership condition for a behaviour.
Verdict check_condition(const Behaviour& b, Condition c, const CheckOptions& opts = {});

// The implications that hold between conclusive verdicts:
// JPM => Q1AB = SPJQMb => SPJQM => Q1, and JPM => JQM.
// Returns human-readable violation descriptions (empty = consistent).
std::vector<std::string> audit_inclusions(const std::map<Condition, Verdict>& verdicts);

} // namespace qmh

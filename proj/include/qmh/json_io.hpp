#pragma once

#include "qmh/behaviour.hpp"
#include "qmh/decoherence.hpp"
#include "qmh/quantum_model.hpp"
#include "qmh/verdict.hpp"

#include <json.hpp>

#include <memory>
#include <string>

namespace qmh::io {

using json = nlohmann::ordered_json;

json scenario_to_json(const Scenario& s);
std::shared_ptr<const Scenario> scenario_from_json(const json& j,
                                                   std::size_t atom_budget = kDefaultAtomBudget);

json behaviour_to_json(const Behaviour& b);
// `base_dir` resolves a scenario given as a file-path string.
Behaviour behaviour_from_json(const json& j, const std::string& base_dir = ".",
                              std::size_t atom_budget = kDefaultAtomBudget);

json model_to_json(const QuantumModel& m);
QuantumModel model_from_json(const json& j);

json decoherence_to_json(const DecoherenceMatrix& m);
DecoherenceMatrix decoherence_from_json(const json& j);

json verdict_to_json(const Verdict& v, bool timings = false, bool include_witness = true);

json load_json_file(const std::string& path);
void save_json_file(const std::string& path, const json& j);

} // namespace qmh::io

#include "qmh/json_io.hpp"

#include <filesystem>
#include <fstream>

namespace qmh::io {

json scenario_to_json(const Scenario& s) {
  json j;
  j["factors"] = s.space.cards;
  j["maximal_contexts"] = s.maximal_contexts; // already sorted lexicographically
  if (!s.basic_names.empty()) {
    json labels = json::object();
    for (std::size_t i = 0; i < s.basic_names.size(); ++i)
      labels[std::to_string(i)] = s.basic_names[i];
    j["labels"] = labels;
  }
  return j;
}

std::shared_ptr<const Scenario> scenario_from_json(const json& j, std::size_t atom_budget) {
  if (!j.is_object() || !j.contains("factors") || !j.contains("maximal_contexts"))
    throw InputError("scenario JSON needs 'factors' and 'maximal_contexts'");
  std::vector<int> cards = j.at("factors").get<std::vector<int>>();
  std::vector<std::vector<int>> ctxs =
      j.at("maximal_contexts").get<std::vector<std::vector<int>>>();
  Scenario s = build_scenario(std::move(cards), std::move(ctxs), atom_budget);
  if (j.contains("labels")) {
    s.basic_names.assign(s.n_basics(), "");
    for (const auto& [key, val] : j.at("labels").items())
      s.basic_names[static_cast<std::size_t>(std::stoul(key))] = val.get<std::string>();
  }
  return std::make_shared<const Scenario>(std::move(s));
}

json behaviour_to_json(const Behaviour& b) {
  json j;
  j["scenario"] = scenario_to_json(*b.scenario);
  json probs = json::object();
  for (std::size_t t = 0; t < b.probs.size(); ++t)
    probs[json(b.scenario->maximal_contexts[t]).dump()] = b.probs[t];
  j["probs"] = probs;
  return j;
}

Behaviour behaviour_from_json(const json& j, const std::string& base_dir,
                              std::size_t atom_budget) {
  if (!j.is_object() || !j.contains("scenario") || !j.contains("probs"))
    throw InputError("behaviour JSON needs 'scenario' and 'probs'");
  std::shared_ptr<const Scenario> s;
  if (j.at("scenario").is_string()) {
    std::filesystem::path p = j.at("scenario").get<std::string>();
    if (p.is_relative()) p = std::filesystem::path(base_dir) / p;
    s = scenario_from_json(load_json_file(p.string()), atom_budget);
  } else {
    s = scenario_from_json(j.at("scenario"), atom_budget);
  }
  std::vector<std::vector<double>> probs(s->maximal_contexts.size());
  for (std::size_t t = 0; t < s->maximal_contexts.size(); ++t) {
    std::string key = json(s->maximal_contexts[t]).dump();
    if (!j.at("probs").contains(key))
      throw InputError("behaviour JSON is missing probabilities for context " + key);
    probs[t] = j.at("probs").at(key).get<std::vector<double>>();
  }
  return Behaviour::create(std::move(s), std::move(probs));
}

namespace {

json cvec_to_json(const std::vector<std::complex<double>>& v) {
  json out = json::array();
  for (const auto& z : v) out.push_back(json::array({z.real(), z.imag()}));
  return out;
}

std::vector<std::complex<double>> cvec_from_json(const json& j) {
  std::vector<std::complex<double>> out;
  for (const auto& e : j) {
    if (!e.is_array() || e.size() != 2) throw InputError("complex entries must be [re,im]");
    out.emplace_back(e[0].get<double>(), e[1].get<double>());
  }
  return out;
}

} // namespace

json model_to_json(const QuantumModel& m) {
  json j;
  j["dimension"] = m.dim;
  j["state"] = cvec_to_json(m.state);
  json projs = json::object();
  for (const auto& [key, mat] : m.projectors) {
    json rows = json::array();
    for (int r = 0; r < m.dim; ++r) {
      json row = json::array();
      for (int c = 0; c < m.dim; ++c) {
        const auto& z = mat[static_cast<std::size_t>(r) * m.dim + c];
        row.push_back(json::array({z.real(), z.imag()}));
      }
      rows.push_back(row);
    }
    projs[std::to_string(key.first) + ":" + std::to_string(key.second)] = rows;
  }
  j["projectors"] = projs;
  return j;
}

QuantumModel model_from_json(const json& j) {
  QuantumModel m;
  m.dim = j.at("dimension").get<int>();
  m.state = cvec_from_json(j.at("state"));
  for (const auto& [key, rows] : j.at("projectors").items()) {
    auto colon = key.find(':');
    if (colon == std::string::npos) throw InputError("projector keys must be 'basic:label'");
    int basic = std::stoi(key.substr(0, colon));
    int label = std::stoi(key.substr(colon + 1));
    std::vector<std::complex<double>> mat;
    for (const auto& row : rows) {
      auto r = cvec_from_json(row);
      mat.insert(mat.end(), r.begin(), r.end());
    }
    if (mat.size() != static_cast<std::size_t>(m.dim) * m.dim)
      throw InputError("projector matrix size mismatch for key " + key);
    m.projectors[{basic, label}] = std::move(mat);
  }
  return m;
}

json decoherence_to_json(const DecoherenceMatrix& m) {
  json j;
  j["atoms"] = m.n_atoms();
  json rows = json::array();
  for (std::size_t i = 0; i < m.d.rows; ++i) {
    json row = json::array();
    for (std::size_t c = 0; c < m.d.cols; ++c) row.push_back(m.d.at(i, c));
    rows.push_back(row);
  }
  j["entries"] = rows;
  return j;
}

DecoherenceMatrix decoherence_from_json(const json& j) {
  DecoherenceMatrix m;
  std::size_t n = j.at("atoms").get<std::size_t>();
  m.d = linalg::Matrix(n, n);
  const json& rows = j.at("entries");
  if (rows.size() != n) throw InputError("decoherence entries must be an n x n array");
  for (std::size_t i = 0; i < n; ++i) {
    if (rows[i].size() != n) throw InputError("decoherence entries must be an n x n array");
    for (std::size_t c = 0; c < n; ++c) m.d.at(i, c) = rows[i][c].get<double>();
  }
  return m;
}

json verdict_to_json(const Verdict& v, bool timings, bool include_witness) {
  json j;
  j["status"] = status_name(v.status);
  j["conclusive"] = v.conclusive;
  json res;
  res["max_equality_violation"] = v.residuals.max_equality;
  res["min_eigenvalue"] = v.residuals.min_eigenvalue;
  res["max_cut_violation"] = v.residuals.max_cut;
  j["residuals"] = res;
  if (include_witness && v.witness) {
    if (v.witness_side > 0) {
      json rows = json::array();
      for (std::size_t i = 0; i < v.witness_side; ++i) {
        json row = json::array();
        for (std::size_t c = 0; c < v.witness_side; ++c)
          row.push_back((*v.witness)[i * v.witness_side + c]);
        rows.push_back(row);
      }
      j["witness"] = rows;
    } else {
      j["witness"] = *v.witness;
    }
  }
  if (v.certificate) {
    json cert;
    cert["type"] = v.certificate->type;
    cert["gap"] = v.certificate->gap;
    cert["support_residual"] = v.certificate->support_residual;
    cert["multipliers"] = v.certificate->multipliers;
    j["certificate"] = cert;
  }
  j["iterations"] = v.iterations;
  if (!v.detail.empty()) j["detail"] = v.detail;
  if (timings) j["wall_ms"] = v.wall_ms;
  return j;
}

json load_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open " + path);
  json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw InputError("malformed JSON in " + path + ": " + e.what());
  }
  return j;
}

void save_json_file(const std::string& path, const json& j) {
  std::ofstream out(path);
  if (!out) throw InputError("cannot write " + path);
  out << j.dump(2) << "\n";
}

} // namespace qmh::io

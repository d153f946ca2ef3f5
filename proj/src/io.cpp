#include "rum/io.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace rum::io {

using nlohmann::json;

namespace {

json parse_json(const std::string& text, const std::string& what) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw InvalidInput(what + ": " + e.what());
  }
}

Vec read_vec(const json& j, const std::string& field) {
  if (!j.is_array() || j.empty()) throw InvalidInput(field + " must be a non-empty array");
  Vec v;
  for (const auto& e : j) {
    if (!e.is_number()) throw InvalidInput(field + " must contain numbers only");
    v.push_back(e.get<double>());
  }
  return v;
}

}  // namespace

lp::SolveConfig SystemFile::solve_config() const {
  lp::SolveConfig cfg;
  cfg.tolerance = system.tolerance;
  cfg.arithmetic = arithmetic;
  return cfg;
}

SystemFile parse_system(const std::string& text) {
  const json j = parse_json(text, "system file");
  if (!j.is_object()) throw InvalidInput("system file: top level must be an object");

  SystemFile sf;
  if (!j.contains("budgets") || !j.at("budgets").is_array())
    throw InvalidInput("system file: 'budgets' array is required");
  for (std::size_t i = 0; i < j.at("budgets").size(); ++i) {
    const auto& jb = j.at("budgets")[i];
    Budget b;
    if (!jb.contains("id") || !jb.at("id").is_string())
      throw InvalidInput("system file: budgets[" + std::to_string(i) + "] needs a string 'id'");
    b.id = jb.at("id").get<std::string>();
    if (!jb.contains("p")) throw InvalidInput("system file: budgets[" + std::to_string(i) + "] needs 'p'");
    b.p = read_vec(jb.at("p"), "budgets[" + std::to_string(i) + "].p");
    sf.system.budgets.push_back(std::move(b));
  }
  if (j.contains("counterfactual") && !j.at("counterfactual").is_null()) {
    const auto& jc = j.at("counterfactual");
    Budget b;
    b.id = jc.value("id", std::string("B0"));
    if (!jc.contains("p")) throw InvalidInput("system file: counterfactual needs 'p'");
    b.p = read_vec(jc.at("p"), "counterfactual.p");
    sf.system.counterfactual = std::move(b);
  }
  if (j.contains("K")) {
    if (!j.at("K").is_number_integer()) throw InvalidInput("system file: K must be an integer");
    if (j.at("K").get<int>() != sf.system.dimension())
      throw InvalidInput("system file: K disagrees with the price vector lengths");
  }
  if (j.contains("options")) {
    const auto& jo = j.at("options");
    if (!jo.is_object()) throw InvalidInput("system file: options must be an object");
    sf.system.tolerance = jo.value("tolerance", sf.system.tolerance);
    sf.system.keep_null_patches = jo.value("keep_null_patches", sf.system.keep_null_patches);
    sf.max_types = jo.value("max_types", sf.max_types);
    if (jo.contains("arithmetic")) {
      const std::string a = jo.at("arithmetic").get<std::string>();
      if (a == "float")
        sf.arithmetic = lp::Arithmetic::Float;
      else if (a == "exact")
        sf.arithmetic = lp::Arithmetic::ExactRational;
      else
        throw InvalidInput("system file: arithmetic must be 'float' or 'exact'");
    }
    if (sf.max_types < 1) throw InvalidInput("system file: max_types must be positive");
  }
  if (sf.system.plane_count() == 0)
    throw InvalidInput("system file: needs at least one budget or a counterfactual");
  sf.system.validate();
  return sf;
}

SystemFile load_system(const std::string& path) { return parse_system(read_file(path)); }

PiFile parse_pi(const std::string& text) {
  const json j = parse_json(text, "pi file");
  if (!j.is_object() || !j.contains("budgets") || !j.at("budgets").is_object())
    throw InvalidInput("pi file: expected an object with a 'budgets' object");
  PiFile pf;
  for (const auto& [id, jm] : j.at("budgets").items()) {
    if (!jm.is_object()) throw InvalidInput("pi file: budget '" + id + "' must map signs to numbers");
    for (const auto& [sign_str, val] : jm.items()) {
      if (!val.is_number())
        throw InvalidInput("pi file: budget '" + id + "', patch '" + sign_str + "': not a number");
      pf.budgets[id][sign_str] = val.get<double>();
    }
  }
  return pf;
}

PiFile load_pi(const std::string& path) { return parse_pi(read_file(path)); }

DemandProbabilities align_pi(const PiFile& pi, const VectorRepresentation& rep,
                             const BudgetSystem& system, int first_block,
                             double tolerance) {
  DemandProbabilities out;
  for (int a = first_block; a < rep.blocks(); ++a) {
    const std::string& id = system.plane(a).id;
    const auto it = pi.budgets.find(id);
    if (it == pi.budgets.end())
      throw InvalidInput("pi file: no entry for budget '" + id + "'");
    const auto& provided = it->second;

    std::string missing;
    for (int l = 0; l < rep.block_size(a); ++l) {
      const std::string key = rep.patch(a, l).sign.str();
      const auto pit = provided.find(key);
      if (pit == provided.end()) {
        missing += missing.empty() ? key : ", " + key;
        out.values.push_back(0.0);
      } else {
        out.values.push_back(pit->second);
      }
    }
    if (!missing.empty())
      throw InvalidInput("pi file: budget '" + id + "' must give probabilities at refined-patch "
                         "granularity; required patches: " + missing);
    for (const auto& [key, val] : provided) {
      (void)val;
      if (rep.find_in_block(a, SignVector::parse(key)) < 0)
        throw InvalidInput("pi file: budget '" + id + "': '" + key +
                           "' matches no enumerated patch");
    }
    double sum = 0.0;
    const int base = static_cast<int>(out.values.size()) - rep.block_size(a);
    for (int l = 0; l < rep.block_size(a); ++l) {
      const double v = out.values[static_cast<std::size_t>(base + l)];
      if (v < -tolerance || v > 1.0 + tolerance)
        throw InvalidInput("pi file: budget '" + id + "' has a probability outside [0, 1]");
      sum += v;
    }
    if (std::abs(sum - 1.0) > tolerance)
      throw InvalidInput("pi file: budget '" + id + "' probabilities sum to " +
                         format_number(sum) + ", not 1");
  }
  return out;
}

std::vector<Observation> parse_observations(const std::string& text, int expected_k) {
  std::vector<Observation> rows;
  std::istringstream in(text);
  std::string line;
  std::size_t line_no = 0;
  bool header_seen = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::vector<std::string> fields;
    std::string field;
    std::istringstream ls(line);
    while (std::getline(ls, field, ',')) fields.push_back(field);
    if (!header_seen) {
      header_seen = true;
      if (static_cast<int>(fields.size()) != expected_k + 1)
        throw InvalidInput("observations line 1: header must have budget_id plus " +
                           std::to_string(expected_k) + " coordinate columns");
      continue;
    }
    if (static_cast<int>(fields.size()) != expected_k + 1)
      throw InvalidInput("observations line " + std::to_string(line_no) + ": expected " +
                         std::to_string(expected_k + 1) + " fields, got " +
                         std::to_string(fields.size()));
    Observation obs;
    obs.budget_id = fields[0];
    obs.line = line_no;
    for (int i = 0; i < expected_k; ++i) {
      char* end = nullptr;
      const std::string& f = fields[static_cast<std::size_t>(i + 1)];
      const double v = std::strtod(f.c_str(), &end);
      if (end == f.c_str() || (end != nullptr && *end != '\0' && !std::isspace(*end)))
        throw InvalidInput("observations line " + std::to_string(line_no) + ", field " +
                           std::to_string(i + 2) + ": '" + f + "' is not a number");
      obs.y.push_back(v);
    }
    rows.push_back(std::move(obs));
  }
  if (!header_seen) throw InvalidInput("observations file is empty");
  return rows;
}

std::vector<Observation> load_observations(const std::string& path, int expected_k) {
  return parse_observations(read_file(path), expected_k);
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InvalidInput("cannot open file '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InvalidInput("cannot write file '" + path + "'");
  out << content;
}

double sig12(double x) {
  if (!std::isfinite(x)) return x;
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.12g", x);
  return std::strtod(buf, nullptr);
}

std::string format_number(double x) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.12g", x);
  return buf;
}

}  // namespace rum::io

#include "radpair/serialize.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <set>
#include <sstream>

#include <json.hpp>

namespace radpair {

using nlohmann::json;

namespace {

json parse(const std::string& text) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError("malformed JSON at byte " + std::to_string(e.byte) + ": " + e.what());
  }
}

double number(const json& j, const std::string& key) {
  if (!j.is_number()) throw ConfigError("'" + key + "' must be a number");
  const double v = j.get<double>();
  if (!std::isfinite(v)) throw ConfigError("'" + key + "' must be finite");
  return v;
}

HyperfineTensor tensor_from_json(const json& j, const std::string& where) {
  if (j.is_object()) {
    for (const auto& [key, _] : j.items())
      if (key != "Ax" && key != "Ay" && key != "Az") throw ConfigError(where + ": unknown tensor key '" + key + "'");
    HyperfineTensor t;
    if (j.contains("Ax")) t.ax = number(j["Ax"], where + ".Ax");
    if (j.contains("Ay")) t.ay = number(j["Ay"], where + ".Ay");
    if (j.contains("Az")) t.az = number(j["Az"], where + ".Az");
    return t;
  }
  if (j.is_array() && j.size() == 3 && j[0].is_number())
    return {number(j[0], where), number(j[1], where), number(j[2], where)};
  if (j.is_array() && j.size() == 3 && j[0].is_array()) {
    double m[3][3];
    for (int r = 0; r < 3; ++r) {
      if (!j[r].is_array() || j[r].size() != 3) throw ConfigError(where + ": tensor matrix must be 3x3");
      for (int c = 0; c < 3; ++c) m[r][c] = number(j[r][c], where);
    }
    for (int r = 0; r < 3; ++r)
      for (int c = 0; c < 3; ++c)
        if (r != c && m[r][c] != 0.0) throw ConfigError(where + ": only diagonal hyperfine tensors are supported");
    return {m[0][0], m[1][1], m[2][2]};
  }
  throw ConfigError(where + ": tensor must be an object, a 3-vector or a diagonal 3x3 matrix");
}

json tensor_to_json(const HyperfineTensor& t) { return json{{"Ax", t.ax}, {"Ay", t.ay}, {"Az", t.az}}; }

void reject_unknown(const json& j, const std::set<std::string>& allowed, const std::string& what) {
  for (const auto& [key, _] : j.items())
    if (!allowed.count(key)) throw ConfigError(what + ": unknown key '" + key + "'");
}

std::string header(const std::vector<std::string>& comments) {
  std::string out;
  for (const auto& c : comments) out += "# " + c + "\n";
  return out;
}

}  // namespace

std::string format_number(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

std::string fnv1a_hex(const std::string& text) {
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char c : text) {
    h ^= c;
    h *= 1099511628211ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

HamiltonianSpec hamiltonian_spec_from_json(const std::string& text) {
  const json j = parse(text);
  if (!j.is_object()) throw ConfigError("Hamiltonian spec must be a JSON object");
  reject_unknown(j, {"B", "donor_tensors", "acceptor_tensors", "J", "gamma_n"}, "Hamiltonian spec");
  HamiltonianSpec s;
  if (j.contains("B")) s.B = number(j["B"], "B");
  if (j.contains("J")) s.J = number(j["J"], "J");
  if (j.contains("gamma_n")) s.gamma_n = number(j["gamma_n"], "gamma_n");
  for (const char* key : {"donor_tensors", "acceptor_tensors"}) {
    if (!j.contains(key)) continue;
    if (!j[key].is_array()) throw ConfigError(std::string(key) + " must be an array");
    auto& dst = std::string(key) == "donor_tensors" ? s.donor_tensors : s.acceptor_tensors;
    for (std::size_t i = 0; i < j[key].size(); ++i)
      dst.push_back(tensor_from_json(j[key][i], std::string(key) + "[" + std::to_string(i) + "]"));
  }
  s.system();
  s.validate();
  return s;
}

std::string to_json(const HamiltonianSpec& spec) {
  json j;
  j["B"] = spec.B;
  j["J"] = spec.J;
  j["gamma_n"] = spec.gamma_n;
  j["donor_tensors"] = json::array();
  j["acceptor_tensors"] = json::array();
  for (const auto& t : spec.donor_tensors) j["donor_tensors"].push_back(tensor_to_json(t));
  for (const auto& t : spec.acceptor_tensors) j["acceptor_tensors"].push_back(tensor_to_json(t));
  return j.dump(2);
}

ControlConfig control_config_from_json(const std::string& text) {
  const json j = parse(text);
  if (!j.is_object()) throw ConfigError("control config must be a JSON object");
  reject_unknown(j,
                 {"A", "B", "k", "J", "tau1", "pulse_period", "pulse_width", "closure_rate", "mode", "hyperfine",
                  "variance_model", "population_cutoff", "max_windows", "nodes_per_window", "skip_fraction",
                  "recombine_during_prep", "J0", "beta", "r", "delta_r", "vibration_points"},
                 "control config");
  ControlConfig c;
  auto num = [&](const char* key, double& dst) {
    if (j.contains(key)) dst = number(j[key], key);
  };
  auto opt = [&](const char* key, std::optional<double>& dst) {
    if (j.contains(key) && !j[key].is_null()) dst = number(j[key], key);
  };
  auto count = [&](const char* key, std::size_t& dst) {
    if (!j.contains(key)) return;
    if (!j[key].is_number_integer() || j[key].get<long long>() <= 0)
      throw ConfigError(std::string("'") + key + "' must be a positive integer");
    dst = j[key].get<std::size_t>();
  };
  auto str = [&](const char* key) -> std::string {
    if (!j[key].is_string()) throw ConfigError(std::string("'") + key + "' must be a string");
    return j[key].get<std::string>();
  };
  num("A", c.A);
  num("B", c.B);
  num("k", c.k);
  num("J", c.J);
  opt("tau1", c.tau1);
  opt("pulse_period", c.pulse_period);
  opt("pulse_width", c.pulse_width);
  opt("closure_rate", c.closure_rate);
  if (j.contains("mode")) c.mode = parse_control_mode(str("mode"));
  if (j.contains("hyperfine")) c.hyperfine = parse_hyperfine_form(str("hyperfine"));
  if (j.contains("variance_model")) c.variance = parse_variance_model(str("variance_model"));
  num("population_cutoff", c.population_cutoff);
  count("max_windows", c.max_windows);
  count("nodes_per_window", c.nodes_per_window);
  num("skip_fraction", c.skip_fraction);
  if (j.contains("recombine_during_prep")) {
    if (!j["recombine_during_prep"].is_boolean()) throw ConfigError("'recombine_during_prep' must be a boolean");
    c.recombine_during_prep = j["recombine_during_prep"].get<bool>();
  }
  num("J0", c.J0);
  num("beta", c.beta);
  num("r", c.r);
  num("delta_r", c.delta_r);
  count("vibration_points", c.vibration_points);
  c.validate();
  return c;
}

std::string to_json(const ControlConfig& c) {
  json j;
  j["A"] = c.A;
  j["B"] = c.B;
  j["k"] = c.k;
  j["J"] = c.J;
  j["tau1"] = c.tau1_value();
  j["pulse_period"] = c.period_value();
  j["pulse_width"] = c.width_value();
  j["closure_rate"] = c.closure_rate_value();
  j["mode"] = to_string(c.mode);
  j["hyperfine"] = to_string(c.hyperfine);
  j["variance_model"] = to_string(c.variance);
  j["population_cutoff"] = c.population_cutoff;
  j["max_windows"] = c.max_windows;
  j["nodes_per_window"] = c.nodes_per_window;
  j["skip_fraction"] = c.skip_fraction;
  j["recombine_during_prep"] = c.recombine_during_prep;
  j["J0"] = c.J0;
  j["beta"] = c.beta;
  j["r"] = c.r;
  j["delta_r"] = c.delta_r;
  j["vibration_points"] = c.vibration_points;
  return j.dump(2);
}

std::string grid_to_csv(const SensitivityGrid& grid, const std::vector<std::string>& comments) {
  grid.validate();
  std::string out = header(comments);
  out += "A,B,inv_deltaB\n";
  for (std::size_t i = 0; i < grid.A_values.size(); ++i)
    for (std::size_t j = 0; j < grid.B_values.size(); ++j)
      out += format_number(grid.A_values[i]) + "," + format_number(grid.B_values[j]) + "," +
             format_number(grid.inv_deltaB[i][j]) + "\n";
  return out;
}

std::string grid_to_json(const SensitivityGrid& grid, const std::vector<std::string>& comments) {
  grid.validate();
  json j;
  j["metadata"] = {{"variant", to_string(grid.variant)},
                   {"initial_state", to_string(grid.initial_state)},
                   {"mode", to_string(grid.mode)},
                   {"k", grid.k},
                   {"comments", comments}};
  j["A_values"] = grid.A_values;
  j["B_values"] = grid.B_values;
  j["inv_deltaB"] = grid.inv_deltaB;
  return j.dump(2) + "\n";
}

}  // namespace radpair

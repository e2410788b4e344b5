#include "cli.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iterator>
#include <limits>
#include <map>
#include <numbers>
#include <optional>
#include <ostream>

#include <CLI11.hpp>
#include <json.hpp>

#include "radpair/radpair.hpp"

namespace radpair::cli {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

struct RunConfig {
  std::string command;
  std::optional<std::string> preset, out, format, variant, state, mode, config_path;
  std::optional<double> A, a, Ay, B, k, J, gamma_n, tau, nu0;
  std::optional<double> t_min, t_max, A_min, A_max, B_min, B_max, J_min, J_max;
  std::optional<std::size_t> t_steps, A_steps, B_steps, J_steps, electrons;
  std::optional<bool> A_log, restore_units, with_baseline, fixed_B, vibrations;
};

template <class T, class V>
void fill(std::optional<T>& slot, V value) {
  if (!slot) slot = T(value);
}

struct PresetDef {
  Preset info;
  std::function<void(RunConfig&)> apply;
};

const std::vector<PresetDef>& preset_table() {
  static const std::vector<PresetDef> table = [] {
    std::vector<PresetDef> p;
    p.push_back({{"spheroidal", "qfi", "spheroidal one-nucleus generator spectrum and delta B_F"}, [](RunConfig& c) {
                   fill(c.variant, "spheroidal");
                 }});
    p.push_back({{"two-electron", "qfi", "bare two-electron Zeeman pair, F = 4t^2"}, [](RunConfig& c) {
                   fill(c.variant, "two-electron");
                 }});
    p.push_back({{"pt-bound", "qfi", "delta B_F for tau = 1 us and 1e12 pairs in picotesla"}, [](RunConfig& c) {
                   fill(c.variant, "spheroidal");
                   fill(c.restore_units, true);
                   fill(c.tau, 1e-6);
                   fill(c.nu0, 1e12);
                 }});
    auto fig2 = [](const char* name, const char* variant, const char* state, const char* mode, const char* what) {
      const bool inst = std::string(mode) == "instantaneous";
      return PresetDef{{name, "sweep", what}, [=](RunConfig& c) {
                         fill(c.variant, variant);
                         fill(c.state, state);
                         fill(c.mode, mode);
                         fill(c.A_log, true);
                         fill(c.A_min, inst ? 1.0 : 0.1);
                         fill(c.A_max, inst ? 100.0 : 1000.0);
                         fill(c.A_steps, inst ? 5 : 17);
                         fill(c.B_min, inst ? 0.25 : 0.05);
                         fill(c.B_max, inst ? 2.5 : 3.0);
                         fill(c.B_steps, inst ? 10 : 60);
                       }};
    };
    p.push_back(fig2("fig2a", "isotropic", "up", "integrated", "isotropic, singlet x nuclear up, integrated yield"));
    p.push_back(fig2("fig2b", "isotropic", "down", "integrated", "isotropic, singlet x nuclear down, integrated yield"));
    p.push_back(fig2("fig2c", "isotropic", "mixed", "integrated", "isotropic, mixed singlet, integrated yield"));
    p.push_back(fig2("fig2d", "max-anisotropic", "mixed", "integrated", "max-anisotropic, mixed singlet, integrated yield"));
    p.push_back(fig2("fig2e", "isotropic", "mixed", "instantaneous", "isotropic, mixed singlet, time-resolved yield"));
    p.push_back(fig2("fig2f", "max-anisotropic", "mixed", "instantaneous", "max-anisotropic, mixed singlet, time-resolved yield"));
    auto fig5 = [](const char* name, const char* what) {
      return PresetDef{{name, "control", what}, [](RunConfig& c) {
                         fill(c.B_steps, 30);
                         fill(c.with_baseline, true);
                       }};
    };
    p.push_back(fig5("fig5a", "pulsed control field sweep (Lambda_B) with the fixed-conformation baseline"));
    p.push_back(fig5("fig5b", "pulsed control field sweep (delta B / delta B_F) with the fixed-conformation baseline"));
    p.push_back({{"fig5c", "control-optimize", "minimum over B of delta B / delta B_F versus J"}, [](RunConfig& c) {
                   fill(c.J_min, 0.3);
                   fill(c.J_max, 1.0);
                   fill(c.J_steps, 15);
                   fill(c.B_steps, 10);
                 }});
    p.push_back({{"baseline", "control", "isotropic coupling with infinite exchange in the closed form"},
                 [](RunConfig& c) {
                   fill(c.mode, "baseline");
                   fill(c.variant, "isotropic");
                 }});
    return p;
  }();
  return table;
}

const PresetDef& find_preset(const std::string& name) {
  for (const auto& p : preset_table())
    if (p.info.name == name) return p;
  std::string known;
  for (const auto& p : preset_table()) known += (known.empty() ? "" : ", ") + p.info.name;
  throw ConfigError("unknown preset '" + name + "' (known: " + known + ")");
}

std::vector<double> linspace(double lo, double hi, std::size_t n, bool log, const std::string& what) {
  if (n == 0) throw ConfigError(what + " range is empty (steps must be >= 1)");
  if (!std::isfinite(lo) || !std::isfinite(hi)) throw ConfigError(what + " range must be finite");
  if (hi < lo) throw ConfigError(what + " range is empty (max < min)");
  if (n == 1) return {lo};
  if (log && !(lo > 0.0)) throw ConfigError(what + " log range needs a positive minimum");
  std::vector<double> v(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double f = static_cast<double>(i) / static_cast<double>(n - 1);
    v[i] = log ? std::exp(std::log(lo) + f * (std::log(hi) - std::log(lo))) : lo + f * (hi - lo);
  }
  v.back() = hi;
  return v;
}

// Natural field units (k given) to gauss when 1/k corresponds to tau seconds.
double to_gauss(double x, double k, double tau) {
  return units::angular_frequency_to_gauss(x / (k * tau));
}

class Meta {
 public:
  void add(const std::string& key, const std::string& value) { items_.emplace_back(key, value); }
  void add(const std::string& key, double value) { add(key, format_number(value)); }
  // Hash over every resolved input; results added afterwards are not hashed.
  void seal() {
    std::string canon;
    for (const auto& [k, v] : items_) canon += k + "=" + v + "\n";
    items_.insert(items_.begin(), {"spec_hash", fnv1a_hex(canon)});
  }
  const std::vector<std::pair<std::string, std::string>>& items() const { return items_; }
  std::vector<std::string> lines() const {
    std::vector<std::string> out;
    for (const auto& [k, v] : items_) out.push_back(k + "=" + v);
    return out;
  }

 private:
  std::vector<std::pair<std::string, std::string>> items_;
};

struct Document {
  std::string suffix;  // empty for the main document
  std::string content;
};

std::string render(const Table& t, const std::string& format) { return format == "json" ? to_json(t) : to_csv(t); }

void add_restore_meta(Meta& m, const RunConfig& c, double deltaB, double k, const std::string& name = "deltaB") {
  if (!c.restore_units.value_or(false)) return;
  const double tau = c.tau.value_or(1e-6);
  const double g = to_gauss(deltaB, k, tau);
  m.add("tau_seconds", tau);
  m.add(name + "_gauss", g);
  m.add(name + "_pT", units::gauss_to_picotesla(g));
}

std::vector<Document> cmd_qfi(const RunConfig& c) {
  const std::string variant = c.variant.value_or("spheroidal");
  const double A = c.A.value_or(1.0), B = c.B.value_or(1.0), k = c.k.value_or(1.0);
  const double nu0 = c.nu0.value_or(1.0);
  if (!(k > 0.0)) throw ConfigError("k must be positive");
  if (!(nu0 > 0.0)) throw ConfigError("nu0 must be positive");
  const auto times = linspace(c.t_min.value_or(0.0), c.t_max.value_or(5.0), c.t_steps.value_or(11), false, "t");
  if (times.front() < 0.0) throw ConfigError("t must be non-negative");

  Meta meta;
  meta.add("command", "qfi");
  meta.add("variant", variant);
  Operator H = Operator::zero(4), V = Operator::zero(4);
  if (variant == "two-electron" || variant == "single-electron" || variant == "zeeman-chain") {
    const std::size_t n = variant == "two-electron" ? 2 : variant == "single-electron" ? 1 : c.electrons.value_or(3);
    if (n == 0) throw ConfigError("electron count must be positive");
    H = zeeman_chain(n, B);
    V = zeeman_chain_derivative(n);
    meta.add("electrons", std::to_string(n));
  } else {
    HamiltonianSpec spec;
    if (variant == "spheroidal") {
      spec = spheroidal(A, c.a.value_or(0.3), B);
    } else if (variant == "isotropic") {
      spec = isotropic(A, B);
    } else if (variant == "ellipsoidal") {
      spec = ellipsoidal(A, c.Ay.value_or(0.0), c.a.value_or(0.0), B);
    } else if (variant == "max-anisotropic") {
      spec = max_anisotropic(A, B);
    } else {
      throw ConfigError("unknown qfi variant '" + variant +
                        "' (expected spheroidal, isotropic, ellipsoidal, max-anisotropic, two-electron, "
                        "single-electron or zeeman-chain)");
    }
    spec.J = c.J.value_or(0.0);
    spec.gamma_n = c.gamma_n.value_or(0.0);
    H = build(spec);
    V = field_derivative(spec);
    meta.add("hamiltonian", fnv1a_hex(radpair::to_json(spec)));
    meta.add("A", A);
    meta.add("a", spec.donor_tensors.front().az);
    meta.add("Ay", spec.donor_tensors.front().ay);
    meta.add("J", spec.J);
    meta.add("gamma_n", spec.gamma_n);
  }
  meta.add("B", B);
  meta.add("k", k);
  meta.add("nu0", nu0);
  meta.add("t_min", times.front());
  meta.add("t_max", times.back());
  meta.add("t_steps", std::to_string(times.size()));
  meta.seal();

  Table t;
  t.columns = {"t", "lambda_max", "lambda_min", "F_max"};
  for (double time : times) {
    const GeneratorResult g = generator(H, V, time);
    t.rows.push_back({time, g.lambda_max, g.lambda_min, g.F_max});
  }
  const BoundResult bound = deltaB_fundamental([&](double time) { return generator(H, V, time).F_max; }, k, nu0);
  meta.add("deltaB_F", bound.deltaB_F);
  meta.add("deltaB_F_tau", bound.deltaB_F * bound.tau);
  add_restore_meta(meta, c, bound.deltaB_F, k, "deltaB_F");
  t.metadata = meta.items();
  return {{"", render(t, c.format.value_or("csv"))}};
}

std::vector<Document> cmd_sweep(const RunConfig& c) {
  const Variant variant = parse_variant(c.variant.value_or("isotropic"));
  const InitialState state = parse_initial_state(c.state.value_or("mixed"));
  const SensitivityMode mode = parse_mode(c.mode.value_or("integrated"));
  const double k = c.k.value_or(1.0);
  const bool log_A = c.A_log.value_or(false);
  std::vector<double> As = c.A && !c.A_min && !c.A_max
                               ? std::vector<double>{*c.A}
                               : linspace(c.A_min.value_or(0.1), c.A_max.value_or(1000.0), c.A_steps.value_or(17), log_A, "A");
  std::vector<double> Bs = c.B && !c.B_min && !c.B_max
                               ? std::vector<double>{*c.B}
                               : linspace(c.B_min.value_or(0.05), c.B_max.value_or(3.0), c.B_steps.value_or(60), false, "B");

  Meta meta;
  meta.add("command", "sweep");
  meta.add("variant", to_string(variant));
  meta.add("state", to_string(state));
  meta.add("mode", to_string(mode));
  meta.add("k", k);
  meta.add("A_min", As.front());
  meta.add("A_max", As.back());
  meta.add("A_steps", std::to_string(As.size()));
  meta.add("A_log", log_A ? "true" : "false");
  meta.add("B_min", Bs.front());
  meta.add("B_max", Bs.back());
  meta.add("B_steps", std::to_string(Bs.size()));
  meta.seal();

  SensitivityGrid grid = sweep_grid(variant, state, As, Bs, k, mode);
  if (c.restore_units.value_or(false)) {
    const double tau = c.tau.value_or(1e-6);
    for (double& a : grid.A_values) a = to_gauss(a, k, tau);
    for (double& b : grid.B_values) b = to_gauss(b, k, tau);
    const double per = to_gauss(1.0, k, tau);
    for (auto& row : grid.inv_deltaB)
      for (double& v : row) v /= per;
    meta.add("units", "gauss");
    meta.add("tau_seconds", tau);
  }
  double best = 0.0;
  for (const auto& row : grid.inv_deltaB)
    for (double v : row) best = std::max(best, v);
  meta.add("max_inv_deltaB", best);
  const std::string format = c.format.value_or("csv");
  return {{"", format == "json" ? grid_to_json(grid, meta.lines()) : grid_to_csv(grid, meta.lines())}};
}

ControlConfig control_from(const RunConfig& c) {
  ControlConfig cfg;
  bool hyperfine_from_file = false;
  if (c.config_path) {
    std::ifstream in(*c.config_path);
    if (!in) throw ConfigError("cannot read config file '" + *c.config_path + "'");
    const std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    cfg = control_config_from_json(text);
    hyperfine_from_file = text.find("\"hyperfine\"") != std::string::npos;
  }
  if (c.A) {
    if (!c.J && !c.config_path) cfg.J = 0.65 * *c.A;
    cfg.A = *c.A;
  }
  if (c.k) cfg.k = *c.k;
  if (c.J) cfg.J = *c.J;
  if (c.B) cfg.B = *c.B;
  if (c.mode) cfg.mode = parse_control_mode(*c.mode);
  if (c.variant)
    cfg.hyperfine = parse_hyperfine_form(*c.variant);
  else if (!hyperfine_from_file)
    cfg.hyperfine =
        cfg.mode == ControlMode::infinite_J_baseline ? HyperfineForm::isotropic : HyperfineForm::max_anisotropic;
  cfg.validate();
  return cfg;
}

std::vector<double> control_field_grid(const RunConfig& c, const ControlConfig& cfg, std::size_t default_steps) {
  if (c.B && !c.B_min && !c.B_max && !c.B_steps) return {cfg.B};
  return linspace(c.B_min.value_or(kTwoPi * cfg.k), c.B_max.value_or(40.0 * cfg.k), c.B_steps.value_or(default_steps),
                  false, "B");
}

void describe(Meta& meta, const ControlConfig& cfg) { meta.add("config", fnv1a_hex(radpair::to_json(cfg))); }

Table sweep_table(const ControlConfig& cfg, const std::vector<double>& Bs, const RunConfig& c, const char* curve) {
  Meta meta;
  meta.add("command", "control");
  meta.add("curve", curve);
  meta.add("mode", to_string(cfg.mode));
  meta.add("hyperfine", to_string(cfg.hyperfine));
  meta.add("variance_model", to_string(cfg.variance));
  meta.add("A", cfg.A);
  meta.add("J", cfg.J);
  meta.add("k", cfg.k);
  meta.add("B_min", Bs.front());
  meta.add("B_max", Bs.back());
  meta.add("B_steps", std::to_string(Bs.size()));
  describe(meta, cfg);
  meta.seal();
  Table t;
  t.columns = {"B_over_k", "Lambda_B", "deltaB_over_deltaBF"};
  double best = std::numeric_limits<double>::infinity(), best_B = 0.0;
  for (const SweepPoint& p : field_sweep(cfg, Bs)) {
    t.rows.push_back({p.B_over_k, p.Lambda_B, p.deltaB_over_deltaBF});
    if (p.deltaB_over_deltaBF < best) {
      best = p.deltaB_over_deltaBF;
      best_B = p.B_over_k;
    }
  }
  meta.add("min_deltaB_over_deltaBF", best);
  meta.add("B_over_k_at_min", best_B);
  add_restore_meta(meta, c, cfg.k / std::sqrt(8.0), cfg.k, "deltaB_F");
  t.metadata = meta.items();
  return t;
}

std::vector<Document> cmd_control(const RunConfig& c) {
  const ControlConfig cfg = control_from(c);
  const auto Bs = control_field_grid(c, cfg, 30);
  const std::string format = c.format.value_or("csv");
  std::vector<Document> docs{{"", render(sweep_table(cfg, Bs, c, "control"), format)}};
  if (c.with_baseline.value_or(false)) {
    ControlConfig base = cfg;
    base.mode = ControlMode::infinite_J_baseline;
    base.hyperfine = HyperfineForm::isotropic;
    docs.push_back({"baseline", render(sweep_table(base, Bs, c, "baseline"), format)});
  }
  return docs;
}

std::vector<Document> cmd_control_optimize(const RunConfig& c) {
  const ControlConfig cfg = control_from(c);
  const auto fractions = linspace(c.J_min.value_or(0.3), c.J_max.value_or(1.0), c.J_steps.value_or(15), false, "J");
  std::vector<double> Js;
  for (double f : fractions) Js.push_back(f * cfg.A);
  const bool fixed = c.fixed_B.value_or(false);
  const std::vector<double> Bs = fixed ? std::vector<double>{} : control_field_grid(c, cfg, 10);

  Meta meta;
  meta.add("command", "control-optimize");
  meta.add("mode", to_string(cfg.mode));
  meta.add("hyperfine", to_string(cfg.hyperfine));
  meta.add("variance_model", to_string(cfg.variance));
  meta.add("A", cfg.A);
  meta.add("k", cfg.k);
  meta.add("J_over_A_min", fractions.front());
  meta.add("J_over_A_max", fractions.back());
  meta.add("J_steps", std::to_string(fractions.size()));
  if (fixed) {
    meta.add("B", cfg.B);
  } else {
    meta.add("B_min", Bs.front());
    meta.add("B_max", Bs.back());
    meta.add("B_steps", std::to_string(Bs.size()));
  }
  meta.add("vibrations", c.vibrations.value_or(false) ? "true" : "false");
  describe(meta, cfg);
  meta.seal();

  const JScan scan = optimize_J(cfg, Js, Bs);
  Table t;
  t.columns = {"J_over_A", "deltaB_min_over_deltaBF", "B_over_k_at_min"};
  for (const JScanPoint& p : scan.points) t.rows.push_back({p.J / cfg.A, p.deltaB_over_deltaBF, p.best_B / cfg.k});
  meta.add("J_opt_over_A", scan.J_opt / cfg.A);
  meta.add("deltaB_min_over_deltaBF", scan.deltaB_min);
  if (c.vibrations.value_or(false)) {
    ControlConfig v = cfg;
    v.J = scan.J_opt;
    meta.add("vibration_average_over_deltaBF", average_over_vibrations(v, Bs).deltaB_over_deltaBF);
  }
  t.metadata = meta.items();
  return {{"", render(t, c.format.value_or("csv"))}};
}

std::vector<Document> cmd_optimal(const RunConfig& c) {
  const double B = c.B.value_or(1.0), k = c.k.value_or(1.0);
  const std::string mode = c.mode.value_or("time-resolved");
  if (!(k > 0.0)) throw ConfigError("k must be positive");
  Meta meta;
  meta.add("command", "optimal");
  meta.add("mode", mode);
  meta.add("B", B);
  meta.add("k", k);
  meta.seal();
  double dB = 0.0;
  if (mode == "time-resolved")
    dB = deltaB_timeresolved_optimal(k, B).deltaB;
  else if (mode == "integrated")
    dB = deltaB_integrated_optimal(B, k);
  else
    throw ConfigError("unknown optimal mode '" + mode + "' (expected time-resolved or integrated)");
  const double bound = k / std::sqrt(8.0);
  Table t;
  t.columns = {"B_over_k", "deltaB", "deltaB_F", "deltaB_over_deltaBF"};
  t.rows.push_back({B / k, dB, bound, dB / bound});
  add_restore_meta(meta, c, dB, k);
  t.metadata = meta.items();
  return {{"", render(t, c.format.value_or("csv"))}};
}

std::vector<Document> cmd_lifetime(const RunConfig& c) {
  const double A = c.A.value_or(352.0), B = c.B.value_or(17.6), k = c.k.value_or(1.0), J = c.J.value_or(0.0);
  Meta meta;
  meta.add("command", "lifetime");
  meta.add("A", A);
  meta.add("B_target", B);
  meta.add("k", k);
  meta.add("J", J > 0.0 ? J : 0.65 * A);
  meta.seal();
  const LifetimeReport r = lifetime_tradeoff_report(A, B, k, J);
  Table t;
  t.columns = {"B_target",          "optimal_B_over_k",      "optimal_k",           "engineered_deltaB",
               "engineered_deltaB_finite_A", "engineered_over_bound", "controlled_over_bound", "baseline_over_bound"};
  t.rows.push_back({r.B_target, r.optimal_B_over_k, r.optimal_k, r.engineered_deltaB, r.engineered_deltaB_finite_A,
                    r.engineered_over_its_bound, r.controlled_over_bound, r.baseline_over_bound});
  t.metadata = meta.items();
  return {{"", render(t, c.format.value_or("csv"))}};
}

std::filesystem::path companion(const std::filesystem::path& main, const std::string& suffix) {
  std::filesystem::path p = main;
  p.replace_filename(main.stem().string() + "." + suffix + main.extension().string());
  return p;
}

void emit(const std::vector<Document>& docs, const RunConfig& c, std::ostream& out) {
  if (!c.out) {
    for (std::size_t i = 0; i < docs.size(); ++i) {
      if (i > 0) out << "\n";
      out << docs[i].content;
    }
    return;
  }
  const std::filesystem::path main = *c.out;
  for (const auto& d : docs) {
    const auto path = d.suffix.empty() ? main : companion(main, d.suffix);
    std::ofstream f(path, std::ios::binary);
    if (!f) throw ConfigError("cannot write output file '" + path.string() + "'");
    f << d.content;
    if (!f) throw ConfigError("failed writing output file '" + path.string() + "'");
  }
}

template <class T>
void opt(CLI::App* app, const std::string& name, std::optional<T>& slot, const std::string& help) {
  app->add_option_function<T>(name, [&slot](const T& v) { slot = v; }, help);
}

void flag(CLI::App* app, const std::string& name, std::optional<bool>& slot, const std::string& help) {
  app->add_flag_function(name, [&slot](std::int64_t n) { slot = n > 0; }, help);
}

void common_options(CLI::App* app, RunConfig& c) {
  opt(app, "--preset", c.preset, "named parameter set");
  opt(app, "--out", c.out, "output file (stdout when absent)");
  app->add_option_function<std::string>(
         "--format", [&c](const std::string& v) { c.format = v; }, "output format")
      ->check(CLI::IsMember({"csv", "json"}));
  flag(app, "--restore-units", c.restore_units, "also report fields in gauss and picotesla");
  opt(app, "--tau", c.tau, "lifetime 1/k in seconds used by --restore-units (default 1e-6)");
}

}  // namespace

std::string to_csv(const Table& table) {
  std::string s;
  for (const auto& [k, v] : table.metadata) s += "# " + k + "=" + v + "\n";
  for (std::size_t i = 0; i < table.columns.size(); ++i) s += (i ? "," : "") + table.columns[i];
  s += "\n";
  for (const auto& row : table.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) s += (i ? "," : "") + format_number(row[i]);
    s += "\n";
  }
  return s;
}

std::string to_json(const Table& table) {
  nlohmann::ordered_json j;
  j["metadata"] = nlohmann::ordered_json::object();
  for (const auto& [k, v] : table.metadata) j["metadata"][k] = v;
  j["columns"] = table.columns;
  j["rows"] = nlohmann::ordered_json::array();
  for (const auto& row : table.rows) {
    auto r = nlohmann::ordered_json::array();
    for (double x : row) {
      if (std::isfinite(x))
        r.push_back(x);
      else
        r.push_back(format_number(x));
    }
    j["rows"].push_back(r);
  }
  return j.dump(2) + "\n";
}

const std::vector<Preset>& presets() {
  static const std::vector<Preset> list = [] {
    std::vector<Preset> v;
    for (const auto& p : preset_table()) v.push_back(p.info);
    return v;
  }();
  return list;
}

int run(const std::vector<std::string>& raw_args, std::ostream& out, std::ostream& err) {
  std::vector<std::string> args = raw_args;
  // "radpair --preset NAME ..." needs no subcommand.
  if (!args.empty() && (args[0] == "--preset" || args[0].rfind("--preset=", 0) == 0)) {
    const std::string name = args[0] == "--preset" ? (args.size() > 1 ? args[1] : "") : args[0].substr(9);
    try {
      args.insert(args.begin(), find_preset(name).info.command);
    } catch (const ConfigError& e) {
      err << "error: " << e.what() << "\n";
      return exit_config_error;
    }
  }

  RunConfig c;
  CLI::App app{"Quantum limits and yield-based sensitivity of radical-pair magnetometers", "radpair"};
  app.require_subcommand(1);

  auto* qfi = app.add_subcommand("qfi", "generator spectrum, maximum QFI and the reaction-weighted bound");
  common_options(qfi, c);
  opt(qfi, "--variant", c.variant, "spheroidal|isotropic|ellipsoidal|max-anisotropic|two-electron|single-electron|zeeman-chain");
  opt(qfi, "--A", c.A, "hyperfine coupling (Ax for ellipsoidal)");
  opt(qfi, "--a", c.a, "axial coupling Az");
  opt(qfi, "--Ay", c.Ay, "ellipsoidal Ay");
  opt(qfi, "--B", c.B, "magnetic field");
  opt(qfi, "--J", c.J, "exchange coupling");
  opt(qfi, "--gamma-n", c.gamma_n, "nuclear gyromagnetic ratio relative to the electron");
  opt(qfi, "--electrons", c.electrons, "chain length for zeeman-chain");
  opt(qfi, "--k", c.k, "recombination rate");
  opt(qfi, "--nu0", c.nu0, "number of radical pairs");
  opt(qfi, "--t-min", c.t_min, "first time");
  opt(qfi, "--t-max", c.t_max, "last time");
  opt(qfi, "--t-steps", c.t_steps, "number of times");

  auto* sweep = app.add_subcommand("sweep", "1/deltaB over an (A, B) grid from the singlet yield");
  common_options(sweep, c);
  opt(sweep, "--variant", c.variant, "isotropic|max-anisotropic");
  opt(sweep, "--state", c.state, "up|down|mixed");
  opt(sweep, "--mode", c.mode, "integrated|instantaneous");
  opt(sweep, "--A", c.A, "single A value");
  opt(sweep, "--B", c.B, "single B value");
  opt(sweep, "--k", c.k, "recombination rate");
  opt(sweep, "--A-min", c.A_min, "");
  opt(sweep, "--A-max", c.A_max, "");
  opt(sweep, "--A-steps", c.A_steps, "");
  flag(sweep, "--A-log", c.A_log, "log-spaced A grid");
  opt(sweep, "--B-min", c.B_min, "");
  opt(sweep, "--B-max", c.B_max, "");
  opt(sweep, "--B-steps", c.B_steps, "");

  auto control_options = [&](CLI::App* app) {
    common_options(app, c);
    opt(app, "--config", c.config_path, "ControlConfig JSON file");
    opt(app, "--variant", c.variant, "max-anisotropic|isotropic trans Hamiltonian");
    opt(app, "--mode", c.mode, "finite|baseline");
    opt(app, "--A", c.A, "hyperfine coupling");
    opt(app, "--B", c.B, "magnetic field (single point unless a B range is given)");
    opt(app, "--k", c.k, "recombination rate");
    opt(app, "--J", c.J, "exchange coupling in the closed form");
    opt(app, "--B-min", c.B_min, "");
    opt(app, "--B-max", c.B_max, "");
    opt(app, "--B-steps", c.B_steps, "");
  };
  auto* control = app.add_subcommand("control", "pulsed reaction-control field sweep");
  control_options(control);
  flag(control, "--with-baseline", c.with_baseline, "also write the fixed-conformation baseline curve");

  auto* optimize = app.add_subcommand("control-optimize", "minimum delta B over B for a grid of J");
  control_options(optimize);
  opt(optimize, "--J-min", c.J_min, "smallest J in units of A");
  opt(optimize, "--J-max", c.J_max, "largest J in units of A");
  opt(optimize, "--J-steps", c.J_steps, "");
  flag(optimize, "--fixed-B", c.fixed_B, "evaluate at --B only instead of minimizing over B");
  flag(optimize, "--vibrations", c.vibrations, "average the optimum over molecular vibrations");

  auto* optimal = app.add_subcommand("optimal", "GHZ probe with the coherence measurement");
  common_options(optimal, c);
  opt(optimal, "--mode", c.mode, "time-resolved|integrated");
  opt(optimal, "--B", c.B, "magnetic field");
  opt(optimal, "--k", c.k, "recombination rate");

  auto* lifetime = app.add_subcommand("lifetime", "engineered lifetime versus pulsed control at a target field");
  common_options(lifetime, c);
  opt(lifetime, "--A", c.A, "hyperfine coupling");
  opt(lifetime, "--B", c.B, "target field");
  opt(lifetime, "--k", c.k, "recombination rate of the available molecule");
  opt(lifetime, "--J", c.J, "exchange coupling (default 0.65 A)");

  auto* list = app.add_subcommand("presets", "list named presets");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e, out, err);
    err << "error: " << e.what() << "\n";
    return exit_config_error;
  }

  try {
    if (list->parsed()) {
      for (const auto& p : presets()) out << p.name << "\t" << p.command << "\t" << p.summary << "\n";
      return exit_ok;
    }
    CLI::App* chosen = app.get_subcommands().front();
    c.command = chosen->get_name();
    if (c.preset) {
      const PresetDef& p = find_preset(*c.preset);
      if (p.info.command != c.command)
        throw ConfigError("preset '" + p.info.name + "' belongs to the '" + p.info.command + "' command");
      p.apply(c);
    }
    std::vector<Document> docs;
    if (c.command == "qfi") docs = cmd_qfi(c);
    else if (c.command == "sweep") docs = cmd_sweep(c);
    else if (c.command == "control") docs = cmd_control(c);
    else if (c.command == "control-optimize") docs = cmd_control_optimize(c);
    else if (c.command == "optimal") docs = cmd_optimal(c);
    else docs = cmd_lifetime(c);
    emit(docs, c, out);
    return exit_ok;
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << "\n";
    return exit_config_error;
  } catch (const NumericalError& e) {
    err << "numerical failure: " << e.what() << "\n";
    return exit_numerical_error;
  }
}

}  // namespace radpair::cli

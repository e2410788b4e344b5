#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "radpair/hamiltonian.hpp"

namespace radpair {

enum class ControlMode { finite_J, infinite_J_baseline };
enum class HyperfineForm { max_anisotropic, isotropic };
// closure_resolved: per-molecule Bernoulli variance given its closure and recombination times.
// per_closure: Bernoulli variance p(1 - p) of the conditional probability at each closure time.
enum class VarianceModel { closure_resolved, per_closure };

std::string to_string(ControlMode m);
std::string to_string(HyperfineForm h);
std::string to_string(VarianceModel v);
ControlMode parse_control_mode(const std::string& s);
HyperfineForm parse_hyperfine_form(const std::string& s);
VarianceModel parse_variance_model(const std::string& s);

struct ControlConfig {
  double A = 352.0;
  double B = 17.6;
  double k = 1.0;
  double J = 0.65 * 352.0;
  std::optional<double> tau1;          // default 1/(10k)
  std::optional<double> pulse_period;  // default 2pi/B (4pi/B for the isotropic envelope)
  std::optional<double> pulse_width;   // default half the period
  std::optional<double> closure_rate;  // default k
  ControlMode mode = ControlMode::finite_J;
  HyperfineForm hyperfine = HyperfineForm::max_anisotropic;
  VarianceModel variance = VarianceModel::closure_resolved;
  double population_cutoff = 1e-6;
  std::size_t max_windows = 10000;
  std::size_t nodes_per_window = 192;
  double skip_fraction = 0.05;
  // Count molecules that recombine in the closed form before the first opening.
  bool recombine_during_prep = false;

  // Exchange law J(r) = J0 exp(-beta r) for vibrational averaging.
  double J0 = 8e13;  // microtesla
  double beta = 14.0;
  double r = 1.8;
  double delta_r = 0.05;
  std::size_t vibration_points = 11;

  double tau1_value() const;
  double period_value() const;
  double width_value() const;
  double closure_rate_value() const;
  // Duration of the closed preparation phase (zero in the baseline).
  double prep_duration() const;
  void validate() const;
};

struct Window {
  double start = 0.0;
  double end = 0.0;
};

// Open windows in absolute time, aligned with positive swings of g_t.
std::vector<Window> pulse_schedule(const ControlConfig& config);

// Average of the analytic g_t envelope over [a, b] of open-phase time.
double envelope_average(const ControlConfig& config, double a, double b);

struct WindowDiagnostics {
  Window window;
  double closure_weight = 0.0;
  double singlet_probability = 0.0;  // closure-weighted conditional singlet probability
};

struct ControlResult {
  double Y_S = 0.0;
  double Lambda_B = 0.0;
  double variance = 0.0;
  double deltaB = 0.0;
  double deltaB_over_deltaBF = 0.0;
  double prep_weight = 0.0;
  double surviving = 0.0;
  double total_weight = 0.0;
  std::vector<WindowDiagnostics> windows;
  std::string variance_model;
};

ControlResult simulate_control(const ControlConfig& config);

struct SweepPoint {
  double B_over_k = 0.0;
  double Lambda_B = 0.0;
  double deltaB_over_deltaBF = 0.0;
};

// One simulation per field, each with its own default schedule.
std::vector<SweepPoint> field_sweep(const ControlConfig& config, const std::vector<double>& B_values);

// Default control field range: B/k in [2pi, 40].
std::vector<double> default_field_grid(double k, std::size_t n);

struct JScanPoint {
  double J = 0.0;
  double deltaB_over_deltaBF = 0.0;
  double best_B = 0.0;
};

struct JScan {
  std::vector<JScanPoint> points;
  double J_opt = 0.0;
  double deltaB_min = 0.0;  // in units of delta B_F
  double best_B = 0.0;
};

// Minimum of delta B / delta B_F over B for fixed J; B_grid empty means config.B only.
JScanPoint best_over_field(const ControlConfig& config, const std::vector<double>& B_grid);

// Ties go to the smaller J.
JScan optimize_J(const ControlConfig& config, const std::vector<double>& J_grid,
                 const std::vector<double>& B_grid = {});

struct VibrationAverage {
  double deltaB_over_deltaBF = 0.0;
  std::vector<double> r_nodes;
  std::vector<double> J_nodes;
  std::vector<double> values;
};

// Uniform average over r in [r - dr/2, r + dr/2] of the per-J optimum, with J(r) centred on config.J.
VibrationAverage average_over_vibrations(const ControlConfig& config, const std::vector<double>& B_grid = {});

struct LifetimeReport {
  double B_target = 0.0;
  double k = 0.0;
  double optimal_B_over_k = 0.0;
  double optimal_k = 0.0;
  double engineered_deltaB = 0.0;             // large-A limit at k = optimal_k
  double engineered_deltaB_finite_A = 0.0;    // same at the supplied A
  double engineered_over_its_bound = 0.0;
  double controlled_over_bound = 0.0;         // pulsed control at the supplied k
  double baseline_over_bound = 0.0;           // fixed-conformation scheme at the supplied k
};

LifetimeReport lifetime_tradeoff_report(double A, double B_target, double k = 1.0, double J = 0.0);

}  // namespace radpair

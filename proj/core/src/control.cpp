#include "radpair/control.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "radpair/numerics.hpp"
#include "radpair/yields.hpp"

namespace radpair {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

HamiltonianSpec trans_spec(HyperfineForm form, double A, double B) {
  return form == HyperfineForm::isotropic ? isotropic(A, B) : trans(A, B);
}

// Open-phase windows, in time since the switch first opened.
std::vector<Window> open_windows(const ControlConfig& c) {
  const double P = c.period_value();
  const double w = c.width_value();
  const double needed = std::log(1.0 / c.population_cutoff) / c.closure_rate_value();
  std::vector<Window> out;
  double first = 0.0;
  double acc = 0.0;
  const std::size_t max_periods = 4 * c.max_windows + 64;
  for (std::size_t n = 0; n < max_periods && acc < needed; ++n) {
    double best_avg = 0.0;
    Window best{};
    for (int half = 0; half < 2; ++half) {
      const double centre = (static_cast<double>(n) + 0.25 + 0.5 * half) * P;
      const double a = std::max(centre - 0.5 * w, static_cast<double>(n) * P);
      const double b = std::min(centre + 0.5 * w, static_cast<double>(n + 1) * P);
      const double avg = envelope_average(c, a, b);
      if (avg > best_avg) {
        best_avg = avg;
        best = {a, b};
      }
    }
    if (!(best_avg > 0.0)) continue;
    if (out.empty()) first = best_avg;
    else if (best_avg < c.skip_fraction * first) continue;
    if (out.size() >= c.max_windows)
      throw NumericalError("population never depleted within " + std::to_string(c.max_windows) + " windows");
    out.push_back(best);
    acc += best.end - best.start;
  }
  if (out.empty()) throw NumericalError("pulse schedule is empty: g_t has no positive swings");
  if (acc < needed)
    throw NumericalError("population never depleted within " + std::to_string(c.max_windows) + " windows");
  return out;
}

struct Evaluation {
  double Y = 0.0;
  double variance = 0.0;
  double prep_weight = 0.0;
  double surviving = 0.0;
  double total_weight = 0.0;
  std::vector<WindowDiagnostics> windows;
};

class ProtocolModel {
 public:
  ProtocolModel(const ControlConfig& c, std::vector<Window> open)
      : c_(c), open_(std::move(open)), rule_(gauss_legendre(c.nodes_per_window)) {}

  Evaluation evaluate(double B, bool full) const {
    const bool finite = c_.mode == ControlMode::finite_J;
    const double k = c_.k;
    const double rate = c_.closure_rate_value();
    const double tau1 = c_.prep_duration();
    const SpinSystem sys(1, 0);
    const Matrix Q = singlet_projector(sys).matrix();
    const HamiltonianSpec ht = trans_spec(c_.hyperfine, c_.A, B);
    HamiltonianSpec hc = ht;
    hc.J = c_.J;
    const EigenDecomposition et = eigendecompose(build(ht, sys));
    const Matrix& Ut = et.eigenvectors;
    const Eigen::Index d = sys.dim();

    EigenDecomposition ec;
    Matrix qc;        // Q_S in the closed-form eigenbasis
    Matrix q_eff_t;   // observable applied at closure, in the open-form eigenbasis
    Matrix G;         // second-moment kernel over open-basis coherences
    if (finite) {
      ec = eigendecompose(build(hc, sys));
      const Matrix& Uc = ec.eigenvectors;
      qc = Uc.adjoint() * Q * Uc;
      Matrix filtered(d, d);
      for (Eigen::Index b = 0; b < d; ++b)
        for (Eigen::Index a = 0; a < d; ++a)
          filtered(b, a) = qc(b, a) * k / cplx(k, ec.eigenvalues(a) - ec.eigenvalues(b));
      q_eff_t = Ut.adjoint() * (Uc * filtered * Uc.adjoint()) * Ut;
      if (full && c_.variance == VarianceModel::closure_resolved) G = second_moment_kernel(ec, qc, Uc.adjoint() * Ut);
    } else {
      q_eff_t = Ut.adjoint() * Q * Ut;
    }

    const StateEnsemble ens = mixed_singlet_ensemble(sys);
    const double survive_prep = (finite && c_.recombine_during_prep) ? std::exp(-k * tau1) : 1.0;

    Evaluation ev;
    ev.windows.resize(open_.size());
    for (std::size_t w = 0; w < open_.size(); ++w)
      ev.windows[w].window = {open_[w].start + tau1, open_[w].end + tau1};
    double sum_wp = 0.0, sum_wv = 0.0, sum_w = 0.0;

    for (const auto& member : ens.members()) {
      Matrix rho = member.rho.matrix();
      if (finite) {
        if (c_.recombine_during_prep && tau1 > 0.0) {
          const auto [wp, wq, wv] = prep_recombination(ec, qc, rho, tau1, full);
          sum_w += member.weight * wp;
          sum_wp += member.weight * wq;
          sum_wv += member.weight * wv;
          ev.prep_weight += member.weight * wp;
        }
        const Matrix& Uc = ec.eigenvectors;
        Vector ph(d);
        for (Eigen::Index i = 0; i < d; ++i) ph(i) = std::polar(1.0, -ec.eigenvalues(i) * tau1);
        const Matrix u = Uc * ph.asDiagonal() * Uc.adjoint();
        rho = u * rho * u.adjoint();
      }
      const Matrix rt = Ut.adjoint() * rho * Ut;
      const Matrix coef = rt.cwiseProduct(q_eff_t.transpose());

      double acc = 0.0;
      for (std::size_t w = 0; w < open_.size(); ++w) {
        const double a = open_[w].start, b = open_[w].end, half = 0.5 * (b - a);
        double win_w = 0.0, win_wp = 0.0;
        for (std::size_t j = 0; j < rule_.nodes.size(); ++j) {
          const double s = a + half * (rule_.nodes[j] + 1.0);
          const double weight =
              member.weight * survive_prep * half * rule_.weights[j] * rate * std::exp(-rate * (acc + s - a));
          Vector p(d);
          for (Eigen::Index i = 0; i < d; ++i) p(i) = std::polar(1.0, -et.eigenvalues(i) * s);
          const double prob = std::clamp((p.asDiagonal() * coef * p.conjugate().asDiagonal()).sum().real(), 0.0, 1.0);
          win_w += weight;
          win_wp += weight * prob;
          if (full) {
            double var = prob * (1.0 - prob);
            if (G.size() != 0) {
              const Matrix xs = p.asDiagonal() * rt * p.conjugate().asDiagonal();
              const Eigen::Map<const Vector> x(xs.data(), xs.size());
              var = prob - (x.transpose() * (G * x)).value().real();
            }
            sum_wv += weight * std::max(var, 0.0);
          }
        }
        acc += b - a;
        sum_w += win_w;
        sum_wp += win_wp;
        ev.windows[w].closure_weight += win_w;
        ev.windows[w].singlet_probability += win_wp;
      }
      ev.surviving += member.weight * survive_prep * std::exp(-rate * acc);
    }
    for (auto& wd : ev.windows)
      if (wd.closure_weight > 0.0) wd.singlet_probability /= wd.closure_weight;
    if (!(sum_w > 0.0)) throw NumericalError("closure ensemble has zero weight");
    ev.Y = sum_wp / sum_w;
    ev.variance = sum_wv / sum_w;
    ev.total_weight = sum_w;
    return ev;
  }

 private:
  // G = W K W^T with W_{(kl),(ab)} = M_ak conj(M_bl) Q_ba and K = k / (k + i(w_ab + w_cd)),
  // flattened column-major to match Eigen storage of the open-basis density matrix.
  Matrix second_moment_kernel(const EigenDecomposition& ec, const Matrix& qc, const Matrix& M) const {
    const Eigen::Index d = qc.rows(), n = d * d;
    const double k = c_.k;
    Matrix W(n, n);
    for (Eigen::Index l = 0; l < d; ++l)
      for (Eigen::Index kk = 0; kk < d; ++kk)
        for (Eigen::Index b = 0; b < d; ++b)
          for (Eigen::Index a = 0; a < d; ++a)
            W(kk + l * d, a + b * d) = M(a, kk) * std::conj(M(b, l)) * qc(b, a);
    Matrix K(n, n);
    for (Eigen::Index b = 0; b < d; ++b)
      for (Eigen::Index a = 0; a < d; ++a)
        for (Eigen::Index dd = 0; dd < d; ++dd)
          for (Eigen::Index cc = 0; cc < d; ++cc) {
            const double w = ec.eigenvalues(a) - ec.eigenvalues(b) + ec.eigenvalues(cc) - ec.eigenvalues(dd);
            K(a + b * d, cc + dd * d) = k / cplx(k, w);
          }
    return W * K * W.transpose();
  }

  struct PrepTerms {
    double weight, weighted_q, weighted_var;
  };

  PrepTerms prep_recombination(const EigenDecomposition& ec, const Matrix& qc, const Matrix& rho0, double tau1,
                               bool full) const {
    const double k = c_.k;
    const Matrix& Uc = ec.eigenvectors;
    const Matrix r = Uc.adjoint() * rho0 * Uc;
    const Matrix coef = r.cwiseProduct(qc.transpose());
    const Eigen::Index d = r.rows();
    PrepTerms out{0.0, 0.0, 0.0};
    const double half = 0.5 * tau1;
    for (std::size_t j = 0; j < rule_.nodes.size(); ++j) {
      const double t = half * (rule_.nodes[j] + 1.0);
      const double weight = half * rule_.weights[j] * k * std::exp(-k * t);
      Vector p(d);
      for (Eigen::Index i = 0; i < d; ++i) p(i) = std::polar(1.0, -ec.eigenvalues(i) * t);
      const double q = std::clamp((p.asDiagonal() * coef * p.conjugate().asDiagonal()).sum().real(), 0.0, 1.0);
      out.weight += weight;
      out.weighted_q += weight * q;
      if (full) out.weighted_var += weight * q * (1.0 - q);
    }
    return out;
  }

  const ControlConfig& c_;
  std::vector<Window> open_;
  QuadratureRule rule_;
};

}  // namespace

std::string to_string(ControlMode m) { return m == ControlMode::finite_J ? "finite_J" : "infinite_J_baseline"; }

std::string to_string(HyperfineForm h) { return h == HyperfineForm::isotropic ? "isotropic" : "max-anisotropic"; }

std::string to_string(VarianceModel v) {
  return v == VarianceModel::closure_resolved ? "closure_resolved" : "per_closure";
}

ControlMode parse_control_mode(const std::string& s) {
  if (s == "finite_J" || s == "finite") return ControlMode::finite_J;
  if (s == "infinite_J_baseline" || s == "baseline") return ControlMode::infinite_J_baseline;
  throw ConfigError("unknown control mode '" + s + "' (expected finite_J or infinite_J_baseline)");
}

HyperfineForm parse_hyperfine_form(const std::string& s) {
  if (s == "max-anisotropic" || s == "aniso" || s == "anisotropic") return HyperfineForm::max_anisotropic;
  if (s == "isotropic" || s == "iso") return HyperfineForm::isotropic;
  throw ConfigError("unknown hyperfine form '" + s + "' (expected max-anisotropic or isotropic)");
}

VarianceModel parse_variance_model(const std::string& s) {
  if (s == "closure_resolved") return VarianceModel::closure_resolved;
  if (s == "per_closure") return VarianceModel::per_closure;
  throw ConfigError("unknown variance model '" + s + "' (expected closure_resolved or per_closure)");
}

double ControlConfig::tau1_value() const { return tau1 ? *tau1 : 0.1 / k; }

double ControlConfig::period_value() const {
  if (pulse_period) return *pulse_period;
  return (hyperfine == HyperfineForm::isotropic ? 2.0 : 1.0) * kTwoPi / B;
}

double ControlConfig::width_value() const { return pulse_width ? *pulse_width : 0.5 * period_value(); }

double ControlConfig::closure_rate_value() const { return closure_rate ? *closure_rate : k; }

double ControlConfig::prep_duration() const { return mode == ControlMode::finite_J ? tau1_value() : 0.0; }

void ControlConfig::validate() const {
  auto finite = [](double x) { return std::isfinite(x); };
  if (!finite(A) || !finite(B) || !finite(k) || !finite(J)) throw ConfigError("control parameters must be finite");
  if (!(k > 0.0)) throw ConfigError("reaction rate k must be positive");
  if (!(B > 0.0)) throw ConfigError("pulse schedule needs B > 0 (no envelope period at B = 0)");
  if (tau1_value() < 0.0 || tau1_value() * k > 0.2 + 1e-12) throw ConfigError("tau1 must satisfy 0 <= tau1 k <= 0.2");
  if (!(period_value() > 0.0)) throw ConfigError("pulse period must be positive");
  if (!(width_value() > 0.0) || !(width_value() < period_value())) throw ConfigError("pulse width must lie in (0, period)");
  if (!(closure_rate_value() > 0.0)) throw ConfigError("closure rate must be positive");
  if (!(population_cutoff > 0.0 && population_cutoff < 1.0)) throw ConfigError("population cutoff must lie in (0, 1)");
  if (max_windows == 0) throw ConfigError("max_windows must be positive");
  if (nodes_per_window == 0) throw ConfigError("nodes_per_window must be positive");
  if (skip_fraction < 0.0 || skip_fraction >= 1.0) throw ConfigError("skip fraction must lie in [0, 1)");
  if (delta_r < 0.0 || !finite(r) || !finite(beta) || !finite(J0)) throw ConfigError("vibration parameters invalid");
  if (vibration_points == 0) throw ConfigError("vibration_points must be positive");
}

double envelope_average(const ControlConfig& c, double a, double b) {
  if (!(b > a)) return 0.0;
  static const QuadratureRule rule = gauss_legendre(64);
  const GtFormula f = c.hyperfine == HyperfineForm::isotropic ? GtFormula::iso_mixed : GtFormula::max_aniso;
  const double half = 0.5 * (b - a);
  double acc = 0.0;
  for (std::size_t j = 0; j < rule.nodes.size(); ++j)
    acc += rule.weights[j] * g_t_analytic(f, c.A, c.B, a + half * (rule.nodes[j] + 1.0));
  return 0.5 * acc;
}

std::vector<Window> pulse_schedule(const ControlConfig& config) {
  config.validate();
  std::vector<Window> w = open_windows(config);
  const double origin = config.prep_duration();
  for (auto& x : w) {
    x.start += origin;
    x.end += origin;
  }
  return w;
}

ControlResult simulate_control(const ControlConfig& config) {
  config.validate();
  const ProtocolModel model(config, open_windows(config));
  const Evaluation base = model.evaluate(config.B, true);
  ControlResult r;
  r.Y_S = base.Y;
  r.variance = base.variance;
  r.prep_weight = base.prep_weight;
  r.surviving = base.surviving;
  r.total_weight = base.total_weight;
  r.windows = base.windows;
  r.variance_model = to_string(config.mode == ControlMode::finite_J ? config.variance : VarianceModel::per_closure);
  // The schedule stays at its nominal-field timing while B is varied.
  r.Lambda_B = std::abs(dB_derivative([&](double b) { return model.evaluate(b, false).Y; }, config.B, config.k));
  r.deltaB = r.Lambda_B > 1e-14 ? std::sqrt(r.variance) / r.Lambda_B : std::numeric_limits<double>::infinity();
  r.deltaB_over_deltaBF = r.deltaB * std::sqrt(8.0) / config.k;
  return r;
}

std::vector<SweepPoint> field_sweep(const ControlConfig& config, const std::vector<double>& B_values) {
  if (B_values.empty()) throw ConfigError("field sweep needs at least one B value");
  std::vector<SweepPoint> out(B_values.size());
  parallel_for(B_values.size(), [&](std::size_t i) {
    ControlConfig c = config;
    c.B = B_values[i];
    const ControlResult r = simulate_control(c);
    out[i] = {c.B / c.k, r.Lambda_B, r.deltaB_over_deltaBF};
  });
  return out;
}

std::vector<double> default_field_grid(double k, std::size_t n) {
  if (n == 0) throw ConfigError("field grid needs at least one point");
  std::vector<double> g(n);
  const double lo = kTwoPi * k, hi = 40.0 * k;
  for (std::size_t i = 0; i < n; ++i)
    g[i] = n == 1 ? lo : lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n - 1);
  return g;
}

JScanPoint best_over_field(const ControlConfig& config, const std::vector<double>& B_grid) {
  if (B_grid.empty()) return {config.J, simulate_control(config).deltaB_over_deltaBF, config.B};
  auto ratio = [&](double b) {
    ControlConfig c = config;
    c.B = b;
    return simulate_control(c).deltaB_over_deltaBF;
  };
  std::vector<double> vals(B_grid.size());
  for (std::size_t i = 0; i < B_grid.size(); ++i) vals[i] = ratio(B_grid[i]);
  const auto best = static_cast<std::size_t>(std::min_element(vals.begin(), vals.end()) - vals.begin());
  JScanPoint p{config.J, vals[best], B_grid[best]};
  if (best > 0 && best + 1 < B_grid.size()) {
    const Minimum m = minimize(ratio, B_grid[best - 1], B_grid[best + 1]);
    if (m.value < p.deltaB_over_deltaBF) {
      p.deltaB_over_deltaBF = m.value;
      p.best_B = m.x;
    }
  }
  return p;
}

JScan optimize_J(const ControlConfig& config, const std::vector<double>& J_grid, const std::vector<double>& B_grid) {
  if (J_grid.empty()) throw ConfigError("J grid must be non-empty");
  JScan scan;
  scan.points.resize(J_grid.size());
  parallel_for(J_grid.size(), [&](std::size_t i) {
    ControlConfig c = config;
    c.J = J_grid[i];
    scan.points[i] = best_over_field(c, B_grid);
  });
  std::size_t best = 0;
  for (std::size_t i = 1; i < scan.points.size(); ++i) {
    const auto& p = scan.points[i];
    const auto& q = scan.points[best];
    if (p.deltaB_over_deltaBF < q.deltaB_over_deltaBF ||
        (p.deltaB_over_deltaBF == q.deltaB_over_deltaBF && p.J < q.J))
      best = i;
  }
  scan.J_opt = scan.points[best].J;
  scan.deltaB_min = scan.points[best].deltaB_over_deltaBF;
  scan.best_B = scan.points[best].best_B;
  return scan;
}

VibrationAverage average_over_vibrations(const ControlConfig& config, const std::vector<double>& B_grid) {
  config.validate();
  VibrationAverage out;
  if (config.delta_r == 0.0) {
    out.r_nodes = {config.r};
    out.J_nodes = {config.J};
    out.values = {best_over_field(config, B_grid).deltaB_over_deltaBF};
    out.deltaB_over_deltaBF = out.values.front();
    return out;
  }
  const QuadratureRule rule = gauss_legendre(config.vibration_points);
  const std::size_t n = rule.nodes.size();
  out.r_nodes.resize(n);
  out.J_nodes.resize(n);
  out.values.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    out.r_nodes[i] = config.r + 0.5 * config.delta_r * rule.nodes[i];
    out.J_nodes[i] = config.J * std::exp(-config.beta * (out.r_nodes[i] - config.r));
  }
  parallel_for(n, [&](std::size_t i) {
    ControlConfig c = config;
    c.J = out.J_nodes[i];
    out.values[i] = best_over_field(c, B_grid).deltaB_over_deltaBF;
  });
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) acc += 0.5 * rule.weights[i] * out.values[i];
  out.deltaB_over_deltaBF = acc;
  return out;
}

LifetimeReport lifetime_tradeoff_report(double A, double B_target, double k, double J) {
  if (!(B_target > 0.0) || !std::isfinite(B_target)) throw ConfigError("target field must be positive: no optimal lifetime exists at B = 0");
  if (!(k > 0.0)) throw ConfigError("reaction rate k must be positive");
  if (!(A > 0.0)) throw ConfigError("hyperfine coupling A must be positive");
  LifetimeReport r;
  r.B_target = B_target;
  r.k = k;
  const Minimum m = minimize([](double x) { return asymptotic_deltaB_aniso(x, 1.0); }, 0.1, 2.0);
  r.optimal_B_over_k = m.x;
  r.optimal_k = B_target / m.x;
  r.engineered_deltaB = asymptotic_deltaB_aniso(B_target, r.optimal_k);
  const HamiltonianSpec spec = max_anisotropic(A, B_target);
  r.engineered_deltaB_finite_A =
      deltaB_integrated(spec, mixed_singlet_ensemble(spec.system()), r.optimal_k).deltaB;
  r.engineered_over_its_bound = r.engineered_deltaB * std::sqrt(8.0) / r.optimal_k;

  ControlConfig c;
  c.A = A;
  c.B = B_target;
  c.k = k;
  c.J = J > 0.0 ? J : 0.65 * A;
  r.controlled_over_bound = simulate_control(c).deltaB_over_deltaBF;
  c.mode = ControlMode::infinite_J_baseline;
  c.hyperfine = HyperfineForm::isotropic;
  r.baseline_over_bound = simulate_control(c).deltaB_over_deltaBF;
  return r;
}

}  // namespace radpair

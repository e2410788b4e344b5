// Acceptance run: one PASS/FAIL line per criterion, non-zero exit if any fail.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iterator>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "cli.hpp"
#include "oracles.hpp"
#include "radpair/control.hpp"
#include "radpair/optimal.hpp"
#include "radpair/qfi.hpp"
#include "radpair/yields.hpp"

using namespace radpair;
namespace fs = std::filesystem;

namespace {

const double root8 = std::sqrt(8.0);

struct Outcome {
  bool pass = true;
  std::string detail;
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

double rel(double got, double want) { return std::abs(got - want) / std::max(std::abs(want), 1e-300); }

int failures = 0;

void criterion(int id, const std::string& name, double budget_s, const std::function<Outcome()>& body) {
  const auto t0 = std::chrono::steady_clock::now();
  Outcome o;
  try {
    o = body();
  } catch (const std::exception& e) {
    o = {false, std::string("exception: ") + e.what()};
  }
  const double s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  if (budget_s > 0 && s > budget_s) {
    o.pass = false;
    o.detail += fmt("; over time budget %.0f s", budget_s);
  }
  if (!o.pass) ++failures;
  std::printf("%s %2d %-30s %8.2f s  %s\n", o.pass ? "PASS" : "FAIL", id, name.c_str(), s, o.detail.c_str());
  std::fflush(stdout);
}

DensityMatrix pure_singlet(Spin nuclear) { return DensityMatrix::pure(singlet_state(SpinSystem(1, 0), {nuclear})); }

// Every delta B / delta B_F produced by the control runs below, for criterion 12.
std::vector<double> control_ratios;

double track(double ratio) {
  control_ratios.push_back(ratio);
  return ratio;
}

std::string cli_output(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  if (cli::run(args, out, err) != cli::exit_ok) throw std::runtime_error("cli failed: " + err.str());
  return out.str();
}

std::string slurp(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(f), {}};
}

}  // namespace

int main() {
  criterion(1, "fundamental-bound", 1, [] {
    double worst = 0.0, worst_bound = 0.0;
    for (int i = 0; i < 10; ++i) {
      const double A = oracle::uniform(0.1, 10), a = oracle::uniform(-10, 10), B = oracle::uniform(0.01, 10);
      const HamiltonianSpec s = spheroidal(A, a, B);
      for (double t : {0.3, 1.0, 4.0}) worst = std::max(worst, rel(max_qfi(s, t), 4 * t * t));
      const double k = oracle::uniform(0.5, 2);
      const BoundResult b = deltaB_fundamental([&](double t) { return max_qfi(s, t); }, k);
      worst_bound = std::max(worst_bound, rel(b.deltaB_F * b.tau, 1 / root8));
    }
    return Outcome{worst < 1e-6 && worst_bound < 1e-6,
                   fmt("max rel err F=4t^2 %.1e, deltaB_F tau=1/sqrt8 %.1e", worst, worst_bound)};
  });

  criterion(2, "pedagogical-scaling", 1, [] {
    double worst = 0.0;
    for (double t : {0.5, 1.0, 2.5}) {
      worst = std::max(worst, rel(generator(zeeman_chain(1, 0.7), zeeman_chain_derivative(1), t).F_max, t * t));
      for (std::size_t n = 1; n <= 4; ++n)
        worst = std::max(worst, rel(generator(zeeman_chain(n, 0.7), zeeman_chain_derivative(n), t).F_max,
                                    double(n * n) * t * t));
      HamiltonianSpec s = isotropic(1.3, 0.7);
      s.gamma_n = 1e-3;
      worst = std::max(worst, rel(max_qfi(s, t), std::pow(2 + 1e-3, 2) * t * t));
    }
    return Outcome{worst < 1e-8, fmt("max rel err %.1e", worst)};
  });

  criterion(3, "generator-oracles", 10, [] {
    double fd = 0.0, closed = 0.0;
    for (int i = 0; i < 100; ++i) {
      const double ax = oracle::uniform(-3, 3), ay = oracle::uniform(-3, 3), a = oracle::uniform(-3, 3);
      const double B = oracle::uniform(-3, 3), t = oracle::uniform(0, 5);
      const GeneratorResult g = generator(ellipsoidal(ax, ay, a, B), t);
      const auto ref = oracle::fd_generator([&](double b) { return oracle::hamiltonian(b, {{ax, ay, a}}, {}); }, B, t);
      fd = std::max(fd, (g.h_B.matrix() - ref).cwiseAbs().maxCoeff());
      const auto want = analytic_hB_eigs_ellipsoidal(ax, ay, B, t);
      for (std::size_t j = 0; j < want.size(); ++j)
        closed = std::max(closed, std::abs(g.eigenvalues(static_cast<Eigen::Index>(j)) - want[j]));
      const auto sph = analytic_hB_eigs_spheroidal(ax, B, t);
      const GeneratorResult gs = generator(spheroidal(ax, a, B), t);
      for (std::size_t j = 0; j < sph.size(); ++j)
        closed = std::max(closed, std::abs(gs.eigenvalues(static_cast<Eigen::Index>(j)) - sph[j]));
    }
    return Outcome{fd < 1e-7 && closed < 1e-8, fmt("max |h_B - FD| %.1e, max eig err vs closed form %.1e", fd, closed)};
  });

  criterion(4, "operator-norm-bound", 30, [] {
    double worst = 0.0;
    int multi = 0;
    for (int i = 0; i < 500; ++i) {
      HamiltonianSpec s;
      s.B = oracle::uniform(-5, 5);
      s.J = i % 2 ? oracle::uniform(-5, 5) : 0.0;
      s.donor_tensors = {{oracle::uniform(-5, 5), oracle::uniform(-5, 5), oracle::uniform(-5, 5)}};
      if (i % 3 == 0) {
        s.acceptor_tensors = {{oracle::uniform(-5, 5), oracle::uniform(-5, 5), oracle::uniform(-5, 5)}};
        ++multi;
      }
      const double t = oracle::uniform(0.01, 10);
      const GeneratorResult g = generator(s, t);
      worst = std::max(worst, std::max(std::abs(g.lambda_max), std::abs(g.lambda_min)) / t);
    }
    return Outcome{worst <= 1 + 1e-9, fmt("max |eig|/t %.12f over 500 specs (%d with two nuclei)", worst, multi)};
  });

  criterion(5, "yield-closed-forms", 10, [] {
    double worst = 0.0, sum = 0.0;
    const SpinSystem one(1, 0);
    const Operator QT = triplet_projector(one);
    const DensityMatrix up = pure_singlet(Spin::up), down = pure_singlet(Spin::down), mixed = mixed_singlet(one);
    for (int i = 0; i < 20; ++i)
      for (int j = 0; j < 20; ++j)
        for (double k : {0.3, 1.0, 3.0}) {
          const double A = 0.1 * std::pow(10.0, 3.0 * i / 19.0), B = 0.02 * std::pow(10.0, 2.5 * j / 19.0);
          const EvolutionCache cu(isotropic(A, B), up), cd(isotropic(A, B), down), ca(max_anisotropic(A, B), mixed);
          worst = std::max({worst, std::abs(laplace_average_singlet(cu, k) - closed_form_yield_iso(A, B, k, Spin::up)),
                            std::abs(laplace_average_singlet(cd, k) - closed_form_yield_iso(A, B, k, Spin::down)),
                            std::abs(laplace_average_singlet(ca, k) - closed_form_yield_aniso(A, B, k))});
          for (const EvolutionCache* c : {&cu, &cd, &ca})
            sum = std::max(sum, std::abs(laplace_average_singlet(*c, k) + laplace_average(*c, QT, k) - 1.0));
        }
    return Outcome{worst < 1e-8 && sum < 1e-9, fmt("max |closed - spectral| %.1e, max |Y_S + Y_T - 1| %.1e", worst, sum)};
  });

  criterion(6, "headline-yield-sensitivity", 30, [] {
    const FieldOptimum iso =
        minimize_over_field(Variant::isotropic, InitialState::mixed, SensitivityMode::integrated, 1000, 1, 0.5, 2.5);
    const FieldOptimum an =
        minimize_over_field(Variant::max_anisotropic, InitialState::mixed, SensitivityMode::integrated, 1000, 1, 0.2, 1.5);
    const bool ok = std::abs(iso.deltaB - 5.14) <= 0.05 && std::abs(iso.B - 1.15) <= 0.02 &&
                    std::abs(an.deltaB - 2.27) <= 0.03 && std::abs(an.B - 0.58) <= 0.02;
    return Outcome{ok, fmt("iso %.4f at B/k %.4f; aniso %.4f at B/k %.4f", iso.deltaB, iso.B, an.deltaB, an.B)};
  });

  criterion(7, "instantaneous-yield", 30, [] {
    const FieldOptimum iso =
        minimize_over_field(Variant::isotropic, InitialState::mixed, SensitivityMode::instantaneous, 100, 1, 0.5, 1.5);
    const FieldOptimum an = minimize_over_field(Variant::max_anisotropic, InitialState::mixed,
                                                SensitivityMode::instantaneous, 100, 1, 0.5, 1.5);
    const bool ok = rel(iso.deltaB, 2.5) <= 0.1 && rel(an.deltaB, 1.0) <= 0.1;
    return Outcome{ok, fmt("A=100k: iso %.4f at B/k %.3f; aniso %.4f at B/k %.3f", iso.deltaB, iso.B, an.deltaB, an.B)};
  });

  criterion(8, "g_t-formulas", 10, [] {
    const SpinSystem one(1, 0);
    const auto Q = oracle::singlet_projector(3);
    const DensityMatrix up = pure_singlet(Spin::up), down = pure_singlet(Spin::down), mixed = mixed_singlet(one);
    double worst = 0.0, lin = 0.0;
    for (int i = 0; i < 1000; ++i) {
      const double A = oracle::uniform(0.1, 5), B = oracle::uniform(0.05, 3), t = oracle::uniform(0, 8);
      // Fourth-order central difference of the propagated fidelity.
      auto fd = [&](double ax, double ay, double az, const DensityMatrix& rho) {
        const double h = 1e-3;
        auto q = [&](double b) { return oracle::expectation(oracle::hamiltonian(b, {{ax, ay, az}}, {}), rho.matrix(), Q, t); };
        return (-q(B + 2 * h) + 8 * q(B + h) - 8 * q(B - h) + q(B - 2 * h)) / (12 * h);
      };
      const double e1 = g_t_analytic(GtFormula::iso_up, A, B, t), e2 = g_t_analytic(GtFormula::iso_down, A, B, t);
      worst = std::max({worst, std::abs(e1 - fd(A, A, A, up)), std::abs(e2 - fd(A, A, A, down)),
                        std::abs(g_t_analytic(GtFormula::iso_mixed, A, B, t) - fd(A, A, A, mixed)),
                        std::abs(g_t_analytic(GtFormula::max_aniso, A, B, t) - fd(A, 0, 0, mixed))});
      lin = std::max(lin, std::abs(g_t_analytic(GtFormula::iso_mixed, A, B, t) - 0.5 * (e1 + e2)));
    }
    return Outcome{worst < 1e-6 && lin < 1e-10, fmt("max |E - FD| %.1e, max |E3 - (E1+E2)/2| %.1e", worst, lin)};
  });

  criterion(9, "optimal-measurement", 1, [] {
    double tr = 0.0, integ = 0.0;
    bool only_at_zero = true;
    const double k = 1.0;
    for (int i = 0; i < 10; ++i) {
      const double B = 0.3 * i;
      tr = std::max(tr, rel(deltaB_timeresolved_optimal(k, B).deltaB, k / root8));
      const double closed = std::sqrt(std::pow(4 * B * B + k * k, 4) / (16 * B * B + k * k)) / (root8 * k * k);
      integ = std::max(integ, rel(deltaB_integrated_optimal(B, k), closed));
      if (B > 0) {
        integ = std::max(integ, rel(deltaB_integrated_optimal_numeric(3.0, B, k), closed));
        only_at_zero = only_at_zero && closed > k / root8 * (1 + 1e-6);
      }
    }
    only_at_zero = only_at_zero && rel(deltaB_integrated_optimal(0.0, k), k / root8) < 1e-12;
    return Outcome{tr < 1e-9 && integ < 1e-8 && only_at_zero,
                   fmt("time-resolved rel err %.1e; integrated rel err %.1e; bound reached only at B=0: %s", tr, integ,
                       only_at_zero ? "yes" : "no")};
  });

  criterion(10, "overlap-diagnostic", 1, [] {
    const DensityMatrix rho = mixed_singlet(SpinSystem(1, 0));
    double iso = 0.0, an = 0.0;
    for (int i = 0; i < 50; ++i) {
      const double A = oracle::uniform(0.1, 10), B = oracle::uniform(0, 3), t = oracle::uniform(0, 10);
      iso = std::max(iso, std::abs(overlap_with_optimal(isotropic(A, B), rho, t)));
      const double s = std::sin(std::sqrt(A * A + 4 * B * B) * t / 4);
      an = std::max(an, std::abs(overlap_with_optimal(max_anisotropic(A, B), rho, t) -
                                 A * A / (4 * A * A + 16 * B * B) * s * s));
    }
    return Outcome{iso < 1e-10 && an < 1e-8, fmt("max |iso overlap| %.1e, max aniso err %.1e", iso, an)};
  });

  criterion(11, "reaction-control", 300, [] {
    ControlConfig c;  // A = 352, B = 17.6, k = 1
    std::vector<double> J_grid;
    for (int i = 0; i <= 14; ++i) J_grid.push_back((0.3 + 0.05 * i) * c.A);
    const JScan scan = optimize_J(c, J_grid);
    for (const auto& p : scan.points) track(p.deltaB_over_deltaBF);
    const double J_ratio = scan.J_opt / c.A;

    const std::vector<double> B_grid = default_field_grid(c.k, 12);
    ControlConfig base = c;
    base.mode = ControlMode::infinite_J_baseline;
    base.hyperfine = HyperfineForm::isotropic;
    const JScanPoint b = best_over_field(base, B_grid);
    track(b.deltaB_over_deltaBF);

    ControlConfig vib = c;
    vib.J = 0.65 * c.A;
    const VibrationAverage v = average_over_vibrations(vib, B_grid);
    for (double x : v.values) track(x);

    const bool ok = std::abs(J_ratio - 0.65) <= 0.05 + 1e-12 && std::abs(scan.deltaB_min - 2.0) <= 0.4 &&
                    std::abs(b.deltaB_over_deltaBF - 6.0) <= 1.2 && std::abs(v.deltaB_over_deltaBF - 2.2) <= 0.35;
    return Outcome{ok, fmt("J_opt/A %.3f with %.3f deltaB_F; baseline %.3f at B/k %.3f; vibration-averaged %.3f",
                           J_ratio, scan.deltaB_min, b.deltaB_over_deltaBF, b.best_B, v.deltaB_over_deltaBF)};
  });

  criterion(12, "protocol-invariants", 120, [] {
    double conservation = 0.0, doubling = 0.0;
    for (double B : {2 * std::numbers::pi, 17.6}) {
      for (ControlMode m : {ControlMode::finite_J, ControlMode::infinite_J_baseline}) {
        ControlConfig c;
        c.B = B;
        c.mode = m;
        const ControlResult r = simulate_control(c);
        track(r.deltaB_over_deltaBF);
        conservation = std::max(conservation, std::abs(r.total_weight + r.surviving - 1.0));
        c.nodes_per_window *= 2;
        doubling = std::max(doubling, std::abs(simulate_control(c).Y_S - r.Y_S));
      }
    }
    ControlConfig c;
    c.J = 0.65 * c.A;
    const double without = track(simulate_control(c).deltaB_over_deltaBF);
    c.recombine_during_prep = true;
    const ControlResult with = simulate_control(c);
    track(with.deltaB_over_deltaBF);
    const double shift = with.deltaB_over_deltaBF / without - 1.0;
    // Same runs with the prep recombinations discarded instead of counted in the yield.
    const double lost = 1.0 / std::sqrt(1.0 - with.prep_weight) - 1.0;
    const double lowest = *std::min_element(control_ratios.begin(), control_ratios.end());
    const bool ok = conservation < 1e-6 && doubling < 1e-7 && lowest >= 1.0 && shift >= 0.03 && shift <= 0.10;
    return Outcome{ok, fmt("conservation %.1e; node doubling %.1e; min deltaB/deltaB_F %.3f over %zu runs; "
                           "tau1 shift %+.2f%% (discarding prep recombinations instead: %+.2f%%)",
                           conservation, doubling, lowest, control_ratios.size(), 100 * shift, 100 * lost)};
  });

  criterion(13, "units-restoration", 1, [] {
    const std::string out = cli_output({"--preset", "pt-bound"});
    const auto pos = out.find("deltaB_F_pT=");
    if (pos == std::string::npos) return Outcome{false, "deltaB_F_pT missing from preset output"};
    const double pT = std::stod(out.substr(pos + 12));
    return Outcome{rel(pT, 2.0) <= 0.05, fmt("deltaB_F = %.4f pT", pT)};
  });

  criterion(14, "determinism", 0, [] {
    const fs::path dir = fs::temp_directory_path() / "radpair_acceptance";
    fs::remove_all(dir);
    fs::create_directories(dir / "a");
    fs::create_directories(dir / "b");
    std::size_t files = 0;
    std::string differing;
    for (const auto& p : cli::presets()) {
      for (const char* run : {"a", "b"}) cli_output({"--preset", p.name, "--out", (dir / run / (p.name + ".csv")).string()});
      for (const auto& e : fs::directory_iterator(dir / "a")) {
        if (e.path().filename().string().rfind(p.name + ".", 0) != 0) continue;
        ++files;
        if (slurp(e.path()) != slurp(dir / "b" / e.path().filename())) differing += " " + e.path().filename().string();
      }
    }
    fs::remove_all(dir);
    return Outcome{differing.empty() && files >= cli::presets().size(),
                   fmt("%zu presets, %zu files compared%s%s", cli::presets().size(), files,
                       differing.empty() ? "" : "; differing:", differing.c_str())};
  });

  std::printf("%s: %d criteria failed\n", failures ? "FAIL" : "PASS", failures);
  return failures ? 1 : 0;
}

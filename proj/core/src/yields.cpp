#include "radpair/yields.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <numbers>

namespace radpair {

namespace {

class Fnv1a {
 public:
  void add(const void* data, std::size_t n) {
    const auto* p = static_cast<const unsigned char*>(data);
    for (std::size_t i = 0; i < n; ++i) {
      h_ ^= p[i];
      h_ *= 1099511628211ull;
    }
  }
  void add(double x) { add(&x, sizeof x); }
  void add(std::uint64_t x) { add(&x, sizeof x); }
  std::uint64_t value() const { return h_; }

 private:
  std::uint64_t h_ = 14695981039346656037ull;
};

void require_rate(double k) {
  if (!(k > 0.0) || !std::isfinite(k)) throw ConfigError("reaction rate k must be positive and finite");
}

// Phases p_k = exp(-i E_k t).
Vector phases(const EigenDecomposition& eig, double t) {
  Vector p(eig.eigenvalues.size());
  for (Eigen::Index i = 0; i < p.size(); ++i) p(i) = std::polar(1.0, -eig.eigenvalues(i) * t);
  return p;
}

// c_kl = rho_kl O_lk: Tr{rho_t O} = sum_kl c_kl exp(-i w_kl t).
Matrix coefficients(const Matrix& rho, const Matrix& o) { return rho.cwiseProduct(o.transpose()); }

double laplace_sum(const EigenDecomposition& eig, const Matrix& c, double k) {
  const Eigen::Index d = c.rows();
  cplx acc = 0.0;
  for (Eigen::Index a = 0; a < d; ++a)
    for (Eigen::Index b = 0; b < d; ++b)
      acc += c(a, b) * k / cplx(k, eig.eigenvalues(a) - eig.eigenvalues(b));
  return acc.real();
}

double second_moment_sum(const EigenDecomposition& eig, const Matrix& c, double k) {
  const Eigen::Index d = c.rows();
  std::vector<cplx> cv;
  std::vector<double> wv;
  cv.reserve(static_cast<std::size_t>(d * d));
  wv.reserve(static_cast<std::size_t>(d * d));
  for (Eigen::Index a = 0; a < d; ++a)
    for (Eigen::Index b = 0; b < d; ++b) {
      if (c(a, b) == cplx(0.0)) continue;
      cv.push_back(c(a, b));
      wv.push_back(eig.eigenvalues(a) - eig.eigenvalues(b));
    }
  cplx acc = 0.0;
  for (std::size_t i = 0; i < cv.size(); ++i)
    for (std::size_t j = 0; j < cv.size(); ++j) acc += cv[i] * cv[j] * k / cplx(k, wv[i] + wv[j]);
  return acc.real();
}

struct EnsembleYield {
  double Y_S = 0.0;
  double Y_T = 0.0;
  double variance = 0.0;
};

EnsembleYield ensemble_yield(const HamiltonianSpec& spec, const StateEnsemble& ens, double k, bool with_variance) {
  const SpinSystem sys = spec.system();
  const EigenDecomposition eig = eigendecompose(build(spec, sys));
  const Matrix& U = eig.eigenvectors;
  const Matrix qs = U.adjoint() * singlet_projector(sys).matrix() * U;
  const Matrix qt = U.adjoint() * triplet_projector(sys).matrix() * U;
  EnsembleYield r;
  for (const auto& m : ens.members()) {
    const Matrix rho = U.adjoint() * m.rho.matrix() * U;
    const Matrix c = coefficients(rho, qs);
    const double y = laplace_sum(eig, c, k);
    r.Y_S += m.weight * y;
    if (with_variance) {
      r.Y_T += m.weight * laplace_sum(eig, coefficients(rho, qt), k);
      r.variance += m.weight * (y - second_moment_sum(eig, c, k));
    }
  }
  return r;
}

HamiltonianSpec with_field(HamiltonianSpec spec, double B) {
  spec.B = B;
  return spec;
}

}  // namespace

std::uint64_t spec_checksum(const HamiltonianSpec& spec) {
  Fnv1a h;
  h.add(spec.B);
  h.add(spec.J);
  h.add(spec.gamma_n);
  h.add(static_cast<std::uint64_t>(spec.donor_tensors.size()));
  for (const auto& t : spec.donor_tensors) {
    h.add(t.ax);
    h.add(t.ay);
    h.add(t.az);
  }
  h.add(static_cast<std::uint64_t>(spec.acceptor_tensors.size()));
  for (const auto& t : spec.acceptor_tensors) {
    h.add(t.ax);
    h.add(t.ay);
    h.add(t.az);
  }
  return h.value();
}

EvolutionCache::EvolutionCache(const HamiltonianSpec& spec, const DensityMatrix& rho0)
    : EvolutionCache(build(spec), rho0) {
  checksum_ = spec_checksum(spec);
}

EvolutionCache::EvolutionCache(const Operator& H, const DensityMatrix& rho0) : eig_(eigendecompose(H)) {
  if (rho0.dim() != H.dim()) throw ConfigError("initial state and Hamiltonian dimensions differ");
  const Matrix& U = eig_.eigenvectors;
  rho_ = U.adjoint() * rho0.matrix() * U;
  const int n_particles = static_cast<int>(std::log2(static_cast<double>(H.dim())));
  if (n_particles >= 2) {
    const SpinSystem sys(static_cast<std::size_t>(n_particles - 2), 0);
    qs_ = U.adjoint() * singlet_projector(sys).matrix() * U;
  }
  Fnv1a h;
  h.add(H.matrix().data(), sizeof(cplx) * static_cast<std::size_t>(H.matrix().size()));
  checksum_ = h.value();
}

Matrix EvolutionCache::to_eigenbasis(const Operator& op) const {
  if (op.dim() != rho_.rows()) throw ConfigError("observable dimension mismatch");
  return eig_.eigenvectors.adjoint() * op.matrix() * eig_.eigenvectors;
}

double EvolutionCache::expectation_eigenbasis(const Matrix& o, double t) const {
  const Vector p = phases(eig_, t);
  const Eigen::Index d = o.rows();
  cplx acc = 0.0;
  for (Eigen::Index a = 0; a < d; ++a)
    for (Eigen::Index b = 0; b < d; ++b) acc += p(a) * rho_(a, b) * std::conj(p(b)) * o(b, a);
  return acc.real();
}

double EvolutionCache::max_frequency() const {
  return eig_.eigenvalues(eig_.eigenvalues.size() - 1) - eig_.eigenvalues(0);
}

double singlet_fidelity(const EvolutionCache& cache, double t) {
  if (cache.singlet_eigenbasis().size() == 0) throw ConfigError("singlet fidelity requires a radical pair");
  return cache.expectation_eigenbasis(cache.singlet_eigenbasis(), t);
}

double expectation(const EvolutionCache& cache, const Operator& observable, double t) {
  return cache.expectation_eigenbasis(cache.to_eigenbasis(observable), t);
}

double laplace_average(const EvolutionCache& cache, const Operator& observable, double k) {
  require_rate(k);
  return laplace_sum(cache.eigen(), coefficients(cache.rho_eigenbasis(), cache.to_eigenbasis(observable)), k);
}

double laplace_average_singlet(const EvolutionCache& cache, double k) {
  require_rate(k);
  return laplace_sum(cache.eigen(), coefficients(cache.rho_eigenbasis(), cache.singlet_eigenbasis()), k);
}

double laplace_second_moment(const EvolutionCache& cache, const Operator& observable, double k) {
  require_rate(k);
  return second_moment_sum(cache.eigen(), coefficients(cache.rho_eigenbasis(), cache.to_eigenbasis(observable)), k);
}

double laplace_second_moment_singlet(const EvolutionCache& cache, double k) {
  require_rate(k);
  return second_moment_sum(cache.eigen(), coefficients(cache.rho_eigenbasis(), cache.singlet_eigenbasis()), k);
}

double closed_form_yield_iso(double A, double B, double k, Spin nuclear) {
  require_rate(k);
  const double s = nuclear == Spin::up ? 1.0 : -1.0;
  const double A2 = A * A, B2 = B * B, k2 = k * k;
  if (A2 + B2 == 0.0) return 1.0;
  return ((3 * A2 + 4 * B2) / (A2 + B2) + A2 * k2 / ((A2 + B2) * (A2 + B2 + k2)) +
          (8 * (A2 + s * 2 * A * B + 2 * B2) * k2 + 16 * k2 * k2) /
              (A2 * B2 + 4 * (A2 + s * A * B + B2) * k2 + 4 * k2 * k2)) /
         8.0;
}

double closed_form_yield_aniso(double A, double B, double k) {
  require_rate(k);
  const double A2 = A * A, B2 = B * B, k2 = k * k;
  if (A2 == 0.0) return 1.0;
  return 1.0 - A2 * B2 / (4 * (A2 + 4 * B2) * (B2 + k2)) -
         A2 * A2 * (A2 + 8 * B2 + 4 * k2) / (4 * (A2 + 4 * B2) * (A2 * A2 + 8 * (A2 + 8 * B2) * k2 + 16 * k2 * k2)) -
         A2 / (4 * (A2 + 4 * B2 + 4 * k2));
}

YieldResult deltaB_integrated(const HamiltonianSpec& spec, const StateEnsemble& ensemble, double k) {
  require_rate(k);
  const EnsembleYield base = ensemble_yield(spec, ensemble, k, true);
  YieldResult r;
  r.Y_S = base.Y_S;
  r.Y_T = base.Y_T;
  r.variance = std::max(base.variance, 0.0);
  r.dYS_dB = dB_derivative([&](double b) { return ensemble_yield(with_field(spec, b), ensemble, k, false).Y_S; },
                           spec.B, k);
  if (std::abs(r.dYS_dB) >= 1e-14) r.deltaB = std::sqrt(r.variance) / std::abs(r.dYS_dB);
  return r;
}

double deltaB_instantaneous(const HamiltonianSpec& spec, const StateEnsemble& ensemble, double k) {
  require_rate(k);
  const DensityMatrix rho = ensemble.mean();
  const EvolutionCache base(spec, rho);
  const Stencil st = derivative_stencil(spec.B, k);
  std::vector<EvolutionCache> shifted;
  shifted.reserve(st.offsets.size());
  for (double o : st.offsets) shifted.emplace_back(with_field(spec, spec.B + o), rho);

  auto integrand = [&](double t) {
    const double q = singlet_fidelity(base, t);
    const double v = q * (1.0 - q);
    if (v < 1e-12) return 0.0;
    double g = 0.0;
    for (std::size_t i = 0; i < shifted.size(); ++i) g += st.weights[i] * singlet_fidelity(shifted[i], t);
    return g * g / v * k * std::exp(-k * t);
  };
  const double w = std::max(base.max_frequency(), k);
  const double panel = std::min(1.0 / k, std::numbers::pi / w);
  const double info = integrate(integrand, 0.0, 50.0 / k, 1e-9, panel);
  if (!(info > 0.0)) return std::numeric_limits<double>::infinity();
  return 1.0 / std::sqrt(info);
}

std::string to_string(GtFormula f) {
  switch (f) {
    case GtFormula::iso_up: return "iso-up";
    case GtFormula::iso_down: return "iso-down";
    case GtFormula::iso_mixed: return "iso-mixed";
    case GtFormula::max_aniso: return "max-aniso";
  }
  return "";
}

double g_t_analytic(GtFormula formula, double A, double B, double t) {
  const double A2 = A * A;
  if (formula == GtFormula::max_aniso) {
    const double be = std::sqrt(A2 + 4 * B * B);
    if (be == 0.0) return 0.0;
    const double b4 = be * be * be * be;
    return -A2 / b4 * std::sin(B * t / 2) * (be * t * std::cos(be * t / 4) - 4 * std::sin(be * t / 4)) *
           (be * std::cos(B * t / 2) * std::cos(be * t / 4) + 2 * B * std::sin(B * t / 2) * std::sin(be * t / 4));
  }
  const double al = std::sqrt(A2 + B * B);
  if (al == 0.0) return 0.0;
  const double a4 = al * al * al * al;
  const double F = al * t * std::cos(al * t / 2) - 2 * std::sin(al * t / 2);
  switch (formula) {
    case GtFormula::iso_up:
      return -A2 / (4 * a4) * F * (al * std::sin((A + B) * t / 2) + B * std::sin(al * t / 2));
    case GtFormula::iso_down:
      return A2 / (4 * a4) * F * (al * std::sin((A - B) * t / 2) - B * std::sin(al * t / 2));
    case GtFormula::iso_mixed:
      return -A2 / (4 * a4) * F * (al * std::cos(A * t / 2) * std::sin(B * t / 2) + B * std::sin(al * t / 2));
    default:
      return 0.0;
  }
}

double g_t_numeric(const HamiltonianSpec& spec, const StateEnsemble& ensemble, double t) {
  const DensityMatrix rho = ensemble.mean();
  return dB_derivative([&](double b) { return singlet_fidelity(EvolutionCache(with_field(spec, b), rho), t); },
                       spec.B, 1.0);
}

double asymptotic_deltaB_iso(double B, double k) {
  const double B2 = B * B, k2 = k * k;
  return std::pow(B2 + 4 * k2, 1.5) / (16 * B * k2) *
         std::sqrt(1.5 * (7 * B2 * B2 + 39 * B2 * k2 + 28 * k2 * k2) / (B2 + k2));
}

double asymptotic_deltaB_aniso(double B, double k) {
  const double B2 = B * B, k2 = k * k;
  return std::pow(B2 + k2, 1.5) / (2 * B * k2) * std::sqrt((7 * B2 * B2 + 12 * B2 * k2 + 2 * k2 * k2) / (4 * B2 + k2));
}

std::string to_string(Variant v) { return v == Variant::isotropic ? "isotropic" : "max-anisotropic"; }

std::string to_string(SensitivityMode m) { return m == SensitivityMode::integrated ? "integrated" : "instantaneous"; }

Variant parse_variant(const std::string& name) {
  if (name == "isotropic" || name == "iso") return Variant::isotropic;
  if (name == "max-anisotropic" || name == "aniso" || name == "anisotropic") return Variant::max_anisotropic;
  throw ConfigError("unknown variant '" + name + "' (expected isotropic or max-anisotropic)");
}

SensitivityMode parse_mode(const std::string& name) {
  if (name == "integrated") return SensitivityMode::integrated;
  if (name == "instantaneous") return SensitivityMode::instantaneous;
  throw ConfigError("unknown mode '" + name + "' (expected integrated or instantaneous)");
}

HamiltonianSpec variant_spec(Variant v, double A, double B) {
  return v == Variant::isotropic ? isotropic(A, B) : max_anisotropic(A, B);
}

double deltaB_for(Variant v, InitialState s, SensitivityMode m, double A, double B, double k) {
  const HamiltonianSpec spec = variant_spec(v, A, B);
  const StateEnsemble ens = initial_ensemble(spec.system(), s);
  if (m == SensitivityMode::integrated) return deltaB_integrated(spec, ens, k).deltaB;
  return deltaB_instantaneous(spec, ens, k);
}

FieldOptimum minimize_over_field(Variant v, InitialState s, SensitivityMode m, double A, double k, double lo,
                                 double hi) {
  if (!(lo > 0.0) || !(hi > lo)) throw ConfigError("field bracket must satisfy 0 < lo < hi");
  const Minimum r = minimize_scan([&](double b) { return deltaB_for(v, s, m, A, b, k); }, lo, hi, 9);
  return {r.x, r.value};
}

void SensitivityGrid::validate() const {
  if (A_values.empty() || B_values.empty()) throw ConfigError("sensitivity grid ranges must be non-empty");
  if (inv_deltaB.size() != A_values.size()) throw ConfigError("sensitivity grid row count mismatch");
  for (const auto& row : inv_deltaB)
    if (row.size() != B_values.size()) throw ConfigError("sensitivity grid column count mismatch");
}

SensitivityGrid sweep_grid(Variant v, InitialState s, const std::vector<double>& A_values,
                           const std::vector<double>& B_values, double k, SensitivityMode mode) {
  require_rate(k);
  if (A_values.empty() || B_values.empty()) throw ConfigError("sweep ranges must be non-empty");
  SensitivityGrid g;
  g.A_values = A_values;
  g.B_values = B_values;
  g.variant = v;
  g.initial_state = s;
  g.mode = mode;
  g.k = k;
  g.inv_deltaB.assign(A_values.size(), std::vector<double>(B_values.size(), 0.0));
  const std::size_t nb = B_values.size();
  parallel_for(A_values.size() * nb, [&](std::size_t idx) {
    const std::size_t i = idx / nb, j = idx % nb;
    const double d = deltaB_for(v, s, mode, A_values[i], B_values[j], k);
    g.inv_deltaB[i][j] = std::isfinite(d) && d > 0.0 ? 1.0 / d : 0.0;
  });
  return g;
}

}  // namespace radpair

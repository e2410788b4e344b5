#include "radpair/optimal.hpp"

#include <cmath>
#include <limits>

#include "radpair/yields.hpp"

namespace radpair {

namespace {

void require_rate(double k) {
  if (!(k > 0.0) || !std::isfinite(k)) throw ConfigError("reaction rate k must be positive and finite");
}

}  // namespace

Operator coherence_operator(const SpinSystem& sys) {
  if (!sys.is_radical_pair() || sys.n_nuclei() != 1) throw ConfigError("X operator needs two electrons and one nucleus");
  Matrix x = Matrix::Zero(sys.dim(), sys.dim());
  x(0, sys.dim() - 1) = 1.0;
  x(sys.dim() - 1, 0) = 1.0;
  return Operator(std::move(x), true);
}

double x_expectation(double t, double B) { return std::cos(2.0 * B * t); }

double x_expectation_numeric(double A, double B, double t) {
  const HamiltonianSpec spec = isotropic(A, B);
  const SpinSystem sys = spec.system();
  const EvolutionCache cache(spec, DensityMatrix::pure(ghz_state(sys, 0.0)));
  return expectation(cache, coherence_operator(sys), t);
}

double timeresolved_inverse_variance(double B, double t) {
  const double s = std::sin(2.0 * B * t);
  if (std::abs(s) < 1e-12) return 4.0 * t * t;
  const double slope = -2.0 * t * s;
  return slope * slope / (s * s);
}

TimeResolvedResult deltaB_timeresolved_optimal(double k, double B) {
  require_rate(k);
  TimeResolvedResult r;
  r.integrand = [k, B](double t) { return timeresolved_inverse_variance(B, t) * k * std::exp(-k * t); };
  // Integrate in u = k t; the integral scales as 1/k^2.
  const double u_integral = integrate(
      [B, k](double u) { return timeresolved_inverse_variance(B / k, u) * std::exp(-u); }, 0.0, 50.0, 1e-12, 1.0);
  r.information = u_integral / (k * k);
  r.deltaB = 1.0 / std::sqrt(r.information);
  return r;
}

double x_yield(double B, double k) {
  require_rate(k);
  return k * k / (4 * B * B + k * k);
}

double x_yield_stddev(double B, double k) {
  require_rate(k);
  return std::sqrt(8 * B * B / (16 * B * B + k * k));
}

double deltaB_integrated_optimal(double B, double k) {
  require_rate(k);
  const double a = 4 * B * B + k * k;
  return std::sqrt(a * a * a * a / (16 * B * B + k * k)) / (std::sqrt(8.0) * k * k);
}

double deltaB_integrated_optimal_numeric(double A, double B, double k) {
  require_rate(k);
  const SpinSystem sys(1, 0);
  const Operator X = coherence_operator(sys);
  const Operator X2 = X * X;
  const DensityMatrix ghz = DensityMatrix::pure(ghz_state(sys, 0.0));
  const EvolutionCache cache(isotropic(A, B), ghz);
  const double variance = laplace_average(cache, X2, k) - laplace_second_moment(cache, X, k);
  const double slope = dB_derivative(
      [&](double b) { return laplace_average(EvolutionCache(isotropic(A, b), ghz), X, k); }, B, k);
  if (std::abs(slope) < 1e-14) return std::numeric_limits<double>::infinity();
  return std::sqrt(std::max(variance, 0.0)) / std::abs(slope);
}

double overlap_with_optimal(const HamiltonianSpec& spec, const DensityMatrix& rho0, double t) {
  const SpinSystem sys = spec.system();
  if (sys.n_nuclei() != 1) throw ConfigError("overlap diagnostic is defined for one nucleus");
  Vector psi = Vector::Zero(sys.dim());
  psi(0) = 1.0;
  psi(sys.dim() - 1) = std::polar(1.0, -2.0 * spec.B * t);
  psi /= std::sqrt(2.0);
  const EvolutionCache cache(spec, rho0);
  const Operator proj(psi * psi.adjoint(), true);
  return expectation(cache, proj, t);
}

double overlap_aniso_closed_form(double A, double B, double t) {
  const double q = A * A + 4 * B * B;
  if (q == 0.0) return 0.0;
  const double s = std::sin(std::sqrt(q) * t / 4);
  return A * A / (4 * q) * s * s;
}

}  // namespace radpair

#include "radpair/qfi.hpp"

#include <algorithm>
#include <cmath>

namespace radpair {

GeneratorResult generator(const Operator& H, const Operator& V, double t) {
  if (!(t >= 0.0) || !std::isfinite(t)) throw ConfigError("generator time must be finite and non-negative");
  if (H.dim() != V.dim()) throw ConfigError("H and dH/dB dimension mismatch");
  const EigenDecomposition eig = eigendecompose(H);
  const Matrix& U = eig.eigenvectors;
  const Matrix v = U.adjoint() * V.matrix() * U;
  const Eigen::Index d = H.dim();
  Matrix h(d, d);
  for (Eigen::Index k = 0; k < d; ++k) {
    for (Eigen::Index l = 0; l < d; ++l) {
      if (eig.degenerate(k, l)) {
        h(k, l) = v(k, l) * t;
      } else {
        const double w = eig.eigenvalues(k) - eig.eigenvalues(l);
        h(k, l) = v(k, l) * (1.0 - std::polar(1.0, -w * t)) / cplx(0.0, w);
      }
    }
  }
  Matrix hb = U * h * U.adjoint();
  Matrix sym = 0.5 * (hb + hb.adjoint());

  GeneratorResult r;
  r.h_B = Operator(std::move(sym), true);
  r.t = t;
  Eigen::SelfAdjointEigenSolver<Matrix> es(r.h_B.matrix());
  if (es.info() != Eigen::Success) throw NumericalError("generator eigensolver did not converge");
  r.eigenvalues = es.eigenvalues();
  r.eigenvectors = es.eigenvectors();
  r.lambda_min = r.eigenvalues(0);
  r.lambda_max = r.eigenvalues(d - 1);
  r.F_max = (r.lambda_max - r.lambda_min) * (r.lambda_max - r.lambda_min);
  return r;
}

GeneratorResult generator(const HamiltonianSpec& spec, const SpinSystem& sys, double t) {
  return generator(build(spec, sys), field_derivative(spec, sys), t);
}

GeneratorResult generator(const HamiltonianSpec& spec, double t) { return generator(spec, spec.system(), t); }

std::vector<double> analytic_hB_eigs_spheroidal(double A, double B, double t) {
  const double a2 = A * A + B * B;
  double r = 0.5 * t;
  if (a2 > 0.0) {
    const double rad = a2 * B * B * t * t + 2 * A * A - 2 * A * A * std::cos(std::sqrt(a2) * t);
    r = std::sqrt(std::max(rad, 0.0)) / (2 * a2);
  }
  std::vector<double> e{0.0, 0.0, t, -t, t / 2 + r, t / 2 - r, -t / 2 + r, -t / 2 - r};
  std::sort(e.begin(), e.end());
  return e;
}

std::vector<double> analytic_hB_eigs_ellipsoidal(double Ax, double Ay, double B, double t) {
  auto R = [&](double c) {
    const double q = c * c + 4 * B * B;
    if (q == 0.0) return 0.5 * t;
    const double s = std::sin(std::sqrt(q) * t / 4);
    return std::sqrt(B * B * q * t * t + 4 * c * c * s * s) / q;
  };
  const double rm = R(Ax - Ay);
  const double rp = R(Ax + Ay);
  std::vector<double> e{t / 2 + rm, t / 2 - rm, t / 2 + rp, t / 2 - rp,
                        -t / 2 + rp, -t / 2 - rp, -t / 2 + rm, -t / 2 - rm};
  std::sort(e.begin(), e.end());
  return e;
}

double max_qfi(const HamiltonianSpec& spec, const SpinSystem& sys, double t) {
  return generator(spec, sys, t).F_max;
}

double max_qfi(const HamiltonianSpec& spec, double t) { return generator(spec, t).F_max; }

OptimalState optimal_state(const GeneratorResult& gen, double phi) {
  const Eigen::Index d = gen.eigenvalues.size();
  if (d < 2) throw ConfigError("optimal state needs a generator of dimension >= 2");
  const double tol = 1e-9 * std::max(1.0, std::max(std::abs(gen.lambda_max), std::abs(gen.lambda_min)));
  OptimalState r;
  r.degenerate = std::abs(gen.eigenvalues(d - 1) - gen.eigenvalues(d - 2)) < tol ||
                 std::abs(gen.eigenvalues(1) - gen.eigenvalues(0)) < tol;
  Vector v = gen.eigenvectors.col(d - 1) + std::polar(1.0, phi) * gen.eigenvectors.col(0);
  r.state = StateVector(std::move(v));
  return r;
}

BoundResult deltaB_fundamental(const ScalarFn& F_of_t, double k, double nu0) {
  if (!(k > 0.0) || !std::isfinite(k)) throw ConfigError("reaction rate k must be positive");
  if (!(nu0 > 0.0)) throw ConfigError("repetition count nu0 must be positive");
  // Substitute u = k t so the tolerance is independent of the time unit.
  auto g = [&](double u) { return F_of_t(u / k) * std::exp(-u); };
  double scale = 0.0;
  const QuadratureRule gl = gauss_legendre(32);
  for (std::size_t i = 0; i < gl.nodes.size(); ++i) scale += std::abs(g(25.0 * (gl.nodes[i] + 1.0))) * 25.0 * gl.weights[i];
  const double tol = 1e-10 * std::max(scale, 1e-300);
  const double integral = integrate(g, 0.0, 50.0, tol, 1.0);
  if (!(integral > 0.0)) throw NumericalError("Fisher information integral is not positive");
  BoundResult r;
  r.nu0 = nu0;
  r.tau = 1.0 / k;
  r.deltaB_F = 1.0 / std::sqrt(nu0 * integral);
  return r;
}

}  // namespace radpair

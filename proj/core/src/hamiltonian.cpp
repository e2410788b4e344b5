#include "radpair/hamiltonian.hpp"

#include <algorithm>
#include <cmath>

namespace radpair {

namespace {

bool finite(const HyperfineTensor& t) {
  return std::isfinite(t.ax) && std::isfinite(t.ay) && std::isfinite(t.az);
}

void check_system(const HamiltonianSpec& spec, const SpinSystem& sys) {
  spec.validate();
  if (!sys.is_radical_pair()) throw ConfigError("radical-pair Hamiltonian requires two electrons");
  if (sys.n_nuclei_donor() != spec.donor_tensors.size() ||
      sys.n_nuclei_acceptor() != spec.acceptor_tensors.size())
    throw ConfigError("hyperfine tensor count does not match the spin system");
}

Matrix coupling(const SpinSystem& sys, std::size_t e, std::size_t n, const HyperfineTensor& t) {
  Matrix m = Matrix::Zero(sys.dim(), sys.dim());
  const double c[3] = {t.ax, t.ay, t.az};
  const Axis ax[3] = {Axis::x, Axis::y, Axis::z};
  for (int i = 0; i < 3; ++i) {
    if (c[i] == 0.0) continue;
    m += c[i] * (spin_operator(sys, e, ax[i]).matrix() * spin_operator(sys, n, ax[i]).matrix());
  }
  return m;
}

}  // namespace

void HamiltonianSpec::validate() const {
  if (!std::isfinite(B) || !std::isfinite(J) || !std::isfinite(gamma_n))
    throw ConfigError("Hamiltonian parameters must be finite");
  for (const auto& t : donor_tensors)
    if (!finite(t)) throw ConfigError("hyperfine tensor entries must be finite");
  for (const auto& t : acceptor_tensors)
    if (!finite(t)) throw ConfigError("hyperfine tensor entries must be finite");
}

Operator build(const HamiltonianSpec& spec, const SpinSystem& sys) {
  check_system(spec, sys);
  const Eigen::Index d = sys.dim();
  Matrix h = Matrix::Zero(d, d);
  h -= spec.B * (spin_operator(sys, 0, Axis::z).matrix() + spin_operator(sys, 1, Axis::z).matrix());
  for (std::size_t j = 0; j < spec.donor_tensors.size(); ++j)
    h += coupling(sys, 0, sys.donor_nucleus(j), spec.donor_tensors[j]);
  for (std::size_t k = 0; k < spec.acceptor_tensors.size(); ++k)
    h += coupling(sys, 1, sys.acceptor_nucleus(k), spec.acceptor_tensors[k]);
  if (spec.J != 0.0) h += coupling(sys, 1, 0, HyperfineTensor::isotropic(spec.J));
  if (spec.gamma_n != 0.0)
    for (std::size_t p = 2; p < sys.n_particles(); ++p)
      h -= spec.gamma_n * spec.B * spin_operator(sys, p, Axis::z).matrix();
  return Operator(std::move(h), true);
}

Operator build(const HamiltonianSpec& spec) { return build(spec, spec.system()); }

Operator field_derivative(const HamiltonianSpec& spec, const SpinSystem& sys) {
  check_system(spec, sys);
  Matrix v = -(spin_operator(sys, 0, Axis::z).matrix() + spin_operator(sys, 1, Axis::z).matrix());
  if (spec.gamma_n != 0.0)
    for (std::size_t p = 2; p < sys.n_particles(); ++p)
      v -= spec.gamma_n * spin_operator(sys, p, Axis::z).matrix();
  return Operator(std::move(v), true);
}

Operator field_derivative(const HamiltonianSpec& spec) { return field_derivative(spec, spec.system()); }

HamiltonianSpec spheroidal(double A, double a, double B) {
  HamiltonianSpec s;
  s.B = B;
  s.donor_tensors = {HyperfineTensor{A, A, a}};
  return s;
}

HamiltonianSpec isotropic(double A, double B) { return spheroidal(A, A, B); }

HamiltonianSpec ellipsoidal(double Ax, double Ay, double a, double B) {
  HamiltonianSpec s;
  s.B = B;
  s.donor_tensors = {HyperfineTensor{Ax, Ay, a}};
  return s;
}

HamiltonianSpec max_anisotropic(double A, double B) { return ellipsoidal(A, 0.0, 0.0, B); }

HamiltonianSpec trans(double A, double B) { return max_anisotropic(A, B); }

HamiltonianSpec cis(double A, double J, double B) {
  HamiltonianSpec s = max_anisotropic(A, B);
  s.J = J;
  return s;
}

Operator zeeman_chain(std::size_t n_electrons, double B) {
  return zeeman_chain_derivative(n_electrons) * B;
}

Operator zeeman_chain_derivative(std::size_t n_electrons) {
  const SpinSystem sys = SpinSystem::electrons(n_electrons);
  Matrix v = Matrix::Zero(sys.dim(), sys.dim());
  for (std::size_t i = 0; i < n_electrons; ++i) v -= spin_operator(sys, i, Axis::z).matrix();
  return Operator(std::move(v), true);
}

double EigenDecomposition::degeneracy_tolerance() const { return 1e-9 * std::max(1.0, norm); }

bool EigenDecomposition::degenerate(Eigen::Index k, Eigen::Index l) const {
  return std::abs(eigenvalues(k) - eigenvalues(l)) < degeneracy_tolerance();
}

EigenDecomposition eigendecompose(const Operator& H) {
  if (H.dim() == 0) throw ConfigError("cannot diagonalize an empty operator");
  if (H.hermiticity_defect() >= 1e-12) throw ConfigError("eigendecompose requires a Hermitian operator");
  Eigen::SelfAdjointEigenSolver<Matrix> es(H.matrix());
  if (es.info() != Eigen::Success) throw NumericalError("Hermitian eigensolver did not converge");
  EigenDecomposition d;
  d.eigenvalues = es.eigenvalues();
  d.eigenvectors = es.eigenvectors();
  d.norm = d.eigenvalues.cwiseAbs().maxCoeff();
  return d;
}

}  // namespace radpair

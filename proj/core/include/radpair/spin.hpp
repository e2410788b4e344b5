#pragma once

#include <complex>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace radpair {

using cplx = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;
using Matrix2 = Eigen::Matrix2cd;

// Thrown for malformed inputs: bad indices, inconsistent dimensions, invalid configs.
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Thrown when a computation cannot produce a meaningful number.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class Axis { x, y, z };

Matrix2 spin_half(Axis axis);
Matrix2 identity2();

// Particle order: [electron D, electron A, donor nuclei..., acceptor nuclei...].
// Basis index bit for particle 0 is the most significant; |up> is bit value 0.
class SpinSystem {
 public:
  SpinSystem(std::size_t n_nuclei_donor = 0, std::size_t n_nuclei_acceptor = 0);

  // Bare electron chain, used for the single-electron and N-electron Zeeman cases.
  static SpinSystem electrons(std::size_t n_electrons);

  std::size_t n_electrons() const { return n_electrons_; }
  std::size_t n_nuclei_donor() const { return n_donor_; }
  std::size_t n_nuclei_acceptor() const { return n_acceptor_; }
  std::size_t n_nuclei() const { return n_donor_ + n_acceptor_; }
  std::size_t n_particles() const { return n_electrons_ + n_nuclei(); }
  Eigen::Index dim() const { return Eigen::Index{1} << n_particles(); }

  bool is_radical_pair() const { return n_electrons_ == 2; }

  std::size_t donor_electron() const { return 0; }
  std::size_t acceptor_electron() const { return 1; }
  std::size_t donor_nucleus(std::size_t j) const;
  std::size_t acceptor_nucleus(std::size_t k) const;

  bool operator==(const SpinSystem&) const = default;

 private:
  std::size_t n_electrons_ = 2;
  std::size_t n_donor_ = 0;
  std::size_t n_acceptor_ = 0;
};

class Operator {
 public:
  Operator() = default;
  // With hermitian = true the matrix is checked (max|M - M^dagger| < 1e-12) and symmetrized.
  explicit Operator(Matrix m, bool hermitian = false);

  static Operator identity(const SpinSystem& sys);
  static Operator zero(const SpinSystem& sys);

  const Matrix& matrix() const { return m_; }
  bool hermitian() const { return hermitian_; }
  Eigen::Index dim() const { return m_.rows(); }

  Operator adjoint() const;
  Operator operator+(const Operator& o) const;
  Operator operator-(const Operator& o) const;
  Operator operator*(const Operator& o) const;
  Operator operator*(double s) const;
  Operator& operator+=(const Operator& o);

  double hermiticity_defect() const;

 private:
  Matrix m_;
  bool hermitian_ = false;
};

Operator operator*(double s, const Operator& o);
Operator commutator(const Operator& a, const Operator& b);

class StateVector {
 public:
  StateVector() = default;
  // Rejects zero vectors; normalizes anything else.
  explicit StateVector(Vector amplitudes);

  const Vector& amplitudes() const { return v_; }
  Eigen::Index dim() const { return v_.size(); }
  cplx inner(const StateVector& other) const { return v_.dot(other.v_); }
  double expectation(const Operator& op) const;

 private:
  Vector v_;
};

class DensityMatrix {
 public:
  DensityMatrix() = default;
  // Validates trace (1e-12), hermiticity and positivity (min eigenvalue >= -1e-10).
  explicit DensityMatrix(Matrix rho);
  static DensityMatrix pure(const StateVector& psi);

  const Matrix& matrix() const { return rho_; }
  Eigen::Index dim() const { return rho_.rows(); }
  double expectation(const Operator& op) const;

 private:
  Matrix rho_;
};

// Statistical mixture of molecules prepared in distinct states.  Yield
// variances are accumulated per member; expectation values use the mean.
struct EnsembleMember {
  double weight = 1.0;
  DensityMatrix rho;
};

class StateEnsemble {
 public:
  StateEnsemble() = default;
  explicit StateEnsemble(std::vector<EnsembleMember> members);
  static StateEnsemble single(DensityMatrix rho);
  static StateEnsemble single(const StateVector& psi);

  const std::vector<EnsembleMember>& members() const { return members_; }
  DensityMatrix mean() const;
  Eigen::Index dim() const;

 private:
  std::vector<EnsembleMember> members_;
};

enum class Spin { up, down };
using NuclearConfig = std::vector<Spin>;

enum class InitialState { up, down, mixed };
std::string to_string(InitialState s);
InitialState parse_initial_state(const std::string& name);

Operator embed(const Matrix2& local, std::size_t particle, const SpinSystem& sys);
Operator spin_operator(const SpinSystem& sys, std::size_t particle, Axis axis);

Operator singlet_projector(const SpinSystem& sys);
Operator triplet_projector(const SpinSystem& sys);

// One entry per particle in system order.
StateVector basis_state(const SpinSystem& sys, const std::vector<Spin>& spins);
StateVector singlet_state(const SpinSystem& sys, const NuclearConfig& nuclei);
DensityMatrix mixed_singlet(const SpinSystem& sys);
// Equal-weight ensemble of |S> x |config> over all nuclear configurations.
StateEnsemble mixed_singlet_ensemble(const SpinSystem& sys);
// up/down put every nucleus in that state; mixed gives mixed_singlet_ensemble.
StateEnsemble initial_ensemble(const SpinSystem& sys, InitialState which);

StateVector ghz_state(const SpinSystem& sys, double phi = 0.0);

}  // namespace radpair

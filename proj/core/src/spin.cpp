#include "radpair/spin.hpp"

#include <cmath>

namespace radpair {

namespace {

constexpr double kHermitianTol = 1e-12;
constexpr double kTraceTol = 1e-12;
constexpr double kPositivityTol = 1e-10;

void require_same_dim(Eigen::Index a, Eigen::Index b, const char* what) {
  if (a != b) throw ConfigError(std::string(what) + ": dimension mismatch");
}

}  // namespace

Matrix2 spin_half(Axis axis) {
  Matrix2 m;
  switch (axis) {
    case Axis::x: m << 0, 0.5, 0.5, 0; break;
    case Axis::y: m << 0, cplx(0, -0.5), cplx(0, 0.5), 0; break;
    case Axis::z: m << 0.5, 0, 0, -0.5; break;
  }
  return m;
}

Matrix2 identity2() { return Matrix2::Identity(); }

SpinSystem::SpinSystem(std::size_t n_nuclei_donor, std::size_t n_nuclei_acceptor)
    : n_donor_(n_nuclei_donor), n_acceptor_(n_nuclei_acceptor) {
  if (n_particles() > 14) throw ConfigError("spin system too large for dense matrices");
}

SpinSystem SpinSystem::electrons(std::size_t n_electrons) {
  if (n_electrons == 0 || n_electrons > 14) throw ConfigError("electron count must be in [1, 14]");
  SpinSystem s;
  s.n_electrons_ = n_electrons;
  return s;
}

std::size_t SpinSystem::donor_nucleus(std::size_t j) const {
  if (j >= n_donor_) throw ConfigError("donor nucleus index out of range");
  return n_electrons_ + j;
}

std::size_t SpinSystem::acceptor_nucleus(std::size_t k) const {
  if (k >= n_acceptor_) throw ConfigError("acceptor nucleus index out of range");
  return n_electrons_ + n_donor_ + k;
}

Operator::Operator(Matrix m, bool hermitian) : m_(std::move(m)), hermitian_(hermitian) {
  if (m_.rows() != m_.cols()) throw ConfigError("operator matrix must be square");
  if (hermitian_) {
    if (hermiticity_defect() >= kHermitianTol) throw ConfigError("operator is not Hermitian");
    Matrix sym = 0.5 * (m_ + m_.adjoint());
    m_ = std::move(sym);
  }
}

Operator Operator::identity(const SpinSystem& sys) {
  return Operator(Matrix::Identity(sys.dim(), sys.dim()), true);
}

Operator Operator::zero(const SpinSystem& sys) {
  return Operator(Matrix::Zero(sys.dim(), sys.dim()), true);
}

double Operator::hermiticity_defect() const {
  if (m_.size() == 0) return 0.0;
  return (m_ - m_.adjoint()).cwiseAbs().maxCoeff();
}

Operator Operator::adjoint() const {
  Operator r;
  r.m_ = m_.adjoint();
  r.hermitian_ = hermitian_;
  return r;
}

Operator Operator::operator+(const Operator& o) const {
  require_same_dim(dim(), o.dim(), "operator sum");
  Operator r;
  r.m_ = m_ + o.m_;
  r.hermitian_ = hermitian_ && o.hermitian_;
  return r;
}

Operator Operator::operator-(const Operator& o) const {
  require_same_dim(dim(), o.dim(), "operator difference");
  Operator r;
  r.m_ = m_ - o.m_;
  r.hermitian_ = hermitian_ && o.hermitian_;
  return r;
}

Operator Operator::operator*(const Operator& o) const {
  require_same_dim(dim(), o.dim(), "operator product");
  Operator r;
  r.m_ = m_ * o.m_;
  r.hermitian_ = false;
  return r;
}

Operator Operator::operator*(double s) const {
  Operator r;
  r.m_ = m_ * s;
  r.hermitian_ = hermitian_;
  return r;
}

Operator& Operator::operator+=(const Operator& o) {
  if (m_.size() == 0) return *this = o;
  require_same_dim(dim(), o.dim(), "operator sum");
  m_ += o.m_;
  hermitian_ = hermitian_ && o.hermitian_;
  return *this;
}

Operator operator*(double s, const Operator& o) { return o * s; }

Operator commutator(const Operator& a, const Operator& b) { return a * b - b * a; }

StateVector::StateVector(Vector amplitudes) : v_(std::move(amplitudes)) {
  const double n = v_.norm();
  if (!(n > 0.0) || !std::isfinite(n)) throw ConfigError("state vector must have finite nonzero norm");
  v_ /= n;
}

double StateVector::expectation(const Operator& op) const {
  require_same_dim(dim(), op.dim(), "expectation");
  return v_.dot(op.matrix() * v_).real();
}

DensityMatrix::DensityMatrix(Matrix rho) : rho_(std::move(rho)) {
  if (rho_.rows() != rho_.cols() || rho_.rows() == 0) throw ConfigError("density matrix must be square");
  if ((rho_ - rho_.adjoint()).cwiseAbs().maxCoeff() >= kHermitianTol)
    throw ConfigError("density matrix is not Hermitian");
  Matrix sym = 0.5 * (rho_ + rho_.adjoint());
  rho_ = std::move(sym);
  if (std::abs(rho_.trace().real() - 1.0) > kTraceTol) throw ConfigError("density matrix trace differs from 1");
  Eigen::SelfAdjointEigenSolver<Matrix> es(rho_, Eigen::EigenvaluesOnly);
  if (es.eigenvalues().minCoeff() < -kPositivityTol) throw ConfigError("density matrix is not positive semidefinite");
}

DensityMatrix DensityMatrix::pure(const StateVector& psi) {
  return DensityMatrix(psi.amplitudes() * psi.amplitudes().adjoint());
}

double DensityMatrix::expectation(const Operator& op) const {
  require_same_dim(dim(), op.dim(), "expectation");
  return (rho_ * op.matrix()).trace().real();
}

StateEnsemble::StateEnsemble(std::vector<EnsembleMember> members) : members_(std::move(members)) {
  if (members_.empty()) throw ConfigError("ensemble must have at least one member");
  double total = 0.0;
  for (const auto& m : members_) {
    if (!(m.weight > 0.0)) throw ConfigError("ensemble weights must be positive");
    require_same_dim(m.rho.dim(), members_.front().rho.dim(), "ensemble");
    total += m.weight;
  }
  for (auto& m : members_) m.weight /= total;
}

StateEnsemble StateEnsemble::single(DensityMatrix rho) {
  return StateEnsemble({EnsembleMember{1.0, std::move(rho)}});
}

StateEnsemble StateEnsemble::single(const StateVector& psi) { return single(DensityMatrix::pure(psi)); }

DensityMatrix StateEnsemble::mean() const {
  Matrix acc = Matrix::Zero(dim(), dim());
  for (const auto& m : members_) acc += m.weight * m.rho.matrix();
  acc /= acc.trace().real();
  return DensityMatrix(std::move(acc));
}

Eigen::Index StateEnsemble::dim() const { return members_.empty() ? 0 : members_.front().rho.dim(); }

std::string to_string(InitialState s) {
  switch (s) {
    case InitialState::up: return "up";
    case InitialState::down: return "down";
    case InitialState::mixed: return "mixed";
  }
  return "mixed";
}

InitialState parse_initial_state(const std::string& name) {
  if (name == "up") return InitialState::up;
  if (name == "down") return InitialState::down;
  if (name == "mixed") return InitialState::mixed;
  throw ConfigError("unknown initial state '" + name + "' (expected up, down or mixed)");
}

Operator embed(const Matrix2& local, std::size_t particle, const SpinSystem& sys) {
  if (particle >= sys.n_particles()) throw ConfigError("particle index out of range");
  const Eigen::Index d = sys.dim();
  const int shift = static_cast<int>(sys.n_particles() - 1 - particle);
  Matrix m = Matrix::Zero(d, d);
  for (Eigen::Index row = 0; row < d; ++row) {
    const int rb = static_cast<int>((row >> shift) & 1);
    for (int cb = 0; cb < 2; ++cb) {
      const cplx v = local(rb, cb);
      if (v == cplx(0.0)) continue;
      const Eigen::Index col = (row & ~(Eigen::Index{1} << shift)) | (Eigen::Index{cb} << shift);
      m(row, col) = v;
    }
  }
  const bool herm = (local - local.adjoint()).cwiseAbs().maxCoeff() < kHermitianTol;
  return Operator(std::move(m), herm);
}

Operator spin_operator(const SpinSystem& sys, std::size_t particle, Axis axis) {
  return embed(spin_half(axis), particle, sys);
}

StateVector basis_state(const SpinSystem& sys, const std::vector<Spin>& spins) {
  if (spins.size() != sys.n_particles()) throw ConfigError("basis state needs one spin per particle");
  Eigen::Index idx = 0;
  for (Spin s : spins) idx = (idx << 1) | (s == Spin::down ? 1 : 0);
  Vector v = Vector::Zero(sys.dim());
  v(idx) = 1.0;
  return StateVector(std::move(v));
}

StateVector singlet_state(const SpinSystem& sys, const NuclearConfig& nuclei) {
  if (!sys.is_radical_pair()) throw ConfigError("singlet state requires exactly two electrons");
  if (nuclei.size() != sys.n_nuclei()) throw ConfigError("nuclear configuration length mismatch");
  std::vector<Spin> ud{Spin::up, Spin::down};
  std::vector<Spin> du{Spin::down, Spin::up};
  ud.insert(ud.end(), nuclei.begin(), nuclei.end());
  du.insert(du.end(), nuclei.begin(), nuclei.end());
  return StateVector(basis_state(sys, ud).amplitudes() - basis_state(sys, du).amplitudes());
}

Operator singlet_projector(const SpinSystem& sys) {
  if (!sys.is_radical_pair()) throw ConfigError("singlet projector requires exactly two electrons");
  Matrix sdsa = Matrix::Zero(sys.dim(), sys.dim());
  for (Axis a : {Axis::x, Axis::y, Axis::z})
    sdsa += embed(spin_half(a), 0, sys).matrix() * embed(spin_half(a), 1, sys).matrix();
  // Q_S = 1/4 - s_D.s_A
  Matrix q = 0.25 * Matrix::Identity(sys.dim(), sys.dim()) - sdsa;
  return Operator(std::move(q), true);
}

Operator triplet_projector(const SpinSystem& sys) {
  return Operator::identity(sys) - singlet_projector(sys);
}

DensityMatrix mixed_singlet(const SpinSystem& sys) {
  const Operator qs = singlet_projector(sys);
  return DensityMatrix(qs.matrix() / qs.matrix().trace().real());
}

StateEnsemble mixed_singlet_ensemble(const SpinSystem& sys) {
  if (!sys.is_radical_pair()) throw ConfigError("singlet ensemble requires exactly two electrons");
  const std::size_t n = sys.n_nuclei();
  std::vector<EnsembleMember> members;
  for (std::size_t bits = 0; bits < (std::size_t{1} << n); ++bits) {
    NuclearConfig cfg(n);
    for (std::size_t j = 0; j < n; ++j)
      cfg[j] = ((bits >> (n - 1 - j)) & 1) ? Spin::down : Spin::up;
    members.push_back({1.0, DensityMatrix::pure(singlet_state(sys, cfg))});
  }
  return StateEnsemble(std::move(members));
}

StateEnsemble initial_ensemble(const SpinSystem& sys, InitialState which) {
  switch (which) {
    case InitialState::up:
      return StateEnsemble::single(singlet_state(sys, NuclearConfig(sys.n_nuclei(), Spin::up)));
    case InitialState::down:
      return StateEnsemble::single(singlet_state(sys, NuclearConfig(sys.n_nuclei(), Spin::down)));
    case InitialState::mixed:
      return mixed_singlet_ensemble(sys);
  }
  throw ConfigError("unknown initial state");
}

StateVector ghz_state(const SpinSystem& sys, double phi) {
  if (!sys.is_radical_pair() || sys.n_nuclei() != 1) throw ConfigError("GHZ state requires two electrons and exactly one nucleus");
  Vector v = Vector::Zero(sys.dim());
  v(0) = 1.0;
  v(sys.dim() - 1) = std::polar(1.0, phi);
  return StateVector(std::move(v));
}

}  // namespace radpair

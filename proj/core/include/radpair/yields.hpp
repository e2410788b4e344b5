#pragma once

#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "radpair/hamiltonian.hpp"
#include "radpair/numerics.hpp"

namespace radpair {

std::uint64_t spec_checksum(const HamiltonianSpec& spec);

// Eigendecomposition of H with rho0 and Q_S rotated into its eigenbasis.
class EvolutionCache {
 public:
  EvolutionCache(const HamiltonianSpec& spec, const DensityMatrix& rho0);
  EvolutionCache(const Operator& H, const DensityMatrix& rho0);

  const EigenDecomposition& eigen() const { return eig_; }
  const Matrix& rho_eigenbasis() const { return rho_; }
  const Matrix& singlet_eigenbasis() const { return qs_; }
  Matrix to_eigenbasis(const Operator& op) const;

  std::uint64_t checksum() const { return checksum_; }
  bool consistent_with(const HamiltonianSpec& spec) const { return checksum_ == spec_checksum(spec); }

  // Tr{rho_t O} for an observable already in the eigenbasis.
  double expectation_eigenbasis(const Matrix& o, double t) const;
  double max_frequency() const;

 private:
  EigenDecomposition eig_;
  Matrix rho_;
  Matrix qs_;
  std::uint64_t checksum_ = 0;
};

double singlet_fidelity(const EvolutionCache& cache, double t);
double expectation(const EvolutionCache& cache, const Operator& observable, double t);

// int_0^inf Tr{rho_t O} k e^{-kt} dt, evaluated spectrally.
double laplace_average(const EvolutionCache& cache, const Operator& observable, double k);
double laplace_average_singlet(const EvolutionCache& cache, double k);
// int_0^inf Tr{rho_t O}^2 k e^{-kt} dt, evaluated as a double spectral sum.
double laplace_second_moment(const EvolutionCache& cache, const Operator& observable, double k);
double laplace_second_moment_singlet(const EvolutionCache& cache, double k);

// One-nucleus closed forms; nuclear = up takes the + branch.
double closed_form_yield_iso(double A, double B, double k, Spin nuclear);
double closed_form_yield_aniso(double A, double B, double k);

struct YieldResult {
  double Y_S = 0.0;
  double Y_T = 0.0;
  double dYS_dB = 0.0;
  double variance = 0.0;
  double deltaB = std::numeric_limits<double>::infinity();
};

// Integrated-yield sensitivity: sqrt(sum_i w_i int q_i (1 - q_i) k e^{-kt}) / |dY_S/dB|.
YieldResult deltaB_integrated(const HamiltonianSpec& spec, const StateEnsemble& ensemble, double k);

// Time-resolved yield sensitivity using <Q_S>_t of the ensemble mean.
double deltaB_instantaneous(const HamiltonianSpec& spec, const StateEnsemble& ensemble, double k);

enum class GtFormula { iso_up, iso_down, iso_mixed, max_aniso };
std::string to_string(GtFormula f);

// d<Q_S>_t / dB for the one-nucleus families.
double g_t_analytic(GtFormula formula, double A, double B, double t);
double g_t_numeric(const HamiltonianSpec& spec, const StateEnsemble& ensemble, double t);

// Large-A limits of the integrated-yield delta B (times tau).
double asymptotic_deltaB_iso(double B, double k);
double asymptotic_deltaB_aniso(double B, double k);

enum class Variant { isotropic, max_anisotropic };
enum class SensitivityMode { integrated, instantaneous };
std::string to_string(Variant v);
std::string to_string(SensitivityMode m);
Variant parse_variant(const std::string& name);
SensitivityMode parse_mode(const std::string& name);

HamiltonianSpec variant_spec(Variant v, double A, double B);
double deltaB_for(Variant v, InitialState s, SensitivityMode m, double A, double B, double k);

struct FieldOptimum {
  double B = 0.0;
  double deltaB = 0.0;
};

// Minimizes delta B over B in [lo, hi].
FieldOptimum minimize_over_field(Variant v, InitialState s, SensitivityMode m, double A, double k, double lo, double hi);

struct SensitivityGrid {
  std::vector<double> A_values;
  std::vector<double> B_values;
  std::vector<std::vector<double>> inv_deltaB;  // [iA][iB]
  Variant variant = Variant::isotropic;
  InitialState initial_state = InitialState::mixed;
  SensitivityMode mode = SensitivityMode::integrated;
  double k = 1.0;

  void validate() const;
};

SensitivityGrid sweep_grid(Variant v, InitialState s, const std::vector<double>& A_values,
                           const std::vector<double>& B_values, double k, SensitivityMode mode);

}  // namespace radpair

#pragma once

#include <vector>

#include "radpair/spin.hpp"

namespace radpair {

struct HyperfineTensor {
  double ax = 0.0;
  double ay = 0.0;
  double az = 0.0;

  static HyperfineTensor isotropic(double a) { return {a, a, a}; }
  bool operator==(const HyperfineTensor&) const = default;
};

// H = -B (s_Dz + s_Az) + sum_j s_D.A_j.I_j + sum_k s_A.a_k.I_k + J s_A.s_D - gamma_n B sum I_z
struct HamiltonianSpec {
  double B = 0.0;
  std::vector<HyperfineTensor> donor_tensors;
  std::vector<HyperfineTensor> acceptor_tensors;
  double J = 0.0;
  double gamma_n = 0.0;

  SpinSystem system() const { return SpinSystem(donor_tensors.size(), acceptor_tensors.size()); }
  void validate() const;
  bool operator==(const HamiltonianSpec&) const = default;
};

Operator build(const HamiltonianSpec& spec, const SpinSystem& sys);
Operator build(const HamiltonianSpec& spec);
// Analytic dH/dB = -(s_Dz + s_Az) - gamma_n sum I_z.
Operator field_derivative(const HamiltonianSpec& spec, const SpinSystem& sys);
Operator field_derivative(const HamiltonianSpec& spec);

HamiltonianSpec isotropic(double A, double B);
HamiltonianSpec spheroidal(double A, double a, double B);
HamiltonianSpec ellipsoidal(double Ax, double Ay, double a, double B);
HamiltonianSpec max_anisotropic(double A, double B);
HamiltonianSpec cis(double A, double J, double B);
HamiltonianSpec trans(double A, double B);

// -B sum_i s_iz on a bare electron chain, and its B-derivative.
Operator zeeman_chain(std::size_t n_electrons, double B);
Operator zeeman_chain_derivative(std::size_t n_electrons);

struct EigenDecomposition {
  Eigen::VectorXd eigenvalues;  // ascending
  Matrix eigenvectors;          // columns
  double norm = 0.0;            // spectral norm of H

  double degeneracy_tolerance() const;
  bool degenerate(Eigen::Index k, Eigen::Index l) const;
};

EigenDecomposition eigendecompose(const Operator& H);

}  // namespace radpair

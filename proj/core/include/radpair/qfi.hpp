#pragma once

#include <vector>

#include "radpair/hamiltonian.hpp"
#include "radpair/numerics.hpp"

namespace radpair {

struct GeneratorResult {
  Operator h_B;
  Eigen::VectorXd eigenvalues;  // ascending
  Matrix eigenvectors;
  double lambda_max = 0.0;
  double lambda_min = 0.0;
  double F_max = 0.0;
  double t = 0.0;
};

// h_B = i (dU/dB) U^dagger for U = exp(-iHt), via the spectral kernel of H with V = dH/dB.
GeneratorResult generator(const Operator& H, const Operator& V, double t);
GeneratorResult generator(const HamiltonianSpec& spec, const SpinSystem& sys, double t);
GeneratorResult generator(const HamiltonianSpec& spec, double t);

// {0, 0, t, -t, t/2 +- r, -t/2 +- r}, sorted ascending.
std::vector<double> analytic_hB_eigs_spheroidal(double A, double B, double t);
// Eight values for the ellipsoidal one-nucleus family, sorted ascending.
std::vector<double> analytic_hB_eigs_ellipsoidal(double Ax, double Ay, double B, double t);

double max_qfi(const HamiltonianSpec& spec, const SpinSystem& sys, double t);
double max_qfi(const HamiltonianSpec& spec, double t);

struct OptimalState {
  StateVector state;
  // True when lambda_max or lambda_min is degenerate: the state is one of many.
  bool degenerate = false;
};

OptimalState optimal_state(const GeneratorResult& gen, double phi = 0.0);

struct BoundResult {
  double deltaB_F = 0.0;
  double nu0 = 1.0;
  double tau = 0.0;
};

// delta B = [nu0 int_0^inf F(t) k e^{-kt} dt]^{-1/2}, truncated at t = 50/k.
BoundResult deltaB_fundamental(const ScalarFn& F_of_t, double k, double nu0 = 1.0);

}  // namespace radpair

#pragma once

#include "radpair/hamiltonian.hpp"
#include "radpair/numerics.hpp"

namespace radpair {

// X = |up up UP><down down DOWN| + h.c. on the one-nucleus radical pair.
Operator coherence_operator(const SpinSystem& sys);

// <X>_t for the phi = 0 GHZ probe under the isotropic Hamiltonian: cos(2Bt).
double x_expectation(double t, double B);
// Same quantity by explicit evolution under isotropic(A, B).
double x_expectation_numeric(double A, double B, double t);

// Per-time inverse variance |d<X>/dB|^2 / Var(X) of the GHZ scheme; 4t^2 including the 0/0 points.
double timeresolved_inverse_variance(double B, double t);

struct TimeResolvedResult {
  double deltaB = 0.0;
  double information = 0.0;  // int 4t^2 k e^{-kt} dt
  ScalarFn integrand;        // t -> 4t^2 k e^{-kt}
};

TimeResolvedResult deltaB_timeresolved_optimal(double k, double B = 0.0);

double x_yield(double B, double k);
double x_yield_stddev(double B, double k);
// (1/(sqrt 8 k^2)) sqrt((4B^2 + k^2)^4 / (16B^2 + k^2))
double deltaB_integrated_optimal(double B, double k);
// Same figure through the spectral Laplace engine applied to X.
double deltaB_integrated_optimal_numeric(double A, double B, double k);

// Tr{rho_t rho_opt} with rho_opt the GHZ state evolved under the isotropic Hamiltonian.
double overlap_with_optimal(const HamiltonianSpec& spec, const DensityMatrix& rho0, double t);
double overlap_aniso_closed_form(double A, double B, double t);

}  // namespace radpair

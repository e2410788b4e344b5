#pragma once

#include <cstddef>
#include <functional>
#include <vector>

namespace radpair {

using ScalarFn = std::function<double(double)>;

struct QuadratureRule {
  std::vector<double> nodes;    // on [-1, 1]
  std::vector<double> weights;
};

// Gauss-Legendre rule of order n (Newton iteration on P_n).
QuadratureRule gauss_legendre(std::size_t n);

// Adaptive Gauss-Kronrod on [a, b] split into panels no wider than panel_width.
double integrate(const ScalarFn& f, double a, double b, double abs_tol = 1e-10, double panel_width = 0.0);

// Sample offsets and weights such that f'(x) ~ sum_i weights[i] f(x + offsets[i]).
struct Stencil {
  std::vector<double> offsets;
  std::vector<double> weights;
};

Stencil derivative_stencil(double x, double scale = 1.0);

// Fourth-order central difference with Richardson extrapolation over steps h and h/2,
// h = 1e-4 max(|x|, scale).  Results inside the round-off floor of the stencil are returned as 0.
double dB_derivative(const ScalarFn& f, double x, double scale = 1.0);

struct Minimum {
  double x = 0.0;
  double value = 0.0;
};

// Brent minimization on [lo, hi] to ~1e-8 relative in x.
Minimum minimize(const ScalarFn& f, double lo, double hi);

// Scan a grid for the best bracket, then polish with Brent inside it.
Minimum minimize_scan(const ScalarFn& f, double lo, double hi, std::size_t n_scan);

// Evaluates f(i) for i in [0, n) on a worker pool; results are written by index.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& f, std::size_t max_threads = 0);

}  // namespace radpair

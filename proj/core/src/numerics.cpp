#include "radpair/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <mutex>
#include <numbers>
#include <limits>
#include <queue>
#include <thread>
#include <utility>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/tools/minima.hpp>

#include "radpair/spin.hpp"

namespace radpair {

namespace {

// Returns {P_n(x), P_n'(x)}.
std::pair<double, double> legendre(std::size_t n, double x) {
  double p0 = 1.0, p1 = x;
  for (std::size_t k = 2; k <= n; ++k) {
    const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / static_cast<double>(k);
    p0 = p1;
    p1 = p2;
  }
  return {p1, static_cast<double>(n) * (x * p1 - p0) / (x * x - 1.0)};
}

}  // namespace

QuadratureRule gauss_legendre(std::size_t n) {
  if (n == 0) throw ConfigError("Gauss-Legendre order must be positive");
  QuadratureRule r;
  r.nodes.assign(n, 0.0);
  r.weights.assign(n, 0.0);
  if (n == 1) {
    r.weights[0] = 2.0;
    return r;
  }
  const double pi = std::numbers::pi;
  for (std::size_t i = 0; i < n / 2; ++i) {
    double x = std::cos(pi * (static_cast<double>(i) + 0.75) / (static_cast<double>(n) + 0.5));
    for (int it = 0; it < 100; ++it) {
      const auto [p, dp] = legendre(n, x);
      const double dx = p / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    const double dp = legendre(n, x).second;
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    r.nodes[i] = -x;
    r.nodes[n - 1 - i] = x;
    r.weights[i] = w;
    r.weights[n - 1 - i] = w;
  }
  if (n % 2 == 1) r.weights[n / 2] = 2.0 / (legendre(n, 0.0).second * legendre(n, 0.0).second);
  return r;
}

namespace {

using GK = boost::math::quadrature::gauss_kronrod<double, 15>;

struct Segment {
  double a, b, value, error;
  bool operator<(const Segment& o) const { return error < o.error; }
};

Segment rule(const ScalarFn& f, double a, double b) {
  double err = 0.0;
  const double v = GK::integrate(f, a, b, 0, 0.0, &err);
  if (!std::isfinite(v)) throw NumericalError("non-finite integrand");
  return {a, b, v, err};
}

}  // namespace

double integrate(const ScalarFn& f, double a, double b, double abs_tol, double panel_width) {
  if (!(b > a)) return 0.0;
  std::size_t panels = 1;
  if (panel_width > 0.0) panels = static_cast<std::size_t>(std::ceil((b - a) / panel_width));
  panels = std::max<std::size_t>(panels, 1);
  const double w = (b - a) / static_cast<double>(panels);
  // Global adaptivity: always bisect the segment with the largest error estimate.
  std::priority_queue<Segment> queue;
  double total = 0.0, error = 0.0;
  for (std::size_t p = 0; p < panels; ++p) {
    const double lo = a + w * static_cast<double>(p);
    const double hi = (p + 1 == panels) ? b : lo + w;
    Segment s = rule(f, lo, hi);
    total += s.value;
    error += s.error;
    queue.push(s);
  }
  const std::size_t max_segments = panels + 100000;
  while (error > abs_tol && queue.size() < max_segments) {
    const Segment worst = queue.top();
    if (worst.b - worst.a < 1e-14 * (b - a)) break;
    queue.pop();
    const double m = 0.5 * (worst.a + worst.b);
    const Segment l = rule(f, worst.a, m), r = rule(f, m, worst.b);
    total += l.value + r.value - worst.value;
    error += l.error + r.error - worst.error;
    queue.push(l);
    queue.push(r);
  }
  return total;
}

Stencil derivative_stencil(double x, double scale) {
  const double h = 1e-4 * std::max(std::abs(x), std::abs(scale));
  if (!(h > 0.0) || !std::isfinite(h)) throw ConfigError("derivative step is zero (x and scale both vanish)");
  // (16 D(h/2) - D(h)) / 15 with D(s) = [-f(x+2s) + 8f(x+s) - 8f(x-s) + f(x-2s)] / 12s
  const double c_2h = 1.0 / (180.0 * h);
  const double c_h = -2.0 / (9.0 * h);
  const double c_h2 = 64.0 / (45.0 * h);
  Stencil s;
  s.offsets = {-2 * h, -h, -0.5 * h, 0.5 * h, h, 2 * h};
  s.weights = {-c_2h, -c_h, -c_h2, c_h2, c_h, c_2h};
  return s;
}

double dB_derivative(const ScalarFn& f, double x, double scale) {
  const Stencil s = derivative_stencil(x, scale);
  double d = 0.0, noise = 0.0;
  for (std::size_t i = 0; i < s.offsets.size(); ++i) {
    const double term = s.weights[i] * f(x + s.offsets[i]);
    d += term;
    noise += std::abs(term);
  }
  // Cancellation residue of a flat function is round-off, not slope.
  if (std::abs(d) <= 16 * std::numeric_limits<double>::epsilon() * noise) return 0.0;
  return d;
}

Minimum minimize(const ScalarFn& f, double lo, double hi) {
  if (!(hi > lo)) throw ConfigError("minimization bracket is empty");
  std::uintmax_t iters = 200;
  auto r = boost::math::tools::brent_find_minima(f, lo, hi, 40, iters);
  return {r.first, r.second};
}

Minimum minimize_scan(const ScalarFn& f, double lo, double hi, std::size_t n_scan) {
  if (n_scan < 3) return minimize(f, lo, hi);
  std::vector<double> xs(n_scan), ys(n_scan);
  for (std::size_t i = 0; i < n_scan; ++i) {
    xs[i] = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n_scan - 1);
    ys[i] = f(xs[i]);
  }
  const auto best = static_cast<std::size_t>(std::min_element(ys.begin(), ys.end()) - ys.begin());
  const double a = xs[best == 0 ? 0 : best - 1];
  const double b = xs[best + 1 == n_scan ? best : best + 1];
  Minimum m = minimize(f, a, b);
  if (ys[best] < m.value) return {xs[best], ys[best]};
  return m;
}

void parallel_for(std::size_t n, const std::function<void(std::size_t)>& f, std::size_t max_threads) {
  std::size_t threads = max_threads ? max_threads : std::max(1u, std::thread::hardware_concurrency());
  threads = std::min(threads, n);
  if (threads <= 1) {
    for (std::size_t i = 0; i < n; ++i) f(i);
    return;
  }
  std::mutex mu;
  std::exception_ptr failure;
  std::size_t next = 0;
  auto worker = [&] {
    for (;;) {
      std::size_t i;
      {
        std::lock_guard lock(mu);
        if (failure || next >= n) return;
        i = next++;
      }
      try {
        f(i);
      } catch (...) {
        std::lock_guard lock(mu);
        if (!failure) failure = std::current_exception();
      }
    }
  };
  std::vector<std::thread> pool;
  for (std::size_t t = 0; t < threads; ++t) pool.emplace_back(worker);
  for (auto& th : pool) th.join();
  if (failure) std::rethrow_exception(failure);
}

}  // namespace radpair

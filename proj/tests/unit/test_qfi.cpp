#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "oracles.hpp"
#include "radpair/qfi.hpp"

using namespace radpair;

namespace {

double max_abs(const Matrix& m) { return m.cwiseAbs().maxCoeff(); }

std::vector<double> sorted_eigs(const Matrix& h) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(h);
  std::vector<double> v(es.eigenvalues().data(), es.eigenvalues().data() + es.eigenvalues().size());
  return v;
}

}  // namespace

TEST_SUITE("qfi") {
  TEST_CASE("single electron: h_B = -t s_z") {
    for (double B : {0.0, 0.4, 3.0})
      for (double t : {0.0, 0.5, 2.0}) {
        const GeneratorResult g = generator(zeeman_chain(1, B), zeeman_chain_derivative(1), t);
        CHECK(max_abs(g.h_B.matrix() + t * spin_half(Axis::z)) < 1e-14);
        CHECK(g.F_max == doctest::Approx(t * t));
      }
  }

  TEST_CASE("electron chains scale as N^2 t^2") {
    for (std::size_t n = 1; n <= 4; ++n) {
      const double t = 1.7;
      const GeneratorResult g = generator(zeeman_chain(n, 0.9), zeeman_chain_derivative(n), t);
      CHECK(g.F_max == doctest::Approx(double(n * n) * t * t).epsilon(1e-12));
    }
    HamiltonianSpec pair;
    pair.B = 0.3;
    CHECK(max_qfi(pair, 2.0) == doctest::Approx(16.0));
    CHECK(max_qfi(pair, 0.0) == 0.0);
  }

  TEST_CASE("nuclear Zeeman term adds to the span") {
    HamiltonianSpec s = isotropic(1.0, 0.8);
    s.gamma_n = 1e-3;
    const double t = 2.5;
    CHECK(max_qfi(s, t) == doctest::Approx(std::pow(2 + 1e-3, 2) * t * t).epsilon(1e-10));
  }

  TEST_CASE("spectral generator equals finite-difference oracle") {
    for (int trial = 0; trial < 15; ++trial) {
      const double ax = oracle::uniform(-2, 2), ay = oracle::uniform(-2, 2), a = oracle::uniform(-2, 2);
      const double B = oracle::uniform(-2, 2), t = oracle::uniform(0, 4);
      const GeneratorResult g = generator(ellipsoidal(ax, ay, a, B), t);
      const Matrix fd = oracle::fd_generator([&](double b) { return oracle::hamiltonian(b, {{ax, ay, a}}, {}); }, B, t);
      CHECK(max_abs(g.h_B.matrix() - fd) < 1e-7);
    }
  }

  TEST_CASE("degenerate branch of the kernel") {
    // At B = 0 and A = 0 every level pair is degenerate: h_B = t V.
    HamiltonianSpec s = isotropic(0.0, 0.0);
    const GeneratorResult g = generator(s, 1.5);
    CHECK(max_abs(g.h_B.matrix() - 1.5 * field_derivative(s).matrix()) < 1e-14);
    const Matrix fd = oracle::fd_generator([](double b) { return oracle::hamiltonian(b, {{1, 1, 1}}, {}); }, 0.0, 2.0);
    CHECK(max_abs(generator(isotropic(1, 0), 2.0).h_B.matrix() - fd) < 1e-7);
  }

  TEST_CASE("closed-form generator spectra") {
    SUBCASE("spheroidal") {
      for (auto [A, a, B, t] : std::vector<std::array<double, 4>>{{1, 0.3, 1, 1}, {2, -1, 0.5, 3}, {0.5, 2, 2, 0.7}}) {
        const auto want = analytic_hB_eigs_spheroidal(A, B, t);
        const auto got = sorted_eigs(generator(spheroidal(A, a, B), t).h_B.matrix());
        for (std::size_t i = 0; i < 8; ++i) CHECK(std::abs(got[i] - want[i]) < 1e-8);
        CHECK(std::count_if(want.begin(), want.end(), [&](double x) { return std::abs(std::abs(x) - t) < 1e-12; }) >= 2);
      }
      for (double x : analytic_hB_eigs_spheroidal(1, 1, 0)) CHECK(x == 0.0);
    }
    SUBCASE("ellipsoidal") {
      for (auto [Ax, Ay, a, B, t] :
           std::vector<std::array<double, 5>>{{1, 0.2, 0.7, 1, 1}, {3, -1, 0, 0.4, 2}, {0.5, 0.5, 1, 1, 4}}) {
        const auto want = analytic_hB_eigs_ellipsoidal(Ax, Ay, B, t);
        const auto got = sorted_eigs(generator(ellipsoidal(Ax, Ay, a, B), t).h_B.matrix());
        for (std::size_t i = 0; i < 8; ++i) CHECK(std::abs(got[i] - want[i]) < 1e-8);
      }
    }
  }

  TEST_CASE("F_max does not depend on Az") {
    const double t = 1.9;
    const double ref = generator(ellipsoidal(1.1, 0.4, 0.0, 0.8), t).F_max;
    for (double az : {-3.0, 0.5, 7.0}) CHECK(generator(ellipsoidal(1.1, 0.4, az, 0.8), t).F_max == doctest::Approx(ref).epsilon(1e-9));
    const auto e = analytic_hB_eigs_ellipsoidal(1.1, 0.4, 0.8, t);
    CHECK(ref == doctest::Approx(std::pow(e.back() - e.front(), 2)).epsilon(1e-9));
  }

  TEST_CASE("optimal state saturates the bound") {
    const GeneratorResult g = generator(isotropic(1.0, 0.7), 1.3);
    for (double phi : {0.0, 1.0}) {
      const OptimalState o = optimal_state(g, phi);
      const Vector& v = o.state.amplitudes();
      const double m1 = (v.adjoint() * g.h_B.matrix() * v)(0).real();
      const double m2 = (v.adjoint() * g.h_B.matrix() * g.h_B.matrix() * v)(0).real();
      CHECK(4 * (m2 - m1 * m1) == doctest::Approx(g.F_max).epsilon(1e-10));
    }
    // Isotropic extreme eigenvectors are the fully polarized states, so the probe is GHZ up to phases.
    const OptimalState ghz = optimal_state(g);
    const Vector& v = ghz.state.amplitudes();
    CHECK(std::norm(v(0)) == doctest::Approx(0.5).epsilon(1e-10));
    CHECK(std::norm(v(7)) == doctest::Approx(0.5).epsilon(1e-10));
    const GeneratorResult single = generator(zeeman_chain(1, 0.3), zeeman_chain_derivative(1), 1.0);
    CHECK_FALSE(optimal_state(single).degenerate);
    HamiltonianSpec two;
    two.B = 1;
    CHECK_FALSE(optimal_state(generator(two, 1.0)).degenerate);
    // Two nuclei: the extreme eigenspaces are shared by several nuclear configurations.
    HamiltonianSpec multi = isotropic(1.0, 0.5);
    multi.acceptor_tensors.push_back(HyperfineTensor::isotropic(0.0));
    CHECK(optimal_state(generator(multi, 1.0)).degenerate);
  }

  TEST_CASE("reaction-weighted bound") {
    CHECK(deltaB_fundamental([](double t) { return 4 * t * t; }, 1.0).deltaB_F == doctest::Approx(1 / std::sqrt(8.0)).epsilon(1e-9));
    CHECK(deltaB_fundamental([](double t) { return t * t; }, 1.0).deltaB_F == doctest::Approx(1 / std::sqrt(2.0)).epsilon(1e-9));
    const BoundResult b = deltaB_fundamental([](double t) { return 4 * t * t; }, 2.0);
    CHECK(b.tau == 0.5);
    CHECK(b.deltaB_F * b.tau == doctest::Approx(1 / std::sqrt(8.0)).epsilon(1e-9));
    CHECK(deltaB_fundamental([](double t) { return 4 * t * t; }, 1.0, 100.0).deltaB_F ==
          doctest::Approx(0.1 / std::sqrt(8.0)).epsilon(1e-9));
    CHECK_THROWS_AS(deltaB_fundamental([](double t) { return t; }, 0.0), ConfigError);
    CHECK_THROWS_AS(deltaB_fundamental([](double) { return 0.0; }, 1.0), NumericalError);
  }

  TEST_CASE("operator norm never exceeds t") {
    for (int trial = 0; trial < 40; ++trial) {
      HamiltonianSpec s;
      s.B = oracle::uniform(-3, 3);
      s.J = trial % 2 ? oracle::uniform(-3, 3) : 0.0;
      s.donor_tensors = {{oracle::uniform(-3, 3), oracle::uniform(-3, 3), oracle::uniform(-3, 3)}};
      if (trial % 3 == 0) s.acceptor_tensors = {{oracle::uniform(-3, 3), oracle::uniform(-3, 3), oracle::uniform(-3, 3)}};
      const double t = oracle::uniform(0, 5);
      const GeneratorResult g = generator(s, t);
      CHECK(std::max(std::abs(g.lambda_max), std::abs(g.lambda_min)) <= t * (1 + 1e-9) + 1e-15);
      CHECK(g.h_B.hermiticity_defect() < 1e-12);
    }
  }
}

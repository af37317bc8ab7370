#include <doctest.h>

#include <cmath>
#include <random>

#include "cascade/dyadic.hpp"

using namespace cascade;

namespace {

std::vector<double> random_nonneg(int N, uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> dist(0.0, 1.0);
  std::vector<double> psi(static_cast<size_t>(N) + 1);
  for (auto& p : psi) p = dist(rng);
  return psi;
}

}  // namespace

TEST_CASE("shell system fixtures") {
  SUBCASE("unit mass on shell 0, ideal flow") {
    const auto rhs = dyadic_rhs({0.0, 0.0}, {1.0, 0.0, 0.0});
    CHECK(rhs[0] == 0.0);
    CHECK(rhs[1] == doctest::Approx(2.0 * M_PI).epsilon(1e-15));
    CHECK(rhs[2] == 0.0);
  }
  SUBCASE("dissipation weight on shell 0") {
    const double alpha = 0.37, nu = 0.8;
    CHECK(dissipation_weight(0, alpha) ==
          doctest::Approx(std::pow(20.0 * M_PI * M_PI, alpha)).epsilon(1e-15));
    const auto rhs = dyadic_rhs({nu, alpha}, {1.0, 0.0});
    CHECK(rhs[0] ==
          doctest::Approx(-nu * std::pow(20.0 * M_PI * M_PI, alpha)).epsilon(1e-15));
    CHECK(dissipation_weight(3, 1.0) ==
          doctest::Approx(4.0 * M_PI * M_PI * (3.0 * 64.0 + 2.0 * 27.0)).epsilon(1e-15));
  }
}

TEST_CASE("ideal flux telescopes: the quadratic integral is conserved") {
  const auto psi = random_nonneg(20, 5150);
  const auto rhs = dyadic_rhs({0.0, 0.0}, psi);
  double ddt_energy = 0, scale = 0;
  for (size_t n = 0; n < psi.size(); ++n) {
    ddt_energy += 2.0 * psi[n] * rhs[n];
    scale += std::abs(psi[n] * rhs[n]);
  }
  CHECK(std::abs(ddt_energy) < 1e-14 * (1.0 + scale));
}

TEST_CASE("tail energy rate equals the sum of coefficient rates") {
  const Model model{0.05, 0.4};
  const auto psi = random_nonneg(14, 99);
  const auto rhs = dyadic_rhs(model, psi);
  for (int n = 0; n < 15; ++n) {
    double direct = 0;
    for (size_t m = static_cast<size_t>(n); m < psi.size(); ++m)
      direct += 2.0 * psi[m] * rhs[m];
    const double closed = shell_energy_rate(model, psi, n);
    CHECK(closed == doctest::Approx(direct).epsilon(1e-11));
  }
  CHECK(shell_energy(psi, 0) == doctest::Approx(dyadic_norm(psi, 0.0) *
                                                dyadic_norm(psi, 0.0)));
  // Degenerate fixture: with psi = (1,1,0,...) the tail above shell 1 gains
  // energy at rate 2 drain(0) = 4 pi in ideal flow.
  CHECK(shell_energy_rate({0.0, 0.0}, {1.0, 1.0, 0.0}, 1) ==
        doctest::Approx(4.0 * M_PI).epsilon(1e-15));
}

TEST_CASE("restriction of the full quadratic operator to symmetric fields") {
  // The shell flux must agree with the interaction table driven through the
  // embedding: to_psi(B(u, u)) with u = from_psi(psi).
  for (uint64_t seed : {1ull, 2ull, 3ull}) {
    const auto psi = random_nonneg(12, seed);
    const SpectralField u = from_psi(psi);
    const SpectralField b = bilinear_B(u, u);  // truncated at the same shell
    const auto flux = to_psi(b, 1e-9);
    Eigen::VectorXd out(13);
    DyadicSystem({0.0, 0.0}, 12)
        .rhs_nonlinear(Eigen::Map<const Eigen::VectorXd>(psi.data(), 13), out);
    for (int n = 0; n <= 12; ++n) {
      CHECK(flux[static_cast<size_t>(n)] ==
            doctest::Approx(out[n]).epsilon(1e-10).scale(std::abs(out.norm()) + 1.0));
    }
  }
}

TEST_CASE("lyapunov functional fixtures") {
  const auto v = lyapunov({1.0}, 0.25);
  const double r_expect = (1.5 + std::pow(3.0, -1.25)) / (2.0 * (std::pow(3.0, 0.25) - 1.0));
  CHECK(v.r == doctest::Approx(r_expect).epsilon(1e-15));
  CHECK(v.r == doctest::Approx(2.7735253296).epsilon(1e-9));
  CHECK(v.H == doctest::Approx(v.r).epsilon(1e-15));

  const auto w = lyapunov({1.0, 0.5}, 0.25);
  CHECK(w.H == doctest::Approx(w.r + 0.5 + std::pow(3.0, 0.25) * w.r * 0.25)
                   .epsilon(1e-14));

  // Two-sided comparison with the weighted shell norm for nonnegative data.
  const auto psi = random_nonneg(10, 7);
  const auto l = lyapunov(psi, 0.3);
  const double nsq = dyadic_norm(psi, 0.3) * dyadic_norm(psi, 0.3);
  CHECK(l.H >= l.r * nsq - 1e-12);
  CHECK(l.H <= (l.r + 0.5 + 0.5 * std::pow(3.0, -0.3)) * nsq + 1e-12);
}

TEST_CASE("named presets") {
  CHECK(dyadic_preset("delta0", 3) == std::vector<double>{1.0, 0.0, 0.0, 0.0});
  const auto geo = dyadic_preset("geometric:0.5", 3);
  CHECK(geo == std::vector<double>{1.0, 0.5, 0.25, 0.125});
  CHECK_THROWS_AS(dyadic_preset("bogus", 3), std::invalid_argument);
}

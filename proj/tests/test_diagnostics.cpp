#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <fstream>

#include "cascade/diagnostics.hpp"

using namespace cascade;

namespace {
const double kAlphaThird = std::log(3.0) / (6.0 * std::log(2.0));  // alpha_tilde = 1/3
}

TEST_CASE("ladder profile fixtures") {
  // Independently computed reference values (quad-checked in plain floating
  // point; the function is a smooth composition of library primitives).
  CHECK(ladder_f(0.4) == doctest::Approx(16.862840052888).epsilon(1e-12));
  CHECK_THROWS_AS(ladder_f(1.0 / 3.0), std::invalid_argument);
  CHECK_THROWS_AS(ladder_f(0.2), std::invalid_argument);
  CHECK_THROWS_AS(ladder_f(0.4853), std::invalid_argument);
}

TEST_CASE("blowup bound minimization") {
  const BlowupBound b = euler_blowup_bound(1.0);
  CHECK(b.r_star == doctest::Approx(0.400340396367).epsilon(1e-8));
  CHECK(b.f_star == doctest::Approx(16.862494000244).epsilon(1e-10));
  CHECK(b.T_max == doctest::Approx(6.573816316406).epsilon(1e-10));
  CHECK(b.kappa == doctest::Approx(22.772367719281).epsilon(1e-10));

  // Grid-scan oracle: the golden-section minimum must match a dense scan.
  const double lo = 1.0 / 3.0 + 1e-9;
  const double hi = std::sqrt(2.0) / (std::sqrt(2.0) + 1.5) - 1e-9;
  double grid_min = 1e300;
  const int M = 100000;
  for (int i = 0; i <= M; ++i)
    grid_min = std::min(grid_min, ladder_f(lo + (hi - lo) * i / M));
  CHECK(b.f_star <= grid_min + 1e-12);
  CHECK(b.f_star >= grid_min - 1e-8);

  // The bound scales as E0^{-1/2}.
  CHECK(euler_blowup_bound(4.0).T_max == doctest::Approx(b.T_max / 2).epsilon(1e-14));
  CHECK_THROWS_AS(euler_blowup_bound(0.0), std::invalid_argument);
}

TEST_CASE("energy ladder fixtures") {
  const EnergyLadder lad = energy_ladder(1.0, 0.4, 30);
  REQUIRE(lad.T.size() == 31);
  CHECK(lad.T[0] == 0.0);
  CHECK(lad.T[1] == doctest::Approx(0.572782261836).epsilon(1e-12));
  CHECK(lad.T[7] == doctest::Approx(3.101052519244).epsilon(1e-12));
  CHECK(lad.T[12] == doctest::Approx(4.372348260603).epsilon(1e-12));
  CHECK(lad.T[30] == doctest::Approx(6.147265820509).epsilon(1e-12));
  CHECK(lad.T_inf == doctest::Approx(6.573951224476).epsilon(1e-12));
  for (int n = 1; n <= 30; ++n) {
    CHECK(lad.T[n] > lad.T[n - 1]);
    CHECK(lad.T[n] < lad.T_inf);
    CHECK(lad.floor[n] == doctest::Approx(std::pow(0.4, n)).epsilon(1e-13));
  }
  CHECK_THROWS_AS(energy_ladder(1.0, 0.3, 5), std::invalid_argument);
  CHECK_THROWS_AS(energy_ladder(1.0, 0.5, 5), std::invalid_argument);
  CHECK_THROWS_AS(energy_ladder(-1.0, 0.4, 5), std::invalid_argument);
  CHECK_THROWS_AS(energy_ladder(1.0, 0.4, -1), std::invalid_argument);
}

TEST_CASE("ladder limit coincides with the bound profile") {
  const BlowupBound b = euler_blowup_bound(1.0);
  for (double r : {0.36, 0.40, 0.45}) {
    const EnergyLadder lad = energy_ladder(1.0, r, 1);
    const double profile = std::sqrt(3.0) / (std::sqrt(2.0) * M_PI) * ladder_f(r);
    CHECK(lad.T_inf == doctest::Approx(profile).epsilon(1e-12));
    CHECK(lad.T_inf >= b.T_max - 1e-12);
  }
  const EnergyLadder at_min = energy_ladder(1.0, b.r_star, 1);
  CHECK(at_min.T_inf == doctest::Approx(b.T_max).epsilon(1e-12));
}

TEST_CASE("Lyapunov criterion fixtures") {
  Model model;
  model.alpha = 0.15849625007211565;  // alpha_tilde = 0.2
  model.nu = 0.01;
  const auto psi0 = dyadic_preset("delta0", 30);

  const LyapunovCriterion c = hypo_lyapunov_criterion(model, psi0, 0.25);
  CHECK(c.alpha_tilde == doctest::Approx(0.2).epsilon(1e-14));
  CHECK(c.applicable);
  CHECK(c.r == doctest::Approx(2.7735253295679696).epsilon(1e-14));
  CHECK(c.eps == doctest::Approx(0.3).epsilon(1e-12));
  CHECK(c.sandwich_hi == doctest::Approx(3.6534431723937657).epsilon(1e-14));
  CHECK(c.kappa == doctest::Approx(0.08767742787532415).epsilon(1e-12));
  CHECK(c.C == doctest::Approx(16.707815673090252).epsilon(1e-12));
  CHECK(c.C_tilde_sq == doctest::Approx(680.1411396892922).epsilon(1e-12));
  CHECK(c.H0 == doctest::Approx(c.r).epsilon(1e-14));  // delta0
  CHECK(c.threshold == doctest::Approx(680.1411396892922e-4).epsilon(1e-12));
  CHECK(c.triggered);
  CHECK(c.T_bound == doctest::Approx(6.848510579525673).epsilon(1e-12));

  model.nu = 0.2;  // threshold 27.2 > H0 = 2.77
  const LyapunovCriterion weak = hypo_lyapunov_criterion(model, psi0, 0.25);
  CHECK(weak.applicable);
  CHECK_FALSE(weak.triggered);
  CHECK(std::isinf(weak.T_bound));

  Model strong;  // alpha_tilde = 0.4417 > 1/3
  strong.alpha = 0.35;
  strong.nu = 0.01;
  CHECK_FALSE(hypo_lyapunov_criterion(strong, psi0, 0.25).applicable);

  model.alpha = 0.15849625007211565;
  CHECK_FALSE(hypo_lyapunov_criterion(model, psi0, 0.45).applicable);
  CHECK_THROWS_AS(hypo_lyapunov_criterion(model, psi0, 0.0),
                  std::invalid_argument);
  CHECK(kAlphaThird == doctest::Approx(0.2641604167868594).epsilon(1e-14));
}

TEST_CASE("Lyapunov barrier and analytic rate") {
  CHECK(lyapunov_barrier(4.0, 0.5, 0.5) == doctest::Approx(16.0).epsilon(1e-14));
  CHECK(std::isinf(lyapunov_barrier(4.0, 0.5, 1.0)));
  CHECK(lyapunov_barrier(4.0, 0.5, 0.0) == 4.0);

  Model model;
  model.nu = 0.05;
  model.alpha = 0.25;
  const auto psi_v = dyadic_preset("geometric:0.7", 12);
  const Eigen::Map<const Eigen::VectorXd> psi(psi_v.data(), 13);
  const double gamma = 0.25;

  const double rate = lyapunov_rate(model, psi, gamma);
  // Finite difference along the flow direction.
  const DyadicSystem sys(model, 12);
  Eigen::VectorXd f(13);
  sys.rhs(psi, f);
  const double delta = 1e-6;
  const double plus = lyapunov(Eigen::VectorXd(psi + delta * f), gamma).H;
  const double minus = lyapunov(Eigen::VectorXd(psi - delta * f), gamma).H;
  CHECK(rate == doctest::Approx((plus - minus) / (2 * delta)).epsilon(1e-8));
}

TEST_CASE("origin strain coefficient") {
  Eigen::VectorXd delta0 = Eigen::VectorXd::Zero(4);
  delta0[0] = 1.0;
  CHECK(origin_strain_coefficient(delta0) ==
        doctest::Approx(12.0 * M_PI * std::sqrt(1.2)).epsilon(1e-14));

  // Additivity with the exact shell weights.
  Eigen::VectorXd two = Eigen::VectorXd::Zero(4);
  two[0] = 0.5;
  two[3] = -0.25;
  const double w0 = 12.0 * std::sqrt(2.0) * M_PI / std::sqrt(1.0 + 2.0 / 3.0);
  const double w3 = 12.0 * std::sqrt(2.0) * M_PI * std::pow(std::sqrt(3.0), 3) /
                    std::sqrt(1.0 + (2.0 / 3.0) * std::pow(0.75, 3));
  CHECK(origin_strain_coefficient(two) ==
        doctest::Approx(0.5 * w0 - 0.25 * w3).epsilon(1e-14));
}

TEST_CASE("weighted sup and diagnostic rows") {
  Eigen::VectorXd psi(3);
  psi << 1.0, -2.0, 0.5;
  CHECK(weighted_sup(psi) == doctest::Approx(0.5 * 3.0).epsilon(1e-14));

  Eigen::VectorXd delta0 = Eigen::VectorXd::Zero(5);
  delta0[0] = 1.0;
  const DiagnosticsRow row = diagnostics_row(0.0, delta0, 0.25, 0.125);
  CHECK(row.E0 == 1.0);
  CHECK(row.h1 == 1.0);
  CHECK(row.H_gamma == doctest::Approx(2.7735253295679696).epsilon(1e-12));
  CHECK(row.lambda_origin == doctest::Approx(12 * M_PI * std::sqrt(1.2)).epsilon(1e-14));
  CHECK(row.sup_weighted == 1.0);
  CHECK(row.E_top == 0.0);
  CHECK(row.diss_integral == 0.125);
}

TEST_CASE("trajectory diagnostics for both representations") {
  Model model;
  model.nu = 0.08;
  model.alpha = 0.3;
  const auto psi0 = dyadic_preset("delta0", 5);
  SimConfig cfg;
  cfg.t_end = 0.8;
  cfg.rtol = 1e-11;
  cfg.atol = 1e-13;

  const Trajectory shell = integrate_dyadic(model, psi0, cfg);
  const Trajectory full = integrate_galerkin(model, from_psi(psi0), cfg);
  const auto rows_s = trajectory_diagnostics(shell, 0.25);
  const auto rows_f = trajectory_diagnostics(full, 0.25);

  // Energy balance expressed through the rows, for both representations.
  for (const auto& r : rows_s)
    CHECK(r.E0 + 2 * model.nu * r.diss_integral == doctest::Approx(1.0).epsilon(1e-8));
  for (const auto& r : rows_f)
    CHECK(r.E0 + 2 * model.nu * r.diss_integral == doctest::Approx(1.0).epsilon(1e-8));

  // Final rows agree between representations (same t_end).
  const DiagnosticsRow& a = rows_s.back();
  const DiagnosticsRow& b = rows_f.back();
  CHECK(a.t == b.t);
  CHECK(b.E0 == doctest::Approx(a.E0).epsilon(1e-8));
  CHECK(b.h1 == doctest::Approx(a.h1).epsilon(1e-7));
  CHECK(b.H_gamma == doctest::Approx(a.H_gamma).epsilon(1e-7));
  CHECK(b.lambda_origin == doctest::Approx(a.lambda_origin).epsilon(1e-7));

  // Broken symmetry: psi-based entries become NaN, norms survive.
  SpectralField u0 = from_psi(psi0);
  u0.amp(1, 3) += Complex(0.2, 0.1);
  const Trajectory crooked = integrate_galerkin(Model{}, u0, cfg);
  const auto rows_c = trajectory_diagnostics(crooked, 0.25);
  const double e0 = rows_c.front().E0;
  for (const auto& r : rows_c) {
    CHECK(std::isnan(r.h1));
    CHECK(std::isnan(r.lambda_origin));
    CHECK(r.E0 == doctest::Approx(e0).epsilon(1e-9));
  }
}

TEST_CASE("CSV round trip is lossless") {
  Model model;
  model.nu = 0.02;
  model.alpha = 0.4;
  const auto psi0 = dyadic_preset("geometric:0.5", 6);
  SimConfig cfg;
  cfg.t_end = 0.6;
  cfg.rtol = 1e-10;
  cfg.atol = 1e-12;
  const Trajectory traj = integrate_dyadic(model, psi0, cfg);

  const std::string path = "/tmp/cascade_test_traj.csv";
  write_trajectory_csv(path, traj, 0.25);
  const CsvTrajectory back = read_trajectory_csv(path);

  REQUIRE(back.N == 6);
  REQUIRE(back.t.size() == traj.t.size());
  const auto rows = trajectory_diagnostics(traj, 0.25);
  for (size_t i = 0; i < back.t.size(); ++i) {
    CHECK(back.t[i] == traj.t[i]);  // %.17g round-trips doubles exactly
    for (int n = 0; n <= 6; ++n) CHECK(back.psi[i][n] == traj.y[i][n]);
    CHECK(back.rows[i].E0 == rows[i].E0);
    CHECK(back.rows[i].h1 == rows[i].h1);
    CHECK(back.rows[i].H_gamma == rows[i].H_gamma);
    CHECK(back.rows[i].lambda_origin == rows[i].lambda_origin);
    CHECK(back.rows[i].sup_weighted == rows[i].sup_weighted);
  }
}

TEST_CASE("CSV reader rejects malformed input") {
  const std::string path = "/tmp/cascade_test_bad.csv";
  {
    std::ofstream f(path);
    f << "x,psi_0\n1,2\n";
  }
  CHECK_THROWS_AS(read_trajectory_csv(path), std::runtime_error);
  {
    std::ofstream f(path);
    f << "t,E0\n0,1\n";  // no psi columns
  }
  CHECK_THROWS_AS(read_trajectory_csv(path), std::runtime_error);
  {
    std::ofstream f(path);
    f << "t,psi_0,psi_1\n0.0,1.0\n";  // short row
  }
  CHECK_THROWS_AS(read_trajectory_csv(path), std::runtime_error);
  {
    std::ofstream f(path);
    f << "t,psi_0\n0.0,oops\n";
  }
  CHECK_THROWS_AS(read_trajectory_csv(path), std::runtime_error);
  CHECK_THROWS_AS(read_trajectory_csv("/nonexistent/never.csv"),
                  std::runtime_error);
}

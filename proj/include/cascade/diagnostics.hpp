#pragma once

// Closed-form bounds and per-sample diagnostic functionals.
//
// Three analytic devices accompany the simulations:
//   * the ideal blowup-time bound T_max = (sqrt3/(sqrt2 pi)) inf_r f(r) / sqrt(E_0),
//     obtained by minimizing the ladder profile f;
//   * the shell-arrival ladder T_n with energy floors E_0 r^n;
//   * the Lyapunov functional H_gamma = sum 3^{gamma n} (r psi_n^2 +
//     psi_n psi_{n+1}), which for weak enough dissipation obeys
//     dH/dt >= 2 kappa H^{3/2} and therefore forces finite-time blowup.
//
// Diagnostic rows collect the scalar functionals tracked along trajectories;
// CSV helpers serialize them with full double precision.

#include <string>
#include <vector>

#include "cascade/evolve.hpp"

namespace cascade {

// Ladder profile f(r) = r / ((sqrt2 - (sqrt2+3/2) r)(sqrt(3r) - 1)) on the
// admissible interval 1/3 < r < sqrt2/(sqrt2+3/2); throws outside it.
double ladder_f(double r);

struct BlowupBound {
  double r_star = 0;  // minimizer of f
  double f_star = 0;  // inf f
  double kappa = 0;   // T_max <= kappa / ||u0||_{L2}
  double E0 = 0;      // shell-side energy the bound was evaluated at
  double T_max = 0;   // (sqrt3/(sqrt2 pi)) f_star / sqrt(E0)
};

BlowupBound euler_blowup_bound(double E0 = 1.0);

struct EnergyLadder {
  double E0 = 0, r = 0;
  std::vector<double> T;      // T[n]: arrival bound for shell n (T[0] = 0)
  std::vector<double> floor;  // E0 r^n: guaranteed tail energy at T[n]
  double T_inf = 0;           // limit of the ladder; blowup happens by then
};

// Throws std::invalid_argument for r outside the admissible interval.
EnergyLadder energy_ladder(double E0, double r, int n_max);

// ---------------------------------------------------------------------------
// Lyapunov blowup criterion for weak dissipation

struct LyapunovCriterion {
  double alpha = 0, alpha_tilde = 0, gamma = 0, nu = 0;
  bool applicable = false;  // alpha_tilde < 1/3 and 0 < gamma < 1 - 3 alpha_tilde
  double r = 0;             // quadratic-form coefficient of H_gamma
  double eps = 0;           // 2 - 6 alpha_tilde - 2 gamma
  double sandwich_hi = 0;   // r + 1/2 + 3^{-gamma}/2
  double kappa = 0;         // dH/dt >= 2 kappa H^{3/2} above the threshold
  double C = 0;             // dissipation comparison constant sup_n g(n)
  double C_tilde_sq = 0;    // threshold coefficient: need H(0) >= C_tilde_sq nu^2
  double H0 = 0;            // H_gamma of the supplied data
  double threshold = 0;     // C_tilde_sq nu^2
  bool triggered = false;   // applicable and H0 >= threshold
  double T_bound = 0;       // 1 / (kappa sqrt(H0)) when triggered
};

LyapunovCriterion hypo_lyapunov_criterion(const Model& model,
                                          const std::vector<double>& psi0,
                                          double gamma);

// Barrier H0 / (1 - kappa t sqrt(H0))^2; +inf at and past the pole.
double lyapunov_barrier(double H0, double kappa, double t);

// Analytic dH_gamma/dt along the flow: grad H . rhs(psi).
double lyapunov_rate(const Model& model,
                     const Eigen::Ref<const Eigen::VectorXd>& psi,
                     double gamma);

// ---------------------------------------------------------------------------
// Per-sample functionals

// Velocity-gradient coefficient at the origin: grad u(0) = lambda M with
// M = [[0,-1,-1],[-1,0,-1],[-1,-1,0]],
//   lambda = 12 sqrt2 pi sum_n psi_n 3^{n/2} (1 + (2/3)(3/4)^n)^{-1/2}.
double origin_strain_coefficient(const Eigen::Ref<const Eigen::VectorXd>& psi);

// sup_n 3^{n/2} psi_n, the weight appearing in the regularity criterion.
double weighted_sup(const Eigen::Ref<const Eigen::VectorXd>& psi);

struct DiagnosticsRow {
  double t = 0;
  double E0 = 0;             // total shell energy sum psi^2
  double h1 = 0;             // ||psi||_{H^1} = sqrt(sum 3^n psi^2)
  double H_gamma = 0;
  double lambda_origin = 0;
  double sup_weighted = 0;
  double E_top = 0;           // truncation-shell energy
  double diss_integral = 0;   // integral of sum d_n psi_n^2 (0 if untracked)
};

DiagnosticsRow diagnostics_row(double t,
                               const Eigen::Ref<const Eigen::VectorXd>& psi,
                               double gamma, double diss_integral = 0.0);

// Rows for every stored sample.  Spectral trajectories are reduced to shell
// coefficients when the symmetry holds; otherwise the psi-based entries are
// NaN and only the norm-based ones (E0, E_top, diss_integral) are filled.
std::vector<DiagnosticsRow> trajectory_diagnostics(const Trajectory& traj,
                                                   double gamma);

// ---------------------------------------------------------------------------
// CSV serialization: t, psi_0..psi_N, E0, h1, H_gamma, lambda_origin,
// sup_weighted -- every value printed with %.17g (lossless round trip).

void write_trajectory_csv(const std::string& path, const Trajectory& traj,
                          double gamma);

struct CsvTrajectory {
  int N = 0;
  std::vector<double> t;
  std::vector<Eigen::VectorXd> psi;
  std::vector<DiagnosticsRow> rows;
};

// Throws std::runtime_error naming the offending line on malformed input.
CsvTrajectory read_trajectory_csv(const std::string& path);

}  // namespace cascade

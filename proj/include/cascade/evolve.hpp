#pragma once

// Time integration for the shell system and the full spectral system.
//
// Both systems have the form  y' = -D y + f(y)  with a constant diagonal
// dissipation D >= 0 and a quadratic f.  The stepper is an explicit
// Dormand-Prince 5(4) pair applied in integrating-factor (Lawson) variables:
// stage states are propagated with exact factors exp(-D theta h), so stiff
// dissipation never limits the step size and the undamped path (D = 0)
// reduces to the classical pair.  Step control is the standard PI controller
// of the DOPRI5 code.  Alongside the state an extra quadrature channel
// integrates the dissipation functional, which makes the energy balance
//   E(t) + 2 nu integral = E(0)
// checkable to integrator accuracy.
//
// Each accepted sample stores the exact derivative, so trajectories support
// cubic Hermite evaluation between samples.

#include <functional>
#include <string>
#include <vector>

#include "cascade/dyadic.hpp"

namespace cascade {

struct SimConfig {
  double t_end = 1.0;
  double rtol = 1e-10;
  double atol = 1e-12;
  double dt_init = 0.0;         // 0 = choose automatically
  double dt_min_factor = 1e-14; // underflow cut: dt_min = factor * max(1, t_end)
  long max_steps = 50000000;    // attempted steps (accepted + rejected)
  int store_every = 1;          // keep every k-th accepted sample
  double blowup_threshold = 1e10;  // on the growth norm; <= 0 disables
};

enum class Termination { ReachedEnd, Blowup, StepUnderflow, StepBudget };

std::string termination_name(Termination t);

struct Trajectory {
  std::vector<double> t;
  std::vector<Eigen::VectorXd> y;   // state: shell coefficients, or packed field
  std::vector<Eigen::VectorXd> dy;  // exact derivative at the sample
  std::vector<double> growth;      // growth norm per sample
  std::vector<double> diss;        // integral of the dissipation functional

  Termination termination = Termination::ReachedEnd;
  long accepted = 0;
  long rejected = 0;
  long rhs_evals = 0;

  bool galerkin = false;  // payload layout of y
  int N = 0;              // highest shell
  Model model;

  double t_final() const { return t.empty() ? 0.0 : t.back(); }
};

// Cubic Hermite interpolation between stored samples (clamped to the range).
Eigen::VectorXd trajectory_state_at(const Trajectory& traj, double time);

// Shell system: psi' = -nu d psi + flux(psi).  Growth norm: ||psi||_{H^1}.
Trajectory integrate_dyadic(const Model& model, const std::vector<double>& psi0,
                            const SimConfig& cfg);

// Full system over positive-shell coefficients.  State packing: component
// 2 (6 n + slot) holds Re c, the next one Im c.  Growth norm: the Sobolev
// norm at the exponent matching the shell-side H^1.
Trajectory integrate_galerkin(const Model& model, const SpectralField& u0,
                              const SimConfig& cfg);

Eigen::VectorXd pack_galerkin(const SpectralField& u);
SpectralField unpack_galerkin(const Eigen::Ref<const Eigen::VectorXd>& y, int N);

// ---------------------------------------------------------------------------
// A posteriori detection of finite-time blowup from a growth-norm history.
//
// Fits log g = c - p log(T - t) over the last decade of growth, with the
// blowup time found by a scan plus golden-section refinement of the
// least-squares residual.

struct BlowupReport {
  bool detected = false;
  double T = 0;              // estimated singular time
  double exponent = 0;       // p
  double log_amplitude = 0;  // c
  double rms_residual = 0;   // in log units, over the fit window
  double growth_decades = 0;
  size_t window_begin = 0, window_end = 0;  // [begin, end) sample indices
  std::string note;
};

BlowupReport detect_blowup(const std::vector<double>& t,
                           const std::vector<double>& g);

// Runs the fit on a trajectory's growth history, discarding the saturated
// regime where the truncation shell holds more than 1e-3 of the energy.
BlowupReport detect_blowup(const Trajectory& traj);

}  // namespace cascade

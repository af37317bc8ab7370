#pragma once

// The scalar shell system obtained by restricting the velocity equation to
// fully symmetric fields (one real coefficient psi_n per shell):
//
//   d/dt psi_n = -nu d_n psi_n + attack(n) psi_{n-1}^2 - drain(n) psi_n psi_{n+1},
//
// with attack(n) = drain(n-1), attack(0) = 0, and the dissipation weight
//   d_n(alpha) = (4 pi^2 (3 4^n + 2 3^n))^alpha,
// the alpha-th power of the exact Laplacian symbol on shell n.  Truncating at
// shell N (psi_{N+1} = 0) preserves the quadratic first integral sum psi_n^2
// exactly: the flux terms telescope.

#include <string>
#include <vector>

#include <Eigen/Dense>

#include "cascade/bilinear.hpp"

namespace cascade {

struct Model {
  double nu = 0.0;     // dissipation strength; 0 recovers the ideal system
  double alpha = 0.0;  // dissipation exponent (1 = full Laplacian)
};

// (4 pi^2 |k|^2)^alpha on shell n.
double dissipation_weight(int n, double alpha);

// Shell system truncated at shell N with coefficient arrays precomputed.
class DyadicSystem {
 public:
  DyadicSystem(Model model, int N);

  const Model& model() const { return model_; }
  int n_max() const { return N_; }
  const Eigen::ArrayXd& attack() const { return attack_; }
  const Eigen::ArrayXd& drain() const { return drain_; }
  const Eigen::ArrayXd& dissipation() const { return diss_; }  // nu d_n

  // Full right-hand side (dissipation included).
  void rhs(const Eigen::Ref<const Eigen::VectorXd>& psi,
           Eigen::Ref<Eigen::VectorXd> out) const;
  // Flux terms only; the integrating-factor integrator supplies dissipation.
  void rhs_nonlinear(const Eigen::Ref<const Eigen::VectorXd>& psi,
                     Eigen::Ref<Eigen::VectorXd> out) const;

 private:
  Model model_;
  int N_;
  Eigen::ArrayXd attack_, drain_, diss_;
};

std::vector<double> dyadic_rhs(const Model& model, const std::vector<double>& psi);

// E_n = sum_{m >= n} psi_m^2.
double shell_energy(const std::vector<double>& psi, int n);

// d/dt E_n = 2 attack(n) psi_{n-1}^2 psi_n - 2 nu sum_{m >= n} d_m psi_m^2:
// the flux arriving from shell n-1 minus the dissipation above the cut.
double shell_energy_rate(const Model& model, const std::vector<double>& psi, int n);

struct LyapunovValue {
  double H = 0;      // sum_n 3^{gamma n} (r psi_n^2 + psi_n psi_{n+1})
  double r = 0;      // (3/2 + 3^{-1-gamma}) / (2 (3^gamma - 1))
  double gamma = 0;
};

LyapunovValue lyapunov(const Eigen::Ref<const Eigen::VectorXd>& psi,
                       double gamma);
LyapunovValue lyapunov(const std::vector<double>& psi, double gamma);

// Named initial data: "delta0" puts unit mass on shell 0; "geometric:<q>"
// sets psi_n = q^n.  Throws std::invalid_argument on anything else.
std::vector<double> dyadic_preset(const std::string& spec, int N);

}  // namespace cascade

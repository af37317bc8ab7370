#include "cascade/dyadic.hpp"

#include <cmath>

namespace cascade {

double dissipation_weight(int n, double alpha) {
  const double ksq = 3.0 * std::pow(2.0, 2 * n) + 2.0 * std::pow(3.0, n);
  return std::pow(4.0 * M_PI * M_PI * ksq, alpha);
}

DyadicSystem::DyadicSystem(Model model, int N) : model_(model), N_(N) {
  if (N < 0) throw std::invalid_argument("shell system needs N >= 0");
  attack_.resize(N + 1);
  drain_.resize(N + 1);
  diss_.resize(N + 1);
  for (int n = 0; n <= N; ++n) {
    const auto rc = reduced_coefficients(n);
    attack_[n] = rc.attack;
    drain_[n] = rc.drain;
    diss_[n] = model.nu * dissipation_weight(n, model.alpha);
  }
}

void DyadicSystem::rhs_nonlinear(const Eigen::Ref<const Eigen::VectorXd>& psi,
                                 Eigen::Ref<Eigen::VectorXd> out) const {
  const int N = N_;
  for (int n = 0; n <= N; ++n) {
    double v = 0;
    if (n > 0) v += attack_[n] * psi[n - 1] * psi[n - 1];
    if (n < N) v -= drain_[n] * psi[n] * psi[n + 1];
    out[n] = v;
  }
}

void DyadicSystem::rhs(const Eigen::Ref<const Eigen::VectorXd>& psi,
                       Eigen::Ref<Eigen::VectorXd> out) const {
  rhs_nonlinear(psi, out);
  out.array() -= diss_ * psi.array();
}

std::vector<double> dyadic_rhs(const Model& model, const std::vector<double>& psi) {
  if (psi.empty()) throw std::invalid_argument("empty shell coefficient vector");
  const DyadicSystem sys(model, static_cast<int>(psi.size()) - 1);
  const Eigen::VectorXd x =
      Eigen::Map<const Eigen::VectorXd>(psi.data(), static_cast<long>(psi.size()));
  Eigen::VectorXd out(x.size());
  sys.rhs(x, out);
  return {out.data(), out.data() + out.size()};
}

double shell_energy(const std::vector<double>& psi, int n) {
  double e = 0;
  for (size_t m = static_cast<size_t>(std::max(n, 0)); m < psi.size(); ++m)
    e += psi[m] * psi[m];
  return e;
}

double shell_energy_rate(const Model& model, const std::vector<double>& psi, int n) {
  if (n < 0 || static_cast<size_t>(n) >= psi.size())
    throw std::out_of_range("shell index outside the state");
  double rate = 0;
  if (n > 0) {
    const double attack = reduced_coefficients(n).attack;
    rate += 2.0 * attack * psi[static_cast<size_t>(n - 1)] *
            psi[static_cast<size_t>(n - 1)] * psi[static_cast<size_t>(n)];
  }
  for (size_t m = static_cast<size_t>(n); m < psi.size(); ++m)
    rate -= 2.0 * model.nu * dissipation_weight(static_cast<int>(m), model.alpha) *
            psi[m] * psi[m];
  return rate;
}

LyapunovValue lyapunov(const Eigen::Ref<const Eigen::VectorXd>& psi,
                       double gamma) {
  if (gamma <= 0) throw std::invalid_argument("lyapunov weight needs gamma > 0");
  LyapunovValue out;
  out.gamma = gamma;
  out.r = (1.5 + std::pow(3.0, -1.0 - gamma)) / (2.0 * (std::pow(3.0, gamma) - 1.0));
  for (Eigen::Index n = 0; n < psi.size(); ++n) {
    const double next = n + 1 < psi.size() ? psi[n + 1] : 0.0;
    out.H += std::pow(3.0, gamma * static_cast<double>(n)) *
             (out.r * psi[n] * psi[n] + psi[n] * next);
  }
  return out;
}

LyapunovValue lyapunov(const std::vector<double>& psi, double gamma) {
  return lyapunov(Eigen::Map<const Eigen::VectorXd>(
                      psi.data(), static_cast<Eigen::Index>(psi.size())),
                  gamma);
}

std::vector<double> dyadic_preset(const std::string& spec, int N) {
  if (N < 0) throw std::invalid_argument("preset needs N >= 0");
  std::vector<double> psi(static_cast<size_t>(N) + 1, 0.0);
  if (spec == "delta0") {
    psi[0] = 1.0;
    return psi;
  }
  if (spec.rfind("geometric:", 0) == 0) {
    const double q = std::stod(spec.substr(10));
    double v = 1.0;
    for (auto& p : psi) {
      p = v;
      v *= q;
    }
    return psi;
  }
  throw std::invalid_argument("unknown preset '" + spec +
                              "' (expected delta0 or geometric:<q>)");
}

}  // namespace cascade

#include "cascade/diagnostics.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace cascade {

namespace {

constexpr double kSqrt2 = 1.4142135623730951;
const double kRMax = kSqrt2 / (kSqrt2 + 1.5);

double golden_min(double a, double b, const std::function<double(double)>& f,
                  int iters) {
  const double gr = (std::sqrt(5.0) - 1.0) / 2.0;
  double x1 = b - gr * (b - a), x2 = a + gr * (b - a);
  double f1 = f(x1), f2 = f(x2);
  for (int i = 0; i < iters; ++i) {
    if (f1 <= f2) {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - gr * (b - a);
      f1 = f(x1);
    } else {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + gr * (b - a);
      f2 = f(x2);
    }
  }
  return (a + b) / 2;
}

}  // namespace

double ladder_f(double r) {
  if (!(r > 1.0 / 3.0) || !(r < kRMax))
    throw std::invalid_argument("ladder ratio outside (1/3, sqrt2/(sqrt2+3/2))");
  return r / ((kSqrt2 - (kSqrt2 + 1.5) * r) * (std::sqrt(3.0 * r) - 1.0));
}

BlowupBound euler_blowup_bound(double E0) {
  if (!(E0 > 0)) throw std::invalid_argument("energy must be positive");
  BlowupBound out;
  out.r_star = golden_min(1.0 / 3.0 + 1e-9, kRMax - 1e-9,
                          [](double r) { return ladder_f(r); }, 120);
  out.f_star = ladder_f(out.r_star);
  out.kappa = 3.0 * kSqrt2 / M_PI * out.f_star;
  out.E0 = E0;
  out.T_max = std::sqrt(3.0) / (kSqrt2 * M_PI) * out.f_star / std::sqrt(E0);
  return out;
}

EnergyLadder energy_ladder(double E0, double r, int n_max) {
  if (!(E0 > 0)) throw std::invalid_argument("energy must be positive");
  if (!(r > 1.0 / 3.0) || !(r < kRMax))
    throw std::invalid_argument("ladder ratio outside (1/3, sqrt2/(sqrt2+3/2))");
  if (n_max < 0) throw std::invalid_argument("negative shell count");
  EnergyLadder out;
  out.E0 = E0;
  out.r = r;
  const double pref =
      std::sqrt(r) / (std::sqrt(2.0 * E0) * M_PI * (kSqrt2 - (kSqrt2 + 1.5) * r));
  const double q = 1.0 / std::sqrt(3.0 * r);
  out.T.resize(n_max + 1, 0.0);
  out.floor.resize(n_max + 1, 0.0);
  double partial = 0.0, qpow = 1.0, rpow = 1.0;
  out.floor[0] = E0;
  for (int n = 1; n <= n_max; ++n) {
    partial += qpow;
    qpow *= q;
    rpow *= r;
    out.T[n] = pref * partial;
    out.floor[n] = E0 * rpow;
  }
  out.T_inf = pref / (1.0 - q);
  return out;
}

// ---------------------------------------------------------------------------

LyapunovCriterion hypo_lyapunov_criterion(const Model& model,
                                          const std::vector<double>& psi0,
                                          double gamma) {
  LyapunovCriterion out;
  out.alpha = model.alpha;
  out.nu = model.nu;
  out.gamma = gamma;
  out.alpha_tilde = 2.0 * std::log(2.0) / std::log(3.0) * model.alpha;
  out.applicable = out.alpha_tilde < 1.0 / 3.0 && gamma > 0.0 &&
                   gamma < 1.0 - 3.0 * out.alpha_tilde && model.nu >= 0.0;

  out.r = (1.5 + std::pow(3.0, -1.0 - gamma)) / (2.0 * (std::pow(3.0, gamma) - 1.0));
  {
    const Eigen::Map<const Eigen::VectorXd> psi(psi0.data(),
                                                static_cast<long>(psi0.size()));
    out.H0 = lyapunov(psi, gamma).H;
  }
  if (!out.applicable) {
    const double nan = std::numeric_limits<double>::quiet_NaN();
    out.eps = 2.0 - 6.0 * out.alpha_tilde - 2.0 * gamma;
    out.sandwich_hi = out.r + 0.5 + 0.5 * std::pow(3.0, -gamma);
    out.kappa = out.C = out.C_tilde_sq = out.threshold = out.T_bound = nan;
    return out;
  }

  out.eps = 2.0 - 6.0 * out.alpha_tilde - 2.0 * gamma;
  out.sandwich_hi = out.r + 0.5 + 0.5 * std::pow(3.0, -gamma);
  const double shrink = 1.0 - std::pow(3.0, -out.eps / 2.0);  // 1 - (sqrt3)^-eps
  out.kappa = M_PI * std::sqrt(shrink) / (2.0 * std::pow(out.sandwich_hi, 1.5));

  // Dissipation comparison constant: the weighted Gershgorin row sums of the
  // damping quadratic form relative to the H^{gamma} core of H_gamma, with
  // c_n = (4 pi^2 (3 + 2 (3/4)^n))^alpha the slowly varying part of d_n.
  const auto c = [&](int n) {
    return std::pow(4.0 * M_PI * M_PI * (3.0 + 2.0 * std::pow(0.75, n)),
                    model.alpha);
  };
  const double t3a = std::pow(3.0, out.alpha_tilde);
  double C = 0.0;
  for (int n = 0; n <= 200; ++n) {
    double g = 2.0 * out.r * c(n) + 0.5 * (c(n) + c(n + 1) * t3a);
    if (n > 0)
      g += 0.5 * std::pow(3.0, -gamma) * (c(n - 1) / t3a + c(n));
    C = std::max(C, g);
  }
  out.C = C;
  out.C_tilde_sq = C * C * out.sandwich_hi / (shrink * M_PI * M_PI);
  out.threshold = out.C_tilde_sq * model.nu * model.nu;
  out.triggered = out.H0 >= out.threshold && out.H0 > 0;
  out.T_bound =
      out.triggered ? 1.0 / (out.kappa * std::sqrt(out.H0))
                    : std::numeric_limits<double>::infinity();
  return out;
}

double lyapunov_barrier(double H0, double kappa, double t) {
  const double den = 1.0 - kappa * t * std::sqrt(H0);
  if (den <= 0.0) return std::numeric_limits<double>::infinity();
  return H0 / (den * den);
}

double lyapunov_rate(const Model& model,
                     const Eigen::Ref<const Eigen::VectorXd>& psi,
                     double gamma) {
  const int N = static_cast<int>(psi.size()) - 1;
  const DyadicSystem sys(model, N);
  Eigen::VectorXd f(N + 1);
  sys.rhs(psi, f);
  const double r =
      (1.5 + std::pow(3.0, -1.0 - gamma)) / (2.0 * (std::pow(3.0, gamma) - 1.0));
  double rate = 0.0;
  for (int n = 0; n <= N; ++n) {
    double grad = std::pow(3.0, gamma * n) * 2.0 * r * psi[n];
    if (n + 1 <= N) grad += std::pow(3.0, gamma * n) * psi[n + 1];
    if (n >= 1) grad += std::pow(3.0, gamma * (n - 1)) * psi[n - 1];
    rate += grad * f[n];
  }
  return rate;
}

// ---------------------------------------------------------------------------

double origin_strain_coefficient(const Eigen::Ref<const Eigen::VectorXd>& psi) {
  double acc = 0.0;
  for (int n = 0; n < psi.size(); ++n)
    acc += psi[n] * std::pow(std::sqrt(3.0), n) /
           std::sqrt(1.0 + (2.0 / 3.0) * std::pow(0.75, n));
  return 12.0 * kSqrt2 * M_PI * acc;
}

double weighted_sup(const Eigen::Ref<const Eigen::VectorXd>& psi) {
  double sup = -std::numeric_limits<double>::infinity();
  for (int n = 0; n < psi.size(); ++n)
    sup = std::max(sup, std::pow(std::sqrt(3.0), n) * psi[n]);
  return sup;
}

DiagnosticsRow diagnostics_row(double t,
                               const Eigen::Ref<const Eigen::VectorXd>& psi,
                               double gamma, double diss_integral) {
  DiagnosticsRow row;
  row.t = t;
  row.E0 = psi.squaredNorm();
  double h1sq = 0.0;
  for (int n = 0; n < psi.size(); ++n)
    h1sq += std::pow(3.0, n) * psi[n] * psi[n];
  row.h1 = std::sqrt(h1sq);
  row.H_gamma = lyapunov(psi, gamma).H;
  row.lambda_origin = origin_strain_coefficient(psi);
  row.sup_weighted = weighted_sup(psi);
  row.E_top = psi.size() > 0 ? psi[psi.size() - 1] * psi[psi.size() - 1] : 0.0;
  row.diss_integral = diss_integral;
  return row;
}

namespace {

// Shell reduction of a stored spectral sample; false when the sample does not
// carry the symmetry (tolerance scaled to the largest amplitude).
bool sample_psi(const Trajectory& traj, size_t i, Eigen::VectorXd& psi) {
  if (!traj.galerkin) {
    psi = traj.y[i];
    return true;
  }
  const SpectralField u = unpack_galerkin(traj.y[i], traj.N);
  try {
    const auto p = to_psi(u, 1e-6);
    psi = Eigen::Map<const Eigen::VectorXd>(p.data(), static_cast<long>(p.size()));
    return true;
  } catch (const std::invalid_argument&) {
    return false;
  }
}

}  // namespace

std::vector<DiagnosticsRow> trajectory_diagnostics(const Trajectory& traj,
                                                   double gamma) {
  std::vector<DiagnosticsRow> rows;
  rows.reserve(traj.t.size());
  const double nan = std::numeric_limits<double>::quiet_NaN();
  Eigen::VectorXd psi;
  for (size_t i = 0; i < traj.t.size(); ++i) {
    // The quadrature channel of spectral runs integrates the full-field
    // dissipation norm, 12x the shell-side functional.
    const double diss = traj.galerkin ? traj.diss[i] / 12.0 : traj.diss[i];
    if (sample_psi(traj, i, psi)) {
      rows.push_back(diagnostics_row(traj.t[i], psi, gamma, diss));
      continue;
    }
    DiagnosticsRow row;
    row.t = traj.t[i];
    row.E0 = 2.0 * traj.y[i].squaredNorm() / 12.0;
    row.h1 = row.H_gamma = row.lambda_origin = row.sup_weighted = nan;
    row.E_top = 2.0 * traj.y[i].tail(12).squaredNorm() / 12.0;
    row.diss_integral = diss;
    rows.push_back(row);
  }
  return rows;
}

// ---------------------------------------------------------------------------

void write_trajectory_csv(const std::string& path, const Trajectory& traj,
                          double gamma) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  out << "t";
  for (int n = 0; n <= traj.N; ++n) out << ",psi_" << n;
  out << ",E0,h1,H_gamma,lambda_origin,sup_weighted\n";

  const auto rows = trajectory_diagnostics(traj, gamma);
  const double nan = std::numeric_limits<double>::quiet_NaN();
  Eigen::VectorXd psi;
  char buf[32];
  const auto emit = [&](double v) {
    std::snprintf(buf, sizeof buf, "%.17g", v);
    out << buf;
  };
  for (size_t i = 0; i < traj.t.size(); ++i) {
    emit(traj.t[i]);
    const bool have_psi = sample_psi(traj, i, psi);
    for (int n = 0; n <= traj.N; ++n) {
      out << ',';
      emit(have_psi ? psi[n] : nan);
    }
    const DiagnosticsRow& r = rows[i];
    for (double v : {r.E0, r.h1, r.H_gamma, r.lambda_origin, r.sup_weighted}) {
      out << ',';
      emit(v);
    }
    out << '\n';
  }
  if (!out) throw std::runtime_error("write failed: " + path);
}

CsvTrajectory read_trajectory_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open: " + path);
  std::string line;
  if (!std::getline(in, line))
    throw std::runtime_error(path + ": empty file");

  // Header: t, psi_0..psi_N, then named diagnostic columns.
  std::vector<std::string> header;
  {
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) header.push_back(cell);
  }
  if (header.empty() || header[0] != "t")
    throw std::runtime_error(path + ": first column must be t");
  int N = -1;
  for (size_t c = 1; c < header.size(); ++c) {
    if (header[c] == "psi_" + std::to_string(N + 1)) {
      ++N;
    } else {
      break;
    }
  }
  if (N < 0) throw std::runtime_error(path + ": no psi_<n> columns");

  CsvTrajectory out;
  out.N = N;
  const size_t ncols = header.size();
  size_t lineno = 1;
  std::vector<double> vals(ncols);
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string cell;
    size_t c = 0;
    while (std::getline(ss, cell, ',')) {
      if (c >= ncols)
        throw std::runtime_error(path + ": too many columns on line " +
                                 std::to_string(lineno));
      try {
        vals[c] = std::stod(cell);
      } catch (const std::exception&) {
        throw std::runtime_error(path + ": bad number '" + cell + "' on line " +
                                 std::to_string(lineno));
      }
      ++c;
    }
    if (c != ncols)
      throw std::runtime_error(path + ": expected " + std::to_string(ncols) +
                               " columns on line " + std::to_string(lineno));
    out.t.push_back(vals[0]);
    Eigen::VectorXd psi(N + 1);
    for (int n = 0; n <= N; ++n) psi[n] = vals[1 + n];
    out.psi.push_back(psi);
    DiagnosticsRow row;
    row.t = vals[0];
    row.E_top = psi[N] * psi[N];
    for (size_t c2 = N + 2; c2 < ncols; ++c2) {
      const std::string& name = header[c2];
      if (name == "E0") row.E0 = vals[c2];
      else if (name == "h1") row.h1 = vals[c2];
      else if (name == "H_gamma") row.H_gamma = vals[c2];
      else if (name == "lambda_origin") row.lambda_origin = vals[c2];
      else if (name == "sup_weighted") row.sup_weighted = vals[c2];
    }
    out.rows.push_back(row);
  }
  return out;
}

}  // namespace cascade

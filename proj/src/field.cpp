#include "cascade/field.hpp"

#include <algorithm>
#include <cmath>

namespace cascade {

SpectralField::SpectralField(int n_max) : N(n_max) {
  if (n_max < 0) throw std::invalid_argument("field needs at least shell 0");
  amps.assign(static_cast<size_t>(n_max) + 1, {});
  table = shell_table(n_max);
}

double SpectralField::max_amp() const {
  double m = 0;
  for (const auto& sh : amps)
    for (const auto& c : sh) m = std::max(m, std::abs(c));
  return m;
}

SpectralField project_M(const std::vector<RawMode>& modes, int N) {
  SpectralField out(N);
  std::vector<std::array<Complex, 6>> plus(out.amps.size()), minus(out.amps.size());
  std::vector<std::array<bool, 6>> has_plus(out.amps.size(), std::array<bool, 6>{}),
      has_minus(out.amps.size(), std::array<bool, 6>{});
  for (const auto& mode : modes) {
    const auto mem = classify(mode.k);
    if (!mem || mem->shell > N) continue;
    const int n = mem->shell;
    const Vec3 kp = mem->sign > 0 ? mode.k : -mode.k;
    const int slot = out.table->find_slot(n, kp);
    const Eigen::Vector3d v = out.table->entry(n, slot).dir.v;
    const Complex c = v.cast<Complex>().dot(mode.u);
    auto& bucket = mem->sign > 0 ? plus : minus;
    auto& flag = mem->sign > 0 ? has_plus : has_minus;
    bucket[static_cast<size_t>(n)][static_cast<size_t>(slot)] += c;
    flag[static_cast<size_t>(n)][static_cast<size_t>(slot)] = true;
  }
  for (size_t n = 0; n < out.amps.size(); ++n) {
    for (size_t i = 0; i < 6; ++i) {
      const bool p = has_plus[n][i], m = has_minus[n][i];
      if (p && m)
        out.amps[n][i] = (plus[n][i] + std::conj(minus[n][i])) / 2.0;
      else if (p)
        out.amps[n][i] = plus[n][i];
      else if (m)
        out.amps[n][i] = std::conj(minus[n][i]);
    }
  }
  return out;
}

double sobolev_norm(const SpectralField& u, double s) {
  double sum = 0;
  for (int n = 0; n <= u.N; ++n) {
    const double ksq = 3.0 * std::pow(2.0, 2 * n) + 2.0 * std::pow(3.0, n);
    const double weight = std::pow(4.0 * M_PI * M_PI * ksq, s);
    double shell = 0;
    for (const auto& c : u.amps[static_cast<size_t>(n)]) shell += std::norm(c);
    sum += 2.0 * weight * shell;  // both halves of the lattice
  }
  return std::sqrt(sum);
}

double dyadic_norm(const std::vector<double>& psi, double s) {
  double sum = 0;
  for (size_t n = 0; n < psi.size(); ++n)
    sum += std::pow(3.0, s * static_cast<double>(n)) * psi[n] * psi[n];
  return std::sqrt(sum);
}

NormEquivalence norm_equivalence_check(const std::vector<double>& psi, double s) {
  NormEquivalence out;
  out.s = s;
  out.s_tilde = 2.0 * std::log(2.0) / std::log(3.0) * s;
  const double hs = sobolev_norm(from_psi(psi), s);
  out.sobolev_sq = hs * hs;
  const double shell = dyadic_norm(psi, out.s_tilde);
  const double a = std::pow(12.0 * M_PI * M_PI, s), b = std::pow(20.0 * M_PI * M_PI, s);
  out.lower = 12.0 * std::min(a, b) * shell * shell;
  out.upper = 12.0 * std::max(a, b) * shell * shell;
  const double slack = 1e-12 * std::max(1.0, out.upper);
  out.ok = out.lower <= out.sobolev_sq + slack && out.sobolev_sq <= out.upper + slack;
  return out;
}

SymmetryReport symmetry_classify(const SpectralField& u, double tol) {
  SymmetryReport rep;
  rep.scale = u.max_amp();
  const double scale = rep.scale > 0 ? rep.scale : 1.0;

  double min_im = 0;
  bool have_min = false;
  for (int n = 0; n <= u.N; ++n) {
    const auto& sh = u.amps[static_cast<size_t>(n)];
    // Oddness: purely imaginary coefficients.
    for (const auto& c : sh) rep.dev_odd = std::max(rep.dev_odd, std::abs(c.real()));

    // Orbit constancy and the parity between the two odd-shell orbits.
    Complex mean_h = 0, mean_j = 0;
    int cnt_h = 0, cnt_j = 0;
    for (int i = 0; i < 6; ++i) {
      const auto& e = u.table->entry(n, i);
      if (n % 2 == 0 || e.kind == Kind::H) {
        mean_h += sh[static_cast<size_t>(i)];
        ++cnt_h;
      } else {
        mean_j += sh[static_cast<size_t>(i)];
        ++cnt_j;
      }
    }
    mean_h /= static_cast<double>(cnt_h);
    if (cnt_j > 0) mean_j /= static_cast<double>(cnt_j);
    for (int i = 0; i < 6; ++i) {
      const auto& e = u.table->entry(n, i);
      const Complex mean = (n % 2 == 0 || e.kind == Kind::H) ? mean_h : mean_j;
      rep.dev_perm =
          std::max(rep.dev_perm, std::abs(sh[static_cast<size_t>(i)] - mean));
    }
    if (n % 2 == 1) rep.dev_hj = std::max(rep.dev_hj, std::abs(mean_h - mean_j));

    // Mirror symmetry u(x) = M u(M x): c_k = -conj(c_{k''}).
    for (int i = 0; i < 6; ++i) {
      const int mi = u.table->mirror_slot(n, i);
      rep.dev_mirror = std::max(
          rep.dev_mirror, std::abs(sh[static_cast<size_t>(i)] +
                                   std::conj(sh[static_cast<size_t>(mi)])));
    }

    const double im_mean =
        n % 2 == 0 ? mean_h.imag() : 0.5 * (mean_h.imag() + mean_j.imag());
    min_im = have_min ? std::min(min_im, im_mean) : im_mean;
    have_min = true;
  }

  rep.dev_odd /= scale;
  rep.dev_perm /= scale;
  rep.dev_hj /= scale;
  rep.dev_mirror /= scale;
  rep.odd = rep.dev_odd <= tol;
  rep.perm_symmetric = rep.dev_perm <= tol;
  rep.hj_parity = rep.perm_symmetric && rep.dev_hj <= tol;
  rep.sigma_mirror = rep.dev_mirror <= tol;
  rep.coefficient_positive =
      rep.odd && rep.hj_parity && min_im >= -tol * scale;
  return rep;
}

SpectralField from_psi(const std::vector<double>& psi) {
  if (psi.empty()) throw std::invalid_argument("empty shell coefficient vector");
  SpectralField out(static_cast<int>(psi.size()) - 1);
  for (size_t n = 0; n < psi.size(); ++n)
    out.amps[n].fill(Complex(0.0, psi[n]));
  return out;
}

std::vector<double> to_psi(const SpectralField& u, double tol) {
  const double scale = u.max_amp() > 0 ? u.max_amp() : 1.0;
  std::vector<double> psi(static_cast<size_t>(u.N) + 1);
  for (int n = 0; n <= u.N; ++n) {
    const auto& sh = u.amps[static_cast<size_t>(n)];
    Complex mean_h = 0, mean_j = 0;
    int cnt_h = 0, cnt_j = 0;
    for (int i = 0; i < 6; ++i) {
      if (std::abs(sh[static_cast<size_t>(i)].real()) > tol * scale)
        throw std::invalid_argument("field is not odd at shell " + std::to_string(n));
      const auto& e = u.table->entry(n, i);
      if (n % 2 == 0 || e.kind == Kind::H) {
        mean_h += sh[static_cast<size_t>(i)];
        ++cnt_h;
      } else {
        mean_j += sh[static_cast<size_t>(i)];
        ++cnt_j;
      }
    }
    mean_h /= static_cast<double>(cnt_h);
    if (cnt_j > 0) mean_j /= static_cast<double>(cnt_j);
    for (int i = 0; i < 6; ++i) {
      const auto& e = u.table->entry(n, i);
      const Complex mean = (n % 2 == 0 || e.kind == Kind::H) ? mean_h : mean_j;
      if (std::abs(sh[static_cast<size_t>(i)] - mean) > tol * scale)
        throw std::invalid_argument("field is not permutation-symmetric at shell " +
                                    std::to_string(n));
    }
    if (n % 2 == 1 && std::abs(mean_h - mean_j) > tol * scale)
      throw std::invalid_argument("orbit parity broken at shell " + std::to_string(n));
    psi[static_cast<size_t>(n)] =
        n % 2 == 0 ? mean_h.imag() : 0.5 * (mean_h.imag() + mean_j.imag());
  }
  return psi;
}

double helicity(const SpectralField& u) {
  double h = 0;
  for (int n = 0; n <= u.N; ++n) {
    for (int i = 0; i < 6; ++i) {
      const auto& e = u.table->entry(n, i);
      const Eigen::Vector3cd uk =
          u.amp(n, i) * e.dir.v.cast<Complex>();
      const Eigen::Vector3cd curl =
          Complex(0.0, 2.0 * M_PI) * e.k.to_double().cast<Complex>().cross(uk);
      h += 2.0 * uk.dot(curl).real();  // Eigen dot conjugates the left factor
    }
  }
  return h;
}

}  // namespace cascade

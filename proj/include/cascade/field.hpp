#pragma once

// Divergence-free velocity fields supported on the constraint lattice.
//
// Every admissible field is determined by one complex coefficient per
// positive-shell frequency:  u^(k) = c_k v^k  and  u^(-k) = conj(c_k) v^k,
// where v^k is the unit constraint direction (v^{-k} = v^k).  Fields with the
// full odd + permutation + orbit-parity symmetry reduce to one real number
// per shell, psi_n >= 0, via c_k = i psi_n on every slot of shell n.

#include <complex>
#include <vector>

#include <Eigen/Dense>

#include "cascade/lattice.hpp"

namespace cascade {

using Complex = std::complex<double>;

struct SpectralField {
  int N = 0;  // highest retained shell
  std::vector<std::array<Complex, 6>> amps;  // amps[n][slot], slots as in ShellTable
  std::shared_ptr<const ShellTable> table;   // covers shells 0..N (possibly deeper)

  SpectralField() = default;
  explicit SpectralField(int n_max);

  Complex& amp(int n, int slot) { return amps[static_cast<size_t>(n)][static_cast<size_t>(slot)]; }
  Complex amp(int n, int slot) const { return amps[static_cast<size_t>(n)][static_cast<size_t>(slot)]; }

  // Largest |c_k|; the reference scale for symmetry tolerances.
  double max_amp() const;
};

// One explicitly-given Fourier mode; k need not lie on the lattice and the
// amplitude need not be orthogonal to k.
struct RawMode {
  Vec3 k;
  Eigen::Vector3cd u;
};

// Orthogonal projection onto the admissible space: drops frequencies off the
// lattice or above shell N, projects amplitudes onto the constraint
// direction, and symmetrizes the two halves so the result is a real field
// (c_k <- (c_k + conj(c_{-k})) / 2 when both signs are supplied).  Duplicate
// modes accumulate before symmetrization.
SpectralField project_M(const std::vector<RawMode>& modes, int N);

// || u ||_{H^s}^2 = sum over both halves of (4 pi^2 |k|^2)^s |u^(k)|^2;
// s = 0 gives the squared L^2 norm.  Returns the norm itself.
double sobolev_norm(const SpectralField& u, double s);

// || psi ||_{H^s}^2 = sum_n 3^{s n} psi_n^2, the shell-weighted side of the
// norm equivalence.  Returns the norm itself.
double dyadic_norm(const std::vector<double>& psi, double s);

struct NormEquivalence {
  double sobolev_sq = 0;  // ||u||_{H^s}^2 with u built from psi
  double lower = 0;       // 12 min((12 pi^2)^s, (20 pi^2)^s) ||psi||^2_{H^st}
  double upper = 0;       // 12 max(...) ||psi||^2_{H^st}
  double s = 0;
  double s_tilde = 0;     // (2 log 2 / log 3) s
  bool ok = false;
};

// Checks the two-sided comparison between the physical Sobolev norm and the
// shell norm with the rescaled index s~ = (2 log2 / log3) s.
NormEquivalence norm_equivalence_check(const std::vector<double>& psi, double s);

struct SymmetryReport {
  bool odd = false;             // u(-x) = -u(x): all coefficients imaginary
  bool perm_symmetric = false;  // coefficients constant on permutation orbits
  bool hj_parity = false;       // the two odd-shell orbits carry equal means
  bool sigma_mirror = false;    // c_k = -conj(c_{k''}), k'' = 2^{n+1} s - k
  bool coefficient_positive = false;  // odd+perm+parity with Im c >= 0
  double dev_odd = 0;           // max |Re c| / scale
  double dev_perm = 0;          // max orbit spread / scale
  double dev_hj = 0;            // max |mean_H - mean_J| / scale
  double dev_mirror = 0;        // max |c_k + conj(c_{k''})| / scale
  double scale = 0;             // max |c| over the field
};

SymmetryReport symmetry_classify(const SpectralField& u, double tol = 1e-10);

// Fully symmetric field with c_k = i psi_n on every slot of shell n.
SpectralField from_psi(const std::vector<double>& psi);

// Inverse of from_psi; throws std::invalid_argument (naming the first
// offending shell) when the field lacks the required symmetry within tol.
std::vector<double> to_psi(const SpectralField& u, double tol = 1e-10);

// sum_k u^(k) . conj(curl^(k)); identically zero on the constrained space,
// so the returned value is a pure round-off diagnostic.
double helicity(const SpectralField& u);

}  // namespace cascade

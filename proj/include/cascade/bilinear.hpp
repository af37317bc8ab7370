#pragma once

// The advection bilinear form restricted to the constraint lattice.
//
// For admissible fields the projected advection operator
//   A(u, w) = P_M ( (w . grad) u + (u . grad) w )
// couples only frequency pairs whose sum lands back on the lattice, i.e.
// adjacent shells.  The evolution operator is B(u, w) = -A(u, w) / 2, so the
// equations of motion read  d/dt u = B(u, u) - nu dissipation.
//
// Two independent evaluation paths are provided:
//   * advect_project: a direct convolution over explicitly listed modes,
//     with no structural assumptions -- the reference oracle;
//   * bilinear_B: a precomputed interaction table over positive-shell
//     coefficients, the fast path used by the integrators.
//
// Single-mode interactions have closed-form amplitudes governed by
//   a_m = sqrt(6) pi 3^m (1 + (3/4)^{2m}/2)^{-1/2}   (even-shell output)
//   b_m = sqrt(2) pi 3^{m+1} (1 + 3 (3/4)^{2m}/8)^{-1/2}  (odd-shell output)
// and verify_interaction_closed_forms checks the convolution against them,
// including exact-rational identities for the squared amplitudes.

#include <complex>
#include <vector>

#include "cascade/field.hpp"

namespace cascade {

// ---------------------------------------------------------------------------
// Reference oracle on explicit mode lists

struct SignedMode {
  Vec3 k;               // any integer frequency, either sign
  Eigen::Vector3cd u;   // full complex amplitude vector
};

using ModeList = std::vector<SignedMode>;

// P_M((w.grad)u + (u.grad)w) over explicit modes.  Output frequency k gets
//   2 pi i sum_{j+l=k} [ (w^(j).l) u^(l) + (u^(j).l) w^(l) ]
// projected onto the constraint line of k; off-lattice sums are dropped.
// No reality or admissibility is assumed of the inputs.  Deterministic
// (lexicographic) output ordering; duplicate input frequencies are allowed.
ModeList advect_project(const ModeList& u, const ModeList& w);

// ---------------------------------------------------------------------------
// Interaction table over positive-shell coefficients

struct InteractionRow {
  int j_shell, j_slot;  // gradient-carrying factor, positive representative
  int l_shell, l_slot;  // advected factor
  bool j_conj, l_conj;  // true when the mode sits on the mirror half
  int out_shell, out_slot;
  double G;  // s_l (v^p . q)(v^q . v^out), computed in exact arithmetic
};

class InteractionTable {
 public:
  // All ordered signed source pairs from shells <= n_in whose sum lands on a
  // positive shell <= n_out.
  InteractionTable(int n_in, int n_out);

  int n_in() const { return n_in_; }
  int n_out() const { return n_out_; }
  const std::vector<InteractionRow>& rows() const { return rows_; }

 private:
  int n_in_, n_out_;
  std::vector<InteractionRow> rows_;
};

// Process-wide cache of immutable tables.
std::shared_ptr<const InteractionTable> interaction_table(int n_in, int n_out);

// B(u, w) with output truncated at shell n_out; the two-argument overload
// truncates at max(u.N, w.N), which is the Galerkin closure.
SpectralField bilinear_B(const SpectralField& u, const SpectralField& w, int n_out);
SpectralField bilinear_B(const SpectralField& u, const SpectralField& w);

// ---------------------------------------------------------------------------
// Closed-form single-mode amplitudes

struct InteractionCoefficients {
  double a;  // coupling into the even shell 2m (and out of 2m+1)
  double b;  // coupling into the odd shell 2m+1 (and out of 2m+2)
};

InteractionCoefficients interaction_coefficients(int m);

// Shell-indexed aliases of the same numbers: attack(n) feeds shell n from
// below (zero at n = 0) and drain(n) = attack(n+1) feeds shell n+1 from n.
struct ReducedCoefficients {
  double attack;
  double drain;
};

ReducedCoefficients reduced_coefficients(int n);

// ---------------------------------------------------------------------------
// Verification of the nine single-mode interaction classes

struct InteractionCaseResult {
  int m = 0;
  int case_id = 0;        // 1..9
  Vec3 out;               // expected output frequency
  Complex expect_amp;     // expected coefficient on the constraint line
  double oracle_rel_err = 0;
  double table_rel_err = 0;
  double spurious_rel = 0;    // largest stray on-lattice output
  bool square_exact = false;  // exact-rational identity for the amplitude^2
};

struct InteractionReport {
  bool ok = true;
  int max_m = 0;
  double tol = 0;
  std::vector<InteractionCaseResult> cases;
  std::vector<std::string> failures;

  void fail(std::string msg) {
    ok = false;
    failures.push_back(std::move(msg));
  }
};

// For every generation m <= max_m, drives unit two-mode inputs through the
// convolution oracle and the interaction table and compares both against the
// closed-form output amplitude; additionally checks the squared amplitude as
// an identity between exact rationals.
InteractionReport verify_interaction_closed_forms(int max_m, double tol = 1e-12);

// ---------------------------------------------------------------------------
// Randomized operator-norm probe

struct BilinearEstimate {
  double max_ratio = 0;
  double mean_ratio = 0;
  int trials = 0;
  int N = 0;
  double s = 0;
};

// Ratio ||B(u,w)||_{H^s} / (||u||_{H^r} ||w||_{H^r}) with r = s/2 + log3/(4 log2)
// over random admissible fields; the output keeps one shell above the inputs.
BilinearEstimate estimate_bilinear_constant(int N, double s, int trials,
                                            uint64_t seed);

}  // namespace cascade

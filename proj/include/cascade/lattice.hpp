#pragma once

// Exact-arithmetic layer for the constrained frequency lattice.
//
// The lattice is generated from three families of integer frequencies
//   k_m = 2^{2m} s + 3^m ( 1, 0,-1)
//   h_m = 2^{2m+1} s + 3^m ( 1, 1,-2)
//   j_m = 2^{2m+1} s + 3^m ( 2,-1,-1)
// with s = (1,1,1).  Shell n holds the permutation orbit of k_{n/2} (n even)
// or of h_m and j_m with m = (n-1)/2 (n odd); the negatives form the mirror
// half.  Every member of shell n satisfies, as exact integers,
//   s.k = 3*2^n   and   |k|^2 = 3*2^{2n} + 2*3^n.
// Components grow like 2^{2m}, so all arithmetic here is 128-bit or exact
// rational; floating point enters only in the cached unit direction vectors.

#include <array>
#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <boost/multiprecision/cpp_int.hpp>

namespace cascade {

using Int = __int128;
using BigInt = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;

// Shells above this would overflow the 128-bit |k|^2 computation.
inline constexpr int kMaxShell = 62;

BigInt to_big(Int x);
double to_double(const Rational& q);
std::string to_string(Int x);

// ---------------------------------------------------------------------------
// Integer 3-vectors

struct Vec3 {
  std::array<Int, 3> c{0, 0, 0};

  Vec3() = default;
  Vec3(Int a, Int b, Int d) : c{a, b, d} {}

  Int operator[](int i) const { return c[static_cast<size_t>(i)]; }
  Int& operator[](int i) { return c[static_cast<size_t>(i)]; }

  friend Vec3 operator+(const Vec3& a, const Vec3& b) {
    return {a.c[0] + b.c[0], a.c[1] + b.c[1], a.c[2] + b.c[2]};
  }
  friend Vec3 operator-(const Vec3& a, const Vec3& b) {
    return {a.c[0] - b.c[0], a.c[1] - b.c[1], a.c[2] - b.c[2]};
  }
  friend Vec3 operator-(const Vec3& a) { return {-a.c[0], -a.c[1], -a.c[2]}; }
  friend Vec3 operator*(Int s, const Vec3& a) {
    return {s * a.c[0], s * a.c[1], s * a.c[2]};
  }
  friend bool operator==(const Vec3& a, const Vec3& b) { return a.c == b.c; }
  friend bool operator!=(const Vec3& a, const Vec3& b) { return a.c != b.c; }
  // Lexicographic component order; used for all deterministic enumerations.
  friend bool operator<(const Vec3& a, const Vec3& b) { return a.c < b.c; }

  Eigen::Vector3d to_double() const {
    return {static_cast<double>(c[0]), static_cast<double>(c[1]),
            static_cast<double>(c[2])};
  }
  std::string str() const;
};

inline Int dot(const Vec3& a, const Vec3& b) {
  return a.c[0] * b.c[0] + a.c[1] * b.c[1] + a.c[2] * b.c[2];
}
inline Int norm_sq(const Vec3& a) { return dot(a, a); }

inline const Vec3 kSigma{1, 1, 1};

// ---------------------------------------------------------------------------
// Permutations of the three coordinates: (P v)[i] = v[p[i]].
// Fixed enumeration, lexicographic in the index arrays.

using Perm = std::array<int, 3>;

inline constexpr std::array<Perm, 6> kPerms = {{{0, 1, 2},
                                                {0, 2, 1},
                                                {1, 0, 2},
                                                {1, 2, 0},
                                                {2, 0, 1},
                                                {2, 1, 0}}};
inline constexpr int kPermId = 0;   // identity
inline constexpr int kPerm23 = 1;   // swap axes 2,3
inline constexpr int kPerm12 = 2;   // swap axes 1,2
inline constexpr int kPerm13 = 5;   // swap axes 1,3

Vec3 permute(const Perm& p, const Vec3& v);
Eigen::Vector3d permute(const Perm& p, const Eigen::Vector3d& v);

// ---------------------------------------------------------------------------
// Classification

enum class Kind { K, H, J };

char kind_char(Kind k);

struct Membership {
  int sign = +1;   // +1 for the positive half, -1 for its mirror
  int shell = 0;   // n >= 0
  Kind kind = Kind::K;
  int perm = 0;    // smallest permutation id mapping the canonical
                   // representative onto sign*k
};

// k_m, h_m or j_m.  Shell index is 2m for K and 2m+1 for H/J; throws
// std::overflow_error past the exact-arithmetic capacity (shell > kMaxShell).
Vec3 canonical_frequency(Kind kind, int m);
int shell_of(Kind kind, int m);
int generation_of(int shell);  // m with shell = 2m or 2m+1

// Total decision procedure; nullopt for frequencies outside the lattice.
// Inputs must have |components| < 2^62 (always true for lattice sums).
std::optional<Membership> classify(const Vec3& k);

// ---------------------------------------------------------------------------
// Constraint directions
//
// w^k = s - (s.k / |k|^2) k  is the unnormalized projection of s = (1,1,1)
// orthogonal to k, kept as exact rationals; v^k = w^k / |w^k| in doubles.
// v^{P k} = P v^k and v^{-k} = v^k.

struct ConstraintDirection {
  Eigen::Vector3d v = Eigen::Vector3d::Zero();  // unit direction
  std::array<Rational, 3> w;                    // exact unnormalized direction
  Rational norm_sq;                             // |w|^2, exact
};

// Accepts any member of the lattice (either sign); rejects everything else.
ConstraintDirection constraint_direction(const Vec3& k);

// ---------------------------------------------------------------------------
// Shell table

struct ShellEntry {
  Vec3 k;
  Kind kind = Kind::K;
  int perm = 0;
  ConstraintDirection dir;
};

// The 6 members of the positive half of shell n, in lexicographic order.
std::array<Vec3, 6> shell_frequencies(int n);

class ShellTable {
 public:
  explicit ShellTable(int n_max);

  int n_max() const { return n_max_; }
  const std::array<ShellEntry, 6>& shell(int n) const;
  const ShellEntry& entry(int n, int i) const { return shell(n)[static_cast<size_t>(i)]; }

  // Slot of k within shell n, or -1 when k is not a positive member of it.
  int find_slot(int n, const Vec3& k) const;

  // Slot holding 2^{n+1} s - k for slot i of shell n: the frequency pairing
  // that realizes the mirror symmetry u(x) = M u(M x), M = I - (2/3) s s^T.
  int mirror_slot(int n, int i) const;

  // Slot of the canonical representative of the given kind (perm id 0).
  int canonical_slot(int n, Kind kind) const;

 private:
  int n_max_;
  std::vector<std::array<ShellEntry, 6>> shells_;
  std::vector<std::array<int, 6>> mirror_;
};

// Process-wide cache; tables are immutable once built and safe to share.
std::shared_ptr<const ShellTable> shell_table(int n_max);

// ---------------------------------------------------------------------------
// Structural verification

struct LatticeReport {
  bool ok = true;
  int n_max = 0;
  long shells_checked = 0;
  long pairs_checked = 0;
  long closure_facts_observed = 0;
  long closure_facts_expected = 0;
  std::vector<std::string> failures;

  void fail(std::string msg) {
    ok = false;
    failures.push_back(std::move(msg));
  }
};

// Exact checks over all shells <= n_max:
//   (i)   s.k = 3*2^n and |k|^2 = 3*2^{2n} + 2*3^n for every member;
//   (ii)  conical ratio (s.k)^2 / (|s|^2 |k|^2) = 1 / (1 + (2/3)(3/4)^n)
//         as exact rationals;
//   (iii) |w^k|^2 = 2*3^{n+1} / (3*2^{2n} + 2*3^n) and permutation/sign
//         equivariance of w^k, all exact;
//   (iv)  generator recursions h_m = k_m + P12 k_m, j_m = k_m + P23 k_m,
//         k_{m+1} = h_m + j_m;
//   (v)   exhaustive pair closure: the set of sums a + b landing back on the
//         lattice (a, b ranging over both halves of shells <= n_max) equals
//         exactly the orbit of the nine generator sum/difference equations;
//         in particular interactions couple shells n and n+-1 only.
LatticeReport verify_lattice_identities(int n_max);

}  // namespace cascade

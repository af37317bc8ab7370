#include "cascade/lattice.hpp"

#include <algorithm>
#include <set>
#include <tuple>

namespace cascade {

BigInt to_big(Int x) {
  const bool neg = x < 0;
  unsigned __int128 u = neg ? static_cast<unsigned __int128>(-(x + 1)) + 1
                            : static_cast<unsigned __int128>(x);
  BigInt b = static_cast<uint64_t>(u >> 64);
  b <<= 64;
  b |= static_cast<uint64_t>(u);
  return neg ? -b : b;
}

double to_double(const Rational& q) { return q.convert_to<double>(); }

std::string to_string(Int x) {
  if (x == 0) return "0";
  const bool neg = x < 0;
  std::string s;
  unsigned __int128 u = neg ? static_cast<unsigned __int128>(-(x + 1)) + 1
                            : static_cast<unsigned __int128>(x);
  while (u != 0) {
    s.push_back(static_cast<char>('0' + static_cast<int>(u % 10)));
    u /= 10;
  }
  if (neg) s.push_back('-');
  std::reverse(s.begin(), s.end());
  return s;
}

std::string Vec3::str() const {
  return "(" + to_string(c[0]) + "," + to_string(c[1]) + "," + to_string(c[2]) + ")";
}

Vec3 permute(const Perm& p, const Vec3& v) {
  return {v[p[0]], v[p[1]], v[p[2]]};
}

Eigen::Vector3d permute(const Perm& p, const Eigen::Vector3d& v) {
  return {v[p[0]], v[p[1]], v[p[2]]};
}

char kind_char(Kind k) {
  switch (k) {
    case Kind::K: return 'K';
    case Kind::H: return 'H';
    default: return 'J';
  }
}

namespace {

Int pow2(int e) { return Int(1) << e; }

Int pow3(int e) {
  Int r = 1;
  for (int i = 0; i < e; ++i) r *= 3;
  return r;
}

}  // namespace

int shell_of(Kind kind, int m) { return kind == Kind::K ? 2 * m : 2 * m + 1; }

int generation_of(int shell) { return shell / 2; }

Vec3 canonical_frequency(Kind kind, int m) {
  if (m < 0) throw std::invalid_argument("generation index must be >= 0");
  if (shell_of(kind, m) > kMaxShell)
    throw std::overflow_error("frequency generation too deep for exact 128-bit arithmetic");
  const Int t = pow3(m);
  switch (kind) {
    case Kind::K: {
      const Int p = pow2(2 * m);
      return {p + t, p, p - t};
    }
    case Kind::H: {
      const Int p = pow2(2 * m + 1);
      return {p + t, p + t, p - 2 * t};
    }
    default: {
      const Int p = pow2(2 * m + 1);
      return {p + 2 * t, p - t, p - t};
    }
  }
}

std::optional<Membership> classify(const Vec3& k) {
  constexpr Int kCap = Int(1) << 62;
  for (int i = 0; i < 3; ++i) {
    if (k[i] >= kCap || k[i] <= -kCap)
      throw std::overflow_error("frequency component exceeds exact classification capacity");
  }

  const Int s = dot(kSigma, k);
  if (s == 0) return std::nullopt;
  const int sign = s > 0 ? +1 : -1;
  Int a = s > 0 ? s : -s;
  if (a % 3 != 0) return std::nullopt;
  Int t = a / 3;
  // t must be a power of two; its exponent is the shell index.
  if ((t & (t - 1)) != 0) return std::nullopt;
  int n = 0;
  while (t > 1) {
    t >>= 1;
    ++n;
  }
  if (n > kMaxShell) return std::nullopt;
  if (norm_sq(k) != 3 * pow2(2 * n) + 2 * pow3(n)) return std::nullopt;

  const Vec3 kp = sign > 0 ? k : -k;
  const int m = generation_of(n);
  const auto match = [&kp](const Vec3& canon) -> std::optional<int> {
    for (int p = 0; p < 6; ++p) {
      if (permute(kPerms[static_cast<size_t>(p)], canon) == kp) return p;
    }
    return std::nullopt;
  };
  if (n % 2 == 0) {
    if (auto p = match(canonical_frequency(Kind::K, m)))
      return Membership{sign, n, Kind::K, *p};
    return std::nullopt;
  }
  if (auto p = match(canonical_frequency(Kind::H, m)))
    return Membership{sign, n, Kind::H, *p};
  if (auto p = match(canonical_frequency(Kind::J, m)))
    return Membership{sign, n, Kind::J, *p};
  return std::nullopt;
}

ConstraintDirection constraint_direction(const Vec3& k) {
  const auto mem = classify(k);
  if (!mem) {
    if (k[0] == k[1] && k[1] == k[2])
      throw std::invalid_argument("degenerate projection: frequency parallel to (1,1,1)");
    throw std::invalid_argument("frequency " + k.str() + " is not on the lattice");
  }
  const BigInt s = to_big(dot(kSigma, k));
  const BigInt q = to_big(norm_sq(k));
  ConstraintDirection out;
  for (int i = 0; i < 3; ++i) {
    out.w[static_cast<size_t>(i)] = Rational(q - s * to_big(k[i]), q);
  }
  out.norm_sq = 0;
  for (const auto& wi : out.w) out.norm_sq += wi * wi;

  Eigen::Vector3d wd(to_double(out.w[0]), to_double(out.w[1]), to_double(out.w[2]));
  out.v = wd / wd.norm();
  return out;
}

std::array<Vec3, 6> shell_frequencies(int n) {
  if (n < 0) throw std::invalid_argument("shell index must be >= 0");
  if (n > kMaxShell) throw std::overflow_error("shell exceeds exact arithmetic capacity");
  std::array<Vec3, 6> out;
  size_t count = 0;
  const auto add_orbit = [&](const Vec3& canon) {
    for (const auto& p : kPerms) {
      const Vec3 image = permute(p, canon);
      bool seen = false;
      for (size_t i = 0; i < count; ++i) {
        if (out[i] == image) {
          seen = true;
          break;
        }
      }
      if (!seen) out[count++] = image;
    }
  };
  const int m = generation_of(n);
  if (n % 2 == 0) {
    add_orbit(canonical_frequency(Kind::K, m));
  } else {
    add_orbit(canonical_frequency(Kind::H, m));
    add_orbit(canonical_frequency(Kind::J, m));
  }
  if (count != 6) throw std::logic_error("shell orbit does not have 6 members");
  std::sort(out.begin(), out.end());
  return out;
}

ShellTable::ShellTable(int n_max) : n_max_(n_max) {
  if (n_max < 0) throw std::invalid_argument("shell table needs n_max >= 0");
  shells_.reserve(static_cast<size_t>(n_max) + 1);
  mirror_.resize(static_cast<size_t>(n_max) + 1);
  for (int n = 0; n <= n_max; ++n) {
    const auto freqs = shell_frequencies(n);
    std::array<ShellEntry, 6> entries;
    for (size_t i = 0; i < 6; ++i) {
      const auto mem = classify(freqs[i]);
      if (!mem || mem->sign != +1 || mem->shell != n)
        throw std::logic_error("shell member failed to classify");
      entries[i] = ShellEntry{freqs[i], mem->kind, mem->perm,
                              constraint_direction(freqs[i])};
    }
    shells_.push_back(entries);
  }
  // Mirror pairing 2^{n+1} s - k stays inside the same positive shell.
  for (int n = 0; n <= n_max; ++n) {
    const Vec3 twos = pow2(n + 1) * kSigma;
    for (int i = 0; i < 6; ++i) {
      const Vec3 kk = twos - shells_[static_cast<size_t>(n)][static_cast<size_t>(i)].k;
      const int j = find_slot(n, kk);
      if (j < 0) throw std::logic_error("mirror image left the shell");
      mirror_[static_cast<size_t>(n)][static_cast<size_t>(i)] = j;
    }
  }
}

const std::array<ShellEntry, 6>& ShellTable::shell(int n) const {
  if (n < 0 || n > n_max_) throw std::out_of_range("shell index outside table");
  return shells_[static_cast<size_t>(n)];
}

int ShellTable::find_slot(int n, const Vec3& k) const {
  const auto& sh = shell(n);
  for (int i = 0; i < 6; ++i) {
    if (sh[static_cast<size_t>(i)].k == k) return i;
  }
  return -1;
}

int ShellTable::mirror_slot(int n, int i) const {
  if (n < 0 || n > n_max_) throw std::out_of_range("shell index outside table");
  return mirror_[static_cast<size_t>(n)][static_cast<size_t>(i)];
}

int ShellTable::canonical_slot(int n, Kind kind) const {
  const auto& sh = shell(n);
  for (int i = 0; i < 6; ++i) {
    const auto& e = sh[static_cast<size_t>(i)];
    if (e.kind == kind && e.perm == kPermId) return i;
  }
  throw std::logic_error("canonical representative missing from shell");
}

std::shared_ptr<const ShellTable> shell_table(int n_max) {
  static std::mutex mu;
  static std::map<int, std::shared_ptr<const ShellTable>> cache;
  std::lock_guard<std::mutex> lock(mu);
  // Reuse any table at least as deep as requested.
  auto it = cache.lower_bound(n_max);
  if (it != cache.end()) return it->second;
  auto table = std::make_shared<const ShellTable>(n_max);
  cache[n_max] = table;
  return table;
}

namespace {

// One sum fact a + b = c with {a, b} unordered; canonical key for set compare.
using Fact = std::tuple<std::array<Int, 3>, std::array<Int, 3>, std::array<Int, 3>>;

Fact make_fact(const Vec3& a, const Vec3& b, const Vec3& c) {
  const Vec3& lo = a < b ? a : b;
  const Vec3& hi = a < b ? b : a;
  return {lo.c, hi.c, c.c};
}

std::string fact_str(const Fact& f) {
  const auto& [a, b, c] = f;
  return Vec3{a[0], a[1], a[2]}.str() + " + " + Vec3{b[0], b[1], b[2]}.str() +
         " = " + Vec3{c[0], c[1], c[2]}.str();
}

}  // namespace

LatticeReport verify_lattice_identities(int n_max) {
  LatticeReport rep;
  rep.n_max = n_max;
  if (n_max < 0 || n_max > 60) {
    rep.fail("n_max must lie in [0, 60] for exact closure verification");
    return rep;
  }

  // (i)-(iii): per-member exact identities.
  for (int n = 0; n <= n_max; ++n) {
    const auto freqs = shell_frequencies(n);
    const Int want_dot = 3 * pow2(n);
    const Int want_nsq = 3 * pow2(2 * n) + 2 * pow3(n);
    const Rational want_cone =
        Rational(to_big(want_dot) * to_big(want_dot), 3 * to_big(want_nsq));
    const Rational want_cone_closed =
        Rational(1) / (Rational(1) + Rational(2, 3) * Rational(to_big(pow3(n)), to_big(pow2(2 * n))));
    const Rational want_wsq = Rational(2 * to_big(pow3(n + 1)), to_big(want_nsq));
    ++rep.shells_checked;
    for (const auto& k : freqs) {
      if (dot(kSigma, k) != want_dot)
        rep.fail("sigma.k mismatch at " + k.str());
      if (norm_sq(k) != want_nsq)
        rep.fail("|k|^2 mismatch at " + k.str());
      const auto dir = constraint_direction(k);
      if (Rational(to_big(dot(kSigma, k)) * to_big(dot(kSigma, k)), 3 * to_big(norm_sq(k))) != want_cone ||
          want_cone != want_cone_closed)
        rep.fail("conical ratio mismatch at " + k.str());
      if (dir.norm_sq != want_wsq)
        rep.fail("|w^k|^2 mismatch at " + k.str());
      // Permutation/sign equivariance of the exact unnormalized direction.
      for (const auto& p : kPerms) {
        const auto dir_p = constraint_direction(permute(p, k));
        for (int i = 0; i < 3; ++i) {
          if (dir_p.w[static_cast<size_t>(i)] != dir.w[static_cast<size_t>(p[i])])
            rep.fail("w^{Pk} != P w^k at " + k.str());
        }
      }
      const auto dir_neg = constraint_direction(-k);
      if (dir_neg.w != dir.w) rep.fail("w^{-k} != w^k at " + k.str());
    }
  }

  // (iv): generator recursions.
  for (int m = 0; 2 * m + 1 <= n_max; ++m) {
    const Vec3 km = canonical_frequency(Kind::K, m);
    const Vec3 hm = canonical_frequency(Kind::H, m);
    const Vec3 jm = canonical_frequency(Kind::J, m);
    if (hm != km + permute(kPerms[kPerm12], km))
      rep.fail("h_m != k_m + P12 k_m at m=" + std::to_string(m));
    if (jm != km + permute(kPerms[kPerm23], km))
      rep.fail("j_m != k_m + P23 k_m at m=" + std::to_string(m));
    if (2 * m + 2 <= kMaxShell && canonical_frequency(Kind::K, m + 1) != hm + jm)
      rep.fail("k_{m+1} != h_m + j_m at m=" + std::to_string(m));
  }

  // (v): exhaustive closure.  Collect every signed pair whose sum lands on
  // the lattice, then compare with the orbit of the nine generator equations.
  std::vector<Vec3> members;
  for (int n = 0; n <= n_max; ++n) {
    for (const auto& k : shell_frequencies(n)) {
      members.push_back(k);
      members.push_back(-k);
    }
  }
  std::set<Fact> observed;
  for (size_t i = 0; i < members.size(); ++i) {
    for (size_t j = i; j < members.size(); ++j) {
      const Vec3 sum = members[i] + members[j];
      ++rep.pairs_checked;
      if (classify(sum)) observed.insert(make_fact(members[i], members[j], sum));
    }
  }

  std::set<Fact> expected;
  const auto add_eq = [&expected](const Vec3& a, const Vec3& b) {
    const Vec3 c = a + b;
    for (const auto& p : kPerms) {
      const Vec3 pa = permute(p, a), pb = permute(p, b), pc = permute(p, c);
      expected.insert(make_fact(pa, pb, pc));
      expected.insert(make_fact(-pa, -pb, -pc));
    }
  };
  for (int m = 0; 2 * m <= n_max; ++m) {
    const Vec3 km = canonical_frequency(Kind::K, m);
    const bool odd_ok = 2 * m + 1 <= n_max;
    const Vec3 hm = odd_ok ? canonical_frequency(Kind::H, m) : Vec3{};
    const Vec3 jm = odd_ok ? canonical_frequency(Kind::J, m) : Vec3{};
    // k_m + P12 k_m = h_m and k_m + P23 k_m = j_m (outputs may exceed n_max).
    add_eq(km, permute(kPerms[kPerm12], km));
    add_eq(km, permute(kPerms[kPerm23], km));
    if (!odd_ok) continue;
    // h_m + j_m = k_{m+1}
    add_eq(hm, jm);
    // h_m - P12 k_m = k_m and j_m - P23 k_m = k_m
    add_eq(hm, -permute(kPerms[kPerm12], km));
    add_eq(jm, -permute(kPerms[kPerm23], km));
    if (2 * m + 2 <= n_max) {
      const Vec3 kn = canonical_frequency(Kind::K, m + 1);
      // k_{m+1} - j_m = h_m and k_{m+1} - h_m = j_m
      add_eq(kn, -jm);
      add_eq(kn, -hm);
    }
  }

  rep.closure_facts_observed = static_cast<long>(observed.size());
  rep.closure_facts_expected = static_cast<long>(expected.size());
  for (const auto& f : observed) {
    if (!expected.count(f)) rep.fail("unexpected lattice sum: " + fact_str(f));
  }
  for (const auto& f : expected) {
    if (!observed.count(f)) rep.fail("missing lattice sum: " + fact_str(f));
  }
  // Adjacency: every observed fact couples shells at distance <= 1.
  for (const auto& f : observed) {
    const auto& [a, b, c] = f;
    const auto ma = classify(Vec3{a[0], a[1], a[2]});
    const auto mb = classify(Vec3{b[0], b[1], b[2]});
    const auto mc = classify(Vec3{c[0], c[1], c[2]});
    if (!ma || !mb || !mc) {
      rep.fail("closure fact fails to classify: " + fact_str(f));
      continue;
    }
    const int lo = std::min({ma->shell, mb->shell, mc->shell});
    const int hi = std::max({ma->shell, mb->shell, mc->shell});
    if (hi - lo > 1) rep.fail("non-adjacent interaction: " + fact_str(f));
  }
  return rep;
}

}  // namespace cascade

#include "cascade/bilinear.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <random>

namespace cascade {

namespace {

Rational rdot(const std::array<Rational, 3>& w, const Vec3& k) {
  Rational r = 0;
  for (int i = 0; i < 3; ++i) r += w[static_cast<size_t>(i)] * Rational(to_big(k[i]));
  return r;
}

Rational rdot(const std::array<Rational, 3>& a, const std::array<Rational, 3>& b) {
  Rational r = 0;
  for (size_t i = 0; i < 3; ++i) r += a[i] * b[i];
  return r;
}

BigInt bpow(int base, int e) {
  return boost::multiprecision::pow(BigInt(base), static_cast<unsigned>(e));
}

Complex coeff(const SpectralField& f, int n, int slot, bool conj) {
  if (n > f.N) return {};
  const Complex c = f.amp(n, slot);
  return conj ? std::conj(c) : c;
}

}  // namespace

ModeList advect_project(const ModeList& u, const ModeList& w) {
  std::map<Vec3, Eigen::Vector3cd> acc;
  const Complex two_pi_i(0.0, 2.0 * M_PI);
  // One advection term: (grad_carrier^(j) . l) advected^(l) at j + l.
  const auto add_term = [&](const ModeList& grad_carrier, const ModeList& advected) {
    for (const auto& a : grad_carrier) {
      for (const auto& b : advected) {
        const Eigen::Vector3cd l = b.k.to_double().cast<Complex>();
        const Complex factor = two_pi_i * a.u.cwiseProduct(l).sum();
        auto [it, fresh] = acc.try_emplace(a.k + b.k, Eigen::Vector3cd::Zero());
        it->second += factor * b.u;
      }
    }
  };
  add_term(w, u);
  add_term(u, w);

  ModeList out;
  for (const auto& [k, vec] : acc) {
    if (!classify(k)) continue;
    const auto dir = constraint_direction(k);
    const Complex c = dir.v.cast<Complex>().dot(vec);
    out.push_back({k, c * dir.v.cast<Complex>()});
  }
  return out;
}

InteractionTable::InteractionTable(int n_in, int n_out) : n_in_(n_in), n_out_(n_out) {
  if (n_in < 0 || n_out < 0)
    throw std::invalid_argument("interaction table needs nonnegative shell cuts");
  const auto tin = shell_table(n_in);
  const auto tout = shell_table(n_out);
  for (int nj = 0; nj <= n_in; ++nj) {
    for (int js = 0; js < 6; ++js) {
      for (int jsign = +1; jsign >= -1; jsign -= 2) {
        // Off-lattice sums are automatic beyond adjacent shells.
        for (int nl = std::max(0, nj - 1); nl <= std::min(n_in, nj + 1); ++nl) {
          for (int ls = 0; ls < 6; ++ls) {
            for (int lsign = +1; lsign >= -1; lsign -= 2) {
              const auto& ej = tin->entry(nj, js);
              const auto& el = tin->entry(nl, ls);
              const Vec3 sum = (jsign > 0 ? ej.k : -ej.k) + (lsign > 0 ? el.k : -el.k);
              const auto mem = classify(sum);
              if (!mem || mem->sign != +1 || mem->shell > n_out) continue;
              const int out_slot = tout->find_slot(mem->shell, sum);
              const auto& eo = tout->entry(mem->shell, out_slot);
              // G = s_l (v^p . q)(v^q . v^out), evaluated exactly before the
              // single rounding to double.
              const Rational num = rdot(ej.dir.w, el.k) * rdot(el.dir.w, eo.dir.w);
              const Rational den_sq =
                  ej.dir.norm_sq * el.dir.norm_sq * eo.dir.norm_sq;
              const double G = static_cast<double>(lsign) * to_double(num) /
                               std::sqrt(to_double(den_sq));
              rows_.push_back({nj, js, nl, ls, jsign < 0, lsign < 0,
                               mem->shell, out_slot, G});
            }
          }
        }
      }
    }
  }
  std::sort(rows_.begin(), rows_.end(), [](const InteractionRow& a, const InteractionRow& b) {
    return std::tie(a.out_shell, a.out_slot, a.j_shell, a.j_slot, a.j_conj,
                    a.l_shell, a.l_slot, a.l_conj) <
           std::tie(b.out_shell, b.out_slot, b.j_shell, b.j_slot, b.j_conj,
                    b.l_shell, b.l_slot, b.l_conj);
  });
}

std::shared_ptr<const InteractionTable> interaction_table(int n_in, int n_out) {
  static std::mutex mu;
  static std::map<std::pair<int, int>, std::shared_ptr<const InteractionTable>> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto& slot = cache[{n_in, n_out}];
  if (!slot) slot = std::make_shared<const InteractionTable>(n_in, n_out);
  return slot;
}

SpectralField bilinear_B(const SpectralField& u, const SpectralField& w, int n_out) {
  const int n_in = std::max(u.N, w.N);
  const auto tbl = interaction_table(n_in, n_out);
  SpectralField out(n_out);
  const Complex minus_i_pi(0.0, -M_PI);
  for (const auto& r : tbl->rows()) {
    const Complex uj = coeff(u, r.j_shell, r.j_slot, r.j_conj);
    const Complex wl = coeff(w, r.l_shell, r.l_slot, r.l_conj);
    const Complex wj = coeff(w, r.j_shell, r.j_slot, r.j_conj);
    const Complex ul = coeff(u, r.l_shell, r.l_slot, r.l_conj);
    out.amp(r.out_shell, r.out_slot) += minus_i_pi * r.G * (uj * wl + wj * ul);
  }
  return out;
}

SpectralField bilinear_B(const SpectralField& u, const SpectralField& w) {
  return bilinear_B(u, w, std::max(u.N, w.N));
}

InteractionCoefficients interaction_coefficients(int m) {
  const double decay = std::pow(0.75, 2 * m);
  return {std::sqrt(6.0) * M_PI * std::pow(3.0, m) / std::sqrt(1.0 + 0.5 * decay),
          std::sqrt(2.0) * M_PI * std::pow(3.0, m + 1) /
              std::sqrt(1.0 + 0.375 * decay)};
}

ReducedCoefficients reduced_coefficients(int n) {
  const auto drain_at = [](int k) {
    const double beta = 1.0 / std::sqrt(1.0 + 0.5 * std::pow(0.75, k));
    return std::sqrt(2.0) * M_PI * beta * std::pow(std::sqrt(3.0), k + 1);
  };
  return {n == 0 ? 0.0 : drain_at(n - 1), drain_at(n)};
}

namespace {

struct CaseSpec {
  int id;
  Vec3 p, q, out;
  double amp_im;        // expected coefficient is i * amp_im
  Rational square;      // exact value of (amp / pi)^2
  bool difference;      // out = p - q (mirror-half pairing) instead of p + q
};

std::vector<CaseSpec> case_table(int m) {
  const Vec3 K = canonical_frequency(Kind::K, m);
  const Vec3 H = canonical_frequency(Kind::H, m);
  const Vec3 J = canonical_frequency(Kind::J, m);
  const Vec3 K1 = canonical_frequency(Kind::K, m + 1);
  const Vec3 pK12 = permute(kPerms[kPerm12], K);
  const Vec3 pK23 = permute(kPerms[kPerm23], K);
  const auto [a, b] = interaction_coefficients(m);
  const Rational asq(12 * bpow(144, m), 2 * bpow(16, m) + bpow(9, m));
  const Rational bsq(16 * bpow(9, m + 1) * bpow(16, m),
                     8 * bpow(16, m) + 3 * bpow(9, m));
  return {
      {1, K, pK12, H, -a, asq, false},
      {2, K, pK23, J, -a, asq, false},
      {3, H, J, K1, -b, bsq, false},
      {4, H, pK12, K, a / 2, asq / 4, true},
      {5, J, pK23, K, a / 2, asq / 4, true},
      {6, K1, J, H, b / 2, bsq / 4, true},
      {7, permute(kPerms[kPerm12], K1), permute(kPerms[kPerm12], J), H, b / 2,
       bsq / 4, true},
      {8, K1, H, J, b / 2, bsq / 4, true},
      {9, permute(kPerms[kPerm23], K1), permute(kPerms[kPerm23], H), J, b / 2,
       bsq / 4, true},
  };
}

// Real unit-amplitude mode: u^(k) = i v^k plus its conjugate half.
ModeList unit_mode(const Vec3& k) {
  const Eigen::Vector3cd iv =
      Complex(0.0, 1.0) * constraint_direction(k).v.cast<Complex>();
  return {{k, iv}, {-k, -iv}};
}

}  // namespace

InteractionReport verify_interaction_closed_forms(int max_m, double tol) {
  InteractionReport rep;
  rep.max_m = max_m;
  rep.tol = tol;
  if (max_m < 0 || 2 * max_m + 3 > kMaxShell) {
    rep.fail("generation range must fit the exact-arithmetic shell cap");
    return rep;
  }
  for (int m = 0; m <= max_m; ++m) {
    for (const auto& spec : case_table(m)) {
      InteractionCaseResult res;
      res.m = m;
      res.case_id = spec.id;
      res.out = spec.out;
      res.expect_amp = Complex(0.0, spec.amp_im);
      const auto label = [&] {
        return "m=" + std::to_string(m) + " case " + std::to_string(spec.id);
      };

      // Oracle path: direct convolution of the two real unit modes.
      const ModeList got = advect_project(unit_mode(spec.p), unit_mode(spec.q));
      const auto out_dir = constraint_direction(spec.out);
      bool found = false, found_mirror = false;
      for (const auto& mode : got) {
        const Complex c = out_dir.v.cast<Complex>().dot(mode.u);
        if (mode.k == spec.out) {
          found = true;
          res.oracle_rel_err = std::abs(c - res.expect_amp) / std::abs(res.expect_amp);
        } else if (mode.k == -spec.out) {
          found_mirror = true;
          res.spurious_rel =
              std::max(res.spurious_rel,
                       std::abs(c - std::conj(res.expect_amp)) / std::abs(res.expect_amp));
        } else {
          res.spurious_rel =
              std::max(res.spurious_rel, mode.u.norm() / std::abs(res.expect_amp));
        }
      }
      if (!found || !found_mirror) rep.fail(label() + ": expected output mode missing");
      if (res.oracle_rel_err > tol)
        rep.fail(label() + ": convolution amplitude off by " +
                 std::to_string(res.oracle_rel_err));

      // Table path: B(u, w) = -A(u, w)/2 over shell coefficients.
      const auto mp = classify(spec.p), mq = classify(spec.q);
      const int n_in = std::max(mp->shell, mq->shell);
      SpectralField fu(n_in), fw(n_in);
      fu.amp(mp->shell, fu.table->find_slot(mp->shell, spec.p)) = Complex(0.0, 1.0);
      fw.amp(mq->shell, fw.table->find_slot(mq->shell, spec.q)) = Complex(0.0, 1.0);
      const SpectralField bf = bilinear_B(fu, fw, n_in + 1);
      const auto mo = classify(spec.out);
      const int out_slot = bf.table->find_slot(mo->shell, spec.out);
      for (int n = 0; n <= bf.N; ++n) {
        for (int i = 0; i < 6; ++i) {
          const Complex c = bf.amp(n, i);
          if (n == mo->shell && i == out_slot) {
            res.table_rel_err =
                std::abs(c - (-res.expect_amp / 2.0)) / std::abs(res.expect_amp / 2.0);
          } else {
            res.spurious_rel =
                std::max(res.spurious_rel, std::abs(c) / std::abs(res.expect_amp / 2.0));
          }
        }
      }
      if (res.table_rel_err > tol)
        rep.fail(label() + ": table amplitude off by " + std::to_string(res.table_rel_err));
      if (res.spurious_rel > tol)
        rep.fail(label() + ": stray output amplitude " + std::to_string(res.spurious_rel));

      // Exact identity for the squared amplitude.  With unit inputs,
      //   amp = -2 pi i R+   at out = p + q,   R+ = (t1 + t2) / sqrt(D),
      //   amp = +2 pi i R-   at out = p - q,   R- = (t1 - t2) / sqrt(D),
      // where t1 = (w^q.p)(w^p.w^out), t2 = (w^p.q)(w^q.w^out) and
      // D = |w^p|^2 |w^q|^2 |w^out|^2, so 4 num^2 / D must equal (amp/pi)^2
      // as rationals, with num > 0 fixing the amplitude sign in both cases.
      const auto dp = constraint_direction(spec.p);
      const auto dq = constraint_direction(spec.q);
      const Rational t1 = rdot(dq.w, spec.p) * rdot(dp.w, out_dir.w);
      const Rational t2 = rdot(dp.w, spec.q) * rdot(dq.w, out_dir.w);
      const Rational num = spec.difference ? Rational(t1 - t2) : Rational(t1 + t2);
      const Rational den = dp.norm_sq * dq.norm_sq * out_dir.norm_sq;
      res.square_exact = (4 * num * num / den == spec.square) && num > 0;
      if (!res.square_exact) rep.fail(label() + ": exact amplitude identity failed");

      rep.cases.push_back(res);
    }
  }
  return rep;
}

BilinearEstimate estimate_bilinear_constant(int N, double s, int trials, uint64_t seed) {
  BilinearEstimate est;
  est.N = N;
  est.s = s;
  est.trials = trials;
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  const double r = s / 2.0 + std::log(3.0) / (4.0 * std::log(2.0));
  double sum = 0;
  for (int t = 0; t < trials; ++t) {
    SpectralField u(N), w(N);
    for (int n = 0; n <= N; ++n) {
      for (int i = 0; i < 6; ++i) {
        u.amp(n, i) = Complex(dist(rng), dist(rng));
        w.amp(n, i) = Complex(dist(rng), dist(rng));
      }
    }
    const SpectralField b = bilinear_B(u, w, N + 1);
    const double ratio =
        sobolev_norm(b, s) / (sobolev_norm(u, r) * sobolev_norm(w, r));
    est.max_ratio = std::max(est.max_ratio, ratio);
    sum += ratio;
  }
  est.mean_ratio = trials > 0 ? sum / trials : 0.0;
  return est;
}

}  // namespace cascade

#include <doctest.h>

#include <cmath>
#include <map>
#include <random>

#include "cascade/bilinear.hpp"

using namespace cascade;

namespace {

SpectralField random_field(int N, uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  SpectralField u(N);
  for (int n = 0; n <= N; ++n)
    for (int i = 0; i < 6; ++i) u.amp(n, i) = Complex(dist(rng), dist(rng));
  return u;
}

ModeList modes_of(const SpectralField& f) {
  ModeList out;
  for (int n = 0; n <= f.N; ++n) {
    for (int i = 0; i < 6; ++i) {
      const auto& e = f.table->entry(n, i);
      const Eigen::Vector3cd v = e.dir.v.cast<Complex>();
      out.push_back({e.k, f.amp(n, i) * v});
      out.push_back({-e.k, std::conj(f.amp(n, i)) * v});
    }
  }
  return out;
}

}  // namespace

TEST_CASE("single-mode convolution fixture at the first generation") {
  // Unit modes at (2,1,0) and (1,2,0) interact into (3,3,0) with amplitude
  // -2 pi i (and nothing else lands on the lattice).
  const auto dir_p = constraint_direction(Vec3{2, 1, 0});
  const auto dir_q = constraint_direction(Vec3{1, 2, 0});
  const Complex i1(0.0, 1.0);
  const ModeList u = {{Vec3{2, 1, 0}, i1 * dir_p.v.cast<Complex>()},
                      {Vec3{-2, -1, 0}, -i1 * dir_p.v.cast<Complex>()}};
  const ModeList w = {{Vec3{1, 2, 0}, i1 * dir_q.v.cast<Complex>()},
                      {Vec3{-1, -2, 0}, -i1 * dir_q.v.cast<Complex>()}};
  const ModeList got = advect_project(u, w);
  REQUIRE(got.size() == 2);
  CHECK(got[0].k == Vec3{-3, -3, 0});
  CHECK(got[1].k == Vec3{3, 3, 0});
  const Eigen::Vector3cd v_out =
      constraint_direction(Vec3{3, 3, 0}).v.cast<Complex>();
  CHECK((got[1].u - Complex(0.0, -2.0 * M_PI) * v_out).norm() < 1e-13);
  CHECK((got[0].u - Complex(0.0, 2.0 * M_PI) * v_out).norm() < 1e-13);
}

TEST_CASE("closed-form interaction coefficients") {
  const auto [a0, b0] = interaction_coefficients(0);
  CHECK(a0 == doctest::Approx(2.0 * M_PI).epsilon(1e-15));
  CHECK(b0 == doctest::Approx(12.0 * M_PI / std::sqrt(11.0)).epsilon(1e-15));

  CHECK(reduced_coefficients(0).attack == 0.0);
  CHECK(reduced_coefficients(0).drain == doctest::Approx(2.0 * M_PI).epsilon(1e-15));
  for (int n = 0; n < 12; ++n) {
    CHECK(reduced_coefficients(n).drain ==
          doctest::Approx(reduced_coefficients(n + 1).attack).epsilon(1e-15));
  }
  for (int m = 0; m < 6; ++m) {
    const auto [a, b] = interaction_coefficients(m);
    CHECK(reduced_coefficients(2 * m).drain == doctest::Approx(a).epsilon(1e-15));
    CHECK(reduced_coefficients(2 * m + 1).drain == doctest::Approx(b).epsilon(1e-15));
  }
  // Exact squared values at m = 1: a^2 = 12*144/41 pi^2, b^2 = 16*81*16/155 pi^2.
  const auto [a1, b1] = interaction_coefficients(1);
  CHECK(a1 * a1 ==
        doctest::Approx(12.0 * 144.0 / 41.0 * M_PI * M_PI).epsilon(1e-14));
  CHECK(b1 * b1 ==
        doctest::Approx(16.0 * 81.0 * 16.0 / 155.0 * M_PI * M_PI).epsilon(1e-14));
}

TEST_CASE("interaction table agrees with the convolution oracle") {
  const SpectralField u = random_field(4, 11);
  const SpectralField w = random_field(4, 22);
  const SpectralField b = bilinear_B(u, w, 5);

  const ModeList oracle = advect_project(modes_of(u), modes_of(w));
  std::map<Vec3, Complex> plus_half;
  for (const auto& mode : oracle) {
    const auto mem = classify(mode.k);
    REQUIRE(mem.has_value());
    REQUIRE(mem->shell <= 5);
    const Complex c =
        constraint_direction(mode.k).v.cast<Complex>().dot(mode.u);
    if (mem->sign > 0) plus_half[mode.k] = c;
  }
  // Reality of the output: the mirror half is the conjugate.
  for (const auto& mode : oracle) {
    const auto mem = classify(mode.k);
    if (mem->sign < 0) {
      const Complex c =
          constraint_direction(mode.k).v.cast<Complex>().dot(mode.u);
      REQUIRE(plus_half.count(-mode.k) == 1);
      CHECK(std::abs(c - std::conj(plus_half.at(-mode.k))) < 1e-12);
    }
  }
  // B = -oracle/2 slot by slot, including slots the oracle leaves empty.
  double max_diff = 0;
  for (int n = 0; n <= 5; ++n) {
    for (int i = 0; i < 6; ++i) {
      const Vec3 k = b.table->entry(n, i).k;
      const auto it = plus_half.find(k);
      const Complex want = it == plus_half.end() ? Complex(0, 0) : -it->second / 2.0;
      max_diff = std::max(max_diff, std::abs(b.amp(n, i) - want));
    }
  }
  CHECK(max_diff < 1e-11 * (1.0 + sobolev_norm(b, 0.0)));
}

TEST_CASE("quadratic term is orthogonal to the state") {
  const SpectralField u = random_field(6, 33);
  const SpectralField b = bilinear_B(u, u);
  double inner = 0;
  for (int n = 0; n <= u.N; ++n)
    for (int i = 0; i < 6; ++i)
      inner += 2.0 * (b.amp(n, i) * std::conj(u.amp(n, i))).real();
  CHECK(std::abs(inner) < 1e-12 * sobolev_norm(b, 0.0) * sobolev_norm(u, 0.0));
}

TEST_CASE("nine interaction classes verify to machine precision") {
  const auto rep = verify_interaction_closed_forms(2, 1e-12);
  for (const auto& f : rep.failures) MESSAGE(f);
  CHECK(rep.ok);
  CHECK(rep.cases.size() == 27);
  for (const auto& c : rep.cases) {
    CHECK(c.square_exact);
    CHECK(c.oracle_rel_err <= 1e-12);
    CHECK(c.table_rel_err <= 1e-12);
    CHECK(c.spurious_rel <= 1e-12);
  }
}

TEST_CASE("operator norm probe is reproducible and finite") {
  const auto e1 = estimate_bilinear_constant(5, 0.5, 8, 2024);
  const auto e2 = estimate_bilinear_constant(5, 0.5, 8, 2024);
  CHECK(e1.max_ratio == e2.max_ratio);
  CHECK(e1.mean_ratio == e2.mean_ratio);
  CHECK(e1.max_ratio > 0.0);
  CHECK(std::isfinite(e1.max_ratio));
  CHECK(e1.mean_ratio <= e1.max_ratio + 1e-15);
}

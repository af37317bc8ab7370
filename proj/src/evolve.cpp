#include "cascade/evolve.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "cascade/bilinear.hpp"

namespace cascade {

namespace {

// Dormand-Prince 5(4) tableau.  Stage 7 evaluates at the accepted state
// (first-same-as-last), and E holds the difference between the fifth- and
// fourth-order weights.
constexpr int kStages = 7;
constexpr double C[kStages] = {0.0, 1.0 / 5, 3.0 / 10, 4.0 / 5, 8.0 / 9, 1.0, 1.0};
constexpr double A[kStages][kStages - 1] = {
    {},
    {1.0 / 5},
    {3.0 / 40, 9.0 / 40},
    {44.0 / 45, -56.0 / 15, 32.0 / 9},
    {19372.0 / 6561, -25360.0 / 2187, 64448.0 / 6561, -212.0 / 729},
    {9017.0 / 3168, -355.0 / 33, 46732.0 / 5247, 49.0 / 176, -5103.0 / 18656},
    {35.0 / 384, 0.0, 500.0 / 1113, 125.0 / 192, -2187.0 / 6784, 11.0 / 84},
};
constexpr double E[kStages] = {71.0 / 57600,       0.0,        -71.0 / 16695,
                               71.0 / 1920,        -17253.0 / 339200,
                               22.0 / 525,         -1.0 / 40};

// PI step-size controller constants (the classical DOPRI5 settings).
constexpr double kBeta = 0.04;
constexpr double kExpo1 = 0.2 - 0.75 * kBeta;
constexpr double kSafe = 0.9;
constexpr double kMaxShrink = 5.0;   // h may shrink at most 5x per step
constexpr double kMaxGrowCap = 0.1;  // ...and grow at most 10x

using RhsFn = std::function<void(const Eigen::Ref<const Eigen::VectorXd>&,
                                 Eigen::Ref<Eigen::VectorXd>)>;

double error_norm(const Eigen::VectorXd& ev, const Eigen::VectorXd& y0,
                  const Eigen::VectorXd& y1, double atol, double rtol) {
  double acc = 0.0;
  for (Eigen::Index i = 0; i < ev.size(); ++i) {
    const double sc =
        atol + rtol * std::max(std::abs(y0[i]), std::abs(y1[i]));
    const double q = ev[i] / sc;
    acc += q * q;
  }
  return std::sqrt(acc / static_cast<double>(ev.size()));
}

// Initial step heuristic of the DOPRI5 code, driven by the full derivative.
double initial_step(const RhsFn& full_rhs, const Eigen::VectorXd& y0,
                    const Eigen::VectorXd& f0, double span, double atol,
                    double rtol, long& rhs_evals) {
  const Eigen::Index n = y0.size();
  double dnf = 0.0, dny = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    const double sc = atol + rtol * std::abs(y0[i]);
    dnf += (f0[i] / sc) * (f0[i] / sc);
    dny += (y0[i] / sc) * (y0[i] / sc);
  }
  double h = (dnf <= 1e-10 || dny <= 1e-10) ? 1e-6 : 0.01 * std::sqrt(dny / dnf);
  h = std::min(h, span);

  Eigen::VectorXd y1 = y0 + h * f0;
  Eigen::VectorXd f1(n);
  full_rhs(y1, f1);
  ++rhs_evals;

  double der2 = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    const double sc = atol + rtol * std::abs(y0[i]);
    const double q = (f1[i] - f0[i]) / sc;
    der2 += q * q;
  }
  der2 = std::sqrt(der2) / h;

  const double der12 = std::max(der2, std::sqrt(dnf));
  const double h1 = (der12 <= 1e-15)
                        ? std::max(1e-6, h * 1e-3)
                        : std::pow(0.01 / der12, 0.2);
  return std::min({100.0 * h, h1, span});
}

struct CoreProblem {
  Eigen::ArrayXd D;         // physical diagonal damping (>= 0)
  RhsFn f_nl;               // nonlinear part over the physical state
  Eigen::ArrayXd growth_w;  // growth norm weights (size 0 disables)
  Eigen::ArrayXd diss_w;    // dissipation functional weights (size 0 disables)
};

// Integrating-factor Dormand-Prince loop over y' = -D y + f_nl(y), with an
// appended quadrature component integrating sum_i diss_w_i y_i^2.
Trajectory integrate_core(const CoreProblem& prob, const Eigen::VectorXd& y0,
                          const SimConfig& cfg) {
  const Eigen::Index np = y0.size();
  const bool track_diss = prob.diss_w.size() > 0;
  const Eigen::Index dim = np + (track_diss ? 1 : 0);
  const bool damped = prob.D.size() > 0 && prob.D.maxCoeff() > 0.0;

  Eigen::ArrayXd D_full = Eigen::ArrayXd::Zero(dim);
  if (prob.D.size() > 0) D_full.head(np) = prob.D;

  // Nonlinear part of the augmented system (no -D y term).
  const RhsFn f_aug = [&](const Eigen::Ref<const Eigen::VectorXd>& yy,
                          Eigen::Ref<Eigen::VectorXd> out) {
    prob.f_nl(yy.head(np), out.head(np));
    if (track_diss)
      out[np] = (prob.diss_w * yy.head(np).array().square()).sum();
  };
  // Exact derivative, used only by the startup heuristic.
  const RhsFn true_rhs = [&](const Eigen::Ref<const Eigen::VectorXd>& yy,
                             Eigen::Ref<Eigen::VectorXd> out) {
    f_aug(yy, out);
    out.array() -= D_full * yy.array();
  };

  // Distinct integrating-factor exponents theta, so that every factor used by
  // the stages and the error estimate is exp(-theta h D).
  std::vector<double> thetas;
  const auto intern = [&](double v) {
    for (size_t k = 0; k < thetas.size(); ++k)
      if (thetas[k] == v) return static_cast<int>(k);
    thetas.push_back(v);
    return static_cast<int>(thetas.size() - 1);
  };
  int th_y0[kStages] = {};
  int th_a[kStages][kStages - 1] = {};
  int th_e[kStages] = {};
  for (int i = 1; i < kStages; ++i) {
    th_y0[i] = intern(C[i]);
    for (int j = 0; j < i; ++j) th_a[i][j] = intern(C[i] - C[j]);
  }
  for (int j = 0; j < kStages; ++j) th_e[j] = intern(1.0 - C[j]);

  std::vector<Eigen::ArrayXd> exps(thetas.size());
  double h_exps = std::numeric_limits<double>::quiet_NaN();
  const auto build_exps = [&](double h) {
    if (h == h_exps) return;
    for (size_t k = 0; k < thetas.size(); ++k)
      exps[k] = (-h * thetas[k] * D_full).exp();
    h_exps = h;
  };

  Trajectory traj;
  traj.N = 0;  // adapters fill the descriptor

  Eigen::VectorXd y(dim);
  y.head(np) = y0;
  if (track_diss) y[np] = 0.0;

  Eigen::VectorXd K[kStages];
  for (auto& k : K) k.resize(dim);
  Eigen::VectorXd ystage(dim), ynew(dim), ev(dim), dy(dim);

  const auto growth_of = [&](const Eigen::VectorXd& state) {
    if (prob.growth_w.size() == 0) return 0.0;
    return std::sqrt(
        (prob.growth_w * state.head(np).array().square()).sum());
  };
  const auto store = [&](double time, const Eigen::VectorXd& state,
                         const Eigen::VectorXd& deriv, double g) {
    if (!traj.t.empty() && traj.t.back() == time) return;
    traj.t.push_back(time);
    traj.y.push_back(state.head(np));
    traj.dy.push_back(deriv.head(np));
    traj.growth.push_back(g);
    traj.diss.push_back(track_diss ? state[np] : 0.0);
  };

  const double t_end = cfg.t_end;
  const int store_every = std::max(1, cfg.store_every);
  const double dt_min = cfg.dt_min_factor * std::max(1.0, std::abs(t_end));
  const bool watch_blowup =
      cfg.blowup_threshold > 0 && prob.growth_w.size() > 0;

  double t = 0.0;

  f_aug(y, K[0]);
  ++traj.rhs_evals;
  dy = K[0] - (D_full * y.array()).matrix();
  {
    const double g0 = growth_of(y);
    store(t, y, dy, g0);
    if (watch_blowup && g0 >= cfg.blowup_threshold) {
      traj.termination = Termination::Blowup;
      return traj;
    }
  }
  if (t_end <= 0.0) {
    traj.termination = Termination::ReachedEnd;
    return traj;
  }

  double h;
  if (cfg.dt_init > 0.0) {
    h = std::min(cfg.dt_init, t_end);
  } else {
    h = initial_step(true_rhs, y, dy, t_end, cfg.atol, cfg.rtol,
                     traj.rhs_evals);
  }

  double facold = 1e-4;
  bool reject = false;
  long attempts = 0;
  Termination term = Termination::ReachedEnd;

  while (true) {
    if (t >= t_end) break;
    if (attempts >= cfg.max_steps) {
      term = Termination::StepBudget;
      break;
    }
    bool last = false;
    if (t + 1.01 * h >= t_end) {  // stretch up to 1% to avoid a sliver step
      h = t_end - t;
      last = true;
    }
    if (h < dt_min) {
      term = Termination::StepUnderflow;
      break;
    }
    ++attempts;

    if (damped) build_exps(h);

    // Stages 2..7; stage 7 lands on the candidate state.
    for (int i = 1; i < kStages; ++i) {
      if (damped) {
        ystage.array() = exps[th_y0[i]] * y.array();
        for (int j = 0; j < i; ++j) {
          if (A[i][j] == 0.0) continue;
          if (thetas[th_a[i][j]] == 0.0)
            ystage += (h * A[i][j]) * K[j];
          else
            ystage.array() += (h * A[i][j]) * (exps[th_a[i][j]] * K[j].array());
        }
      } else {
        ystage = y;
        for (int j = 0; j < i; ++j)
          if (A[i][j] != 0.0) ystage += (h * A[i][j]) * K[j];
      }
      if (i < kStages - 1) {
        f_aug(ystage, K[i]);
      } else {
        ynew = ystage;
        f_aug(ynew, K[i]);
      }
      ++traj.rhs_evals;
    }

    // Embedded error, transported to the end of the step.
    ev.setZero();
    for (int j = 0; j < kStages; ++j) {
      if (E[j] == 0.0) continue;
      if (damped && thetas[th_e[j]] != 0.0)
        ev.array() += (h * E[j]) * (exps[th_e[j]] * K[j].array());
      else
        ev += (h * E[j]) * K[j];
    }
    const double err = error_norm(ev, y, ynew, cfg.atol, cfg.rtol);

    if (!std::isfinite(err)) {
      ++traj.rejected;
      reject = true;
      h *= 0.1;
      continue;
    }

    const double fac11 = std::pow(err, kExpo1);
    if (err <= 1.0) {
      // Accept; hnew uses the previous error (Lund stabilization).
      const double fac = std::clamp(fac11 / std::pow(facold, kBeta) / kSafe,
                                    kMaxGrowCap, kMaxShrink);
      double hnew = h / fac;
      facold = std::max(err, 1e-4);
      ++traj.accepted;
      t = last ? t_end : t + h;
      y.swap(ynew);
      std::swap(K[0], K[6]);
      dy = K[0] - (D_full * y.array()).matrix();

      const double g = growth_of(y);
      const bool hit = watch_blowup && g >= cfg.blowup_threshold;
      const bool done = last;
      if (hit || done || traj.accepted % store_every == 0)
        store(t, y, dy, g);
      if (hit) {
        term = Termination::Blowup;
        break;
      }
      if (done) break;

      if (reject) hnew = std::min(hnew, h);
      reject = false;
      h = std::min(hnew, t_end);
    } else {
      ++traj.rejected;
      reject = true;
      h = h / std::min(kMaxShrink, fac11 / kSafe);
    }
  }

  traj.termination = term;
  dy = K[0] - (D_full * y.array()).matrix();
  store(t, y, dy, growth_of(y));
  return traj;
}

}  // namespace

std::string termination_name(Termination t) {
  switch (t) {
    case Termination::ReachedEnd: return "reached_t_end";
    case Termination::Blowup: return "blowup_detected";
    case Termination::StepUnderflow: return "dt_underflow";
    case Termination::StepBudget: return "step_budget";
  }
  return "unknown";
}

Eigen::VectorXd trajectory_state_at(const Trajectory& traj, double time) {
  if (traj.t.empty()) throw std::invalid_argument("empty trajectory");
  if (time <= traj.t.front()) return traj.y.front();
  if (time >= traj.t.back()) return traj.y.back();
  const auto it = std::upper_bound(traj.t.begin(), traj.t.end(), time);
  const size_t i1 = static_cast<size_t>(it - traj.t.begin());
  const size_t i0 = i1 - 1;
  const double t0 = traj.t[i0], t1 = traj.t[i1];
  const double h = t1 - t0;
  if (h <= 0.0) return traj.y[i0];
  const double s = (time - t0) / h;
  const double s2 = s * s, s3 = s2 * s;
  const double h00 = 2 * s3 - 3 * s2 + 1;
  const double h10 = s3 - 2 * s2 + s;
  const double h01 = -2 * s3 + 3 * s2;
  const double h11 = s3 - s2;
  return h00 * traj.y[i0] + (h10 * h) * traj.dy[i0] + h01 * traj.y[i1] +
         (h11 * h) * traj.dy[i1];
}

Trajectory integrate_dyadic(const Model& model, const std::vector<double>& psi0,
                            const SimConfig& cfg) {
  if (psi0.empty()) throw std::invalid_argument("empty initial data");
  const int N = static_cast<int>(psi0.size()) - 1;
  const DyadicSystem sys(model, N);

  CoreProblem prob;
  prob.D = sys.dissipation();
  prob.f_nl = [sys](const Eigen::Ref<const Eigen::VectorXd>& y,
                    Eigen::Ref<Eigen::VectorXd> out) {
    sys.rhs_nonlinear(y, out);
  };
  prob.growth_w.resize(N + 1);
  prob.diss_w.resize(N + 1);
  for (int n = 0; n <= N; ++n) {
    prob.growth_w[n] = std::pow(3.0, n);
    prob.diss_w[n] = dissipation_weight(n, model.alpha);
  }

  const Eigen::VectorXd y0 =
      Eigen::Map<const Eigen::VectorXd>(psi0.data(), psi0.size());
  Trajectory traj = integrate_core(prob, y0, cfg);
  traj.galerkin = false;
  traj.N = N;
  traj.model = model;
  return traj;
}

Eigen::VectorXd pack_galerkin(const SpectralField& u) {
  Eigen::VectorXd y(12 * (u.N + 1));
  for (int n = 0; n <= u.N; ++n)
    for (int s = 0; s < 6; ++s) {
      const Complex c = u.amp(n, s);
      y[2 * (6 * n + s)] = c.real();
      y[2 * (6 * n + s) + 1] = c.imag();
    }
  return y;
}

SpectralField unpack_galerkin(const Eigen::Ref<const Eigen::VectorXd>& y,
                              int N) {
  if (y.size() != 12 * (N + 1))
    throw std::invalid_argument("state size does not match shell count");
  SpectralField u(N);
  for (int n = 0; n <= N; ++n)
    for (int s = 0; s < 6; ++s)
      u.amp(n, s) =
          Complex(y[2 * (6 * n + s)], y[2 * (6 * n + s) + 1]);
  return u;
}

Trajectory integrate_galerkin(const Model& model, const SpectralField& u0,
                              const SimConfig& cfg) {
  const int N = u0.N;
  const int nc = 6 * (N + 1);
  const auto tbl = interaction_table(N, N);

  CoreProblem prob;
  prob.D.resize(2 * nc);
  prob.diss_w.resize(2 * nc);
  prob.growth_w.resize(2 * nc);
  const double s_star = std::log(3.0) / (2.0 * std::log(2.0));
  for (int n = 0; n <= N; ++n) {
    const double ksq = 3.0 * std::pow(4.0, n) + 2.0 * std::pow(3.0, n);
    const double lam = 4.0 * M_PI * M_PI * ksq;
    const double d = model.nu * std::pow(lam, model.alpha);
    const double w_diss = 2.0 * std::pow(lam, model.alpha);
    const double w_grow = 2.0 * std::pow(lam, s_star);
    for (int s = 0; s < 6; ++s) {
      const int base = 2 * (6 * n + s);
      prob.D[base] = prob.D[base + 1] = d;
      prob.diss_w[base] = prob.diss_w[base + 1] = w_diss;
      prob.growth_w[base] = prob.growth_w[base + 1] = w_grow;
    }
  }

  prob.f_nl = [tbl, nc](const Eigen::Ref<const Eigen::VectorXd>& y,
                        Eigen::Ref<Eigen::VectorXd> out) {
    const auto* cy = reinterpret_cast<const Complex*>(y.data());
    auto* co = reinterpret_cast<Complex*>(out.data());
    std::fill(co, co + nc, Complex(0.0, 0.0));
    const Complex minus_two_pi_i(0.0, -2.0 * M_PI);
    for (const auto& r : tbl->rows()) {
      const Complex cj_raw = cy[6 * r.j_shell + r.j_slot];
      const Complex cl_raw = cy[6 * r.l_shell + r.l_slot];
      const Complex cj = r.j_conj ? std::conj(cj_raw) : cj_raw;
      const Complex cl = r.l_conj ? std::conj(cl_raw) : cl_raw;
      co[6 * r.out_shell + r.out_slot] += minus_two_pi_i * r.G * (cj * cl);
    }
  };

  Trajectory traj = integrate_core(prob, pack_galerkin(u0), cfg);
  traj.galerkin = true;
  traj.N = N;
  traj.model = model;
  return traj;
}

// ---------------------------------------------------------------------------
// Blowup detection

namespace {

// Least-squares fit of log g = c - p log(T - t); returns the residual sum of
// squares and the fitted (c, p).
double fit_given_T(const std::vector<double>& t, const std::vector<double>& lg,
                   size_t b, size_t e, double T, double& c_out, double& p_out) {
  const double n = static_cast<double>(e - b);
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (size_t i = b; i < e; ++i) {
    const double x = std::log(T - t[i]);
    sx += x;
    sy += lg[i];
    sxx += x * x;
    sxy += x * lg[i];
  }
  const double var = sxx - sx * sx / n;
  if (var <= 0) {
    c_out = sy / n;
    p_out = 0;
  } else {
    const double slope = (sxy - sx * sy / n) / var;
    p_out = -slope;
    c_out = (sy - slope * sx) / n;
  }
  double ssr = 0;
  for (size_t i = b; i < e; ++i) {
    const double x = std::log(T - t[i]);
    const double r = lg[i] - (c_out - p_out * x);
    ssr += r * r;
  }
  return ssr;
}

}  // namespace

BlowupReport detect_blowup(const std::vector<double>& t,
                           const std::vector<double>& g) {
  BlowupReport rep;
  if (t.size() != g.size() || t.size() < 8) {
    rep.note = "too few samples";
    return rep;
  }
  const size_t n = t.size();

  size_t i_peak = 0;
  double V = -std::numeric_limits<double>::infinity();
  for (size_t i = 0; i < n; ++i)
    if (g[i] > V) {
      V = g[i];
      i_peak = i;
    }
  if (!(V > 0) || !(g.front() > 0)) {
    rep.note = "nonpositive data";
    return rep;
  }
  rep.growth_decades = std::log10(V / g.front());
  if (rep.growth_decades < 2.0) {
    rep.note = "growth below two decades";
    return rep;
  }

  // Fit window: the final decade of growth, up to the peak.
  size_t b = 0;
  while (b < i_peak && g[b] < V / 10.0) ++b;
  size_t e = i_peak + 1;
  if (e - b < 5) b = (e >= 8) ? e - 8 : 0;
  if (e - b < 5) {
    rep.note = "window too small";
    return rep;
  }
  rep.window_begin = b;
  rep.window_end = e;

  std::vector<double> lg(n);
  for (size_t i = b; i < e; ++i) lg[i] = std::log(g[i]);
  const double span = std::max(t[e - 1] - t[b], 1e-300);

  // Outer search over the singular time: log-spaced scan, then golden-section
  // refinement over log(T - t_last).
  const double lo = std::log(1e-6 * span), hi = std::log(1e2 * span);
  const int scan = 121;
  double best_u = lo, best_ssr = std::numeric_limits<double>::infinity();
  double c_fit = 0, p_fit = 0;
  const auto ssr_at = [&](double u) {
    double c, p;
    const double ssr =
        fit_given_T(t, lg, b, e, t[e - 1] + std::exp(u), c, p);
    return ssr;
  };
  for (int k = 0; k < scan; ++k) {
    const double u = lo + (hi - lo) * k / (scan - 1);
    const double ssr = ssr_at(u);
    if (ssr < best_ssr) {
      best_ssr = ssr;
      best_u = u;
    }
  }
  double a = best_u - (hi - lo) / (scan - 1);
  double d = best_u + (hi - lo) / (scan - 1);
  const double gr = (std::sqrt(5.0) - 1.0) / 2.0;
  double x1 = d - gr * (d - a), x2 = a + gr * (d - a);
  double f1 = ssr_at(x1), f2 = ssr_at(x2);
  for (int it = 0; it < 80; ++it) {
    if (f1 <= f2) {
      d = x2;
      x2 = x1;
      f2 = f1;
      x1 = d - gr * (d - a);
      f1 = ssr_at(x1);
    } else {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + gr * (d - a);
      f2 = ssr_at(x2);
    }
  }
  best_u = (f1 <= f2) ? x1 : x2;
  best_ssr = fit_given_T(t, lg, b, e, t[e - 1] + std::exp(best_u), c_fit, p_fit);

  rep.T = t[e - 1] + std::exp(best_u);
  rep.exponent = p_fit;
  rep.log_amplitude = c_fit;
  rep.rms_residual = std::sqrt(best_ssr / static_cast<double>(e - b));
  rep.detected = rep.rms_residual < 0.1 && p_fit > 0;
  rep.note = rep.detected ? "power-law fit accepted" : "poor power-law fit";
  return rep;
}

BlowupReport detect_blowup(const Trajectory& traj) {
  // Discard the saturated regime: once the top shell carries a non-negligible
  // share of the energy, truncation stalls the growth and pollutes the fit.
  const size_t n = traj.t.size();
  size_t keep = n;
  for (size_t i = 0; i < n; ++i) {
    const Eigen::VectorXd& y = traj.y[i];
    double top, total = y.squaredNorm();
    if (traj.galerkin) {
      top = y.tail(12).squaredNorm();
    } else {
      top = y.tail(1).squaredNorm();
    }
    if (total > 0 && top / total > 1e-3) {
      keep = i;
      break;
    }
  }
  std::vector<double> tt(traj.t.begin(), traj.t.begin() + keep);
  std::vector<double> gg(traj.growth.begin(), traj.growth.begin() + keep);
  return detect_blowup(tt, gg);
}

}  // namespace cascade

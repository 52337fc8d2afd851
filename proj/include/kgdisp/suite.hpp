// suite.hpp — the acceptance suite: one function per criterion, each pinned to
// its stated tolerance, plus a runner that executes them in dependency order
// and reports one pass/fail line per criterion.
#pragma once

#include <iostream>
#include <sstream>

#include "kgdisp/decay.hpp"
#include "kgdisp/io.hpp"

namespace kgdisp {

struct CriterionResult {
  std::string id;
  std::string name;
  bool pass = false;
  std::string detail;
};

struct SuiteOptions {
  std::uint64_t seed = 1;
  int parallel = 1;
  std::string out_dir;  // empty: no artifacts
};

namespace suite_detail {

inline std::string fmt(double x) {
  char b[32];
  std::snprintf(b, sizeof b, "%.3g", x);
  return b;
}

inline double block_state_residual(const GridPtr& g, const ZMat& A, const ZMat& R,
                                   const std::vector<cd>& psi) {
  auto u = mul(R, psi);
  auto back = mul(A, u);
  double num = 0, den = 0;
  for (int i = 0; i < g->n; ++i) {
    if (std::abs(g->x[i]) > 0.75 * g->half_length) continue;
    num += std::norm(back[i] - psi[i]) + std::norm(back[i + g->n] - psi[i + g->n]);
    den += std::norm(psi[i]) + std::norm(psi[i + g->n]);
  }
  return std::sqrt(num / den);
}

inline std::vector<cd> gaussian_block_probe(const GridPtr& g) {
  std::vector<cd> psi(2 * g->n);
  for (int i = 0; i < g->n; ++i) {
    psi[i] = std::exp(-sq(g->x[i]));
    psi[i + g->n] = cd(0, 0.4) * std::exp(-sq(g->x[i] - 1.0));
  }
  return psi;
}

inline State gaussian_state(const GridPtr& g, double pi_amp = 0.0) {
  State s(g);
  for (int i = 0; i < g->n; ++i) {
    s.psi.v[i] = std::exp(-sq(g->x[i]));
    s.pi.v[i] = pi_amp * std::exp(-sq(g->x[i] - 0.5));
  }
  return s;
}

inline State bump_state(const GridPtr& g, double R) {
  State s(g);
  for (int i = 0; i < g->n; ++i) {
    double y = g->x[i] / R;
    if (std::abs(y) < 1.0) {
      double b = std::exp(-1.0 / (1.0 - y * y));
      s.psi.v[i] = b;
      s.pi.v[i] = 0.5 * b;
    }
  }
  return s;
}

}  // namespace suite_detail

// C1: free and perturbed block-resolvent residuals <= 1e-6 at 10 random
// off-cut lambda.
inline CriterionResult criterion_resolvent_residuals(const SuiteOptions& opt) {
  using namespace suite_detail;
  CriterionResult r{"C1", "resolvent residuals at random off-cut lambda", false, ""};
  ModelParams p(1.0, 0.3);
  auto g = Grid::make(30.0, 512);
  Potential pot = check_potential(power_potential(g, -0.5, 6.0), 6.0);
  std::vector<double> Vv = pot.samples;
  Rng rng(opt.seed);
  BranchPoint bp{p};
  auto psi = gaussian_block_probe(g);
  double worst_free = 0, worst_pert = 0;
  int done = 0;
  while (done < 10) {
    cd lam = rng.complex_in_box(-2.0, 2.0, -2.0, 2.0);
    if (std::abs(lam.real()) < 0.4) continue;
    if (bp.dist_to_cut(lam) < 0.3) continue;
    ++done;
    ResolventProbe pr(lam, p);
    ZMat A0 = block_generator_minus_lambda(g, p, lam, nullptr);
    worst_free = std::max(worst_free,
                          block_state_residual(g, A0, build_matrix_resolvent_free(g, pr), psi));
    ZMat A = block_generator_minus_lambda(g, p, lam, &Vv);
    worst_pert = std::max(
        worst_pert, block_state_residual(g, A, build_matrix_resolvent_perturbed(g, pr, pot), psi));
  }
  r.pass = worst_free <= 1e-6 && worst_pert <= 1e-6;
  r.detail = "max residual free " + fmt(worst_free) + ", perturbed " + fmt(worst_pert) +
             " (gate 1e-6, 10 probes)";
  return r;
}

// C2: Born identity closes to 1e-8; |lambda|^2-scaled W norms bounded by 2x
// their value at |lambda| = 2|mu| along {2,4,8,16}|mu|.
inline CriterionResult criterion_born(const SuiteOptions&) {
  using namespace suite_detail;
  CriterionResult r{"C2", "Born identity and V R0 V high-energy law", false, ""};
  ModelParams p(1.0, 0.3);
  auto g = Grid::make(30.0, 512);
  Potential pot = check_potential(power_potential(g, -0.5, 6.0), 6.0);
  BornReport b = born_identity_residual(g, ResolventProbe(cd(1.0, 2.0), p), pot);
  double first = -1, worst_ratio = 0;
  for (double c : {2.0, 4.0, 8.0, 16.0}) {
    cd lam(0, c * p.mu_abs());
    double scaled = vr0v_weighted_norm(g, ResolventProbe(lam, p, CutSide::plus), pot) * std::norm(lam);
    if (first < 0) first = scaled;
    worst_ratio = std::max(worst_ratio, scaled / first);
  }
  r.pass = b.rel_residual <= 1e-8 && worst_ratio <= 2.0;
  r.detail = "residual " + fmt(b.rel_residual) + " (gate 1e-8); scaled-W max/first " +
             fmt(worst_ratio) + " (gate 2)";
  return r;
}

// C3: LAP distances decrease monotonically for eps in {1e-1..1e-4} at three
// cut points, free and perturbed, both sides.
inline CriterionResult criterion_lap(const SuiteOptions&) {
  using namespace suite_detail;
  CriterionResult r{"C3", "limiting absorption: monotone sided convergence", false, ""};
  ModelParams p(1.0, 0.3);
  auto g = Grid::make(30.0, 512);
  Potential vz = zero_potential(g);
  Potential vp = check_potential(power_potential(g, -0.5, 6.0), 6.0);
  std::vector<double> eps{1e-1, 1e-2, 1e-3, 1e-4};
  bool all = true;
  std::string bad;
  for (double c : {1.5, 2.5, 4.0}) {
    cd lam(0, c * p.mu_abs());
    for (CutSide side : {CutSide::plus, CutSide::minus}) {
      for (const Potential* pot : {&vz, &vp}) {
        LapReport rep = lap_limit(g, p, lam, side, eps, *pot);
        if (!rep.monotone) {
          all = false;
          bad += " " + fmt(c) + "|mu|";
        }
      }
    }
  }
  r.pass = all;
  r.detail = all ? "12 ladders (3 cut points x 2 sides x {free,perturbed}) all monotone"
                 : ("non-monotone at" + bad);
  return r;
}

// C4: low-energy expansion ladders vary by < 10%, value and derivative laws,
// both signs. Run in the flat small-mass regime (the sqrt(nu) correction
// scales with m; see tests).
inline CriterionResult criterion_low_energy(const SuiteOptions&) {
  CriterionResult r{"C4", "low-energy expansion ladder flat to 10%", false, ""};
  ModelParams p(0.2, 0.0);
  auto g = Grid::make(30.0, 512);
  std::vector<double> nus{1e-1, 3e-2, 1e-2, 3e-3};
  double worst = 0, worst_d = 0;
  for (int sign : {+1, -1}) {
    LowEnergyReport rep = check_low_energy(g, p, sign, nus);
    worst = std::max(worst, rep.variation);
    worst_d = std::max(worst_d, rep.deriv_variation);
  }
  r.pass = worst < 0.10 && worst_d < 0.10;
  r.detail = "variation " + suite_detail::fmt(worst) + ", derivative-law " +
             suite_detail::fmt(worst_d) + " (gates 0.10; m=0.2, v=0)";
  return r;
}

// C5: Huygens principle: |psi(x,t)| < 1e-12 outside |x - v t| <= t + R.
inline CriterionResult criterion_huygens(const SuiteOptions&) {
  using namespace suite_detail;
  CriterionResult r{"C5", "Huygens support of the kernel flow", false, ""};
  auto g = Grid::make(40.0, 2048);
  const double R = 5.0;
  State s0 = bump_state(g, R);
  double worst = 0;
  for (double v : {0.0, 0.3, 0.6}) {
    ModelParams p(1.0, v);
    for (double t : {2.0, 4.0, 6.0}) {
      State s = evolve_free_kernel(s0, t, p, R);
      for (int i = 0; i < g->n; ++i)
        if (std::abs(g->x[i] - v * t) > t + R)
          worst = std::max(worst, std::max(std::abs(s.psi.v[i]), std::abs(s.pi.v[i])));
    }
  }
  r.pass = worst < 1e-12;
  r.detail = "max |Psi| outside the cone " + fmt(worst) + " (gate 1e-12)";
  return r;
}

// C6: energy conservation over [0, 50]: free drift <= 1e-8, extended
// functional with V != 0 <= 1e-7 (both along the RK4 flow).
inline CriterionResult criterion_energy(const SuiteOptions&) {
  using namespace suite_detail;
  CriterionResult r{"C6", "energy conservation over [0,50]", false, ""};
  ModelParams p(1.0, 0.5);
  auto g = Grid::make(30.0, 512);
  State s0 = gaussian_state(g, 0.4);
  double e0 = energy(s0, p);
  double drift_free =
      std::abs(energy(evolve_perturbed(s0, 50.0, 0.005, p, nullptr), p) - e0) / std::abs(e0);
  Potential pot = check_potential(sech2_potential(g, -0.7), 6.0);
  double ev0 = energy(s0, p, &pot);
  double drift_pert =
      std::abs(energy(evolve_perturbed(s0, 50.0, 0.005, p, &pot), p, &pot) - ev0) / std::abs(ev0);
  r.pass = drift_free <= 1e-8 && drift_pert <= 1e-7;
  r.detail = "free drift " + fmt(drift_free) + " (gate 1e-8), extended " + fmt(drift_pert) +
             " (gate 1e-7)";
  return r;
}

// C7: evolver cross-agreement at t = 5 within 1e-6 in F0.
inline CriterionResult criterion_cross_agreement(const SuiteOptions&) {
  using namespace suite_detail;
  CriterionResult r{"C7", "fourier / kernel / RK4 cross-agreement", false, ""};
  ModelParams p(1.0, 0.3);
  auto g = Grid::make(40.0, 1024);
  State s0 = gaussian_state(g, 0.4);
  State a = evolve_free_fourier(s0, 5.0, p);
  State b = evolve_free_kernel(s0, 5.0, p);
  State c = evolve_perturbed(s0, 5.0, 0.001, p, nullptr);
  double ab = energy_space_norm(a - b, 0.0);
  double ac = energy_space_norm(a - c, 0.0);
  double bc = energy_space_norm(b - c, 0.0);
  double worst = std::max({ab, ac, bc});
  r.pass = worst <= 1e-6;
  r.detail = "pairwise F0 distances " + fmt(ab) + ", " + fmt(ac) + ", " + fmt(bc) + " (gate 1e-6)";
  return r;
}

// C8: remainder and appendix-difference envelopes grow < 5% between t = 40
// and t = 80 for three (v, eps) pairs and k = 0, 1.
inline CriterionResult criterion_kernel_bounds(const SuiteOptions& opt) {
  CriterionResult r{"C8", "kernel envelope stability (t = 40 -> 80)", false, ""};
  std::vector<std::pair<double, double>> pairs{{0.0, 0.5}, {0.3, 0.6}, {0.5, 0.7}};
  std::vector<double> tset{10.0, 20.0, 40.0, 80.0};
  bool all = true;
  double worst_growth = -1;
  std::vector<EnvelopeReport> reps(pairs.size() * 4);
  parallel_for(pairs.size() * 4, opt.parallel, [&](std::size_t idx) {
    std::size_t pi_ = idx / 4;
    int k = int(idx % 4) / 2;
    bool qkind = (idx % 2) == 1;
    ModelParams p(1.0, pairs[pi_].first);
    reps[idx] = qkind ? check_q_bounds(p, pairs[pi_].second, k, tset)
                      : check_kernel_bound(p, pairs[pi_].second, k, tset);
  });
  for (auto& rep : reps) {
    if (!rep.stable) all = false;
    worst_growth = std::max(worst_growth, rep.growth);
  }
  r.pass = all;
  r.detail = "12 sweeps (3 pairs x k in {0,1} x {G_r, Q}); worst growth " +
             suite_detail::fmt(100 * worst_growth) + "% (gate 5%)";
  return r;
}

// C9: free remainder exponent in [-1.65, -1.35] for v in {0, 0.3}; full-group
// contrast -0.5 +- 0.1.
inline CriterionResult criterion_remainder_decay(const SuiteOptions&) {
  using namespace suite_detail;
  CriterionResult r{"C9", "free remainder decay exponent", false, ""};
  auto g = Grid::make(200.0, 4096);
  State s0 = gaussian_state(g);
  std::vector<double> times;
  for (int i = 0; i < 16; ++i) times.push_back(10.0 * std::pow(8.0, i / 15.0));
  bool ok = true;
  std::string det;
  for (double v : {0.0, 0.3}) {
    ModelParams p(1.0, v);
    RemainderDecayReport rep = verify_remainder_decay(s0, 3.0, times, 10.0, 80.0, p);
    bool this_ok = rep.fit_remainder.p >= -1.65 && rep.fit_remainder.p <= -1.35 &&
                   std::abs(rep.fit_full.p + 0.5) <= 0.1;
    ok = ok && this_ok;
    det += "v=" + fmt(v) + ": p_r=" + fmt(rep.fit_remainder.p) + ", p_full=" + fmt(rep.fit_full.p) +
           "; ";
  }
  r.pass = ok;
  r.detail = det + "(gates [-1.65,-1.35] and -0.5 +- 0.1)";
  return r;
}

// C10: high-frequency component decays with fitted exponent <= -1.35.
inline CriterionResult criterion_high_energy_decay(const SuiteOptions&) {
  using namespace suite_detail;
  CriterionResult r{"C10", "high-frequency component decay", false, ""};
  ModelParams p(1.0, 0.3);
  auto g = Grid::make(200.0, 4096);
  State s0 = gaussian_state(g);
  auto [low, high] = split_low_high(s0, 0.5 * p.mu_abs(), p);
  DecayTable tab;
  tab.sigma = 3.0;
  for (int i = 0; i < 16; ++i) {
    double t = 10.0 * std::pow(8.0, i / 15.0);
    tab.times.push_back(t);
    tab.norms.push_back(energy_space_norm(evolve_free_fourier(high, t, p), -3.0));
  }
  ExponentFit f = fit_exponent(tab, 10.0, 80.0);
  r.pass = f.p <= -1.35;
  r.detail = "fitted p = " + fmt(f.p) + " (gate <= -1.35)";
  return r;
}

// C11: spectral pipeline: Poeschl-Teller zeta1 = -1 +- 1e-5; mapped lambda
// match the dense generator to 1e-5; Riesz projections idempotent to 1e-6;
// V = 0 verdict is resonance.
inline CriterionResult criterion_spectral(const SuiteOptions& opt) {
  using namespace suite_detail;
  CriterionResult r{"C11", "spectral pipeline", false, ""};
  ModelParams p(1.0, 0.3);
  auto g = Grid::make(30.0, 512);
  auto gc = Grid::make(30.0, 256);

  Potential pt = check_potential(sech2_potential(g, -2.0 / sq(p.gamma())), 6.0);
  SchrodingerSpectrum ss = schrodinger_spectrum(pt, p);
  double zeta_err = ss.zetas.empty() ? 1e300 : std::abs(ss.zetas[0] + 1.0);

  Potential ptc = check_potential(sech2_potential(gc, -2.0 / sq(p.gamma())), 6.0);
  SpectralData sd = compute_spectral_data(ptc, p);
  Rng rng(opt.seed + 7);
  double eig_err = 0;
  for (int j = 0; j < sd.count(); ++j) {
    cd direct = direct_gap_eigenvalue(gc, p, ptc, sd.lambdas[j] + cd(0, 0.03), rng);
    eig_err = std::max(eig_err, std::abs(direct - sd.lambdas[j]));
  }
  double gapdist = p.mu_abs() - std::abs(sd.lambdas[0].imag());
  double radius = 0.8 * std::min(gapdist, 0.5 * std::abs(sd.lambdas[0] - sd.lambdas[1]));
  ZMat P0 = riesz_projection(gc, p, ptc, sd.lambdas[0], radius, sd.lambdas);
  double idem = (mul(P0, P0) - P0).frobenius();

  ResonanceResult free_r = detect_zero_resonance(zero_potential(g), p);

  r.pass = zeta_err <= 1e-5 && eig_err <= 1e-5 && idem <= 1e-6 &&
           free_r.verdict == ResonanceVerdict::resonance;
  r.detail = "zeta1 err " + fmt(zeta_err) + ", direct-eig err " + fmt(eig_err) + ", ||P^2-P|| " +
             fmt(idem) + ", free verdict " +
             (free_r.verdict == ResonanceVerdict::resonance ? "resonance" : "NOT resonance");
  return r;
}

// C12: main decay theorem: projected exponent in [-1.7, -1.3] forward and
// time-reversed; project/subtract path tables agree to 1e-6; a coupling just
// below a resonance threshold degrades the fit above -1.3.
inline CriterionResult criterion_full_decay(const SuiteOptions&) {
  using namespace suite_detail;
  CriterionResult r{"C12", "main theorem decay with spectral projection", false, ""};
  ModelParams p(1.0, 0.3);
  auto big = Grid::make(150.0, 4096);
  auto small = Grid::make(37.5, 1024);

  Potential pot_big = check_potential(power_potential(big, -2.0, 6.0), 6.0);
  Potential pot_small = check_potential(power_potential(small, -2.0, 6.0), 6.0);
  SpectralData sd = spectral_data_via_subgrid(pot_small, pot_big, p);

  State s0 = gaussian_state(big, 0.3);  // pi != 0 so the reversed run differs
  double n0 = energy_space_norm(s0, 3.0);
  s0 = cd(1.0 / n0, 0) * s0;

  FullDecayConfig cfg;
  for (int i = 0; i < 16; ++i) cfg.times.push_back(10.0 * std::pow(8.0, i / 15.0));
  cfg.dt = 0.03;
  FullDecayReport rep = verify_full_decay(s0, pot_big, sd, p, cfg);

  // negative control: sech2 family, coupling bisected to the first resonance
  // threshold (gamma^2 c = 2) and backed off by 0.5%
  Field base = sech2_potential(small, -1.0);
  double cstar = resonance_threshold_bisect(base, p, 1.0, 3.0);
  double cnear = cstar * 0.995;
  Potential ctrl_small = check_potential(sech2_potential(small, -cnear), 6.0);
  Potential ctrl_big = check_potential(sech2_potential(big, -cnear), 6.0);
  SpectralData sd_ctrl = spectral_data_via_subgrid(ctrl_small, ctrl_big, p);
  FullDecayConfig ctrl_cfg = cfg;
  ctrl_cfg.run_reverse = false;
  ctrl_cfg.pass_lo = -1e300;  // record the fit; the gate is p > -1.3
  ctrl_cfg.pass_hi = 1e300;
  FullDecayReport ctrl = verify_full_decay(s0, ctrl_big, sd_ctrl, p, ctrl_cfg);

  bool main_ok = rep.fit_forward.p >= -1.7 && rep.fit_forward.p <= -1.3 &&
                 rep.fit_reverse.p >= -1.7 && rep.fit_reverse.p <= -1.3;
  bool paths_ok = rep.path_disagreement <= 1e-6;
  bool ctrl_ok = ctrl.fit_forward.p > -1.3;
  r.pass = main_ok && paths_ok && ctrl_ok;
  r.detail = "p_fwd=" + fmt(rep.fit_forward.p) + ", p_rev=" + fmt(rep.fit_reverse.p) +
             " (gate [-1.7,-1.3]); paths " + fmt(rep.path_disagreement) +
             " (gate 1e-6); control p=" + fmt(ctrl.fit_forward.p) + " (gate > -1.3)";
  return r;
}

inline std::vector<CriterionResult> run_acceptance(const SuiteOptions& opt, std::ostream& log) {
  std::vector<CriterionResult> out;
  using Fn = CriterionResult (*)(const SuiteOptions&);
  // dependency order: kernels/resolvents first, spectral, evolution, decay
  const std::pair<const char*, Fn> criteria[] = {
      {"C1", &criterion_resolvent_residuals},
      {"C2", &criterion_born},
      {"C3", &criterion_lap},
      {"C4", &criterion_low_energy},
      {"C5", &criterion_huygens},
      {"C6", &criterion_energy},
      {"C7", &criterion_cross_agreement},
      {"C8", &criterion_kernel_bounds},
      {"C9", &criterion_remainder_decay},
      {"C10", &criterion_high_energy_decay},
      {"C11", &criterion_spectral},
      {"C12", &criterion_full_decay},
  };
  for (auto& [id, fn] : criteria) {
    CriterionResult cr;
    try {
      cr = fn(opt);
    } catch (const std::exception& e) {
      cr.id = id;
      cr.name = "criterion raised";
      cr.pass = false;
      cr.detail = e.what();
    }
    log << (cr.pass ? "[PASS] " : "[FAIL] ") << cr.id << " " << cr.name << " — " << cr.detail
        << std::endl;
    out.push_back(std::move(cr));
  }
  int failed = 0;
  for (const auto& c : out)
    if (!c.pass) ++failed;
  log << (failed == 0 ? "all criteria passed" : std::to_string(failed) + " criterion(s) failed")
      << std::endl;
  return out;
}

}  // namespace kgdisp

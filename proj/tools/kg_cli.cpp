// kg_cli — batch experiment runner.
//
// Subcommands:
//   evolve          trajectory dump (CSV)
//   decay-fit       remainder-decay or full projected-decay fit (CSV + JSON)
//   spectrum        bound states, gap eigenvalues, resonance verdict (JSON)
//   resolvent-probe LAP / low-energy / Born / high-energy sweeps (CSV)
//   kernel-bounds   remainder and Q envelope sweeps (CSV + JSON)
//   suite           full acceptance run (report JSON)
//   plot            render a CSV as a self-contained SVG
//
// Exit codes: 0 success, 1 validation failure, 2 numerical-check failure,
// 3 internal error. Every artifact carries the config hash.

#include <CLI11.hpp>
#include <fstream>
#include <iostream>
#include <json.hpp>

#include "kgdisp/io.hpp"
#include "kgdisp/suite.hpp"

using nlohmann::json;
using namespace kgdisp;

namespace {

struct Cli {
  std::string config_path;
  std::string out_dir = "out";
  std::uint64_t seed = 1;
  int parallel = 1;
};

json load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw invalid_input("cannot open config: " + path);
  json j;
  in >> j;
  return j;
}

struct Experiment {
  json cfg;
  std::string hash;
  ModelParams params{1.0, 0.0};
  GridPtr grid;
  std::string pot_kind = "none";
  double pot_amp = 0.0, pot_beta = 6.0;
  double dt = 0.02, t_max = 10.0, filter_eps_rel = 0.5;
  EvolveMethod method = EvolveMethod::fourier_free;
  double sigma = 3.0;
  std::vector<double> times;
  double window_lo = 10.0, window_hi = 80.0;
  std::uint64_t seed = 1;
  // initial data
  std::string init_kind = "gaussian";
  double init_width = 1.0, init_center = 0.0, init_pi = 0.0, init_radius = 5.0;

  Field potential_field(const GridPtr& g) const {
    if (pot_kind == "power") return power_potential(g, pot_amp, pot_beta);
    if (pot_kind == "sech2") return sech2_potential(g, pot_amp);
    if (pot_kind == "custom-samples") {
      Field f(g);
      auto samples = cfg.at("potential").at("samples").get<std::vector<double>>();
      if (int(samples.size()) != g->n)
        throw invalid_input("potential.samples length must equal grid.n");
      for (int i = 0; i < g->n; ++i) f.v[i] = samples[i];
      return f;
    }
    return Field(g);
  }

  bool has_potential() const { return pot_kind != "none"; }

  State initial_state() const {
    State s(grid);
    for (int i = 0; i < grid->n; ++i) {
      double x = grid->x[i] - init_center;
      if (init_kind == "gaussian") {
        s.psi.v[i] = std::exp(-sq(x / init_width));
        s.pi.v[i] = init_pi * std::exp(-sq(x / init_width));
      } else if (init_kind == "bump") {
        double y = x / init_radius;
        if (std::abs(y) < 1.0) {
          double b = std::exp(-1.0 / (1.0 - y * y));
          s.psi.v[i] = b;
          s.pi.v[i] = init_pi * b;
        }
      } else {
        throw invalid_input("initial.kind must be gaussian or bump");
      }
    }
    return s;
  }
};

Experiment parse_experiment(const json& j, std::uint64_t seed) {
  Experiment e;
  e.cfg = j;
  e.hash = hash_hex(fnv1a64(j.dump()));
  const json model = j.value("model", json::object());
  double m = model.value("m", 1.0), v = model.value("v", 0.0);
  if (!(m > 0)) throw invalid_input("model.m must be > 0");
  if (!(std::abs(v) < 1)) throw invalid_input("model.v must satisfy |v| < 1");
  e.params = ModelParams(m, v);
  const json grid = j.value("grid", json::object());
  e.grid = Grid::make(grid.value("L", 40.0), grid.value("n", 1024));
  const json pot = j.value("potential", json::object());
  e.pot_kind = pot.value("kind", std::string("none"));
  if (e.pot_kind != "none" && e.pot_kind != "power" && e.pot_kind != "sech2" &&
      e.pot_kind != "custom-samples")
    throw invalid_input("potential.kind must be none|power|sech2|custom-samples");
  e.pot_amp = pot.value("amplitude", -0.5);
  e.pot_beta = pot.value("beta", 6.0);
  const json evo = j.value("evolution", json::object());
  e.dt = evo.value("dt", 0.02);
  e.t_max = evo.value("t_max", 10.0);
  e.filter_eps_rel = evo.value("filter_eps", 0.5);
  std::string meth = evo.value("method", std::string("fourier-free"));
  if (meth == "fourier-free")
    e.method = EvolveMethod::fourier_free;
  else if (meth == "kernel-free")
    e.method = EvolveMethod::kernel_free;
  else if (meth == "rk4-perturbed")
    e.method = EvolveMethod::rk4_perturbed;
  else
    throw invalid_input("evolution.method must be fourier-free|kernel-free|rk4-perturbed");
  const json dec = j.value("decay", json::object());
  e.sigma = dec.value("sigma", 3.0);
  if (dec.contains("times"))
    e.times = dec.at("times").get<std::vector<double>>();
  else
    for (int i = 0; i < 16; ++i) e.times.push_back(10.0 * std::pow(8.0, i / 15.0));
  if (dec.contains("window")) {
    auto w = dec.at("window").get<std::vector<double>>();
    if (w.size() != 2 || !(w[0] < w[1])) throw invalid_input("decay.window must be [lo, hi]");
    e.window_lo = w[0];
    e.window_hi = w[1];
  }
  const json init = j.value("initial", json::object());
  e.init_kind = init.value("kind", std::string("gaussian"));
  e.init_width = init.value("width", 1.0);
  e.init_center = init.value("center", 0.0);
  e.init_pi = init.value("pi_amplitude", 0.0);
  e.init_radius = init.value("radius", 5.0);
  e.seed = j.value("seed", seed);

  EvolutionConfig ec;
  ec.dt = e.dt;
  ec.t_max = e.t_max;
  ec.method = e.method;
  ec.validate(*e.grid);
  return e;
}

void write_json(const json& j, const std::string& path) {
  std::filesystem::path p(path);
  if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path());
  std::ofstream out(path);
  out << j.dump(2) << "\n";
}

// ---- subcommands ---------------------------------------------------------------

int cmd_evolve(const Experiment& e, const Cli& cli) {
  State s = e.initial_state();
  Potential pot = e.has_potential() ? check_potential(e.potential_field(e.grid), e.pot_beta)
                                    : zero_potential(e.grid);
  const int frames = 9;
  CsvWriter csv(cli.out_dir + "/trajectory.csv", e.hash, "t,x,re_psi,im_psi,re_pi,im_pi");
  int stride = std::max(1, e.grid->n / 512);
  auto dump = [&](double t, const State& st) {
    for (int i = 0; i < e.grid->n; i += stride)
      csv.row({t, e.grid->x[i], st.psi.v[i].real(), st.psi.v[i].imag(), st.pi.v[i].real(),
               st.pi.v[i].imag()});
  };
  dump(0.0, s);
  if (e.method == EvolveMethod::rk4_perturbed) {
    std::vector<double> times;
    for (int f = 1; f <= frames; ++f) times.push_back(e.t_max * f / frames);
    evolve_rk4_sampled(s, times, e.dt, e.params, e.has_potential() ? &pot : nullptr,
                       [&](std::size_t i, const State& st) { dump(times[i], st); });
  } else {
    for (int f = 1; f <= frames; ++f) {
      double t = e.t_max * f / frames;
      dump(t, e.method == EvolveMethod::fourier_free ? evolve_free_fourier(s, t, e.params)
                                                     : evolve_free_kernel(s, t, e.params));
    }
  }
  std::cout << "wrote " << cli.out_dir << "/trajectory.csv (config " << e.hash << ")\n";
  return 0;
}

int cmd_spectrum(const Experiment& e, const Cli& cli) {
  Potential pot = e.has_potential() ? check_potential(e.potential_field(e.grid), e.pot_beta)
                                    : zero_potential(e.grid);
  SpectralData sd = compute_spectral_data(pot, e.params);
  json out;
  out["config"] = e.hash;
  out["zetas"] = sd.zetas;
  out["anomalies"] = sd.anomalies;
  json lam = json::array();
  for (const cd& l : sd.lambdas) lam.push_back({l.real(), l.imag()});
  out["lambdas"] = lam;
  out["wronskian"] = sd.resonance.wronskian;
  out["tau"] = sd.resonance.tau;
  out["verdict"] = sd.resonance.verdict == ResonanceVerdict::regular      ? "regular"
                   : sd.resonance.verdict == ResonanceVerdict::resonance ? "resonance"
                                                                          : "eigenvalue";
  write_json(out, cli.out_dir + "/spectrum.json");
  std::cout << out.dump(2) << "\n";
  return 0;
}

int cmd_decay_fit(const Experiment& e, const Cli& cli) {
  State s0 = e.initial_state();
  double n0 = energy_space_norm(s0, e.sigma);
  s0 = cd(1.0 / n0, 0) * s0;
  json rep;
  rep["config"] = e.hash;
  bool pass = false;
  if (!e.has_potential()) {
    RemainderDecayReport r =
        verify_remainder_decay(s0, e.sigma, e.times, e.window_lo, e.window_hi, e.params);
    write_decay_csv(r.remainder, cli.out_dir + "/decay_remainder.csv", e.hash);
    write_decay_csv(r.full_group, cli.out_dir + "/decay_full_group.csv", e.hash);
    rep["p"] = r.fit_remainder.p;
    rep["C"] = r.fit_remainder.C;
    rep["residual"] = r.fit_remainder.residual_rms;
    rep["window"] = {r.fit_remainder.window_lo, r.fit_remainder.window_hi};
    rep["p_full_group"] = r.fit_full.p;
    pass = r.fit_remainder.p >= -1.65 && r.fit_remainder.p <= -1.35;
  } else {
    Potential pot = check_potential(e.potential_field(e.grid), e.pot_beta);
    SpectralData sd = compute_spectral_data(pot, e.params);
    FullDecayConfig cfg;
    cfg.sigma = e.sigma;
    cfg.times = e.times;
    cfg.window_lo = e.window_lo;
    cfg.window_hi = e.window_hi;
    cfg.dt = e.dt;
    FullDecayReport r = verify_full_decay(s0, pot, sd, e.params, cfg);
    write_decay_csv(r.table_forward, cli.out_dir + "/decay_projected.csv", e.hash);
    rep["p"] = r.fit_forward.p;
    rep["C"] = r.fit_forward.C;
    rep["residual"] = r.fit_forward.residual_rms;
    rep["window"] = {r.fit_forward.window_lo, r.fit_forward.window_hi};
    rep["p_reverse"] = r.fit_reverse.p;
    rep["path_disagreement"] = r.path_disagreement;
    rep["sigma_count"] = r.sigma_count;
    pass = r.pass;
  }
  rep["pass"] = pass;
  write_json(rep, cli.out_dir + "/decay_fit.json");
  std::cout << rep.dump(2) << "\n";
  return pass ? 0 : 2;
}

int cmd_resolvent_probe(const Experiment& e, const Cli& cli) {
  ModelParams p = e.params;
  const GridPtr& g = e.grid;
  Potential pot = e.has_potential() ? check_potential(e.potential_field(g), e.pot_beta)
                                    : zero_potential(g);
  CsvWriter csv(cli.out_dir + "/resolvent_sweeps.csv", e.hash, "lambda_re,lambda_im,quantity,value");
  auto put = [&](cd lam, const std::string& q, double val) {
    csv.out << fmt_g17(lam.real()) << "," << fmt_g17(lam.imag()) << "," << q << "," << fmt_g17(val)
            << "\n";
  };
  // LAP ladder at 1.5|mu|
  cd lam_cut(0, 1.5 * p.mu_abs());
  std::vector<double> eps{1e-1, 1e-2, 1e-3, 1e-4};
  LapReport lap = lap_limit(g, p, lam_cut, CutSide::plus, eps, pot);
  for (std::size_t i = 0; i < lap.eps.size(); ++i)
    put(lam_cut + lap.eps[i], "lap_distance", lap.dist[i]);
  // low-energy ladder
  std::vector<double> nus{1e-1, 3e-2, 1e-2, 3e-3};
  bool nu_ok = nus[0] <= 0.5 * p.mu_abs();
  if (nu_ok) {
    LowEnergyReport le = check_low_energy(g, p, +1, nus);
    for (std::size_t i = 0; i < le.nu.size(); ++i) {
      put(p.mu() + le.nu[i], "low_energy_r", le.r[i]);
      put(p.mu() + le.nu[i], "low_energy_r_deriv", le.r_deriv[i]);
    }
  }
  // Born residual and high-energy ladders
  ResolventProbe prb(cd(1.0, 2.0), p);
  put(prb.lambda, "born_residual", born_identity_residual(g, prb, pot).rel_residual);
  for (double c : {2.0, 4.0, 8.0, 16.0}) {
    cd lam(0, c * p.mu_abs());
    ResolventProbe pr(lam, p, CutSide::plus);
    put(lam, "w_norm_scaled", vr0v_weighted_norm(g, pr, pot) * std::norm(lam));
    KernelPair kp = detail::perturbed_kernel_pair(g, pr, pot);
    put(lam, "scalar_weighted_norm", whs_weighted(kp.M, g, -1.0));
    put(lam, "block_surrogate",
        block_surrogate(e.has_potential() ? build_matrix_resolvent_perturbed(g, pr, pot)
                                          : build_matrix_resolvent_free(g, pr),
                        g, 1.0));
  }
  std::cout << "wrote " << cli.out_dir << "/resolvent_sweeps.csv (config " << e.hash << ")"
            << (nu_ok ? "" : " [low-energy ladder skipped: nu > |mu|/2]") << "\n";
  return 0;
}

int cmd_kernel_bounds(const Experiment& e, const Cli& cli) {
  double eps = std::abs(e.params.v) + (1.0 - std::abs(e.params.v)) * 0.4;
  std::vector<double> tset{10.0, 20.0, 40.0, 80.0};
  json rep;
  rep["config"] = e.hash;
  CsvWriter csv(cli.out_dir + "/kernel_bounds.csv", e.hash, "z,t,k,ratio");
  bool stable = true;
  for (int k : {0, 1}) {
    EnvelopeReport r = check_kernel_bound(e.params, eps, k, tset);
    for (const auto& row : r.rows) csv.row({row.z, row.t, double(row.k), row.ratio});
    rep["remainder_k" + std::to_string(k)] = {{"c_envelope", r.c_envelope},
                                              {"growth", r.growth},
                                              {"stable", r.stable}};
    stable = stable && r.stable;
    EnvelopeReport q = check_q_bounds(e.params, eps, k, tset);
    rep["q_k" + std::to_string(k)] = {{"c_envelope", q.c_envelope},
                                      {"growth", q.growth},
                                      {"stable", q.stable}};
    stable = stable && q.stable;
  }
  rep["eps"] = eps;
  rep["pass"] = stable;
  write_json(rep, cli.out_dir + "/kernel_bounds.json");
  std::cout << rep.dump(2) << "\n";
  return stable ? 0 : 2;
}

int cmd_suite(const Experiment& e, const Cli& cli) {
  SuiteOptions opt;
  opt.seed = e.seed;
  opt.parallel = cli.parallel;
  opt.out_dir = cli.out_dir;
  auto results = run_acceptance(opt, std::cout);
  json rep;
  rep["config"] = e.hash;
  json arr = json::array();
  std::string first_fail;
  for (const auto& r : results) {
    arr.push_back({{"id", r.id}, {"name", r.name}, {"pass", r.pass}, {"detail", r.detail}});
    if (!r.pass && first_fail.empty()) first_fail = r.id;
  }
  rep["criteria"] = arr;
  rep["pass"] = first_fail.empty();
  write_json(rep, cli.out_dir + "/acceptance.json");
  if (!first_fail.empty()) {
    std::cerr << "numerical-check failure at criterion " << first_fail << "\n";
    return 2;
  }
  return 0;
}

int cmd_plot(const std::string& csv_path, const std::string& kind, const Cli& cli) {
  std::ifstream in(csv_path);
  if (!in) throw invalid_input("cannot open csv: " + csv_path);
  std::string line, hash = "unknown";
  std::vector<std::vector<double>> cols;
  while (std::getline(in, line)) {
    if (line.rfind("# config ", 0) == 0) {
      hash = line.substr(9);
      continue;
    }
    if (line.empty() || !(std::isdigit(line[0]) || line[0] == '-' || line[0] == '+')) continue;
    std::stringstream ss(line);
    std::string cell;
    std::size_t c = 0;
    while (std::getline(ss, cell, ',')) {
      try {
        double val = std::stod(cell);
        if (cols.size() <= c) cols.resize(c + 1);
        cols[c].push_back(val);
      } catch (...) {
        break;  // non-numeric trailing column (labels)
      }
      ++c;
    }
  }
  if (cols.size() < 2 || cols[0].empty()) throw invalid_input("csv schema mismatch for plot");
  std::string out = cli.out_dir + "/plot.svg";
  if (kind == "loglog")
    svg_loglog(cols[0], cols[1], out, "log-log with t^{-3/2} reference", hash);
  else if (kind == "field") {
    std::vector<std::vector<double>> series(cols.begin() + 1, cols.end());
    svg_field(cols[0], series, out, "field profile", hash);
  } else if (kind == "sweep")
    svg_sweep(cols[0], cols[1], out, "sweep", hash);
  else
    throw invalid_input("plot kind must be loglog|field|sweep");
  std::cout << "wrote " << out << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"moving-frame Klein-Gordon dispersive-decay laboratory"};
  app.require_subcommand(1);
  Cli cli;
  if (const char* s = std::getenv("KGDISP_SEED")) cli.seed = std::strtoull(s, nullptr, 10);
  if (const char* s = std::getenv("KGDISP_OUT")) cli.out_dir = s;
  if (const char* s = std::getenv("KGDISP_PARALLEL")) cli.parallel = std::atoi(s);

  std::string plot_csv, plot_kind = "loglog";
  auto add_common = [&](CLI::App* sub, bool needs_config) {
    if (needs_config) sub->add_option("--config", cli.config_path, "config JSON")->required();
    sub->add_option("--out", cli.out_dir, "output directory");
    sub->add_option("--seed", cli.seed, "seed for randomized probes");
    sub->add_option("--parallel", cli.parallel, "worker threads for sweeps");
  };
  CLI::App* evolve = app.add_subcommand("evolve", "trajectory dump");
  CLI::App* decay = app.add_subcommand("decay-fit", "decay-exponent fit");
  CLI::App* spect = app.add_subcommand("spectrum", "spectral data JSON");
  CLI::App* rprobe = app.add_subcommand("resolvent-probe", "lambda sweeps");
  CLI::App* kbound = app.add_subcommand("kernel-bounds", "envelope sweeps");
  CLI::App* suite = app.add_subcommand("suite", "full acceptance run");
  CLI::App* plot = app.add_subcommand("plot", "CSV to SVG");
  for (CLI::App* s : {evolve, decay, spect, rprobe, kbound, suite}) add_common(s, true);
  plot->add_option("--csv", plot_csv, "input CSV")->required();
  plot->add_option("--kind", plot_kind, "loglog|field|sweep");
  add_common(plot, false);

  CLI11_PARSE(app, argc, argv);

  try {
    if (plot->parsed()) return cmd_plot(plot_csv, plot_kind, cli);
    Experiment e = parse_experiment(load_config(cli.config_path), cli.seed);
    if (evolve->parsed()) return cmd_evolve(e, cli);
    if (decay->parsed()) return cmd_decay_fit(e, cli);
    if (spect->parsed()) return cmd_spectrum(e, cli);
    if (rprobe->parsed()) return cmd_resolvent_probe(e, cli);
    if (kbound->parsed()) return cmd_kernel_bounds(e, cli);
    if (suite->parsed()) return cmd_suite(e, cli);
    return 3;
  } catch (const invalid_input& ex) {
    std::cerr << nlohmann::json{{"error", "validation"}, {"what", ex.what()}}.dump() << "\n";
    return 1;
  } catch (const admissibility_error& ex) {
    std::cerr << nlohmann::json{{"error", "admissibility"}, {"what", ex.what()}}.dump() << "\n";
    return 1;
  } catch (const domain_error& ex) {
    std::cerr << nlohmann::json{{"error", "domain"}, {"what", ex.what()}}.dump() << "\n";
    return 1;
  } catch (const box_too_small_error& ex) {
    std::cerr << nlohmann::json{{"error", "box_too_small"}, {"what", ex.what()}}.dump() << "\n";
    return 1;
  } catch (const inconclusive_error& ex) {
    std::cerr << nlohmann::json{{"error", "inconclusive"}, {"what", ex.what()}}.dump() << "\n";
    return 2;
  } catch (const spectral_point_error& ex) {
    std::cerr << nlohmann::json{{"error", "spectral_point"}, {"what", ex.what()}}.dump() << "\n";
    return 2;
  } catch (const std::exception& ex) {
    std::cerr << nlohmann::json{{"error", "internal"}, {"what", ex.what()}}.dump() << "\n";
    return 3;
  }
}

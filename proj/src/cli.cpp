#include "nfield/cli.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <random>
#include <sstream>

#include "nfield/config.hpp"
#include "nfield/errors.hpp"
#include "nfield/hopf.hpp"
#include "nfield/simulate.hpp"

namespace nfield {

using nlohmann::json;

namespace {

json cjson(cplx v) { return json::array({v.real(), v.imag()}); }

// Accepts "re", "re,im" or "re+imi"/"re-imi".
cplx parse_complex(const std::string& s) {
  std::string t;
  for (char ch : s)
    if (ch != ' ') t.push_back(ch);
  try {
    const auto comma = t.find(',');
    if (comma != std::string::npos) return {std::stod(t.substr(0, comma)), std::stod(t.substr(comma + 1))};
    if (!t.empty() && (t.back() == 'i' || t.back() == 'j')) {
      const std::string body = t.substr(0, t.size() - 1);
      for (std::size_t p = body.size(); p-- > 1;) {
        if ((body[p] == '+' || body[p] == '-') && body[p - 1] != 'e' && body[p - 1] != 'E')
          return {std::stod(body.substr(0, p)), std::stod(body.substr(p))};
      }
      return {0.0, body.empty() || body == "+" ? 1.0 : body == "-" ? -1.0 : std::stod(body)};
    }
    std::size_t used = 0;
    const double v = std::stod(t, &used);
    if (used != t.size()) throw std::invalid_argument(s);
    return {v, 0.0};
  } catch (const std::logic_error&) {
    throw ConfigError("cannot parse complex number '" + s + "'");
  }
}

std::vector<double> parse_list(const std::string& s, std::size_t expected, const char* what) {
  std::vector<double> v;
  std::stringstream ss(s);
  std::string item;
  try {
    while (std::getline(ss, item, ',')) v.push_back(std::stod(item));
  } catch (const std::logic_error&) {
    throw ConfigError(std::string("cannot parse ") + what + " '" + s + "'");
  }
  if (v.size() != expected) throw ConfigError(std::string(what) + " needs " + std::to_string(expected) + " values");
  return v;
}

json eigenpair_json(const EigenPair& p) {
  return {{"z", cjson(p.z)},
          {"rho", cjson(p.rho)},
          {"nu", cjson(p.nu)},
          {"parity_x", to_string(p.parity_x)},
          {"parity_y", to_string(p.parity_y)},
          {"residuals",
           {{"newton", p.residual_newton},
            {"poly", p.residual_poly},
            {"bc_x", p.residual_bc_x},
            {"bc_y", p.residual_bc_y},
            {"delta", p.residual_delta}}}};
}

json hopf_json(const HopfResult& h) {
  return {{"c_hat_critical", h.c_hat_critical},
          {"omega", h.omega},
          {"eigenpair", eigenpair_json(h.eigenpair)},
          {"bracket", {h.bracket_lo, h.bracket_hi}},
          {"bisections", h.bracket_widths.size()},
          {"continuation_steps", h.continuation_steps}};
}

json lyapunov_json(const LyapunovResult& r) {
  return {{"z", cjson(r.z)},
          {"g21", cjson(r.g21)},
          {"l1", r.l1},
          {"constancy_rel_std", r.constancy_rel_std},
          {"interior_points", r.interior_points},
          {"settings",
           {{"epsilon", r.settings.epsilon},
            {"n_z", r.settings.n_z},
            {"n_x", r.settings.n_x},
            {"n_y", r.settings.n_y},
            {"nodes", r.settings.nodes}}}};
}

std::filesystem::path ensure_dir(const std::string& dir) {
  std::filesystem::path p(dir);
  std::error_code ec;
  std::filesystem::create_directories(p, ec);
  if (ec) throw ConfigError("cannot create output directory '" + dir + "': " + ec.message());
  return p;
}

std::ofstream open_out(const std::filesystem::path& p) {
  std::ofstream f(p);
  if (!f) throw ConfigError("cannot write '" + p.string() + "'");
  f << std::setprecision(17);
  return f;
}

void write_g21_line(const LyapunovResult& r, const ModelParams& params, const std::filesystem::path& dir) {
  auto f = open_out(dir / "g21_line.csv");
  f << "x,re_g21,im_g21\n";
  const int n = 201;
  for (int i = 0; i < n; ++i) {
    const double x = -params.a + 2.0 * params.a * i / (n - 1);
    const cplx v = r.field_at({x, 0.0});
    f << x << "," << v.real() << "," << v.imag() << "\n";
  }
  auto g = open_out(dir / "g21_line.gp");
  g << "set datafile separator ','\nset xlabel 'x'\nset ylabel 'g21(x, 0)'\n"
       "plot 'g21_line.csv' every ::1 using 1:2 with lines title 'Re', '' every ::1 using 1:3 with lines title 'Im'\n";
}

void write_trajectory(const Trajectory& tr, const std::vector<Point2>& probes, const std::filesystem::path& dir,
                      const std::string& stem) {
  auto f = open_out(dir / (stem + "_probes.csv"));
  f << "t";
  for (std::size_t p = 0; p < probes.size(); ++p) f << ",V_" << p;
  f << "\n";
  for (std::size_t n = 0; n < tr.times.size(); ++n) {
    f << tr.times[n];
    for (const auto& s : tr.probe_series) f << "," << s[n];
    f << "\n";
  }
  for (std::size_t s = 0; s < tr.snapshots.size(); ++s) {
    std::ostringstream name;
    name << stem << "_snapshot_" << std::setw(5) << std::setfill('0') << s << ".dat";
    auto m = open_out(dir / name.str());
    const Snapshot& snap = tr.snapshots[s];
    m << "# t = " << snap.t << "\n# rows: x nodes, columns: y nodes (gnuplot 'matrix nonuniform' layout)\n";
    m << tr.nodes_y.size();
    for (double y : tr.nodes_y) m << " " << y;
    m << "\n";
    for (Eigen::Index i = 0; i < snap.values.rows(); ++i) {
      m << tr.nodes_x[static_cast<std::size_t>(i)];
      for (Eigen::Index j = 0; j < snap.values.cols(); ++j) m << " " << snap.values(i, j);
      m << "\n";
    }
  }
  auto g = open_out(dir / (stem + ".gp"));
  g << "set datafile separator ','\nset xlabel 't'\nset ylabel 'V'\nplot ";
  for (std::size_t p = 0; p < probes.size(); ++p)
    g << (p ? ", " : "") << "'" << stem << "_probes.csv' every ::1 using 1:" << p + 2 << " with lines title 'probe "
      << p << "'";
  g << "\n";
}

struct Context {
  RunConfig cfg;
  std::string config_path;
  std::string out_dir;
  std::ostream* out = nullptr;
  std::ostream* err = nullptr;
};

HopfResult run_hopf(const RunConfig& cfg) {
  HopfSettings hs;
  hs.step = cfg.hopf.step;
  return hopf_find(cfg.model, cfg.hopf.lo, cfg.hopf.hi, cfg.hopf.parity_x, cfg.hopf.parity_y, std::nullopt, hs);
}

LyapunovResult run_lyapunov(const RunConfig& cfg, const HopfResult& h) {
  LyapunovSettings ls;
  ls.epsilon = cfg.lyapunov.epsilon;
  ls.n_z = cfg.lyapunov.n_z;
  ls.n_x = cfg.lyapunov.n_x;
  ls.n_y = cfg.lyapunov.n_y;
  ls.nodes = cfg.quadrature.operator_nodes;
  return g21_compute(h.eigenpair, with_c_hat(cfg.model, h.c_hat_critical), ls);
}

SimConfig sim_config(const RunConfig& cfg, const std::optional<EigenPair>& mode) {
  SimConfig sc;
  sc.n_grid = cfg.simulate.n_grid;
  sc.dt = cfg.simulate.dt;
  sc.t_end = cfg.simulate.t_end;
  sc.probes = cfg.simulate.probes;
  sc.snapshot_stride = cfg.simulate.snapshot_stride;
  if (cfg.simulate.history == "zero") {
    sc.history.kind = HistorySpec::Kind::Constant;
    sc.history.value = 0.0;
  } else if (cfg.simulate.history == "constant") {
    sc.history.kind = HistorySpec::Kind::Constant;
    sc.history.value = cfg.simulate.amplitude;
  } else {
    sc.history.kind = HistorySpec::Kind::Eigenmode;
    sc.history.amplitude = cfg.simulate.amplitude;
    sc.history.mode = mode;
  }
  return sc;
}

json simulation_summary(const Trajectory& tr, double t_window_lo, double t_window_hi) {
  json j = {{"initial_sup", tr.initial_sup}, {"final_sup", tr.sup_norm.back()}, {"t_end", tr.times.back()},
            {"bound", tr.bound}};
  try {
    const PeriodEstimate pe = dominant_period(tr.times, tr.probe_series.at(0), t_window_lo, t_window_hi);
    j["period"] = pe.period;
    j["period_spread"] = pe.spread;
  } catch (const NoOscillation&) {
    j["period"] = nullptr;
  }
  return j;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Spectral analysis and simulation of a delayed neural field on a rectangle", "nfield"};
  app.require_subcommand(1);
  Context ctx;
  ctx.out = &out;
  ctx.err = &err;
  app.add_option("--config", ctx.config_path, "JSON run configuration (defaults to the reference model)");
  app.add_option("--out", ctx.out_dir, "Directory for CSV, matrix and gnuplot files");

  // slp-roots
  auto* slp = app.add_subcommand("slp-roots", "Roots of the Robin Sturm-Liouville problem as CSV");
  std::string k_str = "0";
  double halfwidth = 1.0;
  std::size_t count = 10;
  slp->add_option("--k", k_str, "Robin coefficient k (re,im)")->required();
  slp->add_option("--halfwidth", halfwidth, "Interval half-width");
  slp->add_option("--count", count, "Number of roots");

  auto* spec = app.add_subcommand("spectrum", "Point spectrum in a complex window as JSON");
  std::string window_str;
  spec->add_option("--window", window_str, "re_lo,re_hi,im_lo,im_hi");

  auto* cls = app.add_subcommand("classify", "Classify a spectral parameter z");
  std::string z_str;
  cls->add_option("--z", z_str, "Complex z (re or re,im)")->required()->allow_extra_args(false);

  auto* rchk = app.add_subcommand("resolvent-check", "Resolvent round-trip error at z");
  std::string rz_str = "0.5";
  std::size_t r_nodes = 64, r_modes = 3;
  unsigned r_seed = 7;
  rchk->add_option("--z", rz_str, "Complex z");
  rchk->add_option("--nodes", r_nodes, "Quadrature nodes per axis");
  rchk->add_option("--modes", r_modes, "Truncation n_x = n_y");
  rchk->add_option("--seed", r_seed, "Seed of the random combination");

  auto* hopf = app.add_subcommand("hopf", "Locate a Hopf bifurcation in c_hat");
  std::string range_str;
  hopf->add_option("--range", range_str, "lo,hi");

  auto* lyap = app.add_subcommand("lyapunov", "First Lyapunov coefficient at the Hopf point");
  double eps = -1.0;
  std::size_t nz = 0;
  lyap->add_option("--epsilon", eps, "Contour radius");
  lyap->add_option("--nz", nz, "Contour points");

  auto* sim = app.add_subcommand("simulate", "Direct simulation of the nonlinear model");
  std::optional<double> sim_chat, sim_dt, sim_tend, sim_amp;
  std::optional<std::size_t> sim_grid, sim_stride;
  std::string sim_history;
  std::vector<std::string> sim_probes;
  sim->add_option("--c-hat", sim_chat, "Kernel amplitude of the first term");
  sim->add_option("--n-grid", sim_grid, "Nodes per axis");
  sim->add_option("--dt", sim_dt, "Time step");
  sim->add_option("--t-end", sim_tend, "Horizon");
  sim->add_option("--history", sim_history, "zero | constant | eigenmode");
  sim->add_option("--amplitude", sim_amp, "History amplitude");
  sim->add_option("--probe", sim_probes, "Probe point x,y (repeatable)");
  sim->add_option("--snapshot-stride", sim_stride, "Steps between snapshots (0 disables)");

  auto* repro = app.add_subcommand("reproduce-paper", "Hopf point, Lyapunov coefficient and two simulations");

  std::vector<std::string> argv_rev(args.rbegin(), args.rend());
  try {
    app.parse(argv_rev);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n\n" << app.help();
    return kExitConfig;
  }

  try {
    RunConfig& cfg = ctx.cfg;
    if (!ctx.config_path.empty()) cfg = load_run_config(ctx.config_path);
    if (ctx.out_dir.empty()) ctx.out_dir = cfg.output_dir;
    out << std::setprecision(17);

    if (slp->parsed()) {
      SlpDiagnostics diag;
      const auto roots = slp_roots(parse_complex(k_str), halfwidth, count, &diag);
      out << "index,re_rho,im_rho,parity,residual\n";
      for (const auto& r : roots)
        out << r.index << "," << r.rho.real() << "," << r.rho.imag() << "," << to_string(r.parity) << ","
            << r.residual << "\n";
      return kExitOk;
    }
    if (spec->parsed()) {
      Window w = cfg.spectrum.window;
      if (!window_str.empty()) {
        const auto v = parse_list(window_str, 4, "window");
        w = {v[0], v[1], v[2], v[3]};
      }
      ScanSettings s;
      s.n_seeds = cfg.spectrum.n_seeds;
      s.mode_lo = cfg.spectrum.mode_lo;
      s.mode_hi = cfg.spectrum.mode_hi;
      s.extra_seeds = cfg.spectrum.seeds;
      const SpectrumReport rep = spectrum_scan(cfg.model, w, s);
      json pairs = json::array();
      for (const auto& p : rep.eigenpairs) pairs.push_back(eigenpair_json(p));
      json j = {{"window", {w.re_lo, w.re_hi, w.im_lo, w.im_hi}},
                {"essential_point", cjson(rep.essential_point)},
                {"minus_xi", {{"value", cjson(rep.minus_xi_value)}, {"eigenvalue", rep.minus_xi_eigenvalue}}},
                {"seeds_used", rep.seeds_used},
                {"converged", rep.converged},
                {"failed", rep.failed},
                {"eigenpairs", pairs}};
      out << j.dump(2) << "\n";
      return kExitOk;
    }
    if (cls->parsed()) {
      const Classification c = classify(parse_complex(z_str), cfg.model, cfg.lyapunov.n_x, cfg.lyapunov.n_y);
      json j = {{"kind", to_string(c.kind)}, {"margin", c.margin}};
      if (c.eigenpair) j["eigenpair"] = eigenpair_json(*c.eigenpair);
      if (c.kind == ZKind::Resonant) j["constant_mode"] = c.constant_mode;
      out << j.dump(2) << "\n";
      return kExitOk;
    }
    if (rchk->parsed()) {
      const cplx z = parse_complex(rz_str);
      auto grid = std::make_shared<const QuadGrid>(QuadGrid::rectangle(cfg.model.a, cfg.model.b, r_nodes, r_nodes));
      const BasisSet basis = basis_build(z, cfg.model, r_modes, r_modes, grid);
      std::mt19937 rng(r_seed);
      std::uniform_int_distribution<std::size_t> pick(0, basis.raw.size() - 1);
      std::normal_distribution<double> coef;
      ComplexField g(grid);
      for (int t = 0; t < 4; ++t) g += cplx(coef(rng), coef(rng)) * basis.raw[pick(rng)];
      const ComplexField q = resolve(basis, g, cfg.model);
      const double e = norm(apply_delta(z, q, cfg.model) - g) / norm(g);
      out << json{{"z", cjson(z)}, {"nodes", r_nodes}, {"modes", r_modes}, {"relative_error", e}}.dump(2) << "\n";
      return kExitOk;
    }
    if (hopf->parsed()) {
      if (!range_str.empty()) {
        const auto v = parse_list(range_str, 2, "range");
        cfg.hopf.lo = v[0];
        cfg.hopf.hi = v[1];
      }
      out << hopf_json(run_hopf(cfg)).dump(2) << "\n";
      return kExitOk;
    }
    if (lyap->parsed()) {
      if (eps > 0.0) cfg.lyapunov.epsilon = eps;
      if (nz > 0) cfg.lyapunov.n_z = nz;
      const HopfResult h = run_hopf(cfg);
      const LyapunovResult r = run_lyapunov(cfg, h);
      json j = lyapunov_json(r);
      j["c_hat_critical"] = h.c_hat_critical;
      out << j.dump(2) << "\n";
      if (!ctx.out_dir.empty()) write_g21_line(r, cfg.model, ensure_dir(ctx.out_dir));
      return kExitOk;
    }
    if (sim->parsed()) {
      if (sim_grid) cfg.simulate.n_grid = *sim_grid;
      if (sim_dt) cfg.simulate.dt = *sim_dt;
      if (sim_tend) cfg.simulate.t_end = *sim_tend;
      if (sim_amp) cfg.simulate.amplitude = *sim_amp;
      if (sim_stride) cfg.simulate.snapshot_stride = *sim_stride;
      if (!sim_history.empty()) cfg.simulate.history = sim_history;
      if (!sim_probes.empty()) {
        cfg.simulate.probes.clear();
        for (const auto& p : sim_probes) {
          const auto v = parse_list(p, 2, "probe");
          cfg.simulate.probes.push_back({v[0], v[1]});
        }
      }
      if (cfg.simulate.history != "zero" && cfg.simulate.history != "constant" && cfg.simulate.history != "eigenmode")
        throw ConfigError("--history must be zero, constant or eigenmode");
      std::optional<EigenPair> mode;
      if (cfg.simulate.history == "eigenmode") mode = run_hopf(cfg).eigenpair;
      const ModelParams model = sim_chat ? with_c_hat(cfg.model, *sim_chat) : cfg.model;
      const SimConfig sc = sim_config(cfg, mode);
      const Trajectory tr = simulate(model, sc);
      json j = simulation_summary(tr, 0.5 * sc.t_end, sc.t_end);
      j["c_hat"] = model.terms[0].c_hat.real();
      j["history"] = cfg.simulate.history;
      j["amplitude"] = cfg.simulate.amplitude;
      out << j.dump(2) << "\n";
      if (!ctx.out_dir.empty()) write_trajectory(tr, sc.probes, ensure_dir(ctx.out_dir), "simulation");
      return kExitOk;
    }
    if (repro->parsed()) {
      const HopfResult h = run_hopf(cfg);
      const LyapunovResult l = run_lyapunov(cfg, h);
      const double omega_target = h.omega;
      json sims = json::array();
      RunConfig sim_cfg = cfg;
      sim_cfg.simulate.history = "eigenmode";
      std::optional<std::filesystem::path> dir;
      if (!ctx.out_dir.empty()) dir = ensure_dir(ctx.out_dir);
      for (std::size_t r = 0; r < cfg.simulate.c_hat_runs.size(); ++r) {
        const double ch = cfg.simulate.c_hat_runs[r];
        const Trajectory tr = simulate(with_c_hat(cfg.model, ch), sim_config(sim_cfg, h.eigenpair));
        json s = simulation_summary(tr, 0.5 * sim_cfg.simulate.t_end, sim_cfg.simulate.t_end);
        s["c_hat"] = ch;
        s["decay_ratio"] = tr.sup_norm.back() / tr.initial_sup;
        sims.push_back(s);
        if (dir) write_trajectory(tr, sim_cfg.simulate.probes, *dir, "simulation_" + std::to_string(r));
      }
      auto check = [](double v, double lo, double hi) { return json{{"value", v}, {"range", {lo, hi}}, {"pass", v >= lo && v <= hi}}; };
      json checks = {{"c_hat_critical", check(h.c_hat_critical, -3.29, -3.25)},
                     {"omega", check(omega_target, 1.33, 1.35)},
                     {"l1", check(l.l1, -1.651, -1.493)}};
      const bool all = checks["c_hat_critical"]["pass"].get<bool>() && checks["omega"]["pass"].get<bool>() &&
                       checks["l1"]["pass"].get<bool>();
      json j = {{"hopf", hopf_json(h)}, {"lyapunov", lyapunov_json(l)}, {"simulations", sims}, {"checks", checks},
                {"all_pass", all}};
      out << j.dump(2) << "\n";
      if (dir) {
        auto f = open_out(*dir / "summary.json");
        f << j.dump(2) << "\n";
        write_g21_line(l, cfg.model, *dir);
      }
      return all ? kExitOk : kExitNumerical;
    }
    return kExitConfig;
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const InvalidArgument& e) {
    err << "invalid argument: " << e.what() << "\n";
    return kExitConfig;
  } catch (const Error& e) {
    err << "numerical failure: " << e.what() << "\n";
    return kExitNumerical;
  }
}

int run(int argc, char** argv) {
  std::vector<std::string> args;
  for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
  return run(args, std::cout, std::cerr);
}

}  // namespace nfield

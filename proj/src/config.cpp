#include "nfield/config.hpp"

#include <fstream>
#include <sstream>

#include "nfield/errors.hpp"

namespace nfield {

using nlohmann::json;

bool SpectrumSection::operator==(const SpectrumSection& o) const {
  auto same_window = [](const Window& l, const Window& r) {
    return l.re_lo == r.re_lo && l.re_hi == r.re_hi && l.im_lo == r.im_lo && l.im_hi == r.im_hi;
  };
  if (!same_window(window, o.window) || n_seeds != o.n_seeds || mode_lo != o.mode_lo || mode_hi != o.mode_hi ||
      seeds.size() != o.seeds.size())
    return false;
  for (std::size_t i = 0; i < seeds.size(); ++i)
    if (seeds[i].z != o.seeds[i].z || seeds[i].rho != o.seeds[i].rho || seeds[i].nu != o.seeds[i].nu) return false;
  return true;
}

namespace {

json cjson(cplx v) { return json::array({v.real(), v.imag()}); }

cplx cparse(const json& j, const std::string& key) {
  if (j.is_number()) return {j.get<double>(), 0.0};
  if (j.is_array() && j.size() == 2 && j[0].is_number() && j[1].is_number()) return {j[0].get<double>(), j[1].get<double>()};
  throw ConfigError("'" + key + "' must be a number or [re, im]");
}

template <class T>
void read(const json& j, const char* key, T& out, const std::string& section) {
  if (!j.contains(key)) return;
  try {
    out = j.at(key).get<T>();
  } catch (const json::exception&) {
    throw ConfigError("bad value for '" + section + "." + key + "'");
  }
}

void check_keys(const json& j, std::initializer_list<const char*> known, const std::string& where) {
  for (const auto& item : j.items()) {
    bool ok = false;
    for (const char* k : known) ok = ok || item.key() == k;
    if (!ok) throw ConfigError("unknown key '" + item.key() + "' in " + where);
  }
}

const json& section(const json& j, const char* name, std::initializer_list<const char*> known) {
  static const json empty = json::object();
  if (!j.contains(name)) return empty;
  if (!j.at(name).is_object()) throw ConfigError(std::string("section '") + name + "' must be an object");
  check_keys(j.at(name), known, std::string("section '") + name + "'");
  return j.at(name);
}

}  // namespace

void to_json(json& j, const RunConfig& c) {
  j = json::object();
  j["model"] = c.model;

  json seeds = json::array();
  for (const auto& s : c.spectrum.seeds) seeds.push_back({{"z", cjson(s.z)}, {"rho", cjson(s.rho)}, {"nu", cjson(s.nu)}});
  j["spectrum"] = {{"window", {c.spectrum.window.re_lo, c.spectrum.window.re_hi, c.spectrum.window.im_lo, c.spectrum.window.im_hi}},
                   {"n_seeds", c.spectrum.n_seeds},
                   {"mode_range", {c.spectrum.mode_lo, c.spectrum.mode_hi}},
                   {"seeds", seeds}};
  j["hopf"] = {{"range", {c.hopf.lo, c.hopf.hi}},
               {"parity_x", to_string(c.hopf.parity_x)},
               {"parity_y", to_string(c.hopf.parity_y)},
               {"step", c.hopf.step}};
  j["lyapunov"] = {{"epsilon", c.lyapunov.epsilon}, {"n_z", c.lyapunov.n_z}, {"n_x", c.lyapunov.n_x}, {"n_y", c.lyapunov.n_y}};
  json probes = json::array();
  for (const auto& p : c.simulate.probes) probes.push_back({p.x, p.y});
  j["simulate"] = {{"n_grid", c.simulate.n_grid},       {"dt", c.simulate.dt},
                   {"t_end", c.simulate.t_end},         {"history", c.simulate.history},
                   {"amplitude", c.simulate.amplitude}, {"probes", probes},
                   {"snapshot_stride", c.simulate.snapshot_stride}, {"c_hat_runs", c.simulate.c_hat_runs}};
  j["quadrature"] = {{"operator_nodes", c.quadrature.operator_nodes}, {"check_nodes", c.quadrature.check_nodes}};
  j["output_dir"] = c.output_dir;
}

void from_json(const json& j, RunConfig& c) {
  if (!j.is_object()) throw ConfigError("configuration must be a JSON object");
  if (!j.contains("model")) throw ConfigError("configuration needs a 'model' section");
  check_keys(j, {"model", "spectrum", "hopf", "lyapunov", "simulate", "quadrature", "output_dir"}, "configuration");
  c = RunConfig{};
  c.model = j.at("model").get<ModelParams>();

  const json& sp = section(j, "spectrum", {"window", "n_seeds", "mode_range", "seeds"});
  if (sp.contains("window")) {
    const json& w = sp.at("window");
    if (!w.is_array() || w.size() != 4) throw ConfigError("'spectrum.window' must be [re_lo, re_hi, im_lo, im_hi]");
    c.spectrum.window = {w[0].get<double>(), w[1].get<double>(), w[2].get<double>(), w[3].get<double>()};
  }
  read(sp, "n_seeds", c.spectrum.n_seeds, "spectrum");
  if (sp.contains("mode_range")) {
    const json& m = sp.at("mode_range");
    if (!m.is_array() || m.size() != 2) throw ConfigError("'spectrum.mode_range' must be [lo, hi]");
    c.spectrum.mode_lo = m[0].get<int>();
    c.spectrum.mode_hi = m[1].get<int>();
  }
  if (sp.contains("seeds")) {
    for (const json& s : sp.at("seeds")) {
      if (!s.contains("z") || !s.contains("rho") || !s.contains("nu"))
        throw ConfigError("each spectrum seed needs 'z', 'rho' and 'nu'");
      c.spectrum.seeds.push_back({cparse(s.at("z"), "z"), cparse(s.at("rho"), "rho"), cparse(s.at("nu"), "nu")});
    }
  }

  const json& hp = section(j, "hopf", {"range", "parity_x", "parity_y", "step"});
  if (hp.contains("range")) {
    const json& r = hp.at("range");
    if (!r.is_array() || r.size() != 2) throw ConfigError("'hopf.range' must be [lo, hi]");
    c.hopf.lo = r[0].get<double>();
    c.hopf.hi = r[1].get<double>();
  }
  if (hp.contains("parity_x")) c.hopf.parity_x = parity_from_string(hp.at("parity_x").get<std::string>());
  if (hp.contains("parity_y")) c.hopf.parity_y = parity_from_string(hp.at("parity_y").get<std::string>());
  read(hp, "step", c.hopf.step, "hopf");

  const json& ly = section(j, "lyapunov", {"epsilon", "n_z", "n_x", "n_y"});
  read(ly, "epsilon", c.lyapunov.epsilon, "lyapunov");
  read(ly, "n_z", c.lyapunov.n_z, "lyapunov");
  read(ly, "n_x", c.lyapunov.n_x, "lyapunov");
  read(ly, "n_y", c.lyapunov.n_y, "lyapunov");

  const json& si = section(j, "simulate", {"n_grid", "dt", "t_end", "history", "amplitude", "probes", "snapshot_stride", "c_hat_runs"});
  read(si, "n_grid", c.simulate.n_grid, "simulate");
  read(si, "dt", c.simulate.dt, "simulate");
  read(si, "t_end", c.simulate.t_end, "simulate");
  read(si, "history", c.simulate.history, "simulate");
  read(si, "amplitude", c.simulate.amplitude, "simulate");
  read(si, "snapshot_stride", c.simulate.snapshot_stride, "simulate");
  read(si, "c_hat_runs", c.simulate.c_hat_runs, "simulate");
  if (si.contains("probes")) {
    c.simulate.probes.clear();
    for (const json& p : si.at("probes")) {
      if (!p.is_array() || p.size() != 2) throw ConfigError("each probe must be [x, y]");
      c.simulate.probes.push_back({p[0].get<double>(), p[1].get<double>()});
    }
  }
  if (c.simulate.history != "zero" && c.simulate.history != "constant" && c.simulate.history != "eigenmode")
    throw ConfigError("'simulate.history' must be zero, constant or eigenmode");

  const json& qu = section(j, "quadrature", {"operator_nodes", "check_nodes"});
  read(qu, "operator_nodes", c.quadrature.operator_nodes, "quadrature");
  read(qu, "check_nodes", c.quadrature.check_nodes, "quadrature");
  if (c.quadrature.operator_nodes < 2 || c.quadrature.check_nodes < 2)
    throw ConfigError("quadrature node counts must be at least 2");

  read(j, "output_dir", c.output_dir, "config");
}

RunConfig parse_run_config(const std::string& text, const std::string& origin) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    // Translate the byte offset into line/column and quote the line.
    std::size_t line = 1, col = 1, line_start = 0;
    const std::size_t stop = std::min<std::size_t>(e.byte > 0 ? e.byte - 1 : 0, text.size());
    for (std::size_t i = 0; i < stop; ++i) {
      if (text[i] == '\n') {
        ++line;
        col = 1;
        line_start = i + 1;
      } else {
        ++col;
      }
    }
    const std::size_t line_end = text.find('\n', line_start);
    std::ostringstream os;
    os << origin << ":" << line << ":" << col << ": JSON syntax error\n  "
       << text.substr(line_start, line_end == std::string::npos ? std::string::npos : line_end - line_start);
    throw ConfigError(os.str());
  }
  try {
    return j.get<RunConfig>();
  } catch (const ConfigError& e) {
    throw ConfigError(origin + ": " + e.what());
  } catch (const json::exception& e) {
    throw ConfigError(origin + ": " + e.what());
  }
}

RunConfig load_run_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_run_config(ss.str(), path);
}

}  // namespace nfield

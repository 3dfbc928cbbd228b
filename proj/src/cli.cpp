#include "hypofrac/cli.hpp"

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <iostream>
#include <map>
#include <memory>
#include <sstream>

#include "CLI11.hpp"

#include "hypofrac/common.hpp"
#include "hypofrac/fbm.hpp"
#include "hypofrac/frac.hpp"
#include "hypofrac/hormander.hpp"
#include "hypofrac/io.hpp"
#include "hypofrac/malliavin.hpp"
#include "hypofrac/norris.hpp"
#include "hypofrac/parallel.hpp"
#include "hypofrac/sde.hpp"
#include "hypofrac/smalltime.hpp"

namespace hypofrac::cli {

namespace {

using io::json;
using Params = std::map<std::string, std::string>;

constexpr int kManifestSchema = 1;

struct Output {
  std::string path;
  std::string role;
};

struct Command {
  std::vector<std::string> name;  // e.g. {"fbm", "sample"}
  Params defaults;
  std::vector<std::string> required;
  std::map<std::string, std::string> help;
  std::function<std::vector<Output>(const Params&)> run;
};

// ---- parameter parsing ----

double get_double(const Params& p, const std::string& key) {
  const std::string& s = p.at(key);
  try {
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw DomainError("--" + key + ": expected a number, got '" + s + "'");
  }
}

std::uint64_t get_u64(const Params& p, const std::string& key) {
  const std::string& s = p.at(key);
  try {
    std::size_t used = 0;
    if (!s.empty() && s[0] == '-') throw std::invalid_argument(s);
    const auto v = std::stoull(s, &used);
    if (used != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw DomainError("--" + key + ": expected a non-negative integer, got '" + s + "'");
  }
}

std::size_t get_size(const Params& p, const std::string& key, std::size_t min = 1) {
  const auto v = get_u64(p, key);
  if (v < min) throw DomainError("--" + key + " must be at least " + std::to_string(min));
  return static_cast<std::size_t>(v);
}

Hurst get_hurst(const Params& p) { return Hurst(get_double(p, "hurst")); }

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream in(s);
  while (std::getline(in, cur, sep)) out.push_back(cur);
  return out;
}

std::vector<double> parse_number_list(const std::string& key, const std::string& s) {
  std::vector<double> out;
  for (const auto& part : split(s, ',')) {
    Params tmp{{key, part}};
    out.push_back(get_double(tmp, key));
  }
  return out;
}

/// "a,b,c" | "lo:hi:log" (one point per decade) | "lo:hi:Nlog" | "lo:hi:N" (linear).
std::vector<double> parse_grid(const Params& p, const std::string& key) {
  const std::string& s = p.at(key);
  if (s.find(':') == std::string::npos) return parse_number_list(key, s);
  const auto parts = split(s, ':');
  if (parts.size() != 3) throw DomainError("--" + key + ": expected lo:hi:spec, got '" + s + "'");
  Params tmp{{"a", parts[0]}, {"b", parts[1]}};
  double lo = get_double(tmp, "a"), hi = get_double(tmp, "b");
  const std::string& spec = parts[2];
  const bool descending = lo > hi;
  if (descending) std::swap(lo, hi);
  std::vector<double> out;
  if (spec.size() >= 3 && spec.substr(spec.size() - 3) == "log") {
    if (!(lo > 0.0)) throw DomainError("--" + key + ": log grids need positive end points");
    std::size_t count = 0;
    if (spec == "log") {
      const double decades = std::log10(hi / lo);
      count = static_cast<std::size_t>(std::llround(decades)) + 1;
      if (std::abs(decades - std::round(decades)) > 1e-9 || count < 2) {
        throw DomainError("--" + key + ": 'log' needs end points a whole number of decades apart");
      }
    } else {
      Params c{{key, spec.substr(0, spec.size() - 3)}};
      count = get_size(c, key, 2);
    }
    out = smalltime::log_grid(lo, hi, count);
  } else {
    Params c{{key, spec}};
    const std::size_t count = get_size(c, key, 2);
    for (std::size_t i = 0; i < count; ++i) {
      out.push_back(lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(count - 1));
    }
  }
  if (descending) std::reverse(out.begin(), out.end());
  return out;
}

std::string absolute(const std::string& path) {
  if (path.empty()) return path;
  return std::filesystem::absolute(path).lexically_normal().string();
}

poly::VectorFieldSystem get_system(const Params& p, const std::string& key) {
  const std::string& path = p.at(key);
  if (path.empty()) throw DomainError("--" + key + " is required");
  return io::load_system(path);
}

Vec get_point(const Params& p, const std::string& key, const poly::VectorFieldSystem& sys) {
  const std::string& s = p.at(key);
  if (s.empty()) return sys.start();
  const auto v = parse_number_list(key, s);
  if (v.size() != sys.n) {
    throw DomainError("--" + key + ": expected " + std::to_string(sys.n) + " coordinates, got " +
                      std::to_string(v.size()));
  }
  return Eigen::Map<const Vec>(v.data(), static_cast<Eigen::Index>(v.size()));
}

enum class Format { natural, json, csv };

Format get_format(const Params& p) {
  const auto& f = p.at("format");
  if (f.empty()) return Format::natural;
  if (f == "json") return Format::json;
  if (f == "csv") return Format::csv;
  throw DomainError("--format must be json or csv, got '" + f + "'");
}

void require_json(const Params& p, const std::string& what) {
  if (get_format(p) == Format::csv) throw DomainError("--format csv is not available for " + what + "; reports are JSON");
}

json paths_json(const std::vector<fbm::FbmPath>& paths) {
  json a = json::array();
  for (const auto& p : paths) a.push_back({{"path_id", p.path_id}, {"values", io::to_json(p.values)}});
  return {{"meta", io::fbm_meta(paths)}, {"paths", a}};
}

// ---- commands ----

std::vector<Output> run_fbm_sample(const Params& p) {
  const Hurst h = get_hurst(p);
  const TimeGrid grid(get_size(p, "steps"), get_double(p, "horizon"));
  const auto method = fbm::parse_method(p.at("method"));
  const auto paths = method == fbm::Method::cholesky
                         ? fbm::sample_cholesky(h, grid, get_size(p, "dim"), get_size(p, "paths"), get_u64(p, "seed"))
                         : fbm::sample_volterra(h, grid, get_size(p, "dim"), get_size(p, "paths"), get_u64(p, "seed"));
  const std::string& out = p.at("out");
  if (get_format(p) == Format::json) {
    io::write_text(out, paths_json(paths).dump(2) + "\n");
    return {{out, "primary"}};
  }
  io::write_text(out, io::fbm_csv(paths));
  io::write_text(out + ".meta.json", io::fbm_meta(paths).dump(2) + "\n");
  return {{out, "primary"}, {out + ".meta.json", "meta"}};
}

std::vector<Output> run_frac_reprh(const Params& p) {
  require_json(p, "frac check-reprh");
  const auto rep = frac::check_reprh(get_hurst(p), get_size(p, "steps", 2), get_size(p, "pairs"), get_u64(p, "seed"));
  json payload = io::to_json(rep);
  payload["tolerance"] = 0.01;
  payload["pass"] = rep.max_rel_error <= 0.01;
  io::write_text(p.at("out"), io::envelope(payload, {}));
  return {{p.at("out"), "primary"}};
}

std::vector<Output> run_sde_solve(const Params& p) {
  const auto sys = get_system(p, "config");
  const Vec x0 = get_point(p, "x0", sys);
  const Hurst h = get_hurst(p);
  const TimeGrid grid(get_size(p, "steps"), get_double(p, "horizon"));
  const auto scheme = sde::parse_scheme(p.at("scheme"));
  const auto n_paths = get_size(p, "paths");
  const auto seed = get_u64(p, "seed");
  const fbm::CholeskySampler sampler(h, grid);
  std::vector<std::optional<sde::SdeSolution>> sols(n_paths);
  for_each_index(default_exec(), n_paths, [&](std::size_t i) {
    const auto driver = sampler.sample_one(sys.d, i, seed);
    sols[i] = sde::solve(sys, x0, driver, scheme);
  });
  std::vector<sde::SdeSolution> flat;
  for (auto& s : sols) flat.push_back(std::move(*s));
  const std::string& out = p.at("out");
  if (get_format(p) == Format::json) {
    json a = json::array();
    for (std::size_t i = 0; i < flat.size(); ++i) a.push_back({{"path_id", i}, {"X", io::to_json(flat[i].X)}});
    io::write_text(out, json{{"n_steps", grid.steps()}, {"horizon", grid.horizon()}, {"paths", a}}.dump(2) + "\n");
  } else {
    io::write_text(out, io::solutions_csv(flat));
  }
  return {{out, "primary"}};
}

std::vector<Output> run_malliavin_gamma(const Params& p) {
  require_json(p, "malliavin gamma");
  const auto sys = get_system(p, "config");
  const Vec x0 = get_point(p, "x0", sys);
  const Hurst h = get_hurst(p);
  const TimeGrid grid(get_size(p, "steps"));
  const fbm::CholeskySampler sampler(h, grid);
  const auto driver = sampler.sample_one(sys.d, 0, get_u64(p, "seed"));
  const auto sol = sde::solve(sys, x0, grid, driver.values, sde::parse_scheme(p.at("scheme")), true);
  const auto rep = malliavin::malliavin_report(sol, h);
  json payload = io::to_json(rep);
  payload["x_T"] = io::to_json(Vec(sol.state(grid.steps())));
  payload["J_T"] = io::to_json(sol.J.back());
  payload["inverse_defect"] = sde::inverse_defect(sol);
  std::vector<std::string> warnings;
  if (rep.gamma_eigenvalues.size() && rep.gamma_eigenvalues[0] <= 0.0) {
    warnings.push_back("gamma has a non-positive eigenvalue on this path");
  }
  io::write_text(p.at("out"), io::envelope(payload, warnings));
  return {{p.at("out"), "primary"}};
}

std::vector<Output> run_malliavin_probe(const Params& p) {
  require_json(p, "malliavin probe");
  const auto sys = get_system(p, "config");
  const Vec x0 = get_point(p, "x0", sys);
  const auto seed = get_u64(p, "seed");
  const auto dirs = malliavin::probe_directions(sys.n, get_size(p, "random-directions", 0), seed);
  const auto rep = malliavin::eigen_probe(sys, x0, get_hurst(p), dirs, parse_grid(p, "eps"), get_size(p, "paths"),
                                          get_size(p, "steps"), seed);
  std::vector<std::string> warnings;
  if (rep.blowups) warnings.push_back(std::to_string(rep.blowups) + " paths blew up and were excluded");
  io::write_text(p.at("out"), io::envelope(io::to_json(rep), warnings));
  return {{p.at("out"), "primary"}};
}

std::vector<Output> run_norris_sweep(const Params& p) {
  require_json(p, "norris sweep");
  norris::SweepConfig cfg;
  cfg.eps_grid = parse_grid(p, "eps");
  if (!p.at("q-grid").empty()) cfg.q_grid = parse_grid(p, "q-grid");
  cfg.n_paths = get_size(p, "paths");
  cfg.n_steps = get_size(p, "steps");
  cfg.seed = get_u64(p, "seed");
  cfg.random_directions = get_size(p, "random-directions", 0);
  const auto scenario = norris::parse_scenario(p.at("scenario"));
  poly::VectorFieldSystem sys;
  if (!p.at("config").empty()) sys = get_system(p, "config");
  const auto rep = norris::norris_sweep(scenario, get_hurst(p), cfg, sys);
  io::write_text(p.at("out"), io::envelope(io::to_json(rep), {}));
  return {{p.at("out"), "primary"}};
}

std::vector<Output> run_norris_concentration(const Params& p) {
  require_json(p, "norris concentration");
  norris::CoarseQvConfig cfg{get_double(p, "delta"), get_double(p, "Delta")};
  const auto rep = norris::concentration_scaling(get_hurst(p), cfg, get_size(p, "paths"), get_u64(p, "seed"),
                                                 get_double(p, "tolerance"));
  json payload = io::to_json(rep);
  payload["hs"] = io::to_json(norris::hs_bound_check(get_hurst(p)));
  io::write_text(p.at("out"), io::envelope(payload, {}));
  return {{p.at("out"), "primary"}};
}

std::vector<Output> run_hormander_check(const Params& p) {
  require_json(p, "hormander check");
  const auto sys = get_system(p, "fields");
  Vec x = Vec::Zero(static_cast<Eigen::Index>(sys.n));
  if (!p.at("point").empty() || sys.x0) x = get_point(p, "point", sys);
  const auto level = get_size(p, "max-level");
  const auto mode = hormander::parse_mode(p.at("mode"));
  json payload;
  payload["mode"] = hormander::to_string(mode);
  payload["max_level"] = level;
  payload["check"] = io::to_json(hormander::hormander_check(sys, x, level, mode));
  payload["flag"] = io::to_json(hormander::strong_hormander_flag(sys, x, level));
  std::vector<std::string> warnings;
  if (!payload["check"]["satisfied"].get<bool>()) {
    warnings.push_back("rank not full up to level " + std::to_string(level));
  }
  io::write_text(p.at("out"), io::envelope(payload, warnings));
  return {{p.at("out"), "primary"}};
}

std::vector<Output> run_smalltime_exponent(const Params& p) {
  require_json(p, "smalltime exponent");
  const auto sys = get_system(p, "config");
  const Vec x0 = get_point(p, "x0", sys);
  const Hurst h = get_hurst(p);
  smalltime::DensityConfig cfg;
  cfg.n_paths = get_size(p, "paths");
  cfg.n_steps = get_size(p, "steps");
  cfg.batches = get_size(p, "batches", 2);
  cfg.seed = get_u64(p, "seed");
  const auto tgrid = parse_grid(p, "tgrid");
  const auto pts = smalltime::density_estimate(sys, x0, h, tgrid, cfg);
  std::vector<double> t, kde, se, knn;
  json loglog = json::array();
  for (const auto& pt : pts) {
    t.push_back(pt.t);
    kde.push_back(pt.kde);
    se.push_back(pt.kde_se);
    knn.push_back(pt.knn);
    loglog.push_back({{"log_t", std::log(pt.t)}, {"log_kde", std::log(pt.kde)}, {"log_knn", std::log(pt.knn)}});
  }
  json payload;
  payload["hurst"] = h.value();
  payload["points"] = io::to_json(pts);
  payload["loglog"] = loglog;
  const auto flag = hormander::strong_hormander_flag(sys, x0, 6);
  payload["homogeneous_dimension"] = flag.D ? json(*flag.D) : json(nullptr);
  payload["predicted_slope"] = flag.D ? json(-h.value() * static_cast<double>(*flag.D)) : json(nullptr);
  std::vector<std::string> warnings;
  auto fit = [&](const char* key, const std::vector<double>& val, const std::vector<double>& err) {
    try {
      const auto f = smalltime::exponent_fit(t, val, err);
      payload[key] = io::to_json(f);
      for (const auto& w : f.warnings) warnings.push_back(std::string(key) + ": " + w);
    } catch (const DomainError& e) {
      payload[key] = nullptr;
      warnings.push_back(std::string(key) + ": " + e.what());
    }
  };
  fit("fit_kde", kde, se);
  fit("fit_knn", knn, {});
  io::write_text(p.at("out"), io::envelope(payload, warnings));
  return {{p.at("out"), "primary"}};
}

std::vector<Command> commands() {
  const Params common{{"format", ""}, {"out", ""}};
  auto with = [&](Params extra) {
    extra.insert(common.begin(), common.end());
    return extra;
  };
  std::vector<Command> cs;
  cs.push_back({{"fbm", "sample"},
                with({{"hurst", "0.7"}, {"dim", "1"}, {"steps", "256"}, {"paths", "1"}, {"seed", "1"},
                      {"method", "cholesky"}, {"horizon", "1"}}),
                {"out"},
                {{"method", "cholesky|volterra"}},
                run_fbm_sample});
  cs.push_back({{"frac", "check-reprh"},
                with({{"hurst", "0.7"}, {"steps", "1024"}, {"pairs", "50"}, {"seed", "1"}}),
                {"out"},
                {},
                run_frac_reprh});
  cs.push_back({{"sde", "solve"},
                with({{"config", ""}, {"hurst", "0.7"}, {"steps", "256"}, {"paths", "1"}, {"seed", "1"},
                      {"scheme", "euler"}, {"x0", ""}, {"horizon", "1"}}),
                {"config", "out"},
                {{"scheme", "euler|heun"}, {"x0", "comma-separated start point (default: system x0)"}},
                run_sde_solve});
  cs.push_back({{"malliavin", "gamma"},
                with({{"config", ""}, {"hurst", "0.7"}, {"steps", "256"}, {"seed", "1"}, {"scheme", "euler"},
                      {"x0", ""}}),
                {"config", "out"},
                {},
                run_malliavin_gamma});
  cs.push_back({{"malliavin", "probe"},
                with({{"config", ""}, {"hurst", "0.7"}, {"steps", "128"}, {"seed", "1"}, {"eps", "1e-1,1e-2,1e-3"},
                      {"paths", "1000"}, {"random-directions", "32"}, {"x0", ""}}),
                {"config", "out"},
                {},
                run_malliavin_probe});
  cs.push_back({{"norris", "sweep"},
                with({{"hurst", "0.7"}, {"eps", "1e-1:1e-3:log"}, {"q-grid", ""}, {"paths", "10000"},
                      {"steps", "256"}, {"scenario", "pullback"}, {"seed", "1"}, {"config", ""},
                      {"random-directions", "4"}}),
                {"out"},
                {{"scenario", "pure_noise|pure_drift|degenerate|pullback|pullback_integral"}},
                run_norris_sweep});
  cs.push_back({{"norris", "concentration"},
                with({{"hurst", "0.75"}, {"delta", "0.0078125"}, {"Delta", "0.0625"}, {"paths", "10000"},
                      {"seed", "1"}, {"tolerance", "0.3"}}),
                {"out"},
                {},
                run_norris_concentration});
  cs.push_back({{"hormander", "check"},
                with({{"fields", ""}, {"point", ""}, {"max-level", "5"}, {"mode", "weak"}}),
                {"fields", "out"},
                {{"mode", "weak|strong"}, {"point", "comma-separated point (default: system x0, else 0)"}},
                run_hormander_check});
  cs.push_back({{"smalltime", "exponent"},
                with({{"config", ""}, {"hurst", "0.6"}, {"tgrid", "0.02:0.5:8log"}, {"paths", "200000"},
                      {"steps", "32"}, {"batches", "20"}, {"seed", "1"}, {"x0", ""}}),
                {"config", "out"},
                {},
                run_smalltime_exponent});
  return cs;
}

// ---- manifests ----

const std::vector<std::string> kPathParams{"out", "config", "fields"};

std::string join(const std::vector<std::string>& v, char sep) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? std::string(1, sep) : "") + v[i];
  return s;
}

json make_manifest(const Command& c, const Params& p, const std::vector<Output>& outputs, double seconds) {
  json m;
  m["schema_version"] = kManifestSchema;
  m["version"] = kVersion;
  m["command"] = c.name;
  json params = json::object();
  for (const auto& [k, v] : p) params[k] = v;
  m["params"] = params;
  if (p.count("seed")) m["seed"] = get_u64(p, "seed");
  json outs = json::array();
  for (const auto& o : outputs) outs.push_back({{"path", o.path}, {"role", o.role}, {"fnv1a64", io::file_checksum(o.path)}});
  m["outputs"] = outs;
  m["timing"] = {{"wall_seconds", seconds}};
  return m;
}

void validate_required(const Command& c, const Params& p) {
  for (const auto& key : c.required) {
    if (p.at(key).empty()) throw DomainError("--" + key + " is required for " + join(c.name, ' '));
  }
}

std::vector<Output> execute(const Command& c, Params p, bool write_manifest) {
  for (const auto& key : kPathParams) {
    if (p.count(key)) p[key] = absolute(p[key]);
  }
  validate_required(c, p);
  const auto start = std::chrono::steady_clock::now();
  auto outputs = c.run(p);
  const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  if (write_manifest) {
    const std::string path = p.at("out") + ".manifest.json";
    io::write_text(path, make_manifest(c, p, outputs, seconds).dump(2) + "\n");
    outputs.push_back({path, "manifest"});
  }
  return outputs;
}

int replay(const std::string& manifest_path, const std::string& out_override, std::ostream& out) {
  json m;
  try {
    m = json::parse(io::read_text(manifest_path));
  } catch (const json::exception& e) {
    throw DomainError("manifest " + manifest_path + " is not valid JSON: " + e.what());
  }
  if (!m.contains("schema_version") || m["schema_version"] != kManifestSchema) {
    throw DomainError("unsupported manifest schema version in " + manifest_path);
  }
  if (m.value("version", "") != std::string(kVersion)) {
    throw DomainError("version mismatch: manifest was written by " + m.value("version", std::string("?")) +
                      ", this is " + kVersion);
  }
  const auto name = m.at("command").get<std::vector<std::string>>();
  const auto cs = commands();
  const Command* cmd = nullptr;
  for (const auto& c : cs) {
    if (c.name == name) cmd = &c;
  }
  if (!cmd) throw DomainError("manifest names an unknown command: " + join(name, ' '));
  Params p = cmd->defaults;
  for (const auto& [k, v] : m.at("params").items()) {
    if (!p.count(k)) throw DomainError("manifest has unknown parameter '" + k + "'");
    p[k] = v.get<std::string>();
  }
  if (m.contains("seed")) p["seed"] = std::to_string(m["seed"].get<std::uint64_t>());
  const std::string original = p.at("out");
  p["out"] = out_override.empty() ? original + ".replay" : out_override;
  const auto produced = execute(*cmd, p, false);
  const auto& expected = m.at("outputs");
  json report;
  report["manifest"] = manifest_path;
  json rows = json::array();
  bool ok = produced.size() == expected.size();
  for (std::size_t i = 0; i < produced.size() && i < expected.size(); ++i) {
    const std::string want = expected[i].at("fnv1a64").get<std::string>();
    const std::string got = io::file_checksum(produced[i].path);
    rows.push_back({{"role", produced[i].role}, {"original", expected[i].at("path")}, {"replayed", produced[i].path},
                    {"expected", want}, {"actual", got}, {"match", want == got}});
    ok = ok && want == got;
  }
  report["outputs"] = rows;
  report["match"] = ok;
  out << report.dump(2) << "\n";
  return ok ? kOk : kChecksumMismatch;
}

void diagnose(std::ostream& err, const std::string& kind, const std::string& message) {
  err << json{{"error", {{"kind", kind}, {"message", message}}}}.dump() << "\n";
}

}  // namespace

int dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"hypofrac: fractional SDE densities, brackets and Malliavin calculus", "hypofrac"};
  app.require_subcommand(1);
  app.set_version_flag("--version", kVersion);
  int threads = 0;
  if (const char* env = std::getenv("HYPOFRAC_THREADS")) threads = std::atoi(env);
  app.add_option("--threads", threads, "worker threads (never affects results)");

  auto cs = commands();
  std::vector<Params> values(cs.size());
  std::vector<CLI::App*> leaves(cs.size(), nullptr);
  std::map<std::string, CLI::App*> groups;
  for (std::size_t i = 0; i < cs.size(); ++i) {
    auto& c = cs[i];
    CLI::App*& group = groups[c.name[0]];
    if (!group) {
      static const std::map<std::string, std::string> about{
          {"fbm", "fractional Brownian motion samplers"},
          {"frac", "Cameron-Martin inner products"},
          {"sde", "pathwise SDE solver"},
          {"malliavin", "Malliavin matrix and eigenvalue probes"},
          {"norris", "small-ball and concentration experiments"},
          {"hormander", "Lie bracket span and canonical flag"},
          {"smalltime", "small-time density exponent"}};
      group = app.add_subcommand(c.name[0], about.count(c.name[0]) ? about.at(c.name[0]) : "");
      group->require_subcommand(1);
    }
    CLI::App* leaf = group->add_subcommand(c.name[1]);
    values[i] = c.defaults;
    for (auto& [key, value] : values[i]) {
      std::string desc = c.help.count(key) ? c.help.at(key) : "";
      auto* opt = leaf->add_option("--" + key, value, desc);
      if (!value.empty()) opt->default_str(value);
    }
    leaves[i] = leaf;
  }
  CLI::App* replay_cmd = app.add_subcommand("replay", "re-run a manifest and compare output checksums");
  std::string manifest, replay_out;
  replay_cmd->add_option("--manifest", manifest, "manifest file")->required();
  replay_cmd->add_option("--out", replay_out, "path for the replayed primary output");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kOk;
  } catch (const CLI::CallForVersion&) {
    out << kVersion << "\n";
    return kOk;
  } catch (const CLI::ParseError& e) {
    diagnose(err, "usage", e.what());
    return kValidationError;
  }

  if (threads > 0) set_threads(threads);
  try {
    if (replay_cmd->parsed()) return replay(manifest, replay_out, out);
    for (std::size_t i = 0; i < cs.size(); ++i) {
      if (!leaves[i]->parsed()) continue;
      const auto outputs = execute(cs[i], values[i], true);
      json summary = json::array();
      for (const auto& o : outputs) summary.push_back({{"path", o.path}, {"role", o.role}});
      out << json{{"outputs", summary}}.dump() << "\n";
      return kOk;
    }
    diagnose(err, "usage", "no command selected");
    return kValidationError;
  } catch (const DomainError& e) {
    diagnose(err, "validation", e.what());
    return kValidationError;
  } catch (const NumericalError& e) {
    diagnose(err, "numerical", e.what());
    return kRuntimeError;
  } catch (const std::exception& e) {
    diagnose(err, "internal", e.what());
    return kRuntimeError;
  }
}

int dispatch(int argc, const char* const* argv) {
  std::vector<std::string> args;
  for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
  return dispatch(args, std::cout, std::cerr);
}

}  // namespace hypofrac::cli

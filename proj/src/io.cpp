#include "hypofrac/io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

namespace hypofrac::io {

std::string shortest(double x) {
  if (std::isnan(x)) return "nan";
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

std::string read_text(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DomainError("cannot open file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text(const std::string& path, std::string_view content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw DomainError("cannot write file: " + path);
  out.write(content.data(), static_cast<std::streamsize>(content.size()));
  if (!out) throw NumericalError("write failed: " + path);
}

std::uint64_t fnv1a64(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string hex64(std::uint64_t x) {
  static const char* digits = "0123456789abcdef";
  std::string s(16, '0');
  for (int i = 15; i >= 0; --i, x >>= 4) s[static_cast<std::size_t>(i)] = digits[x & 0xf];
  return s;
}

std::string file_checksum(const std::string& path) { return hex64(fnv1a64(read_text(path))); }

namespace {

double num(const json& j) {
  if (j.is_null()) return std::numeric_limits<double>::quiet_NaN();
  return j.get<double>();
}

json field_json(const poly::VectorField& f) {
  json comps = json::array();
  for (const auto& p : f) {
    json terms = json::array();
    for (const auto& [e, c] : p.terms()) terms.push_back({{"coeff", c}, {"exps", e}});
    comps.push_back(std::move(terms));
  }
  return comps;
}

poly::VectorField field_from(const json& j, std::size_t n, const std::string& where) {
  if (!j.is_array() || j.size() != n) {
    throw DomainError(where + ": expected a list of " + std::to_string(n) + " components");
  }
  poly::VectorField f;
  for (const auto& comp : j) {
    poly::Polynomial p(n);
    if (!comp.is_array()) throw DomainError(where + ": a component must be a list of terms");
    for (const auto& t : comp) {
      if (!t.contains("coeff") || !t.contains("exps")) throw DomainError(where + ": term needs coeff and exps");
      auto e = t.at("exps").get<poly::Exponents>();
      if (e.size() != n) throw DomainError(where + ": exps must have " + std::to_string(n) + " entries");
      p.add_term(t.at("coeff").get<double>(), e);
    }
    f.push_back(std::move(p));
  }
  return f;
}

}  // namespace

json to_json(const poly::VectorFieldSystem& sys) {
  json j;
  j["n"] = sys.n;
  j["d"] = sys.d;
  if (sys.drift) j["drift"] = field_json(*sys.drift);
  json fields = json::array();
  for (const auto& f : sys.fields) fields.push_back(field_json(f));
  j["fields"] = std::move(fields);
  if (sys.x0) j["x0"] = *sys.x0;
  return j;
}

poly::VectorFieldSystem system_from_json(const json& j) {
  try {
    poly::VectorFieldSystem sys;
    sys.n = j.at("n").get<std::size_t>();
    sys.d = j.at("d").get<std::size_t>();
    if (j.contains("drift") && !j.at("drift").is_null()) sys.drift = field_from(j.at("drift"), sys.n, "drift");
    const auto& fields = j.at("fields");
    if (!fields.is_array() || fields.size() != sys.d) {
      throw DomainError("fields: expected " + std::to_string(sys.d) + " vector fields");
    }
    for (std::size_t i = 0; i < sys.d; ++i) {
      sys.fields.push_back(field_from(fields[i], sys.n, "fields[" + std::to_string(i) + "]"));
    }
    if (j.contains("x0") && !j.at("x0").is_null()) sys.x0 = j.at("x0").get<std::vector<double>>();
    sys.validate();
    return sys;
  } catch (const json::exception& e) {
    throw DomainError(std::string("malformed system description: ") + e.what());
  }
}

poly::VectorFieldSystem load_system(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DomainError("system file not found: " + path);
  json j;
  try {
    j = json::parse(in);
  } catch (const json::exception& e) {
    throw DomainError("system file " + path + " is not valid JSON: " + e.what());
  }
  try {
    return system_from_json(j);
  } catch (const DomainError& e) {
    throw DomainError(path + ": " + e.what());
  }
}

std::string fbm_csv(const std::vector<fbm::FbmPath>& paths) {
  std::string out = "t";
  const std::size_t d = paths.empty() ? 0 : paths.front().dim();
  for (std::size_t i = 0; i < d; ++i) out += ",comp_" + std::to_string(i);
  out += ",path_id\n";
  for (const auto& p : paths) {
    for (std::size_t k = 0; k < p.grid.nodes(); ++k) {
      out += shortest(p.grid.node(k));
      for (std::size_t i = 0; i < d; ++i) {
        out += ',';
        out += shortest(p.values(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k)));
      }
      out += ',' + std::to_string(p.path_id) + '\n';
    }
  }
  return out;
}

json fbm_meta(const std::vector<fbm::FbmPath>& paths) {
  if (paths.empty()) throw DomainError("fbm_meta: no paths");
  const auto& p = paths.front();
  json j;
  j["hurst"] = p.hurst.value();
  j["seed"] = p.seed;
  j["method"] = fbm::to_string(p.method);
  j["n_steps"] = p.grid.steps();
  j["horizon"] = p.grid.horizon();
  j["dim"] = p.dim();
  j["paths"] = paths.size();
  j["version"] = kVersion;
  return j;
}

CsvTable parse_csv(std::string_view text) {
  CsvTable t;
  std::size_t pos = 0;
  bool first = true;
  while (pos < text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(pos, end - pos);
    pos = end + 1;
    if (line.empty()) continue;
    std::vector<std::string_view> cells;
    std::size_t c = 0;
    while (true) {
      std::size_t comma = line.find(',', c);
      cells.push_back(line.substr(c, comma == std::string_view::npos ? std::string_view::npos : comma - c));
      if (comma == std::string_view::npos) break;
      c = comma + 1;
    }
    if (first) {
      for (auto s : cells) t.header.emplace_back(s);
      first = false;
      continue;
    }
    if (cells.size() != t.header.size()) throw DomainError("parse_csv: ragged row");
    std::vector<double> row;
    for (auto s : cells) {
      double v = 0.0;
      if (s == "nan") {
        v = std::numeric_limits<double>::quiet_NaN();
      } else {
        auto res = std::from_chars(s.data(), s.data() + s.size(), v);
        if (res.ec != std::errc() || res.ptr != s.data() + s.size()) {
          throw DomainError("parse_csv: bad number '" + std::string(s) + "'");
        }
      }
      row.push_back(v);
    }
    t.rows.push_back(std::move(row));
  }
  return t;
}

std::vector<fbm::FbmPath> fbm_from_csv(std::string_view text, const json& meta) {
  const auto table = parse_csv(text);
  const Hurst h(meta.at("hurst").get<double>());
  const TimeGrid grid(meta.at("n_steps").get<std::size_t>(), meta.value("horizon", 1.0));
  const auto seed = meta.at("seed").get<std::uint64_t>();
  const auto method = fbm::parse_method(meta.at("method").get<std::string>());
  if (table.header.size() < 3) throw DomainError("fbm_from_csv: too few columns");
  const std::size_t d = table.header.size() - 2;
  const std::size_t nodes = grid.nodes();
  if (table.rows.size() % nodes) throw DomainError("fbm_from_csv: row count is not a multiple of the node count");
  std::vector<fbm::FbmPath> out;
  for (std::size_t start = 0; start < table.rows.size(); start += nodes) {
    fbm::FbmPath p{h, grid, Mat(d, nodes), seed, method, static_cast<std::size_t>(table.rows[start].back())};
    for (std::size_t k = 0; k < nodes; ++k) {
      for (std::size_t i = 0; i < d; ++i) {
        p.values(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k)) = table.rows[start + k][i + 1];
      }
    }
    out.push_back(std::move(p));
  }
  return out;
}

std::string solutions_csv(const std::vector<sde::SdeSolution>& sols) {
  std::string out = "t";
  const std::size_t n = sols.empty() ? 0 : sols.front().n();
  for (std::size_t i = 0; i < n; ++i) out += ",x_" + std::to_string(i);
  out += ",path_id\n";
  for (std::size_t p = 0; p < sols.size(); ++p) {
    const auto& s = sols[p];
    for (std::size_t k = 0; k < s.grid.nodes(); ++k) {
      out += shortest(s.grid.node(k));
      for (std::size_t i = 0; i < n; ++i) {
        out += ',';
        out += shortest(s.X(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k)));
      }
      out += ',' + std::to_string(p) + '\n';
    }
  }
  return out;
}

json to_json(const Vec& v) { return std::vector<double>(v.data(), v.data() + v.size()); }

json to_json(const Mat& m) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    json r = json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) r.push_back(m(i, j));
    rows.push_back(std::move(r));
  }
  return rows;
}

Vec vec_from_json(const json& j) {
  Vec v(static_cast<Eigen::Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) v[static_cast<Eigen::Index>(i)] = num(j[i]);
  return v;
}

Mat mat_from_json(const json& j) {
  const auto r = static_cast<Eigen::Index>(j.size());
  const auto c = r ? static_cast<Eigen::Index>(j[0].size()) : 0;
  Mat m(r, c);
  for (Eigen::Index i = 0; i < r; ++i) {
    if (static_cast<Eigen::Index>(j[static_cast<std::size_t>(i)].size()) != c) throw DomainError("ragged matrix");
    for (Eigen::Index k = 0; k < c; ++k) m(i, k) = num(j[static_cast<std::size_t>(i)][static_cast<std::size_t>(k)]);
  }
  return m;
}

json to_json(const frac::ReprhReport& r) {
  json rows = json::array();
  for (const auto& x : r.rows) {
    rows.push_back({{"kernel", x.kernel}, {"frac", x.frac}, {"scale", x.scale}, {"rel_error", x.rel_error}});
  }
  return {{"hurst", r.hurst},   {"n_steps", r.n_steps}, {"seed", r.seed},
          {"pairs", r.rows.size()}, {"max_rel_error", r.max_rel_error}, {"rows", rows}};
}

frac::ReprhReport reprh_from_json(const json& j) {
  frac::ReprhReport r;
  r.hurst = num(j.at("hurst"));
  r.n_steps = j.at("n_steps").get<std::size_t>();
  r.seed = j.at("seed").get<std::uint64_t>();
  r.max_rel_error = num(j.at("max_rel_error"));
  for (const auto& x : j.at("rows")) {
    r.rows.push_back({num(x.at("kernel")), num(x.at("frac")), num(x.at("scale")), num(x.at("rel_error"))});
  }
  return r;
}

json to_json(const malliavin::MalliavinReport& r) {
  return {{"gamma", to_json(r.gamma)},
          {"c1", to_json(r.c1)},
          {"gamma_eigenvalues", to_json(r.gamma_eigenvalues)},
          {"c1_eigenvalues", to_json(r.c1_eigenvalues)},
          {"gamma_det", r.gamma_det},
          {"c1_det", r.c1_det}};
}

json to_json(const malliavin::ProbeReport& r) {
  json dirs = json::array();
  for (const auto& d : r.directions) dirs.push_back(to_json(d));
  json rows = json::array();
  for (const auto& x : r.rows) {
    rows.push_back({{"direction", x.direction}, {"eps", x.eps}, {"hits", x.hits}, {"probability", x.probability}});
  }
  return {{"n_paths", r.n_paths},
          {"blowups", r.blowups},
          {"eps_grid", r.eps_grid},
          {"directions", dirs},
          {"rows", rows},
          {"decay_exponents", r.decay_exponents},
          {"sup_probability_min_eps", r.sup_probability_min_eps},
          {"inverse_det_moments", r.inverse_det_moments},
          {"inverse_det_moments_half", r.inverse_det_moments_half},
          {"nonpositive_min_eigenvalues", r.nonpositive_min_eigenvalues},
          {"min_eigenvalues", r.min_eigenvalues}};
}

json to_json(const norris::SweepReport& r) {
  json rows = json::array();
  for (const auto& x : r.rows) {
    rows.push_back({{"q", x.q}, {"eps", x.eps}, {"hits", x.hits}, {"probability", x.probability},
                    {"wilson_upper", x.wilson_upper}});
  }
  json scales = json::array();
  for (const auto& s : r.scales) {
    scales.push_back({{"eps", s.eps}, {"gamma", s.gamma}, {"delta", s.delta}, {"Delta", s.Delta},
                      {"delta_exact", s.delta_exact}, {"Delta_exact", s.Delta_exact}, {"alpha", s.alpha},
                      {"degenerate", s.degenerate}});
  }
  return {{"scenario", norris::to_string(r.scenario)},
          {"hurst", r.hurst},
          {"n_paths", r.n_paths},
          {"n_steps", r.n_steps},
          {"combinations", r.combinations},
          {"eps_grid", r.eps_grid},
          {"q_grid", r.q_grid},
          {"q_hat", r.q_hat},
          {"q_hat_wilson", r.q_hat_wilson},
          {"alpha", r.alpha},
          {"scales", scales},
          {"rows", rows}};
}

namespace {

json concentration_json(const norris::ConcentrationReport& c) {
  auto curve = [](const std::vector<norris::TailPoint>& t) {
    json a = json::array();
    for (const auto& p : t) a.push_back({p.h, p.probability});
    return a;
  };
  return {{"delta", c.delta},
          {"N", c.N},
          {"T", c.T},
          {"samples", c.samples},
          {"rate", c.rate},
          {"rate_stderr", c.rate_stderr},
          {"fit_points", c.fit_points},
          {"predicted_scale", c.predicted_scale},
          {"tail", curve(c.tail)},
          {"cross_tail", curve(c.cross_tail)}};
}

json word_list(const std::vector<hormander::Word>& ws) {
  json a = json::array();
  for (const auto& w : ws) a.push_back(w);
  return a;
}

}  // namespace

json to_json(const norris::ScalingReport& r) {
  return {{"base", concentration_json(r.base)},
          {"refined", concentration_json(r.refined)},
          {"observed_ratio", r.observed_ratio},
          {"predicted_ratio", r.predicted_ratio},
          {"relative_error", r.relative_error},
          {"pass", r.pass}};
}

json to_json(const norris::HsReport& r) {
  return {{"N", r.N},           {"delta", r.delta},         {"hs2", r.hs2},
          {"hs2_normalised", r.hs2_normalised}, {"diagonal", r.diagonal}, {"slope", r.slope},
          {"raw_slope", r.raw_slope}, {"predicted", r.predicted}, {"pass", r.pass}};
}

json to_json(const hormander::HormanderReport& r) {
  return {{"satisfied", r.satisfied}, {"n_star", r.n_star}, {"ranks", r.ranks}, {"witnesses", word_list(r.witnesses)}};
}

json to_json(const hormander::FlagReport& r) {
  json wit = json::array();
  for (const auto& lvl : r.witnesses) wit.push_back(word_list(lvl));
  json j = {{"point", r.point}, {"growth", r.growth}, {"r", r.r}, {"full_rank", r.full_rank},
            {"level_cap", r.level_cap}};
  j["regular"] = r.regular ? json(*r.regular) : json(nullptr);
  j["D"] = r.D ? json(*r.D) : json(nullptr);
  j["D_displayed"] = r.D_displayed ? json(*r.D_displayed) : json(nullptr);
  j["witnesses"] = std::move(wit);
  return j;
}

hormander::FlagReport flag_from_json(const json& j) {
  hormander::FlagReport r;
  r.point = j.at("point").get<std::vector<double>>();
  r.growth = j.at("growth").get<std::vector<std::size_t>>();
  r.r = j.at("r").get<std::size_t>();
  r.full_rank = j.at("full_rank").get<bool>();
  r.level_cap = j.at("level_cap").get<std::size_t>();
  if (!j.at("regular").is_null()) r.regular = j.at("regular").get<bool>();
  if (!j.at("D").is_null()) r.D = j.at("D").get<std::size_t>();
  if (!j.at("D_displayed").is_null()) r.D_displayed = j.at("D_displayed").get<std::size_t>();
  for (const auto& lvl : j.at("witnesses")) r.witnesses.push_back(lvl.get<std::vector<hormander::Word>>());
  return r;
}

json to_json(const std::vector<smalltime::DensityPoint>& points) {
  json a = json::array();
  for (const auto& p : points) {
    a.push_back({{"t", p.t}, {"kde", p.kde}, {"kde_se", p.kde_se}, {"knn", p.knn}, {"bandwidth", p.bandwidth}});
  }
  return a;
}

json to_json(const smalltime::ExponentFit& f) {
  return {{"slope", f.slope},     {"intercept", f.intercept}, {"stderr_slope", f.stderr_slope},
          {"ci_low", f.ci_low},   {"ci_high", f.ci_high},     {"chi2_dof", f.chi2_dof},
          {"points", f.points},   {"warnings", f.warnings}};
}

smalltime::ExponentFit exponent_fit_from_json(const json& j) {
  smalltime::ExponentFit f;
  f.slope = num(j.at("slope"));
  f.intercept = num(j.at("intercept"));
  f.stderr_slope = num(j.at("stderr_slope"));
  f.ci_low = num(j.at("ci_low"));
  f.ci_high = num(j.at("ci_high"));
  f.chi2_dof = num(j.at("chi2_dof"));
  f.points = j.at("points").get<std::size_t>();
  f.warnings = j.at("warnings").get<std::vector<std::string>>();
  return f;
}

std::string envelope(const json& payload, const std::vector<std::string>& warnings) {
  json j;
  j["payload"] = payload;
  j["warnings"] = warnings;
  return j.dump(2) + "\n";
}

}  // namespace hypofrac::io

#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

#include "hypofrac/fbm.hpp"
#include "hypofrac/frac.hpp"
#include "hypofrac/hormander.hpp"
#include "hypofrac/malliavin.hpp"
#include "hypofrac/norris.hpp"
#include "hypofrac/poly.hpp"
#include "hypofrac/sde.hpp"
#include "hypofrac/smalltime.hpp"

namespace hypofrac::io {

using json = nlohmann::ordered_json;

/// Shortest decimal string that parses back to the same double.
std::string shortest(double x);

std::string read_text(const std::string& path);
void write_text(const std::string& path, std::string_view content);

std::uint64_t fnv1a64(std::string_view bytes);
std::string hex64(std::uint64_t x);
/// Checksum of a file's bytes, as 16 hex digits.
std::string file_checksum(const std::string& path);

// System files: {n, d, drift?, fields, x0?}. A field is a list of n
// components; a component is a list of terms {coeff, exps}.
json to_json(const poly::VectorFieldSystem& sys);
poly::VectorFieldSystem system_from_json(const json& j);
/// Throws DomainError naming the path when the file is missing or malformed.
poly::VectorFieldSystem load_system(const std::string& path);

/// Header t,comp_0,...,comp_{d-1},path_id; one row per node per path.
std::string fbm_csv(const std::vector<fbm::FbmPath>& paths);
json fbm_meta(const std::vector<fbm::FbmPath>& paths);

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;
};
CsvTable parse_csv(std::string_view text);
/// Inverse of fbm_csv given the metadata: rebuilds hurst, grid, values, seed, method, path ids.
std::vector<fbm::FbmPath> fbm_from_csv(std::string_view text, const json& meta);

/// Header t,x_0,...,x_{n-1},path_id.
std::string solutions_csv(const std::vector<sde::SdeSolution>& sols);

json to_json(const Vec& v);
json to_json(const Mat& m);
Vec vec_from_json(const json& j);
Mat mat_from_json(const json& j);

json to_json(const frac::ReprhReport& r);
json to_json(const malliavin::MalliavinReport& r);
json to_json(const malliavin::ProbeReport& r);
json to_json(const norris::SweepReport& r);
json to_json(const norris::ScalingReport& r);
json to_json(const norris::HsReport& r);
json to_json(const hormander::HormanderReport& r);
json to_json(const hormander::FlagReport& r);
json to_json(const std::vector<smalltime::DensityPoint>& points);
json to_json(const smalltime::ExponentFit& f);

frac::ReprhReport reprh_from_json(const json& j);
hormander::FlagReport flag_from_json(const json& j);
smalltime::ExponentFit exponent_fit_from_json(const json& j);

/// {payload, warnings}; dumped with two-space indentation and a trailing newline.
std::string envelope(const json& payload, const std::vector<std::string>& warnings);

}  // namespace hypofrac::io

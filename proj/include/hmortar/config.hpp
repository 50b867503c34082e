// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "hmortar/geometry.hpp"
#include "hmortar/infsup.hpp"
#include "hmortar/source.hpp"
#include "json.hpp"

namespace hmortar {

/// Invalid run configuration (CLI exit code 2).
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Harmonic scaling factor c, given in JSON either as a number or as an
/// exact fraction string such as "1/3". The original spelling is kept so
/// configs round-trip unchanged.
struct ScalingFactor {
  double value = 0.0;
  std::string text;  // empty when given as a number

  bool operator==(const ScalingFactor&) const = default;

  std::string label() const {
    if (!text.empty()) return text;
    std::ostringstream os;
    os.imbue(std::locale::classic());
    os << value;
    return os.str();
  }

  static ScalingFactor parse(const std::string& s) {
    ScalingFactor f;
    f.text = s;
    const auto slash = s.find('/');
    try {
      std::size_t used = 0;
      if (slash == std::string::npos) {
        f.value = std::stod(s, &used);
        if (used != s.size()) throw std::invalid_argument(s);
      } else {
        const std::string a = s.substr(0, slash), b = s.substr(slash + 1);
        const double num = std::stod(a, &used);
        if (used != a.size()) throw std::invalid_argument(s);
        const double den = std::stod(b, &used);
        if (used != b.size() || den == 0.0) throw std::invalid_argument(s);
        f.value = num / den;
      }
    } catch (const std::exception&) {
      throw ConfigError("invalid scaling factor '" + s + "'");
    }
    return f;
  }
};

struct DiscretizationConfig {
  int n_theta_stator = 144;
  int n_theta_rotor = 128;
  int n_r_stator = 0;  // 0: near-isotropic default
  int n_r_rotor = 0;
  std::vector<int> degrees{1};
  std::vector<int> levels{1, 2, 3, 4};

  bool operator==(const DiscretizationConfig&) const = default;
};

struct MultiplierConfig {
  std::vector<ScalingFactor> c{ScalingFactor::parse("1/4"), ScalingFactor::parse("1/3"),
                               ScalingFactor::parse("3/8"), ScalingFactor::parse("1/2")};
  std::vector<int> N;  // explicit orders; take precedence over c when present
  Scope scope = Scope::stator;
  double alpha = 0.0;
  std::vector<double> angles;  // rotor sweep for `solve`

  bool operator==(const MultiplierConfig&) const = default;
};

enum class SourceKind { none, manufactured, sectors };

struct SourcesConfig {
  SourceKind kind = SourceKind::none;
  int manufactured_mode = 3;
  std::vector<ScalarSector> currents;
  std::vector<MagnetSector> magnets;
  double nu_stator = 1.0;
  double nu_rotor = 1.0;
  double nu_magnet = 1.0;

  bool operator==(const SourcesConfig&) const = default;
};

struct OutputConfig {
  std::string csv;
  std::string field_grid;
  int precision = 6;

  bool operator==(const OutputConfig&) const = default;
};

/// Complete run description; all quantities in SI units.
struct RunConfig {
  AnnulusGeometry geometry;
  DiscretizationConfig discretization;
  MultiplierConfig multiplier;
  SourcesConfig sources;
  OutputConfig output;

  bool operator==(const RunConfig&) const = default;

  void validate() const;

  InfSupSetup infsup_setup() const {
    InfSupSetup s;
    s.geom = geometry;
    s.n_theta_stator = discretization.n_theta_stator;
    s.n_theta_rotor = discretization.n_theta_rotor;
    s.n_r_stator = discretization.n_r_stator;
    s.n_r_rotor = discretization.n_r_rotor;
    return s;
  }

  SourceSpec source_spec() const;
};

// ---------------------------------------------------------------------------

namespace detail {

using nlohmann::json;

inline void reject_unknown(const json& j, std::initializer_list<const char*> keys,
                           const std::string& where) {
  if (!j.is_object()) throw ConfigError(where + " must be an object");
  for (auto it = j.begin(); it != j.end(); ++it) {
    bool known = false;
    for (const char* k : keys) known = known || it.key() == k;
    if (!known) throw ConfigError("unknown key '" + it.key() + "' in " + where);
  }
}

template <typename T>
void read(const json& j, const char* key, T& out, const std::string& where) {
  if (!j.contains(key)) return;
  try {
    out = j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ConfigError(where + "." + key + ": " + e.what());
  }
}

inline Subdomain parse_subdomain(const std::string& s) {
  if (s == "stator") return Subdomain::stator;
  if (s == "rotor") return Subdomain::rotor;
  throw ConfigError("subdomain must be 'stator' or 'rotor', got '" + s + "'");
}

inline Scope parse_scope(const std::string& s) {
  if (s == "stator") return Scope::stator;
  if (s == "full") return Scope::full;
  throw ConfigError("scope must be 'stator' or 'full', got '" + s + "'");
}

inline SourceKind parse_kind(const std::string& s) {
  if (s == "none") return SourceKind::none;
  if (s == "manufactured") return SourceKind::manufactured;
  if (s == "sectors") return SourceKind::sectors;
  throw ConfigError("sources.kind must be none, manufactured or sectors, got '" + s + "'");
}

inline const char* kind_name(SourceKind k) {
  switch (k) {
    case SourceKind::manufactured: return "manufactured";
    case SourceKind::sectors: return "sectors";
    default: return "none";
  }
}

inline Sector parse_sector(const json& j, const std::string& where) {
  Sector s;
  std::string sub = "rotor";
  read(j, "subdomain", sub, where);
  s.subdomain = parse_subdomain(sub);
  read(j, "r_min", s.r_min, where);
  read(j, "r_max", s.r_max, where);
  read(j, "theta_begin", s.theta_begin, where);
  read(j, "theta_end", s.theta_end, where);
  return s;
}

inline json sector_json(const Sector& s) {
  return json{{"subdomain", std::string(to_string(s.subdomain))},
              {"r_min", s.r_min},
              {"r_max", s.r_max},
              {"theta_begin", s.theta_begin},
              {"theta_end", s.theta_end}};
}

}  // namespace detail

inline RunConfig parse_config(const nlohmann::json& j) {
  using detail::json;
  using detail::read;
  RunConfig c;
  detail::reject_unknown(j, {"geometry", "discretization", "multiplier", "sources", "output"},
                         "config");
  if (j.contains("geometry")) {
    const json& g = j.at("geometry");
    detail::reject_unknown(g, {"r_shaft", "r_gamma", "r_outer"}, "geometry");
    read(g, "r_shaft", c.geometry.r_shaft, "geometry");
    read(g, "r_gamma", c.geometry.r_gamma, "geometry");
    read(g, "r_outer", c.geometry.r_outer, "geometry");
  }
  if (j.contains("discretization")) {
    const json& d = j.at("discretization");
    detail::reject_unknown(d, {"n_theta_stator", "n_theta_rotor", "n_r_stator", "n_r_rotor",
                               "degrees", "levels"},
                           "discretization");
    auto& o = c.discretization;
    read(d, "n_theta_stator", o.n_theta_stator, "discretization");
    read(d, "n_theta_rotor", o.n_theta_rotor, "discretization");
    read(d, "n_r_stator", o.n_r_stator, "discretization");
    read(d, "n_r_rotor", o.n_r_rotor, "discretization");
    read(d, "degrees", o.degrees, "discretization");
    read(d, "levels", o.levels, "discretization");
  }
  if (j.contains("multiplier")) {
    const json& m = j.at("multiplier");
    detail::reject_unknown(m, {"c", "N", "scope", "alpha", "angles"}, "multiplier");
    auto& o = c.multiplier;
    if (m.contains("c")) {
      if (!m.at("c").is_array()) throw ConfigError("multiplier.c must be an array");
      o.c.clear();
      for (const json& v : m.at("c")) {
        if (v.is_string())
          o.c.push_back(ScalingFactor::parse(v.get<std::string>()));
        else if (v.is_number())
          o.c.push_back(ScalingFactor{v.get<double>(), ""});
        else
          throw ConfigError("multiplier.c entries must be numbers or \"p/q\" strings");
      }
    }
    read(m, "N", o.N, "multiplier");
    std::string scope = "stator";
    read(m, "scope", scope, "multiplier");
    o.scope = detail::parse_scope(scope);
    read(m, "alpha", o.alpha, "multiplier");
    read(m, "angles", o.angles, "multiplier");
  }
  if (j.contains("sources")) {
    const json& s = j.at("sources");
    detail::reject_unknown(s, {"kind", "manufactured_mode", "currents", "magnets", "nu_stator",
                               "nu_rotor", "nu_magnet"},
                           "sources");
    auto& o = c.sources;
    std::string kind = "none";
    read(s, "kind", kind, "sources");
    o.kind = detail::parse_kind(kind);
    read(s, "manufactured_mode", o.manufactured_mode, "sources");
    read(s, "nu_stator", o.nu_stator, "sources");
    read(s, "nu_rotor", o.nu_rotor, "sources");
    read(s, "nu_magnet", o.nu_magnet, "sources");
    if (s.contains("currents"))
      for (const json& e : s.at("currents")) {
        detail::reject_unknown(e, {"subdomain", "r_min", "r_max", "theta_begin", "theta_end", "js"},
                               "sources.currents[]");
        ScalarSector sec{detail::parse_sector(e, "sources.currents[]"), 0.0};
        read(e, "js", sec.value, "sources.currents[]");
        o.currents.push_back(sec);
      }
    if (s.contains("magnets"))
      for (const json& e : s.at("magnets")) {
        detail::reject_unknown(e, {"subdomain", "r_min", "r_max", "theta_begin", "theta_end",
                                   "m_r", "m_theta"},
                               "sources.magnets[]");
        MagnetSector mag{detail::parse_sector(e, "sources.magnets[]"), 0.0, 0.0};
        read(e, "m_r", mag.m_r, "sources.magnets[]");
        read(e, "m_theta", mag.m_theta, "sources.magnets[]");
        o.magnets.push_back(mag);
      }
  }
  if (j.contains("output")) {
    const json& o = j.at("output");
    detail::reject_unknown(o, {"csv", "field_grid", "precision"}, "output");
    read(o, "csv", c.output.csv, "output");
    read(o, "field_grid", c.output.field_grid, "output");
    read(o, "precision", c.output.precision, "output");
  }
  c.validate();
  return c;
}

inline RunConfig parse_config(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  return parse_config(j);
}

inline RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

inline nlohmann::json to_json(const RunConfig& c) {
  using detail::json;
  json cs = json::array();
  for (const auto& f : c.multiplier.c)
    cs.push_back(f.text.empty() ? json(f.value) : json(f.text));
  json currents = json::array(), magnets = json::array();
  for (const auto& s : c.sources.currents) {
    json e = detail::sector_json(s.sector);
    e["js"] = s.value;
    currents.push_back(e);
  }
  for (const auto& m : c.sources.magnets) {
    json e = detail::sector_json(m.sector);
    e["m_r"] = m.m_r;
    e["m_theta"] = m.m_theta;
    magnets.push_back(e);
  }
  return json{
      {"geometry",
       {{"r_shaft", c.geometry.r_shaft},
        {"r_gamma", c.geometry.r_gamma},
        {"r_outer", c.geometry.r_outer}}},
      {"discretization",
       {{"n_theta_stator", c.discretization.n_theta_stator},
        {"n_theta_rotor", c.discretization.n_theta_rotor},
        {"n_r_stator", c.discretization.n_r_stator},
        {"n_r_rotor", c.discretization.n_r_rotor},
        {"degrees", c.discretization.degrees},
        {"levels", c.discretization.levels}}},
      {"multiplier",
       {{"c", cs},
        {"N", c.multiplier.N},
        {"scope", std::string(to_string(c.multiplier.scope))},
        {"alpha", c.multiplier.alpha},
        {"angles", c.multiplier.angles}}},
      {"sources",
       {{"kind", detail::kind_name(c.sources.kind)},
        {"manufactured_mode", c.sources.manufactured_mode},
        {"currents", currents},
        {"magnets", magnets},
        {"nu_stator", c.sources.nu_stator},
        {"nu_rotor", c.sources.nu_rotor},
        {"nu_magnet", c.sources.nu_magnet}}},
      {"output",
       {{"csv", c.output.csv},
        {"field_grid", c.output.field_grid},
        {"precision", c.output.precision}}}};
}

inline std::string serialize_config(const RunConfig& c) { return to_json(c).dump(2); }

inline void RunConfig::validate() const {
  try {
    geometry.validate();
  } catch (const std::exception& e) {
    throw ConfigError(e.what());
  }
  const auto& d = discretization;
  if (d.n_theta_stator < 3 || d.n_theta_rotor < 3)
    throw ConfigError("discretization: n_theta must be at least 3");
  if (d.n_r_stator < 0 || d.n_r_rotor < 0)
    throw ConfigError("discretization: n_r must be >= 0 (0 selects the default)");
  if (d.degrees.empty() || d.levels.empty())
    throw ConfigError("discretization: degrees and levels must be non-empty");
  for (int k : d.degrees) {
    if (k < 1 || k > 10) throw ConfigError("discretization: degree must be in 1..10");
    if (std::min(d.n_theta_stator, d.n_theta_rotor) < k + 1)
      throw ConfigError("discretization: n_theta must exceed the degree");
  }
  for (int l : d.levels)
    if (l < 1 || l > 8) throw ConfigError("discretization: level must be in 1..8");
  const auto& m = multiplier;
  if (m.c.empty() && m.N.empty()) throw ConfigError("multiplier: give c or N");
  for (const auto& f : m.c)
    if (!(std::isfinite(f.value) && f.value >= 0.0))
      throw ConfigError("multiplier: c must be finite and >= 0");
  for (int n : m.N)
    if (n < 0) throw ConfigError("multiplier: N must be >= 0");
  if (!std::isfinite(m.alpha)) throw ConfigError("multiplier: alpha must be finite");
  for (double a : m.angles)
    if (!std::isfinite(a)) throw ConfigError("multiplier: angles must be finite");
  const auto& s = sources;
  for (double nu : {s.nu_stator, s.nu_rotor, s.nu_magnet})
    if (!(std::isfinite(nu) && nu > 0.0)) throw ConfigError("sources: nu must be positive");
  if (s.manufactured_mode < 0) throw ConfigError("sources: manufactured_mode must be >= 0");
  auto check_sector = [&](const Sector& sec, const char* what) {
    const double lo = geometry.inner_radius(sec.subdomain), hi = geometry.outer_radius(sec.subdomain);
    if (!(sec.r_min >= lo - 1e-12 && sec.r_max <= hi + 1e-12 && sec.r_min < sec.r_max))
      throw ConfigError(std::string("sources: ") + what + " sector radii outside its subdomain");
    if (!(std::isfinite(sec.theta_begin) && std::isfinite(sec.theta_end)))
      throw ConfigError(std::string("sources: ") + what + " sector angles must be finite");
  };
  for (const auto& c : s.currents) {
    check_sector(c.sector, "current");
    if (!std::isfinite(c.value)) throw ConfigError("sources: js must be finite");
  }
  for (const auto& mg : s.magnets) {
    check_sector(mg.sector, "magnet");
    if (!(std::isfinite(mg.m_r) && std::isfinite(mg.m_theta)))
      throw ConfigError("sources: magnetization must be finite");
  }
  if (output.precision < 1 || output.precision > 17)
    throw ConfigError("output: precision must be in 1..17");
}

inline SourceSpec RunConfig::source_spec() const {
  SourceSpec spec;
  const double lo = std::min({sources.nu_stator, sources.nu_rotor, sources.nu_magnet});
  const double hi = std::max({sources.nu_stator, sources.nu_rotor, sources.nu_magnet});
  spec.nu_lo = lo;
  spec.nu_hi = hi;
  std::vector<ScalarSector> nu_sectors;
  for (const auto& m : sources.magnets) nu_sectors.push_back({m.sector, sources.nu_magnet});
  spec.nu = sector_field(std::move(nu_sectors),
                         per_subdomain_field(sources.nu_stator, sources.nu_rotor));
  if (sources.kind == SourceKind::sectors) {
    if (!sources.currents.empty()) spec.js = sector_field(sources.currents);
    if (!sources.magnets.empty()) spec.m = magnet_field(sources.magnets);
  }
  return spec;
}

}  // namespace hmortar

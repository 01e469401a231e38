#include "warpgeo/config.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <sstream>

namespace warpgeo {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream in(s);
  while (std::getline(in, item, sep)) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

bool parse_double(const std::string& s, double& out) {
  if (s.empty()) return false;
  char* end = nullptr;
  out = std::strtod(s.c_str(), &end);
  return end == s.c_str() + s.size() && std::isfinite(out);
}

bool parse_int(const std::string& s, long long& out) {
  const auto* end = s.data() + s.size();
  const auto [p, ec] = std::from_chars(s.data(), end, out);
  return ec == std::errc() && p == end;
}

const std::set<std::string> kCheckTypes{
    "integral_formula", "k1_formula", "ricci_term", "minkowski", "heintze_karcher",
    "theorem", "slice_solve", "ellipsoid", "variational", "critical_point"};

const std::set<std::string> kSurfaceTypes{"circle", "slice", "perturbed_slice", "ellipse",
                                          "offset_circle", "graph"};

const std::map<std::string, std::set<std::string>> kSurfaceKeys{
    {"circle", {"radius"}},
    {"slice", {"r0"}},
    {"perturbed_slice", {"r0", "amplitude", "mode"}},
    {"ellipse", {"a"}},
    {"offset_circle", {"radius", "offset"}},
    {"graph", {"base", "terms"}},
};

AmbientSpec make_ambient_spec(const std::string& name, const Params& p) {
  p.require_only({"kind", "n", "m", "c", "q"});
  AmbientSpec spec;
  spec.name = name;
  spec.kind = p.str("kind");
  spec.n = p.integer("n", 2);
  spec.params.m = p.real("m", spec.params.m);
  spec.params.c = p.real("c", spec.params.c);
  spec.params.q = p.real("q", spec.params.q);
  try {
    (void)spec.build();
  } catch (const std::exception& e) {
    throw ConfigError(p.where() + ": " + e.what());
  }
  return spec;
}

void validate_surface(const SurfaceSpec& s) {
  if (!kSurfaceTypes.count(s.type))
    throw ConfigError(s.params.where() + ": unknown surface type '" + s.type + "'");
  auto allowed = kSurfaceKeys.at(s.type);
  allowed.insert({"type", "ambient"});
  s.params.require_only(allowed);
  if (s.type == "graph") (void)parse_terms(s.params.str("terms", ""));
  for (const auto& [key, value] : s.params.values())
    if (key != "type" && key != "ambient" && key != "terms") (void)s.params.real(key);
}

}  // namespace

void Params::bad(const std::string& key, const std::string& what) const {
  throw ConfigError(where_ + ": key '" + key + "' " + what);
}

std::string Params::str(const std::string& key, const std::string& fallback) const {
  const auto it = values_.find(key);
  return it == values_.end() ? fallback : it->second;
}

std::string Params::str(const std::string& key) const {
  const auto it = values_.find(key);
  if (it == values_.end()) bad(key, "is required");
  return it->second;
}

double Params::real(const std::string& key, double fallback) const {
  return has(key) ? real(key) : fallback;
}

double Params::real(const std::string& key) const {
  double v = 0.0;
  if (!parse_double(str(key), v)) bad(key, "expects a number, got '" + str(key) + "'");
  return v;
}

int Params::integer(const std::string& key, int fallback) const {
  if (!has(key)) return fallback;
  long long v = 0;
  if (!parse_int(str(key), v)) bad(key, "expects an integer, got '" + str(key) + "'");
  return static_cast<int>(v);
}

std::vector<int> Params::int_list(const std::string& key, std::vector<int> fallback) const {
  if (!has(key)) return fallback;
  std::vector<int> out;
  for (const auto& item : split(str(key), ',')) {
    long long v = 0;
    if (!parse_int(item, v)) bad(key, "expects integers, got '" + item + "'");
    out.push_back(static_cast<int>(v));
  }
  return out;
}

std::vector<double> Params::real_list(const std::string& key, std::vector<double> fallback) const {
  if (!has(key)) return fallback;
  std::vector<double> out;
  for (const auto& item : split(str(key), ',')) {
    double v = 0.0;
    if (!parse_double(item, v)) bad(key, "expects numbers, got '" + item + "'");
    out.push_back(v);
  }
  return out;
}

std::vector<std::string> Params::str_list(const std::string& key,
                                          std::vector<std::string> fallback) const {
  return has(key) ? split(str(key), ',') : fallback;
}

void Params::require_only(const std::set<std::string>& allowed) const {
  for (const auto& [key, value] : values_)
    if (!allowed.count(key)) bad(key, "is not recognized");
}

AmbientSpace AmbientSpec::build() const { return make_ambient(kind, n, params); }

DiscreteHypersurface SurfaceSpec::build(const AmbientSpace& amb, int N) const {
  if (type == "graph") {
    const RadialFunction rho{name, params.real("base", 1.0), parse_terms(params.str("terms", ""))};
    return build_radial_graph(amb, rho, std::max(N / 2, 4), N);
  }
  MeridianCurve curve;
  if (type == "circle") {
    curve = MeridianCurve::circle(params.real("radius", 1.0));
  } else if (type == "slice") {
    curve = MeridianCurve::slice(params.real("r0", 1.0));
  } else if (type == "perturbed_slice") {
    curve = MeridianCurve::perturbed_slice(params.real("r0", 1.0), params.real("amplitude", 0.1),
                                           params.integer("mode", 2));
  } else if (type == "ellipse") {
    curve = MeridianCurve::ellipse(params.real("a", 2.0));
  } else if (type == "offset_circle") {
    curve = MeridianCurve::offset_circle(params.real("radius", 1.0), params.real("offset", 0.2));
  } else {
    throw ConfigError(params.where() + ": unknown surface type '" + type + "'");
  }
  return build_rotational(amb, curve, N);
}

const AmbientSpec& SuiteConfig::ambient(const std::string& name) const {
  for (const auto& a : ambients)
    if (a.name == name) return a;
  throw ConfigError("unknown ambient '" + name + "'");
}

const SurfaceSpec& SuiteConfig::surface(const std::string& name) const {
  for (const auto& s : surfaces)
    if (s.name == name) return s;
  throw ConfigError("unknown surface '" + name + "'");
}

std::vector<HarmonicTerm> parse_terms(const std::string& text) {
  std::vector<HarmonicTerm> out;
  for (const auto& item : split(text, ',')) {
    const auto parts = split(item, ':');
    long long l = 0, m = 0;
    double c = 0.0;
    if (parts.size() != 3 || !parse_int(parts[0], l) || !parse_int(parts[1], m) ||
        !parse_double(parts[2], c) || l < 0 || std::llabs(m) > l)
      throw ConfigError("harmonic term '" + item + "' is not of the form l:m:coeff with |m| <= l");
    out.push_back({static_cast<int>(l), static_cast<int>(m), c});
  }
  return out;
}

SurfaceSpec parse_surface_line(const std::string& line, const std::string& ambient) {
  std::istringstream in(line);
  SurfaceSpec s;
  if (!(in >> s.type)) throw ConfigError("empty surface description");
  s.name = s.type;
  s.ambient = ambient;
  std::map<std::string, std::string> values;
  std::string token;
  while (in >> token) {
    const auto eq = token.find('=');
    if (eq == std::string::npos || eq == 0)
      throw ConfigError("surface description: expected key=value, got '" + token + "'");
    values[token.substr(0, eq)] = token.substr(eq + 1);
  }
  values["type"] = s.type;
  values["ambient"] = ambient;
  s.params = Params("surface '" + line + "'", std::move(values));
  validate_surface(s);
  return s;
}

const std::set<std::string>& known_check_types() { return kCheckTypes; }

SuiteConfig parse_config(std::istream& in, const std::string& source) {
  struct Section {
    std::string kind, name;
    int line = 0;
    std::map<std::string, std::string> values;
  };
  SuiteConfig cfg;
  cfg.source = source;
  std::map<std::string, std::string> top;
  std::vector<Section> sections;

  std::string raw;
  int lineno = 0;
  auto where = [&](int l) { return source + ":" + std::to_string(l); };
  while (std::getline(in, raw)) {
    ++lineno;
    const auto hash = raw.find('#');
    const std::string line = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') throw ConfigError(where(lineno) + ": unterminated section header");
      std::istringstream hdr(line.substr(1, line.size() - 2));
      Section sec;
      sec.line = lineno;
      std::string extra;
      if (!(hdr >> sec.kind >> sec.name) || (hdr >> extra))
        throw ConfigError(where(lineno) + ": section header must be [kind name]");
      if (sec.kind != "ambient" && sec.kind != "surface" && sec.kind != "check")
        throw ConfigError(where(lineno) + ": unknown section kind '" + sec.kind + "'");
      for (const auto& s : sections)
        if (s.kind == sec.kind && s.name == sec.name)
          throw ConfigError(where(lineno) + ": duplicate " + sec.kind + " '" + sec.name + "'");
      sections.push_back(std::move(sec));
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError(where(lineno) + ": expected key = value");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty()) throw ConfigError(where(lineno) + ": empty key");
    auto& target = sections.empty() ? top : sections.back().values;
    if (target.count(key)) throw ConfigError(where(lineno) + ": duplicate key '" + key + "'");
    target[key] = value;
  }

  const Params globals(source, top);
  globals.require_only({"seed", "grids", "output"});
  if (globals.has("seed")) {
    long long s = 0;
    if (!parse_int(globals.str("seed"), s) || s < 0)
      throw ConfigError(source + ": seed must be a non-negative integer");
    cfg.seed = static_cast<std::uint64_t>(s);
  }
  cfg.grids = globals.int_list("grids", cfg.grids);
  cfg.output = globals.str("output", cfg.output);
  if (cfg.grids.empty()) throw ConfigError(source + ": grids must not be empty");

  for (const auto& sec : sections) {
    const Params p(where(sec.line) + " [" + sec.kind + " " + sec.name + "]", sec.values);
    if (sec.kind == "ambient") {
      cfg.ambients.push_back(make_ambient_spec(sec.name, p));
    } else if (sec.kind == "surface") {
      cfg.surfaces.push_back({sec.name, p.str("ambient"), p.str("type"), p});
    } else {
      const std::string type = p.str("type");
      if (!kCheckTypes.count(type))
        throw ConfigError(p.where() + ": unknown check type '" + type + "'");
      cfg.checks.push_back({sec.name, type, p});
    }
  }
  for (const auto& s : cfg.surfaces) {
    validate_surface(s);
    try {
      (void)cfg.ambient(s.ambient);
    } catch (const ConfigError& e) {
      throw ConfigError(s.params.where() + ": " + e.what());
    }
  }
  return cfg;
}

SuiteConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open configuration file '" + path + "'");
  return parse_config(in, path);
}

}  // namespace warpgeo

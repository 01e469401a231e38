#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <memory>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "warpgeo/ambient.hpp"
#include "warpgeo/surface.hpp"

namespace warpgeo {

/// Malformed configuration; maps to exit code 2.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// key = value pairs of one section with typed accessors. Accessors throw ConfigError with
/// the section name and key on malformed values.
class Params {
 public:
  Params() = default;
  Params(std::string where, std::map<std::string, std::string> values)
      : where_(std::move(where)), values_(std::move(values)) {}

  bool has(const std::string& key) const { return values_.count(key) != 0; }
  std::string str(const std::string& key, const std::string& fallback) const;
  std::string str(const std::string& key) const;
  double real(const std::string& key, double fallback) const;
  double real(const std::string& key) const;
  int integer(const std::string& key, int fallback) const;
  std::vector<int> int_list(const std::string& key, std::vector<int> fallback) const;
  std::vector<double> real_list(const std::string& key, std::vector<double> fallback) const;
  std::vector<std::string> str_list(const std::string& key, std::vector<std::string> fallback) const;

  /// Throws ConfigError naming the first key outside `allowed`.
  void require_only(const std::set<std::string>& allowed) const;

  const std::string& where() const { return where_; }
  const std::map<std::string, std::string>& values() const { return values_; }

 private:
  [[noreturn]] void bad(const std::string& key, const std::string& what) const;

  std::string where_;
  std::map<std::string, std::string> values_;
};

struct AmbientSpec {
  std::string name;
  std::string kind;
  int n = 2;
  AmbientParams params;

  AmbientSpace build() const;
};

/// Surface family evaluated at a grid resolution N (N_s for rotational, N_phi = 2 N_theta for
/// graphs).
struct SurfaceSpec {
  std::string name;
  std::string ambient;
  std::string type;
  Params params;

  bool is_graph() const { return type == "graph"; }
  DiscreteHypersurface build(const AmbientSpace& ambient, int N) const;
};

struct CheckSpec {
  std::string name;
  std::string type;
  Params params;
};

struct SuiteConfig {
  std::uint64_t seed = 1;
  std::vector<int> grids{64, 128, 256};
  std::string output = "report.csv";
  std::string source;
  std::vector<AmbientSpec> ambients;
  std::vector<SurfaceSpec> surfaces;
  std::vector<CheckSpec> checks;

  const AmbientSpec& ambient(const std::string& name) const;
  const SurfaceSpec& surface(const std::string& name) const;
};

/// Surface from a one-line description: `type key=value ...`, for example
/// `ellipse a=2` or `graph base=1 terms=2:0:0.1,3:1:0.02`.
SurfaceSpec parse_surface_line(const std::string& line, const std::string& ambient = "ambient");

/// Harmonic terms written as `l:m:coeff` separated by commas.
std::vector<HarmonicTerm> parse_terms(const std::string& text);

/// Check types understood by the suite runner.
const std::set<std::string>& known_check_types();

SuiteConfig parse_config(std::istream& in, const std::string& source = "<config>");
SuiteConfig load_config(const std::string& path);

}  // namespace warpgeo

#include <CLI11.hpp>

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "warpgeo/config.hpp"
#include "warpgeo/suite.hpp"
#include "warpgeo/variational.hpp"
#include "warpgeo/verify.hpp"

using namespace warpgeo;

namespace {

constexpr int kConfigExit = 2;

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6e", v);
  return buf;
}

/// "kind key=value ..." with keys n, m, c, q.
AmbientSpec parse_ambient_words(const std::vector<std::string>& words) {
  if (words.empty()) throw ConfigError("missing ambient name");
  std::map<std::string, std::string> values{{"kind", words[0]}};
  for (std::size_t i = 1; i < words.size(); ++i) {
    const auto eq = words[i].find('=');
    if (eq == std::string::npos || eq == 0)
      throw ConfigError("ambient parameter must be key=value, got '" + words[i] + "'");
    values[words[i].substr(0, eq)] = words[i].substr(eq + 1);
  }
  const Params p("ambient", values);
  p.require_only({"kind", "n", "m", "c", "q"});
  AmbientSpec spec;
  spec.name = words[0];
  spec.kind = words[0];
  spec.n = p.integer("n", 2);
  spec.params.m = p.real("m", spec.params.m);
  spec.params.c = p.real("c", spec.params.c);
  spec.params.q = p.real("q", spec.params.q);
  return spec;
}

std::vector<std::string> split_words(const std::string& s) {
  std::istringstream in(s);
  std::vector<std::string> out;
  for (std::string w; in >> w;) out.push_back(w);
  return out;
}

int cmd_run(const std::string& path, int jobs, std::optional<std::uint64_t> seed,
            std::string out_dir, bool quiet) {
  const auto cfg = load_config(path);
  if (out_dir.empty()) {
    const char* env = std::getenv("WARPGEO_OUT");
    out_dir = env && *env ? env : ".";
  }
  const std::filesystem::path dir(out_dir);
  if (!std::filesystem::is_directory(dir)) {
    std::cerr << "error: output directory '" << dir.string() << "' does not exist\n";
    return kConfigExit;
  }
  SuiteOptions opt;
  opt.jobs = jobs;
  opt.seed = seed;
  const auto report = run_suite(cfg, opt);

  const auto csv_path = dir / cfg.output;
  std::ofstream csv(csv_path);
  if (!csv) {
    std::cerr << "error: cannot write '" << csv_path.string() << "'\n";
    return kConfigExit;
  }
  write_csv(report, csv);
  const auto plots = write_plot_files(report, dir);
  if (!quiet) print_summary(report, std::cout);
  std::cout << "report: " << csv_path.string() << " (" << plots.size() << " plot files)\n";
  return report.exit_code();
}

int cmd_describe(const std::vector<std::string>& words) {
  const auto spec = parse_ambient_words(words);
  const auto amb = spec.build();
  const auto& prof = amb.profile();
  const auto cond = ambient_conditions(amb);
  const double hi = std::isfinite(prof.r_max()) ? prof.r_max() : 10.0;

  std::cout << "ambient " << spec.kind << " (n = " << amb.n() << ", epsilon = " << amb.epsilon()
            << ")\n";
  std::cout << "boundary mode: " << to_string(prof.mode()) << "\n";
  std::cout << "r_max: " << (std::isfinite(prof.r_max()) ? num(prof.r_max()) : "inf") << "\n";
  if (prof.is_shape_function()) std::cout << "horizon radius lambda(0): " << num(prof.horizon_radius()) << "\n";
  std::cout << "\n       r        lambda       lambda'      lambda''    C3 function   C4 function\n";
  double first_c2_failure = std::nan("");
  for (int i = 1; i <= 256; ++i) {
    const double r = hi * i / 257.0;
    const auto v = amb.eval(r);
    if (std::isnan(first_c2_failure) && v.dlambda <= 0.0) first_c2_failure = r;
    if (i % 32 != 0 && i != 1) continue;
    std::printf("%12.5e %12.5e %12.5e %12.5e %13.5e %13.5e\n", r, v.lambda, v.dlambda, v.ddlambda,
                amb.c3_function(r), amb.c4_function(r));
  }
  auto line = [](const char* name, bool holds, double margin) {
    std::printf("%-12s %-6s margin %s\n", name, holds ? "holds" : "fails", num(margin).c_str());
  };
  std::cout << "\nconditions sampled on (0, " << num(hi) << "):\n";
  if (cond.mode == BoundaryMode::ConePoint) {
    std::printf("%-12s %-6s lambda(0) = 0, lambda'(0) = 1\n", "cone point", cond.cone_point ? "holds" : "fails");
  } else {
    line("C1", cond.c1, cond.c1_margin);
  }
  line("C2", cond.c2, cond.c2_margin);
  line("C3", cond.c3, cond.c3_margin);
  line("C4", cond.c4, cond.c4_margin);
  line("C4 (weak)", cond.c4_weak, cond.c4_margin);
  line("Ricci fiber", cond.ricci_fiber, cond.ricci_fiber_margin);
  if (!std::isnan(first_c2_failure))
    std::cout << "C2 fails from r ~ " << num(first_c2_failure) << " on (lambda' <= 0)\n";
  return 0;
}

int cmd_counterexample(double a, int n, int N) {
  const auto rep = ellipsoid_counterexample(a, n, N);
  const double h_eq = (1.0 / (a * a) + (n - 1)) / n;
  std::cout << "ellipsoid a = " << a << ", n = " << n << ", N_s = " << N << "\n";
  std::cout << "max |H_mesh - H(r)|:        " << num(rep.closed_form_error) << "\n";
  std::cout << "pole H:                     " << num(rep.pole_h) << " (closed form " << num(a) << ")\n";
  std::cout << "equator H:                  " << num(rep.equator_h) << " (closed form " << num(h_eq) << ")\n";
  std::cout << "equator kappa:             ";
  for (int i = 0; i < rep.equator_kappa.size(); ++i) std::cout << ' ' << num(rep.equator_kappa[i]);
  std::cout << "\nequator umbilic deficit:    " << num(rep.equator_deficit) << "\n";
  std::cout << "min Phi'(r):                " << num(rep.min_phi_derivative)
            << (rep.phi_increasing ? " (Phi increasing)" : " (Phi not increasing)") << "\n";
  std::cout << "min interior deficit:       " << num(rep.min_interior_deficit) << "\n";
  std::cout << "star-shaped:                " << (rep.star_shaped ? "yes" : "no") << "\n";
  std::cout << "corHphi hypotheses:         " << (rep.cor_hphi.hypotheses_hold ? "hold" : "violated");
  for (const auto& h : rep.cor_hphi.hypotheses)
    if (!h.holds) std::cout << " [" << h.name << "]";
  std::cout << "\ncorHphi conclusion (" << rep.cor_hphi.conclusion
            << "): " << (rep.cor_hphi.conclusion_holds ? "holds" : "fails") << "\n";
  if (!rep.note.empty()) std::cout << "note: " << rep.note << "\n";
  const bool ok = rep.cor_hphi.consistent() &&
                  (a == 1.0 || (rep.phi_increasing && !rep.cor_hphi.hypotheses_hold));
  return ok ? 0 : 1;
}

int cmd_variational(const std::string& surface, const std::string& ambient, const std::string& psi_spec,
                    int modes, double dt, int N, std::uint64_t seed) {
  RadialWeight psi;
  try {
    psi = RadialWeight::parse(psi_spec);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  if (!(dt > 0.0)) throw ConfigError("--dt must be positive");
  if (modes < 1) throw ConfigError("--modes must be positive");
  const auto amb_spec = parse_ambient_words(split_words(ambient));
  const auto amb = amb_spec.build();
  const auto spec = parse_surface_line(surface, amb_spec.name);
  const auto surf = spec.build(amb, N);
  const auto data = extrinsic_data(surf);

  VariationSpec var;
  var.f = random_field(surf, seed);
  var.psi = psi;
  var.t_steps = {dt, dt / 2.0};
  const auto vol = weighted_volume_derivative(surf, data, var);
  const auto area = area_derivative(surf, data, var);
  const auto j = j_derivative(surf, data, var);
  const auto crit = critical_point_check(surf, data, psi, modes, seed);

  std::cout << "surface " << surface << " in " << ambient << ", N = " << N << ", psi = " << psi.name
            << ", dt = " << dt << ", seed = " << seed << "\n";
  bool ok = true;
  for (const auto& [name, est] : {std::pair{"V'(0)", &vol}, std::pair{"A'(0)", &area}}) {
    std::cout << name << " analytic " << num(est->analytic);
    for (std::size_t i = 0; i < est->steps.size(); ++i)
      std::cout << "  fd(dt=" << est->steps[i] << ") " << num(est->finite_diff[i]) << " mismatch "
                << num(est->mismatch[i]);
    const bool at_floor = std::abs(est->mismatch.front()) <= 1e-12 * std::max(1.0, std::abs(est->analytic));
    const double ratio = est->halving_ratio;
    const char* verdict = at_floor                      ? "at round-off"
                          : std::abs(ratio - 4.0) <= 1.0 ? "second order"
                          : ratio > 5.0                  ? "higher order"
                                                         : "below second order";
    std::cout << "  halving ratio " << num(ratio) << " (" << verdict << ")\n";
    ok = ok && (at_floor || ratio >= 3.0);
  }
  const double j_res = std::abs(j.value - j.cross_check) / std::max(1.0, std::abs(j.cross_check));
  std::cout << "J'(0) " << num(j.value) << ", A'+nH0V' " << num(j.cross_check) << ", H0 " << num(j.h0)
            << ", relative difference " << num(j_res) << "\n";
  ok = ok && j_res <= 1e-10;
  std::cout << "critical point (" << modes << " volume-preserving fields): H e^-psi "
            << (crit.proportional ? "constant" : "not constant") << " (spread " << num(crit.spread)
            << "), max |A'| " << num(crit.max_area_derivative) << " (relative "
            << num(crit.max_area_derivative_relative) << "), max |J'| relative " << num(crit.max_j_relative)
            << "\nwitness A' " << num(crit.witness_area_derivative) << " vs int n f^2 e^psi "
            << num(crit.witness_oracle) << "; statements " << (crit.consistent ? "agree" : "disagree") << "\n";
  ok = ok && crit.consistent;
  return ok ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"warpgeo: numerical checks for hypersurfaces in warped product spaces"};
  app.require_subcommand(1);

  auto* run = app.add_subcommand("run", "Run a check suite from a configuration file");
  std::string config_path, out_dir;
  int jobs = 1;
  std::optional<std::uint64_t> seed;
  bool quiet = false;
  run->add_option("config", config_path, "Suite configuration")->required();
  run->add_option("--jobs,-j", jobs, "Worker threads")->check(CLI::PositiveNumber);
  run->add_option("--seed", seed, "Override the configuration seed");
  run->add_option("--out,-o", out_dir, "Output directory (default: $WARPGEO_OUT or .)");
  run->add_flag("--quiet,-q", quiet, "Only print the report path");

  auto* describe = app.add_subcommand("describe", "Print warping function samples and ambient conditions");
  std::vector<std::string> ambient_words;
  describe->add_option("ambient", ambient_words, "Catalog name followed by key=value parameters (n, m, c, q)")
      ->required();

  auto* counter = app.add_subcommand("counterexample", "Ellipsoid with H = Phi(r), Phi increasing");
  double a = 2.0;
  int n = 2, n_s = 512;
  counter->add_option("--a", a, "Axis semi-axis")->capture_default_str();
  counter->add_option("--n", n, "Hypersurface dimension")->capture_default_str();
  counter->add_option("--N", n_s, "Meridian nodes")->capture_default_str();

  auto* variational = app.add_subcommand("variational", "First variation of area and weighted volume");
  std::string surface = "ellipse a=2", ambient = "euclidean", psi = "zero";
  int modes = 20, grid = 256;
  double dt = 1e-2;
  std::uint64_t var_seed = 1;
  variational->add_option("--surface", surface, "Surface: type key=value ...")->capture_default_str();
  variational->add_option("--ambient", ambient, "Ambient: name key=value ...")->capture_default_str();
  variational->add_option("--psi", psi, "Radial weight: zero, linear:c, quadratic:c")->capture_default_str();
  variational->add_option("--modes", modes, "Random test fields")->capture_default_str();
  variational->add_option("--dt", dt, "Largest finite-difference step")->capture_default_str();
  variational->add_option("--N", grid, "Grid resolution")->capture_default_str();
  variational->add_option("--seed", var_seed, "Random field seed")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kConfigExit;
  }

  try {
    if (*run) return cmd_run(config_path, jobs, seed, out_dir, quiet);
    if (*describe) return cmd_describe(ambient_words);
    if (*counter) return cmd_counterexample(a, n, n_s);
    if (*variational) return cmd_variational(surface, ambient, psi, modes, dt, grid, var_seed);
  } catch (const ConfigError& e) {
    std::cerr << "configuration error: " << e.what() << "\n";
    return kConfigExit;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kConfigExit;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}

#include "warpgeo/suite.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <future>
#include <limits>
#include <map>
#include <mutex>
#include <ostream>
#include <random>
#include <thread>

#include "warpgeo/variational.hpp"
#include "warpgeo/verify.hpp"

namespace warpgeo {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

const std::set<std::string> kCommon{"type", "surfaces", "grids", "tolerance"};

std::set<std::string> with_common(std::initializer_list<std::string> extra) {
  std::set<std::string> out = kCommon;
  out.insert(extra);
  return out;
}

const std::map<std::string, std::set<std::string>> kCheckKeys{
    {"integral_formula", with_common({"k", "min_order", "floor"})},
    {"k1_formula", with_common({"min_order", "floor"})},
    {"ricci_term", with_common({})},
    {"minkowski", with_common({"k", "expect"})},
    {"heintze_karcher", with_common({"expect"})},
    {"theorem", with_common({"theorem", "k", "alpha", "phi", "condition_tol", "umbilic_tol"})},
    {"slice_solve",
     {"type", "ambient", "condition", "k", "alpha", "random", "expect_r0", "tolerance", "nodes"}},
    {"ellipsoid", {"type", "a", "n", "grids", "tolerance"}},
    {"variational", with_common({"psi", "dt"})},
    {"critical_point", with_common({"psi", "fields"})},
};

std::string fmt(double v) {
  if (std::isnan(v)) return "nan";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.10e", v);
  return buf;
}

std::string fmt_short(double v) {
  if (std::isnan(v)) return "nan";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.3e", v);
  return buf;
}

std::string fmt_param(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%g", v);
  return buf;
}

struct Built {
  DiscreteHypersurface surf;
  ExtrinsicData data;
};

/// Meshed surfaces shared between jobs, built once per (surface, N).
class SurfaceCache {
 public:
  explicit SurfaceCache(const SuiteConfig& cfg) : cfg_(cfg) {}

  std::shared_ptr<const Built> get(const SurfaceSpec& spec, int N) {
    std::shared_future<std::shared_ptr<const Built>> fut;
    std::promise<std::shared_ptr<const Built>> promise;
    bool owner = false;
    {
      std::lock_guard lock(mutex_);
      const auto key = std::make_pair(spec.name, N);
      auto it = entries_.find(key);
      if (it == entries_.end()) {
        fut = promise.get_future().share();
        entries_.emplace(key, fut);
        owner = true;
      } else {
        fut = it->second;
      }
    }
    if (owner) {
      try {
        auto amb = cfg_.ambient(spec.ambient).build();
        auto surf = spec.build(amb, N);
        auto data = extrinsic_data(surf);
        promise.set_value(std::make_shared<const Built>(Built{std::move(surf), std::move(data)}));
      } catch (...) {
        promise.set_exception(std::current_exception());
      }
    }
    return fut.get();
  }

 private:
  const SuiteConfig& cfg_;
  std::mutex mutex_;
  std::map<std::pair<std::string, int>, std::shared_future<std::shared_ptr<const Built>>> entries_;
};

struct Job {
  ReportRow proto;  // identifies the job in an error row
  std::function<std::vector<ReportRow>()> run;
};

struct Context {
  const SuiteConfig& cfg;
  SurfaceCache& cache;
  std::uint64_t seed;
};

ReportRow row_from(const ReportRow& proto, int N, const CheckResult& r) {
  ReportRow row = proto;
  row.N = N;
  row.value = r.value;
  row.scale = r.scale;
  row.tolerance = r.tolerance;
  row.status = r.passed ? RowStatus::Pass : RowStatus::Fail;
  row.order = r.convergence_order;
  row.note = r.note;
  return row;
}

std::vector<const SurfaceSpec*> selected_surfaces(const SuiteConfig& cfg, const CheckSpec& chk) {
  const auto names = chk.params.str_list("surfaces", {"all"});
  std::vector<const SurfaceSpec*> out;
  if (names.size() == 1 && names[0] == "all") {
    for (const auto& s : cfg.surfaces) out.push_back(&s);
    return out;
  }
  for (const auto& n : names) {
    try {
      out.push_back(&cfg.surface(n));
    } catch (const ConfigError& e) {
      throw ConfigError(chk.params.where() + ": " + e.what());
    }
  }
  return out;
}

std::vector<int> grids_of(const SuiteConfig& cfg, const CheckSpec& chk) {
  auto g = chk.params.int_list("grids", cfg.grids);
  if (g.empty()) throw ConfigError(chk.params.where() + ": grids must not be empty");
  for (int N : g)
    if (N < 8) throw ConfigError(chk.params.where() + ": grid size " + std::to_string(N) + " is below 8");
  return g;
}

ReportRow proto_for(const CheckSpec& chk, const SurfaceSpec& s, int k = 0) {
  ReportRow p;
  p.check = chk.name;
  p.surface = s.name;
  p.ambient = s.ambient;
  p.k = k;
  return p;
}

/// Residual series over the grids; with three or more levels the order is attached to the
/// finest row and checked against min_order.
std::vector<ReportRow> series(const ReportRow& proto, const std::vector<int>& grids,
                              const std::function<CheckResult(int)>& eval,
                              std::optional<double> min_order, double floor) {
  std::vector<CheckResult> results;
  for (int N : grids) results.push_back(eval(N));
  std::vector<ReportRow> rows;
  if (grids.size() >= 3) {
    std::map<int, std::size_t> index;
    for (std::size_t i = 0; i < grids.size(); ++i) index[grids[i]] = i;
    const auto study =
        convergence_study([&](int N) { return results[index.at(N)]; }, grids, floor);
    for (std::size_t i = 0; i < grids.size(); ++i) rows.push_back(row_from(proto, grids[i], study.results[i]));
    auto& finest = rows.back();
    finest.order = std::isnan(study.order) ? std::nullopt : std::optional<double>(study.order);
    if (study.saturated) finest.note += (finest.note.empty() ? "" : "; ") + std::string("saturated");
    if (!study.monotone) finest.note += (finest.note.empty() ? "" : "; ") + std::string("not monotone");
    if (min_order) {
      const bool ok = study.saturated || (!std::isnan(study.order) && study.order >= *min_order);
      if (!ok) {
        finest.status = RowStatus::Fail;
        finest.note += (finest.note.empty() ? "" : "; ") + std::string("order below ") + fmt_param(*min_order);
      }
    }
  } else {
    for (std::size_t i = 0; i < grids.size(); ++i) rows.push_back(row_from(proto, grids[i], results[i]));
  }
  return rows;
}

void add_residual_jobs(const Context& ctx, const CheckSpec& chk, std::vector<Job>& jobs) {
  const auto& p = chk.params;
  const auto grids = grids_of(ctx.cfg, chk);
  const double tol = p.real("tolerance", chk.type == "ricci_term" ? 1e-8 : 1e-3);
  std::optional<double> min_order;
  if (p.has("min_order")) min_order = p.real("min_order");
  const double floor = p.real("floor", 1e-12);
  std::vector<int> ks{1};
  if (chk.type == "integral_formula") ks = p.int_list("k", {1});

  for (const auto* s : selected_surfaces(ctx.cfg, chk)) {
    for (int k : ks) {
      const auto proto = proto_for(chk, *s, chk.type == "integral_formula" ? k : 1);
      auto* cache = &ctx.cache;
      const std::string type = chk.type;
      jobs.push_back({proto, [=]() {
                        auto eval = [&](int N) {
                          const auto b = cache->get(*s, N);
                          if (type == "integral_formula") return integral_formula_residual(b->surf, b->data, k, tol);
                          if (type == "k1_formula") return k1_formula_residual(b->surf, b->data, tol);
                          return ricci_term_identity(b->surf, b->data, tol);
                        };
                        return series(proto, grids, eval, type == "ricci_term" ? std::nullopt : min_order, floor);
                      }});
    }
  }
}

void add_gap_jobs(const Context& ctx, const CheckSpec& chk, std::vector<Job>& jobs) {
  const auto& p = chk.params;
  const auto grids = grids_of(ctx.cfg, chk);
  const double tol = p.real("tolerance", 1e-8);
  const std::string expect = p.str("expect", "nonnegative");
  if (expect != "nonnegative" && expect != "equality")
    throw ConfigError(p.where() + ": expect must be 'nonnegative' or 'equality'");
  const bool hk = chk.type == "heintze_karcher";
  const std::vector<int> ks = hk ? std::vector<int>{1} : p.int_list("k", {1});

  for (const auto* s : selected_surfaces(ctx.cfg, chk)) {
    for (int k : ks) {
      const auto proto = proto_for(chk, *s, k);
      auto* cache = &ctx.cache;
      jobs.push_back({proto, [=]() {
                        std::vector<ReportRow> rows;
                        for (int N : grids) {
                          const auto b = cache->get(*s, N);
                          CheckResult r;
                          try {
                            r = hk ? heintze_karcher_gap(b->surf, b->data, tol)
                                   : minkowski_gap(b->surf, b->data, k, tol);
                          } catch (const std::domain_error& e) {
                            ReportRow row = proto;
                            row.N = N;
                            row.value = kNaN;
                            row.tolerance = tol;
                            row.status = RowStatus::Skip;
                            row.note = std::string("refused: ") + e.what();
                            rows.push_back(row);
                            continue;
                          }
                          ReportRow row = row_from(proto, N, r);
                          if (expect == "equality") {
                            const bool ok = std::abs(r.value) <= tol * std::max(r.scale, CheckResult::kFloor);
                            row.status = ok ? RowStatus::Pass : RowStatus::Fail;
                            row.note = "equality expected; " + r.note;
                          } else if (!r.applicable) {
                            row.status = RowStatus::Skip;
                          }
                          rows.push_back(row);
                        }
                        return rows;
                      }});
    }
  }
}

std::function<double(double)> parse_phi(const Params& p, int n) {
  const std::string spec = p.str("phi", "monotone");
  if (spec == "monotone") return {};
  const auto colon = spec.find(':');
  if (colon != std::string::npos && spec.substr(0, colon) == "ellipsoid") {
    const Params sub(p.where(), {{"phi", spec.substr(colon + 1)}});
    const double a = sub.real("phi");
    if (!(a > 0.0)) throw ConfigError(p.where() + ": phi ellipsoid axis must be positive");
    return [a, n](double r) { return ellipsoid_mean_curvature(a, n, r); };
  }
  throw ConfigError(p.where() + ": phi must be 'monotone' or 'ellipsoid:<a>', got '" + spec + "'");
}

bool is_hk_family(Theorem t) {
  return t == Theorem::NablaHk || t == Theorem::CorHkphi || t == Theorem::CorHkalph ||
         t == Theorem::CorHkconst;
}

bool uses_alpha(Theorem t) {
  return t == Theorem::CorHalph || t == Theorem::CorHkalph || t == Theorem::Hklambda;
}

void add_theorem_jobs(const Context& ctx, const CheckSpec& chk, std::vector<Job>& jobs) {
  const auto& p = chk.params;
  const auto grids = grids_of(ctx.cfg, chk);
  const auto names = p.str_list("theorem", {"all"});
  std::vector<Theorem> theorems;
  if (names.size() == 1 && names[0] == "all") {
    theorems = {Theorem::NablaH,   Theorem::NablaHk,   Theorem::CorHphi,    Theorem::CorHkphi,
                Theorem::CorHalph, Theorem::CorHkalph, Theorem::CorHkconst, Theorem::Hklambda};
  } else {
    for (const auto& n : names) {
      try {
        theorems.push_back(parse_theorem(n));
      } catch (const std::invalid_argument& e) {
        throw ConfigError(p.where() + ": " + e.what());
      }
    }
  }
  const auto ks = p.int_list("k", {2});
  const double alpha = p.real("alpha", 1.0);
  TheoremOptions base;
  base.alpha = alpha;
  base.condition_tol = p.real("condition_tol", base.condition_tol);
  base.umbilic_tol = p.real("umbilic_tol", base.umbilic_tol);
  (void)parse_phi(p, 2);

  for (const auto* s : selected_surfaces(ctx.cfg, chk)) {
    const int n = ctx.cfg.ambient(s->ambient).n;
    for (Theorem t : theorems) {
      const bool k_matters = is_hk_family(t) || t == Theorem::Hklambda;
      const std::vector<int> tks = k_matters ? ks : std::vector<int>{1};
      for (int k : tks) {
        ReportRow proto = proto_for(chk, *s, k);
        proto.check = chk.name + "." + to_string(t);
        if (uses_alpha(t)) proto.alpha = alpha;
        // A k that is valid in general but exceeds this surface's dimension is not applicable.
        const int k_max = is_hk_family(t) ? n - 1 : n;
        if (k_matters && k >= 1 && k > k_max) {
          ReportRow row = proto;
          row.value = kNaN;
          row.status = RowStatus::Skip;
          row.note = "k exceeds " + std::to_string(k_max) + " for n = " + std::to_string(n);
          jobs.push_back({proto, [row]() { return std::vector<ReportRow>{row}; }});
          continue;
        }
        auto* cache = &ctx.cache;
        TheoremOptions opt = base;
        opt.k = k;
        opt.phi = parse_phi(p, n);
        jobs.push_back({proto, [=]() {
                          std::vector<ReportRow> rows;
                          for (int N : grids) {
                            const auto b = cache->get(*s, N);
                            const auto rep = theorem_check(b->surf, b->data, t, opt);
                            ReportRow row = proto;
                            row.N = N;
                            row.value = rep.conclusion_margin;
                            row.scale = 1.0;
                            row.tolerance = opt.umbilic_tol;
                            row.status = rep.consistent() ? RowStatus::Pass : RowStatus::Fail;
                            std::string failed;
                            for (const auto& h : rep.hypotheses)
                              if (!h.holds) failed += (failed.empty() ? "" : " ") + h.name;
                            row.note = (rep.hypotheses_hold ? "hypotheses hold" : "hypotheses fail: " + failed) +
                                       "; " + rep.conclusion + (rep.conclusion_holds ? " holds" : " fails");
                            rows.push_back(row);
                          }
                          return rows;
                        }});
      }
    }
  }
}

void add_slice_jobs(const Context& ctx, const CheckSpec& chk, std::vector<Job>& jobs,
                    std::uint64_t seed) {
  const auto& p = chk.params;
  const auto& amb_spec = [&]() -> const AmbientSpec& {
    try {
      return ctx.cfg.ambient(p.str("ambient"));
    } catch (const ConfigError& e) {
      throw ConfigError(p.where() + ": " + e.what());
    }
  }();
  SliceCondition cond;
  try {
    cond = parse_slice_condition(p.str("condition", "Hk_alpha_lambdaprime"));
  } catch (const std::invalid_argument& e) {
    throw ConfigError(p.where() + ": " + e.what());
  }
  const double tol = p.real("tolerance", 1e-10);
  const int nodes = p.integer("nodes", 64);
  const int random = p.integer("random", 0);
  std::optional<double> expect;
  if (p.has("expect_r0")) expect = p.real("expect_r0");

  std::vector<std::pair<int, double>> pairs;
  if (random > 0) {
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<int> kd(1, amb_spec.n);
    std::uniform_real_distribution<double> ad(0.0, 3.0);
    while (static_cast<int>(pairs.size()) < random) {
      const int k = kd(rng);
      const double alpha = 1.0 / k + ad(rng);
      if (std::abs(k * alpha - 1.0) < 1e-3) continue;
      pairs.emplace_back(k, alpha);
    }
  } else {
    pairs.emplace_back(p.integer("k", 1), p.real("alpha", 1.0));
  }

  for (const auto& [k, alpha] : pairs) {
    ReportRow proto;
    proto.check = chk.name;
    proto.surface = "-";
    proto.ambient = amb_spec.name;
    proto.k = k;
    proto.alpha = alpha;
    proto.N = nodes;
    proto.tolerance = tol;
    jobs.push_back({proto, [=]() {
                      const auto amb = amb_spec.build();
                      const auto sol = slice_equation_solve(amb, cond, k, alpha, nodes);
                      ReportRow row = proto;
                      row.scale = 1.0;
                      if (sol.degenerate) {
                        row.value = 0.0;
                        row.status = expect ? RowStatus::Fail : RowStatus::Skip;
                        row.note = "degenerate: " + sol.message;
                        return std::vector<ReportRow>{row};
                      }
                      double worst = 0.0;
                      for (double res : sol.pointwise_residual) worst = std::max(worst, res);
                      std::string roots;
                      for (double r : sol.roots) roots += (roots.empty() ? "" : " ") + fmt_param(r);
                      row.note = "roots: " + (roots.empty() ? std::string("none") : roots);
                      bool ok = !sol.roots.empty();
                      if (expect) {
                        ok = ok && sol.roots.size() == 1;
                        if (!sol.roots.empty()) worst = std::max(worst, std::abs(sol.roots[0] - *expect));
                      }
                      row.value = sol.roots.empty() ? kNaN : worst;
                      row.status = ok && worst <= tol ? RowStatus::Pass : RowStatus::Fail;
                      return std::vector<ReportRow>{row};
                    }});
  }
}

void add_ellipsoid_jobs(const Context& ctx, const CheckSpec& chk, std::vector<Job>& jobs) {
  const auto& p = chk.params;
  const auto grids = grids_of(ctx.cfg, chk);
  const double a = p.real("a", 2.0);
  const int n = p.integer("n", 2);
  const double tol = p.real("tolerance", 1e-6);
  if (!(a > 0.0) || n < 2) throw ConfigError(p.where() + ": ellipsoid needs a > 0 and n >= 2");
  ReportRow proto;
  proto.check = chk.name;
  proto.surface = "ellipsoid_a=" + fmt_param(a) + "_n=" + std::to_string(n);
  proto.ambient = "euclidean";
  proto.k = 1;
  proto.tolerance = tol;
  jobs.push_back({proto, [=]() {
                    // Principal curvatures: a at the poles; 1/a^2 and 1 (n - 1 times) at the equator.
                    const double h_eq = (1.0 / (a * a) + (n - 1)) / n;
                    const double d_eq =
                        std::pow(1.0 / (a * a) - h_eq, 2) + (n - 1) * std::pow(1.0 - h_eq, 2);
                    std::vector<ReportRow> rows;
                    for (int N : grids) {
                      const auto rep = ellipsoid_counterexample(a, n, N);
                      ReportRow row = proto;
                      row.N = N;
                      row.value = std::max({rep.closed_form_error, std::abs(rep.pole_h - a),
                                            std::abs(rep.equator_h - h_eq),
                                            std::abs(rep.equator_deficit - d_eq)});
                      bool ok = row.value <= tol && rep.cor_hphi.consistent();
                      if (a != 1.0) {
                        ok = ok && rep.phi_increasing && !rep.cor_hphi.hypotheses_hold &&
                             rep.min_interior_deficit > 0.0;
                      }
                      row.status = ok ? RowStatus::Pass : RowStatus::Fail;
                      row.note = "pole H " + fmt_short(rep.pole_h) + ", equator H " + fmt_short(rep.equator_h) +
                                 ", equator deficit " + fmt_short(rep.equator_deficit) +
                                 (rep.phi_increasing ? ", Phi increasing" : ", Phi not increasing") +
                                 (rep.note.empty() ? "" : "; " + rep.note);
                      rows.push_back(row);
                    }
                    return rows;
                  }});
}

RadialWeight parse_weight(const Params& p) {
  try {
    return RadialWeight::parse(p.str("psi", "zero"));
  } catch (const std::invalid_argument& e) {
    throw ConfigError(p.where() + ": " + e.what());
  }
}

void add_variational_jobs(const Context& ctx, const CheckSpec& chk, std::vector<Job>& jobs,
                          std::uint64_t seed) {
  const auto& p = chk.params;
  const auto grids = grids_of(ctx.cfg, chk);
  const auto psi = parse_weight(p);
  const double dt = p.real("dt", 1e-2);
  if (!(dt > 0.0)) throw ConfigError(p.where() + ": dt must be positive");
  const double tol = p.real("tolerance", 0.25);
  std::uint64_t surface_seed = seed;
  for (const auto* s : selected_surfaces(ctx.cfg, chk)) {
    const auto proto = proto_for(chk, *s);
    auto* cache = &ctx.cache;
    const std::uint64_t field_seed = surface_seed++;
    jobs.push_back({proto, [=]() {
                      std::vector<ReportRow> rows;
                      for (int N : grids) {
                        const auto b = cache->get(*s, N);
                        VariationSpec spec;
                        spec.f = random_field(b->surf, field_seed);
                        spec.psi = psi;
                        spec.t_steps = {dt, dt / 2.0};
                        const auto vol = weighted_volume_derivative(b->surf, b->data, spec);
                        const auto area = area_derivative(b->surf, b->data, spec);
                        const auto j = j_derivative(b->surf, b->data, spec);
                        for (const auto& [suffix, est] : {std::pair{".volume", &vol}, std::pair{".area", &area}}) {
                          ReportRow row = proto;
                          row.check += suffix;
                          row.N = N;
                          row.value = est->halving_ratio - 4.0;
                          row.scale = 4.0;
                          row.tolerance = tol;
                          row.status = std::abs(row.value) <= tol * 4.0 ? RowStatus::Pass : RowStatus::Fail;
                          row.note = "halving ratio " + fmt_short(est->halving_ratio) + ", analytic " +
                                     fmt_short(est->analytic) + ", mismatch " + fmt_short(est->mismatch[0]);
                          rows.push_back(row);
                        }
                        ReportRow row = proto;
                        row.check += ".j";
                        row.N = N;
                        row.value = j.value - j.cross_check;
                        row.scale = std::max(1.0, std::abs(j.cross_check));
                        row.tolerance = 1e-10;
                        row.status = row.normalized() <= row.tolerance ? RowStatus::Pass : RowStatus::Fail;
                        row.note = "J'(0) " + fmt_short(j.value) + ", H0 " + fmt_short(j.h0);
                        rows.push_back(row);
                      }
                      return rows;
                    }});
  }
}

void add_critical_jobs(const Context& ctx, const CheckSpec& chk, std::vector<Job>& jobs,
                       std::uint64_t seed) {
  const auto& p = chk.params;
  const auto grids = grids_of(ctx.cfg, chk);
  const auto psi = parse_weight(p);
  const int fields = p.integer("fields", 20);
  const double tol = p.real("tolerance", 1e-6);
  if (fields < 1) throw ConfigError(p.where() + ": fields must be positive");
  for (const auto* s : selected_surfaces(ctx.cfg, chk)) {
    const auto proto = proto_for(chk, *s);
    auto* cache = &ctx.cache;
    jobs.push_back({proto, [=]() {
                      std::vector<ReportRow> rows;
                      for (int N : grids) {
                        const auto b = cache->get(*s, N);
                        const auto rep = critical_point_check(b->surf, b->data, psi, fields, seed, tol);
                        ReportRow row = proto;
                        row.N = N;
                        row.value = rep.spread;
                        row.scale = 1.0;
                        row.tolerance = tol;
                        row.status = rep.consistent ? RowStatus::Pass : RowStatus::Fail;
                        row.note = std::string(rep.proportional ? "H e^-psi constant" : "H e^-psi varies") +
                                   ", max |A'| " + fmt_short(rep.max_area_derivative_relative) +
                                   " (relative), max |J'| " + fmt_short(rep.max_j_relative) +
                                   ", witness A' " + fmt_short(rep.witness_area_derivative);
                        rows.push_back(row);
                      }
                      return rows;
                    }});
  }
}

std::vector<Job> plan(const Context& ctx) {
  std::vector<Job> jobs;
  std::uint64_t index = 0;
  for (const auto& chk : ctx.cfg.checks) {
    chk.params.require_only(kCheckKeys.at(chk.type));
    const std::uint64_t seed = ctx.seed + 1000003ULL * index++;
    const auto& t = chk.type;
    if (t == "integral_formula" || t == "k1_formula" || t == "ricci_term") {
      add_residual_jobs(ctx, chk, jobs);
    } else if (t == "minkowski" || t == "heintze_karcher") {
      add_gap_jobs(ctx, chk, jobs);
    } else if (t == "theorem") {
      add_theorem_jobs(ctx, chk, jobs);
    } else if (t == "slice_solve") {
      add_slice_jobs(ctx, chk, jobs, seed);
    } else if (t == "ellipsoid") {
      add_ellipsoid_jobs(ctx, chk, jobs);
    } else if (t == "variational") {
      add_variational_jobs(ctx, chk, jobs, seed);
    } else if (t == "critical_point") {
      add_critical_jobs(ctx, chk, jobs, seed);
    }
  }
  return jobs;
}

std::string sanitize(const std::string& s) {
  std::string out = s;
  for (char& c : out)
    if (!std::isalnum(static_cast<unsigned char>(c)) && c != '.' && c != '-' && c != '=' && c != '_') c = '_';
  return out;
}

}  // namespace

std::string to_string(RowStatus s) {
  switch (s) {
    case RowStatus::Pass: return "true";
    case RowStatus::Fail: return "false";
    case RowStatus::Skip: return "skip";
    case RowStatus::Error: return "error";
  }
  return "error";
}

double ReportRow::normalized() const { return std::abs(value) / std::max(scale, CheckResult::kFloor); }

int SuiteReport::count(RowStatus s) const {
  return static_cast<int>(std::count_if(rows.begin(), rows.end(), [s](const ReportRow& r) { return r.status == s; }));
}

int SuiteReport::exit_code() const {
  return count(RowStatus::Fail) + count(RowStatus::Error) > 0 ? 1 : 0;
}

SuiteReport run_suite(const SuiteConfig& config, const SuiteOptions& options) {
  SurfaceCache cache(config);
  SuiteReport report;
  report.seed = options.seed.value_or(config.seed);
  const Context ctx{config, cache, report.seed};
  const auto jobs = plan(ctx);

  std::vector<std::vector<ReportRow>> results(jobs.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&]() {
    for (std::size_t i = next++; i < jobs.size(); i = next++) {
      try {
        results[i] = jobs[i].run();
      } catch (const std::exception& e) {
        ReportRow row = jobs[i].proto;
        row.value = kNaN;
        row.status = RowStatus::Error;
        row.note = e.what();
        results[i] = {row};
      }
    }
  };
  const int workers = std::max(1, std::min<int>(options.jobs, static_cast<int>(jobs.size())));
  std::vector<std::thread> pool;
  for (int w = 1; w < workers; ++w) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();

  for (auto& r : results) report.rows.insert(report.rows.end(), r.begin(), r.end());
  std::stable_sort(report.rows.begin(), report.rows.end(), [](const ReportRow& x, const ReportRow& y) {
    const double ax = x.alpha.value_or(-1.0), ay = y.alpha.value_or(-1.0);
    return std::tie(x.surface, x.check, x.k, ax, x.N) < std::tie(y.surface, y.check, y.k, ay, y.N);
  });
  return report;
}

void write_csv(const SuiteReport& report, std::ostream& out) {
  out << "# seed=" << report.seed << "\n";
  out << "check,surface,ambient,k,alpha,N,value,scale,tolerance,passed,order\n";
  for (const auto& r : report.rows) {
    out << r.check << ',' << r.surface << ',' << r.ambient << ',' << r.k << ','
        << (r.alpha ? fmt(*r.alpha) : "") << ',' << r.N << ',' << fmt(r.value) << ',' << fmt(r.scale) << ','
        << fmt(r.tolerance) << ',' << to_string(r.status) << ',' << (r.order ? fmt(*r.order) : "") << '\n';
  }
}

std::vector<std::filesystem::path> write_plot_files(const SuiteReport& report,
                                                    const std::filesystem::path& dir) {
  if (!std::filesystem::is_directory(dir))
    throw std::runtime_error("output directory '" + dir.string() + "' does not exist");
  std::map<std::string, std::vector<const ReportRow*>> groups;
  std::vector<std::string> order;
  for (const auto& r : report.rows) {
    if (r.alpha || r.surface == "-") continue;
    std::string name = r.check;
    if (!r.surface.empty()) name += "_" + r.surface;
    if (r.k > 0) name += "_k" + std::to_string(r.k);
    name = sanitize(name) + ".dat";
    if (!groups.count(name)) order.push_back(name);
    groups[name].push_back(&r);
  }
  std::vector<std::filesystem::path> written;
  for (const auto& name : order) {
    const auto& rows = groups[name];
    if (rows.size() < 2) continue;
    const auto path = dir / name;
    std::ofstream f(path);
    if (!f) throw std::runtime_error("cannot write '" + path.string() + "'");
    f << "# N residual\n";
    for (const auto* r : rows) f << r->N << ' ' << fmt(r->normalized()) << '\n';
    written.push_back(path);
  }
  return written;
}

void print_summary(const SuiteReport& report, std::ostream& out) {
  for (const auto& r : report.rows) {
    char head[160];
    std::snprintf(head, sizeof head, "%-5s %-34s %-20s k=%d N=%-4d resid=%s", to_string(r.status).c_str(),
                  r.check.c_str(), r.surface.c_str(), r.k, r.N, fmt_short(r.normalized()).c_str());
    out << head;
    if (r.order) out << " order=" << fmt_short(*r.order);
    if (!r.note.empty()) out << "  [" << r.note << "]";
    out << '\n';
  }
  out << report.count(RowStatus::Pass) << " passed, " << report.count(RowStatus::Fail) << " failed, "
      << report.count(RowStatus::Skip) << " skipped, " << report.count(RowStatus::Error)
      << " errors (seed " << report.seed << ")\n";
}

}  // namespace warpgeo

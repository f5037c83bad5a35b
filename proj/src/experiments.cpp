#include "dirlab/experiments.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <numbers>
#include <random>
#include <set>
#include <sstream>

#include "dirlab/directions.hpp"
#include "dirlab/fit.hpp"
#include "dirlab/generators.hpp"
#include "dirlab/measure.hpp"
#include "dirlab/version.hpp"
#include "reference/reference.hpp"

namespace dirlab {

using nlohmann::json;

const char* verdict_status_name(VerdictStatus status) noexcept {
  switch (status) {
    case VerdictStatus::Pass: return "pass";
    case VerdictStatus::Fail: return "fail";
    case VerdictStatus::Skipped: return "skipped";
  }
  return "unknown";
}

bool ExperimentReport::pass() const noexcept {
  if (error) return false;
  return std::none_of(verdicts.begin(), verdicts.end(), [](const Verdict& v) { return v.failed(); });
}

const Verdict* ExperimentReport::verdict(const std::string& name) const noexcept {
  for (const auto& v : verdicts) {
    if (v.name == name) return &v;
  }
  return nullptr;
}

json ExperimentReport::to_json(bool include_timing) const {
  json out;
  out["id"] = id;
  out["kind"] = kind;
  out["version"] = version;
  out["parameters"] = parameters;
  out["series"] = series;
  out["fits"] = fits;
  json vs = json::array();
  for (const auto& v : verdicts) {
    vs.push_back({{"name", v.name},
                  {"status", verdict_status_name(v.status)},
                  {"value", v.value},
                  {"relation", v.relation},
                  {"target", v.target},
                  {"tolerance", v.tolerance},
                  {"note", v.note}});
  }
  out["verdicts"] = vs;
  out["pass"] = pass();
  if (error) out["error"] = *error;
  if (include_timing) out["timing"] = {{"timestamp", timestamp}, {"elapsed_seconds", elapsed_seconds}};
  return out;
}

std::string ExperimentReport::series_csv() const {
  std::vector<std::string> columns;
  std::size_t rows = 0;
  for (const auto& [name, values] : series.items()) {
    if (!values.is_array() || values.empty()) continue;
    if (!std::all_of(values.begin(), values.end(), [](const json& v) { return v.is_primitive(); })) continue;
    if (columns.empty()) rows = values.size();
    if (values.size() != rows) continue;
    columns.push_back(name);
  }
  if (columns.empty()) return {};
  std::ostringstream out;
  for (std::size_t c = 0; c < columns.size(); ++c) out << (c ? "," : "") << columns[c];
  out << "\n";
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t c = 0; c < columns.size(); ++c) {
      const json& v = series[columns[c]][r];
      out << (c ? "," : "") << (v.is_string() ? v.get<std::string>() : v.dump());
    }
    out << "\n";
  }
  return out.str();
}

namespace {

// ---------------------------------------------------------------------------
// Verdict helpers

Verdict within(const std::string& name, double value, double target, double tol) {
  Verdict v{name, std::abs(value - target) <= tol ? VerdictStatus::Pass : VerdictStatus::Fail, value,
            "|value - target| <= tolerance", target, tol, ""};
  if (!std::isfinite(value)) v.status = VerdictStatus::Fail;
  return v;
}

Verdict at_least(const std::string& name, double value, double threshold) {
  return {name, value >= threshold ? VerdictStatus::Pass : VerdictStatus::Fail, value, "value >= target",
          threshold, 0.0, ""};
}

Verdict at_most(const std::string& name, double value, double threshold) {
  return {name, value <= threshold ? VerdictStatus::Pass : VerdictStatus::Fail, value, "value <= target",
          threshold, 0.0, ""};
}

Verdict zero_count(const std::string& name, std::size_t count, std::string note = "") {
  return {name, count == 0 ? VerdictStatus::Pass : VerdictStatus::Fail, static_cast<double>(count),
          "value == target", 0.0, 0.0, std::move(note)};
}

Verdict skipped(const std::string& name, std::string note) {
  return {name, VerdictStatus::Skipped, 0.0, "not evaluated", 0.0, 0.0, std::move(note)};
}

json fit_json(const std::optional<LinearFit>& fit) {
  if (!fit) return nullptr;
  return {{"slope", fit->slope},
          {"intercept", fit->intercept},
          {"rms_residual", fit->rms_residual},
          {"points", fit->points}};
}

const std::vector<double> kDefaultDeltas{0.25, 0.05, 0.01};

// Checks the separated-subset contract on every census handed to it.
class SeparationTally {
 public:
  explicit SeparationTally(std::vector<double> deltas) : deltas_(std::move(deltas)) {}

  void check(const DirectionCensus& census) {
    ++censuses_;
    const std::size_t colors = std::size_t{1} << (census.dimension() - 1);
    for (double delta : deltas_) {
      const auto subset = separated_subset(census, delta);
      ++checks_;
      std::vector<std::vector<double>> units;
      units.reserve(subset.keys.size());
      for (const auto& key : subset.keys) units.push_back(key.unit());
      const double md = reference::min_pairwise_distance(units);
      if (units.size() >= 2) {
        worst_ratio_ = std::min(worst_ratio_, md / delta);
        if (md < delta) ++separation_failures_;
      }
      if (subset.keys.size() * colors < subset.occupied_cells) ++size_failures_;
    }
  }

  void report(ExperimentReport& r) const {
    r.parameters["separation_deltas"] = deltas_;
    r.series["separated_subset"] = {{"censuses", censuses_},
                                    {"checks", checks_},
                                    {"separation_failures", separation_failures_},
                                    {"size_failures", size_failures_},
                                    {"min_distance_over_delta", std::isfinite(worst_ratio_) ? json(worst_ratio_) : json(nullptr)}};
    r.verdicts.push_back(zero_count("separated_subset_contract", separation_failures_ + size_failures_,
                                    std::to_string(checks_) + " subsets over " + std::to_string(censuses_) +
                                        " censuses"));
  }

 private:
  std::vector<double> deltas_;
  std::size_t censuses_ = 0;
  std::size_t checks_ = 0;
  std::size_t separation_failures_ = 0;
  std::size_t size_failures_ = 0;
  double worst_ratio_ = INFINITY;
};

Rational random_rational(std::mt19937_64& rng, long max_den) {
  std::uniform_int_distribution<long> den(1, max_den);
  const long q = den(rng);
  std::uniform_int_distribution<long> num(0, q);
  return Rational(num(rng), q);
}

// n distinct points with coordinates drawn by `coord`.
template <class Gen>
PointSet random_exact_set(int d, std::size_t n, Gen&& coord) {
  std::set<std::vector<Rational>> seen;
  std::vector<Rational> flat;
  std::size_t attempts = 0;
  while (seen.size() < n) {
    if (++attempts > 1000 * n) fail(ErrorCode::Internal, "cannot draw enough distinct points");
    std::vector<Rational> p(static_cast<std::size_t>(d));
    for (auto& c : p) c = coord();
    if (seen.insert(p).second) flat.insert(flat.end(), p.begin(), p.end());
  }
  return PointSet::exact(d, std::move(flat));
}

std::vector<Rational> random_masses(std::mt19937_64& rng, std::size_t n, bool uniform) {
  std::vector<Rational> m(n);
  if (uniform) {
    for (auto& v : m) v = Rational(1, static_cast<unsigned long>(n));
    return m;
  }
  std::uniform_int_distribution<long> w(1, 9);
  Rational total = 0;
  for (auto& v : m) {
    v = w(rng);
    total += v;
  }
  for (auto& v : m) v /= total;
  return m;
}

// ---------------------------------------------------------------------------
// Recipes

void primitive_zeta(const ConfigSection& sec, ExperimentReport& r) {
  const long q2 = sec.get_int("q2", 100);
  const long q3 = sec.get_int("q3", 40);
  const double tol2 = sec.get_double("tol2", 0.02);
  const double tol3 = sec.get_double("tol3", 0.03);
  r.parameters = {{"q2", q2}, {"q3", q3}, {"tol2", tol2}, {"tol3", tol3}};
  auto zeta = [](int d) {
    // Partial sum plus the Euler-Maclaurin tail; error far below 1e-10.
    const long terms = 200000;
    long double sum = 0.0L;
    for (long k = terms; k >= 1; --k) sum += 1.0L / std::pow(static_cast<long double>(k), d);
    const long double K = terms;
    sum += 1.0L / ((d - 1) * std::pow(K, d - 1)) - 1.0L / (2.0L * std::pow(K, d));
    return static_cast<double>(sum);
  };
  json ds = json::array(), qs = json::array(), counts = json::array(), density = json::array(),
       inv = json::array(), ratio = json::array(), shifted = json::array();
  for (auto [q, d, tol] : {std::tuple{q2, 2, tol2}, std::tuple{q3, 3, tol3}}) {
    const std::uint64_t count = primitive_count(static_cast<int>(q), d);
    const double z = zeta(d);
    const double dens = static_cast<double>(count) / std::pow(static_cast<double>(q), d);
    const double rr = dens * z;
    const double rs = static_cast<double>(count) / std::pow(static_cast<double>(q + 1), d) * z;
    ds.push_back(d);
    qs.push_back(q);
    counts.push_back(count);
    density.push_back(dens);
    inv.push_back(1.0 / z);
    ratio.push_back(rr);
    shifted.push_back(rs);
    r.verdicts.push_back(within("primitive_density_d" + std::to_string(d), rr, 1.0, tol));
    r.verdicts.back().note = "count / q^d relative to 1/zeta(d); (q+1)^d normalization gives " + std::to_string(rs);
  }
  r.series = {{"d", ds}, {"q", qs}, {"count", counts}, {"density", density}, {"inverse_zeta", inv},
              {"ratio", ratio}, {"ratio_shifted", shifted}};
}

void pps_suite(const ConfigSection& sec, const RunOptions& opt, ExperimentReport& r) {
  const long sets = sec.get_int("sets", 200);
  const long n_min = sec.get_int("n_min", 5);
  const long n_max = sec.get_int("n_max", 40);
  const long max_den = sec.get_int("max_denominator", 6);
  const auto seed = static_cast<std::uint64_t>(sec.get_int("seed", static_cast<long>(opt.seed)));
  SeparationTally tally(sec.get_double_list("deltas", kDefaultDeltas));
  if (sets < 0 || n_min < 3 || n_max < n_min || max_den < 1) fail(ErrorCode::InvalidArgument, "bad PPS suite parameters");
  r.parameters = {{"sets", sets}, {"n_min", n_min}, {"n_max", n_max}, {"max_denominator", max_den}, {"seed", seed}};

  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<long> size(n_min, n_max);
  json ns = json::array(), counts = json::array(), thresholds = json::array(), statuses = json::array();
  std::size_t failures = 0, rejected = 0;
  for (long accepted = 0; accepted < sets;) {
    const auto n = static_cast<std::size_t>(size(rng));
    auto points = random_exact_set(3, n, [&] { return random_rational(rng, max_den); });
    if (collinearity_rank(points) < 3) {
      ++rejected;
      continue;
    }
    ++accepted;
    const auto report = pps_check(points);
    if (!report.pass()) ++failures;
    ns.push_back(report.n);
    counts.push_back(report.count);
    thresholds.push_back(report.threshold);
    statuses.push_back(pps_status_name(report.status));
    tally.check(distinct_directions(points, true));
  }
  r.series = {{"n", ns}, {"directions", counts}, {"threshold", thresholds}, {"status", statuses}};
  r.parameters["rejected_low_rank"] = rejected;
  r.verdicts.push_back(zero_count("pps_lower_bound", failures, "sets below 2n-5 (odd n) / 2n-7 (even n)"));
  tally.report(r);
}

void census_oracle(const ConfigSection& sec, const RunOptions& opt, ExperimentReport& r) {
  const long sets = sec.get_int("sets", 100);
  const long n_max = sec.get_int("n_max", 12);
  const auto seed = static_cast<std::uint64_t>(sec.get_int("seed", static_cast<long>(opt.seed)));
  SeparationTally tally(sec.get_double_list("deltas", kDefaultDeltas));
  if (n_max < 2) fail(ErrorCode::InvalidArgument, "n_max must be at least 2");
  r.parameters = {{"sets", sets}, {"n_max", n_max}, {"seed", seed}};
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<long> size(2, n_max);
  std::uniform_int_distribution<int> dim(2, 3);
  std::uniform_int_distribution<int> small(0, 3);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  json ns = json::array(), ds = json::array(), families = json::array(), sizes = json::array();
  json agree = json::array();
  std::size_t mismatches = 0;
  for (long t = 0; t < sets; ++t) {
    const auto n = static_cast<std::size_t>(size(rng));
    const int d = dim(rng);
    const int family = static_cast<int>(t % 4);
    PointSet points;
    if (family == 0) {
      // Small grid: many repeated directions.
      points = random_exact_set(d, n, [&] { return Rational(small(rng), 3); });
    } else if (family == 1) {
      points = random_exact_set(d, n, [&] { return random_rational(rng, 50); });
    } else {
      std::set<std::vector<double>> seen;
      std::vector<double> flat;
      while (seen.size() < n) {
        std::vector<double> p(static_cast<std::size_t>(d));
        for (auto& c : p) c = family == 2 ? small(rng) / 8.0 : unit(rng);
        if (seen.insert(p).second) flat.insert(flat.end(), p.begin(), p.end());
      }
      points = PointSet::floating(d, std::move(flat));
    }
    std::size_t count = 0;
    bool set_ok = true;
    for (bool antipodal : {true, false}) {
      const auto census = distinct_directions(points, antipodal);
      std::set<std::string> got;
      for (const auto& key : census.keys()) got.insert(reference::key_string(key));
      const bool ok = got == reference::directions(points, antipodal) && got.size() == census.size();
      if (!ok) ++mismatches;
      set_ok = set_ok && ok;
      if (antipodal) {
        count = census.size();
        tally.check(census);
      }
    }
    ns.push_back(n);
    ds.push_back(d);
    families.push_back(std::array{"grid", "rational", "dyadic_float", "random_float"}[family]);
    sizes.push_back(count);
    agree.push_back(set_ok);
  }
  r.series = {{"n", ns}, {"d", ds}, {"family", families}, {"directions", sizes}, {"matches_oracle", agree}};
  r.verdicts.push_back(zero_count("census_matches_oracle", mismatches, "antipodal and signed censuses"));
  tally.report(r);
}

void hyperplane_coverage(const ConfigSection& sec, const RunOptions& opt, ExperimentReport& r) {
  const int d = static_cast<int>(sec.get_int("d", 3));
  const auto n = static_cast<std::size_t>(sec.get_int("n", 10000));
  const auto eps = sec.get_double_list("epsilons", {0.2, 0.1, 0.05, 0.025});
  const double target = sec.get_double("target", 1.0);
  const double tol = sec.get_double("tolerance", 0.3);
  const bool antipodal = sec.get_bool("antipodal", true);
  SeparationTally tally(sec.get_double_list("deltas", kDefaultDeltas));
  r.parameters = {{"d", d}, {"n", n}, {"epsilons", eps}, {"target", target}, {"tolerance", tol}, {"antipodal", antipodal}};
  const auto points = hyperplane_sample(d, n);
  r.parameters["points"] = points.size();
  const auto grids = sphere_coverage(points, eps, antipodal, opt.threads);
  json occ = json::array(), total = json::array(), frac = json::array(), inv = json::array();
  std::vector<double> xs, ys;
  for (const auto& g : grids) {
    occ.push_back(g.occupied_cells());
    total.push_back(g.total_cells());
    frac.push_back(g.fraction());
    inv.push_back(1.0 / g.epsilon());
    xs.push_back(1.0 / g.epsilon());
    ys.push_back(static_cast<double>(g.occupied_cells()));
  }
  r.series = {{"epsilon", eps}, {"inverse_epsilon", inv}, {"occupied", occ}, {"total_cells", total}, {"fraction", frac}};
  const auto fit = fit_loglog(xs, ys);
  r.fits["occupied_vs_inverse_epsilon"] = fit_json(fit);
  if (fit) {
    r.verdicts.push_back(within("hyperplane_coverage_slope", fit->slope, target, tol));
  } else {
    r.verdicts.push_back({"hyperplane_coverage_slope", VerdictStatus::Fail, 0.0, "fit needs >= 3 points", target, tol, ""});
  }
  tally.check(distinct_directions(points, antipodal));
  tally.report(r);
}

void grid_coverage(const ConfigSection& sec, const RunOptions& opt, ExperimentReport& r) {
  const int d = static_cast<int>(sec.get_int("d", 2));
  const long side = sec.get_int("side", 100);
  const auto eps = sec.get_double_list("epsilons", {0.05, 0.02});
  const auto thresholds = sec.get_double_list("thresholds", {0.5, 0.3});
  const bool antipodal = sec.get_bool("antipodal", true);
  SeparationTally tally(sec.get_double_list("deltas", kDefaultDeltas));
  if (eps.size() != thresholds.size()) fail(ErrorCode::InvalidArgument, "one threshold per epsilon is required");
  if (side < 2) fail(ErrorCode::InvalidArgument, "side must be at least 2");
  r.parameters = {{"d", d}, {"side", side}, {"epsilons", eps}, {"thresholds", thresholds}, {"antipodal", antipodal}};
  const auto points = lattice_set(LatticeSpec{static_cast<int>(side - 1), d, static_cast<double>(d)});
  const auto grids = sphere_coverage(points, eps, antipodal, opt.threads);
  json occ = json::array(), total = json::array(), frac = json::array();
  for (std::size_t i = 0; i < grids.size(); ++i) {
    occ.push_back(grids[i].occupied_cells());
    total.push_back(grids[i].total_cells());
    frac.push_back(grids[i].fraction());
    std::ostringstream name;
    name << "coverage_at_eps_" << eps[i];
    r.verdicts.push_back(at_least(name.str(), grids[i].fraction(), thresholds[i]));
  }
  r.series = {{"epsilon", eps}, {"occupied", occ}, {"total_cells", total}, {"fraction", frac}};
  tally.check(distinct_directions(points, antipodal));
  tally.report(r);
}

ExperimentReport scaling_lattice(int d, double s, const std::vector<long>& q_list, double tol, bool antipodal,
                                 const std::string& observable, SeparationTally* tally) {
  ExperimentReport r;
  if (q_list.empty()) fail(ErrorCode::InvalidArgument, "q_list is empty");
  if (!std::is_sorted(q_list.begin(), q_list.end()) ||
      std::adjacent_find(q_list.begin(), q_list.end()) != q_list.end()) {
    fail(ErrorCode::InvalidArgument, "q_list must be increasing");
  }
  if (!(s > 0.0 && s <= d)) fail(ErrorCode::InvalidArgument, "s must lie in (0, d]");
  if (observable != "fraction" && observable != "count" && observable != "union_bound") {
    fail(ErrorCode::InvalidArgument, "observable must be fraction, count or union_bound");
  }
  const double predicted = d - static_cast<double>(d) * (d - 1) / s;
  r.parameters = {{"d", d}, {"s", s}, {"q_list", q_list}, {"tolerance", tol}, {"antipodal", antipodal},
                  {"observable", observable}, {"predicted_exponent", predicted}};
  json eps = json::array(), occ = json::array(), total = json::array(), frac = json::array(),
       dirs = json::array(), unions = json::array();
  std::vector<double> qs, counts, fractions, union_bounds;
  for (long q : q_list) {
    LatticeSpec spec{static_cast<int>(q), d, s};
    spec.validate();
    const double e = spec.radius();
    const auto points = lattice_set(spec);
    const auto grid = sphere_coverage(points, e, antipodal);
    const auto census = distinct_directions(points, antipodal);
    if (tally) tally->check(census);
    const double ub = static_cast<double>(census.size()) * std::pow(e, d - 1);
    eps.push_back(e);
    occ.push_back(grid.occupied_cells());
    total.push_back(grid.total_cells());
    frac.push_back(grid.fraction());
    dirs.push_back(census.size());
    unions.push_back(ub);
    qs.push_back(static_cast<double>(q));
    counts.push_back(static_cast<double>(grid.occupied_cells()));
    fractions.push_back(grid.fraction());
    union_bounds.push_back(ub);
  }
  r.series = {{"q", q_list}, {"epsilon", eps}, {"occupied", occ}, {"total_cells", total},
              {"fraction", frac}, {"directions", dirs}, {"union_bound", unions}};
  const auto fit_fraction = fit_loglog(qs, fractions);
  const auto fit_count = fit_loglog(qs, counts);
  const auto fit_union = fit_loglog(qs, union_bounds);
  r.fits["fraction_vs_q"] = fit_json(fit_fraction);
  r.fits["occupied_vs_q"] = fit_json(fit_count);
  r.fits["union_bound_vs_q"] = fit_json(fit_union);
  const auto& chosen = observable == "fraction" ? fit_fraction : observable == "count" ? fit_count : fit_union;
  if (chosen) {
    r.verdicts.push_back(within("lattice_scaling_exponent", chosen->slope, predicted, tol));
    r.verdicts.back().note = "log(" + observable + ") against log(q)";
  } else {
    r.verdicts.push_back(skipped("lattice_scaling_exponent", "fewer than 3 usable points; exponent omitted"));
  }
  return r;
}

ExperimentReport garnett_decay(const std::vector<long>& depths, double eps_base, bool antipodal, SeparationTally* tally) {
  ExperimentReport r;
  if (depths.empty()) fail(ErrorCode::InvalidArgument, "depth list is empty");
  if (!std::is_sorted(depths.begin(), depths.end()) ||
      std::adjacent_find(depths.begin(), depths.end()) != depths.end() || depths.front() < 1) {
    fail(ErrorCode::InvalidArgument, "depths must be positive and increasing");
  }
  if (!(eps_base > 1.0)) fail(ErrorCode::InvalidArgument, "eps_base must exceed 1");
  r.parameters = {{"depths", depths}, {"eps_base", eps_base}, {"antipodal", antipodal}};
  const auto system = IfsSystem::garnett();
  json eps = json::array(), ns = json::array(), occ = json::array(), total = json::array(), frac = json::array(),
       dirs = json::array(), control = json::array();
  std::vector<double> fractions, control_fractions;
  for (long k : depths) {
    const auto points = ifs_approximant(system, static_cast<int>(k));
    const double e = std::pow(eps_base, -static_cast<double>(k));
    const auto grid = sphere_coverage(points, e, antipodal);
    const auto census = distinct_directions(points, antipodal);
    if (tally) tally->check(census);
    const auto line = hyperplane_sample(2, points.size());
    const auto control_grid = sphere_coverage(line, e, antipodal);
    eps.push_back(e);
    ns.push_back(points.size());
    occ.push_back(grid.occupied_cells());
    total.push_back(grid.total_cells());
    frac.push_back(grid.fraction());
    dirs.push_back(census.size());
    control.push_back(control_grid.fraction());
    fractions.push_back(grid.fraction());
    control_fractions.push_back(control_grid.fraction());
  }
  r.series = {{"depth", depths}, {"epsilon", eps}, {"points", ns}, {"occupied", occ}, {"total_cells", total},
              {"fraction", frac}, {"directions", dirs}, {"control_line_fraction", control}};
  std::size_t violations = 0;
  for (std::size_t i = 1; i < fractions.size(); ++i) {
    if (!(fractions[i] < fractions[i - 1])) ++violations;
  }
  r.verdicts.push_back(zero_count("garnett_strictly_decreasing", violations, "non-decreasing steps in the fraction series"));
  std::vector<double> ks(depths.begin(), depths.end());
  std::vector<double> logs;
  for (double f : fractions) logs.push_back(std::log(f));
  r.fits["log_fraction_vs_depth"] = fit_json(fit_line(ks, logs));
  return r;
}

void nu_bounds(const ConfigSection& sec, const RunOptions& opt, ExperimentReport& r) {
  const int d = static_cast<int>(sec.get_int("d", 2));
  CantorPreset preset;
  if (sec.has("copies") || sec.has("base")) {
    preset.copies = static_cast<int>(sec.get_int("copies", 3));
    preset.base = static_cast<int>(sec.get_int("base", 4));
  } else {
    preset = cantor_preset_for(d, sec.get_double("s", 2.0 * std::log(3.0) / std::log(4.0)));
  }
  const int depth = static_cast<int>(sec.get_int("depth", 6));
  const auto exps = sec.get_int_list("eps_exponents", {3, 4, 5, 6, 7});
  const double k_max = sec.get_double("k_max", 10.0);
  const double exp_tol = sec.get_double("exponent_tolerance", 0.5);
  const double gate = sec.get_double("residual_gate", 0.5);
  const int max_depth = static_cast<int>(sec.get_int("max_depth", 8));
  std::optional<double> c;
  if (sec.has("c")) c = sec.get_double("c", 0.0);
  const double s = preset.dimension(d);
  std::vector<double> eps;
  for (long e : exps) eps.push_back(std::ldexp(1.0, -static_cast<int>(e)));
  r.parameters = {{"d", d}, {"copies", preset.copies}, {"base", preset.base}, {"s", s}, {"depth", depth},
                  {"eps_exponents", exps}, {"k_max", k_max}, {"exponent_tolerance", exp_tol},
                  {"residual_gate", gate}, {"max_depth", max_depth},
                  {"c", c ? *c : default_split_threshold(d)}};
  const auto points = product_cantor(d, preset, depth);
  const auto mu = WeightedPointSet::uniform(points);
  const auto rep = nu_integral_bounds(mu, s, eps, c, max_depth, opt.threads);
  r.parameters["atoms"] = points.size();
  r.parameters["split"] = {{"level", rep.split.level},
                           {"sep_coordinate", rep.split.sep_coordinate},
                           {"sep_distance", rep.split.sep_distance},
                           {"mass1", rep.split.mass1},
                           {"mass2", rep.split.mass2},
                           {"parent_mass", rep.split.parent_mass},
                           {"atoms1", rep.split.e1.size()},
                           {"atoms2", rep.split.e2.size()},
                           {"axis_order", rep.axis_order},
                           {"signs", rep.signs},
                           {"chart_mass", rep.chart_mass}};
  r.series = {{"epsilon", rep.epsilons}, {"pitch", rep.pitches}, {"integral", rep.integrals},
              {"normalized", rep.normalized}, {"overlap_normalized", rep.overlap_normalized}};
  r.fits["limit"] = rep.limit;
  r.fits["predicted_exponent"] = rep.predicted_exponent;
  r.fits["deviation_vs_epsilon"] = fit_json(rep.deviation_fit);
  r.fits["band_constant"] = rep.band_constant ? json(*rep.band_constant) : json(nullptr);
  if (rep.band_constant) {
    r.verdicts.push_back(at_most("nu_band_constant", *rep.band_constant, k_max));
  } else {
    r.verdicts.push_back(skipped("nu_band_constant", "needs at least two epsilons"));
  }
  if (rep.deviation_fit && rep.deviation_fit->rms_residual <= gate) {
    r.verdicts.push_back(within("nu_deviation_exponent", rep.deviation_fit->slope, rep.predicted_exponent, exp_tol));
  } else if (rep.deviation_fit) {
    auto v = skipped("nu_deviation_exponent", "fit residual above the gate");
    v.value = rep.deviation_fit->slope;
    r.verdicts.push_back(v);
  } else {
    r.verdicts.push_back(skipped("nu_deviation_exponent", "fewer than 3 nonzero deviations"));
  }
}

// Exact recomputation of the split postconditions from the input measure.
std::size_t split_violations(const WeightedPointSet& mu, const CubeSplit& split) {
  std::size_t bad = 0;
  const auto d = static_cast<std::size_t>(mu.dimension());
  const BigInt cells = BigInt(1) << (2 * split.level);
  auto index_at = [&](std::size_t atom, int level, std::size_t k) {
    const BigInt side = BigInt(1) << (2 * level);
    const Rational& x = mu.base().exact_row(atom)[k];
    BigInt q;
    Rational scaled = x * Rational(side);
    mpz_fdiv_q(q.get_mpz_t(), scaled.get_num_mpz_t(), scaled.get_den_mpz_t());
    if (q >= side) q = side - 1;
    return q;
  };
  auto in_cube = [&](std::size_t atom, const std::vector<std::int64_t>& corner, int level) {
    for (std::size_t k = 0; k < d; ++k) {
      if (index_at(atom, level, k) != BigInt(static_cast<long>(corner[k]))) return false;
    }
    return true;
  };
  (void)cells;
  std::vector<std::int64_t> parent(d);
  for (std::size_t k = 0; k < d; ++k) {
    parent[k] = split.cube1[k] / 4;
    if (split.cube2[k] / 4 != parent[k]) ++bad;
  }
  Rational m1 = 0, m2 = 0, mq = 0;
  std::vector<std::size_t> e1, e2;
  for (std::size_t i = 0; i < mu.size(); ++i) {
    if (in_cube(i, split.cube1, split.level)) {
      e1.push_back(i);
      m1 += mu.exact_masses()[i];
    }
    if (in_cube(i, split.cube2, split.level)) {
      e2.push_back(i);
      m2 += mu.exact_masses()[i];
    }
    if (in_cube(i, parent, split.level - 1)) mq += mu.exact_masses()[i];
  }
  if (e1 != split.e1_atoms || e2 != split.e2_atoms) ++bad;
  if (!split.exact_mass1 || *split.exact_mass1 != m1 || !split.exact_mass2 || *split.exact_mass2 != m2) ++bad;
  if (!split.exact_parent_mass || *split.exact_parent_mass != mq) ++bad;
  const Rational threshold = Rational(split.threshold) * mq;
  if (m1 < threshold || m2 < threshold || sgn(m1) <= 0 || sgn(m2) <= 0) ++bad;
  const Rational sep(1, BigInt(1) << (2 * split.level));
  if (Rational(split.sep_distance) != sep) ++bad;
  const auto k = static_cast<std::size_t>(split.sep_coordinate);
  Rational lo1, hi1, lo2, hi2;
  bool first = true;
  for (auto i : e1) {
    const Rational& x = mu.base().exact_row(i)[k];
    if (first || x < lo1) lo1 = x;
    if (first || x > hi1) hi1 = x;
    first = false;
  }
  first = true;
  for (auto i : e2) {
    const Rational& x = mu.base().exact_row(i)[k];
    if (first || x < lo2) lo2 = x;
    if (first || x > hi2) hi2 = x;
    first = false;
  }
  if (!e1.empty() && !e2.empty()) {
    const Rational gap = hi1 < lo2 ? lo2 - hi1 : lo1 - hi2;
    if (gap < sep) ++bad;
  } else {
    ++bad;
  }
  return bad;
}

void split_contract(const ConfigSection& sec, const RunOptions& opt, ExperimentReport& r) {
  const long measures = sec.get_int("measures", 50);
  const int max_depth = static_cast<int>(sec.get_int("max_depth", 8));
  const long max_atoms = sec.get_int("max_atoms", 20000);
  const auto seed = static_cast<std::uint64_t>(sec.get_int("seed", static_cast<long>(opt.seed)));
  std::optional<double> c;
  if (sec.has("c")) c = sec.get_double("c", 0.0);
  r.parameters = {{"measures", measures}, {"max_depth", max_depth}, {"max_atoms", max_atoms}, {"seed", seed}};
  std::mt19937_64 rng(seed);
  json families = json::array(), ds = json::array(), ss = json::array(), atoms = json::array(),
       levels = json::array(), weights = json::array(), outcome = json::array();
  std::size_t failures = 0, violations = 0;
  for (long t = 0; t < measures; ++t) {
    const int d = 2 + static_cast<int>(rng() % 2);
    const bool cantor = t % 2 == 0;
    PointSet points;
    double s = d;
    if (cantor) {
      std::vector<CantorPreset> presets;
      for (int base = 2; base <= 6; ++base) {
        for (int copies = 2; copies <= base; ++copies) {
          CantorPreset p{copies, base};
          if (p.dimension(d) > d - 1) presets.push_back(p);
        }
      }
      const auto preset = presets[rng() % presets.size()];
      int depth = 1;
      while (std::pow(static_cast<double>(preset.copies), d * (depth + 1)) <= static_cast<double>(max_atoms) && depth < 6) {
        ++depth;
      }
      points = product_cantor(d, preset, depth);
      s = preset.dimension(d);
      families.push_back("product_cantor " + std::to_string(preset.copies) + "/" + std::to_string(preset.base) +
                         " depth " + std::to_string(depth));
    } else {
      const int q = 2 + static_cast<int>(rng() % (d == 2 ? 15 : 7));
      points = lattice_set(LatticeSpec{q, d, static_cast<double>(d)});
      families.push_back("lattice q=" + std::to_string(q));
    }
    const bool uniform = rng() % 2 == 0;
    WeightedPointSet mu(points, random_masses(rng, points.size(), uniform));
    ds.push_back(d);
    ss.push_back(s);
    atoms.push_back(points.size());
    weights.push_back(uniform ? "uniform" : "random");
    try {
      const auto split = stopping_time_split(mu, c, max_depth);
      const auto bad = split_violations(mu, split);
      violations += bad;
      levels.push_back(split.level);
      outcome.push_back(bad == 0 ? "ok" : "violation");
    } catch (const Error& e) {
      ++failures;
      levels.push_back(nullptr);
      outcome.push_back(error_code_name(e.code()));
    }
  }
  r.series = {{"family", families}, {"d", ds}, {"s", ss}, {"atoms", atoms}, {"masses", weights},
              {"level", levels}, {"outcome", outcome}};
  r.verdicts.push_back(zero_count("split_found", failures, "measures without a split by max_depth"));
  r.verdicts.push_back(zero_count("split_postconditions", violations, "exact mass and separation checks"));
}

void energy_contract(const ConfigSection& sec, const RunOptions& opt, ExperimentReport& r) {
  const long supports = sec.get_int("supports", 24);
  const long max_atoms = sec.get_int("max_atoms", 300);
  const long exact_supports = sec.get_int("exact_supports", 8);
  const long exact_atoms = sec.get_int("exact_atoms", 120);
  const auto exps = sec.get_double_list("exponents", {0.5, 1.0, 1.5, 2.0, 2.5, 3.0});
  const auto lambdas = sec.get_rational_list("lambdas", {Rational(1, 2), Rational(1, 3), Rational(2)});
  const auto exact_exps = sec.get_int_list("exact_exponents", {2, 4});
  const double tol = sec.get_double("tolerance", 1e-12);
  const double float_tol = sec.get_double("float_tolerance", 1e-9);
  const auto seed = static_cast<std::uint64_t>(sec.get_int("seed", static_cast<long>(opt.seed)));
  if (max_atoms < 2) fail(ErrorCode::InvalidArgument, "max_atoms must be at least 2");
  json lam = json::array();
  for (const auto& l : lambdas) lam.push_back(l.get_str());
  r.parameters = {{"supports", supports}, {"max_atoms", max_atoms}, {"exact_supports", exact_supports},
                  {"exact_atoms", exact_atoms}, {"exponents", exps}, {"lambdas", lam},
                  {"exact_exponents", exact_exps}, {"tolerance", tol}, {"float_tolerance", float_tol},
                  {"seed", seed}};
  std::mt19937_64 rng(seed);
  json ns = json::array(), ds = json::array(), oracle_err = json::array(), scale_err = json::array();
  double worst_oracle = 0.0, worst_scale = 0.0;
  std::size_t exact_mismatches = 0, exact_checks = 0;
  for (long t = 0; t < supports; ++t) {
    const int d = 2 + static_cast<int>(rng() % 2);
    const long cap = t < exact_supports ? std::min(exact_atoms, max_atoms) : max_atoms;
    const auto n = static_cast<std::size_t>(t == supports - 1 ? cap : 2 + static_cast<long>(rng() % static_cast<std::uint64_t>(cap - 1)));
    auto points = random_exact_set(d, n, [&] { return random_rational(rng, 64); });
    WeightedPointSet mu(points, random_masses(rng, n, t % 3 == 0));
    double err = 0.0, serr = 0.0;
    for (double s : exps) {
      const double fast = energy_integral(mu, s, opt.threads);
      const double slow = reference::energy(mu, s);
      err = std::max(err, std::abs(fast - slow) / std::abs(slow));
      for (const auto& l : lambdas) {
        WeightedPointSet scaled(points.transformed(l, std::vector<Rational>(static_cast<std::size_t>(d), 0)),
                                mu.exact_masses());
        const double lhs = energy_integral(scaled, s, opt.threads);
        const double rhs = std::pow(l.get_d(), -s) * fast;
        serr = std::max(serr, std::abs(lhs - rhs) / std::abs(rhs));
      }
    }
    if (t < exact_supports) {
      for (long s : exact_exps) {
        const Rational base = energy_integral_exact(mu, static_cast<int>(s));
        for (const auto& l : lambdas) {
          WeightedPointSet scaled(points.transformed(l, std::vector<Rational>(static_cast<std::size_t>(d), 0)),
                                  mu.exact_masses());
          Rational factor = 1;
          for (long e = 0; e < s; ++e) factor /= l;
          ++exact_checks;
          if (energy_integral_exact(scaled, static_cast<int>(s)) != factor * base) ++exact_mismatches;
        }
      }
    }
    worst_oracle = std::max(worst_oracle, err);
    worst_scale = std::max(worst_scale, serr);
    ns.push_back(n);
    ds.push_back(d);
    oracle_err.push_back(err);
    scale_err.push_back(serr);
  }
  r.series = {{"n", ns}, {"d", ds}, {"oracle_relative_error", oracle_err}, {"scaling_relative_error", scale_err}};
  r.parameters["exact_scaling_checks"] = exact_checks;
  r.verdicts.push_back(at_most("energy_matches_oracle", worst_oracle, tol));
  r.verdicts.push_back(zero_count("energy_exact_scaling", exact_mismatches,
                                  std::to_string(exact_checks) + " rational identities E(lP) = l^-s E(P)"));
  r.verdicts.push_back(at_most("energy_float_scaling", worst_scale, float_tol));
}

ExperimentReport adaptable_directions(const std::string& source, int d, double s, long size,
                                      std::optional<double> constant, double ratio_threshold, unsigned threads) {
  ExperimentReport r;
  PointSet points;
  if (source == "product_cantor") {
    points = product_cantor(d, s, static_cast<int>(size));
  } else if (source == "hyperplane") {
    points = hyperplane_sample(d, static_cast<std::size_t>(size));
  } else if (source == "lattice") {
    points = lattice_set(LatticeSpec{static_cast<int>(size), d, s});
  } else if (source == "graph") {
    points = lipschitz_graph_sample(d, static_cast<std::size_t>(size));
  } else {
    fail(ErrorCode::InvalidArgument, "unknown source '" + source + "'");
  }
  const std::size_t n = points.size();
  const int rank = collinearity_rank(points);
  const bool full_rank = rank == d;
  std::optional<double> c = constant;
  if (!c && s > d - 1) c = default_adaptability_constant(d, s);
  r.parameters = {{"source", source}, {"d", d}, {"s", s}, {"size", size}, {"points", n}, {"rank", rank},
                  {"ratio_threshold", ratio_threshold}};
  if (n < 2) fail(ErrorCode::PreconditionFailed, "need at least two points");
  const auto adapt = is_adaptable(points, s, c.value_or(INFINITY), threads);
  const auto census = distinct_directions(points, true);
  const double delta = std::min(1.0, std::pow(static_cast<double>(n), -(d - 1) / s));
  const auto subset = separated_subset(census, delta);
  std::vector<std::vector<double>> units;
  for (const auto& key : subset.keys) units.push_back(key.unit());
  const double md = reference::min_pairwise_distance(units);
  const double ratio = static_cast<double>(census.size()) / static_cast<double>(n);
  const std::size_t colors = std::size_t{1} << (d - 1);
  r.series = {{"energy", adapt.energy},
              {"constant", c ? json(*c) : json(nullptr)},
              {"radius", adapt.radius},
              {"min_distance", adapt.min_distance},
              {"separated", adapt.separated},
              {"adaptable", adapt.pass},
              {"directions", census.size()},
              {"count_over_n", ratio},
              {"delta", delta},
              {"occupied_cells", subset.occupied_cells},
              {"subset_size", subset.keys.size()},
              {"subset_min_distance", std::isfinite(md) ? json(md) : json(nullptr)},
              {"subset_over_half_directions", 2.0 * static_cast<double>(subset.keys.size()) /
                                                  static_cast<double>(census.size())}};
  if (full_rank) {
    r.verdicts.push_back(at_least("direction_count_ratio", ratio, ratio_threshold));
    if (c) {
      Verdict v{"adaptable", adapt.pass ? VerdictStatus::Pass : VerdictStatus::Fail, adapt.energy,
                "separated and energy <= target", *c, 0.0,
                adapt.separated ? "" : "not n^{-1/s}-separated"};
      r.verdicts.push_back(v);
    } else {
      r.verdicts.push_back(skipped("adaptable", "no default constant for s <= d-1"));
    }
  } else {
    r.verdicts.push_back(skipped("direction_count_ratio", "control: support is not full-dimensional"));
    r.verdicts.push_back(skipped("adaptable", "control: support is not full-dimensional"));
  }
  r.verdicts.push_back(at_least("separated_subset_size", static_cast<double>(subset.keys.size() * colors),
                                static_cast<double>(subset.occupied_cells)));
  r.verdicts.back().note = "size * 2^(d-1) against occupied cells";
  r.verdicts.push_back(at_least("separated_subset_pairwise", units.size() < 2 ? delta : md, delta));
  return r;
}

// ---------------------------------------------------------------------------
// Dispatch

struct Kind {
  std::vector<std::string> keys;
  std::function<void(const ConfigSection&, const RunOptions&, ExperimentReport&)> run;
};

const std::map<std::string, Kind>& kinds() {
  static const std::map<std::string, Kind> table = {
      {"primitive_zeta",
       {{"q2", "q3", "tol2", "tol3"},
        [](const ConfigSection& s, const RunOptions&, ExperimentReport& r) { primitive_zeta(s, r); }}},
      {"pps_suite", {{"sets", "n_min", "n_max", "max_denominator", "seed", "deltas"}, pps_suite}},
      {"census_oracle", {{"sets", "n_max", "seed", "deltas"}, census_oracle}},
      {"hyperplane_coverage",
       {{"d", "n", "epsilons", "target", "tolerance", "antipodal", "deltas"}, hyperplane_coverage}},
      {"grid_coverage", {{"d", "side", "epsilons", "thresholds", "antipodal", "deltas"}, grid_coverage}},
      {"lattice_scaling",
       {{"d", "s", "q_list", "tolerance", "antipodal", "observable", "deltas"},
        [](const ConfigSection& s, const RunOptions&, ExperimentReport& r) {
          SeparationTally tally(s.get_double_list("deltas", kDefaultDeltas));
          r = scaling_lattice(static_cast<int>(s.get_int("d", 2)), s.get_double("s", 0.8),
                              s.get_int_list("q_list", {8, 16, 32, 64}), s.get_double("tolerance", 0.4),
                              s.get_bool("antipodal", true), s.get_string("observable", "count"), &tally);
          tally.report(r);
        }}},
      {"garnett_decay",
       {{"depths", "eps_base", "antipodal", "deltas"},
        [](const ConfigSection& s, const RunOptions&, ExperimentReport& r) {
          SeparationTally tally(s.get_double_list("deltas", kDefaultDeltas));
          r = garnett_decay(s.get_int_list("depths", {2, 3, 4, 5}), s.get_double("eps_base", 4.0),
                            s.get_bool("antipodal", true), &tally);
          tally.report(r);
        }}},
      {"nu_bounds",
       {{"d", "s", "copies", "base", "depth", "eps_exponents", "k_max", "exponent_tolerance", "residual_gate",
         "max_depth", "c"},
        nu_bounds}},
      {"split_contract", {{"measures", "max_depth", "max_atoms", "seed", "c"}, split_contract}},
      {"energy_contract",
       {{"supports", "max_atoms", "exact_supports", "exact_atoms", "exponents", "lambdas", "exact_exponents",
         "tolerance", "float_tolerance", "seed"},
        energy_contract}},
      {"adaptable_directions",
       {{"source", "d", "s", "size", "constant", "ratio_threshold"},
        [](const ConfigSection& s, const RunOptions& o, ExperimentReport& r) {
          std::optional<double> c;
          if (s.has("constant")) c = s.get_double("constant", 0.0);
          r = adaptable_directions(s.get_string("source", "product_cantor"), static_cast<int>(s.get_int("d", 2)),
                                   s.get_double("s", 2.0 * std::log(3.0) / std::log(4.0)), s.get_int("size", 4), c,
                                   s.get_double("ratio_threshold", 0.5), o.threads);
        }}},
  };
  return table;
}

std::string utc_timestamp() {
  const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

void finish(ExperimentReport& r, const std::string& id, const std::string& kind,
            std::chrono::steady_clock::time_point start) {
  r.id = id;
  r.kind = kind;
  r.version = DIRLAB_VERSION_STRING;
  r.timestamp = utc_timestamp();
  r.elapsed_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

}  // namespace

ExperimentReport run_scaling_lattice(int d, double s, const std::vector<long>& q_list, double tolerance,
                                     bool antipodal) {
  const auto start = std::chrono::steady_clock::now();
  auto r = scaling_lattice(d, s, q_list, tolerance, antipodal, "count", nullptr);
  finish(r, "scaling_lattice", "lattice_scaling", start);
  return r;
}

ExperimentReport run_garnett_decay(const std::vector<long>& depth_list, double eps_base, bool antipodal) {
  const auto start = std::chrono::steady_clock::now();
  auto r = garnett_decay(depth_list, eps_base, antipodal, nullptr);
  finish(r, "garnett_decay", "garnett_decay", start);
  return r;
}

ExperimentReport run_adaptable_directions(const std::string& source, int d, double s, long size,
                                          std::optional<double> constant, unsigned threads) {
  const auto start = std::chrono::steady_clock::now();
  auto r = adaptable_directions(source, d, s, size, constant, 0.5, threads);
  finish(r, "adaptable_directions", "adaptable_directions", start);
  return r;
}

std::vector<std::string> experiment_kinds() {
  std::vector<std::string> out;
  for (const auto& [name, kind] : kinds()) out.push_back(name);
  return out;
}

void validate_section(const ConfigSection& section) {
  const std::string kind = section.require_string("kind");
  auto it = kinds().find(kind);
  if (it == kinds().end()) {
    const auto& e = section.entries().at("kind");
    fail(ErrorCode::Parse, "line " + std::to_string(e.line) + ": key 'kind' in [" + section.name() +
                               "]: unknown experiment kind '" + kind + "'");
  }
  auto allowed = it->second.keys;
  allowed.push_back("kind");
  section.check_keys(allowed);
  // Type-check every present value up front so a bad value is a parse error, not a run failure.
  static const std::map<std::string, char> types = {
      {"antipodal", 'b'},    {"c", 'f'},          {"constant", 'f'},      {"eps_base", 'f'},
      {"exponent_tolerance", 'f'}, {"float_tolerance", 'f'}, {"k_max", 'f'}, {"ratio_threshold", 'f'},
      {"residual_gate", 'f'}, {"s", 'f'},         {"target", 'f'},        {"tol2", 'f'},
      {"tol3", 'f'},         {"tolerance", 'f'},  {"deltas", 'F'},        {"epsilons", 'F'},
      {"exponents", 'F'},    {"thresholds", 'F'}, {"base", 'i'},          {"copies", 'i'},
      {"d", 'i'},            {"depth", 'i'},      {"exact_atoms", 'i'},   {"exact_supports", 'i'},
      {"max_atoms", 'i'},    {"max_denominator", 'i'}, {"max_depth", 'i'}, {"measures", 'i'},
      {"n", 'i'},            {"n_max", 'i'},      {"n_min", 'i'},         {"q2", 'i'},
      {"q3", 'i'},           {"seed", 'i'},       {"sets", 'i'},          {"side", 'i'},
      {"size", 'i'},         {"supports", 'i'},   {"depths", 'I'},        {"eps_exponents", 'I'},
      {"exact_exponents", 'I'}, {"q_list", 'I'},  {"lambdas", 'R'}};
  for (const auto& [key, entry] : section.entries()) {
    auto t = types.find(key);
    if (t == types.end()) continue;
    switch (t->second) {
      case 'b': section.get_bool(key, false); break;
      case 'f': section.get_double(key, 0.0); break;
      case 'F': section.get_double_list(key, {}); break;
      case 'i': section.get_int(key, 0); break;
      case 'I': section.get_int_list(key, {}); break;
      case 'R': section.get_rational_list(key, {}); break;
    }
  }
}

ExperimentReport run_experiment(const ConfigSection& section, const RunOptions& options) {
  const auto start = std::chrono::steady_clock::now();
  ExperimentReport r;
  const std::string kind = section.get_string("kind", "");
  try {
    validate_section(section);
    kinds().at(kind).run(section, options, r);
  } catch (const std::exception& e) {
    r.error = e.what();
  }
  finish(r, section.name(), kind, start);
  return r;
}

SuiteResult run_suite(const Config& config, const RunOptions& options, const std::optional<std::string>& out_dir) {
  for (const auto& section : config.sections) validate_section(section);
  config.globals.check_keys({"seed", "threads"});
  RunOptions effective = options;
  if (config.globals.has("seed")) effective.seed = static_cast<std::uint64_t>(config.globals.get_int("seed", 0));
  if (config.globals.has("threads")) effective.threads = static_cast<unsigned>(config.globals.get_int("threads", 1));

  SuiteResult result;
  std::ostringstream summary;
  summary << "id,kind,verdict,status,value,target,tolerance\n";
  for (const auto& section : config.sections) {
    auto report = run_experiment(section, effective);
    if (!report.pass()) result.all_pass = false;
    if (report.error) {
      summary << report.id << "," << report.kind << ",error,fail,,,\n";
    }
    for (const auto& v : report.verdicts) {
      summary << report.id << "," << report.kind << "," << v.name << "," << verdict_status_name(v.status) << ","
              << json(v.value).dump() << "," << json(v.target).dump() << "," << json(v.tolerance).dump() << "\n";
    }
    if (out_dir) {
      std::filesystem::create_directories(*out_dir);
      const std::filesystem::path dir(*out_dir);
      std::ofstream(dir / (report.id + ".json")) << report.to_json().dump(2) << "\n";
      const auto csv = report.series_csv();
      if (!csv.empty()) std::ofstream(dir / (report.id + ".csv")) << csv;
    }
    result.reports.push_back(std::move(report));
  }
  result.summary_csv = summary.str();
  if (out_dir) {
    std::ofstream(std::filesystem::path(*out_dir) / "summary.csv") << result.summary_csv;
  }
  return result;
}

SuiteResult run_all(const std::string& config_path, const RunOptions& options,
                    const std::optional<std::string>& out_dir) {
  return run_suite(read_config_file(config_path), options, out_dir);
}

}  // namespace dirlab

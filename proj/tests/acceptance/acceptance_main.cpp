// Acceptance run: one line per criterion, "CRITERION k PASS|FAIL detail".
// Parameters and tolerances are fixed here and verdicts are recomputed from
// the report series rather than read back from the library's own verdicts
// wherever the series carries enough to do so. Exit status is 0 only when
// every criterion passes.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "dirlab/config.hpp"
#include "dirlab/error.hpp"
#include "dirlab/experiments.hpp"
#include "dirlab/measure.hpp"
#include "dirlab/geometry.hpp"

using namespace dirlab;
using nlohmann::json;

namespace {

constexpr std::uint64_t kSeed = 20240611;

struct Run {
  ExperimentReport report;
  double seconds = 0.0;
};

Run run(const std::string& section_text) {
  const auto config = parse_config(section_text);
  RunOptions opt;
  opt.seed = kSeed;
  opt.threads = 1;
  const auto start = std::chrono::steady_clock::now();
  Run r{run_experiment(config.sections.at(0), opt), 0.0};
  r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return r;
}

std::vector<double> doubles(const json& j) { return j.get<std::vector<double>>(); }

// Ordinary least squares slope and rms residual.
struct Line {
  double slope = NAN;
  double rms = NAN;
};

Line fit(const std::vector<double>& x, const std::vector<double>& y) {
  const double n = static_cast<double>(x.size());
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  Line l;
  l.slope = sxy / sxx;
  double ss = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double e = y[i] - (my + l.slope * (x[i] - mx));
    ss += e * e;
  }
  l.rms = std::sqrt(ss / n);
  return l;
}

Line fit_loglog(const std::vector<double>& x, const std::vector<double>& y) {
  std::vector<double> lx, ly;
  for (std::size_t i = 0; i < x.size(); ++i) {
    lx.push_back(std::log(x[i]));
    ly.push_back(std::log(y[i]));
  }
  return fit(lx, ly);
}

int failures = 0;

void line(int k, bool pass, const std::string& detail) {
  if (!pass) ++failures;
  std::printf("CRITERION %d %s %s\n", k, pass ? "PASS" : "FAIL", detail.c_str());
  std::fflush(stdout);
}

std::string fmt(const char* f, double a) {
  char buf[128];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

bool no_error(const Run& r, int k) {
  if (!r.report.error) return true;
  line(k, false, "error: " + *r.report.error);
  return false;
}

// The pairwise and size checks of every census a run performed.
bool tally_ok(const ExperimentReport& r, std::string& detail) {
  if (!r.series.contains("separated_subset")) {
    detail += " " + r.id + ":missing";
    return false;
  }
  const auto& t = r.series["separated_subset"];
  const bool ok = t["checks"].get<long>() > 0 && t["separation_failures"].get<long>() == 0 &&
                  t["size_failures"].get<long>() == 0 && t["min_distance_over_delta"].get<double>() >= 1.0;
  detail += " " + r.id + ":" + std::to_string(t["checks"].get<long>()) + (ok ? "ok" : "BAD");
  return ok;
}

void criterion1() {
  const double limit = 1.0;
  auto r = run("[primitive_zeta]\nkind = primitive_zeta\nq2 = 100\nq3 = 40\n");
  if (!no_error(r, 1)) return;
  const auto q = doubles(r.report.series["q"]);
  const auto count = doubles(r.report.series["count"]);
  // 1/zeta(3) by direct summation; the tail after N terms is below 1/(2N^2).
  double zeta3 = 0.0;
  for (long k = 400000; k >= 1; --k) zeta3 += 1.0 / (static_cast<double>(k) * k * k);
  const double inv2 = 6.0 / (M_PI * M_PI);
  const double ratio2 = count[0] / (q[0] * q[0]) / inv2;
  const double ratio3 = count[1] / (q[1] * q[1] * q[1]) * zeta3;
  const bool pass = std::abs(ratio2 - 1.0) <= 0.02 && std::abs(ratio3 - 1.0) <= 0.03 && r.seconds < limit;
  line(1, pass,
       fmt("d2 ratio=%.6f (|r-1|<=0.02)", ratio2) + fmt(" d3 ratio=%.6f (|r-1|<=0.03)", ratio3) +
           fmt(" time=%.3fs (<1s)", r.seconds));
}

Run criterion2() {
  auto r = run("[pps]\nkind = pps_suite\nsets = 200\nn_min = 5\nn_max = 40\nmax_denominator = 6\n");
  if (!no_error(r, 2)) return r;
  const auto& s = r.report.series;
  const auto n = s["n"].get<std::vector<long>>();
  const auto dirs = s["directions"].get<std::vector<long>>();
  std::size_t ok = 0;
  for (std::size_t i = 0; i < n.size(); ++i) {
    const long bound = n[i] % 2 ? 2 * n[i] - 5 : 2 * n[i] - 7;
    if (n[i] >= 5 && n[i] <= 40 && dirs[i] >= bound && s["status"][i] == "pass") ++ok;
  }
  const bool pass = n.size() == 200 && ok == 200 && r.seconds < 5.0;
  line(2, pass, "sets=" + std::to_string(n.size()) + " meeting bound=" + std::to_string(ok) +
                    fmt(" time=%.3fs (<5s)", r.seconds));
  return r;
}

Run criterion3() {
  auto r = run("[census_oracle]\nkind = census_oracle\nsets = 100\nn_max = 12\n");
  if (!no_error(r, 3)) return r;
  const auto& s = r.report.series;
  const auto n = s["n"].get<std::vector<long>>();
  const auto agree = s["matches_oracle"].get<std::vector<bool>>();
  const auto matched = std::count(agree.begin(), agree.end(), true);
  const bool small = std::all_of(n.begin(), n.end(), [](long v) { return v <= 12; });
  const bool pass = n.size() == 100 && matched == 100 && small;
  line(3, pass, "sets=" + std::to_string(n.size()) + " equal to oracle=" + std::to_string(matched));
  return r;
}

Run criterion4() {
  auto r = run("[hyperplane]\nkind = hyperplane_coverage\nd = 3\nn = 10000\nepsilons = 0.2, 0.1, 0.05, 0.025\n");
  if (!no_error(r, 4)) return r;
  const auto eps = doubles(r.report.series["epsilon"]);
  const auto occ = doubles(r.report.series["occupied"]);
  std::vector<double> inv;
  for (double e : eps) inv.push_back(1.0 / e);
  const auto l = fit_loglog(inv, occ);
  const bool pass = std::abs(l.slope - 1.0) <= 0.3 && r.seconds < 30.0;
  line(4, pass, fmt("slope=%.4f (1.0 +- 0.3)", l.slope) + fmt(" time=%.3fs (<30s)", r.seconds));
  return r;
}

Run criterion5() {
  auto r = run("[grid]\nkind = grid_coverage\nd = 2\nside = 100\nepsilons = 0.05, 0.02\n");
  if (!no_error(r, 5)) return r;
  const auto eps = doubles(r.report.series["epsilon"]);
  const auto frac = doubles(r.report.series["fraction"]);
  const bool pass = eps.size() == 2 && eps[0] == 0.05 && eps[1] == 0.02 && frac[0] >= 0.5 && frac[1] >= 0.3;
  line(5, pass, fmt("fraction(0.05)=%.4f (>=0.5)", frac[0]) + fmt(" fraction(0.02)=%.4f (>=0.3)", frac[1]));
  return r;
}

std::vector<Run> criterion6() {
  std::vector<Run> runs;
  bool pass = true;
  std::string detail;
  for (double s : {0.8, 2.0}) {
    const std::string name = s == 0.8 ? "lattice_s0.8" : "lattice_s2";
    auto r = run("[" + name + "]\nkind = lattice_scaling\nd = 2\ns = " + fmt("%.17g", s) +
                 "\nq_list = 8, 16, 32, 64\nobservable = count\n");
    if (!no_error(r, 6)) return runs;
    const int d = 2;
    const double predicted = d - d * (d - 1) / s;
    const auto l = fit_loglog(doubles(r.report.series["q"]), doubles(r.report.series["occupied"]));
    const bool ok = std::abs(l.slope - predicted) <= 0.4 && r.seconds < 60.0;
    pass = pass && ok;
    if (!detail.empty()) detail += "; ";
    detail += fmt("s=%g", s) + fmt(" exponent=%.4f", l.slope) + fmt(" (%.2f +- 0.4)", predicted) +
              fmt(" time=%.3fs (<60s)", r.seconds);
    runs.push_back(std::move(r));
  }
  line(6, pass, detail);
  return runs;
}

Run criterion7() {
  auto r = run("[garnett]\nkind = garnett_decay\ndepths = 2, 3, 4, 5\neps_base = 4\n");
  if (!no_error(r, 7)) return r;
  const auto frac = doubles(r.report.series["fraction"]);
  bool decreasing = frac.size() == 4;
  std::string list;
  for (std::size_t i = 0; i < frac.size(); ++i) {
    if (i > 0 && !(frac[i] < frac[i - 1])) decreasing = false;
    list += fmt(i ? ",%.4f" : "%.4f", frac[i]);
  }
  line(7, decreasing && r.seconds < 60.0,
       "fractions=[" + list + "] (strictly decreasing)" + fmt(" time=%.3fs (<60s)", r.seconds));
  return r;
}

void criterion8() {
  auto r = run("[nu_bounds]\nkind = nu_bounds\nd = 2\ncopies = 3\nbase = 4\ndepth = 6\n"
               "eps_exponents = 3, 4, 5, 6, 7\n");
  if (!no_error(r, 8)) return;
  const double s = 2.0 * std::log(3.0) / std::log(4.0);
  const double predicted = s - 1.0;
  const auto eps = doubles(r.report.series["epsilon"]);
  const auto nrm = doubles(r.report.series["normalized"]);
  // The finest epsilon stands in for the limit L.
  const auto finest =
      static_cast<std::size_t>(std::min_element(eps.begin(), eps.end()) - eps.begin());
  const double limit = nrm[finest];
  double k = 0.0;
  std::vector<double> xs, ys;
  for (std::size_t i = 0; i < eps.size(); ++i) {
    if (i == finest) continue;
    k = std::max(k, std::abs(nrm[i] / limit - 1.0) / std::pow(eps[i], predicted));
    xs.push_back(eps[i]);
    ys.push_back(std::abs(nrm[i] - limit));
  }
  bool pass = eps.size() == 5 && k <= 10.0 && r.seconds < 120.0;
  std::string detail = fmt("L=%.6f", limit) + fmt(" K=%.4f (<=10)", k);
  const bool fittable = std::all_of(ys.begin(), ys.end(), [](double y) { return y > 0.0; });
  if (fittable) {
    const auto l = fit_loglog(xs, ys);
    if (l.rms <= 0.5) {
      pass = pass && std::abs(l.slope - predicted) <= 0.5;
      detail += fmt(" exponent=%.4f", l.slope) + fmt(" (%.4f +- 0.5)", predicted);
    } else {
      detail += fmt(" exponent not fitted (rms %.3f > 0.5)", l.rms);
    }
  } else {
    detail += " exponent not fitted (zero deviation)";
  }
  line(8, pass, detail + fmt(" time=%.3fs (<120s)", r.seconds));
}

void criterion9() {
  auto r = run("[split]\nkind = split_contract\nmeasures = 50\nmax_depth = 8\n");
  if (!no_error(r, 9)) return;
  const auto& s = r.report.series;
  const auto outcome = s["outcome"].get<std::vector<std::string>>();
  const auto level = s["level"].get<std::vector<json>>();
  const auto ds = s["d"].get<std::vector<long>>();
  const auto dims = doubles(s["s"]);
  std::size_t ok = 0;
  for (std::size_t i = 0; i < outcome.size(); ++i) {
    const bool in_scope = dims[i] > ds[i] - 1 && (ds[i] == 2 || ds[i] == 3);
    if (in_scope && outcome[i] == "ok" && level[i].is_number() && level[i].get<long>() <= 8) ++ok;
  }
  const bool pass = outcome.size() == 50 && ok == 50;
  line(9, pass, "measures=" + std::to_string(outcome.size()) + " split with postconditions=" + std::to_string(ok));
}

void criterion10() {
  auto r = run("[energy]\nkind = energy_contract\nsupports = 24\nmax_atoms = 300\n");
  if (!no_error(r, 10)) return;
  const auto err = doubles(r.report.series["oracle_relative_error"]);
  const auto n = r.report.series["n"].get<std::vector<long>>();
  const double worst = *std::max_element(err.begin(), err.end());
  const bool small = std::all_of(n.begin(), n.end(), [](long v) { return v <= 300; });
  const auto* exact = r.report.verdict("energy_exact_scaling");
  const long checks = r.report.parameters.value("exact_scaling_checks", 0L);

  // A direct rational identity on a fixed support, independent of the suite.
  std::vector<Rational> c{0, 0, Rational(1, 3), Rational(1, 5), Rational(2, 7), 1, 1, Rational(1, 2)};
  const auto mu = WeightedPointSet::uniform(PointSet::exact(2, c));
  bool direct = true;
  for (const Rational& lam : {Rational(1, 2), Rational(1, 3), Rational(2)}) {
    for (int s : {2, 4}) {
      const auto scaled = WeightedPointSet(mu.base().transformed(lam, {Rational(0), Rational(0)}), mu.exact_masses());
      Rational factor = 1;
      for (int i = 0; i < s; ++i) factor /= lam;
      direct = direct && energy_integral_exact(scaled, s) == factor * energy_integral_exact(mu, s);
    }
  }
  const bool pass = worst <= 1e-12 && small && exact && exact->status == VerdictStatus::Pass && checks > 0 && direct;
  line(10, pass,
       fmt("max oracle relative error=%.3e (<=1e-12)", worst) + " rational scaling checks=" +
           std::to_string(checks) + (exact && exact->status == VerdictStatus::Pass ? " all equal" : " MISMATCH") +
           (direct ? " direct identity ok" : " direct identity FAILED"));
}

void criterion11(const std::vector<const ExperimentReport*>& reports) {
  bool pass = !reports.empty();
  std::string detail = "censuses from criteria 2-7:";
  for (const auto* r : reports) pass = tally_ok(*r, detail) && pass;
  line(11, pass, detail);
}

}  // namespace

int main() {
  try {
    criterion1();
    const auto c2 = criterion2();
    const auto c3 = criterion3();
    const auto c4 = criterion4();
    const auto c5 = criterion5();
    const auto c6 = criterion6();
    const auto c7 = criterion7();
    criterion8();
    criterion9();
    criterion10();
    std::vector<const ExperimentReport*> censuses{&c2.report, &c3.report, &c4.report, &c5.report, &c7.report};
    for (const auto& r : c6) censuses.push_back(&r.report);
    if (c6.size() != 2) censuses.clear();
    criterion11(censuses);
  } catch (const std::exception& e) {
    std::printf("acceptance aborted: %s\n", e.what());
    return 2;
  }
  std::printf("%d criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}

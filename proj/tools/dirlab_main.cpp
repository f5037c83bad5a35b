// dirlab command line. Talks to the library only through dirlab.h.
//
// Exit codes: 0 success (for `experiment run`: every verdict passed),
// 1 some verdict failed, 2 usage or parse error, 3 any other library error.

#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "dirlab/dirlab.h"

namespace {

constexpr int kExitVerdict = 1;
constexpr int kExitUsage = 2;
constexpr int kExitLibrary = 3;

struct Failure {
  int code;
};

void check(dirlab_status st) {
  if (st == DIRLAB_OK) return;
  std::cerr << "dirlab: " << dirlab_status_name(st) << ": " << dirlab_last_error() << "\n";
  throw Failure{st == DIRLAB_PARSE || st == DIRLAB_INVALID_ARGUMENT ? kExitUsage : kExitLibrary};
}

class Handle {
 public:
  Handle() = default;
  Handle(const Handle&) = delete;
  Handle& operator=(const Handle&) = delete;
  ~Handle() { dirlab_pointset_free(p_); }
  dirlab_pointset** out() { return &p_; }
  const dirlab_pointset* get() const { return p_; }

 private:
  dirlab_pointset* p_ = nullptr;
};

class Text {
 public:
  Text() = default;
  Text(const Text&) = delete;
  Text& operator=(const Text&) = delete;
  ~Text() { dirlab_string_free(p_); }
  char** out() { return &p_; }
  std::string str() const { return p_ ? p_ : ""; }

 private:
  char* p_ = nullptr;
};

void load(const std::string& path, Handle& h) {
  if (path == "-") {
    std::stringstream ss;
    ss << std::cin.rdbuf();
    check(dirlab_pointset_parse(ss.str().c_str(), h.out()));
  } else {
    check(dirlab_pointset_read(path.c_str(), h.out()));
  }
}

std::vector<double> load_masses(const std::string& path, const Handle& h) {
  std::vector<double> m;
  if (path.empty()) return m;
  std::ifstream in(path);
  if (!in) {
    std::cerr << "dirlab: cannot open masses file " << path << "\n";
    throw Failure{kExitUsage};
  }
  double v;
  while (in >> v) m.push_back(v);
  if (!in.eof() || m.size() != dirlab_pointset_size(h.get())) {
    std::cerr << "dirlab: masses file " << path << " must hold " << dirlab_pointset_size(h.get())
              << " numbers\n";
    throw Failure{kExitUsage};
  }
  return m;
}

const double* masses_ptr(const std::vector<double>& m) { return m.empty() ? nullptr : m.data(); }

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path);
  out << text;
  if (!out) {
    std::cerr << "dirlab: cannot write " << path << "\n";
    throw Failure{kExitLibrary};
  }
}

void emit_set(const Handle& h, const std::string& output) {
  if (output.empty() || output == "-") {
    Text t;
    check(dirlab_pointset_serialize(h.get(), t.out()));
    std::cout << t.str();
  } else {
    check(dirlab_pointset_write(h.get(), output.c_str()));
    std::cerr << "wrote " << dirlab_pointset_size(h.get()) << " points to " << output << "\n";
  }
}

std::string num(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Distinct directions and slope densities of finite point sets"};
  app.set_version_flag("--version", std::string(dirlab_version()));
  app.require_subcommand(1);
  // Subcommands inherit this, so global flags may also follow them.
  app.fallthrough();

  std::optional<std::uint64_t> seed;
  unsigned threads = 0;
  std::string out_dir;
  app.add_option("--seed", seed, "Random seed for experiments (overrides the config)");
  app.add_option("--threads", threads, "Worker threads (0 = config or 1)");
  app.add_option("--out", out_dir, "Output directory for experiment reports (default $DIRLAB_OUT or ./results)");

  // generate
  auto* gen = app.add_subcommand("generate", "Write a point set");
  gen->require_subcommand(1);
  std::string output;
  int q = 8, d = 2, depth = 3, copies = 0, base = 0;
  std::size_t n = 100;
  double s = 0.0;
  std::string maps_file;

  auto* g_lat = gen->add_subcommand("lattice", "Grid q^{-1}(Z^d ∩ [0,q]^d)");
  g_lat->add_option("--q", q)->required();
  g_lat->add_option("--d", d)->required();
  auto* g_gar = gen->add_subcommand("garnett", "Four-corner set approximant");
  g_gar->add_option("--depth", depth)->required();
  auto* g_ifs = gen->add_subcommand("ifs", "Attractor approximant of a similarity system");
  g_ifs->add_option("--maps", maps_file, "JSON file {\"d\":2,\"maps\":[{\"ratio\":\"1/3\",\"offset\":[\"0\",\"0\"]}]}")
      ->required()
      ->check(CLI::ExistingFile);
  g_ifs->add_option("--depth", depth)->required();
  auto* g_hyp = gen->add_subcommand("hyperplane", "Grid on the hyperplane x_d = 1/2");
  g_hyp->add_option("--d", d)->required();
  g_hyp->add_option("--n", n)->required();
  auto* g_gra = gen->add_subcommand("graph", "Grid samples of a curved graph");
  g_gra->add_option("--d", d)->required();
  g_gra->add_option("--n", n)->required();
  auto* g_can = gen->add_subcommand("cantor", "Product Cantor set");
  g_can->add_option("--d", d)->required();
  g_can->add_option("--depth", depth)->required();
  auto* can_s = g_can->add_option("--s", s, "Target dimension");
  auto* can_c = g_can->add_option("--copies", copies);
  auto* can_b = g_can->add_option("--base", base);
  can_c->needs(can_b);
  can_b->needs(can_c);
  can_s->excludes(can_c);
  for (auto* sub : {g_lat, g_gar, g_ifs, g_hyp, g_gra, g_can})
    sub->add_option("-o,--output", output, "Output file (default stdout)");

  // directions
  auto* dir = app.add_subcommand("directions", "Direction census and coverage");
  dir->require_subcommand(1);
  std::string input, input2;
  bool oriented = false;
  std::vector<double> eps_list;
  std::string csv_path;
  double delta = 0.05;

  auto* d_count = dir->add_subcommand("count", "Number of distinct directions");
  auto* d_list = dir->add_subcommand("list", "Distinct direction keys as JSON");
  auto* d_cov = dir->add_subcommand("coverage", "Sphere coverage per epsilon (JSON, optional CSV)");
  d_cov->add_option("--eps", eps_list, "Chart pitches")->required()->delimiter(',');
  d_cov->add_option("--csv", csv_path, "Write occupied cells as CSV");
  auto* d_pps = dir->add_subcommand("pps", "Lower-bound check for point sets in R^3");
  auto* d_sep = dir->add_subcommand("separate", "Pairwise separated subset of the directions");
  d_sep->add_option("--delta", delta)->required();
  for (auto* sub : {d_count, d_list, d_cov, d_pps, d_sep}) sub->add_option("input", input, "Point set file or -")->required();
  for (auto* sub : {d_count, d_list, d_cov})
    sub->add_flag("--oriented", oriented, "Do not identify antipodal directions");
  auto* d_prim = dir->add_subcommand("primitive", "Count primitive vectors in [0,q]^d");
  d_prim->add_option("--q", q)->required();
  d_prim->add_option("--d", d)->required();

  // measure
  auto* mea = app.add_subcommand("measure", "Measures on point sets");
  mea->require_subcommand(1);
  std::string masses_file, masses_file2;
  double constant = 0.0, c = 0.0, pitch = 0.0, eps = 0.0;
  int max_depth = 8;

  auto* m_en = mea->add_subcommand("energy", "Riesz s-energy");
  auto* m_ad = mea->add_subcommand("adaptable", "Separation and energy check");
  m_ad->add_option("--constant", constant, "Energy bound (default from d and s)");
  auto* m_fr = mea->add_subcommand("frostman", "Dyadic Frostman constant");
  m_fr->add_option("--depth", depth)->required();
  auto* m_sp = mea->add_subcommand("split", "Stopping-time cube split");
  auto* m_nu = mea->add_subcommand("nueps", "Slope density on a grid (JSON, optional CSV)");
  m_nu->add_option("input2", input2, "Second point set file")->required();
  m_nu->add_option("--masses2", masses_file2, "Masses of the second set");
  m_nu->add_option("--eps", eps)->required();
  m_nu->add_option("--pitch", pitch, "Grid pitch (default eps/2)");
  m_nu->add_option("--csv", csv_path, "Write the field as CSV");
  auto* m_bo = mea->add_subcommand("bounds", "Integral of the slope density against epsilon");
  m_bo->add_option("--eps", eps_list)->required()->delimiter(',');
  for (auto* sub : {m_en, m_ad, m_fr, m_bo}) sub->add_option("--s", s)->required();
  for (auto* sub : {m_sp, m_bo}) {
    sub->add_option("--c", c, "Mass threshold (default 2^{-(2d+1)})");
    sub->add_option("--max-depth", max_depth);
  }
  for (auto* sub : {m_en, m_ad, m_fr, m_sp, m_nu, m_bo}) sub->add_option("input", input, "Point set file or -")->required();
  for (auto* sub : {m_en, m_fr, m_sp, m_nu, m_bo})
    sub->add_option("--masses", masses_file, "Whitespace-separated masses (default uniform)");

  // experiment
  auto* exp = app.add_subcommand("experiment", "Config-driven experiments");
  exp->require_subcommand(1);
  std::string config_path;
  auto* e_run = exp->add_subcommand("run", "Run every section of a config");
  e_run->add_option("config", config_path)->required()->check(CLI::ExistingFile);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? 0 : kExitUsage;
  }

  try {
    const int antipodal = oriented ? 0 : 1;
    if (gen->parsed()) {
      Handle h;
      if (g_lat->parsed()) {
        check(dirlab_generate_lattice(q, d, h.out()));
      } else if (g_gar->parsed()) {
        check(dirlab_generate_garnett(depth, h.out()));
      } else if (g_ifs->parsed()) {
        std::ifstream in(maps_file);
        std::stringstream ss;
        ss << in.rdbuf();
        check(dirlab_generate_ifs(ss.str().c_str(), depth, h.out()));
      } else if (g_hyp->parsed()) {
        check(dirlab_generate_hyperplane(d, n, h.out()));
      } else if (g_gra->parsed()) {
        check(dirlab_generate_graph(d, n, h.out()));
      } else if (g_can->parsed()) {
        if (can_c->count() > 0) {
          check(dirlab_generate_cantor_preset(d, copies, base, depth, h.out()));
        } else if (can_s->count() > 0) {
          check(dirlab_generate_cantor(d, s, depth, h.out()));
        } else {
          std::cerr << "dirlab: cantor needs --s or --copies/--base\n";
          return kExitUsage;
        }
      }
      emit_set(h, output);
      return 0;
    }

    if (dir->parsed()) {
      if (d_prim->parsed()) {
        std::uint64_t count = 0;
        check(dirlab_primitive_count(q, d, &count));
        std::cout << count << "\n";
        return 0;
      }
      Handle h;
      load(input, h);
      Text j;
      if (d_count->parsed()) {
        std::size_t count = 0;
        check(dirlab_directions_count(h.get(), antipodal, &count));
        std::cout << count << "\n";
        return 0;
      }
      if (d_list->parsed()) check(dirlab_directions_list(h.get(), antipodal, j.out()));
      if (d_pps->parsed()) check(dirlab_directions_pps(h.get(), j.out()));
      if (d_sep->parsed()) check(dirlab_directions_separate(h.get(), delta, j.out()));
      if (d_cov->parsed()) {
        Text table;
        check(dirlab_directions_coverage(h.get(), eps_list.data(), eps_list.size(), antipodal, threads, j.out(),
                                         csv_path.empty() ? nullptr : table.out()));
        if (!csv_path.empty()) write_text(csv_path, table.str());
      }
      std::cout << j.str() << "\n";
      return 0;
    }

    if (mea->parsed()) {
      Handle h;
      load(input, h);
      const auto masses = load_masses(masses_file, h);
      const double* mp = masses_ptr(masses);
      if (m_en->parsed()) {
        double e = 0.0;
        check(dirlab_measure_energy(h.get(), mp, s, threads, &e));
        std::cout << num(e) << "\n";
        return 0;
      }
      if (m_fr->parsed()) {
        double f = 0.0;
        check(dirlab_measure_frostman(h.get(), mp, s, depth, &f));
        std::cout << num(f) << "\n";
        return 0;
      }
      Text j;
      if (m_ad->parsed()) check(dirlab_measure_adaptable(h.get(), s, constant, threads, j.out()));
      if (m_sp->parsed()) check(dirlab_measure_split(h.get(), mp, c, max_depth, j.out()));
      if (m_bo->parsed())
        check(dirlab_measure_bounds(h.get(), mp, s, eps_list.data(), eps_list.size(), c, max_depth, threads,
                                    j.out()));
      if (m_nu->parsed()) {
        Handle h2;
        load(input2, h2);
        const auto masses2 = load_masses(masses_file2, h2);
        Text table;
        check(dirlab_measure_nueps(h.get(), mp, h2.get(), masses_ptr(masses2), eps, pitch > 0 ? pitch : eps / 2,
                                   threads, j.out(), csv_path.empty() ? nullptr : table.out()));
        if (!csv_path.empty()) write_text(csv_path, table.str());
      }
      std::cout << j.str() << "\n";
      return 0;
    }

    if (e_run->parsed()) {
      if (out_dir.empty()) {
        const char* env = std::getenv("DIRLAB_OUT");
        out_dir = env && *env ? env : "results";
      }
      int all_pass = 0;
      Text summary;
      check(dirlab_experiment_run(config_path.c_str(), out_dir.c_str(), threads, seed.value_or(0),
                                  seed.has_value() ? 1 : 0, &all_pass, summary.out()));
      const auto reports = nlohmann::json::parse(summary.str());
      for (const auto& r : reports) {
        const std::string id = r.at("id").get<std::string>();
        if (r.contains("error") && !r["error"].is_null()) std::cout << id << "  error  " << r.at("error").get<std::string>() << "\n";
        for (const auto& v : r.at("verdicts")) {
          std::cout << id << "  " << v.at("name").get<std::string>() << "  " << v.at("status").get<std::string>()
                    << "  value=" << v.at("value").dump() << "\n";
        }
      }
      std::cout << "reports written to " << out_dir << "\n";
      return all_pass ? 0 : kExitVerdict;
    }
  } catch (const Failure& f) {
    return f.code;
  }
  return 0;
}

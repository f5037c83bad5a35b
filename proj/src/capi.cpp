#include "dirlab/dirlab.h"

#include <cmath>
#include <cstdlib>
#include <cstring>
#include <new>
#include <sstream>
#include <string>

#include <json.hpp>

#include "dirlab/directions.hpp"
#include "dirlab/experiments.hpp"
#include "dirlab/generators.hpp"
#include "dirlab/measure.hpp"
#include "dirlab/pointset_io.hpp"
#include "dirlab/version.hpp"

struct dirlab_pointset {
  dirlab::PointSet set;
};

namespace {

using nlohmann::json;

thread_local std::string g_last_error;

dirlab_status to_status(dirlab::ErrorCode code) {
  return static_cast<dirlab_status>(static_cast<int>(code));
}

template <typename F>
dirlab_status guarded(F&& body) {
  g_last_error.clear();
  try {
    body();
    return DIRLAB_OK;
  } catch (const dirlab::Error& e) {
    g_last_error = e.what();
    return to_status(e.code());
  } catch (const std::bad_alloc&) {
    g_last_error = "out of memory";
    return DIRLAB_SIZE_LIMIT;
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return DIRLAB_INTERNAL;
  } catch (...) {
    g_last_error = "unknown failure";
    return DIRLAB_INTERNAL;
  }
}

void need(const void* p, const char* what) {
  if (p == nullptr) dirlab::fail(dirlab::ErrorCode::InvalidArgument, std::string(what) + " is NULL");
}

char* dup_string(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (out == nullptr) throw std::bad_alloc();
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

void emit(char** out, const std::string& s) {
  if (out != nullptr) *out = dup_string(s);
}

void emit_set(dirlab_pointset** out, dirlab::PointSet set) {
  need(out, "out");
  *out = new dirlab_pointset{std::move(set)};
}

dirlab::WeightedPointSet weighted(const dirlab_pointset* set, const double* masses) {
  need(set, "point set");
  if (masses == nullptr) return dirlab::WeightedPointSet::uniform(set->set);
  return dirlab::WeightedPointSet(set->set,
                                  std::vector<double>(masses, masses + set->set.size()));
}

std::optional<double> positive_or_default(double v) {
  if (v > 0.0) return v;
  return std::nullopt;
}

// Doubles that are not finite become null in JSON.
json num(double v) {
  if (!std::isfinite(v)) return nullptr;
  return v;
}

json split_json(const dirlab::CubeSplit& s) {
  json j;
  j["level"] = s.level;
  j["sep_coordinate"] = s.sep_coordinate;
  j["sep_distance"] = s.sep_distance;
  j["mass1"] = s.mass1;
  j["mass2"] = s.mass2;
  j["parent_mass"] = s.parent_mass;
  j["threshold"] = s.threshold;
  j["cube1"] = s.cube1;
  j["cube2"] = s.cube2;
  j["e1_atoms"] = s.e1_atoms;
  j["e2_atoms"] = s.e2_atoms;
  if (s.exact_mass1) {
    j["exact_mass1"] = s.exact_mass1->get_str();
    j["exact_mass2"] = s.exact_mass2->get_str();
    j["exact_parent_mass"] = s.exact_parent_mass->get_str();
  }
  return j;
}

}  // namespace

extern "C" {

const char* dirlab_version(void) { return DIRLAB_VERSION_STRING; }

const char* dirlab_status_name(dirlab_status status) {
  if (status == DIRLAB_OK) return "Ok";
  if (status < DIRLAB_OK || status > DIRLAB_INTERNAL) return "Unknown";
  return dirlab::error_code_name(static_cast<dirlab::ErrorCode>(static_cast<int>(status)));
}

const char* dirlab_last_error(void) { return g_last_error.c_str(); }

void dirlab_string_free(char* s) { std::free(s); }

dirlab_status dirlab_pointset_parse(const char* text, dirlab_pointset** out) {
  return guarded([&] {
    need(text, "text");
    emit_set(out, dirlab::parse_point_set(text));
  });
}

dirlab_status dirlab_pointset_read(const char* path, dirlab_pointset** out) {
  return guarded([&] {
    need(path, "path");
    emit_set(out, dirlab::read_point_set_file(path));
  });
}

dirlab_status dirlab_pointset_write(const dirlab_pointset* set, const char* path) {
  return guarded([&] {
    need(set, "point set");
    need(path, "path");
    dirlab::write_point_set_file(path, set->set);
  });
}

dirlab_status dirlab_pointset_serialize(const dirlab_pointset* set, char** out) {
  return guarded([&] {
    need(set, "point set");
    need(out, "out");
    emit(out, dirlab::format_point_set(set->set));
  });
}

dirlab_status dirlab_pointset_from_doubles(int d, size_t n, const double* coords,
                                           dirlab_pointset** out) {
  return guarded([&] {
    if (n > 0) need(coords, "coords");
    emit_set(out, dirlab::PointSet::floating(d, std::vector<double>(coords, coords + n * d)));
  });
}

void dirlab_pointset_free(dirlab_pointset* set) { delete set; }

size_t dirlab_pointset_size(const dirlab_pointset* set) { return set ? set->set.size() : 0; }

int dirlab_pointset_dimension(const dirlab_pointset* set) { return set ? set->set.dimension() : 0; }

int dirlab_pointset_is_exact(const dirlab_pointset* set) {
  return set && set->set.mode() == dirlab::NumberMode::Exact ? 1 : 0;
}

dirlab_status dirlab_pointset_coords(const dirlab_pointset* set, double* out, size_t capacity) {
  return guarded([&] {
    need(set, "point set");
    const auto& v = set->set.doubles();
    if (capacity < v.size())
      dirlab::fail(dirlab::ErrorCode::InvalidArgument,
                   "capacity " + std::to_string(capacity) + " < " + std::to_string(v.size()));
    if (!v.empty()) {
      need(out, "out");
      std::memcpy(out, v.data(), v.size() * sizeof(double));
    }
  });
}

dirlab_status dirlab_generate_lattice(int q, int d, dirlab_pointset** out) {
  return guarded([&] {
    dirlab::LatticeSpec spec;
    spec.q = q;
    spec.d = d;
    spec.s = d;
    emit_set(out, dirlab::lattice_set(spec));
  });
}

dirlab_status dirlab_generate_garnett(int depth, dirlab_pointset** out) {
  return guarded([&] { emit_set(out, dirlab::ifs_approximant(dirlab::IfsSystem::garnett(), depth)); });
}

dirlab_status dirlab_generate_ifs(const char* maps_json, int depth, dirlab_pointset** out) {
  return guarded([&] {
    need(maps_json, "maps_json");
    json j;
    try {
      j = json::parse(maps_json);
    } catch (const json::exception& e) {
      dirlab::fail(dirlab::ErrorCode::Parse, std::string("maps JSON: ") + e.what());
    }
    std::vector<dirlab::SimilarityMap> maps;
    int d = 0;
    try {
      d = j.at("d").get<int>();
      for (const auto& m : j.at("maps")) {
        dirlab::SimilarityMap map;
        map.ratio = dirlab::parse_rational(m.at("ratio").get<std::string>());
        for (const auto& o : m.at("offset")) map.offset.push_back(dirlab::parse_rational(o.get<std::string>()));
        maps.push_back(std::move(map));
      }
    } catch (const json::exception& e) {
      dirlab::fail(dirlab::ErrorCode::Parse, std::string("maps JSON: ") + e.what());
    }
    emit_set(out, dirlab::ifs_approximant(dirlab::IfsSystem(d, std::move(maps)), depth));
  });
}

dirlab_status dirlab_generate_hyperplane(int d, size_t n, dirlab_pointset** out) {
  return guarded([&] { emit_set(out, dirlab::hyperplane_sample(d, n)); });
}

dirlab_status dirlab_generate_graph(int d, size_t n, dirlab_pointset** out) {
  return guarded([&] { emit_set(out, dirlab::lipschitz_graph_sample(d, n)); });
}

dirlab_status dirlab_generate_cantor(int d, double s, int depth, dirlab_pointset** out) {
  return guarded([&] { emit_set(out, dirlab::product_cantor(d, s, depth)); });
}

dirlab_status dirlab_generate_cantor_preset(int d, int copies, int base, int depth,
                                            dirlab_pointset** out) {
  return guarded([&] {
    dirlab::CantorPreset preset;
    preset.copies = copies;
    preset.base = base;
    emit_set(out, dirlab::product_cantor(d, preset, depth));
  });
}

dirlab_status dirlab_primitive_count(int q, int d, uint64_t* out) {
  return guarded([&] {
    need(out, "out");
    *out = dirlab::primitive_count(q, d);
  });
}

dirlab_status dirlab_directions_count(const dirlab_pointset* set, int antipodal, size_t* out) {
  return guarded([&] {
    need(set, "point set");
    need(out, "out");
    *out = dirlab::distinct_directions(set->set, antipodal != 0).size();
  });
}

dirlab_status dirlab_directions_list(const dirlab_pointset* set, int antipodal, char** out) {
  return guarded([&] {
    need(set, "point set");
    need(out, "out");
    auto census = dirlab::distinct_directions(set->set, antipodal != 0);
    json keys = json::array();
    for (std::size_t i = 0; i < census.size(); ++i) keys.push_back(census.key(i).to_string());
    json j;
    j["n_points"] = census.n_points();
    j["n_pairs"] = census.n_pairs();
    j["antipodal"] = census.antipodal();
    j["mode"] = dirlab::mode_name(census.mode());
    j["count"] = census.size();
    j["keys"] = std::move(keys);
    emit(out, j.dump(2));
  });
}

dirlab_status dirlab_directions_coverage(const dirlab_pointset* set, const double* eps, size_t n_eps,
                                         int antipodal, unsigned threads, char** out, char** csv) {
  return guarded([&] {
    need(set, "point set");
    need(eps, "eps");
    need(out, "out");
    auto grids = dirlab::sphere_coverage(set->set, std::span<const double>(eps, n_eps),
                                         antipodal != 0, threads);
    json rows = json::array();
    std::ostringstream table;
    table.precision(17);
    table << "epsilon,cell,hits\n";
    for (const auto& g : grids) {
      json r;
      r["epsilon"] = g.epsilon();
      r["total_cells"] = g.total_cells();
      r["occupied_cells"] = g.occupied_cells();
      r["fraction"] = g.fraction();
      r["total_hits"] = g.total_hits();
      rows.push_back(std::move(r));
      if (csv != nullptr)
        for (const auto& [cell, hits] : g.cells()) table << g.epsilon() << ',' << cell << ',' << hits << '\n';
    }
    json j;
    j["n_points"] = set->set.size();
    j["antipodal"] = antipodal != 0;
    j["grids"] = std::move(rows);
    std::string text = j.dump(2);
    std::string table_text = table.str();
    emit(out, text);
    if (csv != nullptr) emit(csv, table_text);
  });
}

dirlab_status dirlab_directions_pps(const dirlab_pointset* set, char** out) {
  return guarded([&] {
    need(set, "point set");
    need(out, "out");
    auto r = dirlab::pps_check(set->set);
    json j;
    j["n"] = r.n;
    j["rank"] = r.rank;
    j["count"] = r.count;
    j["threshold"] = r.threshold;
    j["status"] = dirlab::pps_status_name(r.status);
    emit(out, j.dump(2));
  });
}

dirlab_status dirlab_directions_separate(const dirlab_pointset* set, double delta, char** out) {
  return guarded([&] {
    need(set, "point set");
    need(out, "out");
    auto census = dirlab::distinct_directions(set->set, true);
    auto sub = dirlab::separated_subset(census, delta);
    json keys = json::array();
    for (const auto& k : sub.keys) keys.push_back(k.to_string());
    json j;
    j["delta"] = sub.delta;
    j["directions"] = census.size();
    j["occupied_cells"] = sub.occupied_cells;
    j["colors"] = sub.colors;
    j["size"] = sub.keys.size();
    j["keys"] = std::move(keys);
    emit(out, j.dump(2));
  });
}

dirlab_status dirlab_measure_energy(const dirlab_pointset* set, const double* masses, double s,
                                    unsigned threads, double* out) {
  return guarded([&] {
    need(out, "out");
    *out = dirlab::energy_integral(weighted(set, masses), s, threads);
  });
}

dirlab_status dirlab_measure_adaptable(const dirlab_pointset* set, double s, double constant,
                                       unsigned threads, char** out) {
  return guarded([&] {
    need(set, "point set");
    need(out, "out");
    auto r = dirlab::is_adaptable(set->set, s, positive_or_default(constant), threads);
    json j;
    j["n"] = r.n;
    j["s"] = r.s;
    j["radius"] = r.radius;
    j["min_distance"] = r.min_distance;
    j["separated"] = r.separated;
    j["energy"] = num(r.energy);
    j["constant"] = r.constant;
    j["adaptable"] = r.pass;
    emit(out, j.dump(2));
  });
}

dirlab_status dirlab_measure_frostman(const dirlab_pointset* set, const double* masses, double s,
                                      int depth, double* out) {
  return guarded([&] {
    need(out, "out");
    *out = dirlab::frostman_constant(weighted(set, masses), s, depth);
  });
}

dirlab_status dirlab_measure_split(const dirlab_pointset* set, const double* masses, double c,
                                   int max_depth, char** out) {
  return guarded([&] {
    need(out, "out");
    auto split = dirlab::stopping_time_split(weighted(set, masses), positive_or_default(c), max_depth);
    emit(out, split_json(split).dump(2));
  });
}

dirlab_status dirlab_measure_nueps(const dirlab_pointset* set1, const double* masses1,
                                   const dirlab_pointset* set2, const double* masses2, double eps,
                                   double pitch, unsigned threads, char** out, char** csv) {
  return guarded([&] {
    need(out, "out");
    auto f = dirlab::nu_eps(weighted(set1, masses1), weighted(set2, masses2), eps, pitch, threads);
    json j;
    j["dimension"] = f.dimension;
    j["epsilon"] = f.epsilon;
    j["pitch"] = f.pitch;
    j["cells_per_axis"] = f.cells_per_axis;
    j["cells"] = f.values.size();
    j["integral"] = f.integral;
    j["overlap_integral"] = f.overlap_integral;
    j["product_path"] = f.product_path;
    std::string table_text;
    if (csv != nullptr) {
      std::ostringstream table;
      table.precision(17);
      for (int a = 1; a < f.dimension; ++a) table << 't' << a << ',';
      table << "value\n";
      for (std::size_t i = 0; i < f.values.size(); ++i) {
        for (double t : f.center(i)) table << t << ',';
        table << f.values[i] << '\n';
      }
      table_text = table.str();
    }
    emit(out, j.dump(2));
    if (csv != nullptr) emit(csv, table_text);
  });
}

dirlab_status dirlab_measure_bounds(const dirlab_pointset* set, const double* masses, double s,
                                    const double* eps, size_t n_eps, double c, int max_depth,
                                    unsigned threads, char** out) {
  return guarded([&] {
    need(eps, "eps");
    need(out, "out");
    auto r = dirlab::nu_integral_bounds(weighted(set, masses), s, std::span<const double>(eps, n_eps),
                                        positive_or_default(c), max_depth, threads);
    json j;
    j["split"] = split_json(r.split);
    j["axis_order"] = r.axis_order;
    j["signs"] = r.signs;
    j["chart_mass"] = r.chart_mass;
    j["predicted_exponent"] = r.predicted_exponent;
    j["epsilons"] = r.epsilons;
    j["pitches"] = r.pitches;
    j["integrals"] = r.integrals;
    j["normalized"] = r.normalized;
    j["overlap_normalized"] = r.overlap_normalized;
    j["limit"] = r.limit;
    if (r.deviation_fit) {
      j["deviation_fit"] = {{"slope", r.deviation_fit->slope},
                            {"intercept", r.deviation_fit->intercept},
                            {"rms_residual", r.deviation_fit->rms_residual},
                            {"points", r.deviation_fit->points}};
    } else {
      j["deviation_fit"] = nullptr;
    }
    j["band_constant"] = r.band_constant ? num(*r.band_constant) : json(nullptr);
    emit(out, j.dump(2));
  });
}

dirlab_status dirlab_experiment_run(const char* config_path, const char* out_dir, unsigned threads,
                                    uint64_t seed, int seed_given, int* all_pass, char** summary) {
  return guarded([&] {
    need(config_path, "config_path");
    auto config = dirlab::read_config_file(config_path);
    // Caller settings win over the config's globals.
    if (seed_given) config.globals.set("seed", std::to_string(seed));
    if (threads > 0) config.globals.set("threads", std::to_string(threads));
    dirlab::RunOptions options;
    std::optional<std::string> dir;
    if (out_dir != nullptr) dir = out_dir;
    auto result = dirlab::run_suite(config, options, dir);
    if (all_pass != nullptr) *all_pass = result.all_pass ? 1 : 0;
    if (summary != nullptr) {
      json reports = json::array();
      for (const auto& r : result.reports) reports.push_back(r.to_json());
      emit(summary, reports.dump(2));
    }
  });
}

}  // extern "C"

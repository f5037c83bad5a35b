#include <gtest/gtest.h>

#include <cmath>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "dirlab/dirlab.h"

using nlohmann::json;

namespace {

struct Set {
  dirlab_pointset* p = nullptr;
  ~Set() { dirlab_pointset_free(p); }
};

json take(char* s) {
  json j = json::parse(s);
  dirlab_string_free(s);
  return j;
}

}  // namespace

TEST(CApi, VersionAndStatusNames) {
  EXPECT_STREQ(dirlab_version(), "0.3.0");
  EXPECT_STREQ(dirlab_status_name(DIRLAB_OK), "Ok");
  EXPECT_STREQ(dirlab_status_name(DIRLAB_DEPTH_EXHAUSTED), "DepthExhausted");
  EXPECT_STREQ(dirlab_status_name(static_cast<dirlab_status>(99)), "Unknown");
}

TEST(CApi, ParseSerializeRoundTrip) {
  Set s;
  ASSERT_EQ(dirlab_pointset_parse("2 3 exact\n0 0\n1/2 1/3\n1 1\n", &s.p), DIRLAB_OK);
  EXPECT_EQ(dirlab_pointset_size(s.p), 3u);
  EXPECT_EQ(dirlab_pointset_dimension(s.p), 2);
  EXPECT_EQ(dirlab_pointset_is_exact(s.p), 1);
  std::vector<double> c(6);
  ASSERT_EQ(dirlab_pointset_coords(s.p, c.data(), c.size()), DIRLAB_OK);
  EXPECT_DOUBLE_EQ(c[3], 1.0 / 3.0);
  EXPECT_EQ(dirlab_pointset_coords(s.p, c.data(), 5), DIRLAB_INVALID_ARGUMENT);
  char* text = nullptr;
  ASSERT_EQ(dirlab_pointset_serialize(s.p, &text), DIRLAB_OK);
  Set back;
  ASSERT_EQ(dirlab_pointset_parse(text, &back.p), DIRLAB_OK);
  dirlab_string_free(text);
  EXPECT_EQ(dirlab_pointset_size(back.p), 3u);
}

TEST(CApi, ErrorsCarryMessages) {
  Set s;
  EXPECT_EQ(dirlab_pointset_parse("2 2 exact\n0 0\n", &s.p), DIRLAB_PARSE);
  EXPECT_GT(std::strlen(dirlab_last_error()), 0u);
  EXPECT_EQ(s.p, nullptr);
  EXPECT_EQ(dirlab_pointset_read("/nonexistent/points.txt", &s.p), DIRLAB_IO);
  EXPECT_EQ(dirlab_pointset_parse(nullptr, &s.p), DIRLAB_INVALID_ARGUMENT);
  Set g;
  EXPECT_EQ(dirlab_generate_cantor(2, 0.5, 2, &g.p), DIRLAB_PRECONDITION_FAILED);
  EXPECT_EQ(dirlab_generate_garnett(20, &g.p), DIRLAB_SIZE_LIMIT);
  ASSERT_EQ(dirlab_generate_lattice(2, 2, &g.p), DIRLAB_OK);
  EXPECT_STREQ(dirlab_last_error(), "");
  char* j = nullptr;
  EXPECT_EQ(dirlab_directions_pps(g.p, &j), DIRLAB_WRONG_DIMENSION);
  EXPECT_EQ(j, nullptr);
}

TEST(CApi, Generators) {
  Set a, b, c, d, e, f, g;
  ASSERT_EQ(dirlab_generate_lattice(3, 3, &a.p), DIRLAB_OK);
  EXPECT_EQ(dirlab_pointset_size(a.p), 64u);
  ASSERT_EQ(dirlab_generate_garnett(3, &b.p), DIRLAB_OK);
  EXPECT_EQ(dirlab_pointset_size(b.p), 64u);
  ASSERT_EQ(dirlab_generate_ifs(R"({"d":2,"maps":[{"ratio":"1/3","offset":["0","0"]},{"ratio":"1/3","offset":["2/3","2/3"]}]})",
                                3, &c.p),
            DIRLAB_OK);
  EXPECT_EQ(dirlab_pointset_size(c.p), 8u);
  ASSERT_EQ(dirlab_generate_hyperplane(3, 100, &d.p), DIRLAB_OK);
  EXPECT_EQ(dirlab_pointset_size(d.p), 100u);
  ASSERT_EQ(dirlab_generate_graph(2, 3, &e.p), DIRLAB_OK);
  ASSERT_EQ(dirlab_generate_cantor_preset(2, 3, 4, 1, &f.p), DIRLAB_OK);
  EXPECT_EQ(dirlab_pointset_size(f.p), 9u);
  ASSERT_EQ(dirlab_generate_cantor(2, 2.0, 2, &g.p), DIRLAB_OK);
  EXPECT_EQ(dirlab_pointset_size(g.p), 16u);
  Set bad;
  EXPECT_EQ(dirlab_generate_ifs("{not json", 1, &bad.p), DIRLAB_PARSE);
}

TEST(CApi, Directions) {
  Set s;
  ASSERT_EQ(dirlab_generate_lattice(2, 2, &s.p), DIRLAB_OK);
  size_t n = 0;
  ASSERT_EQ(dirlab_directions_count(s.p, 1, &n), DIRLAB_OK);
  EXPECT_EQ(n, 8u);
  char* out = nullptr;
  ASSERT_EQ(dirlab_directions_list(s.p, 1, &out), DIRLAB_OK);
  auto list = take(out);
  EXPECT_EQ(list["count"], 8);
  EXPECT_EQ(list["keys"].size(), 8u);
  double eps[2] = {0.5, 0.1};
  char* csv = nullptr;
  ASSERT_EQ(dirlab_directions_coverage(s.p, eps, 2, 1, 1, &out, &csv), DIRLAB_OK);
  auto cov = take(out);
  EXPECT_EQ(cov["grids"].size(), 2u);
  std::string table(csv);
  dirlab_string_free(csv);
  EXPECT_EQ(table.rfind("epsilon,cell,hits\n", 0), 0u);
  ASSERT_EQ(dirlab_directions_separate(s.p, 0.1, &out), DIRLAB_OK);
  auto sep = take(out);
  EXPECT_GE(sep["size"].get<int>() * sep["colors"].get<int>(), sep["occupied_cells"].get<int>());
  uint64_t prim = 0;
  ASSERT_EQ(dirlab_primitive_count(2, 2, &prim), DIRLAB_OK);
  EXPECT_EQ(prim, 5u);
}

TEST(CApi, Measures) {
  Set s;
  ASSERT_EQ(dirlab_pointset_parse("2 2 exact\n0 0\n1 0\n", &s.p), DIRLAB_OK);
  double e = 0;
  ASSERT_EQ(dirlab_measure_energy(s.p, nullptr, 1.0, 1, &e), DIRLAB_OK);
  EXPECT_DOUBLE_EQ(e, 0.5);
  double m[2] = {0.25, 0.75};
  ASSERT_EQ(dirlab_measure_energy(s.p, m, 1.0, 1, &e), DIRLAB_OK);
  EXPECT_DOUBLE_EQ(e, 2 * 0.25 * 0.75);
  double bad[2] = {0.5, 0.6};
  EXPECT_EQ(dirlab_measure_energy(s.p, bad, 1.0, 1, &e), DIRLAB_INVALID_ARGUMENT);
  char* out = nullptr;
  ASSERT_EQ(dirlab_measure_adaptable(s.p, 1.0, 1.0, 1, &out), DIRLAB_OK);
  auto ad = take(out);
  EXPECT_EQ(ad["adaptable"], true);

  Set two;
  ASSERT_EQ(dirlab_pointset_parse("2 2 exact\n1/10 1/10\n9/10 9/10\n", &two.p), DIRLAB_OK);
  ASSERT_EQ(dirlab_measure_split(two.p, nullptr, 0.3, 8, &out), DIRLAB_OK);
  auto sp = take(out);
  EXPECT_EQ(sp["level"], 1);
  EXPECT_EQ(sp["exact_mass1"], "1/2");
  Set one;
  ASSERT_EQ(dirlab_pointset_parse("2 1 exact\n1/3 1/5\n", &one.p), DIRLAB_OK);
  EXPECT_EQ(dirlab_measure_split(one.p, nullptr, 0.1, 4, &out), DIRLAB_DEPTH_EXHAUSTED);
  double f = 0;
  ASSERT_EQ(dirlab_measure_frostman(one.p, nullptr, 1.0, 3, &f), DIRLAB_OK);
  EXPECT_DOUBLE_EQ(f, 8.0);

  Set x, y;
  ASSERT_EQ(dirlab_pointset_parse("2 1 exact\n3/4 1\n", &x.p), DIRLAB_OK);
  ASSERT_EQ(dirlab_pointset_parse("2 1 exact\n0 0\n", &y.p), DIRLAB_OK);
  char* csv = nullptr;
  ASSERT_EQ(dirlab_measure_nueps(x.p, nullptr, y.p, nullptr, 0.125, 0.0625, 1, &out, &csv), DIRLAB_OK);
  auto nu = take(out);
  EXPECT_EQ(nu["cells"], 8);
  std::string table(csv);
  dirlab_string_free(csv);
  EXPECT_EQ(table.rfind("t1,value\n", 0), 0u);

  Set cantor;
  ASSERT_EQ(dirlab_generate_cantor_preset(2, 3, 4, 3, &cantor.p), DIRLAB_OK);
  double eps[3] = {0.125, 0.0625, 0.03125};
  ASSERT_EQ(dirlab_measure_bounds(cantor.p, nullptr, 2 * std::log(3.0) / std::log(4.0), eps, 3, 0, 8, 1, &out),
            DIRLAB_OK);
  auto bo = take(out);
  EXPECT_EQ(bo["normalized"].size(), 3u);
  EXPECT_EQ(bo["axis_order"].back(), bo["split"]["sep_coordinate"]);
}

TEST(CApi, ExperimentRun) {
  auto dir = std::filesystem::temp_directory_path() / "dirlab_capi_run";
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  const auto cfg = dir / "suite.cfg";
  std::ofstream(cfg) << "seed = 5\n[census]\nkind = census_oracle\nsets = 4\nn_max = 6\n";
  int all_pass = -1;
  char* summary = nullptr;
  const auto out = (dir / "out").string();
  ASSERT_EQ(dirlab_experiment_run(cfg.c_str(), out.c_str(), 1, 17, 1, &all_pass, &summary), DIRLAB_OK);
  EXPECT_EQ(all_pass, 1);
  auto reports = take(summary);
  ASSERT_EQ(reports.size(), 1u);
  EXPECT_EQ(reports[0]["parameters"]["seed"], 17);
  EXPECT_TRUE(std::filesystem::exists(dir / "out" / "summary.csv"));

  std::ofstream(cfg) << "[census]\nkind = census_oracle\nsets = four\n";
  EXPECT_EQ(dirlab_experiment_run(cfg.c_str(), nullptr, 1, 0, 0, &all_pass, nullptr), DIRLAB_PARSE);
  EXPECT_NE(std::string(dirlab_last_error()).find("sets"), std::string::npos);
  std::filesystem::remove_all(dir);
}

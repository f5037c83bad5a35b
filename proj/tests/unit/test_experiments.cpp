#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "dirlab/config.hpp"
#include "dirlab/error.hpp"
#include "dirlab/experiments.hpp"
#include "dirlab/fit.hpp"

using namespace dirlab;

namespace {

std::string parse_error(const std::string& text) {
  try {
    auto c = parse_config(text);
    for (const auto& s : c.sections) validate_section(s);
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::Parse);
    return e.what();
  }
  return "";
}

}  // namespace

TEST(Config, ParsesSectionsListsAndComments) {
  auto c = parse_config("# top\nseed = 7\n\n[a]\nkind = garnett_decay\ndepths = 2, 3 ,4\n  # indented comment\n"
                        "[b]\nkind = grid_coverage\nepsilons=0.05,0.02\nantipodal = false\n");
  EXPECT_EQ(c.globals.get_int("seed", 0), 7);
  ASSERT_EQ(c.sections.size(), 2u);
  EXPECT_EQ(c.sections[0].name(), "a");
  EXPECT_EQ(c.sections[0].get_int_list("depths", {}), (std::vector<long>{2, 3, 4}));
  EXPECT_EQ(c.sections[1].get_double_list("epsilons", {}), (std::vector<double>{0.05, 0.02}));
  EXPECT_FALSE(c.sections[1].get_bool("antipodal", true));
  EXPECT_EQ(c.sections[1].get_int("missing", 5), 5);
  EXPECT_EQ(c.sections[0].get_rational("r", Rational(1, 3)), Rational(1, 3));
}

TEST(Config, ErrorsNameLineAndKey) {
  auto e1 = parse_error("[a]\nkind = garnett_decay\ndepths = 2, x\n");
  EXPECT_NE(e1.find("line 3"), std::string::npos) << e1;
  EXPECT_NE(e1.find("depths"), std::string::npos) << e1;
  auto e2 = parse_error("[a]\nkind = garnett_decay\nbogus = 1\n");
  EXPECT_NE(e2.find("bogus"), std::string::npos) << e2;
  EXPECT_NE(e2.find("line 3"), std::string::npos) << e2;
  auto e3 = parse_error("[a]\nkind = garnett_decay\n[a]\nkind = garnett_decay\n");
  EXPECT_NE(e3.find("line 3"), std::string::npos) << e3;
  auto e4 = parse_error("[a]\nkind = x\nkind = y\n");
  EXPECT_NE(e4.find("kind"), std::string::npos) << e4;
  auto e5 = parse_error("[a\n");
  EXPECT_NE(e5.find("line 1"), std::string::npos) << e5;
  auto e6 = parse_error("[a]\njust words\n");
  EXPECT_NE(e6.find("line 2"), std::string::npos) << e6;
  auto e7 = parse_error("[a]\nkind = unknown_thing\n");
  EXPECT_NE(e7.find("unknown_thing"), std::string::npos) << e7;
  auto e8 = parse_error("[a]\ndepths = 2\n");
  EXPECT_NE(e8.find("kind"), std::string::npos) << e8;
}

TEST(Config, MissingFileIsIoError) {
  try {
    read_config_file("/nonexistent/dirlab.cfg");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::Io);
  }
}

TEST(Suite, EmptyConfigPasses) {
  auto r = run_suite(parse_config("# nothing\n"), RunOptions{});
  EXPECT_TRUE(r.reports.empty());
  EXPECT_TRUE(r.all_pass);
  EXPECT_EQ(r.summary_csv, "id,kind,verdict,status,value,target,tolerance\n");
}

TEST(Suite, UnknownGlobalKeyRejectedBeforeRunning) {
  EXPECT_THROW(run_suite(parse_config("colour = red\n[a]\nkind = garnett_decay\n"), RunOptions{}), Error);
}

TEST(Suite, DeterministicReportsAndFiles) {
  const std::string text =
      "seed = 99\n[census]\nkind = census_oracle\nsets = 10\nn_max = 8\n"
      "[scaling]\nkind = lattice_scaling\nd = 2\ns = 2\nq_list = 4, 8, 16\n";
  auto dir = std::filesystem::temp_directory_path() / "dirlab_suite_test";
  std::filesystem::remove_all(dir);
  auto a = run_suite(parse_config(text), RunOptions{}, dir.string());
  auto b = run_suite(parse_config(text), RunOptions{});
  ASSERT_EQ(a.reports.size(), 2u);
  for (std::size_t i = 0; i < a.reports.size(); ++i)
    EXPECT_EQ(a.reports[i].to_json(false).dump(), b.reports[i].to_json(false).dump());
  EXPECT_TRUE(std::filesystem::exists(dir / "census.json"));
  EXPECT_TRUE(std::filesystem::exists(dir / "scaling.json"));
  EXPECT_TRUE(std::filesystem::exists(dir / "scaling.csv"));
  std::ifstream summary(dir / "summary.csv");
  std::stringstream ss;
  ss << summary.rdbuf();
  EXPECT_EQ(ss.str(), a.summary_csv);
  auto parsed = nlohmann::json::parse(std::ifstream(dir / "census.json"));
  EXPECT_EQ(parsed["parameters"]["seed"], 99);
  EXPECT_TRUE(parsed.contains("timing"));
  std::filesystem::remove_all(dir);
}

TEST(Suite, SeedChangesRandomSuites) {
  const std::string text = "[census]\nkind = census_oracle\nsets = 5\nn_max = 8\n";
  RunOptions one, two;
  one.seed = 1;
  two.seed = 2;
  auto a = run_suite(parse_config(text), one);
  auto b = run_suite(parse_config(text), two);
  EXPECT_NE(a.reports[0].series.dump(), b.reports[0].series.dump());
}

TEST(Experiments, FailureIsRecordedNotThrown) {
  auto c = parse_config("[bad]\nkind = lattice_scaling\nq_list = 4, 8, 16\nd = 2\ns = 2\ntolerance = 0\n");
  auto r = run_suite(c, RunOptions{});
  ASSERT_EQ(r.reports.size(), 1u);
  EXPECT_FALSE(r.all_pass);
  EXPECT_NE(r.summary_csv.find("bad,lattice_scaling"), std::string::npos);
}

TEST(Experiments, EmptyQListIsAnError) {
  EXPECT_THROW(run_scaling_lattice(2, 2.0, {}), Error);
}

TEST(Experiments, LatticeVerdictRecomputable) {
  auto r = run_scaling_lattice(2, 2.0, {4, 8, 16, 32});
  const auto q = r.series["q"].get<std::vector<double>>();
  const auto count = r.series["occupied"].get<std::vector<double>>();
  auto fit = fit_loglog(q, count);
  ASSERT_TRUE(fit.has_value());
  const Verdict* v = r.verdict("lattice_scaling_exponent");
  ASSERT_NE(v, nullptr);
  EXPECT_DOUBLE_EQ(v->value, fit->slope);
  EXPECT_DOUBLE_EQ(v->target, 1.0);
  EXPECT_EQ(v->status == VerdictStatus::Pass, std::abs(fit->slope - 1.0) <= v->tolerance);
}

TEST(Experiments, GarnettSeriesShape) {
  auto r = run_garnett_decay({1, 2, 3});
  const auto frac = r.series["fraction"].get<std::vector<double>>();
  ASSERT_EQ(frac.size(), 3u);
  const auto dirs = r.series["directions"].get<std::vector<long>>();
  EXPECT_EQ(dirs[0], 4);
  ASSERT_NE(r.verdict("garnett_strictly_decreasing"), nullptr);
}

TEST(Experiments, AdaptableTwoPoints) {
  auto r = run_adaptable_directions("lattice", 2, 2.0, 1);
  EXPECT_FALSE(r.error.has_value());
  EXPECT_EQ(r.series["directions"].get<long>(), 4);
}

TEST(Experiments, EveryKindIsKnown) {
  auto kinds = experiment_kinds();
  for (const char* k : {"primitive_zeta", "pps_suite", "census_oracle", "hyperplane_coverage", "grid_coverage",
                        "lattice_scaling", "garnett_decay", "nu_bounds", "split_contract", "energy_contract",
                        "adaptable_directions"})
    EXPECT_NE(std::find(kinds.begin(), kinds.end(), k), kinds.end()) << k;
}

TEST(Fit, LineAndLogLog) {
  std::vector<double> x{1, 2, 3, 4}, y{3, 5, 7, 9};
  auto f = fit_line(x, y);
  ASSERT_TRUE(f);
  EXPECT_NEAR(f->slope, 2.0, 1e-12);
  EXPECT_NEAR(f->intercept, 1.0, 1e-12);
  EXPECT_NEAR(f->rms_residual, 0.0, 1e-12);
  std::vector<double> two{1, 2};
  EXPECT_FALSE(fit_line(two, two));
  std::vector<double> px{1, 2, 4, 8, 0}, py{3, 12, 48, 192, 5};
  auto g = fit_loglog(px, py);
  ASSERT_TRUE(g);
  EXPECT_EQ(g->points, 4u);
  EXPECT_NEAR(g->slope, 2.0, 1e-12);
  std::vector<double> same{2, 2, 2};
  EXPECT_FALSE(fit_line(same, x));
}

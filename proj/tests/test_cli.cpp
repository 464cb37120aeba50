#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <string>

#include "selfsim/app.hpp"
#include "support/fixtures.hpp"

using namespace selfsim;

namespace {

const std::string kData = SELFSIM_DATA_DIR;

std::string data(const std::string& name) { return kData + "/" + name; }

std::string error_of(const std::vector<std::string>& args) {
  try {
    parse_config(args);
  } catch (const InputError& e) {
    return e.what();
  }
  return {};
}

Json run_args(const std::vector<std::string>& args, int expected_exit = kExitOk) {
  const auto result = run(parse_config(args));
  EXPECT_EQ(result.exit_code, expected_exit);
  return result.report;
}

}  // namespace

TEST(ParseConfig, ValueSyntax) {
  EXPECT_EQ(parse_grid("0:1:5", "--q"), (std::vector<double>{0.0, 0.25, 0.5, 0.75, 1.0}));
  EXPECT_EQ(parse_window("6:12", "--levels").lo, 6);
  EXPECT_EQ(parse_window("6:12", "--levels").hi, 12);
  EXPECT_EQ(parse_list("0.1,0.2", "--x"), (std::vector<double>{0.1, 0.2}));
  const auto radii = parse_radii("2^-3:5", "--radii");
  EXPECT_EQ(radii, (std::vector<double>{0.125, 0.0625, 0.03125}));
  EXPECT_THROW(parse_grid("0:1", "--q"), InputError);
  EXPECT_THROW(parse_grid("0:1:1", "--q"), InputError);
  EXPECT_THROW(parse_grid("0:x:4", "--q"), InputError);
  EXPECT_THROW(parse_window("7:7", "--levels"), InputError);
  EXPECT_THROW(parse_radii("1^-2:4", "--radii"), InputError);
  EXPECT_THROW(parse_list("0.1,,2", "--x"), InputError);
}

TEST(ParseConfig, ErrorsNameTheProblem) {
  const auto missing = error_of({"tau", "--q", "0:1:11", "--levels", "6:12"});
  EXPECT_NE(missing.find("--ifs"), std::string::npos) << missing;
  const auto grid = error_of({"tau", "--ifs", data("cantor.json"), "--q", "1:0:5", "--levels", "6:12"});
  EXPECT_NE(grid.find("start < end required"), std::string::npos) << grid;
  EXPECT_NE(grid.find("--q"), std::string::npos) << grid;
  EXPECT_FALSE(error_of({"dim", "--ifs", data("cantor.json"), "--bogus", "1"}).empty());
  EXPECT_FALSE(error_of({"nonsense"}).empty());
  EXPECT_FALSE(error_of({}).empty());
  EXPECT_THROW(parse_config({"dim", "--help"}), HelpRequested);
}

TEST(ParseConfig, Defaults) {
  const auto cfg = parse_config({"verify-formalism", "--ifs", data("cantor.json")});
  EXPECT_EQ(cfg.q_grid.size(), 11u);
  EXPECT_EQ(cfg.q_grid.front(), 0.0);
  EXPECT_EQ(cfg.q_grid.back(), 1.0);
  EXPECT_EQ(cfg.window->lo, 6);
  EXPECT_EQ(cfg.window->hi, 12);
  EXPECT_EQ(parse_config({"verify-lemma", "--ifs", data("cantor.json")}).eps, 0.1);
  EXPECT_EQ(parse_config({"verify-lemma", "--ifs", data("cantor.json"), "--eps", "0.2"}).eps, 0.2);
  // Defaults of one command must not leak into another.
  const auto coarse = parse_config({"coarse", "--ifs", data("cantor.json"), "--h", "0:1:5", "--levels", "2:6"});
  EXPECT_EQ(coarse.eps, 0.05);
  EXPECT_TRUE(parse_config({"cascade", "--ifs", data("cantor.json")}).level_list.empty());
}

TEST(Run, DimEnvelope) {
  const auto report = run_args({"dim", "--ifs", data("cantor.json")});
  EXPECT_EQ(report["command"], "dim");
  ASSERT_TRUE(report.contains("inputs"));
  ASSERT_TRUE(report.contains("diagnostics"));
  EXPECT_NEAR(report["results"]["s"].get<double>(), 0.6309297536, 1e-10);
  EXPECT_EQ(report["results"]["p"], 2);
  const auto keys = std::vector<std::string>{"command", "inputs", "results", "diagnostics"};
  std::size_t k = 0;
  for (const auto& item : report.items()) {
    if (k < keys.size()) {
      EXPECT_EQ(item.key(), keys[k]);
    }
    ++k;
  }
}

TEST(Run, CutsetAndBlDist) {
  const auto cut = run_args({"cutset", "--ifs", data("mixed.json"), "--resolution", "0.25"});
  EXPECT_EQ(cut["results"]["size"], 3);
  EXPECT_NEAR(cut["results"]["partition_of_unity"].get<double>(), 1.0, 1e-12);

  const auto bl = run_args({"bl-dist", "--mu", data("two_diracs.csv"), "--nu", data("two_diracs.csv")});
  EXPECT_EQ(bl["results"]["distance"].get<double>(), 0.0);
}

TEST(Run, VerifyFormalismExitCodes) {
  const auto ok = run_args({"verify-formalism", "--ifs", data("cantor.json")});
  EXPECT_TRUE(ok["results"]["passed"].get<bool>());
  const auto tight =
      run_args({"verify-formalism", "--ifs", data("cantor.json"), "--levels", "2:4", "--tol", "1e-4"},
               kExitVerificationFailed);
  EXPECT_FALSE(tight["results"]["passed"].get<bool>());
}

TEST(Run, Deterministic) {
  const std::vector<std::string> args{"verify-lemma", "--ifs", data("cantor.json"), "--J", "6", "--n", "12",
                                      "--seed", "5"};
  EXPECT_EQ(run(parse_config(args)).report.dump(), run(parse_config(args)).report.dump());
}

TEST(Run, WritesMeasureFiles) {
  const auto dir = std::filesystem::temp_directory_path() / "selfsim_test_cli";
  std::filesystem::create_directories(dir);
  const auto csv = (dir / "typical.csv").string();
  run_args({"build-measure", "--ifs", data("cantor.json"), "--spec", data("typical.json"), "--seed", "3", "--out",
            csv});
  const auto mu = measure_from_csv(read_text_file(csv));
  EXPECT_NEAR(mu.total_mass(), 1.0, 1e-12);
  std::filesystem::remove_all(dir);
}

TEST(Serialize, MeasureRoundTrips) {
  DeterministicRng rng(8);
  for (std::size_t dim : {1u, 2u, 3u}) {
    const auto mu = fixtures::random_measure(rng, 25, dim);
    const auto via_csv = measure_from_csv(measure_to_csv(mu));
    const auto via_json = measure_from_json(parse_json(measure_to_json(mu).dump(), "measure"));
    EXPECT_EQ(via_csv.coords(), mu.coords());
    EXPECT_EQ(via_csv.masses(), mu.masses());
    EXPECT_EQ(via_json.coords(), mu.coords());
    EXPECT_EQ(via_json.masses(), mu.masses());
  }
  EXPECT_THROW(measure_from_csv("x1,mass\n0.5\n"), InputError);
  EXPECT_THROW(measure_from_csv("x1,mass\n0.5,-1\n"), InputError);
}

TEST(Serialize, FormatDoubleRoundTrips) {
  DeterministicRng rng(9);
  for (int k = 0; k < 1000; ++k) {
    const double v = rng.uniform(-10.0, 10.0);
    EXPECT_EQ(std::stod(format_double(v)), v);
  }
  EXPECT_EQ(format_double(0.5), "0.5");
}

TEST(Serialize, IfsLoader) {
  const auto ifs = load_ifs(data("sierpinski.json"));
  EXPECT_EQ(ifs.size(), 3u);
  EXPECT_EQ(ifs.dimension(), 2u);
  const auto back = ifs_from_json(ifs_to_json(ifs));
  EXPECT_EQ(back.ratios(), ifs.ratios());

  EXPECT_THROW(ifs_from_json(parse_json(R"({"dimension":1,"maps":[{"ratio":0.5,"translation":[0]}],"extra":1})",
                                        "ifs")),
               InputError);
  EXPECT_THROW(ifs_from_json(parse_json(
                   R"({"dimension":2,"maps":[{"ratio":0.5,"matrix":[[1,0.2],[0,1]],"translation":[0,0]}]})", "ifs")),
               InputError);
  EXPECT_THROW(ifs_from_json(parse_json(R"({"dimension":1,"maps":[{"ratio":1.0,"translation":[0]}]})", "ifs")),
               InputError);
  EXPECT_THROW(parse_json("{", "ifs"), InputError);
  EXPECT_THROW(load_ifs(data("does_not_exist.json")), InputError);
}

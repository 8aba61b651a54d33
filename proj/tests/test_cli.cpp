#include <catch2/catch_amalgamated.hpp>

#include <filesystem>
#include <string>

#include "lsmap/config.hpp"
#include "lsmap/io.hpp"
#include "test_support.hpp"

using namespace lsmap;
namespace fs = std::filesystem;

namespace {

const std::string kCli = LSM_CLI_PATH;

std::string desk_config_text() {
  return R"(# desk-scale scenario
[scene]
width = 200
length = 200
uav_height = 129
bs_x = 100
bs_y = 100
bs_antenna_height = 15
grid_step = 4

[urban]
density_per_km2 = 75
side_min = 10
side_max = 25

[grid]
directions = 36
radial_step = 4

[baseline]
resample_step = 4

[sampling]
strategy = circular
ring_step = 40
delta_phi = 0.17453292519943295

[experiment]
n_maps = 1
n_monte_carlo = 2
sweep = none
sweep_values = 0
seed = 9
)";
}

}  // namespace

TEST_CASE("config parsing") {
  SECTION("values land in the right places") {
    const ExperimentConfig cfg = parse_config_string(desk_config_text(), "<test>");
    CHECK(cfg.scene.width == 200.0);
    CHECK(cfg.scene.bs_position.x == 100.0);
    CHECK(cfg.grid_directions == 36);
    CHECK(cfg.n_monte_carlo == 2);
    CHECK(cfg.master_seed == 9);
    CHECK(cfg.methods.size() == 4);
  }
  SECTION("defaults reproduce the stock scenario") {
    const ExperimentConfig cfg = parse_config_string("", "<empty>");
    CHECK(cfg.scene.width == 800.0);
    CHECK(cfg.scene.bs_position.x == 400.0);
    CHECK(cfg.channel.beta_los == -56.9431);
    CHECK(cfg.prior.d == 24.3);
    CHECK(cfg.n_maps == 5);
  }
  SECTION("unknown keys are named") {
    try {
      parse_config_string("[scene]\nwdith = 800\n", "<typo>");
      FAIL("expected config_error");
    } catch (const config_error& e) {
      CHECK(std::string(e.what()).find("scene.wdith") != std::string::npos);
    }
  }
  SECTION("bad values are named") {
    try {
      parse_config_string("[scene]\nwidth = banana\n", "<bad>");
      FAIL("expected config_error");
    } catch (const config_error& e) {
      CHECK(std::string(e.what()).find("scene.width") != std::string::npos);
    }
  }
  SECTION("unknown methods and sweeps are rejected") {
    CHECK_THROWS_AS(parse_config_string("[experiment]\nmethods = kriging\n", "<m>"), config_error);
    CHECK_THROWS_AS(parse_config_string("[experiment]\nsweep = altitude\n", "<s>"),
                    std::invalid_argument);
  }
}

TEST_CASE("cli end to end") {
  const std::string dir = testsupport::make_temp_dir("cli");
  const std::string cfg_path = dir + "/desk.cfg";
  write_text_file(cfg_path, desk_config_text());

  SECTION("gen-env, sample, build, eval pipeline") {
    std::string out;
    int rc = testsupport::run_command(
        kCli + " gen-env --config " + cfg_path + " --out " + dir, &out);
    REQUIRE(rc == 0);
    REQUIRE(fs::exists(dir + "/buildings.txt"));
    REQUIRE(fs::exists(dir + "/truth.csv"));
    REQUIRE(fs::exists(dir + "/truth.pgm"));

    // the written artifacts parse back to the library-generated values
    const ExperimentConfig cfg = load_config(cfg_path);
    const UrbanMap expected =
        generate_urban_map(cfg.scene, cfg.urban, derive_seed(cfg.master_seed, {1, 0}));
    const UrbanMap parsed = read_buildings(dir + "/buildings.txt");
    REQUIRE(parsed.buildings.size() == expected.buildings.size());
    for (std::size_t i = 0; i < parsed.buildings.size(); ++i)
      CHECK(parsed.buildings[i].x_min == expected.buildings[i].x_min);
    const TruthGrid truth = read_truth_csv(dir + "/truth.csv");
    const TruthGrid truth_expected = ground_truth_lsm(expected, cfg.scene);
    CHECK(truth.values == truth_expected.values);

    rc = testsupport::run_command(kCli + " sample --config " + cfg_path + " --env " + dir +
                                      "/buildings.txt --out " + dir, &out);
    REQUIRE(rc == 0);
    const auto measurements = read_measurements_csv(dir + "/measurements.csv");
    CHECK(!measurements.empty());

    rc = testsupport::run_command(kCli + " build --config " + cfg_path + " --measurements " + dir +
                                      "/measurements.csv --method proposed --out " + dir, &out);
    REQUIRE(rc == 0);
    REQUIRE(fs::exists(dir + "/map_proposed.csv"));
    REQUIRE(fs::exists(dir + "/map_proposed.pgm"));

    rc = testsupport::run_command(kCli + " eval --truth " + dir + "/truth.csv --map " + dir +
                                      "/map_proposed.csv", &out);
    REQUIRE(rc == 0);
    const double reported = std::stod(out);
    CHECK(reported >= 0.0);
    CHECK(reported <= 1.0);
  }

  SECTION("eval of identical rasters prints six zero decimals") {
    std::string out;
    int rc = testsupport::run_command(kCli + " gen-env --config " + cfg_path + " --out " + dir, &out);
    REQUIRE(rc == 0);
    rc = testsupport::run_command(
        kCli + " eval --truth " + dir + "/truth.csv --map " + dir + "/truth.csv", &out);
    REQUIRE(rc == 0);
    CHECK(out == "0.000000\n");
  }

  SECTION("build with the prior method and no measurements equals the prior map") {
    write_text_file(dir + "/none.csv", "n,x,y,z_dB\n");
    std::string out;
    const int rc = testsupport::run_command(kCli + " build --config " + cfg_path +
                                                " --measurements " + dir +
                                                "/none.csv --method prior --out " + dir, &out);
    REQUIRE(rc == 0);
    const ExperimentConfig cfg = load_config(cfg_path);
    const ProbabilityGrid got = read_probability_csv(dir + "/map_prior.csv");
    const ProbabilityGrid expected = prior_map(
        cfg.scene, [&](Vec2 x) { return prior_los_probability(x, cfg.prior, cfg.scene); });
    CHECK(got.values == expected.values);
  }

  SECTION("experiment writes the expected row count") {
    std::string out;
    const std::string exp_dir = dir + "/exp";
    const int rc = testsupport::run_command(
        kCli + " experiment --config " + cfg_path + " --out " + exp_dir, &out);
    REQUIRE(rc == 0);
    const std::string csv = read_text_file(exp_dir + "/metrics.csv");
    std::size_t lines = 0;
    for (char c : csv)
      if (c == '\n') ++lines;
    // header + n_maps * n_monte_carlo * |sweep| * methods = 1 + 1*2*1*4
    CHECK(lines == 9);
    REQUIRE(fs::exists(exp_dir + "/summary.json"));
  }

  SECTION("usage and i/o failures use distinct exit codes") {
    std::string out;
    CHECK(testsupport::run_command(kCli + " build --config " + cfg_path +
                                       " --measurements /nonexistent.csv --method warp --out " +
                                       dir, &out) == 1);
    write_text_file(dir + "/none.csv", "n,x,y,z_dB\n");
    CHECK(testsupport::run_command(kCli + " build --config " + cfg_path +
                                       " --measurements /nonexistent.csv --method prior --out " +
                                       dir, &out) == 2);
    CHECK(testsupport::run_command(kCli + " eval --truth /nope.csv --map /nope.csv", &out) == 2);
    CHECK(testsupport::run_command(kCli + " frobnicate", &out) == 1);
    CHECK(testsupport::run_command(kCli, &out) == 1);
  }
}

#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <numbers>

#include "lsmap/channel.hpp"
#include "lsmap/env.hpp"

using namespace lsmap;
using Catch::Approx;

namespace {

SceneConfig paper_scene() {
  SceneConfig s;
  s.width = 800.0;
  s.length = 800.0;
  s.uav_height = 129.0;
  s.bs_position = {400.0, 400.0};
  s.bs_antenna_height = 15.0;
  s.grid_step = 1.0;
  return s;
}

}  // namespace

TEST_CASE("elevation angle") {
  const SceneConfig scene = paper_scene();
  CHECK(elevation_angle_deg(scene.bs_position, scene) == 90.0);
  CHECK(elevation_angle_deg({400.0 + 129.0, 400.0}, scene) == Approx(45.0).margin(1e-12));
  const double expected = std::atan(129.0 / 400.0) * 180.0 / std::numbers::pi;
  CHECK(elevation_angle_deg({800.0, 400.0}, scene) == Approx(expected).margin(1e-12));
  CHECK(expected == Approx(17.8745).margin(1e-3));
}

TEST_CASE("empirical prior curve") {
  const SceneConfig scene = paper_scene();
  const PriorModelParams p;  // a=120, b=c=0, d=24.3, e=1.229

  SECTION("zero-elevation limit clamps at epsilon") {
    CHECK(prior_los_probability({400.0 + 1e9, 400.0}, p, scene) == kProbEpsilon);
  }
  SECTION("45 degrees") {
    const double direct = (p.a - (p.a - p.b) / (1.0 + std::pow(45.0 / p.d, p.e))) / 100.0;
    const double got = prior_los_probability({400.0 + 129.0, 400.0}, p, scene);
    CHECK(got == Approx(direct).margin(1e-12));
    CHECK(got == Approx(0.8169).margin(5e-4));
  }
  SECTION("zenith stays below the upper clamp") {
    const double got = prior_los_probability(scene.bs_position, p, scene);
    CHECK(got == Approx(0.99996).margin(1e-4));
    CHECK(got < 1.0);
  }
  SECTION("monotone non-decreasing in elevation") {
    double prev = 0.0;
    for (double r = 790.0; r >= 1.0; r -= 7.0) {
      const double v = prior_los_probability({400.0 + r, 400.0}, p, scene);
      CHECK(v >= prev);
      prev = v;
    }
  }
  SECTION("elevation at or below c with non-integer exponent is a domain error") {
    PriorModelParams bad = p;
    bad.c = 30.0;  // elevation 17.9 deg < c at the far corner
    CHECK_THROWS_AS(prior_los_probability({800.0, 400.0}, bad, scene), std::domain_error);
  }
}

TEST_CASE("mean gain") {
  const ChannelParams ch;
  SECTION("one meter gives the offset") {
    CHECK(mean_gain_at_distance_db(1.0, 1, ch) == Approx(ch.beta_los).margin(1e-12));
    CHECK(mean_gain_at_distance_db(1.0, 0, ch) == Approx(ch.beta_nlos).margin(1e-12));
  }
  SECTION("LoS at 100 m") {
    CHECK(mean_gain_at_distance_db(100.0, 1, ch) == Approx(-100.9431).margin(1e-9));
  }
  SECTION("zero distance is a domain error") {
    CHECK_THROWS_AS(mean_gain_at_distance_db(0.0, 1, ch), std::domain_error);
  }
  SECTION("3D link distance from the antenna") {
    const SceneConfig scene = paper_scene();
    CHECK(link_distance(scene.bs_position, scene) == Approx(114.0).margin(1e-12));
    CHECK(link_distance({400.0 + 30.0, 400.0}, scene) ==
          Approx(std::sqrt(30.0 * 30.0 + 114.0 * 114.0)).margin(1e-12));
  }
}

TEST_CASE("stock parameters reproduce the UMa-AV formulas") {
  const ChannelParams table;  // defaults
  const ChannelParams formula = uma_av_params(28.0, 129.0);
  CHECK(formula.beta_los == Approx(table.beta_los).margin(1e-3));
  CHECK(formula.beta_nlos == Approx(table.beta_nlos).margin(1e-3));
  CHECK(formula.alpha_los == Approx(table.alpha_los).margin(1e-12));
  // the stock NLoS exponent is the formula value printed at two decimals
  CHECK(formula.alpha_nlos == Approx(table.alpha_nlos).margin(5e-3));
}

TEST_CASE("likelihood density") {
  const SceneConfig scene = paper_scene();
  const ChannelParams ch;
  const Vec2 x{400.0 + 164.0, 400.0};

  SECTION("peak value") {
    const double mu = mean_gain_db(x, 1, ch, scene);
    const double v = ch.sigma2_noise + ch.sigma2_los;
    CHECK(likelihood(mu, x, 1, ch, scene) ==
          Approx(1.0 / std::sqrt(2.0 * std::numbers::pi * v)).margin(1e-12));
  }
  SECTION("symmetry about the mean") {
    const double mu = mean_gain_db(x, 0, ch, scene);
    CHECK(likelihood(mu + 3.7, x, 0, ch, scene) ==
          Approx(likelihood(mu - 3.7, x, 0, ch, scene)).margin(1e-15));
  }
  SECTION("worked value at two dB from the mean") {
    const double mu = mean_gain_db(x, 1, ch, scene);
    CHECK(likelihood(mu + 2.0, x, 1, ch, scene) == Approx(0.12097358658636984).margin(1e-9));
  }
  SECTION("densities integrate to one") {
    for (int cls : {0, 1}) {
      const double mu = mean_gain_db(x, cls, ch, scene);
      const double sd = std::sqrt(ch.sigma2_noise + ch.sigma2(cls));
      const int n = 20000;
      const double lo = mu - 10.0 * sd, hi = mu + 10.0 * sd;
      double acc = 0.0;
      for (int i = 0; i <= n; ++i) {
        const double z = lo + (hi - lo) * i / n;
        const double w = (i == 0 || i == n) ? 0.5 : 1.0;
        acc += w * likelihood(z, x, cls, ch, scene);
      }
      acc *= (hi - lo) / n;
      CHECK(acc == Approx(1.0).margin(1e-6));
    }
  }
  SECTION("zero total variance degenerates") {
    ChannelParams flat = ch;
    flat.sigma2_los = 0.0;
    flat.sigma2_noise = 0.0;
    CHECK_THROWS_AS(likelihood(-100.0, x, 1, flat, scene), std::domain_error);
  }
}

TEST_CASE("measurement synthesis") {
  const SceneConfig scene = paper_scene();
  UrbanMap empty;
  SceneConfig coarse = scene;
  coarse.grid_step = 8.0;
  const TruthGrid truth = ground_truth_lsm(empty, coarse);
  const Vec2 x{520.0, 400.0};

  SECTION("noiseless case returns the mean exactly") {
    ChannelParams quiet;
    quiet.sigma2_los = 0.0;
    quiet.sigma2_nlos = 0.0;
    quiet.sigma2_noise = 0.0;
    RngEngine rng = make_engine(1);
    const Measurement m = sample_measurement(x, truth, quiet, coarse, rng);
    CHECK(m.z == mean_gain_db(x, 1, quiet, coarse));
  }
  SECTION("identical rng seed gives identical draws") {
    const ChannelParams ch;
    RngEngine a = make_engine(99), b = make_engine(99);
    CHECK(sample_measurement(x, truth, ch, coarse, a).z ==
          sample_measurement(x, truth, ch, coarse, b).z);
  }
  SECTION("law of large numbers at a LoS location") {
    const ChannelParams ch;
    RngEngine rng = make_engine(7);
    const double mu = mean_gain_db(x, 1, ch, coarse);
    double acc = 0.0;
    const int n = 10000;
    for (int i = 0; i < n; ++i) acc += sample_measurement(x, truth, ch, coarse, rng).z;
    const double sd = std::sqrt(ch.sigma2_los);
    CHECK(std::abs(acc / n - mu) < 3.0 * sd / 100.0);
  }
  SECTION("out-of-raster location") {
    const ChannelParams ch;
    RngEngine rng = make_engine(1);
    CHECK_THROWS_AS(sample_measurement({-1.0, 10.0, }, truth, ch, coarse, rng),
                    std::out_of_range);
  }
}

TEST_CASE("single-measurement posterior") {
  const SceneConfig scene = paper_scene();
  const Vec2 x{400.0 + 164.0, 400.0};

  SECTION("equal likelihoods return the prior") {
    ChannelParams eq;  // equal variances so the midpoint is uninformative
    eq.sigma2_los = 4.0;
    eq.sigma2_nlos = 4.0;
    const double mid =
        0.5 * (mean_gain_db(x, 1, eq, scene) + mean_gain_db(x, 0, eq, scene));
    for (double prior : {0.2, 0.5, 0.8})
      CHECK(posterior_at_measurement(mid, x, prior, eq, scene) == Approx(prior).margin(1e-12));
  }
  SECTION("odds form against directly evaluated densities") {
    const ChannelParams ch;
    for (double z : {-95.0, -105.0, -118.0}) {
      const double p1 = likelihood(z, x, 1, ch, scene);
      const double p0 = likelihood(z, x, 0, ch, scene);
      const double expected = p1 * 0.5 / (p1 * 0.5 + p0 * 0.5);
      CHECK(posterior_at_measurement(z, x, 0.5, ch, scene) == Approx(expected).margin(1e-12));
    }
  }
  SECTION("prior 0.5 with likelihood ratio two gives two thirds") {
    ChannelParams eq;
    eq.sigma2_los = 4.0;
    eq.sigma2_nlos = 4.0;
    const double mu1 = mean_gain_db(x, 1, eq, scene);
    const double mu0 = mean_gain_db(x, 0, eq, scene);
    // z with p1/p0 = 2: (z-mu0)^2 - (z-mu1)^2 = 2 v ln 2
    const double v = 4.0;
    const double z = (2.0 * v * std::log(2.0) + mu1 * mu1 - mu0 * mu0) / (2.0 * (mu1 - mu0));
    CHECK(posterior_at_measurement(z, x, 0.5, eq, scene) == Approx(2.0 / 3.0).margin(1e-12));
  }
  SECTION("quadrature Bayes oracle at z = mu1, 200 m link") {
    const ChannelParams ch;
    const double r = std::sqrt(200.0 * 200.0 - 114.0 * 114.0);
    const Vec2 loc{400.0 + r, 400.0};
    REQUIRE(link_distance(loc, scene) == Approx(200.0).margin(1e-9));
    const double z = mean_gain_db(loc, 1, ch, scene);
    // integrate numerator and denominator over a narrow bin around z
    const double h = 1e-5;
    const int nodes = 200;
    double num = 0.0, den = 0.0;
    for (int i = 0; i <= nodes; ++i) {
      const double zz = z - h + 2.0 * h * i / nodes;
      const double w = (i == 0 || i == nodes) ? 0.5 : 1.0;
      const double f1 = likelihood(zz, loc, 1, ch, scene) * 0.5;
      const double f0 = likelihood(zz, loc, 0, ch, scene) * 0.5;
      num += w * f1;
      den += w * (f1 + f0);
    }
    CHECK(posterior_at_measurement(z, loc, 0.5, ch, scene) == Approx(num / den).margin(1e-9));
  }
  SECTION("monotone in z under equal variances") {
    ChannelParams eq;
    eq.sigma2_los = 5.0;
    eq.sigma2_nlos = 5.0;
    double prev = 0.0;
    for (double z = -140.0; z <= -80.0; z += 2.5) {
      const double p = posterior_at_measurement(z, x, 0.4, eq, scene);
      CHECK(p >= prev);
      prev = p;
    }
  }
  SECTION("extreme observations never produce NaN") {
    const ChannelParams ch;
    const double lo = posterior_at_measurement(-1000.0, x, 0.5, ch, scene);
    const double hi = posterior_at_measurement(500.0, x, 0.5, ch, scene);
    CHECK(std::isfinite(lo));
    CHECK(std::isfinite(hi));
    CHECK(lo >= kProbEpsilon);
    CHECK(hi <= 1.0 - kProbEpsilon);
  }
}

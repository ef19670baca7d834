#include <catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "nfield/errors.hpp"
#include "nfield/model.hpp"

using namespace nfield;
using Catch::Approx;

TEST_CASE("firing rate basics", "[model]") {
  CHECK(firing_rate(0.0, 4.0) == 0.0);
  CHECK(firing_rate(50.0, 4.0) == Approx(0.5));
  CHECK(firing_rate(0.3, 4.0) == Approx(1.0 / (1.0 + std::exp(-1.2)) - 0.5).epsilon(1e-14));

  std::mt19937 rng(3);
  std::uniform_real_distribution<double> u(-5.0, 5.0);
  for (int i = 0; i < 200; ++i) {
    const double x = u(rng);
    CHECK(firing_rate(-x, 4.0) == -firing_rate(x, 4.0));
  }
}

TEST_CASE("firing rate derivatives at the origin match finite differences", "[model]") {
  const double gamma = 4.0;
  const double h1 = 1e-5;
  const double d1 = (firing_rate(h1, gamma) - firing_rate(-h1, gamma)) / (2 * h1);
  CHECK(firing_rate_d1(gamma) == 1.0);
  CHECK(std::abs(d1 - firing_rate_d1(gamma)) <= 1e-8);

  const double h3 = 1e-3;
  const double d3 = (firing_rate(2 * h3, gamma) - 2 * firing_rate(h3, gamma) + 2 * firing_rate(-h3, gamma) -
                     firing_rate(-2 * h3, gamma)) /
                    (2 * h3 * h3 * h3);
  CHECK(firing_rate_d3(gamma) == -8.0);
  CHECK(std::abs(d3 - firing_rate_d3(gamma)) <= 1e-4);
  CHECK(firing_rate_d2(gamma) == 0.0);
}

TEST_CASE("kernel evaluation", "[model]") {
  const ModelParams p = reference_params(-3.27);
  CHECK(kernel_eval({0.2, -0.4}, {0.2, -0.4}, p) == cplx(-3.27, 0.0));
  CHECK(kernel_eval({1.0, 0.0}, {0.0, 0.0}, p).real() == Approx(-3.27 * std::exp(-2.0)).epsilon(1e-14));

  std::mt19937 rng(11);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  ModelParams two = p;
  two.terms.push_back({cplx(0.7, 0.0), cplx(0.4, 0.0)});
  for (int i = 0; i < 1000; ++i) {
    const Point2 r{u(rng), u(rng)}, s{u(rng), u(rng)};
    REQUIRE(kernel_eval(r, s, two) == kernel_eval(s, r, two));
  }
}

TEST_CASE("delay evaluation", "[model]") {
  const ModelParams p = reference_params();
  CHECK(delay_eval({0.3, 0.3}, {0.3, 0.3}, p) == 1.0);
  CHECK(delay_eval({-1.0, -1.0}, {1.0, 1.0}, p) == 5.0);
  CHECK(p.tau_max() == 5.0);

  std::mt19937 rng(5);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int i = 0; i < 500; ++i) {
    const Point2 r{u(rng), u(rng)}, s{u(rng), u(rng)};
    const double d = delay_eval(r, s, p);
    CHECK(d >= p.tau0);
    CHECK(d <= p.tau_max());
    CHECK(d == delay_eval(s, r, p));
  }
}

TEST_CASE("parameter validation", "[model]") {
  ModelParams p = reference_params();
  REQUIRE_NOTHROW(p.validate());

  ModelParams bad = p;
  bad.alpha = 0.0;
  CHECK_THROWS_AS(bad.validate(), ConfigError);
  bad = p;
  bad.b = -1.0;
  CHECK_THROWS_AS(bad.validate(), ConfigError);
  bad = p;
  bad.terms.clear();
  CHECK_THROWS_AS(bad.validate(), ConfigError);

  // A lone complex term gives a complex kernel; a conjugate pair does not.
  ModelParams cx = p;
  cx.terms = {{cplx(1.0, 0.5), cplx(1.0, 0.3)}};
  CHECK_THROWS_AS(cx.validate(), ConfigError);
  cx.terms.push_back({cplx(1.0, -0.5), cplx(1.0, -0.3)});
  CHECK_NOTHROW(cx.validate());
}

TEST_CASE("model JSON round trip", "[model]") {
  ModelParams p = reference_params(-3.27);
  p.terms.push_back({cplx(0.5, 0.0), cplx(0.25, 0.0)});
  const nlohmann::json j = p;
  CHECK(j.at("terms").at(0).at("c_hat").at(0).get<double>() == -3.27);
  CHECK(j.get<ModelParams>() == p);

  auto text = nlohmann::json::parse(R"({"alpha":1,"tau0":1,"gamma":4,"a":1,"b":1,
                                        "terms":[{"c_hat":-3.27,"xi":[2,0]}]})");
  CHECK(text.get<ModelParams>() == reference_params(-3.27));

  text.erase("gamma");
  CHECK_THROWS_AS(text.get<ModelParams>(), ConfigError);
}

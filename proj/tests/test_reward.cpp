#include <doctest.h>

#include <cmath>

#include "contsim/env.hpp"
#include "contsim/reward.hpp"
#include "support.hpp"

using namespace contsim;

namespace {

ContainerParams single_peak(double center = 35.0, double width = 2.0) {
  ContainerParams p;
  p.name = "C";
  p.product_size = 5.0;
  p.actuation_time = 120.0;
  p.time_per_product = 40.0;
  p.optima = {{center, 1.0, width}};
  return p;
}

EnvConfig two_container_cfg() {
  EnvConfig cfg = testing::single_container(0.5, 60.0);
  cfg.containers.push_back(cfg.containers.front());
  cfg.containers.push_back(cfg.containers.front());
  cfg.pu_count = 1;
  return cfg;
}

}  // namespace

TEST_CASE("emptying_reward examples") {
  const auto p = single_peak();
  CHECK(emptying_reward(35.0, p, -0.1) == 1.0);
  // -0.1 + 1.1 exp(-0.5), evaluated by hand.
  CHECK(emptying_reward(37.0, p, -0.1) == doctest::Approx(0.5671837256838969).epsilon(1e-15));
  CHECK(emptying_reward(5.0, p, -0.1) == doctest::Approx(-0.1).epsilon(1e-15));
  CHECK(emptying_reward_excess(5.0, p, -0.1) > 0.0);
  CHECK(emptying_reward_excess(5.0, p, -0.1) < 1e-48);
}

TEST_CASE("single-peak emptying reward is symmetric about its center") {
  const auto p = single_peak(25.0, 1.5);
  for (double d = 0.0; d < 10.0; d += 0.173) {
    CHECK(emptying_reward(25.0 + d, p, -0.1) == emptying_reward(25.0 - d, p, -0.1));
  }
}

TEST_CASE("shipped configs: emptying reward in (r_pen, 1] and peaked at the ideal optimum") {
  for (const auto& [name, cfg] : testing::shipped_configs()) {
    CAPTURE(name);
    for (const ContainerParams& c : cfg.containers) {
      double best = -1e300, best_at = 0.0;
      for (int k = 1; k < 4000; ++k) {
        const double v = k * 0.01;
        const double r = emptying_reward(v, c, cfg.reward_penalty);
        CHECK(emptying_reward_excess(v, c, cfg.reward_penalty) > 0.0);
        CHECK(r >= cfg.reward_penalty);
        CHECK(r <= 1.0 + 1e-9);
        if (r > best) {
          best = r;
          best_at = v;
        }
      }
      CHECK(std::fabs(best_at - c.ideal().volume) < 0.01);
    }
  }
}

TEST_CASE("reward case analysis") {
  const EnvConfig cfg = two_container_cfg();
  State s{{10.0, 20.0, 35.0}, {0.0}, 0};
  State calm{{10.5, 20.5, 35.5}, {0.0}, 1};
  State spilled{{10.5, 41.0, 35.5}, {0.0}, 1};

  SUBCASE("do-nothing without overflow is 0") {
    CHECK(reward(s, Action::do_nothing(), calm, cfg, false, std::nullopt) == 0.0);
  }
  SUBCASE("busy PUs give r_pen") {
    CHECK(reward(s, Action::empty(3), calm, cfg, false, std::nullopt) == -0.1);
  }
  SUBCASE("emptying an already empty container gives r_pen") {
    CHECK(reward(s, Action::empty(1), calm, cfg, true, 0.0) == -0.1);
  }
  SUBCASE("overflow gives r_min and dominates") {
    CHECK(reward(s, Action::do_nothing(), spilled, cfg, false, std::nullopt) == -1.0);
    CHECK(reward(s, Action::empty(3), spilled, cfg, true, 35.0) == -1.0);
  }
  SUBCASE("overflow check is inclusive at v_max") {
    State edge{{10.5, 40.0, 35.5}, {0.0}, 1};
    CHECK(reward(s, Action::do_nothing(), edge, cfg, false, std::nullopt) == -1.0);
  }
  SUBCASE("successful emptying uses the pre-emptying volume") {
    CHECK(reward(s, Action::empty(3), calm, cfg, true, 35.0) == 1.0);
    CHECK(reward(s, Action::empty(3), calm, cfg, true, 37.0) ==
          doctest::Approx(0.5671837256838969).epsilon(1e-15));
  }
}

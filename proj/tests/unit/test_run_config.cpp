#include "modesift/error.hpp"
#include "modesift/run_config.hpp"
#include "scratch.hpp"

#include <doctest.h>

using namespace modesift;

TEST_CASE("json round trip") {
  RunConfig c;
  c.subcommand = "evaluate";
  c.inputs = {"a.msq", "b dir"};
  c.seed = 99;
  c.strategy = "ss";
  c.percent = 45.0;
  c.gamma_count = 17;
  c.gamma_scale = 1.0;
  c.admm.rho = 2.5;
  c.radii = {2, 2, 4};
  c.normalize_histograms = true;
  c.protocol = "lovo";
  c.svm_g = 0.125;
  const RunConfig back = run_config_from_json(to_json(c));
  CHECK(back == c);
  CHECK(back.inputs == c.inputs);
  CHECK(back.radii == c.radii);
  CHECK(to_json(back) == to_json(c));

  const auto dir = testutil::scratch("run_config");
  save_run_config(c, dir / "r.json");
  CHECK(load_run_config(dir / "r.json") == c);
}

TEST_CASE("partial documents keep defaults") {
  const RunConfig c = run_config_from_json(R"({"seed": 3, "dmdsp": {"gamma_count": 5}})");
  CHECK(c.seed == 3);
  CHECK(c.gamma_count == 5);
  CHECK(c.gamma_min == dmdsp::kDefaultGammaMin);
  CHECK(c.gamma_scale == dmdsp::kEightBitGammaScale);
  CHECK(c.admm.max_iter == 10000);
}

TEST_CASE("derived configs") {
  RunConfig c;
  c.strategy = "ra";
  c.percent = 30;
  c.seed = 8;
  c.blocks = 4;
  c.gamma_count = 3;
  const auto s = c.sampling_config();
  CHECK(s.strategy == sampling::Strategy::Random);
  CHECK(s.seed == 8);
  CHECK(s.gamma_grid.size() == 3);
  CHECK(s.sweep.gamma_scale == dmdsp::kEightBitGammaScale);
  CHECK(c.lbptop_config().blocks == 4);
  CHECK(c.experiment_config().protocol == eval::Protocol::Loso);
}

TEST_CASE("bad documents") {
  CHECK_THROWS_AS(run_config_from_json("{not json"), Error);
  CHECK_THROWS_AS(run_config_from_json(R"({"seed": "x"})"), Error);
}

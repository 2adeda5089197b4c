#include <cstdio>
#include <filesystem>

#include "doctest.h"
#include "knotnet/errors.hpp"
#include "knotnet/io.hpp"
#include "support.hpp"

using namespace knotnet;
using io::Json;

namespace {

std::string temp_path(const std::string& name) {
  return (std::filesystem::temp_directory_path() / ("knotnet_io_" + name)).string();
}

}  // namespace

TEST_CASE("network round trip is exact") {
  SplitMix64 rng(5);
  ReluNetwork net;
  net.n = 3;
  net.output_bias = 0.1 + 1e-17;
  for (int k = 0; k < 6; ++k)
    net.units.push_back({{rng.uniform(-1, 1), rng.uniform(-1, 1), rng.uniform(-1, 1)}, rng.uniform(-1, 1), rng.uniform(-5, 5)});
  auto back = io::network_from_json(Json::parse(io::dump(io::to_json(net))));
  REQUIRE(back.units.size() == net.units.size());
  CHECK(back.output_bias == net.output_bias);
  for (std::size_t k = 0; k < net.units.size(); ++k) {
    CHECK(back.units[k].w == net.units[k].w);
    CHECK(back.units[k].b == net.units[k].b);
    CHECK(back.units[k].lambda == net.units[k].lambda);
  }
  CHECK_THROWS_AS(io::network_from_json(Json::parse(R"({"n": 2, "units": [{"w": [1], "b": 0, "lambda": 1}]})")),
                  DimensionMismatch);
  CHECK_THROWS_AS(io::network_from_json(Json::parse(R"({"units": []})")), ValidationError);
}

TEST_CASE("spline and plan round trips") {
  auto s = make_spline({0.25, 0.5, 0.75}, {1, -1, 2, 0}, 0);
  auto s2 = io::spline_from_json(Json::parse(io::dump(io::to_json(s))));
  CHECK(s2.knots == s.knots);
  for (int k = 0; k < s.zeta(); ++k) CHECK(s2.pieces[k].b == s.pieces[k].b);

  BasisPlan p;
  p.kind = BasisKind::TwoSidedCompound;
  p.anchor_knots.reset();
  p.flipped_knots = {2};
  p.bidirectional_knots = {1, 3};
  p.free_weight = 0.5;
  auto p2 = io::plan_from_json(io::to_json(p));
  CHECK(p2.kind == p.kind);
  CHECK_FALSE(p2.anchor_knots);
  CHECK(p2.flipped_knots == p.flipped_knots);
  CHECK(p2.bidirectional_knots == p.bidirectional_knots);
  CHECK(p2.free_weight == 0.5);
  CHECK_THROWS_AS(io::plan_from_json(Json::parse(R"({"kind": "sideways"})")), ValidationError);
}

TEST_CASE("piecewise round trip rebuilds the arrangement") {
  SplitMix64 rng(9);
  auto three = testing::make_three_orders(rng);
  PiecewiseLinear pl{three.a, three.target};
  auto back = io::piecewise_from_json(Json::parse(io::dump(io::to_json(pl))));
  CHECK(back.arrangement.regions.size() == three.a.regions.size());
  CHECK(back.arrangement.adjacency.size() == three.a.adjacency.size());
  for (int i = 0; i < 200; ++i) {
    Vec x{rng.uniform(), rng.uniform()};
    CHECK(back(x) == doctest::Approx(pl(x)).epsilon(1e-14));
  }
  auto j = io::to_json(pl);
  j["arrangement"]["regions"][0]["witness"] = Json::array({2.0, 2.0});
  CHECK_THROWS_AS(io::piecewise_from_json(j), ValidationError);
}

TEST_CASE("dump keeps 17 digits and nulls non-finite values") {
  Json j{{"x", 0.1}, {"v", Json::array({1.0 / 3.0, 2.0})}, {"bad", std::nan("")}};
  auto text = io::dump(j);
  auto back = Json::parse(text);
  CHECK(back["x"].get<double>() == 0.1);
  CHECK(back["v"][0].get<double>() == 1.0 / 3.0);
  CHECK(back["bad"].is_null());
}

TEST_CASE("csv round trip") {
  auto d = make_dataset("sinsum", 2, 0.25);
  auto path = temp_path("data.csv");
  io::write_text_file(path, io::to_csv(d));
  auto back = io::read_csv(path);
  CHECK(back.n == 2);
  CHECK(back.inputs == d.inputs);
  CHECK(back.targets == d.targets);
  CHECK(io::to_csv(d).rfind("x1,x2,z\n", 0) == 0);

  io::write_text_file(path, "x1,z\n0.5,1\n0.5,oops\n");
  CHECK_THROWS_AS(io::read_csv(path), ValidationError);
  io::write_text_file(path, "x1,z\n0.5,1,2\n");
  CHECK_THROWS_AS(io::read_csv(path), ValidationError);
  std::remove(path.c_str());
  CHECK_THROWS_AS(io::read_csv(temp_path("missing.csv")), ValidationError);
}

TEST_CASE("polynomial from json") {
  auto f = io::polynomial_from_json(Json::parse(R"({"n": 2, "terms": [{"coef": 16, "powers": [3, 0]},
      {"coef": 16, "powers": [0, 3]}, {"coef": 3, "powers": [0, 0]}]})"), 2);
  CHECK(f({1, 1}) == doctest::Approx(35.0));
  CHECK(f({0.5, 0.2}) == doctest::Approx(poly16({0.5, 0.2})));
  CHECK_THROWS_AS(io::polynomial_from_json(Json::parse(R"({"n": 3, "terms": []})"), 2), DimensionMismatch);
}

TEST_CASE("analysis report serializes") {
  auto net = compile_one_sided(make_spline({0.5}, {1, -1}, 0));
  auto j = Json::parse(io::dump(io::to_json(analyze(net))));
  CHECK(j["labels"].size() == net.units.size());
  CHECK(j["orders"].size() == 1);
  CHECK(j["coverage"].get<double>() == 1.0);
  CHECK(j["continuity"]["max_jump"].get<double>() <= 1e-6);
}

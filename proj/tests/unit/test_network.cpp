#include "doctest.h"
#include "knotnet/errors.hpp"
#include "knotnet/network.hpp"
#include "knotnet/rng.hpp"
#include "knotnet/spline1d.hpp"
#include "support.hpp"

using namespace knotnet;

namespace {

ReluNetwork random_network(SplitMix64& rng, int n, int units) {
  ReluNetwork net;
  net.n = n;
  for (int u = 0; u < units; ++u) {
    ReluUnit unit;
    for (int j = 0; j < n; ++j) unit.w.push_back(rng.uniform(-1, 1));
    unit.b = rng.uniform(-1, 1);
    unit.lambda = rng.uniform(-2, 2);
    net.units.push_back(unit);
  }
  return net;
}

}  // namespace

TEST_CASE("eval examples") {
  ReluNetwork id{1, {{{1.0}, 0.0, 1.0}}, 0.0};
  CHECK(eval(id, {0.5}) == 0.5);
  CHECK(eval(id, {-0.5}) == 0.0);
  // anchors -1 and -0.5 realize s(x) = x
  ReluNetwork two{1, {{{1.0}, 1.0, -1.0}, {{1.0}, 0.5, 2.0}}, 0.0};
  CHECK(eval(two, {0.0}) == doctest::Approx(0.0));
  CHECK(eval(two, {0.5}) == doctest::Approx(0.5));
  CHECK_THROWS_AS(eval(id, {0.1, 0.2}), DimensionMismatch);
}

TEST_CASE("extract_pieces examples") {
  ReluNetwork one{2, {{{1.0, 0.0}, -0.5, 2.0}}, 0.0};
  auto pl = extract_pieces(one);
  REQUIRE(pl.arrangement.regions.size() == 2);
  int left = pl.arrangement.locate({0.25, 0.5}), right = pl.arrangement.locate({0.75, 0.5});
  CHECK(pl.pieces[left].scale() == 0.0);
  CHECK(pl.pieces[right].w[0] == 2.0);
  CHECK(pl.pieces[right].w[1] == 0.0);
  CHECK(pl.pieces[right].b == -1.0);

  ReluNetwork two{1, {{{1.0}, 1.0, -1.0}, {{1.0}, 0.5, 2.0}}, 0.0};
  for (const auto& p : extract_pieces(two).pieces) {
    CHECK(p.w[0] == doctest::Approx(1.0));
    CHECK(p.b == doctest::Approx(0.0).epsilon(1e-12));
  }
  ReluNetwork empty{2, {}, 0.0};
  auto e = extract_pieces(empty);
  CHECK(e.arrangement.regions.size() == 1);
  CHECK(e.pieces[0].scale() == 0.0);
}

TEST_CASE("degenerate units fold into a constant") {
  ReluNetwork net{1, {{{0.0}, 0.5, 2.0}, {{0.0}, -0.5, 3.0}, {{1.0}, -0.5, 1.0}}, 0.0};
  auto pl = extract_pieces(net);
  CHECK(pl.arrangement.hyperplanes.size() == 1);
  CHECK(pl({0.25}) == doctest::Approx(1.0));
  CHECK(eval(net, {0.75}) == doctest::Approx(pl({0.75})));
}

TEST_CASE("check_continuity examples") {
  ReluNetwork net{2, {{{1.0, 0.0}, -0.5, 2.0}, {{0.3, 1.0}, -0.6, -1.0}}, 0.0};
  CHECK(check_continuity(extract_pieces(net)).max_jump <= 1e-9);

  // pieces 0 and x + 0.5 meet at x = 0.5 with a jump of 1
  PiecewiseLinear bad;
  bad.arrangement = build_arrangement(1, {Hyperplane({1.0}, -0.5, 0)});
  int left = bad.arrangement.locate({0.25});
  bad.pieces.resize(2, AffinePiece({0.0}, 0.0));
  bad.pieces[1 - left] = AffinePiece({1.0}, 0.5);
  auto rep = check_continuity(bad);
  REQUIRE(rep.violations.size() == 1);
  CHECK(rep.violations[0].jump == doctest::Approx(1.0));

  PiecewiseLinear single{build_arrangement(2, {}), {AffinePiece({1.0, 2.0}, 3.0)}};
  auto r1 = check_continuity(single);
  CHECK(r1.max_jump == 0.0);
  CHECK(r1.pairs == 0);
}

TEST_CASE("check_multiple_representations examples") {
  ReluNetwork one{2, {{{1.0, 0.0}, -0.5, 2.0}}, 0.0};
  auto r = check_multiple_representations(one, extract_pieces(one));
  CHECK(r.pairs == 1);
  CHECK(r.failures.empty());

  Spline1D s = make_spline({0.25, 0.5, 0.75}, {1, -1, 2, 0}, 0.0);
  ReluNetwork c = compile_one_sided(s);
  CHECK(check_multiple_representations(c, extract_pieces(c)).failures.empty());

  // bidirectional knot: positive and negative unit on x = 0.5
  ReluNetwork bd{1, {{{1.0}, -0.5, 1.5}, {{-1.0}, 0.5, 0.7}, {{1.0}, 0.1, 1.0}}, 0.0};
  auto pl = extract_pieces(bd);
  auto rep = check_multiple_representations(bd, pl);
  CHECK(rep.failures.empty());
  int lo = pl.arrangement.locate({0.25}), hi = pl.arrangement.locate({0.75});
  AffinePiece d = pl.pieces[hi] - pl.pieces[lo];
  CHECK(d.w[0] == doctest::Approx(1.5 + 0.7));
}

TEST_CASE("eval agrees with extracted pieces on random networks") {
  SplitMix64 rng(3);
  for (int t = 0; t < 8; ++t) {
    int n = 1 + t % 3;
    auto net = random_network(rng, n, 4 + t);
    auto pl = extract_pieces(net);
    CHECK(check_continuity(pl).max_jump <= 1e-9);
    CHECK(check_multiple_representations(net, pl).failures.empty());
    for (std::size_t r = 0; r < pl.arrangement.regions.size(); ++r) {
      auto pts = testing::points_in(pl.arrangement, {static_cast<int>(r)}, 20, rng);
      for (const auto& x : pts) CHECK(std::fabs(eval(net, x) - pl.pieces[r](x)) <= 1e-12 * (1 + std::fabs(eval(net, x))));
      // finite-difference slope at the witness
      const Vec& c = pl.arrangement.regions[r].witness;
      for (int j = 0; j < n; ++j) {
        Vec xp = c, xm = c;
        xp[j] += 1e-6;
        xm[j] -= 1e-6;
        double fd = (eval(net, xp) - eval(net, xm)) / 2e-6;
        CHECK(std::fabs(fd - pl.pieces[r].w[j]) <= 1e-4);
      }
    }
  }
}

#include "catch_amalgamated.hpp"
#include "support/oracles.hpp"

using namespace dropwarp;
using Catch::Approx;

namespace {

DropDtwParams with(double delta, double tau = kInf, std::optional<std::size_t> band = std::nullopt) {
  DropDtwParams p;
  p.weights = {1.0, 1.0 / 9.0};
  p.drop_cost = delta;
  p.max_gap = tau;
  p.band = band;
  return p;
}

ProbTimedSequence one(std::size_t type, double t, std::size_t dim = 2) {
  ProbEvent e{std::vector<double>(dim, 0.0), t};
  e.dist[type] = 1.0;
  return {{e}};
}

} // namespace

TEST_CASE("event distance") {
  const Weights w{1.0, 1.0 / 9.0};
  const auto a = one(0, 0.0), b = one(1, 0.0), c = one(0, 3.0);
  CHECK(event_distance(a[0], a[0], {3.0, 7.0}) == 0.0);
  CHECK(event_distance(a[0], b[0], w) == Approx(std::sqrt(2.0)));
  CHECK(event_distance(a[0], c[0], w) == Approx(1.0));
  CHECK(event_distance(c[0], a[0], w) == event_distance(a[0], c[0], w));
  CHECK_THROWS_AS(event_distance(a[0], one(0, 0.0, 3)[0], w), ValidationError);
}

TEST_CASE("cost matrix on the three-pathway example") {
  oracle::ExampleOne ex;
  const auto c = cost_matrix(embed(ex.s1, ex.alphabet), embed(ex.s2, ex.alphabet), ex.params().weights);
  REQUIRE(c.rows() == 3);
  REQUIRE(c.cols() == 5);
  CHECK(c(0, 3) == Approx(1.0).epsilon(1e-12));
  CHECK(cost_matrix({}, embed(ex.s2, ex.alphabet), {}).rows() == 0);
}

TEST_CASE("drop-DTW on the three-pathway example matches the brute-force optimum") {
  oracle::ExampleOne ex;
  const auto p = ex.params();
  const auto s1 = embed(ex.s1, ex.alphabet), s2 = embed(ex.s2, ex.alphabet), s3 = embed(ex.s3, ex.alphabet);

  const auto r12 = drop_dtw(s1, s2, p);
  CHECK(r12.cost == Approx(3.6196329811802244).epsilon(1e-12));
  const auto a12 = get_alignment(r12.tables, s1, s2, p);
  const std::vector<std::pair<std::size_t, std::size_t>> want{{0, 0}, {1, 1}, {2, 4}};
  CHECK(a12.pairs == want);
  // the physiotherapy session and the late surgery of s2 are left out
  CHECK(a12.col_drops == std::vector<std::uint8_t>{0, 0, 1, 1, 0});
  CHECK(a12.row_drops == std::vector<std::uint8_t>{0, 0, 0});

  CHECK(drop_dtw_cost(s1, s3, p) == Approx(0.8333333333333333).epsilon(1e-12));
  CHECK(drop_dtw_cost(s2, s3, p) == Approx(3.6666666666666665).epsilon(1e-12));
  CHECK(drop_dtw_cost(s1, s3, p) < drop_dtw_cost(s1, s2, p));
}

TEST_CASE("boundary cases") {
  const ProbTimedSequence x{{one(0, 0.0)[0], one(1, 1.0)[0], one(0, 2.0)[0]}};
  CHECK(drop_dtw_cost(x, {}, with(4.0)) == 12.0);
  CHECK(drop_dtw_cost({}, x, with(4.0)) == 12.0);
  CHECK(drop_dtw_cost({}, {}, with(kInf)) == 0.0);
  CHECK(drop_dtw_cost(x, {}, with(kInf)) == kInf);

  const auto r = drop_dtw(one(0, 0.0), ProbTimedSequence{}, with(1.0));
  const auto a = get_alignment(r.tables, one(0, 0.0), {}, with(1.0));
  CHECK(a.pairs.empty());
  CHECK(a.row_drops == std::vector<std::uint8_t>{1});
}

TEST_CASE("a single pair is matched only when cheaper than two drops") {
  const auto a = one(0, 0.0), b = one(1, 0.0); // distance sqrt(2)
  CHECK(drop_dtw_cost(a, b, with(1.0)) == Approx(std::sqrt(2.0)));
  CHECK(drop_dtw_cost(a, b, with(0.5)) == Approx(1.0));
  const auto r = drop_dtw(a, b, with(0.5));
  CHECK(get_alignment(r.tables, a, b, with(0.5)).pairs.empty());
}

TEST_CASE("the gap limit forbids matches but never makes the cost infinite") {
  const auto a = one(0, 0.0), b = one(0, 10.0);
  CHECK(drop_dtw_cost(a, b, with(2.0, 3.5)) == 4.0);
  CHECK(drop_dtw_cost(a, b, with(kInf, 3.5)) == kInf);
  CHECK(drop_dtw_cost(a, b, with(kInf)) == Approx(10.0 / 3.0));
}

TEST_CASE("drop-DTW equals the brute-force optimum on random instances") {
  std::mt19937_64 rng(20240611);
  const double deltas[] = {0.5, 1.0, 4.0, kInf};
  const double taus[] = {1.0, 5.0, kInf};
  const std::optional<std::size_t> bands[] = {2, std::nullopt};
  for (int trial = 0; trial < 300; ++trial) {
    const std::size_t dim = 1 + rng() % 4;
    const auto x = oracle::random_prob(rng, 5, dim);
    const auto z = oracle::random_prob(rng, 5, dim);
    if (x.size() * z.size() > 30) continue;
    const auto p = with(deltas[rng() % 4], taus[rng() % 3], bands[rng() % 2]);
    const auto dp = drop_dtw(x, z, p);
    const auto bf = oracle::brute_force_drop_dtw(x, z, p);
    INFO("trial " << trial);
    if (std::isinf(bf.cost)) {
      CHECK(std::isinf(dp.cost));
      continue;
    }
    CHECK(dp.cost == Approx(bf.cost).margin(1e-9));
    const auto a = get_alignment(dp.tables, x, z, p);
    CHECK(alignment_cost(a, dp.tables.cost, p.drop_cost) == Approx(dp.cost).margin(1e-9));
    for (auto [i, j] : a.pairs) CHECK(matchable(x, z, i, j, p));
    for (std::size_t k = 1; k < a.pairs.size(); ++k) {
      CHECK(a.pairs[k].first >= a.pairs[k - 1].first);
      CHECK(a.pairs[k].second >= a.pairs[k - 1].second);
      CHECK(a.pairs[k] != a.pairs[k - 1]);
    }
  }
}

TEST_CASE("without drops, gaps or band the cost is classical DTW") {
  std::mt19937_64 rng(99);
  for (int trial = 0; trial < 200; ++trial) {
    const auto x = oracle::random_prob(rng, 7, 3, 1);
    const auto z = oracle::random_prob(rng, 7, 3, 1);
    const Weights w{1.0, 1.0 / 9.0};
    CHECK(drop_dtw_cost(x, z, with(kInf)) == Approx(oracle::classical_dtw(x, z, w)).margin(1e-9));
  }
}

TEST_CASE("metric identities on random sequences") {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 200; ++trial) {
    const auto x = oracle::random_prob(rng, 8, 3);
    const auto z = oracle::random_prob(rng, 8, 3);
    const double delta = (trial % 2) ? 1.5 : kInf;
    const auto p = with(delta, (trial % 3) ? kInf : 2.0);
    CHECK(drop_dtw_cost(x, x, p) == 0.0);
    CHECK(drop_dtw_cost(x, z, p) == Approx(drop_dtw_cost(z, x, p)).margin(1e-9));
    if (std::isfinite(delta)) CHECK(drop_dtw_cost(x, z, p) <= drop_penalty(x.size() + z.size(), delta) + 1e-9);
  }
}

TEST_CASE("identical sequences align on the diagonal") {
  std::mt19937_64 rng(11);
  const auto x = oracle::random_prob(rng, 6, 3, 6);
  const auto p = with(2.0);
  const auto r = drop_dtw(x, x, p);
  const auto a = get_alignment(r.tables, x, x, p);
  REQUIRE(a.pairs.size() == x.size());
  for (std::size_t k = 0; k < x.size(); ++k) CHECK(a.pairs[k] == std::make_pair(k, k));
  CHECK(a.dropped_rows() == 0);
  CHECK(a.dropped_cols() == 0);
}

TEST_CASE("parameter validation") {
  DropDtwParams p;
  p.drop_cost = -1.0;
  CHECK_THROWS_AS(p.validate(), ValidationError);
  p = {};
  p.band = 0;
  CHECK_THROWS_AS(p.validate(), ValidationError);
  p = {};
  p.weights = {0.0, 0.0};
  CHECK_THROWS_AS(p.validate(), ValidationError);
  p = {};
  p.max_gap = -0.5;
  CHECK_THROWS_AS(p.validate(), ValidationError);
}

TEST_CASE("the brute-force oracle refuses large inputs") {
  ProbTimedSequence x;
  for (int k = 0; k < 6; ++k) x.events.push_back(one(0, k)[0]);
  CHECK_THROWS(oracle::brute_force_drop_dtw(x, x, with(1.0)));
}

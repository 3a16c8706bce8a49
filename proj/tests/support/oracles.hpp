#pragma once

// Reference implementations and fixtures shared by the unit and acceptance tests.

#include "dropwarp/dropwarp.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>
#include <utility>
#include <vector>

namespace oracle {

using namespace dropwarp;

struct BruteForceResult {
  double cost = kInf;
  std::vector<std::pair<std::size_t, std::size_t>> pairs;
};

// Exhaustive minimum of (sum of matched costs) + delta * (unmatched rows +
// unmatched columns) over every chain of matchable cells that never decreases
// in either coordinate.
inline BruteForceResult brute_force_drop_dtw(const ProbTimedSequence& x, const ProbTimedSequence& z,
                                             const DropDtwParams& params) {
  const std::size_t m = x.size(), n = z.size();
  if (m * n > 30) throw std::invalid_argument("brute force limited to |x|*|z| <= 30");
  std::vector<std::pair<std::size_t, std::size_t>> cells;
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < n; ++j)
      if (matchable(x, z, i, j, params)) cells.emplace_back(i, j);

  BruteForceResult best;
  std::vector<std::pair<std::size_t, std::size_t>> chain;
  auto score = [&] {
    std::vector<bool> rows(m, false), cols(n, false);
    double sum = 0.0;
    for (auto [i, j] : chain) {
      rows[i] = cols[j] = true;
      sum += event_distance(x[i], z[j], params.weights);
    }
    const auto dropped = static_cast<std::size_t>(std::count(rows.begin(), rows.end(), false) +
                                                  std::count(cols.begin(), cols.end(), false));
    return sum + drop_penalty(dropped, params.drop_cost);
  };
  auto visit = [&](auto&& self, std::size_t from) -> void {
    const double c = score();
    if (c < best.cost) {
      best.cost = c;
      best.pairs = chain;
    }
    for (std::size_t k = from; k < cells.size(); ++k) {
      if (!chain.empty()) {
        const auto [pi, pj] = chain.back();
        if (cells[k].first < pi || cells[k].second < pj) continue;
      }
      chain.push_back(cells[k]);
      self(self, k + 1);
      chain.pop_back();
    }
  };
  visit(visit, 0);
  return best;
}

// Textbook DTW with steps (1,0), (0,1), (1,1) and both end points matched.
inline double classical_dtw(const ProbTimedSequence& x, const ProbTimedSequence& z, const Weights& w) {
  const std::size_t m = x.size(), n = z.size();
  if (m == 0 || n == 0) return (m == 0 && n == 0) ? 0.0 : kInf;
  std::vector<std::vector<double>> d(m + 1, std::vector<double>(n + 1, kInf));
  d[0][0] = 0.0;
  for (std::size_t i = 1; i <= m; ++i)
    for (std::size_t j = 1; j <= n; ++j)
      d[i][j] = event_distance(x[i - 1], z[j - 1], w) + std::min({d[i - 1][j - 1], d[i - 1][j], d[i][j - 1]});
  return d[m][n];
}

inline TimedSequence random_timed(std::mt19937_64& rng, std::size_t max_len, std::size_t alphabet,
                                  double horizon = 10.0, std::size_t min_len = 0) {
  std::uniform_int_distribution<std::size_t> len(min_len, max_len);
  std::uniform_int_distribution<std::size_t> type(0, alphabet - 1);
  std::uniform_int_distribution<int> tick(0, static_cast<int>(horizon * 2));
  TimedSequence s{"r", {}};
  const std::size_t n = len(rng);
  for (std::size_t k = 0; k < n; ++k) s.events.push_back({type(rng), tick(rng) * 0.5});
  canonicalize(s);
  return s;
}

inline Alphabet letters(std::size_t n) {
  std::vector<std::string> names;
  for (std::size_t k = 0; k < n; ++k) names.push_back(std::string(1, static_cast<char>('A' + k)));
  return Alphabet(names);
}

inline ProbTimedSequence random_prob(std::mt19937_64& rng, std::size_t max_len, std::size_t alphabet,
                                     std::size_t min_len = 0) {
  return embed(random_timed(rng, max_len, alphabet, 10.0, min_len), letters(alphabet));
}

// Three short care pathways over {S, R, C, P}: surgery, radiotherapy,
// consultation, physiotherapy.
struct ExampleOne {
  Alphabet alphabet{{"S", "R", "C", "P"}};
  TimedSequence s1{"s1", {{0, 1.0}, {2, 2.0}, {1, 4.5}}};
  TimedSequence s2{"s2", {{2, 0.0}, {2, 2.0}, {3, 3.0}, {0, 4.0}, {1, 5.0}}};
  TimedSequence s3{"s3", {{0, 0.0}, {2, 1.0}, {2, 2.0}, {1, 4.0}}};

  DropDtwParams params() const {
    DropDtwParams p;
    p.weights = {1.0, 1.0 / 9.0};
    p.drop_cost = 1.0;
    p.max_gap = 3.5;
    return p;
  }
};

inline std::string example_one_jsonl() {
  return R"({"id":"s1","events":[{"e":"S","t":1},{"e":"C","t":2},{"e":"R","t":4.5}]}
{"id":"s2","events":[{"e":"C","t":0},{"e":"C","t":2},{"e":"P","t":3},{"e":"S","t":4},{"e":"R","t":5}]}
{"id":"s3","events":[{"e":"S","t":0},{"e":"C","t":1},{"e":"C","t":2},{"e":"R","t":4}]}
)";
}

} // namespace oracle

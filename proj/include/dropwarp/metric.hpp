#pragma once

// Drop-tolerant DTW between probabilistic timed sequences.
//
// The objective is the one of drop-DTW: over all monotone sets of matched
// pairs (i, j), minimise the summed event distance of the pairs plus the drop
// cost for every row and every column left unmatched. Matches are further
// restricted to events whose timestamps differ by at most `max_gap` and, when
// a band is set, to cells with |i - j| < band.

#include "dropwarp/core_types.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <optional>
#include <utility>
#include <vector>

namespace dropwarp {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

/// Weights of the two terms of the event distance.
struct Weights {
  double event = 1.0; // on the squared distance between type distributions
  double time = 1.0;  // on the squared time gap

  void validate() const {
    if (!(event >= 0.0) || !(time >= 0.0) || !std::isfinite(event) || !std::isfinite(time))
      throw ValidationError("weights must be finite and nonnegative");
    if (event == 0.0 && time == 0.0) throw ValidationError("weights must not both be zero");
  }
};

struct DropDtwParams {
  Weights weights;
  double drop_cost = kInf;               // cost of leaving one event unmatched
  std::optional<std::size_t> band;       // Sakoe-Chiba width; nullopt = unbounded
  double max_gap = kInf;                 // largest matchable time gap, days

  void validate() const {
    weights.validate();
    if (!(drop_cost >= 0.0)) throw ValidationError("drop cost must be >= 0");
    if (band && *band < 1) throw ValidationError("band must be >= 1");
    if (!(max_gap >= 0.0)) throw ValidationError("max gap must be >= 0");
  }
};

/// `count` drops at `cost` each; zero drops cost nothing even when `cost` is infinite.
inline double drop_penalty(std::size_t count, double cost) {
  return count == 0 ? 0.0 : static_cast<double>(count) * cost;
}

/// Dense row-major matrix of doubles.
class Grid {
public:
  Grid() = default;
  Grid(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  double& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
  double operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

using CostMatrix = Grid;

/// DP tables, all (M+1) x (N+1). `match`, `drop` and `best` are the match,
/// drop and solution tables; `row_open` (resp. `col_open`) holds the best cost
/// of the prefix problem subject to its last row (resp. column) being matched.
struct DpTables {
  CostMatrix cost;
  Grid match;
  Grid drop;
  Grid best;
  Grid row_open;
  Grid col_open;
  double drop_cost = kInf;

  std::size_t rows() const noexcept { return cost.rows(); }
  std::size_t cols() const noexcept { return cost.cols(); }
  double final_cost() const { return best(rows(), cols()); }
};

struct DropDtwResult {
  double cost = 0.0;
  DpTables tables;
};

struct Alignment {
  std::vector<std::pair<std::size_t, std::size_t>> pairs;
  std::vector<std::uint8_t> row_drops; // 1 = row left unmatched
  std::vector<std::uint8_t> col_drops;

  std::size_t dropped_rows() const {
    return static_cast<std::size_t>(std::count(row_drops.begin(), row_drops.end(), 1));
  }
  std::size_t dropped_cols() const {
    return static_cast<std::size_t>(std::count(col_drops.begin(), col_drops.end(), 1));
  }
};

/// sqrt(w.event * |a.dist - b.dist|^2 + w.time * (b.t - a.t)^2)
inline double event_distance(const ProbEvent& a, const ProbEvent& b, const Weights& w) {
  if (a.dist.size() != b.dist.size()) throw ValidationError("event dimension mismatch");
  double sq = 0.0;
  for (std::size_t k = 0; k < a.dist.size(); ++k) {
    const double diff = a.dist[k] - b.dist[k];
    sq += diff * diff;
  }
  const double gap = b.t - a.t;
  return std::sqrt(w.event * sq + w.time * gap * gap);
}

inline CostMatrix cost_matrix(const ProbTimedSequence& x, const ProbTimedSequence& z,
                              const Weights& w) {
  CostMatrix c(x.size(), z.size());
  for (std::size_t i = 0; i < x.size(); ++i)
    for (std::size_t j = 0; j < z.size(); ++j) c(i, j) = event_distance(x[i], z[j], w);
  return c;
}

/// Whether x[i] and z[j] (0-based) may be matched under the band and gap limits.
inline bool matchable(const ProbTimedSequence& x, const ProbTimedSequence& z, std::size_t i,
                      std::size_t j, const DropDtwParams& params) {
  if (params.band) {
    const std::size_t diff = i > j ? i - j : j - i;
    if (diff >= *params.band) return false;
  }
  return std::abs(x[i].t - z[j].t) <= params.max_gap;
}

inline DropDtwResult drop_dtw(const ProbTimedSequence& x, const ProbTimedSequence& z,
                              const DropDtwParams& params) {
  params.validate();
  const std::size_t m = x.size();
  const std::size_t n = z.size();
  const double delta = params.drop_cost;

  DpTables t;
  t.drop_cost = delta;
  t.cost = cost_matrix(x, z, params.weights);
  t.match = Grid(m + 1, n + 1, kInf);
  t.drop = Grid(m + 1, n + 1, kInf);
  t.best = Grid(m + 1, n + 1, kInf);
  t.row_open = Grid(m + 1, n + 1, kInf);
  t.col_open = Grid(m + 1, n + 1, kInf);

  t.match(0, 0) = 0.0;
  t.drop(0, 0) = 0.0;
  t.best(0, 0) = 0.0;
  for (std::size_t i = 1; i <= m; ++i) t.best(i, 0) = t.drop(i, 0) = drop_penalty(i, delta);
  for (std::size_t j = 1; j <= n; ++j) t.best(0, j) = t.drop(0, j) = drop_penalty(j, delta);

  for (std::size_t i = 1; i <= m; ++i) {
    for (std::size_t j = 1; j <= n; ++j) {
      double match = kInf;
      if (matchable(x, z, i - 1, j - 1, params)) {
        const double prev = std::min({t.best(i - 1, j - 1), t.row_open(i, j - 1), t.col_open(i - 1, j)});
        match = t.cost(i - 1, j - 1) + prev;
      }
      const double drop = std::min(delta + t.best(i - 1, j), delta + t.best(i, j - 1));
      t.match(i, j) = match;
      t.drop(i, j) = drop;
      t.best(i, j) = std::min(match, drop);
      t.row_open(i, j) = std::min(match, t.row_open(i, j - 1) + delta);
      t.col_open(i, j) = std::min(match, t.col_open(i - 1, j) + delta);
    }
  }
  const double cost = t.best(m, n);
  return {cost, std::move(t)};
}

inline double drop_dtw_cost(const ProbTimedSequence& x, const ProbTimedSequence& z,
                            const DropDtwParams& params) {
  return drop_dtw(x, z, params).cost;
}

/// Alignment cost: matched distances plus the drop cost of every unmatched row and column.
inline double alignment_cost(const Alignment& a, const CostMatrix& cost, double drop_cost) {
  double total = 0.0;
  for (auto [i, j] : a.pairs) total += cost(i, j);
  return total + drop_penalty(a.dropped_rows() + a.dropped_cols(), drop_cost);
}

inline Alignment alignment_from_pairs(std::vector<std::pair<std::size_t, std::size_t>> pairs,
                                      std::size_t rows, std::size_t cols) {
  Alignment a;
  a.pairs = std::move(pairs);
  a.row_drops.assign(rows, 1);
  a.col_drops.assign(cols, 1);
  for (auto [i, j] : a.pairs) {
    a.row_drops[i] = 0;
    a.col_drops[j] = 0;
  }
  return a;
}

/// Backtracks the optimal alignment through tables produced by `drop_dtw(x, z, params)`.
/// Ties prefer a match over a drop, and a row drop over a column drop. When the
/// optimum is infinite every event is reported as dropped.
inline Alignment get_alignment(const DpTables& t, const ProbTimedSequence& x,
                               const ProbTimedSequence& z, const DropDtwParams& params) {
  if (t.rows() != x.size() || t.cols() != z.size() || t.best.rows() != x.size() + 1 ||
      t.best.cols() != z.size() + 1)
    throw Error("internal: DP tables do not match the sequences");
  const double delta = params.drop_cost;
  std::vector<std::pair<std::size_t, std::size_t>> pairs;
  if (!std::isfinite(t.final_cost())) return alignment_from_pairs({}, x.size(), z.size());

  enum class State { Best, Match, RowOpen, ColOpen };
  State state = State::Best;
  std::size_t i = x.size();
  std::size_t j = z.size();
  auto inconsistent = [] { return Error("internal: inconsistent DP tables"); };

  while (i > 0 || j > 0) {
    switch (state) {
    case State::Best:
      if (i == 0) {
        --j;
      } else if (j == 0) {
        --i;
      } else if (t.best(i, j) == t.match(i, j)) {
        state = State::Match;
      } else if (t.best(i, j) == delta + t.best(i - 1, j)) {
        --i;
      } else if (t.best(i, j) == delta + t.best(i, j - 1)) {
        --j;
      } else {
        throw inconsistent();
      }
      break;
    case State::Match: {
      if (i == 0 || j == 0) throw inconsistent();
      pairs.emplace_back(i - 1, j - 1);
      const double diag = t.best(i - 1, j - 1);
      const double left = t.row_open(i, j - 1);
      const double up = t.col_open(i - 1, j);
      const double lowest = std::min({diag, left, up});
      if (diag == lowest) {
        --i;
        --j;
        state = State::Best;
      } else if (left == lowest) {
        --j;
        state = State::RowOpen;
      } else {
        --i;
        state = State::ColOpen;
      }
      break;
    }
    case State::RowOpen:
      if (j == 0 || i == 0) throw inconsistent();
      if (t.row_open(i, j) == t.match(i, j)) {
        state = State::Match;
      } else if (t.row_open(i, j) == t.row_open(i, j - 1) + delta) {
        --j;
      } else {
        throw inconsistent();
      }
      break;
    case State::ColOpen:
      if (j == 0 || i == 0) throw inconsistent();
      if (t.col_open(i, j) == t.match(i, j)) {
        state = State::Match;
      } else if (t.col_open(i, j) == t.col_open(i - 1, j) + delta) {
        --i;
      } else {
        throw inconsistent();
      }
      break;
    }
  }
  if (state != State::Best) throw inconsistent();
  std::reverse(pairs.begin(), pairs.end());
  return alignment_from_pairs(std::move(pairs), x.size(), z.size());
}

} // namespace dropwarp

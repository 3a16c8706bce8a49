#pragma once

// Confusion matrices, Cohen's kappa and per-cluster event histograms.

#include "dropwarp/core_types.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <span>
#include <string>
#include <tuple>
#include <unordered_map>
#include <utility>
#include <vector>

namespace dropwarp {

/// Square count matrix; rows are true classes, columns predicted clusters.
struct ConfusionMatrix {
  std::vector<std::string> row_labels;
  std::vector<std::string> col_labels;
  std::vector<std::vector<std::size_t>> counts;

  std::size_t total() const {
    std::size_t n = 0;
    for (const auto& row : counts)
      for (auto c : row) n += c;
    return n;
  }
};

struct KappaReport {
  ConfusionMatrix matrix; // classes and clusters paired by size rank
  double kappa = 0.0;
  double kappa_best_match = 0.0; // after a maximum-agreement pairing
};

/// Cohen's kappa of a square matrix. Degenerate case p_c = 1 yields 1 when the
/// agreement is perfect and 0 otherwise.
inline double kappa_from_counts(const std::vector<std::vector<std::size_t>>& counts) {
  const std::size_t k = counts.size();
  double n = 0.0, diag = 0.0;
  std::vector<double> rows(k, 0.0), cols(k, 0.0);
  for (std::size_t i = 0; i < k; ++i) {
    if (counts[i].size() != k) throw ValidationError("confusion matrix must be square");
    for (std::size_t j = 0; j < k; ++j) {
      const double c = static_cast<double>(counts[i][j]);
      n += c;
      rows[i] += c;
      cols[j] += c;
      if (i == j) diag += c;
    }
  }
  if (n == 0.0) throw ValidationError("empty confusion matrix");
  const double observed = diag / n;
  double chance = 0.0;
  for (std::size_t i = 0; i < k; ++i) chance += rows[i] * cols[i];
  chance /= n * n;
  if (chance >= 1.0) return observed >= 1.0 ? 1.0 : 0.0;
  return (observed - chance) / (1.0 - chance);
}

/// Column permutation maximising the trace (exact, subset DP).
inline std::vector<std::size_t> best_column_matching(const std::vector<std::vector<std::size_t>>& counts) {
  const std::size_t k = counts.size();
  if (k > 20) throw ValidationError("too many classes for exact matching");
  const std::size_t full = std::size_t{1} << k;
  std::vector<long long> best(full, -1);
  std::vector<std::size_t> choice(full, 0);
  best[0] = 0;
  for (std::size_t mask = 0; mask < full; ++mask) {
    if (best[mask] < 0) continue;
    const auto row = static_cast<std::size_t>(__builtin_popcountll(mask));
    if (row == k) continue;
    for (std::size_t col = 0; col < k; ++col) {
      if (mask & (std::size_t{1} << col)) continue;
      const std::size_t next = mask | (std::size_t{1} << col);
      const long long value = best[mask] + static_cast<long long>(counts[row][col]);
      if (value > best[next]) {
        best[next] = value;
        choice[next] = col;
      }
    }
  }
  std::vector<std::size_t> perm(k);
  std::size_t mask = full - 1;
  for (std::size_t row = k; row-- > 0;) {
    perm[row] = choice[mask];
    mask &= ~(std::size_t{1} << choice[mask]);
  }
  return perm;
}

namespace detail {

struct RankedLabels {
  std::vector<std::string> names; // ranked by decreasing size, ties by first appearance
  std::vector<std::size_t> sizes;
  std::vector<std::size_t> ids;   // rank of each input label
};

inline RankedLabels rank_labels(std::span<const std::string> labels) {
  std::unordered_map<std::string, std::size_t> first;
  std::vector<std::string> names;
  std::vector<std::size_t> sizes, ids;
  ids.reserve(labels.size());
  for (const auto& l : labels) {
    auto [it, fresh] = first.emplace(l, sizes.size());
    if (fresh) {
      names.push_back(l);
      sizes.push_back(0);
    }
    ++sizes[it->second];
    ids.push_back(it->second);
  }
  std::vector<std::size_t> order(sizes.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return sizes[a] > sizes[b]; });
  RankedLabels out;
  std::vector<std::size_t> position(order.size());
  for (std::size_t r = 0; r < order.size(); ++r) {
    position[order[r]] = r;
    out.names.push_back(names[order[r]]);
    out.sizes.push_back(sizes[order[r]]);
  }
  for (auto id : ids) out.ids.push_back(position[id]);
  return out;
}

// [first, last) rank range of the block of equal sizes containing each rank.
inline std::vector<std::pair<std::size_t, std::size_t>> tie_blocks(const std::vector<std::size_t>& sizes,
                                                                    std::size_t k) {
  std::vector<std::pair<std::size_t, std::size_t>> out(k);
  std::size_t start = 0;
  for (std::size_t r = 1; r <= k; ++r) {
    const std::size_t a = start < sizes.size() ? sizes[start] : 0;
    const std::size_t b = r < sizes.size() ? sizes[r] : 0;
    if (r == k || a != b) {
      for (std::size_t q = start; q < r; ++q) out[q] = {start, r};
      start = r;
    }
  }
  return out;
}

// Pairs row rank r with column rank r, except that rows (or columns) of equal
// size may be permuted among themselves; among those pairings the one with the
// largest trace wins. Returns perm with row i paired to column perm[i].
inline std::vector<std::size_t> rank_pairing(const std::vector<std::vector<std::size_t>>& counts,
                                             const std::vector<std::size_t>& row_sizes,
                                             const std::vector<std::size_t>& col_sizes) {
  const std::size_t k = counts.size();
  const auto rows = tie_blocks(row_sizes, k);
  const auto cols = tie_blocks(col_sizes, k);
  // Every block pairing is a special case of the unrestricted one, which is
  // also what all-tied inputs reduce to; fall back to it when the search is large.
  if (k > 12) return best_column_matching(counts);

  std::unordered_map<std::uint32_t, long long> memo;
  std::unordered_map<std::uint32_t, std::pair<std::size_t, std::size_t>> step;
  auto solve = [&](auto&& self, std::uint32_t row_mask, std::uint32_t col_mask) -> long long {
    const auto r = static_cast<std::size_t>(__builtin_popcount(row_mask));
    if (r == k) return 0;
    const std::uint32_t key = (row_mask << 12) | col_mask;
    if (auto it = memo.find(key); it != memo.end()) return it->second;
    long long best = -1;
    std::pair<std::size_t, std::size_t> arg{0, 0};
    for (std::size_t i = rows[r].first; i < rows[r].second; ++i) {
      if (row_mask & (1u << i)) continue;
      for (std::size_t j = cols[r].first; j < cols[r].second; ++j) {
        if (col_mask & (1u << j)) continue;
        const long long rest = self(self, row_mask | (1u << i), col_mask | (1u << j));
        if (rest < 0) continue;
        const long long v = rest + static_cast<long long>(counts[i][j]);
        if (v > best) {
          best = v;
          arg = {i, j};
        }
      }
    }
    memo[key] = best;
    step[key] = arg;
    return best;
  };
  solve(solve, 0, 0);
  std::vector<std::size_t> perm(k);
  std::uint32_t row_mask = 0, col_mask = 0;
  for (std::size_t r = 0; r < k; ++r) {
    const auto [i, j] = step[(row_mask << 12) | col_mask];
    perm[i] = j;
    row_mask |= 1u << i;
    col_mask |= 1u << j;
  }
  return perm;
}

inline std::vector<std::vector<std::size_t>> permute_columns(const std::vector<std::vector<std::size_t>>& counts,
                                                             const std::vector<std::size_t>& perm) {
  auto out = counts;
  for (std::size_t i = 0; i < counts.size(); ++i)
    for (std::size_t j = 0; j < counts.size(); ++j) out[i][j] = counts[i][perm[j]];
  return out;
}

} // namespace detail

/// Confusion matrix and kappa for aligned label vectors. True classes and
/// predicted clusters are each ranked by decreasing size and paired by rank;
/// within groups of equal size the pairing maximising agreement is used. The
/// result does not depend on how either side names its labels.
inline KappaReport confusion_and_kappa(std::span<const std::string> truth,
                                       std::span<const std::string> predicted) {
  if (truth.size() != predicted.size()) throw PreconditionError("label vectors differ in length");
  if (truth.empty()) throw PreconditionError("no labels to compare");
  const auto rows = detail::rank_labels(truth);
  const auto cols = detail::rank_labels(predicted);
  const std::size_t k = std::max(rows.names.size(), cols.names.size());
  std::vector<std::vector<std::size_t>> raw(k, std::vector<std::size_t>(k, 0));
  for (std::size_t i = 0; i < rows.ids.size(); ++i) ++raw[rows.ids[i]][cols.ids[i]];

  const auto perm = detail::rank_pairing(raw, rows.sizes, cols.sizes);
  KappaReport r;
  r.matrix.row_labels = rows.names;
  r.matrix.row_labels.resize(k);
  r.matrix.col_labels.resize(k);
  for (std::size_t j = 0; j < k; ++j)
    if (perm[j] < cols.names.size()) r.matrix.col_labels[j] = cols.names[perm[j]];
  r.matrix.counts = detail::permute_columns(raw, perm);
  r.kappa = kappa_from_counts(r.matrix.counts);
  r.kappa_best_match = kappa_from_counts(detail::permute_columns(raw, best_column_matching(raw)));
  return r;
}

using LabelTable = std::vector<std::pair<std::string, std::string>>; // (id, label)

/// Aligns two id -> label tables on the truth table's order. Id sets must match.
inline KappaReport confusion_and_kappa(const LabelTable& truth, const LabelTable& predicted) {
  std::unordered_map<std::string, std::string> pred;
  for (const auto& [id, label] : predicted)
    if (!pred.emplace(id, label).second) throw PreconditionError("duplicate id in predictions: " + id);
  if (pred.size() != truth.size()) throw PreconditionError("truth and prediction id sets differ");
  std::vector<std::string> t, p;
  std::unordered_map<std::string, bool> seen;
  for (const auto& [id, label] : truth) {
    if (!seen.emplace(id, true).second) throw PreconditionError("duplicate id in truth: " + id);
    auto it = pred.find(id);
    if (it == pred.end()) throw PreconditionError("id missing from predictions: " + id);
    t.push_back(label);
    p.push_back(it->second);
  }
  return confusion_and_kappa(std::span<const std::string>(t), std::span<const std::string>(p));
}

/// Parses "1=3" or "1=3,2=4": labels on the right are renamed to the label on the left.
inline std::map<std::string, std::string> parse_label_merges(const std::string& text) {
  std::map<std::string, std::string> out;
  std::size_t start = 0;
  while (start <= text.size()) {
    const std::size_t end = std::min(text.find(',', start), text.size());
    const std::string item = text.substr(start, end - start);
    if (!item.empty()) {
      const auto eq = item.find('=');
      if (eq == std::string::npos || eq == 0 || eq + 1 == item.size())
        throw ValidationError("bad merge '" + item + "', expected KEEP=MERGED");
      out[item.substr(eq + 1)] = item.substr(0, eq);
    }
    start = end + 1;
  }
  return out;
}

inline void apply_label_merges(LabelTable& labels, const std::map<std::string, std::string>& merges) {
  for (auto& [id, label] : labels) {
    auto it = merges.find(label);
    if (it != merges.end()) label = it->second;
  }
}

struct HistogramRow {
  std::size_t cluster = 0;
  std::size_t type = 0;
  double bin_start = 0.0;
  std::size_t count = 0;
};

/// Event counts per (cluster, type, time bin). Bins have width `bin_width` and
/// are anchored at the smallest timestamp of the whole corpus. Rows are sorted
/// by cluster, bin, then type; empty cells are omitted.
inline std::vector<HistogramRow> histogram_export(std::span<const TimedSequence> seqs,
                                                  std::span<const std::size_t> clusters,
                                                  double bin_width) {
  if (!(bin_width > 0.0) || !std::isfinite(bin_width)) throw ValidationError("bin width must be positive");
  if (seqs.size() != clusters.size()) throw PreconditionError("one cluster per sequence is required");
  double anchor = std::numeric_limits<double>::infinity();
  for (const auto& s : seqs)
    for (const auto& ev : s.events) anchor = std::min(anchor, ev.t);

  std::map<std::tuple<std::size_t, std::int64_t, std::size_t>, std::size_t> cells;
  for (std::size_t i = 0; i < seqs.size(); ++i)
    for (const auto& ev : seqs[i].events) {
      const auto bin = static_cast<std::int64_t>(std::floor((ev.t - anchor) / bin_width));
      ++cells[{clusters[i], bin, ev.type}];
    }
  std::vector<HistogramRow> rows;
  rows.reserve(cells.size());
  for (const auto& [key, count] : cells) {
    const auto& [cluster, bin, type] = key;
    rows.push_back({cluster, type, anchor + static_cast<double>(bin) * bin_width, count});
  }
  return rows;
}

} // namespace dropwarp

#pragma once

// Hierarchical (centroid linkage via TSR) and K-means clustering of timed
// sequences under drop-DTW.

#include "dropwarp/averaging.hpp"
#include "dropwarp/core_types.hpp"
#include "dropwarp/metric.hpp"
#include "dropwarp/parallel.hpp"

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <random>
#include <span>
#include <string>
#include <vector>

namespace dropwarp {

struct ClusterParams {
  std::size_t k = 1;
  DropDtwParams metric;
  TsrConfig tsr;
  std::size_t max_rounds = 20; // K-means only
  std::size_t restarts = 1;    // K-means only: best of R seeded runs by inertia
  std::uint64_t seed = 0;
  std::size_t threads = 1;
};

struct Clustering {
  std::vector<std::string> ids;
  std::vector<std::size_t> labels;            // labels[i] is the cluster of ids[i]
  std::vector<ProbTimedSequence> centroids;
  double total_inertia = 0.0;                 // sum over sequences of drop-DTW(centroid, sequence)
  std::vector<double> inertia_trace;          // K-means: total inertia after each round
  std::size_t steps = 0;                      // merges (HAC) or rounds (K-means)

  std::size_t k() const noexcept { return centroids.size(); }

  std::vector<std::size_t> sizes() const {
    std::vector<std::size_t> out(centroids.size(), 0);
    for (auto l : labels) ++out[l];
    return out;
  }
};

class DistanceMatrix {
public:
  explicit DistanceMatrix(std::size_t n = 0) : n_(n), data_(n * n, 0.0) {}
  std::size_t size() const noexcept { return n_; }
  double& operator()(std::size_t i, std::size_t j) { return data_[i * n_ + j]; }
  double operator()(std::size_t i, std::size_t j) const { return data_[i * n_ + j]; }

private:
  std::size_t n_;
  std::vector<double> data_;
};

inline DistanceMatrix pairwise_distances(std::span<const ProbTimedSequence> seqs,
                                         const DropDtwParams& metric, std::size_t threads = 1) {
  const std::size_t n = seqs.size();
  DistanceMatrix d(n);
  std::vector<std::pair<std::size_t, std::size_t>> cells;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) cells.emplace_back(i, j);
  parallel_for(cells.size(), threads, [&](std::size_t c) {
    auto [i, j] = cells[c];
    d(i, j) = drop_dtw_cost(seqs[i], seqs[j], metric);
  });
  for (auto [i, j] : cells) d(j, i) = d(i, j);
  return d;
}

inline DistanceMatrix pairwise_distances(std::span<const TimedSequence> seqs, const Alphabet& alphabet,
                                         const DropDtwParams& metric, std::size_t threads = 1) {
  const auto embedded = embed_all(seqs, alphabet);
  return pairwise_distances(std::span<const ProbTimedSequence>(embedded), metric, threads);
}

namespace detail {

inline void check_cluster_inputs(std::size_t n, const ClusterParams& params) {
  if (params.k < 1) throw PreconditionError("k must be >= 1");
  if (params.k > n)
    throw PreconditionError("k = " + std::to_string(params.k) + " exceeds the number of sequences (" +
                            std::to_string(n) + ")");
  params.metric.validate();
  params.tsr.validate();
}

/// Renumbers clusters by first appearance in input order.
inline void canonicalize_labels(Clustering& c) {
  std::vector<std::size_t> remap(c.centroids.size(), SIZE_MAX);
  std::size_t next = 0;
  for (auto l : c.labels)
    if (remap[l] == SIZE_MAX) remap[l] = next++;
  std::vector<ProbTimedSequence> centroids(next);
  for (std::size_t old = 0; old < remap.size(); ++old)
    if (remap[old] != SIZE_MAX) centroids[remap[old]] = std::move(c.centroids[old]);
  for (auto& l : c.labels) l = remap[l];
  c.centroids = std::move(centroids);
}

inline std::vector<ProbTimedSequence> gather(std::span<const ProbTimedSequence> seqs,
                                             std::span<const std::size_t> members) {
  std::vector<ProbTimedSequence> out;
  out.reserve(members.size());
  for (auto m : members) out.push_back(seqs[m]);
  return out;
}

inline std::vector<std::string> ids_of(std::span<const TimedSequence> seqs) {
  std::vector<std::string> ids;
  ids.reserve(seqs.size());
  for (const auto& s : seqs) ids.push_back(s.id);
  return ids;
}

inline double total_cost(std::span<const ProbTimedSequence> seqs, const Clustering& c,
                         const DropDtwParams& metric, std::size_t threads) {
  std::vector<double> costs(seqs.size());
  parallel_for(seqs.size(), threads, [&](std::size_t i) {
    costs[i] = drop_dtw_cost(c.centroids[c.labels[i]], seqs[i], metric);
  });
  double sum = 0.0;
  for (double v : costs) sum += v;
  return sum;
}

} // namespace detail

/// Agglomerative clustering: repeatedly merge the two closest representatives
/// and replace them by the TSR average of all members of the merged cluster.
inline Clustering hac_cluster(std::span<const ProbTimedSequence> seqs, std::vector<std::string> ids,
                              const ClusterParams& params) {
  const std::size_t n = seqs.size();
  detail::check_cluster_inputs(n, params);

  std::vector<std::vector<std::size_t>> members(n);
  std::vector<ProbTimedSequence> reps(seqs.begin(), seqs.end());
  std::vector<bool> alive(n, true);
  DistanceMatrix dist = pairwise_distances(seqs, params.metric, params.threads);

  std::size_t merges = 0;
  for (std::size_t i = 0; i < n; ++i) members[i] = {i};
  for (std::size_t clusters = n; clusters > params.k; --clusters) {
    std::size_t best_a = 0, best_b = 0;
    double best = kInf;
    bool found = false;
    for (std::size_t a = 0; a < n; ++a) {
      if (!alive[a]) continue;
      for (std::size_t b = a + 1; b < n; ++b) {
        if (!alive[b]) continue;
        if (!found || dist(a, b) < best) {
          best = dist(a, b);
          best_a = a;
          best_b = b;
          found = true;
        }
      }
    }
    auto& merged = members[best_a];
    merged.insert(merged.end(), members[best_b].begin(), members[best_b].end());
    std::sort(merged.begin(), merged.end());
    members[best_b].clear();
    alive[best_b] = false;

    TsrConfig tsr = params.tsr;
    tsr.init = LongestRandom{};
    tsr.seed = params.tsr.seed + merges;
    tsr.threads = params.threads;
    const auto group = detail::gather(seqs, merged);
    reps[best_a] = tsr_average(std::span<const ProbTimedSequence>(group), params.metric, tsr).center;
    ++merges;

    std::vector<std::size_t> others;
    for (std::size_t o = 0; o < n; ++o)
      if (alive[o] && o != best_a) others.push_back(o);
    parallel_for(others.size(), params.threads, [&](std::size_t idx) {
      const std::size_t o = others[idx];
      const double d = drop_dtw_cost(reps[std::min(o, best_a)], reps[std::max(o, best_a)], params.metric);
      dist(o, best_a) = d;
      dist(best_a, o) = d;
    });
  }

  Clustering out;
  out.ids = std::move(ids);
  out.labels.assign(n, 0);
  for (std::size_t c = 0; c < n; ++c) {
    if (!alive[c]) continue;
    for (auto m : members[c]) out.labels[m] = out.centroids.size();
    out.centroids.push_back(std::move(reps[c]));
  }
  detail::canonicalize_labels(out);
  out.steps = merges;
  out.total_inertia = detail::total_cost(seqs, out, params.metric, params.threads);
  return out;
}

inline Clustering hac_cluster(std::span<const TimedSequence> seqs, const Alphabet& alphabet,
                              const ClusterParams& params) {
  const auto embedded = embed_all(seqs, alphabet);
  return hac_cluster(std::span<const ProbTimedSequence>(embedded), detail::ids_of(seqs), params);
}

namespace detail {

inline Clustering kmeans_once(std::span<const ProbTimedSequence> seqs, const ClusterParams& params,
                              std::uint64_t seed) {
  const std::size_t n = seqs.size();
  const std::size_t k = params.k;
  std::mt19937_64 rng(seed);
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  for (std::size_t i = 0; i < k; ++i) {
    std::uniform_int_distribution<std::size_t> pick(i, n - 1);
    std::swap(order[i], order[pick(rng)]);
  }

  Clustering c;
  for (std::size_t i = 0; i < k; ++i) c.centroids.push_back(seqs[order[i]]);
  std::vector<std::size_t> previous;
  std::vector<double> costs(n, 0.0);

  for (std::size_t round = 0; round < params.max_rounds; ++round) {
    // assignment: nearest centroid, ties to the lowest index
    c.labels.assign(n, 0);
    parallel_for(n, params.threads, [&](std::size_t i) {
      double best = kInf;
      std::size_t arg = 0;
      for (std::size_t j = 0; j < k; ++j) {
        const double d = drop_dtw_cost(c.centroids[j], seqs[i], params.metric);
        if (j == 0 || d < best) {
          best = d;
          arg = j;
        }
      }
      c.labels[i] = arg;
      costs[i] = best;
    });

    // an empty cluster takes the sequence farthest from its centroid
    for (;;) {
      auto sizes = c.sizes();
      auto empty = std::find(sizes.begin(), sizes.end(), 0);
      if (empty == sizes.end()) break;
      std::size_t far = n;
      for (std::size_t i = 0; i < n; ++i) {
        if (sizes[c.labels[i]] < 2) continue;
        if (far == n || costs[i] > costs[far]) far = i;
      }
      const auto target = static_cast<std::size_t>(empty - sizes.begin());
      c.labels[far] = target;
      c.centroids[target] = seqs[far];
      costs[far] = 0.0;
    }

    if (c.labels == previous) break;
    previous = c.labels;
    ++c.steps;

    // update: warm-started TSR per cluster, so no cluster's inertia can grow
    std::vector<std::vector<std::size_t>> members(k);
    for (std::size_t i = 0; i < n; ++i) members[c.labels[i]].push_back(i);
    for (std::size_t j = 0; j < k; ++j) {
      TsrConfig tsr = params.tsr;
      tsr.init = FromCenter{c.centroids[j]};
      tsr.threads = params.threads;
      const auto group = gather(seqs, members[j]);
      auto result = tsr_average(std::span<const ProbTimedSequence>(group), params.metric, tsr);
      c.centroids[j] = std::move(result.center);
      for (std::size_t m = 0; m < members[j].size(); ++m) costs[members[j][m]] = result.costs[m];
    }
    double total = 0.0;
    for (double v : costs) total += v;
    c.inertia_trace.push_back(total);
  }
  c.total_inertia = c.inertia_trace.empty() ? 0.0 : c.inertia_trace.back();
  if (c.inertia_trace.empty()) {
    for (double v : costs) c.total_inertia += v;
  }
  return c;
}

} // namespace detail

/// K-means: alternate nearest-centroid assignment and per-cluster TSR update
/// until assignments stop changing or `max_rounds` is reached.
inline Clustering kmeans_cluster(std::span<const ProbTimedSequence> seqs, std::vector<std::string> ids,
                                 const ClusterParams& params) {
  detail::check_cluster_inputs(seqs.size(), params);
  if (params.max_rounds < 1) throw ValidationError("max rounds must be >= 1");
  Clustering best;
  for (std::size_t r = 0; r < std::max<std::size_t>(1, params.restarts); ++r) {
    auto run = detail::kmeans_once(seqs, params, params.seed + r);
    if (r == 0 || run.total_inertia < best.total_inertia) best = std::move(run);
  }
  best.ids = std::move(ids);
  detail::canonicalize_labels(best);
  return best;
}

inline Clustering kmeans_cluster(std::span<const TimedSequence> seqs, const Alphabet& alphabet,
                                 const ClusterParams& params) {
  const auto embedded = embed_all(seqs, alphabet);
  return kmeans_cluster(std::span<const ProbTimedSequence>(embedded), detail::ids_of(seqs), params);
}

} // namespace dropwarp

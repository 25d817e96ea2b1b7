#include "mapforge/attnbench.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>

#include "mapforge/rng.hpp"

namespace mapforge {

QueryGrid QueryGrid::seeded(int n, int n_v, int d, std::uint64_t seed) {
  QueryGrid g(n, n_v, d);
  Rng rng(mix_seed(seed, 0xa77e));
  for (auto& v : g.values) v = rng.uniform(-1.0, 1.0);
  return g;
}

AttnWeights AttnWeights::seeded(int d, std::uint64_t seed) {
  AttnWeights w;
  w.d = d;
  const std::size_t sz = static_cast<std::size_t>(d) * d;
  w.wq.resize(sz);
  w.wk.resize(sz);
  w.wv.resize(sz);
  Rng rng(mix_seed(seed, 0xa77f));
  const double scale = 1.0 / std::sqrt(static_cast<double>(d));
  for (auto& v : w.wq) v = rng.uniform(-scale, scale);
  for (auto& v : w.wk) v = rng.uniform(-scale, scale);
  for (auto& v : w.wv) v = rng.uniform(-scale, scale);
  return w;
}

namespace {

// x_row (1 x d) times W (d x d) -> out (1 x d).
void project_row(const double* x, const std::vector<double>& w, int d,
                 double* out) {
  for (int c = 0; c < d; ++c) out[c] = 0.0;
  for (int r = 0; r < d; ++r) {
    const double xv = x[r];
    const double* wrow = w.data() + static_cast<std::size_t>(r) * d;
    for (int c = 0; c < d; ++c) out[c] += xv * wrow[c];
  }
}

// FLOP convention: matmul of (m x k)(k x n) costs 2mnk; the score scale
// costs 1 per entry; softmax costs 4 per entry (max-subtract, exp,
// sum-accumulate, divide).
struct PassCounters {
  std::size_t score_entries = 0;
  std::size_t flops = 0;
  std::size_t peak_score_bytes = 0;
};

// One batched attention pass: `sequences` lists token index sets; all score
// matrices of the pass are materialized together (one live buffer).
void attention_pass(const QueryGrid& in, QueryGrid& out,
                    const std::vector<std::vector<std::size_t>>& sequences,
                    const AttnWeights& w, PassCounters& counters) {
  const int d = in.d;
  const double inv_sqrt_d = 1.0 / std::sqrt(static_cast<double>(d));
  const std::size_t tokens = in.values.size() / d;

  // Projections over every token (each token appears in exactly one
  // sequence of the pass).
  std::vector<double> q(tokens * d), k(tokens * d), v(tokens * d);
  for (std::size_t t = 0; t < tokens; ++t) {
    const double* x = in.values.data() + t * d;
    project_row(x, w.wq, d, q.data() + t * d);
    project_row(x, w.wk, d, k.data() + t * d);
    project_row(x, w.wv, d, v.data() + t * d);
  }
  counters.flops += 3 * 2 * tokens * static_cast<std::size_t>(d) * d;

  // Batched score buffer for the whole pass.
  std::size_t total_scores = 0;
  for (const auto& seq : sequences) total_scores += seq.size() * seq.size();
  std::vector<double> scores(total_scores);
  counters.peak_score_bytes =
      std::max(counters.peak_score_bytes, total_scores * sizeof(double));

  std::size_t base = 0;
  for (const auto& seq : sequences) {
    const std::size_t len = seq.size();
    double* s = scores.data() + base;
    base += len * len;
    for (std::size_t a = 0; a < len; ++a) {
      const double* qa = q.data() + seq[a] * d;
      for (std::size_t b = 0; b < len; ++b) {
        const double* kb = k.data() + seq[b] * d;
        double acc = 0.0;
        for (int c = 0; c < d; ++c) acc += qa[c] * kb[c];
        s[a * len + b] = acc * inv_sqrt_d;
      }
    }
    counters.score_entries += len * len;
    counters.flops += 2 * len * len * static_cast<std::size_t>(d) + len * len;

    // Row softmax.
    for (std::size_t a = 0; a < len; ++a) {
      double* row = s + a * len;
      double mx = row[0];
      for (std::size_t b = 1; b < len; ++b) mx = std::max(mx, row[b]);
      double sum = 0.0;
      for (std::size_t b = 0; b < len; ++b) {
        row[b] = std::exp(row[b] - mx);
        sum += row[b];
      }
      for (std::size_t b = 0; b < len; ++b) row[b] /= sum;
    }
    counters.flops += 4 * len * len;

    // Weighted sum of values.
    for (std::size_t a = 0; a < len; ++a) {
      double* o = out.values.data() + seq[a] * d;
      const double* row = s + a * len;
      for (int c = 0; c < d; ++c) o[c] = 0.0;
      for (std::size_t b = 0; b < len; ++b) {
        const double* vb = v.data() + seq[b] * d;
        const double ab = row[b];
        for (int c = 0; c < d; ++c) o[c] += ab * vb[c];
      }
    }
    counters.flops += 2 * len * len * static_cast<std::size_t>(d);
  }
}

}  // namespace

AttnResult vanilla_attention(const QueryGrid& grid, const AttnWeights& w) {
  const auto start = std::chrono::steady_clock::now();
  const std::size_t tokens =
      static_cast<std::size_t>(grid.n) * grid.n_v;
  std::vector<std::vector<std::size_t>> sequences(1);
  sequences[0].resize(tokens);
  for (std::size_t t = 0; t < tokens; ++t) sequences[0][t] = t;

  AttnResult result;
  result.output = QueryGrid(grid.n, grid.n_v, grid.d);
  PassCounters counters;
  attention_pass(grid, result.output, sequences, w, counters);
  result.cost.score_entries = counters.score_entries;
  result.cost.flops = counters.flops;
  result.cost.peak_score_bytes = counters.peak_score_bytes;
  result.cost.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
          .count();
  return result;
}

AttnResult decoupled_attention(const QueryGrid& grid,
                               const AttnWeights& w_inter,
                               const AttnWeights& w_intra) {
  const auto start = std::chrono::steady_clock::now();

  // Pass 1: inter-instance, one sequence per point slot.
  std::vector<std::vector<std::size_t>> inter(grid.n_v);
  for (int j = 0; j < grid.n_v; ++j) {
    inter[j].resize(grid.n);
    for (int i = 0; i < grid.n; ++i)
      inter[j][i] = static_cast<std::size_t>(i) * grid.n_v + j;
  }
  // Pass 2: intra-instance, one sequence per instance.
  std::vector<std::vector<std::size_t>> intra(grid.n);
  for (int i = 0; i < grid.n; ++i) {
    intra[i].resize(grid.n_v);
    for (int j = 0; j < grid.n_v; ++j)
      intra[i][j] = static_cast<std::size_t>(i) * grid.n_v + j;
  }

  AttnResult result;
  QueryGrid mid(grid.n, grid.n_v, grid.d);
  result.output = QueryGrid(grid.n, grid.n_v, grid.d);
  // The two passes run sequentially, so the peak is the larger pass buffer.
  PassCounters c1, c2;
  attention_pass(grid, mid, inter, w_inter, c1);
  attention_pass(mid, result.output, intra, w_intra, c2);
  result.cost.score_entries = c1.score_entries + c2.score_entries;
  result.cost.flops = c1.flops + c2.flops;
  result.cost.peak_score_bytes =
      std::max(c1.peak_score_bytes, c2.peak_score_bytes);
  result.cost.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
          .count();
  return result;
}

AttnResult decoupled_attention(const QueryGrid& grid, const AttnWeights& w) {
  return decoupled_attention(grid, w, w);
}

std::vector<BenchRow> bench_attention(const std::vector<int>& n_values,
                                      int n_v, int d, int repetitions,
                                      std::uint64_t seed) {
  std::vector<BenchRow> rows;
  auto median = [](std::vector<double> v) {
    std::sort(v.begin(), v.end());
    return v[v.size() / 2];
  };
  for (int n : n_values) {
    const auto grid = QueryGrid::seeded(n, n_v, d, mix_seed(seed, n));
    const auto w = AttnWeights::seeded(d, seed);
    for (const std::string variant : {"vanilla", "decoupled"}) {
      std::vector<double> times;
      AttnCost cost;
      for (int r = 0; r < repetitions; ++r) {
        const auto res = variant == "vanilla" ? vanilla_attention(grid, w)
                                              : decoupled_attention(grid, w);
        cost = res.cost;
        times.push_back(res.cost.wall_seconds);
      }
      cost.wall_seconds = median(times);
      rows.push_back({variant, n, n_v, d, cost});
    }
  }
  return rows;
}

std::string bench_to_csv(const std::vector<BenchRow>& rows) {
  std::string csv =
      "variant,N,N_v,d,score_entries,flops,peak_score_bytes,median_seconds\n";
  char buf[256];
  for (const auto& r : rows) {
    std::snprintf(buf, sizeof(buf), "%s,%d,%d,%d,%zu,%zu,%zu,%.6g\n",
                  r.variant.c_str(), r.n, r.n_v, r.d, r.cost.score_entries,
                  r.cost.flops, r.cost.peak_score_bytes, r.cost.wall_seconds);
    csv += buf;
  }
  return csv;
}

}  // namespace mapforge

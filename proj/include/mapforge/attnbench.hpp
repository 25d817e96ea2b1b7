#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

namespace mapforge {

// Hierarchical query grid: N instances x N_v points x d channels, row-major.
struct QueryGrid {
  int n = 0;    // instances
  int n_v = 0;  // points per instance
  int d = 0;    // embedding width
  std::vector<double> values;

  QueryGrid() = default;
  QueryGrid(int n, int n_v, int d)
      : n(n), n_v(n_v), d(d),
        values(static_cast<std::size_t>(n) * n_v * d, 0.0) {}

  double* token(int i, int j) {
    return values.data() + (static_cast<std::size_t>(i) * n_v + j) * d;
  }
  const double* token(int i, int j) const {
    return values.data() + (static_cast<std::size_t>(i) * n_v + j) * d;
  }

  static QueryGrid seeded(int n, int n_v, int d, std::uint64_t seed);
};

// Single-head projection weights (d x d, row-major). Scores use Q/K, outputs
// use V; no output projection.
struct AttnWeights {
  int d = 0;
  std::vector<double> wq, wk, wv;

  static AttnWeights seeded(int d, std::uint64_t seed);
};

struct AttnCost {
  std::size_t score_entries = 0;     // score-matrix cells actually computed
  std::size_t flops = 0;             // documented convention, data-independent
  std::size_t peak_score_bytes = 0;  // largest live score buffer
  double wall_seconds = 0.0;
};

struct AttnResult {
  QueryGrid output;
  AttnCost cost;
};

// Scaled dot-product attention over the flattened sequence of length N*N_v;
// score entries = (N*N_v)^2.
AttnResult vanilla_attention(const QueryGrid& grid, const AttnWeights& w);

// Pass 1 attends over the N instances independently per point slot, pass 2
// over the N_v points independently per instance; score entries =
// N_v*N^2 + N*N_v^2. Both passes share the projection weights.
AttnResult decoupled_attention(const QueryGrid& grid, const AttnWeights& w);
// Separate weights per pass.
AttnResult decoupled_attention(const QueryGrid& grid,
                               const AttnWeights& w_inter,
                               const AttnWeights& w_intra);

struct BenchRow {
  std::string variant;  // "vanilla" | "decoupled"
  int n = 0, n_v = 0, d = 0;
  AttnCost cost;  // wall_seconds holds the median over repetitions
};

// Per-N costs for both variants on seeded grids; deterministic count columns,
// median wall time over `repetitions` (>= 3). Single-threaded.
std::vector<BenchRow> bench_attention(const std::vector<int>& n_values,
                                      int n_v, int d, int repetitions,
                                      std::uint64_t seed = 0);

// Header: variant,N,N_v,d,score_entries,flops,peak_score_bytes,median_seconds
std::string bench_to_csv(const std::vector<BenchRow>& rows);

}  // namespace mapforge

#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "rpys/clustering.hpp"
#include "rpys/corpus.hpp"
#include "rpys/exec.hpp"
#include "rpys/spectrum.hpp"

namespace rpys {

enum class Scale { Linear, Log1p };

std::string_view to_string(Scale s);
std::optional<Scale> scale_from_string(std::string_view s);

struct SeriesPoint {
  int year = 0;
  double value = 0.0;
};

// One growth regime. slope and intercept are on the fitted scale; intercept
// is the fitted value at start_rpy.
struct Segment {
  int start_rpy = 0;
  int end_rpy = 0;
  double slope = 0.0;
  double intercept = 0.0;
  double sse = 0.0;

  bool operator==(const Segment&) const = default;
};

struct SegmentFit {
  std::vector<Segment> segments;
  int k = 0;
  double total_sse = 0.0;
  double bic = 0.0;
  Scale scale = Scale::Log1p;

  bool operator==(const SegmentFit&) const = default;
};

struct SegmentOptions {
  int min_len = 5;
  Scale scale = Scale::Log1p;
  Exec exec = Exec::Parallel;
};

std::vector<SeriesPoint> series_from_spectrum(std::span<const SpectrumPoint> spectrum);

// Optimal k-segment piecewise OLS fit (free discontinuities at breakpoints)
// by dynamic programming over breakpoints; ties resolve to the earliest
// breakpoints. Throws Error(InvalidK), Error(SeriesTooShort) or
// Error(InvalidArgument) for non-dense years.
SegmentFit fit_fixed_k(std::span<const SeriesPoint> series, int k, const SegmentOptions& options = {});

// BIC-minimizing fit over k = 1..k_max (infeasible k skipped, ties to the
// smaller k).
SegmentFit select_k(std::span<const SeriesPoint> series, int k_max, const SegmentOptions& options = {});

// n ln(sse / n) + (3k - 1) ln n, with sse floored at a tiny fraction of the
// total sum of squares so exact fits compare by penalty alone.
double segment_bic(std::size_t n, double total_sse, int k, double total_sum_squares);

// Per segment, clusters whose year falls in its range ranked by n_cr
// descending (ties by canonical raw), truncated to k_per_segment.
std::vector<std::vector<RankedCluster>> segment_landmarks(const SegmentFit& fit, const Partition& clusters,
                                                          const Corpus& corpus, std::size_t k_per_segment,
                                                          const SpectrumOptions& options = {});

}  // namespace rpys

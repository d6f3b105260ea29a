#include "rpys/segments.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "rpys/error.hpp"

namespace rpys {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// O(1) least-squares line SSE for any contiguous range via prefix sums of
// centered coordinates.
class SegmentCost {
 public:
  explicit SegmentCost(std::span<const double> y) : n_(y.size()), sx_(n_ + 1), sy_(n_ + 1), sxx_(n_ + 1), syy_(n_ + 1), sxy_(n_ + 1) {
    long double mean = 0;
    for (double v : y) mean += v;
    mean /= static_cast<long double>(std::max<std::size_t>(n_, 1));
    const long double mid = (static_cast<long double>(n_) - 1) / 2;
    for (std::size_t i = 0; i < n_; ++i) {
      const long double x = static_cast<long double>(i) - mid;
      const long double v = static_cast<long double>(y[i]) - mean;
      sx_[i + 1] = sx_[i] + x;
      sy_[i + 1] = sy_[i] + v;
      sxx_[i + 1] = sxx_[i] + x * x;
      syy_[i + 1] = syy_[i] + v * v;
      sxy_[i + 1] = sxy_[i] + x * v;
    }
  }

  // SSE of the OLS line through points first..last inclusive.
  double sse(std::size_t first, std::size_t last) const {
    const auto m = static_cast<long double>(last - first + 1);
    if (last == first) return 0.0;
    const long double sx = sx_[last + 1] - sx_[first];
    const long double sy = sy_[last + 1] - sy_[first];
    const long double cxx = (sxx_[last + 1] - sxx_[first]) - sx * sx / m;
    const long double cyy = (syy_[last + 1] - syy_[first]) - sy * sy / m;
    const long double cxy = (sxy_[last + 1] - sxy_[first]) - sx * sy / m;
    const long double r = cyy - cxy * cxy / cxx;
    return r > 0 ? static_cast<double>(r) : 0.0;
  }

 private:
  std::size_t n_;
  std::vector<long double> sx_, sy_, sxx_, syy_, sxy_;
};

struct LineFit {
  double slope = 0.0;
  double intercept = 0.0;
  double sse = 0.0;
};

// Two-pass OLS with x measured from the first point.
LineFit fit_line(std::span<const double> y) {
  const std::size_t m = y.size();
  if (m == 1) return {0.0, y[0], 0.0};
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < m; ++i) {
    mx += static_cast<double>(i);
    my += y[i];
  }
  mx /= static_cast<double>(m);
  my /= static_cast<double>(m);
  double sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < m; ++i) {
    const double dx = static_cast<double>(i) - mx;
    sxx += dx * dx;
    sxy += dx * (y[i] - my);
  }
  LineFit f;
  f.slope = sxy / sxx;
  f.intercept = my - f.slope * mx;
  for (std::size_t i = 0; i < m; ++i) {
    const double r = y[i] - (f.intercept + f.slope * static_cast<double>(i));
    f.sse += r * r;
  }
  return f;
}

// best[s][i]: minimal SSE covering points i..n-1 with s segments;
// cut[s][i]: last index of the first of those segments.
struct BreakpointTable {
  std::vector<std::vector<double>> best;
  std::vector<std::vector<std::size_t>> cut;
};

BreakpointTable solve_breakpoints(const SegmentCost& cost, std::size_t n, int k_max, std::size_t min_len, Exec exec) {
  BreakpointTable t;
  const auto layers = static_cast<std::size_t>(k_max) + 1;
  t.best.assign(layers, std::vector<double>(n + 1, kInf));
  t.cut.assign(layers, std::vector<std::size_t>(n + 1, n));
  for (std::size_t i = 0; i + min_len <= n; ++i) {
    t.best[1][i] = cost.sse(i, n - 1);
    t.cut[1][i] = n - 1;
  }
  for (std::size_t s = 2; s < layers; ++s) {
    const auto& next = t.best[s - 1];
    auto& best = t.best[s];
    auto& cut = t.cut[s];
    auto relax = [&](std::size_t i) {
      // the first segment ends at j; s-1 segments of min_len must fit after it
      const std::size_t tail = (s - 1) * min_len;
      if (i + min_len + tail > n) return;
      double b = kInf;
      std::size_t arg = n;
      for (std::size_t j = i + min_len - 1; j + 1 + tail <= n; ++j) {
        if (next[j + 1] == kInf) continue;
        const double c = cost.sse(i, j) + next[j + 1];
        if (arg == n || c < b - 1e-12 * (1.0 + std::abs(b))) {
          b = c;
          arg = j;
        }
      }
      best[i] = b;
      cut[i] = arg;
    };
    const auto count = static_cast<std::ptrdiff_t>(n);
    if (exec == Exec::Parallel) {
#pragma omp parallel for schedule(dynamic, 8)
      for (std::ptrdiff_t i = 0; i < count; ++i) relax(static_cast<std::size_t>(i));
    } else {
      for (std::ptrdiff_t i = 0; i < count; ++i) relax(static_cast<std::size_t>(i));
    }
  }
  return t;
}

std::vector<double> transformed(std::span<const SeriesPoint> series, Scale scale) {
  std::vector<double> y;
  y.reserve(series.size());
  for (const auto& p : series) {
    if (scale == Scale::Log1p) {
      if (!(p.value > -1.0)) throw Error(ErrorCode::InvalidArgument, "log1p scale needs values > -1");
      y.push_back(std::log1p(p.value));
    } else {
      y.push_back(p.value);
    }
  }
  return y;
}

void validate(std::span<const SeriesPoint> series, const SegmentOptions& options) {
  if (options.min_len < 1) throw Error(ErrorCode::InvalidArgument, "min_len must be at least 1");
  for (std::size_t i = 1; i < series.size(); ++i) {
    if (series[i].year != series[i - 1].year + 1) {
      throw Error(ErrorCode::InvalidArgument, "series years must be consecutive");
    }
  }
}

double total_sum_squares(std::span<const double> y) {
  if (y.empty()) return 0.0;
  double mean = 0;
  for (double v : y) mean += v;
  mean /= static_cast<double>(y.size());
  double s = 0;
  for (double v : y) s += (v - mean) * (v - mean);
  return s;
}

SegmentFit reconstruct(const BreakpointTable& t, std::span<const SeriesPoint> series, std::span<const double> y,
                       int k, Scale scale) {
  SegmentFit fit;
  fit.k = k;
  fit.scale = scale;
  std::size_t i = 0;
  for (auto s = static_cast<std::size_t>(k); s >= 1; --s) {
    const std::size_t j = t.cut[s][i];
    const LineFit line = fit_line(y.subspan(i, j - i + 1));
    fit.segments.push_back({series[i].year, series[j].year, line.slope, line.intercept, line.sse});
    fit.total_sse += line.sse;
    i = j + 1;
  }
  fit.bic = segment_bic(series.size(), fit.total_sse, k, total_sum_squares(y));
  return fit;
}

}  // namespace

std::string_view to_string(Scale s) { return s == Scale::Linear ? "linear" : "log1p"; }

std::optional<Scale> scale_from_string(std::string_view s) {
  if (s == "linear") return Scale::Linear;
  if (s == "log1p") return Scale::Log1p;
  return std::nullopt;
}

std::vector<SeriesPoint> series_from_spectrum(std::span<const SpectrumPoint> spectrum) {
  std::vector<SeriesPoint> out;
  out.reserve(spectrum.size());
  for (const auto& p : spectrum) out.push_back({p.rpy, static_cast<double>(p.ncr)});
  return out;
}

double segment_bic(std::size_t n, double total_sse, int k, double total_sum_squares) {
  const auto nd = static_cast<double>(n);
  const double floor = 1e-12 * std::max(1.0, total_sum_squares);
  const double params = 3.0 * k - 1.0;
  return nd * std::log(std::max(total_sse, floor) / nd) + params * std::log(nd);
}

SegmentFit fit_fixed_k(std::span<const SeriesPoint> series, int k, const SegmentOptions& options) {
  if (k < 1) throw Error(ErrorCode::InvalidK, "k must be at least 1");
  validate(series, options);
  const auto min_len = static_cast<std::size_t>(options.min_len);
  if (series.empty() || series.size() < static_cast<std::size_t>(k) * min_len) {
    throw Error(ErrorCode::SeriesTooShort, "series of length " + std::to_string(series.size()) + " cannot hold " +
                                               std::to_string(k) + " segments of at least " +
                                               std::to_string(min_len) + " years");
  }
  const auto y = transformed(series, options.scale);
  const SegmentCost cost(y);
  const auto table = solve_breakpoints(cost, y.size(), k, min_len, options.exec);
  return reconstruct(table, series, y, k, options.scale);
}

SegmentFit select_k(std::span<const SeriesPoint> series, int k_max, const SegmentOptions& options) {
  if (k_max < 1) throw Error(ErrorCode::InvalidK, "k_max must be at least 1");
  validate(series, options);
  const auto min_len = static_cast<std::size_t>(options.min_len);
  const int feasible = static_cast<int>(std::min<std::size_t>(static_cast<std::size_t>(k_max), series.size() / min_len));
  if (feasible < 1) {
    throw Error(ErrorCode::SeriesTooShort, "series of length " + std::to_string(series.size()) +
                                               " is shorter than min_len " + std::to_string(min_len));
  }
  const auto y = transformed(series, options.scale);
  const SegmentCost cost(y);
  // one table serves every k: best[s][0] is the optimal s-segment fit
  const auto table = solve_breakpoints(cost, y.size(), feasible, min_len, options.exec);
  std::optional<SegmentFit> chosen;
  for (int k = 1; k <= feasible; ++k) {
    SegmentFit fit = reconstruct(table, series, y, k, options.scale);
    if (!chosen || fit.bic < chosen->bic - 1e-9 * (1.0 + std::abs(chosen->bic))) chosen = std::move(fit);
  }
  return *chosen;
}

std::vector<std::vector<RankedCluster>> segment_landmarks(const SegmentFit& fit, const Partition& clusters,
                                                          const Corpus& /*corpus*/, std::size_t k_per_segment,
                                                          const SpectrumOptions& options) {
  if (k_per_segment == 0) throw Error(ErrorCode::InvalidArgument, "k_per_segment must be at least 1");
  std::vector<std::vector<RankedCluster>> out;
  for (const auto& seg : fit.segments) {
    std::vector<RankedCluster> ranked;
    for (const auto& c : clusters.clusters) {
      if (c.rpy && *c.rpy >= seg.start_rpy && *c.rpy <= seg.end_rpy) {
        ranked.push_back({c.cluster_id, cluster_ncr(c, options.dedup_pairs), c.canonical().raw});
      }
    }
    std::sort(ranked.begin(), ranked.end(), [](const RankedCluster& a, const RankedCluster& b) {
      if (a.n_cr != b.n_cr) return a.n_cr > b.n_cr;
      if (a.canonical != b.canonical) return a.canonical < b.canonical;
      return a.cluster_id < b.cluster_id;
    });
    if (ranked.size() > k_per_segment) ranked.resize(k_per_segment);
    out.push_back(std::move(ranked));
  }
  return out;
}

}  // namespace rpys

#include "rpys/spectrum.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <set>
#include <unordered_map>

#include "rpys/error.hpp"

namespace rpys {
namespace {

double median_of(std::vector<long> v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  if (n % 2 == 1) return static_cast<double>(v[n / 2]);
  return (static_cast<double>(v[n / 2 - 1]) + static_cast<double>(v[n / 2])) / 2.0;
}

bool ranks_before(const RankedCluster& a, const RankedCluster& b) {
  if (a.n_cr != b.n_cr) return a.n_cr > b.n_cr;
  if (a.canonical != b.canonical) return a.canonical < b.canonical;
  return a.cluster_id < b.cluster_id;
}

}  // namespace

long cluster_ncr(const RefCluster& cluster, bool dedup_pairs) {
  if (!dedup_pairs) return static_cast<long>(cluster.members.size());
  std::set<std::string_view> citing;
  for (const auto& m : cluster.members) citing.insert(m.raw_id.citing_id);
  return static_cast<long>(citing.size());
}

namespace {

std::map<int, long> profile_with(const RefCluster& cluster, const std::unordered_map<std::string_view, int>& pub_year,
                                 bool dedup_pairs) {
  std::map<int, long> profile;
  std::set<std::string_view> seen;
  for (const auto& m : cluster.members) {
    if (dedup_pairs && !seen.insert(m.raw_id.citing_id).second) continue;
    auto it = pub_year.find(m.raw_id.citing_id);
    if (it != pub_year.end()) ++profile[it->second];
  }
  return profile;
}

std::unordered_map<std::string_view, int> publication_years(const Corpus& corpus) {
  std::unordered_map<std::string_view, int> pub_year;
  for (const auto& p : corpus.publications) pub_year.emplace(p.id, p.pub_year);
  return pub_year;
}

}  // namespace

std::map<int, long> citing_year_profile(const RefCluster& cluster, const Corpus& corpus, bool dedup_pairs) {
  return profile_with(cluster, publication_years(corpus), dedup_pairs);
}

std::vector<SpectrumPoint> spectrum_from_counts(int first_year, std::span<const long> ncr, int window) {
  if (window < 1 || window % 2 == 0) {
    throw Error(ErrorCode::InvalidArgument, "median window must be a positive odd number, got " + std::to_string(window));
  }
  const auto n = static_cast<std::ptrdiff_t>(ncr.size());
  const std::ptrdiff_t half = window / 2;
  std::vector<SpectrumPoint> out(ncr.size());
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    const std::ptrdiff_t lo = std::max<std::ptrdiff_t>(0, i - half);
    const std::ptrdiff_t hi = std::min<std::ptrdiff_t>(n - 1, i + half);
    std::vector<long> w(ncr.begin() + lo, ncr.begin() + hi + 1);
    auto& p = out[static_cast<std::size_t>(i)];
    p.rpy = first_year + static_cast<int>(i);
    p.ncr = ncr[static_cast<std::size_t>(i)];
    p.deviation = static_cast<double>(p.ncr) - median_of(std::move(w));
    if (p.deviation == 0.0) p.deviation = 0.0;  // no negative zero
  }
  return out;
}

std::vector<SpectrumPoint> compute_spectrum(const Partition& clusters, const Corpus& /*corpus*/,
                                            const SpectrumOptions& options) {
  std::map<int, long> counts;
  for (const auto& c : clusters.clusters) {
    if (c.rpy) counts[*c.rpy] += cluster_ncr(c, options.dedup_pairs);
  }
  if (counts.empty()) throw Error(ErrorCode::EmptyCorpus, "no cited reference has a known publication year");
  const int first = counts.begin()->first;
  const int last = counts.rbegin()->first;
  std::vector<long> dense(static_cast<std::size_t>(last - first + 1), 0);
  for (const auto& [year, n] : counts) dense[static_cast<std::size_t>(year - first)] = n;
  return spectrum_from_counts(first, dense, options.window);
}

std::vector<Peak> detect_peaks(std::span<const SpectrumPoint> spectrum, double min_deviation,
                               std::optional<int> max_rpy) {
  std::vector<Peak> peaks;
  for (std::size_t i = 0; i < spectrum.size(); ++i) {
    const auto& p = spectrum[i];
    if (max_rpy && p.rpy > *max_rpy) continue;
    if (!(p.deviation > 0.0) || p.deviation < min_deviation) continue;
    if (i > 0 && !(p.ncr > spectrum[i - 1].ncr)) continue;
    if (i + 1 < spectrum.size() && !(p.ncr > spectrum[i + 1].ncr)) continue;
    peaks.push_back({p.rpy, p.deviation, p.ncr, {}});
  }
  std::stable_sort(peaks.begin(), peaks.end(), [](const Peak& a, const Peak& b) { return a.deviation > b.deviation; });
  return peaks;
}

std::vector<RankedCluster> top_clusters_for_year(int rpy, std::size_t k, const Partition& clusters,
                                                 const Corpus& /*corpus*/, const SpectrumOptions& options) {
  if (k == 0) throw Error(ErrorCode::InvalidArgument, "k must be at least 1");
  std::vector<RankedCluster> ranked;
  for (const auto& c : clusters.clusters) {
    if (c.rpy == rpy) ranked.push_back({c.cluster_id, cluster_ncr(c, options.dedup_pairs), c.canonical().raw});
  }
  std::sort(ranked.begin(), ranked.end(), ranks_before);
  if (ranked.size() > k) ranked.resize(k);
  return ranked;
}

void attach_top_clusters(std::vector<Peak>& peaks, std::size_t k, const Partition& clusters, const Corpus& corpus,
                         const SpectrumOptions& options) {
  for (auto& p : peaks) p.top_clusters = top_clusters_for_year(p.rpy, k, clusters, corpus, options);
}

double percentile_rank(long value, std::span<const long> comparison_set) {
  if (comparison_set.size() <= 1) return 100.0;
  const auto below = std::count_if(comparison_set.begin(), comparison_set.end(), [&](long v) { return v < value; });
  return 100.0 * static_cast<double>(below) / static_cast<double>(comparison_set.size() - 1);
}

double percentile_value(std::span<const long> sorted_values, double percentile) {
  if (sorted_values.empty()) return 0.0;
  const double pos = percentile / 100.0 * static_cast<double>(sorted_values.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, sorted_values.size() - 1);
  const double frac = pos - static_cast<double>(lo);
  return static_cast<double>(sorted_values[lo]) +
         frac * static_cast<double>(sorted_values[hi] - sorted_values[lo]);
}

std::vector<ClusterIndicators> compute_indicators(const Partition& clusters, const Corpus& corpus,
                                                  const SpectrumOptions& options) {
  const auto pub_year = publication_years(corpus);

  std::vector<ClusterIndicators> out;
  for (const auto& c : clusters.clusters) {
    if (!c.rpy) continue;
    ClusterIndicators ind;
    ind.cluster_id = c.cluster_id;
    ind.rpy = *c.rpy;
    ind.n_cr = cluster_ncr(c, options.dedup_pairs);
    ind.citing_year_profile = profile_with(c, pub_year, options.dedup_pairs);
    out.push_back(std::move(ind));
  }
  if (out.empty()) throw Error(ErrorCode::EmptyPartition, "no cluster with a known publication year");

  std::vector<long> all;
  std::map<int, std::vector<long>> by_rpy;
  std::map<int, std::vector<long>> by_citing_year;
  for (const auto& ind : out) {
    all.push_back(ind.n_cr);
    by_rpy[ind.rpy].push_back(ind.n_cr);
    for (const auto& [year, n] : ind.citing_year_profile) by_citing_year[year].push_back(n);
  }
  std::map<int, std::array<double, 3>> top_cut;  // citing year -> value at the 90th, 75th, 50th percentile
  for (auto& [year, counts] : by_citing_year) {
    std::sort(counts.begin(), counts.end());
    top_cut[year] = {percentile_value(counts, 90.0), percentile_value(counts, 75.0), percentile_value(counts, 50.0)};
  }
  constexpr double kTol = 1e-9;
  for (auto& ind : out) {
    ind.perc_all = percentile_rank(ind.n_cr, all);
    ind.perc_yr = percentile_rank(ind.n_cr, by_rpy[ind.rpy]);
    for (const auto& [year, n] : ind.citing_year_profile) {
      const auto& cut = top_cut[year];
      const auto v = static_cast<double>(n) + kTol;
      ind.n_top10 += v >= cut[0];
      ind.n_top25 += v >= cut[1];
      ind.n_top50 += v >= cut[2];
    }
  }
  return out;
}

}  // namespace rpys

#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "rpys/clustering.hpp"
#include "rpys/corpus.hpp"

namespace rpys {

struct SpectrumOptions {
  int window = 5;            // odd width of the centered median window
  bool dedup_pairs = true;   // count each (citing publication, cluster) pair once
};

struct SpectrumPoint {
  int rpy = 0;
  long ncr = 0;
  double deviation = 0.0;  // ncr minus the median ncr of the window around rpy

  bool operator==(const SpectrumPoint&) const = default;
};

struct RankedCluster {
  std::string cluster_id;
  long n_cr = 0;
  std::string canonical;

  bool operator==(const RankedCluster&) const = default;
};

struct Peak {
  int rpy = 0;
  double deviation = 0.0;
  long ncr = 0;
  std::vector<RankedCluster> top_clusters;
};

struct ClusterIndicators {
  std::string cluster_id;
  int rpy = 0;
  long n_cr = 0;
  double perc_yr = 0.0;
  double perc_all = 0.0;
  int n_top10 = 0;
  int n_top25 = 0;
  int n_top50 = 0;
  std::map<int, long> citing_year_profile;
};

// Number of citing publications referencing the cluster (or raw member
// count when pair dedup is off).
long cluster_ncr(const RefCluster& cluster, bool dedup_pairs = true);

// Citing year -> number of citing publications (or raw members without
// pair dedup) referencing the cluster. Members whose citing id is not in the
// corpus are ignored.
std::map<int, long> citing_year_profile(const RefCluster& cluster, const Corpus& corpus, bool dedup_pairs = true);

// Dense spectrum over [first_year, first_year + ncr.size()) with median
// deviations. Throws Error(InvalidArgument) for an even or non-positive window.
std::vector<SpectrumPoint> spectrum_from_counts(int first_year, std::span<const long> ncr, int window = 5);

// Throws Error(EmptyCorpus) when no cluster has a known year.
std::vector<SpectrumPoint> compute_spectrum(const Partition& clusters, const Corpus& corpus,
                                            const SpectrumOptions& options = {});

// Strict local maxima with positive deviation >= min_deviation, sorted by
// deviation descending (ties by year). top_clusters is left empty.
std::vector<Peak> detect_peaks(std::span<const SpectrumPoint> spectrum, double min_deviation = 0.0,
                               std::optional<int> max_rpy = std::nullopt);

// Ranked by n_cr descending, ties by canonical raw string ascending.
std::vector<RankedCluster> top_clusters_for_year(int rpy, std::size_t k, const Partition& clusters,
                                                 const Corpus& corpus, const SpectrumOptions& options = {});

void attach_top_clusters(std::vector<Peak>& peaks, std::size_t k, const Partition& clusters, const Corpus& corpus,
                         const SpectrumOptions& options = {});

// Indicators for every cluster with a known year, in cluster_id order.
// Throws Error(EmptyPartition) when there is none.
std::vector<ClusterIndicators> compute_indicators(const Partition& clusters, const Corpus& corpus,
                                                  const SpectrumOptions& options = {});

// 100 * (#values strictly below value) / (n - 1); a single-element set gives 100.
double percentile_rank(long value, std::span<const long> comparison_set);

// Linear interpolation between closest ranks of the sorted values.
double percentile_value(std::span<const long> sorted_values, double percentile);

}  // namespace rpys

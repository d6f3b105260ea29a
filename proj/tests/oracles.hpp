#pragma once

// Independent reference implementations used only by tests. Nothing here
// calls into the code paths it is used to check.

#include <cstdint>
#include <random>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "rpys/clustering.hpp"
#include "rpys/corpus.hpp"
#include "rpys/segments.hpp"

namespace oracle {

std::string read_fixture(const std::string& name);

// Full-matrix edit distance over code points.
std::size_t edit_distance(const std::string& a, const std::string& b);

using MemberSet = std::set<rpys::RawId>;
using PartitionSets = std::set<MemberSet>;

PartitionSets as_sets(const rpys::Partition& p);

// Pairwise similarity graph over all refs (no blocking structure), edges
// only between refs with equal year and equal first author letter, closed
// transitively by breadth-first search.
PartitionSets brute_force_clusters(const std::vector<rpys::ParsedCitedRef>& refs, double threshold);

// True iff every set of `fine` lies inside some set of `coarse`.
bool refines(const PartitionSets& fine, const PartitionSets& coarse);

// Synthetic cited refs: `works` base works with planted variants (author
// typo, volume drop, year +-1, DOI on some copies) spread over `n` refs.
std::vector<rpys::ParsedCitedRef> synthetic_refs(std::mt19937_64& rng, std::size_t n, std::size_t works);

struct CitingRecord {
  int year = 0;
  std::string title;
  std::vector<std::string> refs;
};

// Renders records as a WoS tagged export.
std::string wos_text(const std::vector<CitingRecord>& records);

// Distinct (citing publication, cluster) pairs for clusters with a year.
std::size_t distinct_pair_count(const rpys::Partition& p);

struct ExhaustiveFit {
  double sse = 0.0;
  std::vector<std::size_t> ends;  // last index of each segment
};

// Minimum total SSE over every placement of k-1 breakpoints with segments of
// at least min_len points; OLS per segment by the normal equations.
ExhaustiveFit exhaustive_segmentation(const std::vector<double>& y, int k, int min_len);

double ols_sse(const std::vector<double>& y, std::size_t first, std::size_t last);

struct PlantedSeries {
  std::vector<rpys::SeriesPoint> series;
  std::vector<int> break_years;  // first year of every segment after the first
};

// Piecewise-linear log-scale series (levels jump and slopes change at each
// boundary) with Gaussian noise, returned on the count scale expm1(y).
PlantedSeries planted_series(std::uint64_t seed, int first_year, const std::vector<int>& lengths,
                             const std::vector<double>& slopes, const std::vector<double>& jumps, double sigma);

}  // namespace oracle

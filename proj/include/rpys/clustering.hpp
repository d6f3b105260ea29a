#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "rpys/exec.hpp"
#include "rpys/refparse.hpp"

namespace rpys {

inline constexpr double kDefaultThreshold = 0.75;

// A group of variant cited-reference strings treated as one work.
struct RefCluster {
  std::string cluster_id;               // hash of the sorted member raw ids
  std::vector<ParsedCitedRef> members;  // sorted by raw_id
  std::size_t canonical_index = 0;
  std::optional<int> rpy;  // most frequent member year, ties to the smallest

  const ParsedCitedRef& canonical() const { return members[canonical_index]; }
  bool operator==(const RefCluster&) const = default;
};

// Builds a cluster from its members, deriving id, canonical member and year.
RefCluster make_cluster(std::vector<ParsedCitedRef> members);

std::string cluster_id_for(const std::vector<RawId>& sorted_ids);

// Clusters sorted by cluster_id; every parsed ref belongs to exactly one.
struct Partition {
  std::vector<RefCluster> clusters;

  const RefCluster* find(std::string_view cluster_id) const;
  std::size_t member_count() const;
  bool operator==(const Partition&) const = default;
};

// Blocks refs by (rpy, first letter of first_author) and takes the transitive
// closure of ref_similarity >= threshold inside each block. Refs without a
// year stay singletons. Throws Error(InvalidThreshold) unless 0 < t <= 1.
Partition cluster_refs(const std::vector<ParsedCitedRef>& refs, double threshold = kDefaultThreshold,
                       Exec exec = Exec::Parallel);

// The blocking key of a ref with a known year.
std::string block_key(const ParsedCitedRef& ref);

enum class DecisionKind { Merge, Split };

struct MergeDecision {
  DecisionKind kind = DecisionKind::Merge;
  std::vector<std::string> targets;  // Merge: clusters to union; Split: the single cluster to split
  std::vector<RawId> subset;         // Split: members moved into a fresh cluster
  std::string timestamp;
  std::optional<std::string> note;

  bool operator==(const MergeDecision&) const = default;
};

// Returns a new partition. Throws Error(UnknownCluster), Error(InvalidSplitSubset)
// or Error(InvalidDecision).
Partition apply_decision(const Partition& partition, const MergeDecision& decision);

}  // namespace rpys

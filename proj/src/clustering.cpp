#include "rpys/clustering.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <set>
#include <unordered_map>

#include "rpys/error.hpp"
#include "rpys/hash.hpp"
#include "rpys/text.hpp"

namespace rpys {
namespace {

class UnionFind {
 public:
  explicit UnionFind(std::size_t n) : parent_(n) { std::iota(parent_.begin(), parent_.end(), 0); }

  std::size_t find(std::size_t x) {
    while (parent_[x] != x) {
      parent_[x] = parent_[parent_[x]];
      x = parent_[x];
    }
    return x;
  }

  void unite(std::size_t a, std::size_t b) {
    a = find(a);
    b = find(b);
    if (a == b) return;
    if (a > b) std::swap(a, b);
    parent_[b] = a;
  }

 private:
  std::vector<std::size_t> parent_;
};

std::string field_key(const ParsedCitedRef& r) {
  std::string key = r.first_author;
  key += '\x1f';
  key += r.rpy ? std::to_string(*r.rpy) : "";
  key += '\x1f';
  key += r.source;
  for (const auto* f : {&r.volume, &r.page, &r.doi}) {
    key += '\x1f';
    key += *f ? "+" + **f : "-";
  }
  return key;
}

// Components of one block as lists of indices into `refs`. Refs with
// identical parsed fields score 1.0 against each other and identically
// against everything else, so only one representative per field tuple enters
// the pairwise pass.
std::vector<std::vector<std::size_t>> cluster_block(const std::vector<ParsedCitedRef>& refs,
                                                    const std::vector<std::size_t>& block, double threshold) {
  std::vector<std::size_t> reps;
  std::vector<std::size_t> rep_of(block.size());
  std::unordered_map<std::string, std::size_t> seen;
  for (std::size_t i = 0; i < block.size(); ++i) {
    auto [it, inserted] = seen.emplace(field_key(refs[block[i]]), reps.size());
    if (inserted) reps.push_back(i);
    rep_of[i] = it->second;
  }

  UnionFind uf(reps.size());
  for (std::size_t a = 0; a < reps.size(); ++a) {
    for (std::size_t b = a + 1; b < reps.size(); ++b) {
      if (uf.find(a) == uf.find(b)) continue;
      if (ref_similarity(refs[block[reps[a]]], refs[block[reps[b]]]) >= threshold) uf.unite(a, b);
    }
  }

  std::map<std::size_t, std::vector<std::size_t>> groups;
  for (std::size_t i = 0; i < block.size(); ++i) groups[uf.find(rep_of[i])].push_back(block[i]);
  std::vector<std::vector<std::size_t>> out;
  out.reserve(groups.size());
  for (auto& [root, members] : groups) out.push_back(std::move(members));
  return out;
}

void sort_clusters(std::vector<RefCluster>& clusters) {
  std::sort(clusters.begin(), clusters.end(),
            [](const RefCluster& a, const RefCluster& b) { return a.cluster_id < b.cluster_id; });
}

}  // namespace

std::string cluster_id_for(const std::vector<RawId>& sorted_ids) {
  Fnv1a h;
  for (const auto& id : sorted_ids) {
    h.update(id.citing_id);
    h.update("#");
    h.update(std::to_string(id.position));
    h.update("\n");
  }
  return "c" + h.hex();
}

RefCluster make_cluster(std::vector<ParsedCitedRef> members) {
  std::sort(members.begin(), members.end(),
            [](const ParsedCitedRef& a, const ParsedCitedRef& b) { return a.raw_id < b.raw_id; });
  RefCluster c;
  std::vector<RawId> ids;
  ids.reserve(members.size());
  for (const auto& m : members) ids.push_back(m.raw_id);
  c.cluster_id = cluster_id_for(ids);

  std::map<std::string_view, std::size_t> raw_counts;
  std::map<int, std::size_t> year_counts;
  for (const auto& m : members) {
    ++raw_counts[m.raw];
    if (m.rpy) ++year_counts[*m.rpy];
  }
  // std::map iterates ascending, so strict '>' keeps the smallest key on ties
  std::string_view best_raw;
  std::size_t best_raw_count = 0;
  for (const auto& [raw, n] : raw_counts) {
    if (n > best_raw_count) {
      best_raw = raw;
      best_raw_count = n;
    }
  }
  for (std::size_t i = 0; i < members.size(); ++i) {
    if (members[i].raw == best_raw) {
      c.canonical_index = i;
      break;
    }
  }
  std::size_t best_year_count = 0;
  for (const auto& [year, n] : year_counts) {
    if (n > best_year_count) {
      c.rpy = year;
      best_year_count = n;
    }
  }
  c.members = std::move(members);
  return c;
}

const RefCluster* Partition::find(std::string_view cluster_id) const {
  auto it = std::lower_bound(clusters.begin(), clusters.end(), cluster_id,
                             [](const RefCluster& c, std::string_view id) { return c.cluster_id < id; });
  return it != clusters.end() && it->cluster_id == cluster_id ? &*it : nullptr;
}

std::size_t Partition::member_count() const {
  std::size_t n = 0;
  for (const auto& c : clusters) n += c.members.size();
  return n;
}

std::string block_key(const ParsedCitedRef& ref) {
  std::string key = ref.rpy ? std::to_string(*ref.rpy) : "?";
  key += '|';
  const std::u32string author = text::decode_utf8(ref.first_author);
  if (!author.empty()) key += text::encode_utf8(author.substr(0, 1));
  return key;
}

Partition cluster_refs(const std::vector<ParsedCitedRef>& refs, double threshold, Exec exec) {
  if (!(threshold > 0.0 && threshold <= 1.0)) {
    throw Error(ErrorCode::InvalidThreshold, "threshold must be in (0, 1], got " + std::to_string(threshold));
  }
  std::map<std::string, std::vector<std::size_t>> block_map;
  std::vector<std::vector<std::size_t>> groups;
  for (std::size_t i = 0; i < refs.size(); ++i) {
    if (refs[i].rpy) {
      block_map[block_key(refs[i])].push_back(i);
    } else {
      groups.push_back({i});
    }
  }
  std::vector<std::vector<std::size_t>> blocks;
  blocks.reserve(block_map.size());
  for (auto& [key, members] : block_map) blocks.push_back(std::move(members));

  std::vector<std::vector<std::vector<std::size_t>>> per_block(blocks.size());
  const auto n_blocks = static_cast<std::ptrdiff_t>(blocks.size());
  if (exec == Exec::Parallel) {
#pragma omp parallel for schedule(dynamic)
    for (std::ptrdiff_t b = 0; b < n_blocks; ++b) {
      per_block[static_cast<std::size_t>(b)] = cluster_block(refs, blocks[static_cast<std::size_t>(b)], threshold);
    }
  } else {
    for (std::ptrdiff_t b = 0; b < n_blocks; ++b) {
      per_block[static_cast<std::size_t>(b)] = cluster_block(refs, blocks[static_cast<std::size_t>(b)], threshold);
    }
  }
  for (auto& block_groups : per_block) {
    for (auto& g : block_groups) groups.push_back(std::move(g));
  }

  Partition p;
  p.clusters.resize(groups.size());
  const auto n_groups = static_cast<std::ptrdiff_t>(groups.size());
  auto build = [&](std::ptrdiff_t g) {
    std::vector<ParsedCitedRef> members;
    members.reserve(groups[static_cast<std::size_t>(g)].size());
    for (std::size_t i : groups[static_cast<std::size_t>(g)]) members.push_back(refs[i]);
    p.clusters[static_cast<std::size_t>(g)] = make_cluster(std::move(members));
  };
  if (exec == Exec::Parallel) {
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t g = 0; g < n_groups; ++g) build(g);
  } else {
    for (std::ptrdiff_t g = 0; g < n_groups; ++g) build(g);
  }
  sort_clusters(p.clusters);
  return p;
}

Partition apply_decision(const Partition& partition, const MergeDecision& decision) {
  if (decision.targets.empty()) throw Error(ErrorCode::InvalidDecision, "decision names no target cluster");
  for (const auto& id : decision.targets) {
    if (!partition.find(id)) throw Error(ErrorCode::UnknownCluster, "unknown cluster '" + id + "'");
  }

  if (decision.kind == DecisionKind::Merge) {
    const std::set<std::string> targets(decision.targets.begin(), decision.targets.end());
    if (targets.size() == 1) return partition;
    Partition out;
    std::vector<ParsedCitedRef> merged;
    for (const auto& c : partition.clusters) {
      if (targets.count(c.cluster_id)) {
        merged.insert(merged.end(), c.members.begin(), c.members.end());
      } else {
        out.clusters.push_back(c);
      }
    }
    out.clusters.push_back(make_cluster(std::move(merged)));
    sort_clusters(out.clusters);
    return out;
  }

  if (decision.targets.size() != 1) throw Error(ErrorCode::InvalidDecision, "split takes exactly one target cluster");
  const RefCluster& source = *partition.find(decision.targets.front());
  const std::set<RawId> subset(decision.subset.begin(), decision.subset.end());
  if (subset.empty() || subset.size() != decision.subset.size() || subset.size() >= source.members.size()) {
    throw Error(ErrorCode::InvalidSplitSubset, "split subset must be a proper, non-empty set of distinct members");
  }
  std::vector<ParsedCitedRef> moved, kept;
  for (const auto& m : source.members) (subset.count(m.raw_id) ? moved : kept).push_back(m);
  if (moved.size() != subset.size()) {
    throw Error(ErrorCode::InvalidSplitSubset, "split subset names refs outside cluster '" + source.cluster_id + "'");
  }
  Partition out;
  for (const auto& c : partition.clusters) {
    if (c.cluster_id != source.cluster_id) out.clusters.push_back(c);
  }
  out.clusters.push_back(make_cluster(std::move(moved)));
  out.clusters.push_back(make_cluster(std::move(kept)));
  sort_clusters(out.clusters);
  return out;
}

}  // namespace rpys

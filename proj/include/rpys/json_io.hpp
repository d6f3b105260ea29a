#pragma once

#include <json.hpp>

#include "rpys/clustering.hpp"
#include "rpys/corpus.hpp"
#include "rpys/segments.hpp"
#include "rpys/session.hpp"
#include "rpys/spectrum.hpp"

namespace rpys {

using nlohmann::json;

void to_json(json& j, const RawId& id);
void from_json(const json& j, RawId& id);

void to_json(json& j, const Corpus& c);
void from_json(const json& j, Corpus& c);

void to_json(json& j, const ParsedCitedRef& r);

void to_json(json& j, const MergeDecision& d);
void from_json(const json& j, MergeDecision& d);

void to_json(json& j, const SessionConfig& c);
// Missing keys keep their defaults.
void from_json(const json& j, SessionConfig& c);

void to_json(json& j, const SpectrumPoint& p);
void to_json(json& j, const RankedCluster& r);
void to_json(json& j, const Peak& p);
void to_json(json& j, const ClusterIndicators& i);
void to_json(json& j, const Segment& s);
void to_json(json& j, const SegmentFit& f);

}  // namespace rpys

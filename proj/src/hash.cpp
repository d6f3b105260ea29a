#include "rpys/hash.hpp"

#include "rpys/error.hpp"

namespace rpys {

std::string to_hex(std::uint64_t value) {
  static constexpr char kDigits[] = "0123456789abcdef";
  std::string out(16, '0');
  for (int i = 15; i >= 0; --i) {
    out[static_cast<std::size_t>(i)] = kDigits[value & 0xF];
    value >>= 4;
  }
  return out;
}

std::string Fnv1a::hex() const { return to_hex(state_); }

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::NotWosFormat: return "NotWosFormat";
    case ErrorCode::NotScopusFormat: return "NotScopusFormat";
    case ErrorCode::Encoding: return "Encoding";
    case ErrorCode::InvalidThreshold: return "InvalidThreshold";
    case ErrorCode::UnknownCluster: return "UnknownCluster";
    case ErrorCode::InvalidSplitSubset: return "InvalidSplitSubset";
    case ErrorCode::InvalidDecision: return "InvalidDecision";
    case ErrorCode::EmptyCorpus: return "EmptyCorpus";
    case ErrorCode::EmptyPartition: return "EmptyPartition";
    case ErrorCode::SeriesTooShort: return "SeriesTooShort";
    case ErrorCode::InvalidK: return "InvalidK";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::CorruptSession: return "CorruptSession";
    case ErrorCode::UnsupportedVersion: return "UnsupportedVersion";
    case ErrorCode::StaleVersion: return "StaleVersion";
    case ErrorCode::Io: return "Io";
  }
  return "Unknown";
}

}  // namespace rpys

#pragma once

#include <string>
#include <vector>

#include "pforge/record.hpp"

namespace pforge {

enum class RecordKind { Education = 0, Employment = 1 };

std::string_view kind_name(RecordKind kind);

}  // namespace pforge

namespace pforge::validator {

struct CombinedItem {
  std::string state;
  RecordKind kind;
  YearMonth start;

  friend auto operator<=>(const CombinedItem&, const CombinedItem&) = default;
};

using CombinedSequence = std::vector<CombinedItem>;

// Education types and positions merged by start month. Ties: education before
// employment, then lexicographic state.
CombinedSequence combine_chronological(const CvRecord& record);

std::vector<std::string> combined_states(const CvRecord& record);

}  // namespace pforge::validator

#include "pforge/combined_sequence.hpp"

#include <algorithm>
#include <tuple>

namespace pforge {

std::string_view kind_name(RecordKind kind) {
  return kind == RecordKind::Education ? "education" : "employment";
}

}  // namespace pforge

namespace pforge::validator {

CombinedSequence combine_chronological(const CvRecord& record) {
  CombinedSequence items;
  items.reserve(record.education.size() + record.employment.size());
  for (const auto& e : record.education) {
    items.push_back({e.education_type, RecordKind::Education, e.start});
  }
  for (const auto& e : record.employment) {
    items.push_back({e.position, RecordKind::Employment, e.start});
  }
  std::stable_sort(items.begin(), items.end(), [](const CombinedItem& a, const CombinedItem& b) {
    return std::tie(a.start, a.kind, a.state) < std::tie(b.start, b.kind, b.state);
  });
  return items;
}

std::vector<std::string> combined_states(const CvRecord& record) {
  std::vector<std::string> out;
  for (auto& item : combine_chronological(record)) out.push_back(std::move(item.state));
  return out;
}

}  // namespace pforge::validator

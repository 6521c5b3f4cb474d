#pragma once

#include <iosfwd>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "pforge/interchange.hpp"
#include "pforge/record.hpp"

namespace pforge::corpus {

struct ParseResult {
  std::vector<CvRecord> records;
  std::vector<interchange::LineError> errors;
};

// Blank lines are skipped; any other line either yields a record or an error.
ParseResult parse_corpus(std::istream& in);

enum class RejectReason {
  MissingPosition,
  MissingEducationType,
  AgeInconsistent,
  UnsortedDatesUnfixable,
};

std::string_view reason_code(RejectReason reason);

struct Rejection {
  std::string person_id;
  RejectReason reason;

  friend bool operator==(const Rejection&, const Rejection&) = default;
};

struct CleanResult {
  std::vector<CvRecord> kept;
  std::vector<Rejection> rejected;
};

// Total function. Out-of-order entries are re-sorted by start; a record whose
// entries were out of order and contain a tie on start month cannot be
// ordered and is rejected.
CleanResult clean_corpus(std::vector<CvRecord> records);

void write_rejections(std::ostream& out, const std::vector<Rejection>& rejected);

struct CorpusStats {
  std::size_t record_count = 0;
  std::size_t unique_positions = 0;
  std::size_t unique_education_types = 0;
  double avg_employment_periods = 0.0;
  double avg_education_periods = 0.0;
  double avg_first_job_age_years = 0.0;
  double avg_first_education_age_years = 0.0;
  double avg_employment_gap_months = 0.0;
  double avg_education_gap_months = 0.0;
  std::map<std::string, std::size_t> country_frequencies;
};

// Averages run over the records where the relevant field exists: periods over
// records with at least one entry, ages over records with a birth date, gaps
// over consecutive start pairs.
CorpusStats corpus_stats(const std::vector<CvRecord>& records);

nlohmann::ordered_json stats_to_json(const CorpusStats& stats);

}  // namespace pforge::corpus

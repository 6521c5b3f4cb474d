#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "pforge/analysis/stats.hpp"
#include "pforge/interchange.hpp"
#include "pforge/record.hpp"

namespace pforge::analysis {

enum class ProfileType { Real, Artificial, Random };

std::string_view type_name(ProfileType type);
std::optional<ProfileType> parse_type(std::string_view name);

struct ProfilePair {
  std::string pair_id;
  CvRecord left;
  CvRecord right;
  ProfileType left_type;
  ProfileType right_type;
};

struct Questionnaire {
  std::string questionnaire_id;
  std::vector<ProfilePair> pairs;
};

inline constexpr std::size_t kPairsPerQuestionnaire = 6;
inline constexpr std::size_t kProfilesPerTypePerQuestionnaire = 4;

// Each questionnaire holds 2 artificial-vs-real, 2 artificial-vs-random and
// 2 random-vs-real pairs, consuming four profiles of every type. No profile
// appears twice across the set. Pair order and left/right placement are
// shuffled from `seed`. Throws POOL_EXHAUSTED when a pool has fewer than
// 4 * n profiles, INVALID_ARGUMENT on a repeated person_id.
std::vector<Questionnaire> build_questionnaires(std::span<const CvRecord> real_pool,
                                                std::span<const CvRecord> artificial_pool,
                                                std::span<const CvRecord> random_pool,
                                                std::size_t n_questionnaires, std::uint64_t seed);

// Public form: profiles without their hidden labels.
nlohmann::ordered_json questionnaire_to_json(const Questionnaire& q);
void write_readable(std::ostream& out, const Questionnaire& q);

struct AnswerKey {
  std::string questionnaire_id;
  std::string pair_id;
  std::string left_id;
  std::string right_id;
  ProfileType left_type;
  ProfileType right_type;
};

std::vector<AnswerKey> answer_keys(std::span<const Questionnaire> questionnaires);
nlohmann::ordered_json answer_key_to_json(const AnswerKey& key);

struct AnswerKeyParseResult {
  std::map<std::string, AnswerKey> keys;  // by pair_id
  std::vector<interchange::LineError> errors;
};
AnswerKeyParseResult parse_answer_keys(std::istream& in);

enum class Choice { LeftMoreReal, RightMoreReal, Equal };

std::string_view choice_name(Choice choice);
std::optional<Choice> parse_choice(std::string_view name);

struct ResponseRecord {
  std::string questionnaire_id;
  std::string pair_id;
  std::string respondent_id;
  Choice choice;
};

struct ResponseParseResult {
  std::vector<ResponseRecord> responses;
  std::vector<interchange::LineError> errors;
};
ResponseParseResult parse_responses(std::istream& in);

// Unordered pair types with a fixed canonical "first" member:
// real over random, artificial over random, real over artificial.
enum class PairType { RealVsRandom, ArtificialVsRandom, RealVsArtificial };

std::string_view pair_type_name(PairType type);
// nullopt for same-type pairs.
std::optional<PairType> pair_type(ProfileType a, ProfileType b);

// +1 when the canonical first type was judged more real, -1 for the other,
// 0 for equal. Invariant under swapping left/right together with the choice.
int coded_value(ProfileType left, ProfileType right, Choice choice);

struct ResponseStats {
  std::size_t n = 0;
  ProportionTest proportion;       // over decisive (non-equal) responses
  std::optional<OneSampleResult> t_test;  // unset when n < 2
  std::optional<double> cohens_d;  // unset when sd == 0
  bool degenerate = false;
};

ResponseStats response_stats(std::span<const double> coded,
                             IntervalMethod method = IntervalMethod::Wald);

struct GroupedResponses {
  std::map<PairType, std::vector<double>> coded;
  std::vector<std::string> unmatched;  // pair_ids with no answer key
};

GroupedResponses group_responses(std::span<const ResponseRecord> responses,
                                 const std::map<std::string, AnswerKey>& keys);

nlohmann::ordered_json to_json(const ResponseStats& stats);

}  // namespace pforge::analysis

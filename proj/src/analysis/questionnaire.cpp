#include "pforge/analysis/questionnaire.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <istream>
#include <ostream>
#include <set>

#include "pforge/error.hpp"
#include "pforge/rng.hpp"

namespace pforge::analysis {
namespace {

template <typename T>
void shuffle(std::vector<T>& v, Rng& rng) {
  for (std::size_t i = v.size(); i > 1; --i) std::swap(v[i - 1], v[rng.below(i)]);
}

std::string padded(std::size_t v, int width) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%0*zu", width, v);
  return buf;
}

nlohmann::ordered_json number_or_null(double v) {
  return std::isfinite(v) ? nlohmann::ordered_json(v) : nlohmann::ordered_json(nullptr);
}

}  // namespace

std::string_view type_name(ProfileType type) {
  switch (type) {
    case ProfileType::Real: return "real";
    case ProfileType::Artificial: return "artificial";
    case ProfileType::Random: return "random";
  }
  return "unknown";
}

std::optional<ProfileType> parse_type(std::string_view name) {
  if (name == "real") return ProfileType::Real;
  if (name == "artificial") return ProfileType::Artificial;
  if (name == "random") return ProfileType::Random;
  return std::nullopt;
}

std::vector<Questionnaire> build_questionnaires(std::span<const CvRecord> real_pool,
                                                std::span<const CvRecord> artificial_pool,
                                                std::span<const CvRecord> random_pool,
                                                std::size_t n, std::uint64_t seed) {
  const std::size_t need = kProfilesPerTypePerQuestionnaire * n;
  if (real_pool.size() < need || artificial_pool.size() < need || random_pool.size() < need) {
    throw Error(ErrorCode::PoolExhausted,
                "need " + std::to_string(need) + " profiles of each type; have real=" +
                    std::to_string(real_pool.size()) + " artificial=" + std::to_string(artificial_pool.size()) +
                    " random=" + std::to_string(random_pool.size()));
  }
  Rng rng(seed);
  auto draw_order = [&](std::size_t size) {
    std::vector<std::size_t> idx(size);
    for (std::size_t i = 0; i < size; ++i) idx[i] = i;
    shuffle(idx, rng);
    idx.resize(need);
    return idx;
  };
  const auto real_idx = draw_order(real_pool.size());
  const auto art_idx = draw_order(artificial_pool.size());
  const auto rnd_idx = draw_order(random_pool.size());

  std::set<std::string> used;
  auto take = [&](std::span<const CvRecord> pool, const std::vector<std::size_t>& idx, std::size_t k) {
    const auto& record = pool[idx[k]];
    if (!used.insert(record.person_id).second) {
      throw Error(ErrorCode::InvalidArgument, "person_id '" + record.person_id + "' appears in more than one slot");
    }
    return record;
  };

  std::vector<Questionnaire> out;
  out.reserve(n);
  for (std::size_t q = 0; q < n; ++q) {
    const std::size_t base = q * kProfilesPerTypePerQuestionnaire;
    CvRecord r[4], a[4], x[4];
    for (std::size_t k = 0; k < 4; ++k) {
      r[k] = take(real_pool, real_idx, base + k);
      a[k] = take(artificial_pool, art_idx, base + k);
      x[k] = take(random_pool, rnd_idx, base + k);
    }
    using T = ProfileType;
    std::vector<ProfilePair> pairs = {
        {"", a[0], r[0], T::Artificial, T::Real},  {"", a[1], r[1], T::Artificial, T::Real},
        {"", a[2], x[0], T::Artificial, T::Random}, {"", a[3], x[1], T::Artificial, T::Random},
        {"", x[2], r[2], T::Random, T::Real},       {"", x[3], r[3], T::Random, T::Real},
    };
    shuffle(pairs, rng);
    Questionnaire questionnaire;
    questionnaire.questionnaire_id = "q" + padded(q + 1, 3);
    for (std::size_t p = 0; p < pairs.size(); ++p) {
      auto& pair = pairs[p];
      if (rng.below(2) == 1) {
        std::swap(pair.left, pair.right);
        std::swap(pair.left_type, pair.right_type);
      }
      pair.pair_id = questionnaire.questionnaire_id + "-p" + std::to_string(p + 1);
    }
    questionnaire.pairs = std::move(pairs);
    out.push_back(std::move(questionnaire));
  }
  return out;
}

nlohmann::ordered_json questionnaire_to_json(const Questionnaire& q) {
  using nlohmann::ordered_json;
  // Identifiers stay in the answer key: generated and baseline ids are
  // prefixed by their origin and would give the label away.
  auto shown = [](const CvRecord& r) {
    auto j = interchange::record_to_json(r);
    j.erase("person_id");
    return j;
  };
  auto pairs = ordered_json::array();
  for (const auto& p : q.pairs) {
    pairs.push_back(ordered_json{{"pair_id", p.pair_id}, {"left", shown(p.left)}, {"right", shown(p.right)}});
  }
  return ordered_json{{"questionnaire_id", q.questionnaire_id}, {"pairs", std::move(pairs)}};
}

namespace {

void write_profile_text(std::ostream& out, const char* label, const CvRecord& r) {
  out << "  " << label << ": " << r.first_name << ' ' << r.last_name << " (" << r.country << ")\n";
  out << "    Education:\n";
  if (r.education.empty()) out << "      (none)\n";
  for (const auto& e : r.education) {
    out << "      " << e.start.to_string() << "  " << e.education_type << ", " << e.field_of_study << " - "
        << e.institution << ", " << e.location.name << " (" << e.duration_months << " months)\n";
  }
  out << "    Employment:\n";
  for (const auto& e : r.employment) {
    out << "      " << e.start.to_string() << "  " << e.position << " - " << e.employer << ", "
        << e.location.name << " (" << e.duration_months << " months)\n";
  }
}

}  // namespace

void write_readable(std::ostream& out, const Questionnaire& q) {
  out << "Questionnaire " << q.questionnaire_id << "\n\n"
      << "For each pair, answer which profile seems more realistic:\n"
      << "left_more_real, right_more_real, or equal.\n";
  for (const auto& p : q.pairs) {
    out << "\nPair " << p.pair_id << '\n';
    write_profile_text(out, "Left", p.left);
    write_profile_text(out, "Right", p.right);
  }
}

std::vector<AnswerKey> answer_keys(std::span<const Questionnaire> questionnaires) {
  std::vector<AnswerKey> keys;
  for (const auto& q : questionnaires) {
    for (const auto& p : q.pairs) {
      keys.push_back({q.questionnaire_id, p.pair_id, p.left.person_id, p.right.person_id, p.left_type,
                      p.right_type});
    }
  }
  return keys;
}

nlohmann::ordered_json answer_key_to_json(const AnswerKey& k) {
  return nlohmann::ordered_json{{"questionnaire_id", k.questionnaire_id}, {"pair_id", k.pair_id},
                                {"left_id", k.left_id},                   {"right_id", k.right_id},
                                {"left_type", type_name(k.left_type)},    {"right_type", type_name(k.right_type)}};
}

AnswerKeyParseResult parse_answer_keys(std::istream& in) {
  if (!in) throw Error(ErrorCode::Io, "answer key stream is not readable");
  AnswerKeyParseResult result;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      const auto j = nlohmann::json::parse(line);
      AnswerKey k;
      k.questionnaire_id = j.at("questionnaire_id").get<std::string>();
      k.pair_id = j.at("pair_id").get<std::string>();
      k.left_id = j.at("left_id").get<std::string>();
      k.right_id = j.at("right_id").get<std::string>();
      const auto lt = parse_type(j.at("left_type").get<std::string>());
      const auto rt = parse_type(j.at("right_type").get<std::string>());
      if (!lt || !rt) throw std::invalid_argument("unknown profile type");
      k.left_type = *lt;
      k.right_type = *rt;
      if (!result.keys.emplace(k.pair_id, k).second) throw std::invalid_argument("duplicate pair_id " + k.pair_id);
    } catch (const std::exception& e) {
      result.errors.push_back({line_no, e.what()});
    }
  }
  return result;
}

std::string_view choice_name(Choice choice) {
  switch (choice) {
    case Choice::LeftMoreReal: return "left_more_real";
    case Choice::RightMoreReal: return "right_more_real";
    case Choice::Equal: return "equal";
  }
  return "unknown";
}

std::optional<Choice> parse_choice(std::string_view name) {
  if (name == "left_more_real") return Choice::LeftMoreReal;
  if (name == "right_more_real") return Choice::RightMoreReal;
  if (name == "equal") return Choice::Equal;
  return std::nullopt;
}

ResponseParseResult parse_responses(std::istream& in) {
  if (!in) throw Error(ErrorCode::Io, "response stream is not readable");
  ResponseParseResult result;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      const auto j = nlohmann::json::parse(line);
      ResponseRecord r;
      r.questionnaire_id = j.at("questionnaire_id").get<std::string>();
      r.pair_id = j.at("pair_id").get<std::string>();
      r.respondent_id = j.at("respondent_id").get<std::string>();
      const auto choice = parse_choice(j.at("choice").get<std::string>());
      if (!choice) throw std::invalid_argument("choice must be left_more_real, right_more_real or equal");
      r.choice = *choice;
      result.responses.push_back(std::move(r));
    } catch (const std::exception& e) {
      result.errors.push_back({line_no, e.what()});
    }
  }
  return result;
}

std::string_view pair_type_name(PairType type) {
  switch (type) {
    case PairType::RealVsRandom: return "real_vs_random";
    case PairType::ArtificialVsRandom: return "artificial_vs_random";
    case PairType::RealVsArtificial: return "real_vs_artificial";
  }
  return "unknown";
}

std::optional<PairType> pair_type(ProfileType a, ProfileType b) {
  using T = ProfileType;
  const auto has = [&](T t) { return a == t || b == t; };
  if (a == b) return std::nullopt;
  if (has(T::Real) && has(T::Random)) return PairType::RealVsRandom;
  if (has(T::Artificial) && has(T::Random)) return PairType::ArtificialVsRandom;
  return PairType::RealVsArtificial;
}

int coded_value(ProfileType left, ProfileType right, Choice choice) {
  if (choice == Choice::Equal) return 0;
  const auto type = pair_type(left, right);
  if (!type) return 0;
  const ProfileType canonical_first = *type == PairType::ArtificialVsRandom ? ProfileType::Artificial : ProfileType::Real;
  const ProfileType chosen = choice == Choice::LeftMoreReal ? left : right;
  return chosen == canonical_first ? 1 : -1;
}

ResponseStats response_stats(std::span<const double> coded, IntervalMethod method) {
  if (coded.empty()) throw Error(ErrorCode::EmptyInput, "no responses in group");
  ResponseStats s;
  s.n = coded.size();
  std::size_t wins = 0, decisive = 0;
  for (const double v : coded) {
    if (v != 0.0) ++decisive;
    if (v > 0.0) ++wins;
  }
  s.proportion = proportion_test(wins, decisive, method);
  if (coded.size() >= 2) {
    s.t_test = one_sample_t_test(coded, 0.0);
    s.degenerate = s.t_test->degenerate;
  } else {
    s.degenerate = true;
  }
  s.cohens_d = cohens_d(coded);
  s.degenerate = s.degenerate || !s.cohens_d || s.proportion.degenerate;
  return s;
}

GroupedResponses group_responses(std::span<const ResponseRecord> responses,
                                 const std::map<std::string, AnswerKey>& keys) {
  GroupedResponses g;
  for (const auto& r : responses) {
    const auto it = keys.find(r.pair_id);
    if (it == keys.end()) {
      g.unmatched.push_back(r.pair_id);
      continue;
    }
    const auto type = pair_type(it->second.left_type, it->second.right_type);
    if (!type) continue;
    g.coded[*type].push_back(coded_value(it->second.left_type, it->second.right_type, r.choice));
  }
  return g;
}

nlohmann::ordered_json to_json(const ResponseStats& s) {
  using nlohmann::ordered_json;
  ordered_json j;
  j["n"] = s.n;
  j["proportion_test"] = ordered_json{{"successes", s.proportion.successes},
                                      {"trials", s.proportion.trials},
                                      {"p_hat", number_or_null(s.proportion.p_hat)},
                                      {"ci_low", number_or_null(s.proportion.ci_low)},
                                      {"ci_high", number_or_null(s.proportion.ci_high)},
                                      {"z", number_or_null(s.proportion.z)},
                                      {"p_value", number_or_null(s.proportion.p_value)}};
  if (s.t_test) {
    j["t_test"] = ordered_json{{"mean", s.t_test->mean},
                               {"sd", s.t_test->sd},
                               {"t", number_or_null(s.t_test->test.t)},
                               {"df", s.t_test->test.df},
                               {"p", number_or_null(s.t_test->test.p_value)}};
  } else {
    j["t_test"] = nullptr;
  }
  j["cohens_d"] = s.cohens_d ? ordered_json(*s.cohens_d) : ordered_json(nullptr);
  j["degenerate"] = s.degenerate;
  return j;
}

}  // namespace pforge::analysis

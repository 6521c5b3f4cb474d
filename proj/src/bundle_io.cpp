#include "pforge/bundle_io.hpp"

#include "json.hpp"
#include "pforge/error.hpp"
#include "pforge/interchange.hpp"

namespace pforge::model {
namespace {

using nlohmann::json;
using nlohmann::ordered_json;

class DecodeFailure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

[[noreturn]] void fail(const std::string& what) { throw DecodeFailure(what); }

void put_u32(std::string& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}
void put_u64(std::string& out, std::uint64_t v) {
  for (int i = 0; i < 8; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}
std::uint64_t get_le(std::string_view bytes, std::size_t offset, int width) {
  std::uint64_t v = 0;
  for (int i = 0; i < width; ++i) {
    v |= static_cast<std::uint64_t>(static_cast<unsigned char>(bytes[offset + i])) << (8 * i);
  }
  return v;
}

// --- encoding ---------------------------------------------------------------

ordered_json placement_json(const Placement& p) {
  return ordered_json{{"name", p.name}, {"location", interchange::location_to_json(p.location)}};
}

template <typename Key, typename KeyFn>
ordered_json table_json(const FrequencyTable<Key>& table, KeyFn key_fn) {
  auto arr = ordered_json::array();
  for (const auto& [key, count] : table.counts()) arr.push_back(ordered_json::array({key_fn(key), count}));
  return arr;
}

ordered_json string_table(const FrequencyTable<std::string>& t) {
  return table_json(t, [](const std::string& k) { return ordered_json(k); });
}
ordered_json int_table(const FrequencyTable<int>& t) {
  return table_json(t, [](int k) { return ordered_json(k); });
}
ordered_json placement_table(const FrequencyTable<Placement>& t) {
  return table_json(t, placement_json);
}

ordered_json transition_json(const TransitionModel& m) {
  ordered_json j;
  j["states"] = m.states();
  j["starts"] = string_table(m.starts());
  auto rows = ordered_json::array();
  for (const auto& [from, row] : m.rows()) {
    rows.push_back(ordered_json::array({from, string_table(row)}));
  }
  j["transitions"] = std::move(rows);
  return j;
}

ordered_json ngram_json(const NgramTable& t) {
  ordered_json j;
  j["unigrams"] = string_table(t.unigrams);
  j["bigrams"] = table_json(t.bigrams, [](const Bigram& k) { return ordered_json::array({k.first, k.second}); });
  j["trigrams"] = table_json(t.trigrams, [](const Trigram& k) { return ordered_json::array({k[0], k[1], k[2]}); });
  return j;
}

ordered_json month_mean_json(const MonthMean& m) { return ordered_json::array({m.sum, m.count}); }

ordered_json order_json(const std::map<std::string, OrderStat>& stats) {
  auto arr = ordered_json::array();
  for (const auto& [state, s] : stats) {
    arr.push_back(ordered_json::array({state, s.count, s.index_sum, s.index_sq_sum}));
  }
  return arr;
}

ordered_json attributes_json(const AttributeTables& t) {
  ordered_json j;
  auto names = ordered_json::array();
  for (const auto& [country, n] : t.names_by_country) {
    names.push_back(ordered_json{{"country", country},
                                 {"first_names", string_table(n.first_names)},
                                 {"last_names", string_table(n.last_names)}});
  }
  j["names_by_country"] = std::move(names);
  j["country_freq"] = string_table(t.country_freq);
  j["employment_period_counts"] = int_table(t.employment_period_counts);
  j["education_period_counts"] = int_table(t.education_period_counts);
  auto positions = ordered_json::array();
  for (const auto& [position, a] : t.per_position) {
    positions.push_back(ordered_json{{"position", position},
                                     {"employers", placement_table(a.employers)},
                                     {"durations", int_table(a.durations)},
                                     {"tasks", string_table(a.tasks)},
                                     {"task_counts", int_table(a.task_counts)}});
  }
  j["per_position"] = std::move(positions);
  auto types = ordered_json::array();
  for (const auto& [type, a] : t.per_education_type) {
    types.push_back(ordered_json{{"education_type", type},
                                 {"institutions", placement_table(a.institutions)},
                                 {"fields", string_table(a.fields)},
                                 {"durations", int_table(a.durations)}});
  }
  j["per_education_type"] = std::move(types);
  j["timing"] = ordered_json{{"first_job_age_months", month_mean_json(t.timing.first_job_age)},
                             {"first_education_age_months", month_mean_json(t.timing.first_education_age)},
                             {"employment_gap_months", month_mean_json(t.timing.employment_gap)},
                             {"education_gap_months", month_mean_json(t.timing.education_gap)},
                             {"reference_month", t.timing.reference_month.to_string()}};
  j["extras_counts"] = int_table(t.extras_counts);
  j["extra_categories"] = string_table(t.extra_categories);
  auto extra_values = ordered_json::array();
  for (const auto& [category, values] : t.extra_values) {
    extra_values.push_back(ordered_json::array({category, string_table(values)}));
  }
  j["extra_values"] = std::move(extra_values);
  j["employment_order"] = order_json(t.employment_order);
  j["education_order"] = order_json(t.education_order);
  return j;
}

// --- decoding ---------------------------------------------------------------

const json& at(const json& j, const char* key) {
  if (!j.is_object()) fail(std::string("expected object around '") + key + "'");
  const auto it = j.find(key);
  if (it == j.end()) fail(std::string("missing field '") + key + "'");
  return *it;
}

const json& array_at(const json& j, const char* key) {
  const auto& v = at(j, key);
  if (!v.is_array()) fail(std::string("field '") + key + "' must be an array");
  return v;
}

std::string as_string(const json& j) {
  if (!j.is_string()) fail("expected string");
  return j.get<std::string>();
}

std::uint64_t as_count(const json& j) {
  if (!j.is_number_unsigned() && !(j.is_number_integer() && j.get<std::int64_t>() >= 0)) {
    fail("expected non-negative integer");
  }
  return j.get<std::uint64_t>();
}

template <typename Key, typename KeyFn>
FrequencyTable<Key> parse_table(const json& arr, KeyFn key_fn) {
  if (!arr.is_array()) fail("frequency table must be an array");
  FrequencyTable<Key> t;
  for (const auto& entry : arr) {
    if (!entry.is_array() || entry.size() != 2) fail("frequency entry must be [key, count]");
    const auto count = as_count(entry[1]);
    if (count == 0) fail("frequency counts must be positive");
    Key key = key_fn(entry[0]);
    if (t.contains(key)) fail("duplicate frequency key");
    t.add(key, count);
  }
  return t;
}

FrequencyTable<std::string> parse_string_table(const json& arr) {
  return parse_table<std::string>(arr, as_string);
}
FrequencyTable<int> parse_int_table(const json& arr) {
  return parse_table<int>(arr, [](const json& k) {
    if (!k.is_number_integer()) fail("expected integer key");
    return k.get<int>();
  });
}
FrequencyTable<Placement> parse_placement_table(const json& arr) {
  return parse_table<Placement>(arr, [](const json& k) {
    Placement p;
    p.name = as_string(at(k, "name"));
    try {
      p.location = interchange::location_from_json(at(k, "location"), "location");
    } catch (const std::invalid_argument& e) {
      fail(std::string("bad placement location: ") + e.what());
    }
    return p;
  });
}

TransitionModel parse_transition(const json& j) {
  auto starts = parse_string_table(at(j, "starts"));
  std::map<std::string, FrequencyTable<std::string>> rows;
  for (const auto& entry : array_at(j, "transitions")) {
    if (!entry.is_array() || entry.size() != 2) fail("transition row must be [state, table]");
    rows[as_string(entry[0])] = parse_string_table(entry[1]);
  }
  std::set<std::string> states;
  for (const auto& s : array_at(j, "states")) states.insert(as_string(s));
  auto model = TransitionModel::from_counts(std::move(starts), std::move(rows), states);
  if (model.states() != states) fail("transition model state list disagrees with its counts");
  return model;
}

NgramTable parse_ngrams(const json& j) {
  NgramTable t;
  t.unigrams = parse_string_table(at(j, "unigrams"));
  t.bigrams = parse_table<Bigram>(at(j, "bigrams"), [](const json& k) {
    if (!k.is_array() || k.size() != 2) fail("bigram key must have 2 states");
    return Bigram{as_string(k[0]), as_string(k[1])};
  });
  t.trigrams = parse_table<Trigram>(at(j, "trigrams"), [](const json& k) {
    if (!k.is_array() || k.size() != 3) fail("trigram key must have 3 states");
    return Trigram{as_string(k[0]), as_string(k[1]), as_string(k[2])};
  });
  return t;
}

MonthMean parse_month_mean(const json& j) {
  if (!j.is_array() || j.size() != 2 || !j[0].is_number_integer()) fail("timing entry must be [sum, count]");
  return MonthMean{j[0].get<std::int64_t>(), as_count(j[1])};
}

std::map<std::string, OrderStat> parse_order(const json& arr) {
  if (!arr.is_array()) fail("order stats must be an array");
  std::map<std::string, OrderStat> out;
  for (const auto& e : arr) {
    if (!e.is_array() || e.size() != 4) fail("order stat must be [state, count, sum, sum_sq]");
    OrderStat s{as_count(e[1]), as_count(e[2]), as_count(e[3])};
    if (s.count == 0 || s.index_sum < s.count) fail("order stat indices are 1-based");
    out[as_string(e[0])] = s;
  }
  return out;
}

AttributeTables parse_attributes(const json& j) {
  AttributeTables t;
  for (const auto& e : array_at(j, "names_by_country")) {
    auto& n = t.names_by_country[as_string(at(e, "country"))];
    n.first_names = parse_string_table(at(e, "first_names"));
    n.last_names = parse_string_table(at(e, "last_names"));
  }
  t.country_freq = parse_string_table(at(j, "country_freq"));
  t.employment_period_counts = parse_int_table(at(j, "employment_period_counts"));
  t.education_period_counts = parse_int_table(at(j, "education_period_counts"));
  for (const auto& e : array_at(j, "per_position")) {
    auto& a = t.per_position[as_string(at(e, "position"))];
    a.employers = parse_placement_table(at(e, "employers"));
    a.durations = parse_int_table(at(e, "durations"));
    a.tasks = parse_string_table(at(e, "tasks"));
    a.task_counts = parse_int_table(at(e, "task_counts"));
  }
  for (const auto& e : array_at(j, "per_education_type")) {
    auto& a = t.per_education_type[as_string(at(e, "education_type"))];
    a.institutions = parse_placement_table(at(e, "institutions"));
    a.fields = parse_string_table(at(e, "fields"));
    a.durations = parse_int_table(at(e, "durations"));
  }
  const auto& timing = at(j, "timing");
  t.timing.first_job_age = parse_month_mean(at(timing, "first_job_age_months"));
  t.timing.first_education_age = parse_month_mean(at(timing, "first_education_age_months"));
  t.timing.employment_gap = parse_month_mean(at(timing, "employment_gap_months"));
  t.timing.education_gap = parse_month_mean(at(timing, "education_gap_months"));
  const auto ref = YearMonth::parse(as_string(at(timing, "reference_month")));
  if (!ref) fail("reference_month must be YYYY-MM");
  t.timing.reference_month = *ref;
  t.extras_counts = parse_int_table(at(j, "extras_counts"));
  t.extra_categories = parse_string_table(at(j, "extra_categories"));
  for (const auto& e : array_at(j, "extra_values")) {
    if (!e.is_array() || e.size() != 2) fail("extra values entry must be [category, table]");
    t.extra_values[as_string(e[0])] = parse_string_table(e[1]);
  }
  t.employment_order = parse_order(at(j, "employment_order"));
  t.education_order = parse_order(at(j, "education_order"));
  return t;
}

}  // namespace

std::uint64_t fnv1a64(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (const char c : bytes) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string save_bundle(const ModelBundle& b) {
  ordered_json j;
  j["provenance"] = ordered_json{{"format_version", b.provenance.format_version},
                                 {"corpus_record_count", b.provenance.corpus_record_count},
                                 {"build_timestamp", b.provenance.build_timestamp}};
  j["employment_model"] = transition_json(b.employment_model);
  j["education_model"] = transition_json(b.education_model);
  j["combined_ngrams"] = ngram_json(b.combined_ngrams);
  j["attributes"] = attributes_json(b.attributes);
  const std::string payload = j.dump();

  std::string out(kBundleMagic);
  put_u32(out, b.provenance.format_version);
  put_u64(out, payload.size());
  put_u64(out, fnv1a64(payload));
  out += payload;
  return out;
}

ModelBundle load_bundle(std::string_view bytes) {
  auto decode_error = [](std::size_t offset, const std::string& what) {
    return Error(ErrorCode::DecodeError, "at offset " + std::to_string(offset) + ": " + what);
  };
  if (bytes.size() < kBundleMagic.size() || bytes.substr(0, kBundleMagic.size()) != kBundleMagic) {
    throw decode_error(0, "missing model bundle magic");
  }
  if (bytes.size() < kBundleHeaderSize) throw decode_error(bytes.size(), "truncated header");
  const auto version = static_cast<std::uint32_t>(get_le(bytes, 8, 4));
  if (version != kFormatVersion) {
    throw Error(ErrorCode::UnsupportedVersion, "bundle format_version " + std::to_string(version) +
                                                   ", supported " + std::to_string(kFormatVersion));
  }
  const auto length = get_le(bytes, 12, 8);
  const auto checksum = get_le(bytes, 20, 8);
  const auto payload = bytes.substr(kBundleHeaderSize);
  if (payload.size() != length) {
    throw decode_error(kBundleHeaderSize + std::min<std::uint64_t>(length, payload.size()),
                       "payload length " + std::to_string(payload.size()) + ", header says " +
                           std::to_string(length));
  }
  if (fnv1a64(payload) != checksum) throw decode_error(kBundleHeaderSize, "payload checksum mismatch");

  json j;
  try {
    j = json::parse(payload);
  } catch (const json::parse_error& e) {
    throw decode_error(kBundleHeaderSize + (e.byte > 0 ? e.byte - 1 : 0), e.what());
  }
  try {
    ModelBundle b;
    const auto& prov = at(j, "provenance");
    b.provenance.format_version = static_cast<std::uint32_t>(as_count(at(prov, "format_version")));
    b.provenance.corpus_record_count = as_count(at(prov, "corpus_record_count"));
    const auto& ts = at(prov, "build_timestamp");
    if (!ts.is_number_integer()) fail("build_timestamp must be an integer");
    b.provenance.build_timestamp = ts.get<std::int64_t>();
    if (b.provenance.format_version != version) fail("payload format_version disagrees with header");
    b.employment_model = parse_transition(at(j, "employment_model"));
    b.education_model = parse_transition(at(j, "education_model"));
    b.combined_ngrams = parse_ngrams(at(j, "combined_ngrams"));
    b.attributes = parse_attributes(at(j, "attributes"));
    return b;
  } catch (const DecodeFailure& e) {
    throw decode_error(kBundleHeaderSize, e.what());
  } catch (const json::exception& e) {
    throw decode_error(kBundleHeaderSize, e.what());
  }
}

}  // namespace pforge::model

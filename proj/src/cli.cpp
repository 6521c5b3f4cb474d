#include "pforge/cli.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <optional>
#include <ostream>
#include <sstream>
#include <thread>

#include "CLI11.hpp"
#include "json.hpp"
#include "pforge/analysis/clustering.hpp"
#include "pforge/analysis/distribution.hpp"
#include "pforge/analysis/questionnaire.hpp"
#include "pforge/analysis/rank_by_length.hpp"
#include "pforge/analysis/stats.hpp"
#include "pforge/bundle_io.hpp"
#include "pforge/corpus.hpp"
#include "pforge/error.hpp"
#include "pforge/generator.hpp"
#include "pforge/interchange.hpp"
#include "pforge/validator.hpp"

namespace pforge::cli {
namespace fs = std::filesystem;
using ojson = nlohmann::ordered_json;

std::string sha256_hex(const std::string& bytes) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), digest, &len, EVP_sha256(), nullptr) != 1) {
    throw Error(ErrorCode::Io, "sha256 failed");
  }
  std::string hex;
  char buf[3];
  for (unsigned int i = 0; i < len; ++i) {
    std::snprintf(buf, sizeof buf, "%02x", digest[i]);
    hex += buf;
  }
  return hex;
}

namespace {

// Thrown for problems the user can fix on the command line.
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::Io, "cannot read " + path);
  std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  if (in.bad()) throw Error(ErrorCode::Io, "read failure on " + path);
  return bytes;
}

class Session {
 public:
  Session(const std::vector<std::string>& args, std::string command)
      : args_(args), command_(std::move(command)) {}

  // Reads an input file and remembers its hash for the manifest.
  std::string input(const std::string& path) {
    auto bytes = read_file(path);
    inputs_.push_back({{"path", path}, {"sha256", sha256_hex(bytes)}});
    return bytes;
  }

  void write(const std::string& path, const std::string& bytes) {
    if (const auto parent = fs::path(path).parent_path(); !parent.empty()) {
      std::error_code ec;
      fs::create_directories(parent, ec);
    }
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorCode::Io, "cannot write " + path);
    out << bytes;
    out.close();
    if (!out) throw Error(ErrorCode::Io, "write failure on " + path);
    written_.push_back(path);
    outputs_.push_back({{"path", path}, {"sha256", sha256_hex(bytes)}});
  }

  void write_manifest(const std::string& path, const ojson& extra = ojson::object()) {
    ojson m;
    m["command"] = command_;
    m["argv"] = args_;
    m["inputs"] = inputs_;
    m["outputs"] = outputs_;
    for (const auto& [k, v] : extra.items()) m[k] = v;
    write(path, m.dump(2) + "\n");
  }

  const std::vector<std::string>& written() const { return written_; }

 private:
  std::vector<std::string> args_;
  std::string command_;
  ojson inputs_ = ojson::array();
  ojson outputs_ = ojson::array();
  std::vector<std::string> written_;
};

std::vector<CvRecord> records_of(std::vector<GeneratedProfile>&& profiles) {
  std::vector<CvRecord> out;
  out.reserve(profiles.size());
  for (auto& p : profiles) out.push_back(std::move(p.record));
  return out;
}

std::vector<CvRecord> load_records(Session& s, const std::string& path, std::ostream& err) {
  std::istringstream in(s.input(path));
  auto parsed = interchange::parse_profiles(in);
  for (const auto& e : parsed.errors) err << path << ":" << e.line_no << ": " << e.message << "\n";
  if (parsed.profiles.empty()) throw Error(ErrorCode::EmptyInput, path + " holds no readable profiles");
  return records_of(std::move(parsed.profiles));
}

model::ModelBundle load_model(Session& s, const std::string& path) { return model::load_bundle(s.input(path)); }

std::string dump_lines(const std::vector<ojson>& rows) {
  std::string out;
  for (const auto& r : rows) out += r.dump() + "\n";
  return out;
}

unsigned resolve_threads(std::optional<unsigned> flag, const std::map<std::string, std::string>& env) {
  if (flag) return std::max(1u, *flag);
  if (const auto it = env.find("PROFILE_FORGE_THREADS"); it != env.end()) {
    try {
      const long v = std::stol(it->second);
      if (v >= 1) return static_cast<unsigned>(v);
    } catch (const std::exception&) {
    }
    throw UsageError("PROFILE_FORGE_THREADS must be a positive integer");
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

std::int64_t build_timestamp(const std::map<std::string, std::string>& env) {
  if (const auto it = env.find("SOURCE_DATE_EPOCH"); it != env.end()) {
    try {
      return std::stoll(it->second);
    } catch (const std::exception&) {
      throw UsageError("SOURCE_DATE_EPOCH must be an integer");
    }
  }
  return 0;
}

int exit_code_for(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidArgument:
    case ErrorCode::UnknownCountry:
      return kExitUsage;
    default:
      return kExitIo;
  }
}

struct Flags {
  std::optional<unsigned> threads;
  // build-model
  std::string corpus, gazetteer;
  // shared
  std::string model, out, profiles, real, artificial;
  // generate
  long long count = 0;
  std::uint64_t seed = 0;
  std::optional<std::string> country;
  double radius_km = 100.0;
  int max_resample = 10;
  double jitter_years = 1.0;
  bool extras = false;
  // validate
  double rank_threshold = 0.0;
  std::optional<double> order_threshold;
  // cluster
  std::string kind;
  int k_min = 0, k_max = 0;
  int restarts = 20;
  // questionnaire
  long long n = 0;
  // respond-stats
  std::string responses, keys, interval = "wald";
};

CommandOutcome cmd_build_model(const std::vector<std::string>& args, const Flags& f,
                               const std::map<std::string, std::string>& env, std::ostream& err) {
  Session s(args, "build-model");
  std::istringstream corpus_in(s.input(f.corpus));
  auto parsed = corpus::parse_corpus(corpus_in);
  for (const auto& e : parsed.errors) err << f.corpus << ":" << e.line_no << ": " << e.message << "\n";

  std::size_t resolved = 0;
  if (!f.gazetteer.empty()) {
    std::istringstream gin(s.input(f.gazetteer));
    auto gaz = interchange::parse_gazetteer(gin);
    for (const auto& e : gaz.errors) err << f.gazetteer << ":" << e.line_no << ": " << e.message << "\n";
    resolved = interchange::apply_gazetteer(gaz.entries, parsed.records);
  }

  auto cleaned = corpus::clean_corpus(std::move(parsed.records));
  if (cleaned.kept.empty()) throw Error(ErrorCode::EmptyCorpus, "no usable records in " + f.corpus);
  const auto bundle = model::build_bundle(cleaned.kept, build_timestamp(env));

  s.write(f.out, model::save_bundle(bundle));
  std::ostringstream rej;
  corpus::write_rejections(rej, cleaned.rejected);
  s.write(f.out + ".rejections.jsonl", rej.str());
  s.write(f.out + ".stats.json", corpus::stats_to_json(corpus::corpus_stats(cleaned.kept)).dump(2) + "\n");
  s.write_manifest(f.out + ".manifest.json",
                   {{"parse_errors", parsed.errors.size()},
                    {"rejected", cleaned.rejected.size()},
                    {"kept", cleaned.kept.size()},
                    {"locations_resolved", resolved}});

  std::ostringstream summary;
  summary << "built model from " << cleaned.kept.size() << " records (" << cleaned.rejected.size()
          << " rejected, " << parsed.errors.size() << " unparseable lines) -> " << f.out;
  return {kExitOk, summary.str(), s.written()};
}

CommandOutcome cmd_generate(const std::vector<std::string>& args, const Flags& f, unsigned threads) {
  if (f.count < 1) throw UsageError("count must be ≥ 1");
  generator::GenerationOptions opts;
  opts.country = f.country;
  opts.radius_km = f.radius_km;
  opts.max_resample_attempts = f.max_resample;
  opts.timing_jitter_years = f.jitter_years;
  opts.include_extras = f.extras;
  opts.seed = f.seed;
  try {
    opts.validate();
  } catch (const Error& e) {
    throw UsageError(e.what());
  }

  Session s(args, "generate");
  const auto bundle_bytes = s.input(f.model);
  const auto bundle = model::load_bundle(bundle_bytes);
  const auto profiles = generator::generate_batch(bundle, opts, static_cast<std::size_t>(f.count), threads);

  std::ostringstream body;
  interchange::write_profiles(body, profiles);
  s.write(f.out, body.str());

  std::size_t emp_fallbacks = 0, edu_fallbacks = 0, emp_short = 0, edu_short = 0;
  for (const auto& p : profiles) {
    emp_fallbacks += static_cast<std::size_t>(p.provenance.employment_radius_fallbacks);
    edu_fallbacks += static_cast<std::size_t>(p.provenance.education_radius_fallbacks);
    emp_short += p.provenance.short_employment_sequence ? 1 : 0;
    edu_short += p.provenance.short_education_sequence ? 1 : 0;
  }
  ojson options{{"country", opts.country ? ojson(*opts.country) : ojson(nullptr)},
                {"radius_km", opts.radius_km},
                {"max_resample_attempts", opts.max_resample_attempts},
                {"timing_jitter_years", opts.timing_jitter_years},
                {"include_extras", opts.include_extras}};
  s.write_manifest(f.out + ".manifest.json",
                   {{"seed", opts.seed},
                    {"options", options},
                    {"bundle_sha256", sha256_hex(bundle_bytes)},
                    {"count", profiles.size()},
                    {"generator_version", std::string(generator::kGeneratorVersion)},
                    {"fallbacks", {{"employment", emp_fallbacks}, {"education", edu_fallbacks}}},
                    {"short_sequences", {{"employment", emp_short}, {"education", edu_short}}}});

  std::ostringstream summary;
  summary << "generated " << profiles.size() << " profiles (seed " << opts.seed << ") -> " << f.out;
  return {kExitOk, summary.str(), s.written()};
}

CommandOutcome cmd_validate(const std::vector<std::string>& args, const Flags& f, unsigned threads,
                            std::ostream& err) {
  if (f.rank_threshold < 0.0 || f.rank_threshold > 1.0) throw UsageError("rank-threshold must lie in [0, 1]");
  if (f.order_threshold && !(*f.order_threshold > 0.0)) throw UsageError("order-threshold must be positive");
  Session s(args, "validate");
  const auto bundle = load_model(s, f.model);
  const auto records = load_records(s, f.profiles, err);

  validator::FilterPolicy policy;
  policy.rank_threshold = f.rank_threshold;
  policy.order.fixed = f.order_threshold;
  const auto result = validator::filter_profiles(records, bundle, policy, threads);

  std::vector<ojson> rows;
  rows.reserve(records.size());
  for (std::size_t i = 0; i < records.size(); ++i) {
    rows.push_back(validator::outcome_to_json(records[i].person_id, result.outcomes[i]));
  }
  s.write(f.out, dump_lines(rows));
  s.write_manifest(f.out + ".manifest.json", {{"rank_threshold", f.rank_threshold},
                                              {"order_threshold", f.order_threshold ? ojson(*f.order_threshold)
                                                                                    : ojson(nullptr)},
                                              {"accepted", result.accepted.size()},
                                              {"rejected", result.rejected.size()}});

  std::ostringstream summary;
  summary << "validated " << records.size() << " profiles: " << result.accepted.size() << " accepted, "
          << result.rejected.size() << " rejected -> " << f.out;
  return {result.rejected.empty() ? kExitOk : kExitRejections, summary.str(), s.written()};
}

CommandOutcome cmd_compare(const std::vector<std::string>& args, const Flags& f, std::ostream& err) {
  Session s(args, "compare");
  const auto bundle = load_model(s, f.model);
  const auto real = load_records(s, f.real, err);
  const auto art = load_records(s, f.artificial, err);
  const fs::path dir(f.out);

  ojson dists = ojson::array();
  std::ostringstream text;
  for (const auto& d : analysis::compare_distributions(real, art)) {
    dists.push_back(analysis::to_json(d));
    text << d.label << ": tv=" << d.tv_distance << "\n";
  }
  s.write((dir / "distributions.json").string(), dists.dump(2) + "\n");

  const auto age = analysis::age_stats(real, art);
  s.write((dir / "age.json").string(), analysis::to_json(age).dump(2) + "\n");
  text << "age: real mean " << age.mean_real << " (sd " << age.sd_real << "), artificial mean "
       << age.mean_artificial << " (sd " << age.sd_artificial << "), welch p=" << age.test.p_value << "\n";

  const auto ranks = analysis::rank_by_length(real, art, bundle);
  s.write((dir / "rank_by_length.json").string(), analysis::to_json(ranks).dump(2) + "\n");
  text << "rank by length: " << ranks.real_zero_excluded << " real and " << ranks.artificial_zero_excluded
       << " artificial profiles have rank 0\n";
  s.write((dir / "summary.txt").string(), text.str());
  s.write_manifest((dir / "manifest.json").string());

  std::ostringstream summary;
  summary << "compared " << real.size() << " real and " << art.size() << " artificial profiles -> " << f.out;
  return {kExitOk, summary.str(), s.written()};
}

CommandOutcome cmd_cluster(const std::vector<std::string>& args, const Flags& f, unsigned threads,
                           std::ostream& out, std::ostream& err) {
  RecordKind kind;
  if (f.kind == "positions") {
    kind = RecordKind::Employment;
  } else if (f.kind == "education") {
    kind = RecordKind::Education;
  } else {
    throw UsageError("kind must be positions or education");
  }
  if (f.k_min < 2 || f.k_max < f.k_min) throw UsageError("need 2 ≤ k-min ≤ k-max");
  if (f.restarts < 1) throw UsageError("restarts must be ≥ 1");

  Session s(args, "cluster");
  const auto bundle = load_model(s, f.model);
  const auto records = load_records(s, f.profiles, err);
  const auto& states = kind == RecordKind::Employment ? bundle.employment_model.states()
                                                      : bundle.education_model.states();
  const std::vector<std::string> vocab(states.begin(), states.end());

  analysis::KMeansOptions opts;
  opts.restarts = f.restarts;
  opts.seed = f.seed;
  opts.threads = threads;
  const auto report = analysis::cluster_diversity(records, vocab, kind, f.k_min, f.k_max, opts);
  const auto body = analysis::to_json(report, records).dump(2) + "\n";

  std::ostringstream summary;
  summary << "clustered " << records.size() << " profiles by " << f.kind << ": best k=" << report.k
          << ", silhouette " << report.silhouette;
  if (f.out.empty()) {
    out << body;
    return {kExitOk, summary.str(), {}};
  }
  s.write(f.out, body);
  s.write_manifest(f.out + ".manifest.json", {{"seed", f.seed}, {"restarts", f.restarts}});
  summary << " -> " << f.out;
  return {kExitOk, summary.str(), s.written()};
}

CommandOutcome cmd_questionnaire(const std::vector<std::string>& args, const Flags& f, std::ostream& err) {
  if (f.n < 1) throw UsageError("n must be ≥ 1");
  Session s(args, "questionnaire");
  const auto bundle = load_model(s, f.model);
  const auto real = load_records(s, f.real, err);
  const auto art = load_records(s, f.artificial, err);

  // Random-baseline profiles are derived from the real pool. The stream is
  // keyed apart from the questionnaire layout so both stay reproducible.
  const auto vocab = generator::BaselineVocabulary::from_bundle(bundle);
  const std::uint64_t random_seed = split_seed(f.seed, 0x72616e646f6dULL);
  std::vector<CvRecord> rnd;
  rnd.reserve(real.size());
  for (std::size_t i = 0; i < real.size(); ++i) {
    Rng rng(split_seed(random_seed, i));
    rnd.push_back(generator::generate_random_baseline(real[i], vocab, rng));
  }

  const auto qs = analysis::build_questionnaires(real, art, rnd, static_cast<std::size_t>(f.n), f.seed);
  const fs::path dir(f.out);
  std::vector<ojson> q_rows, key_rows;
  for (const auto& q : qs) {
    q_rows.push_back(analysis::questionnaire_to_json(q));
    std::ostringstream doc;
    analysis::write_readable(doc, q);
    s.write((dir / (q.questionnaire_id + ".txt")).string(), doc.str());
  }
  for (const auto& k : analysis::answer_keys(qs)) key_rows.push_back(analysis::answer_key_to_json(k));
  s.write((dir / "questionnaires.jsonl").string(), dump_lines(q_rows));
  s.write((dir / "answer_keys.jsonl").string(), dump_lines(key_rows));
  s.write_manifest((dir / "manifest.json").string(), {{"seed", f.seed}, {"n", f.n}});

  std::ostringstream summary;
  summary << "built " << qs.size() << " questionnaires (" << qs.size() * 6 << " pairs) -> " << f.out;
  return {kExitOk, summary.str(), s.written()};
}

CommandOutcome cmd_respond_stats(const std::vector<std::string>& args, const Flags& f, std::ostream& err) {
  analysis::IntervalMethod method;
  if (f.interval == "wald") {
    method = analysis::IntervalMethod::Wald;
  } else if (f.interval == "wilson") {
    method = analysis::IntervalMethod::Wilson;
  } else {
    throw UsageError("interval must be wald or wilson");
  }
  Session s(args, "respond-stats");
  std::istringstream rin(s.input(f.responses));
  const auto responses = analysis::parse_responses(rin);
  for (const auto& e : responses.errors) err << f.responses << ":" << e.line_no << ": " << e.message << "\n";
  std::istringstream kin(s.input(f.keys));
  const auto keys = analysis::parse_answer_keys(kin);
  for (const auto& e : keys.errors) err << f.keys << ":" << e.line_no << ": " << e.message << "\n";

  const auto grouped = analysis::group_responses(responses.responses, keys.keys);
  ojson report;
  report["responses"] = responses.responses.size();
  report["unmatched_pair_ids"] = grouped.unmatched;
  ojson by_type = ojson::object();
  std::ostringstream summary;
  summary << "coded " << responses.responses.size() << " responses";
  for (const auto& [type, coded] : grouped.coded) {
    const auto stats = analysis::response_stats(coded, method);
    by_type[std::string(analysis::pair_type_name(type))] = analysis::to_json(stats);
    summary << "; " << analysis::pair_type_name(type) << " n=" << stats.n;
  }
  report["by_pair_type"] = by_type;
  s.write(f.out, report.dump(2) + "\n");
  s.write_manifest(f.out + ".manifest.json", {{"interval", f.interval}});
  summary << " -> " << f.out;
  return {kExitOk, summary.str(), s.written()};
}

}  // namespace

CommandOutcome run(const std::vector<std::string>& args, const std::map<std::string, std::string>& env,
                   std::ostream& out, std::ostream& err) {
  CLI::App app{"Artificial CV profile generator and validator", "profile_forge"};
  app.require_subcommand(1);
  Flags f;
  app.add_option("--threads", f.threads, "worker threads (default: PROFILE_FORGE_THREADS, then all cores)")
      ->check(CLI::PositiveNumber);

  auto* build = app.add_subcommand("build-model", "learn a model bundle from a JSONL corpus");
  build->add_option("--corpus", f.corpus, "corpus JSONL")->required();
  build->add_option("--gazetteer", f.gazetteer, "gazetteer JSONL (name, lat, lon)");
  build->add_option("--out", f.out, "bundle path")->required();

  auto* gen = app.add_subcommand("generate", "sample artificial profiles");
  gen->add_option("--model", f.model, "bundle path")->required();
  gen->add_option("--count", f.count, "number of profiles")->required();
  gen->add_option("--seed", f.seed, "master seed")->required();
  gen->add_option("--country", f.country, "country to generate for");
  gen->add_option("--radius-km", f.radius_km, "location radius");
  gen->add_option("--max-resample", f.max_resample, "extra draws before the centroid fallback");
  gen->add_option("--jitter-years", f.jitter_years, "timing jitter half-width in years");
  gen->add_flag("--extras", f.extras, "draw extras (skills, awards, qualifications)");
  gen->add_option("--out", f.out, "profile JSONL")->required();

  auto* val = app.add_subcommand("validate", "filter profiles by order and likelihood");
  val->add_option("--model", f.model, "bundle path")->required();
  val->add_option("--profiles", f.profiles, "profile JSONL")->required();
  val->add_option("--rank-threshold", f.rank_threshold, "reject ranks below this (0: reject only rank 0)");
  val->add_option("--order-threshold", f.order_threshold, "fixed order-error threshold");
  val->add_option("--out", f.out, "report JSONL")->required();

  auto* cmp = app.add_subcommand("compare", "compare real and artificial populations");
  cmp->add_option("--model", f.model, "bundle path")->required();
  cmp->add_option("--real", f.real, "real profile JSONL")->required();
  cmp->add_option("--artificial", f.artificial, "artificial profile JSONL")->required();
  cmp->add_option("--out", f.out, "report directory")->required();

  auto* clu = app.add_subcommand("cluster", "cluster profiles by state membership");
  clu->add_option("--model", f.model, "bundle path")->required();
  clu->add_option("--profiles", f.profiles, "profile JSONL")->required();
  clu->add_option("--kind", f.kind, "positions or education")->required();
  clu->add_option("--k-min", f.k_min, "smallest k")->required();
  clu->add_option("--k-max", f.k_max, "largest k")->required();
  clu->add_option("--seed", f.seed, "k-means seed");
  clu->add_option("--restarts", f.restarts, "k-means restarts per k");
  clu->add_option("--out", f.out, "report JSON (default: stdout)");

  auto* qst = app.add_subcommand("questionnaire", "assemble pairwise questionnaires");
  qst->add_option("--real", f.real, "real profile JSONL")->required();
  qst->add_option("--artificial", f.artificial, "artificial profile JSONL")->required();
  qst->add_option("--model", f.model, "bundle path")->required();
  qst->add_option("--n", f.n, "number of questionnaires")->required();
  qst->add_option("--seed", f.seed, "layout seed")->required();
  qst->add_option("--out", f.out, "output directory")->required();

  auto* rsp = app.add_subcommand("respond-stats", "score questionnaire responses");
  rsp->add_option("--responses", f.responses, "response JSONL")->required();
  rsp->add_option("--keys", f.keys, "answer key JSONL")->required();
  rsp->add_option("--interval", f.interval, "wald or wilson");
  rsp->add_option("--out", f.out, "report JSON")->required();

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return {kExitOk, "help", {}};
  } catch (const CLI::ParseError& e) {
    err << e.what() << "\n" << app.help();
    return {kExitUsage, e.what(), {}};
  }

  CommandOutcome outcome;
  try {
    const unsigned threads = resolve_threads(f.threads, env);
    if (*build) {
      outcome = cmd_build_model(args, f, env, err);
    } else if (*gen) {
      outcome = cmd_generate(args, f, threads);
    } else if (*val) {
      outcome = cmd_validate(args, f, threads, err);
    } else if (*cmp) {
      outcome = cmd_compare(args, f, err);
    } else if (*clu) {
      outcome = cmd_cluster(args, f, threads, out, err);
    } else if (*qst) {
      outcome = cmd_questionnaire(args, f, err);
    } else {
      outcome = cmd_respond_stats(args, f, err);
    }
  } catch (const UsageError& e) {
    err << e.what() << "\n";
    return {kExitUsage, e.what(), {}};
  } catch (const Error& e) {
    err << e.what() << "\n";
    return {exit_code_for(e.code()), e.what(), {}};
  } catch (const std::exception& e) {
    err << e.what() << "\n";
    return {kExitIo, e.what(), {}};
  }
  out << outcome.summary << "\n";
  return outcome;
}

}  // namespace pforge::cli

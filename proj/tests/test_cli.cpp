#include <unistd.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "json.hpp"
#include "pforge/cli.hpp"

namespace fs = std::filesystem;
using pforge::cli::CommandOutcome;

namespace {

struct Workdir {
  fs::path root;
  Workdir() {
    root = fs::temp_directory_path() / ("pforge-cli-" + std::to_string(::getpid()) + "-" +
                                        std::to_string(reinterpret_cast<std::uintptr_t>(this)));
    fs::remove_all(root);
    fs::create_directories(root);
  }
  ~Workdir() { fs::remove_all(root); }
  std::string operator/(const std::string& name) const { return (root / name).string(); }
};

struct Run {
  CommandOutcome outcome;
  std::string out, err;
};

Run run(const std::vector<std::string>& args, const std::map<std::string, std::string>& env = {}) {
  std::ostringstream out, err;
  auto outcome = pforge::cli::run(args, env, out, err);
  return {outcome, out.str(), err.str()};
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::size_t line_count(const std::string& path) {
  std::ifstream in(path);
  std::size_t n = 0;
  std::string line;
  while (std::getline(in, line)) n += !line.empty();
  return n;
}

const std::string kCorpus = PFORGE_DATA_DIR "/fixture_corpus.jsonl";

}  // namespace

TEST_CASE("sha256 of known inputs") {
  CHECK(pforge::cli::sha256_hex("") == "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
  CHECK(pforge::cli::sha256_hex("abc") == "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}

TEST_CASE("usage errors exit 2") {
  Workdir w;
  CHECK(run({}).outcome.exit_code == 2);
  CHECK(run({"frobnicate"}).outcome.exit_code == 2);
  CHECK(run({"generate", "--model", w / "m.bin", "--count", "5", "--out", w / "g.jsonl"}).outcome.exit_code == 2);

  const auto zero = run({"generate", "--model", w / "m.bin", "--count", "0", "--seed", "1", "--out", w / "g.jsonl"});
  CHECK(zero.outcome.exit_code == 2);
  CHECK(zero.err.find("count must be ≥ 1") != std::string::npos);

  CHECK(run({"build-model", "--corpus", kCorpus, "--out", w / "m.bin", "--bogus"}).outcome.exit_code == 2);
  CHECK(run({"build-model", "--corpus", kCorpus, "--out", w / "m.bin"}, {{"PROFILE_FORGE_THREADS", "zero"}})
            .outcome.exit_code == 2);
}

TEST_CASE("unreadable or malformed inputs exit 3") {
  Workdir w;
  CHECK(run({"build-model", "--corpus", w / "missing.jsonl", "--out", w / "m.bin"}).outcome.exit_code == 3);
  std::ofstream(w / "junk.bin") << "not a bundle";
  const auto r = run({"generate", "--model", w / "junk.bin", "--count", "1", "--seed", "1", "--out", w / "g.jsonl"});
  CHECK(r.outcome.exit_code == 3);
  CHECK(r.err.find("DECODE_ERROR") != std::string::npos);
  CHECK_FALSE(fs::exists(w / "g.jsonl"));
}

TEST_CASE("fixture pipeline end to end") {
  Workdir w;
  const auto corpus_before = slurp(kCorpus);

  auto b = run({"build-model", "--corpus", kCorpus, "--out", w / "m.bin"});
  REQUIRE(b.outcome.exit_code == 0);
  // The fixture is clean, so only the rejections file may be empty.
  for (const auto& path : b.outcome.artifacts_written) {
    if (path.find("rejections") == std::string::npos) CHECK(fs::file_size(path) > 0);
  }

  auto g = run({"--threads", "3", "generate", "--model", w / "m.bin", "--count", "1000", "--seed", "42", "--out",
                w / "gen.jsonl"});
  REQUIRE(g.outcome.exit_code == 0);
  CHECK(line_count(w / "gen.jsonl") == 1000);

  const auto manifest = nlohmann::json::parse(slurp(w / "gen.jsonl.manifest.json"));
  CHECK(manifest["seed"] == 42);
  CHECK(manifest["count"] == 1000);
  CHECK(manifest["argv"][0] == "--threads");
  CHECK(manifest["inputs"][0]["sha256"] == pforge::cli::sha256_hex(slurp(w / "m.bin")));
  CHECK(manifest["bundle_sha256"] == manifest["inputs"][0]["sha256"]);
  CHECK(manifest.contains("fallbacks"));
  CHECK(manifest.contains("short_sequences"));

  auto v = run({"validate", "--model", w / "m.bin", "--profiles", w / "gen.jsonl", "--out", w / "report.jsonl"});
  CHECK(v.outcome.exit_code == 0);
  CHECK(line_count(w / "report.jsonl") == 1000);

  // An impossible threshold rejects everything and flips the exit code.
  v = run({"validate", "--model", w / "m.bin", "--profiles", w / "gen.jsonl", "--rank-threshold", "1", "--out",
           w / "strict.jsonl"});
  CHECK(v.outcome.exit_code == 1);

  auto c = run({"compare", "--model", w / "m.bin", "--real", kCorpus, "--artificial", w / "gen.jsonl", "--out",
                w / "cmp"});
  CHECK(c.outcome.exit_code == 0);
  for (const char* f : {"distributions.json", "age.json", "rank_by_length.json", "summary.txt", "manifest.json"}) {
    CHECK(fs::file_size(w / (std::string("cmp/") + f)) > 0);
  }

  auto k = run({"cluster", "--model", w / "m.bin", "--profiles", w / "gen.jsonl", "--kind", "positions", "--k-min",
                "2", "--k-max", "4", "--restarts", "5", "--out", w / "clusters.json"});
  CHECK(k.outcome.exit_code == 0);
  CHECK(nlohmann::json::parse(slurp(w / "clusters.json")).contains("silhouette_by_k"));
  CHECK(run({"cluster", "--model", w / "m.bin", "--profiles", w / "gen.jsonl", "--kind", "hobbies", "--k-min", "2",
             "--k-max", "3"})
            .outcome.exit_code == 2);

  auto q = run({"questionnaire", "--real", kCorpus, "--artificial", w / "gen.jsonl", "--model", w / "m.bin", "--n",
                "20", "--seed", "7", "--out", w / "q"});
  REQUIRE(q.outcome.exit_code == 0);
  CHECK(line_count(w / "q/questionnaires.jsonl") == 20);
  CHECK(line_count(w / "q/answer_keys.jsonl") == 120);
  CHECK(fs::file_size(w / "q/q001.txt") > 0);

  {
    std::ifstream keys(w / "q/answer_keys.jsonl");
    std::ofstream resp(w / "responses.jsonl");
    std::string line;
    int i = 0;
    while (std::getline(keys, line)) {
      const auto k = nlohmann::json::parse(line);
      const char* choices[] = {"left_more_real", "right_more_real", "equal"};
      resp << nlohmann::json{{"questionnaire_id", k["questionnaire_id"]},
                             {"pair_id", k["pair_id"]},
                             {"respondent_id", "e1"},
                             {"choice", choices[i++ % 3]}}
                  .dump()
           << "\n";
    }
  }
  auto s = run({"respond-stats", "--responses", w / "responses.jsonl", "--keys", w / "q/answer_keys.jsonl", "--out",
                w / "stats.json"});
  CHECK(s.outcome.exit_code == 0);
  const auto stats = nlohmann::json::parse(slurp(w / "stats.json"));
  CHECK(stats["responses"] == 120);
  CHECK(stats["by_pair_type"].size() == 3);

  CHECK(slurp(kCorpus) == corpus_before);
}

TEST_CASE("identical generate invocations give identical bytes") {
  Workdir w;
  REQUIRE(run({"build-model", "--corpus", kCorpus, "--out", w / "m.bin"}).outcome.exit_code == 0);
  const std::vector<std::string> args{"generate", "--model", w / "m.bin", "--count", "200", "--seed", "5", "--out",
                                      w / "a.jsonl"};
  REQUIRE(run(args).outcome.exit_code == 0);
  const auto first = slurp(w / "a.jsonl");
  const auto first_manifest = slurp(w / "a.jsonl.manifest.json");
  REQUIRE(run(args, {{"PROFILE_FORGE_THREADS", "5"}}).outcome.exit_code == 0);
  CHECK(slurp(w / "a.jsonl") == first);
  CHECK(slurp(w / "a.jsonl.manifest.json") == first_manifest);
}

TEST_CASE("bundle bytes follow SOURCE_DATE_EPOCH") {
  Workdir w;
  REQUIRE(run({"build-model", "--corpus", kCorpus, "--out", w / "a.bin"}, {{"SOURCE_DATE_EPOCH", "100"}})
              .outcome.exit_code == 0);
  REQUIRE(run({"build-model", "--corpus", kCorpus, "--out", w / "b.bin"}, {{"SOURCE_DATE_EPOCH", "100"}})
              .outcome.exit_code == 0);
  REQUIRE(run({"build-model", "--corpus", kCorpus, "--out", w / "c.bin"}, {{"SOURCE_DATE_EPOCH", "200"}})
              .outcome.exit_code == 0);
  CHECK(slurp(w / "a.bin") == slurp(w / "b.bin"));
  CHECK(slurp(w / "a.bin") != slurp(w / "c.bin"));
}

// Writes the synthetic fixture corpus and its gazetteer.
//
//   make_fixture --out data/fixture_corpus.jsonl [--count 200] [--seed S]
//                [--gazetteer data/gazetteer.jsonl] [--dirty]

#include <fstream>
#include <iostream>

#include "CLI11.hpp"
#include "pforge/fixture.hpp"
#include "pforge/interchange.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Build the synthetic fixture corpus"};
  pforge::fixture::FixtureOptions opts;
  std::string out_path, gazetteer_path;
  bool dirty = false;
  app.add_option("--out", out_path, "corpus JSONL")->required();
  app.add_option("--count", opts.count, "records");
  app.add_option("--seed", opts.seed, "seed");
  app.add_option("--gazetteer", gazetteer_path, "also write the gazetteer here");
  app.add_flag("--dirty", dirty, "plant rejections and corrupt three lines");
  CLI11_PARSE(app, argc, argv);

  std::ofstream out(out_path, std::ios::binary);
  if (!out) {
    std::cerr << "cannot write " << out_path << "\n";
    return 3;
  }
  if (dirty) {
    const auto d = pforge::fixture::build_dirty_fixture(opts);
    for (const auto& line : d.lines) out << line << '\n';
    for (const auto& p : d.planted) {
      std::cerr << "planted " << pforge::corpus::reason_code(p.reason) << " in " << p.person_id << "\n";
    }
    for (const auto line : d.corrupted_lines) std::cerr << "corrupted line " << line << "\n";
  } else {
    pforge::interchange::write_records(out, pforge::fixture::build_fixture(opts));
  }
  if (!gazetteer_path.empty()) {
    std::ofstream gaz(gazetteer_path, std::ios::binary);
    for (const auto& line : pforge::fixture::gazetteer_lines()) gaz << line << '\n';
  }
  return out ? 0 : 3;
}

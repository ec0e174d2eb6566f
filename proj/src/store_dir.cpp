#include "specqp/store_dir.hpp"

#include <cstdio>
#include <fstream>
#include <string>

#include "specqp/catalog.hpp"
#include "specqp/errors.hpp"
#include "specqp/store.hpp"

namespace specqp {

namespace fs = std::filesystem;

namespace {

std::string hex(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

}  // namespace

void write_store_dir(const fs::path& dir, const TripleStore& store) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError("cannot create store directory " + dir.string() + ": " + ec.message());
  {
    std::ofstream out(dir / "triples.tsv", std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write " + (dir / "triples.tsv").string());
    for (const TripleRecord& r : store.records()) {
      out << r.subject << '\t' << r.predicate << '\t' << r.object << '\t' << format_score(r.score) << '\n';
    }
  }
  {
    std::ofstream out(dir / "CHECKSUM", std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write " + (dir / "CHECKSUM").string());
    out << hex(store.checksum()) << '\n';
  }
  // Stats from an earlier ingest no longer describe these triples.
  fs::remove(stats_path(dir), ec);
}

TripleStore open_store_dir(const fs::path& dir) {
  std::ifstream triples(dir / "triples.tsv", std::ios::binary);
  if (!triples) throw IoError("store directory " + dir.string() + " has no triples.tsv");
  TripleStore store = load_triples(triples);
  std::ifstream sum(dir / "CHECKSUM");
  if (!sum) throw IoError("store directory " + dir.string() + " has no CHECKSUM");
  std::string recorded;
  sum >> recorded;
  if (recorded != hex(store.checksum())) {
    throw Error("store checksum mismatch in " + dir.string() + ": recorded " + recorded + ", computed " +
                hex(store.checksum()));
  }
  return store;
}

fs::path stats_path(const fs::path& dir) { return dir / "stats.tsv"; }

bool load_catalog(const fs::path& dir, PatternStatsCatalog& catalog) {
  std::ifstream in(stats_path(dir));
  if (!in) return false;
  return catalog.load(in);
}

void save_catalog(const fs::path& dir, const PatternStatsCatalog& catalog) {
  std::ofstream out(stats_path(dir), std::ios::trunc);
  if (!out) throw IoError("cannot write " + stats_path(dir).string());
  catalog.save(out);
}

}  // namespace specqp

#pragma once

#include <filesystem>

namespace specqp {

class TripleStore;
class PatternStatsCatalog;

// A store directory holds triples.tsv (canonical order), CHECKSUM (hex of
// TripleStore::checksum) and, once built, stats.tsv. Indexes are rebuilt in
// memory on open.
void write_store_dir(const std::filesystem::path& dir, const TripleStore& store);
// Throws IoError if files are missing and Error if CHECKSUM disagrees with
// the triples.
TripleStore open_store_dir(const std::filesystem::path& dir);

std::filesystem::path stats_path(const std::filesystem::path& dir);
// Loads stats.tsv into the catalog when present and built for this store.
bool load_catalog(const std::filesystem::path& dir, PatternStatsCatalog& catalog);
void save_catalog(const std::filesystem::path& dir, const PatternStatsCatalog& catalog);

}  // namespace specqp

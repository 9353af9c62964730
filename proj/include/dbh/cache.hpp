#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace dbh {

class DyadicPair;

// Hashed artifact store: <dir>/<key>.manifest.json names the field files it
// owns; anything not referenced by a manifest is garbage.
std::string cache_dir_default();
void ensure_dir(const std::string& dir);

void save_pair_cache(const std::string& dir, const std::string& key, const DyadicPair& p);
bool pair_cache_exists(const std::string& dir, const std::string& key);

// removes unreferenced field files; returns freed bytes
std::uint64_t cache_gc(const std::string& dir);

} // namespace dbh

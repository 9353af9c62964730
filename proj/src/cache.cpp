#include "dbh/cache.hpp"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <set>

#include <json.hpp>

#include "dbh/dyadic.hpp"
#include "dbh/field_io.hpp"

namespace fs = std::filesystem;

namespace dbh {

std::string cache_dir_default() {
    if (const char* env = std::getenv("DBARH_CACHE")) return env;
    return "dbarh-cache";
}

void ensure_dir(const std::string& dir) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw ConfigError("cannot create directory " + dir + ": " + ec.message());
}

void save_pair_cache(const std::string& dir, const std::string& key, const DyadicPair& p) {
    ensure_dir(dir);
    nlohmann::json man;
    man["kind"] = "k-dyadic-pair";
    man["key"] = key;
    man["N"] = p.dim;
    man["M"] = p.moment_order;
    man["j_max"] = p.j_max;
    man["unit_scale"] = p.unit_scale;
    man["eps_rep"] = p.eps_rep;
    man["symbol_deficit"] = p.symbol_deficit;
    std::vector<std::string> files;
    int npts = p.dim == 4 ? 16 : (p.dim == 2 ? 64 : 1024);
    for (int j = 0; j <= std::min(p.j_max, 4); ++j) {
        Grid mg = p.member_grid(j, npts);
        for (int fam = 0; fam < 2; ++fam) {
            std::string name = key + (fam ? ".psi" : ".phi") + std::to_string(j) + ".field";
            save_field(dir + "/" + name, fam ? p.sample_psi(j, mg) : p.sample_phi(j, mg));
            files.push_back(name);
        }
    }
    man["fields"] = files;
    std::ofstream out(dir + "/" + key + ".manifest.json");
    out << man.dump(2) << "\n";
}

bool pair_cache_exists(const std::string& dir, const std::string& key) {
    return fs::exists(dir + "/" + key + ".manifest.json");
}

std::uint64_t cache_gc(const std::string& dir) {
    if (!fs::exists(dir)) throw ConfigError("cache_gc: no such directory " + dir);
    std::set<std::string> referenced;
    for (const auto& entry : fs::directory_iterator(dir)) {
        if (entry.path().extension() != ".json") continue;
        std::ifstream in(entry.path());
        nlohmann::json man;
        try {
            in >> man;
        } catch (...) {
            continue;
        }
        if (man.contains("fields"))
            for (const auto& f : man["fields"]) referenced.insert(f.get<std::string>());
    }
    std::uint64_t freed = 0;
    for (const auto& entry : fs::directory_iterator(dir)) {
        if (entry.path().extension() == ".json") continue;
        if (!entry.is_regular_file()) continue;
        std::string name = entry.path().filename().string();
        if (referenced.count(name)) continue;
        freed += entry.file_size();
        fs::remove(entry.path());
    }
    return freed;
}

} // namespace dbh

#include "dbh/field_io.hpp"

#include <bit>
#include <cstring>
#include <fstream>

#include <json.hpp>

namespace dbh {

static_assert(std::endian::native == std::endian::little,
              "field cache format is little-endian");

void save_field(const std::string& path, const SampledField& f) {
    nlohmann::json hdr;
    hdr["N"] = f.grid().dim;
    hdr["n_axis"] = f.grid().n_axis;
    hdr["L"] = f.grid().period;
    hdr["dtype"] = "c128";
    hdr["layout"] = "row-major";
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ConfigError("save_field: cannot open " + path);
    out << hdr.dump() << "\n";
    const auto& v = f.values();
    out.write(reinterpret_cast<const char*>(v.data()),
              std::streamsize(v.size() * sizeof(cplx)));
    if (!out) throw ConfigError("save_field: write failed for " + path);
}

SampledField load_field(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("load_field: cannot open " + path);
    std::string header;
    std::getline(in, header);
    nlohmann::json hdr = nlohmann::json::parse(header);
    if (hdr.value("dtype", "") != "c128" || hdr.value("layout", "") != "row-major")
        throw ConfigError("load_field: unsupported dtype/layout in " + path);
    Grid g = make_grid(hdr.at("N").get<int>(), hdr.at("n_axis").get<int>(),
                       hdr.at("L").get<double>());
    std::vector<cplx> v(g.size());
    in.read(reinterpret_cast<char*>(v.data()), std::streamsize(v.size() * sizeof(cplx)));
    if (std::size_t(in.gcount()) != v.size() * sizeof(cplx))
        throw ConfigError("load_field: truncated payload in " + path);
    return SampledField::from_values(g, std::move(v));
}

} // namespace dbh

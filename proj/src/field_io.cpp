#include "maxpot/field_io.hpp"

#include <bit>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <stdexcept>

#include "json.hpp"

namespace maxpot {

static_assert(std::endian::native == std::endian::little,
              "field files are little-endian; big-endian hosts are unsupported");

std::string format_double(double v) {
    char buf[40];
    // %.17g round-trips every double; trim to the shortest representation
    // that still round-trips for readable files.
    for (int prec = 1; prec <= 17; ++prec) {
        std::snprintf(buf, sizeof(buf), "%.*g", prec, v);
        if (std::strtod(buf, nullptr) == v) return buf;
    }
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

void write_field(const Field& f, const std::string& path) {
    nlohmann::json header;
    header["version"] = 1;
    header["n"] = f.grid.dim;
    header["dims"] = std::vector<int>(f.grid.dims.begin(), f.grid.dims.begin() + f.grid.dim);
    header["h"] = f.grid.spacing;
    header["origin"] =
        std::vector<double>(f.grid.origin.begin(), f.grid.origin.begin() + f.grid.dim);
    header["m"] = f.components;
    header["encoding"] = "f64le";

    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("write_field: cannot open " + path);
    out << header.dump() << '\n';
    out.write(reinterpret_cast<const char*>(f.data.data()),
              static_cast<std::streamsize>(f.data.size() * sizeof(double)));
    if (!out) throw std::runtime_error("write_field: write failed for " + path);
}

Field read_field(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("read_field: cannot open " + path);
    std::string line;
    if (!std::getline(in, line)) throw std::runtime_error("read_field: missing header in " + path);
    const nlohmann::json header = nlohmann::json::parse(line);
    if (header.value("version", 0) != 1) throw std::runtime_error("read_field: unsupported version");
    if (header.value("encoding", "") != "f64le") {
        throw std::runtime_error("read_field: unsupported encoding");
    }

    const int dim = header.at("n").get<int>();
    const auto dims = header.at("dims").get<std::vector<int>>();
    if (static_cast<int>(dims.size()) != dim) throw std::runtime_error("read_field: dims mismatch");
    std::array<int, 3> d{1, 1, 1};
    for (int a = 0; a < dim; ++a) d[static_cast<std::size_t>(a)] = dims[static_cast<std::size_t>(a)];
    Grid grid(dim, d, header.at("h").get<double>());
    Field f(grid, header.at("m").get<int>());
    in.read(reinterpret_cast<char*>(f.data.data()),
            static_cast<std::streamsize>(f.data.size() * sizeof(double)));
    if (in.gcount() != static_cast<std::streamsize>(f.data.size() * sizeof(double))) {
        throw std::runtime_error("read_field: truncated sample block in " + path);
    }
    return f;
}

void write_field_csv(const Field& f, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("write_field_csv: cannot open " + path);
    const int n = f.grid.dim;
    for (int a = 0; a < n; ++a) out << "x" << (a + 1) << ',';
    for (int c = 0; c < f.components; ++c) out << "v" << (c + 1) << (c + 1 == f.components ? "" : ",");
    out << '\n';
    for (std::size_t node = 0; node < f.nodes(); ++node) {
        const Vec x = f.grid.coord(node);
        for (int a = 0; a < n; ++a) out << format_double(x[a]) << ',';
        for (int c = 0; c < f.components; ++c) {
            out << format_double(f.at(c, node)) << (c + 1 == f.components ? "" : ",");
        }
        out << '\n';
    }
}

}  // namespace maxpot

// report.hpp
// Report documents: FNV-1a config hashes, atomic file writes, convergence CSV tables.

#pragma once

#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <cmath>
#include <optional>
#include <limits>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "vekua/errors.hpp"

namespace vekua {

/// 64-bit FNV-1a (offset basis 0xcbf29ce484222325, prime 0x100000001b3).
inline std::uint64_t fnv1a64(std::string_view bytes) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

inline std::string hex16(std::uint64_t v) {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
    return buf;
}

/// Writes `content` to `<path>.tmp` and renames it over `path`.
inline void atomic_write(const std::filesystem::path& path, std::string_view content) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::filesystem::path tmp = path;
    tmp += ".tmp";
    {
        std::ofstream os(tmp, std::ios::binary | std::ios::trunc);
        if (!os) throw VekuaError("cannot open " + tmp.string() + " for writing");
        os.write(content.data(), static_cast<std::streamsize>(content.size()));
        if (!os) throw VekuaError("write to " + tmp.string() + " failed");
    }
    std::filesystem::rename(tmp, path);
}

inline void write_json(const std::filesystem::path& path, const nlohmann::json& doc) {
    atomic_write(path, doc.dump(2) + "\n");
}

/// %.17g, so a value survives a text round trip.
inline std::string format_real(double v) {
    if (std::isnan(v)) return "nan";
    std::ostringstream os;
    os << std::setprecision(17) << v;
    return os.str();
}

struct ConvergenceRow {
    int n = 0;
    double h = 0.0;
    double residual = 0.0;
    std::optional<double> observed_order;
};

/// Columns n,h,residual,observed_order; the first row has an empty order.
inline std::string convergence_csv(const std::vector<ConvergenceRow>& rows) {
    std::string out = "n,h,residual,observed_order\n";
    for (const auto& r : rows) {
        out += std::to_string(r.n) + "," + format_real(r.h) + "," + format_real(r.residual) + ",";
        if (r.observed_order) out += format_real(*r.observed_order);
        out += "\n";
    }
    return out;
}

}  // namespace vekua

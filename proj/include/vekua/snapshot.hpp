// snapshot.hpp
// "VKB1" field snapshots.
//
//   bytes 0..3   "VKB1"
//   u32 LE       length L of the header
//   L bytes      UTF-8 JSON {"domain", "n", "h", "inside_count", "value_kind"}
//   f64 LE       (re, im) pairs, component-major: all cells of c0, then c1, ...
//                cells in row-major order over the full grid, inside cells only
//
// Scalar fields ("value_kind": "scalar") carry one component.

#pragma once

#include <bit>
#include <cstdint>
#include <cstring>
#include <istream>
#include <ostream>
#include <string>
#include <vector>

#include <json.hpp>

#include "vekua/errors.hpp"
#include "vekua/grid.hpp"

namespace vekua {

using json = nlohmann::json;

inline json domain_to_json(const DomainSpec& spec) {
    if (spec.is_ball()) {
        const auto& b = spec.as_ball();
        return {{"kind", "ball"}, {"center", b.center}, {"radius", b.radius}};
    }
    const auto& b = spec.as_box();
    return {{"kind", "box"}, {"min", b.min}, {"max", b.max}};
}

inline DomainSpec domain_from_json(const json& j) {
    const std::string kind = j.at("kind").get<std::string>();
    if (kind == "ball") return DomainSpec::ball(j.at("center").get<Vec3>(), j.at("radius").get<double>());
    if (kind == "box") return DomainSpec::box(j.at("min").get<Vec3>(), j.at("max").get<Vec3>());
    throw DomainError("unknown domain kind '" + kind + "'");
}

namespace detail {

inline void put_u32(std::ostream& os, std::uint32_t v) {
    for (int b = 0; b < 4; ++b) os.put(static_cast<char>((v >> (8 * b)) & 0xFF));
}

inline void put_f64(std::ostream& os, double d) {
    const auto v = std::bit_cast<std::uint64_t>(d);
    char buf[8];
    for (int b = 0; b < 8; ++b) buf[b] = static_cast<char>((v >> (8 * b)) & 0xFF);
    os.write(buf, 8);
}

inline std::uint32_t get_u32(std::istream& is) {
    unsigned char buf[4];
    if (!is.read(reinterpret_cast<char*>(buf), 4)) throw VekuaError("truncated VKB1 stream");
    std::uint32_t v = 0;
    for (int b = 0; b < 4; ++b) v |= static_cast<std::uint32_t>(buf[b]) << (8 * b);
    return v;
}

inline double get_f64(std::istream& is) {
    unsigned char buf[8];
    if (!is.read(reinterpret_cast<char*>(buf), 8)) throw VekuaError("truncated VKB1 stream");
    std::uint64_t v = 0;
    for (int b = 0; b < 8; ++b) v |= static_cast<std::uint64_t>(buf[b]) << (8 * b);
    return std::bit_cast<double>(v);
}

}  // namespace detail

inline constexpr char vkb1_magic[4] = {'V', 'K', 'B', '1'};

/// Magic + length-prefixed JSON block (shared by snapshots and basis manifests).
inline void write_vkb1_header(std::ostream& os, const json& header) {
    const std::string text = header.dump();
    os.write(vkb1_magic, 4);
    detail::put_u32(os, static_cast<std::uint32_t>(text.size()));
    os.write(text.data(), static_cast<std::streamsize>(text.size()));
}

inline json read_vkb1_header(std::istream& is) {
    char magic[4];
    if (!is.read(magic, 4) || std::memcmp(magic, vkb1_magic, 4) != 0) throw VekuaError("not a VKB1 stream");
    const std::uint32_t len = detail::get_u32(is);
    std::string text(len, '\0');
    if (!is.read(text.data(), len)) throw VekuaError("truncated VKB1 header");
    return json::parse(text);
}

inline json snapshot_header(const DomainGrid& g, const char* kind) {
    return {{"domain", domain_to_json(g.spec())},
            {"n", g.n()},
            {"h", g.h()},
            {"inside_count", g.size()},
            {"value_kind", kind}};
}

inline void write_snapshot(std::ostream& os, const BiquatField& u) {
    write_vkb1_header(os, snapshot_header(u.grid(), "biquaternion"));
    for (std::size_t c = 0; c < 4; ++c)
        for (std::size_t k = 0; k < u.size(); ++k) {
            detail::put_f64(os, u[k][c].real());
            detail::put_f64(os, u[k][c].imag());
        }
}

inline void write_snapshot(std::ostream& os, const ScalarField& u) {
    write_vkb1_header(os, snapshot_header(u.grid(), "scalar"));
    for (std::size_t k = 0; k < u.size(); ++k) {
        detail::put_f64(os, u[k].real());
        detail::put_f64(os, u[k].imag());
    }
}

namespace detail {

// Uses `grid` when it matches the header, otherwise rebuilds the grid it describes.
inline GridPtr grid_for_header(const json& header, GridPtr grid) {
    const DomainSpec spec = domain_from_json(header.at("domain"));
    const int n = header.at("n").get<int>();
    if (!grid || !(grid->n() == n && grid->spec() == spec)) {
        if (grid) throw GridMismatch();
        grid = build_grid(spec, n);
    }
    if (grid->size() != header.at("inside_count").get<std::size_t>())
        throw VekuaError("VKB1 inside_count does not match the grid");
    return grid;
}

}  // namespace detail

/// Reads a biquaternion snapshot; with a grid given, the snapshot must live on it.
inline BiquatField read_snapshot(std::istream& is, GridPtr grid = nullptr) {
    const json header = read_vkb1_header(is);
    if (header.at("value_kind") != "biquaternion") throw VekuaError("VKB1 snapshot is not biquaternion-valued");
    grid = detail::grid_for_header(header, std::move(grid));
    BiquatField u(grid);
    for (std::size_t c = 0; c < 4; ++c)
        for (std::size_t k = 0; k < u.size(); ++k) {
            const double re = detail::get_f64(is);
            const double im = detail::get_f64(is);
            u[k][c] = {re, im};
        }
    return u;
}

inline ScalarField read_scalar_snapshot(std::istream& is, GridPtr grid = nullptr) {
    const json header = read_vkb1_header(is);
    if (header.at("value_kind") != "scalar") throw VekuaError("VKB1 snapshot is not scalar-valued");
    grid = detail::grid_for_header(header, std::move(grid));
    ScalarField u(grid);
    for (std::size_t k = 0; k < u.size(); ++k) {
        const double re = detail::get_f64(is);
        const double im = detail::get_f64(is);
        u[k] = {re, im};
    }
    return u;
}

}  // namespace vekua

// cli.hpp
// Run configuration and command implementations behind the `vekua` executable.
//
// Config file: one JSON document. Keys: domain ("ball" | "box" | {"kind", ...}), n, m,
// scale, seed, coefficients (preset name or {"preset": name, ...}), tolerances
// {name: value}, convergence_n [n...], surface_m, basis_path. Flags override file
// values, which override defaults. The output directory is not part of the hashed
// configuration: reports depend on what is computed, not where it is written.

#pragma once

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "vekua/analytic.hpp"
#include "vekua/bergman.hpp"
#include "vekua/checks.hpp"
#include "vekua/decomposition.hpp"
#include "vekua/errors.hpp"
#include "vekua/grid.hpp"
#include "vekua/integral_ops.hpp"
#include "vekua/report.hpp"
#include "vekua/snapshot.hpp"

namespace vekua::cli {

using nlohmann::json;

enum ExitCode : int { exit_ok = 0, exit_error = 1, exit_tolerance = 2, exit_config = 3, exit_contraction = 4 };

// --- configuration ----------------------------------------------------------------------

struct RunConfig {
    DomainSpec domain = DomainSpec::unit_ball();
    int n = 16;
    int basis_m = 8;
    double scale = 1.5;
    json coefficients = {{"preset", "zero"}};
    std::map<std::string, double> tolerances;  // overrides of the command defaults
    std::uint64_t seed = 0;
    std::filesystem::path output_dir = ".";
    std::vector<int> convergence_n{16, 24, 32};
    int surface_m = 10000;
    std::string basis_path;

    /// Canonical form, the input of the config hash (output_dir excluded).
    json to_json() const {
        json j = {{"domain", domain_to_json(domain)},
                  {"n", n},
                  {"m", basis_m},
                  {"scale", scale},
                  {"coefficients", coefficients},
                  {"tolerances", tolerances},
                  {"seed", seed},
                  {"convergence_n", convergence_n},
                  {"surface_m", surface_m}};
        if (!basis_path.empty()) j["basis_path"] = basis_path;
        return j;
    }
};

struct FlagOverrides {
    std::optional<std::string> domain;
    std::optional<int> n;
    std::optional<int> m;
    std::optional<std::uint64_t> seed;
    std::optional<std::string> out;
    std::optional<std::string> coeffs;
    std::optional<std::string> basis;
};

inline DomainSpec domain_from_config(const json& j) {
    if (j.is_string()) {
        const auto s = j.get<std::string>();
        if (s == "ball") return DomainSpec::unit_ball();
        if (s == "box") return DomainSpec::box({0.0, 0.0, 0.0}, {1.0, 1.0, 1.0});
        throw ConfigError("domain must be 'ball' or 'box', got '" + s + "'");
    }
    try {
        return domain_from_json(j);
    } catch (const ConfigError&) {
        throw;
    } catch (const std::exception& e) {
        throw ConfigError(std::string("invalid domain: ") + e.what());
    }
}

inline const std::vector<std::string>& preset_names() {
    static const std::vector<std::string> names{"zero",      "constant", "kappa-half", "kappa-over-one",
                                                "main-vekua", "helmholtz", "bessel"};
    return names;
}

/// Preset name or object -> {"preset": name, ...params} with defaults filled in.
inline json normalize_coefficients(const json& c) {
    json out = c.is_string() ? json{{"preset", c.get<std::string>()}} : c;
    if (!out.is_object() || !out.contains("preset") || !out["preset"].is_string())
        throw ConfigError("coefficients must be a preset name or an object with a 'preset' key");
    const auto name = out["preset"].get<std::string>();
    if (std::find(preset_names().begin(), preset_names().end(), name) == preset_names().end())
        throw ConfigError("unknown coefficient preset '" + name + "'");
    if (name == "constant" && !out.contains("a")) throw ConfigError("constant preset needs 'a'");
    if (name == "main-vekua" && !out.contains("c")) out["c"] = 0.05;
    if (name == "helmholtz" && !out.contains("alpha")) out["alpha"] = {0.2, 0.0};
    return out;
}

namespace detail {

inline Complex complex_from_json(const json& j) {
    if (j.is_number()) return {j.get<double>(), 0.0};
    if (j.is_array() && j.size() == 2) return {j[0].get<double>(), j[1].get<double>()};
    throw ConfigError("complex values are numbers or [re, im] pairs");
}

inline Biquaternion biquaternion_from_json(const json& j) {
    if (!j.is_array() || j.size() != 4) throw ConfigError("biquaternions are lists of 4 complex components");
    return {complex_from_json(j[0]), complex_from_json(j[1]), complex_from_json(j[2]), complex_from_json(j[3])};
}

}  // namespace detail

/// Builds A on `grid`. kappa-half: A = (c e0, 0, 0, 0) with 2 diam c = 0.5.
/// main-vekua: f = 1 + c x1^2 and A = (grad f / f, 0, 0, 0), i.e. D - M^{grad f / f}.
/// helmholtz: A = (-alpha, 0, 0, 0), so D - Q_A = D + M^alpha. bessel: A = (i pi e1, 0, 0, 0).
inline CoefficientTuple build_coefficients(const json& desc, const GridPtr& grid) {
    const json c = normalize_coefficients(desc);
    const auto name = c["preset"].get<std::string>();
    const double diam = grid->spec().diameter();
    const Biquaternion zero{};
    if (name == "zero") return CoefficientTuple::zero();
    if (name == "constant") {
        const json& a = c["a"];
        if (!a.is_array() || a.size() != 4) throw ConfigError("constant preset needs four coefficients");
        return {detail::biquaternion_from_json(a[0]), detail::biquaternion_from_json(a[1]),
                detail::biquaternion_from_json(a[2]), detail::biquaternion_from_json(a[3])};
    }
    if (name == "kappa-half") return {Biquaternion(0.25 / diam), zero, zero, zero};
    if (name == "kappa-over-one") return {Biquaternion(0.6 / diam), zero, zero, zero};
    if (name == "main-vekua") {
        const double k = c["c"].get<double>();
        const BiquatField g = sample(
            [k](const Vec3& x) { return Biquaternion(0.0, 2.0 * k * x[0] / (1.0 + k * x[0] * x[0]), 0.0, 0.0); }, grid);
        return {g, zero, zero, zero};
    }
    if (name == "helmholtz") return {Biquaternion(-detail::complex_from_json(c["alpha"])), zero, zero, zero};
    return bessel_coefficients();
}

inline void validate(const RunConfig& cfg) {
    if (cfg.n < 8) throw ConfigError("n must be >= 8");
    if (cfg.basis_m < 1) throw ConfigError("m must be >= 1");
    if (!(cfg.scale > 1.0)) throw ConfigError("scale must exceed 1");
    if (cfg.surface_m < 100) throw ConfigError("surface_m must be >= 100");
    if (cfg.convergence_n.size() < 2) throw ConfigError("convergence_n needs at least two resolutions");
    for (int n : cfg.convergence_n)
        if (n < 8) throw ConfigError("convergence_n entries must be >= 8");
    for (const auto& [name, v] : cfg.tolerances)
        if (!(v > 0.0)) throw ConfigError("tolerance '" + name + "' must be positive");
    normalize_coefficients(cfg.coefficients);
}

/// Flag > file > default.
inline RunConfig load_config(const std::optional<std::filesystem::path>& file, const FlagOverrides& flags) {
    RunConfig cfg;
    if (file) {
        std::ifstream is(*file);
        if (!is) throw ConfigError("cannot read config file " + file->string());
        json j;
        try {
            j = json::parse(is);
        } catch (const json::exception& e) {
            throw ConfigError(std::string("config is not valid JSON: ") + e.what());
        }
        if (!j.is_object()) throw ConfigError("config must be a JSON object");
        static const std::vector<std::string> known{"domain", "n", "m", "scale", "seed", "coefficients", "tolerances",
                                                    "convergence_n", "surface_m", "basis_path", "out"};
        for (const auto& [key, _] : j.items())
            if (std::find(known.begin(), known.end(), key) == known.end()) throw ConfigError("unknown config key '" + key + "'");
        try {
            if (j.contains("domain")) cfg.domain = domain_from_config(j["domain"]);
            if (j.contains("n")) cfg.n = j["n"].get<int>();
            if (j.contains("m")) cfg.basis_m = j["m"].get<int>();
            if (j.contains("scale")) cfg.scale = j["scale"].get<double>();
            if (j.contains("seed")) cfg.seed = j["seed"].get<std::uint64_t>();
            if (j.contains("coefficients")) cfg.coefficients = j["coefficients"];
            if (j.contains("tolerances")) cfg.tolerances = j["tolerances"].get<std::map<std::string, double>>();
            if (j.contains("convergence_n")) cfg.convergence_n = j["convergence_n"].get<std::vector<int>>();
            if (j.contains("surface_m")) cfg.surface_m = j["surface_m"].get<int>();
            if (j.contains("basis_path")) cfg.basis_path = j["basis_path"].get<std::string>();
            if (j.contains("out")) cfg.output_dir = j["out"].get<std::string>();
        } catch (const json::exception& e) {
            throw ConfigError(std::string("config value has the wrong type: ") + e.what());
        }
    }
    if (flags.domain) cfg.domain = domain_from_config(json(*flags.domain));
    if (flags.n) cfg.n = *flags.n;
    if (flags.m) cfg.basis_m = *flags.m;
    if (flags.seed) cfg.seed = *flags.seed;
    if (flags.out) cfg.output_dir = *flags.out;
    if (flags.coeffs) cfg.coefficients = *flags.coeffs;
    if (flags.basis) cfg.basis_path = *flags.basis;
    cfg.coefficients = normalize_coefficients(cfg.coefficients);
    validate(cfg);
    return cfg;
}

// --- reports ---------------------------------------------------------------------------

/// Named checks against tolerances; `at_least` marks lower bounds.
class Report {
public:
    Report(std::string command, const RunConfig& cfg, std::map<std::string, double> defaults)
        : command_(std::move(command)), cfg_(cfg), tol_(std::move(defaults)) {
        for (const auto& [k, v] : cfg.tolerances)
            if (tol_.count(k)) tol_[k] = v;
    }

    double tol(const std::string& name) const { return tol_.at(name); }

    bool check(const std::string& name, double value, const std::string& tol_name, bool at_least = false) {
        const double t = tol(tol_name);
        const bool ok = std::isfinite(value) && (at_least ? value >= t : value <= t);
        checks_[name] = {{"value", value}, {"tolerance", tol_name}, {"bound", at_least ? "min" : "max"}, {"pass", ok}};
        pass_ = pass_ && ok;
        return ok;
    }

    void flag(const std::string& name, bool ok, const std::string& what) {
        checks_[name] = {{"value", ok}, {"requirement", what}, {"pass", ok}};
        pass_ = pass_ && ok;
    }

    json& results() { return results_; }
    bool passed() const { return pass_; }

    json document() const {
        const json config = cfg_.to_json();
        return {{"command", command_},
                {"config", config},
                {"config_hash", hex16(fnv1a64(config.dump()))},
                {"tolerances", tol_},
                {"results", results_},
                {"checks", checks_},
                {"pass", pass_}};
    }

    void write(const std::filesystem::path& file) const { write_json(file, document()); }

private:
    std::string command_;
    const RunConfig& cfg_;
    std::map<std::string, double> tol_;
    json results_ = json::object();
    json checks_ = json::object();
    bool pass_ = true;
};

inline json to_json(const Vec3& x) { return {x[0], x[1], x[2]}; }

inline json to_json(const Biquaternion& p) {
    json out = json::array();
    for (std::size_t k = 0; k < 4; ++k) out.push_back({p[k].real(), p[k].imag()});
    return out;
}

inline void note(const std::filesystem::path& p) { std::cout << "wrote " << p.string() << "\n"; }

// --- algebra-check -------------------------------------------------------------------------

inline int cmd_algebra_check(const RunConfig& cfg) {
    Report rep("algebra-check", cfg, {{"algebra", 1e-11}, {"sqrt2_witness", 1e-12}});
    const auto d = algebra_suite(cfg.seed, 10000);
    rep.results()["samples"] = 10000;
    for (const auto& [name, v] : d.defects) {
        rep.results()[name] = v;
        rep.check(name, v, "algebra");
    }
    rep.results()["sqrt2_witness"] = d.sqrt2_witness;
    rep.check("sqrt2_witness", d.sqrt2_witness, "sqrt2_witness");
    const auto path = cfg.output_dir / "algebra_check.json";
    rep.write(path);
    note(path);
    return rep.passed() ? exit_ok : exit_tolerance;
}

// --- operator-convergence --------------------------------------------------------------------

inline std::vector<ConvergenceRow> with_orders(std::vector<ConvergenceRow> rows) {
    for (std::size_t i = 1; i < rows.size(); ++i)
        rows[i].observed_order = observed_order(rows[i - 1].residual, rows[i].residual, rows[i - 1].h, rows[i].h);
    return rows;
}

inline json rows_json(const std::vector<ConvergenceRow>& rows) {
    json out = json::array();
    for (const auto& r : rows) {
        json row = {{"n", r.n}, {"h", r.h}, {"residual", r.residual}};
        if (r.observed_order) row["observed_order"] = *r.observed_order;
        out.push_back(row);
    }
    return out;
}

/// Right inverse D T u = u on 5 smooth fields, and Borel-Pompeiu (ball only) for u = 1 and
/// u = x1 e0 + x2 e3 with probes at distance >= 0.3 R from Gamma.
inline int cmd_operator_convergence(const RunConfig& cfg) {
    Report rep("operator-convergence", cfg,
               {{"right_inverse", 0.05}, {"right_inverse_order", 0.8}, {"borel_pompeiu", 0.05}});
    auto ns = cfg.convergence_n;
    std::sort(ns.begin(), ns.end());
    const auto fields = smooth_battery(cfg.domain, 5, cfg.seed);
    const bool ball = cfg.domain.is_ball();
    std::vector<ConvergenceRow> ri, bp;
    std::optional<SurfaceMesh> mesh;
    if (ball) mesh = sphere_mesh(cfg.domain, cfg.surface_m);
    for (int n : ns) {
        const auto grid = build_grid(cfg.domain, n);
        ri.push_back({n, grid->h_max(), right_inverse_residual(grid, fields), std::nullopt});
        if (ball) {
            const auto probes = probe_cells(*grid, 0.3 * cfg.domain.as_ball().radius, 50);
            const double r1 = borel_pompeiu_residual(grid, *mesh, [](const Vec3&) { return Biquaternion(1.0); }, probes);
            const double r2 = borel_pompeiu_residual(
                grid, *mesh, [](const Vec3& x) { return Biquaternion(x[0], 0.0, 0.0, x[1]); }, probes);
            bp.push_back({n, grid->h_max(), std::max(r1, r2), std::nullopt});
        }
    }
    ri = with_orders(std::move(ri));
    bp = with_orders(std::move(bp));

    const auto ri_path = cfg.output_dir / "right_inverse.csv";
    atomic_write(ri_path, convergence_csv(ri));
    note(ri_path);
    rep.results()["right_inverse"] = rows_json(ri);
    rep.check("right_inverse_finest", ri.back().residual, "right_inverse");
    const double order = observed_order(ri.front().residual, ri.back().residual, ri.front().h, ri.back().h);
    rep.results()["right_inverse_order"] = order;
    rep.check("right_inverse_order", order, "right_inverse_order", true);
    bool decreasing = true;
    for (std::size_t i = 1; i < ri.size(); ++i) decreasing = decreasing && ri[i].residual < ri[i - 1].residual;
    rep.flag("right_inverse_decreasing", decreasing, "residual decreases under refinement");
    if (ball) {
        const auto bp_path = cfg.output_dir / "borel_pompeiu.csv";
        atomic_write(bp_path, convergence_csv(bp));
        note(bp_path);
        rep.results()["borel_pompeiu"] = rows_json(bp);
        rep.check("borel_pompeiu_finest", bp.back().residual, "borel_pompeiu");
    } else {
        rep.results()["borel_pompeiu"] = "skipped: no boundary mesh for box domains";
    }
    const auto path = cfg.output_dir / "operator_convergence.json";
    rep.write(path);
    note(path);
    return rep.passed() ? exit_ok : exit_tolerance;
}

// --- bergman -----------------------------------------------------------------------------------

struct BuiltBasis {
    GridPtr grid;
    CoefficientTuple A;
    OrthonormalBasis basis;
    std::vector<double> vekua_residuals;
    std::vector<int> iterations;
    double gram_min_eig = 0.0;
};

/// Exterior-point Cauchy kernels transported through (S_G^A)^{-1}, then orthonormalized.
inline BuiltBasis build_basis(const RunConfig& cfg) {
    BuiltBasis b;
    b.grid = build_grid(cfg.domain, cfg.n);
    b.A = build_coefficients(cfg.coefficients, b.grid);
    const auto pts = exterior_points(cfg.domain, cfg.basis_m, cfg.scale);
    const auto mono = monogenic_basis(b.grid, pts);
    auto vb = vekua_basis(b.A, mono);
    b.vekua_residuals = vb.vekua_residuals;
    b.iterations = vb.iterations;
    b.gram_min_eig = gram_min_eigenvalue(vb.members);
    b.basis = gram_schmidt(vb.members);
    json points = json::array();
    for (const auto& p : pts) points.push_back(to_json(p));
    b.basis.source = {{"coefficients", cfg.coefficients},
                      {"exterior_points", points},
                      {"scale", cfg.scale},
                      {"m", cfg.basis_m},
                      {"vekua_tolerance", vekua_tolerance(*b.grid)},
                      {"rank_drop_threshold", rank_drop_threshold}};
    return b;
}

/// Basis from `basis_path` when given (its grid must match the configuration), else built.
inline BuiltBasis obtain_basis(const RunConfig& cfg) {
    if (cfg.basis_path.empty()) return build_basis(cfg);
    std::ifstream is(cfg.basis_path, std::ios::binary);
    if (!is) throw ConfigError("cannot read basis " + cfg.basis_path);
    BuiltBasis b;
    b.basis = load_basis(is);
    b.grid = b.basis.grid_ptr();
    if (!(b.grid->spec() == cfg.domain) || b.grid->n() != cfg.n)
        throw ConfigError("basis grid does not match the configured domain and n");
    b.A = build_coefficients(b.basis.source.value("coefficients", json("zero")), b.grid);
    return b;
}

/// Seeded interior evaluation points at distance >= 2h + h from Gamma, each snapped to its
/// cell centre (point values are cell values).
inline std::vector<Vec3> interior_points(const DomainGrid& g, int count, SplitMix64& rng) {
    const auto cells = g.interior(3.0 * g.h_max());
    if (cells.empty()) throw DomainError("grid has no cells far enough from the boundary");
    std::vector<Vec3> out;
    for (int i = 0; i < count; ++i) {
        const auto c = cells[static_cast<std::size_t>(rng.uniform() * static_cast<double>(cells.size())) % cells.size()];
        out.push_back(g.center(c));
    }
    return out;
}

inline BiquatField random_span_element(const OrthonormalBasis& basis, SplitMix64& rng) {
    BiquatField w(basis.grid_ptr());
    for (const auto& phi : basis.members) w += Complex(rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0)) * phi;
    return w;
}

/// An exterior point off the Fibonacci lattice used for the basis.
inline Vec3 held_out_point(const DomainSpec& spec, double scale) {
    const Vec3 d{0.3, -0.8, 0.52};
    return spec.center() + (scale * spec.circumradius() / length(d)) * d;
}

inline int cmd_bergman_build(const RunConfig& cfg) {
    Report rep("bergman build", cfg, {{"gram", 1e-10}, {"gram_min_eigenvalue", 1e-8}});
    const auto b = build_basis(cfg);
    const double tolV = vekua_tolerance(*b.grid);
    const double worst = *std::max_element(b.vekua_residuals.begin(), b.vekua_residuals.end());
    auto& r = rep.results();
    r["members"] = b.basis.size();
    r["dropped"] = b.basis.dropped;
    r["gram_residual"] = b.basis.gram_residual;
    r["gram_min_eigenvalue"] = b.gram_min_eig;
    r["vekua_tolerance"] = tolV;
    r["max_vekua_residual"] = worst;
    r["neumann_iterations"] = *std::max_element(b.iterations.begin(), b.iterations.end());
    r["kappa"] = contraction_constant(b.A, cfg.domain);
    rep.check("gram_residual", b.basis.gram_residual, "gram");
    rep.check("gram_min_eigenvalue", b.gram_min_eig, "gram_min_eigenvalue", true);
    rep.flag("vekua_residuals", worst <= tolV, "every member within the Vekua tolerance");
    const auto basis_path = cfg.output_dir / "basis.vkb";
    std::ostringstream os(std::ios::binary);
    save_basis(os, b.basis);
    atomic_write(basis_path, os.str());
    note(basis_path);
    const auto path = cfg.output_dir / "bergman_build.json";
    rep.write(path);
    note(path);
    return rep.passed() ? exit_ok : exit_tolerance;
}

inline int cmd_bergman_reproduce(const RunConfig& cfg) {
    Report rep("bergman reproduce", cfg, {{"reproduction", 1e-9}, {"module_reproduction", 0.05}});
    const auto b = obtain_basis(cfg);
    SplitMix64 rng(cfg.seed);
    const auto xs = interior_points(*b.grid, 10, rng);
    const BiquatField w = random_span_element(b.basis, rng);
    const double wmax = max_norm(w);
    double span_err = 0.0;
    for (const auto& x : xs) {
        const auto c = evaluation_cell(*b.grid, x);
        for (int k = 0; k < 4; ++k)
            span_err = std::max(span_err, std::abs(l2_inner(kernel_component(b.basis, x, k), w) -
                                                   w[c][static_cast<std::size_t>(k)]) / wmax);
    }
    auto& r = rep.results();
    r["span_reproduction"] = span_err;
    rep.check("span_reproduction", span_err, "reproduction");

    const Vec3 q = held_out_point(cfg.domain, cfg.scale);
    const Biquaternion a{0.3, 1.0, Complex(0.0, 0.5), 0.0};
    const BiquatField h = sample([&](const Vec3& x) { return cauchy_kernel(x - q) * a; }, b.grid);
    const BiquatField held = s_g_a_inverse(b.A, h, 1e-10, 200).w;
    r["held_out_point"] = to_json(q);
    r["held_out_reproduction"] = reproduction_error(b.basis, held);

    if (is_right_module_type(b.A) && module_test_passes(b.A, b.basis.members)) {
        double in_span = 0.0, held_err = 0.0;
        for (const auto& x : xs) {
            const auto c = evaluation_cell(*b.grid, x);
            in_span = std::max(in_span, norm(module_reproduce(b.basis, b.A, x, w) - w[c]) / wmax);
            held_err = std::max(held_err, norm(module_reproduce(b.basis, b.A, x, held) - held[c]) / max_norm(held));
        }
        r["module_kernel"] = "present";
        r["module_span_reproduction"] = in_span;
        r["module_held_out_reproduction"] = held_err;
        rep.check("module_span_reproduction", in_span, "reproduction");
    } else {
        r["module_kernel"] = "absent";
    }
    const auto path = cfg.output_dir / "bergman_reproduce.json";
    rep.write(path);
    note(path);
    return rep.passed() ? exit_ok : exit_tolerance;
}

inline int cmd_bergman_project(const RunConfig& cfg) {
    Report rep("bergman project", cfg, {{"projection", 1e-9}});
    const auto b = obtain_basis(cfg);
    const auto d = projection_defects(b.basis, 5, cfg.seed);
    auto& r = rep.results();
    r["idempotence"] = d.idempotence;
    r["self_adjointness"] = d.self_adjointness;
    r["fixes_span"] = d.fixes_span;
    r["norm_estimate"] = d.norm_estimate;
    rep.check("idempotence", d.idempotence, "projection");
    rep.check("self_adjointness", d.self_adjointness, "projection");
    rep.check("fixes_span", d.fixes_span, "projection");
    rep.check("norm_excess", std::max(0.0, d.norm_estimate - 1.0), "projection");
    const auto path = cfg.output_dir / "bergman_project.json";
    rep.write(path);
    note(path);
    return rep.passed() ? exit_ok : exit_tolerance;
}

/// Hermitian defect max |K_x^{k,j}(t) - conj K_t^{j,k}(x)| relative to the largest diagonal
/// entry, at 10 seeded (x, t) pairs; diagonals at x = t must be real and positive.
inline int cmd_bergman_kernel_matrix(const RunConfig& cfg) {
    Report rep("bergman kernel-matrix", cfg, {{"kernel_hermitian", 1e-9}});
    const auto b = obtain_basis(cfg);
    SplitMix64 rng(cfg.seed);
    const auto xs = interior_points(*b.grid, 10, rng);
    const auto ts = interior_points(*b.grid, 10, rng);
    json table = json::array();
    double worst = 0.0, min_diag = std::numeric_limits<double>::infinity(), max_imag = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        const auto kxx = kernel_matrix(b.basis, xs[i], xs[i]);
        double scale = 0.0;
        for (std::size_t k = 0; k < 4; ++k) {
            scale = std::max(scale, std::abs(kxx[k][k]));
            min_diag = std::min(min_diag, kxx[k][k].real());
            max_imag = std::max(max_imag, std::abs(kxx[k][k].imag()));
        }
        const double d = kernel_hermitian_defect(kernel_matrix(b.basis, xs[i], ts[i]), kernel_matrix(b.basis, ts[i], xs[i])) /
                         scale;
        worst = std::max(worst, d);
        table.push_back({{"x", to_json(xs[i])}, {"t", to_json(ts[i])}, {"hermitian_defect", d}});
    }
    auto& r = rep.results();
    r["pairs"] = table;
    r["max_hermitian_defect"] = worst;
    r["min_diagonal"] = min_diag;
    r["max_diagonal_imaginary"] = max_imag;
    rep.check("hermitian_defect", worst, "kernel_hermitian");
    rep.flag("positive_diagonal", min_diag > 0.0, "K_x^{k,k}(x) > 0");
    const auto path = cfg.output_dir / "bergman_kernel_matrix.json";
    rep.write(path);
    note(path);
    return rep.passed() ? exit_ok : exit_tolerance;
}

// --- decompose ---------------------------------------------------------------------------------

/// Orthogonality of (D - Q_{A^dagger}) W_0 to the basis for the configured A and for A = 0,
/// the transpose pairing (phi | (D - Q_{A*}) u), and the split u = P u + (u - P u).
inline int cmd_decompose(const RunConfig& cfg) {
    Report rep("decompose", cfg, {{"orthogonality", 0.05}, {"split", 1e-9}});
    const auto grid = build_grid(cfg.domain, cfg.n);
    const auto A = build_coefficients(cfg.coefficients, grid);
    const auto pts = exterior_points(cfg.domain, cfg.basis_m, cfg.scale);
    const auto mono = monogenic_basis(grid, pts);
    const auto hodge = gram_schmidt(mono);
    const auto basis = A.is_zero() ? hodge : gram_schmidt(vekua_basis(A, mono).members);

    const double margin = 0.52 * inradius(cfg.domain);
    std::vector<TestFunctionW0> us;
    for (const auto& f : bump_battery(cfg.domain, 5, cfg.seed)) us.push_back(sample_test_function(grid, f, margin));

    double orth = 0.0, orth_hodge = 0.0, pairing = 0.0;
    for (const auto& u : us) {
        orth = std::max(orth, orthogonality_check(A, basis, u));
        orth_hodge = std::max(orth_hodge, orthogonality_check(CoefficientTuple::zero(), hodge, u));
        const BiquatField v = annihilator_element(A, u);
        const double nv = l2_norm(v);
        for (const auto& phi : basis.members)
            pairing = std::max(pairing, std::abs(duality_pairing(phi, v)) / (l2_norm(phi) * nv));
    }
    SplitMix64 rng(cfg.seed);
    const BiquatField u = random_field(grid, rng);
    const BiquatField pu = bergman_project(basis, u);
    const double split = std::abs(l2_inner(pu, u - pu)) / l2_inner(u, u).real();

    auto& r = rep.results();
    r["test_functions"] = us.size();
    r["support_margin"] = margin;
    r["orthogonality"] = orth;
    r["orthogonality_hodge"] = orth_hodge;
    r["annihilator_pairing"] = pairing;
    r["split_defect"] = split;
    r["projected_fraction"] = l2_norm(pu) / l2_norm(u);
    rep.check("orthogonality", orth, "orthogonality");
    rep.check("orthogonality_hodge", orth_hodge, "orthogonality");
    rep.check("annihilator_pairing", pairing, "orthogonality");
    rep.check("split_defect", split, "split");
    const auto path = cfg.output_dir / "decompose.json";
    rep.write(path);
    note(path);
    return rep.passed() ? exit_ok : exit_tolerance;
}

// --- examples ----------------------------------------------------------------------------------

inline int cmd_examples_schrodinger(const RunConfig& cfg) {
    Report rep("examples schrodinger", cfg, {{"closed_form", 1e-10}, {"darboux", 1e-12}});
    const auto grid = build_grid(cfg.domain, cfg.n);
    const AnalyticField w_lin = linear_field(Biquaternion{}, {Biquaternion{}, Biquaternion(1.0), e1});
    const AnalyticField w_bump = bump_battery(cfg.domain, 1, cfg.seed, 0.8).front();
    CHess Q{};
    Q[0][0] = 0.1;
    Q[1][2] = Q[2][1] = 0.05;
    const std::vector<std::pair<std::string, AnalyticScalar>> fs{
        {"f=1", constant_scalar(1.0)},
        {"f=exp(x1)", exp_linear({1.0, 0.0, 0.0})},
        {"f=1+0.1x1^2+0.1x2x3", quadratic_scalar(1.0, {0.0, 0.0, 0.0}, Q)}};
    auto& r = rep.results();
    for (const auto& [fname, f] : fs) {
        const auto d = make_schrodinger_data(f, grid);
        for (const auto& [wname, w] : {std::pair<std::string, const AnalyticField&>{"w=x2e0+x3e1", w_lin},
                                       std::pair<std::string, const AnalyticField&>{"w=bump", w_bump}}) {
            const auto res = schrodinger_factorization_check(d, w);
            const std::string key = fname + ";" + wname;
            r[key] = {{"scalar", res.scalar}, {"vector", res.vector}};
            rep.check(key + ";scalar", res.scalar, "closed_form");
            rep.check(key + ";vector", res.vector, "closed_form");
        }
        const double dd = darboux_defect(d);
        r[fname + ";darboux"] = dd;
        rep.check(fname + ";darboux", dd, "darboux");
    }
    const auto path = cfg.output_dir / "examples_schrodinger.json";
    rep.write(path);
    note(path);
    return rep.passed() ? exit_ok : exit_tolerance;
}

inline int cmd_examples_df(const RunConfig& cfg) {
    Report rep("examples df", cfg, {{"closed_form", 1e-10}});
    const auto grid = build_grid(cfg.domain, cfg.n);
    CHess Q{};
    Q[0][0] = 1.0;
    const AnalyticScalar f_quad = quadratic_scalar(1.0, {0.0, 0.0, 0.0}, Q);  // 1 + x1^2 / 2
    const Vec3 q = held_out_point(cfg.domain, cfg.scale);
    const std::vector<std::tuple<std::string, AnalyticScalar, AnalyticField>> cases{
        {"f=1;u=exp", constant_scalar(1.0), scalar_times(exp_linear({0.3, -0.5, 0.7}), e0)},
        {"f=1+x1^2/2;u=exp", f_quad, scalar_times(exp_linear({0.3, -0.5, 0.7}), e0)},
        {"f=1+x1^2/2;u=cauchy", f_quad, cauchy_field(q, Biquaternion(0.2, 1.0, Complex(0.0, 1.0), 0.0))},
        {"f=exp(k.x);u=bump", exp_linear({0.2, 0.1, -0.3}), bump_battery(cfg.domain, 1, cfg.seed, 0.8).front()}};
    for (const auto& [name, f, u] : cases) {
        const double v = df_factorization_check(f, u, *grid);
        rep.results()[name] = v;
        rep.check(name, v, "closed_form");
    }
    const auto path = cfg.output_dir / "examples_df.json";
    rep.write(path);
    note(path);
    return rep.passed() ? exit_ok : exit_tolerance;
}

inline int cmd_examples_helmholtz(const RunConfig& cfg) {
    Report rep("examples helmholtz", cfg, {{"helmholtz_fd", 1e-4}});
    const std::vector<Complex> alphas{{2.0, 0.0}, {0.0, 1.0}, {1.0, 1.0}};
    const double r = helmholtz_fd_battery(alphas, 20, 1e-3, cfg.seed);
    rep.results()["points"] = 20;
    rep.results()["h"] = 1e-3;
    rep.results()["alphas"] = {"2", "i", "1+i"};
    rep.results()["max_fd_residual"] = r;
    rep.check("fd_residual", r, "helmholtz_fd");
    const auto path = cfg.output_dir / "examples_helmholtz.json";
    rep.write(path);
    note(path);
    return rep.passed() ? exit_ok : exit_tolerance;
}

inline int cmd_examples_bessel(const RunConfig& cfg) {
    Report rep("examples bessel", cfg,
               {{"bessel_root", 1e-12}, {"bessel_boundary", 1e-12}, {"bessel_eigen", 1e-10}, {"bessel_vekua", 1e-8}});
    if (!(cfg.domain == DomainSpec::unit_ball())) throw ConfigError("the Bessel example needs the unit ball");
    const auto grid = build_grid(cfg.domain, cfg.n);
    const auto b = bessel_example(grid);
    auto& r = rep.results();
    r["sqrt_lambda"] = b.sqrt_lambda;
    r["root_error"] = b.root_error;
    r["boundary_max"] = b.boundary_max;
    r["eigen_residual"] = b.eigen_residual;
    r["vekua_residual"] = b.vekua_residual;
    r["vekua_residual_grid"] = b.vekua_residual_grid;
    r["w_norm"] = b.w_norm;
    r["transpose_image_norm"] = b.transpose_image_norm;
    rep.check("root_error", b.root_error, "bessel_root");
    rep.check("boundary_max", b.boundary_max, "bessel_boundary");
    rep.check("eigen_residual", b.eigen_residual, "bessel_eigen");
    rep.check("vekua_residual", b.vekua_residual, "bessel_vekua");
    const auto path = cfg.output_dir / "examples_bessel.json";
    rep.write(path);
    note(path);
    return rep.passed() ? exit_ok : exit_tolerance;
}

/// T^alpha D_alpha u = u for one representative alpha per branch, and -Lap L u = u.
inline int cmd_examples_t_alpha(const RunConfig& cfg) {
    Report rep("examples t-alpha", cfg, {{"t_alpha", 0.1}, {"newtonian", 0.1}});
    const auto grid = build_grid(cfg.domain, cfg.n);
    const BiquatField u = sample(smooth_battery(cfg.domain, 1, cfg.seed).front(), grid);
    json rows = json::array();
    for (const auto& a : representative_alphas()) {
        const auto ap = make_alpha_param(a);
        const double res = t_alpha_reconstruction_residual(ap, u);
        rows.push_back({{"alpha", to_json(a)}, {"branch", to_string(ap.branch)}, {"reconstruction", res}});
        rep.check(std::string("reconstruction;") + to_string(ap.branch), res, "t_alpha");
    }
    rep.results()["branches"] = rows;
    const double nres = newtonian_inverse_residual(u);
    rep.results()["newtonian_inverse"] = nres;
    rep.check("newtonian_inverse", nres, "newtonian");
    const auto path = cfg.output_dir / "examples_t_alpha.json";
    rep.write(path);
    note(path);
    return rep.passed() ? exit_ok : exit_tolerance;
}

// --- dispatch ------------------------------------------------------------------------------------

/// Runs `command [sub]`; errors map to exit codes (config 3, contraction 4, other 1).
inline int run(const std::string& command, const std::string& sub, const RunConfig& cfg) {
    try {
        if (command == "algebra-check") return cmd_algebra_check(cfg);
        if (command == "operator-convergence") return cmd_operator_convergence(cfg);
        if (command == "bergman") {
            if (sub == "build") return cmd_bergman_build(cfg);
            if (sub == "reproduce") return cmd_bergman_reproduce(cfg);
            if (sub == "project") return cmd_bergman_project(cfg);
            if (sub == "kernel-matrix") return cmd_bergman_kernel_matrix(cfg);
            throw ConfigError("bergman needs build|reproduce|project|kernel-matrix");
        }
        if (command == "decompose") return cmd_decompose(cfg);
        if (command == "examples") {
            if (sub == "schrodinger") return cmd_examples_schrodinger(cfg);
            if (sub == "df") return cmd_examples_df(cfg);
            if (sub == "helmholtz") return cmd_examples_helmholtz(cfg);
            if (sub == "bessel") return cmd_examples_bessel(cfg);
            if (sub == "t-alpha") return cmd_examples_t_alpha(cfg);
            throw ConfigError("examples needs schrodinger|df|helmholtz|bessel|t-alpha");
        }
        throw ConfigError("unknown command '" + command + "'");
    } catch (const ContractionViolated& e) {
        std::cerr << "contraction violated: kappa = " << format_real(e.kappa()) << " >= 1\n";
        return exit_contraction;
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return exit_config;
    } catch (const DomainError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return exit_config;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return exit_error;
    }
}

}  // namespace vekua::cli

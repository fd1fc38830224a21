/**
 * @file experiment.hpp
 *
 * End-to-end reconstruction runs: configuration (defaults, named presets,
 * key = value files), the synthesis/imaging pipeline, per-image metrics,
 * the run manifest and comparison of two output trees.
 */
#pragma once

#include <chrono>
#include <cmath>
#include <cstdint>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <optional>
#include <set>
#include <span>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "softscat/common.hpp"
#include "softscat/forward.hpp"
#include "softscat/geometry.hpp"
#include "softscat/imaging.hpp"
#include "softscat/io.hpp"
#include "softscat/xform.hpp"

namespace softscat {

/// Invalid or inconsistent configuration; `field` names the offending key.
class ConfigError : public std::runtime_error {
public:
    ConfigError(std::string field, const std::string& what)
        : std::runtime_error(field + ": " + what), field_(std::move(field)) {}
    const std::string& field() const { return field_; }

private:
    std::string field_;
};

struct ExperimentConfig {
    std::string preset;  ///< informational only
    std::string shape = "circle";
    double k = 4.0;
    double radius = 5.0;
    int count = 64;
    int boundary_nodes = 64;
    int forward_truncation = 15;
    int kernel_truncation = 10;
    double cutoff = 1e-8;
    double residual_guard = 0.5;  ///< max relative boundary residual before exit code 2
    double delta = 0.05;
    std::uint64_t seed = 1;
    double p1 = 4.0;
    double p2 = 4.0;
    double rho = 8.0;
    double alpha = 1e-3;
    ApertureMask aperture;
    GridSpec grid;
    std::vector<Functional> functionals{Functional::FF, Functional::TDSM, Functional::CD};
    std::string data_dir;  ///< when set, reconstruct from a stored bundle instead of synthesizing
};

// ---------------------------------------------------------------------------
// Parsing helpers

/// Accepts plain numbers and multiples of pi: "3.14", "pi", "1.5pi", "3pi/2", "pi/2".
inline double parse_angle(const std::string& text) {
    std::string s;
    for (char c : text)
        if (!std::isspace(static_cast<unsigned char>(c)) && c != '*') s += static_cast<char>(std::tolower(c));
    const auto at = s.find("pi");
    try {
        if (at == std::string::npos) return std::stod(s);
        const std::string coef = s.substr(0, at);
        const std::string rest = s.substr(at + 2);
        double v = (coef.empty() ? 1.0 : std::stod(coef)) * std::numbers::pi;
        if (!rest.empty()) {
            if (rest[0] != '/') throw std::invalid_argument(text);
            v /= std::stod(rest.substr(1));
        }
        return v;
    } catch (const std::exception&) {
        throw std::invalid_argument("bad angle '" + text + "'");
    }
}

inline ApertureMask parse_aperture(const std::string& text) {
    ApertureMask mask;
    if (io::trim(text) == "full") return mask;
    mask.arcs.clear();
    for (const auto& arc : io::split(text, ';')) {
        if (arc.empty()) continue;
        const auto ends = io::split(arc, ',');
        if (ends.size() != 2) throw std::invalid_argument("aperture arc must be 'lo,hi'");
        const double lo = parse_angle(ends[0]);
        const double hi = parse_angle(ends[1]);
        if (lo < 0.0 || hi > kTwoPi + 1e-12 || !(lo < hi)) throw std::invalid_argument("aperture arc outside [0, 2pi)");
        mask.arcs.emplace_back(lo, hi);
    }
    if (mask.arcs.empty()) throw std::invalid_argument("empty aperture");
    return mask;
}

inline std::string format_aperture(const ApertureMask& mask) {
    if (mask.full()) return "full";
    std::string s;
    for (const auto& [lo, hi] : mask.arcs) {
        if (!s.empty()) s += ';';
        s += io::format_double(lo) + ',' + io::format_double(hi);
    }
    return s;
}

inline Functional parse_functional(const std::string& name) {
    std::string s = name;
    if (s.rfind("W_", 0) == 0) s = s.substr(2);
    if (s == "FF") return Functional::FF;
    if (s == "TDSM") return Functional::TDSM;
    if (s == "CD") return Functional::CD;
    throw std::invalid_argument("unknown functional '" + name + "'");
}

// ---------------------------------------------------------------------------
// Presets

inline const std::vector<std::string>& preset_names() {
    static const std::vector<std::string> names{"example1", "example2", "example3", "example4",
                                                "example4a", "example4b", "example5a", "example5b"};
    return names;
}

/// Reference experiments: k = 4, R = 5, 64 points, p1 = p2 = 4, rho = 8, alpha = 1e-3.
inline ExperimentConfig make_preset(const std::string& name) {
    ExperimentConfig c;
    c.preset = name;
    if (name == "example1") c.shape = "circle";
    else if (name == "example2") c.shape = "acorn";
    else if (name == "example3") c.shape = "flower";
    else if (name == "example4" || name == "example4a") c.shape = "rounded-square";
    else if (name == "example4b") {
        c.shape = "rounded-square";
        c.delta = 0.25;
    } else if (name == "example5a") {
        c.shape = "rounded-square";
        c.aperture.arcs = {{0.0, 1.5 * std::numbers::pi}};
    } else if (name == "example5b") {
        c.shape = "rounded-square";
        c.aperture.arcs = {{0.0, std::numbers::pi}};
    } else {
        throw ConfigError("preset", "unknown preset '" + name + "'");
    }
    return c;
}

// ---------------------------------------------------------------------------
// key = value application and echo

/// Apply `key = value` settings on top of `c`. Keys starting with "out."
/// (diagnostics in a manifest) are ignored so a manifest can be replayed.
inline void apply_settings(ExperimentConfig& c, const io::KeyValues& kv) {
    if (auto it = kv.find("preset"); it != kv.end() && !it->second.empty()) c = make_preset(it->second);
    for (const auto& [key, value] : kv) {
        if (key == "preset" || key.rfind("out.", 0) == 0) continue;
        try {
            if (key == "shape") {
                (void)make_shape(value);
                c.shape = value;
            } else if (key == "k") c.k = std::stod(value);
            else if (key == "R") c.radius = std::stod(value);
            else if (key == "n") c.count = std::stoi(value);
            else if (key == "boundary_nodes") c.boundary_nodes = std::stoi(value);
            else if (key == "M_fwd") c.forward_truncation = std::stoi(value);
            else if (key == "M") c.kernel_truncation = std::stoi(value);
            else if (key == "tau_rel") c.cutoff = std::stod(value);
            else if (key == "residual_guard") c.residual_guard = std::stod(value);
            else if (key == "delta") c.delta = std::stod(value);
            else if (key == "seed") c.seed = std::stoull(value);
            else if (key == "p1") c.p1 = std::stod(value);
            else if (key == "p2") c.p2 = std::stod(value);
            else if (key == "rho") c.rho = std::stod(value);
            else if (key == "alpha") c.alpha = std::stod(value);
            else if (key == "aperture") c.aperture = parse_aperture(value);
            else if (key == "grid_extent") {
                const auto v = io::split(value, ',');
                if (v.size() != 4) throw std::invalid_argument("expected xmin,xmax,ymin,ymax");
                c.grid.xmin = std::stod(v[0]);
                c.grid.xmax = std::stod(v[1]);
                c.grid.ymin = std::stod(v[2]);
                c.grid.ymax = std::stod(v[3]);
            } else if (key == "grid_resolution") {
                const auto v = io::split(value, ',');
                c.grid.nx = std::stoi(v.at(0));
                c.grid.ny = v.size() > 1 ? std::stoi(v[1]) : c.grid.nx;
            } else if (key == "functionals") {
                c.functionals.clear();
                for (const auto& f : io::split(value, ','))
                    if (!f.empty()) c.functionals.push_back(parse_functional(f));
            } else if (key == "data") c.data_dir = value;
            else throw ConfigError(key, "unknown configuration key");
        } catch (const ConfigError&) {
            throw;
        } catch (const std::exception& e) {
            throw ConfigError(key, "invalid value '" + value + "' (" + e.what() + ")");
        }
    }
}

inline void validate(const ExperimentConfig& c) {
    auto need = [](bool ok, const char* field, const char* what) {
        if (!ok) throw ConfigError(field, what);
    };
    need(std::isfinite(c.k) && c.k > 0.0, "k", "must be positive");
    need(std::isfinite(c.radius) && c.radius > 0.0, "R", "must be positive");
    need(c.count >= 8 && c.count % 2 == 0, "n", "must be an even count >= 8");
    need(c.boundary_nodes >= 8, "boundary_nodes", "must be >= 8");
    need(c.forward_truncation >= 0 && c.forward_truncation <= specfun::kMaxOrder - 1, "M_fwd", "must lie in [0, 63]");
    need(c.kernel_truncation >= 0 && c.kernel_truncation <= specfun::kMaxOrder, "M", "must lie in [0, 64]");
    need(c.cutoff > 0.0 && c.cutoff < 1.0, "tau_rel", "must lie in (0, 1)");
    need(c.residual_guard > 0.0, "residual_guard", "must be positive");
    need(std::isfinite(c.delta) && c.delta >= 0.0, "delta", "must be nonnegative");
    need(c.p1 > 0.0, "p1", "must be positive");
    need(c.p2 > 0.0, "p2", "must be positive");
    need(c.rho > 0.0, "rho", "must be positive");
    need(c.alpha > 0.0, "alpha", "must be positive");
    need(c.grid.nx >= 1 && c.grid.ny >= 1, "grid_resolution", "must be >= 1");
    need(c.grid.xmin < c.grid.xmax && c.grid.ymin < c.grid.ymax, "grid_extent", "must be increasing");
    need(!c.functionals.empty(), "functionals", "at least one functional required");
    const double extent = std::max({std::abs(c.grid.xmin), std::abs(c.grid.xmax), std::abs(c.grid.ymin),
                                    std::abs(c.grid.ymax)});
    need(extent * std::numbers::sqrt2 < c.radius, "grid_extent", "sampling grid must lie inside the measurement circle");
    need(circumradius(make_shape(c.shape)) < c.radius, "R", "measurement circle must enclose the obstacle");
}

/// Every setting, spelled out, in replayable key = value form.
inline std::vector<std::pair<std::string, std::string>> config_echo(const ExperimentConfig& c) {
    using io::format_double;
    std::string funcs;
    for (auto f : c.functionals) {
        if (!funcs.empty()) funcs += ',';
        funcs += std::string(to_string(f)).substr(2);
    }
    return {
        {"shape", c.shape},
        {"k", format_double(c.k)},
        {"R", format_double(c.radius)},
        {"n", std::to_string(c.count)},
        {"boundary_nodes", std::to_string(c.boundary_nodes)},
        {"M_fwd", std::to_string(c.forward_truncation)},
        {"M", std::to_string(c.kernel_truncation)},
        {"tau_rel", format_double(c.cutoff)},
        {"residual_guard", format_double(c.residual_guard)},
        {"delta", format_double(c.delta)},
        {"seed", std::to_string(c.seed)},
        {"p1", format_double(c.p1)},
        {"p2", format_double(c.p2)},
        {"rho", format_double(c.rho)},
        {"alpha", format_double(c.alpha)},
        {"aperture", format_aperture(c.aperture)},
        {"grid_extent", format_double(c.grid.xmin) + "," + format_double(c.grid.xmax) + "," +
                            format_double(c.grid.ymin) + "," + format_double(c.grid.ymax)},
        {"grid_resolution", std::to_string(c.grid.nx) + "," + std::to_string(c.grid.ny)},
        {"functionals", funcs},
        {"data", c.data_dir},
    };
}

// ---------------------------------------------------------------------------
// Metrics

inline double pearson_correlation(std::span<const double> a, std::span<const double> b) {
    if (a.size() != b.size() || a.empty()) throw std::invalid_argument("pearson_correlation: size mismatch");
    double ma = 0.0, mb = 0.0;
    for (size_t i = 0; i < a.size(); ++i) {
        ma += a[i];
        mb += b[i];
    }
    ma /= static_cast<double>(a.size());
    mb /= static_cast<double>(b.size());
    double sab = 0.0, saa = 0.0, sbb = 0.0;
    for (size_t i = 0; i < a.size(); ++i) {
        sab += (a[i] - ma) * (b[i] - mb);
        saa += (a[i] - ma) * (a[i] - ma);
        sbb += (b[i] - mb) * (b[i] - mb);
    }
    if (saa == 0.0 && sbb == 0.0) return 1.0;
    if (saa == 0.0 || sbb == 0.0) return 0.0;
    return sab / std::sqrt(saa * sbb);
}

struct ImageMetrics {
    Point2 argmax{0.0, 0.0};
    double argmax_distance = 0.0;  ///< distance from the argmax to the closed obstacle
    double exterior_mean = 0.0;    ///< mean over nodes farther than 0.5 from the obstacle
    double interior_mean = 0.0;    ///< mean over nodes inside the obstacle
};

inline ImageMetrics image_metrics(const ImageGrid& img, const RadialShape& shape, double exterior_gap = 0.5) {
    const ObstacleDistance dist(shape, 1024);
    ImageMetrics m;
    m.argmax = img.node(img.argmax());
    m.argmax_distance = ObstacleDistance(shape)(m.argmax);
    double ext = 0.0, in = 0.0;
    int next = 0, nin = 0;
    for (size_t l = 0; l < img.values.size(); ++l) {
        const double d = dist(img.node(l));
        if (d > exterior_gap) {
            ext += img.values[l];
            ++next;
        } else if (d == 0.0) {
            in += img.values[l];
            ++nin;
        }
    }
    m.exterior_mean = next ? ext / next : 0.0;
    m.interior_mean = nin ? in / nin : 0.0;
    return m;
}

// ---------------------------------------------------------------------------
// Pipeline

struct ExperimentResult {
    ExperimentConfig config;
    NearFieldData data;  ///< after noise and aperture
    OperatorMatrix F;
    std::vector<ImageGrid> images;
    std::vector<ImageMetrics> metrics;
    std::vector<std::pair<std::string, std::string>> manifest;

    const ImageGrid* image(Functional f) const {
        for (const auto& img : images)
            if (img.functional == f) return &img;
        return nullptr;
    }
};

namespace detail {

inline std::string utc_now() {
    const std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

inline ImageGrid image_for(Functional f, const ExperimentConfig& c, const NearFieldData& data, const OperatorMatrix& F,
                           const FilterPolynomial* P, const SingularSystem* sys) {
    switch (f) {
        case Functional::FF:
            return evaluate_grid(f, [&](const Point2& z) { return w_ff(F, z, c.k, c.p1); }, c.grid, {{"p1", c.p1}});
        case Functional::TDSM:
            return evaluate_grid(f, [&](const Point2& z) { return w_tdsm(*sys, *P, z, c.k, c.p2); }, c.grid,
                                 {{"p2", c.p2}, {"alpha", c.alpha}});
        case Functional::CD:
            return evaluate_grid(f, [&](const Point2& z) { return w_cd(data, z, c.k, c.rho); }, c.grid, {{"rho", c.rho}});
    }
    throw std::logic_error("unhandled functional");
}

inline OperatorMatrix transformed_operator(const NearFieldData& data, const ExperimentConfig& c) {
    const OperatorMatrix N = assemble_N(data);
    const OperatorMatrix Q = assemble_Q(data.gamma.radius, data.k, data.count(), c.kernel_truncation);
    const OperatorMatrix R = assemble_R(data.count(), c.kernel_truncation);
    return far_field_transform(N, Q, R);
}

}  // namespace detail

/// make_shape -> discretize -> solve_forward -> evaluate_nearfield -> add_noise
/// -> apply_aperture -> N, Q, R -> F -> fit_filter -> images -> metrics.
inline ExperimentResult run_experiment(const ExperimentConfig& config) {
    validate(config);
    const std::string started = detail::utc_now();
    ExperimentResult res;
    res.config = config;
    const ExperimentConfig& c = res.config;
    const RadialShape shape = make_shape(c.shape);
    auto& mf = res.manifest;
    mf = config_echo(c);
    if (!c.preset.empty()) mf.insert(mf.begin(), {"preset", c.preset});

    NearFieldData clean;
    if (c.data_dir.empty()) {
        const SourceCurve gamma = make_source_curve(c.radius, c.count);
        const ForwardOptions fo{c.forward_truncation, c.boundary_nodes, c.cutoff};
        const SeriesSolution sol = solve_forward(shape, gamma, c.k, fo);
        mf.emplace_back("out.forward_rank", std::to_string(sol.rank));
        mf.emplace_back("out.forward_residual", io::format_double(sol.residual));
        mf.emplace_back("out.forward_relative_residual", io::format_double(sol.relative_residual));
        if (sol.relative_residual > c.residual_guard) {
            throw NumericalError("forward boundary residual " + io::format_double(sol.relative_residual) +
                                 " exceeds residual_guard " + io::format_double(c.residual_guard));
        }
        clean = evaluate_nearfield(sol, gamma);
        mf.emplace_back("out.reciprocity_defect",
                        io::format_double(spectral_norm(clean.U - clean.U.transpose()) / spectral_norm(clean.U)));
        res.data = add_noise(clean, c.delta, c.seed);
    } else {
        res.data = io::read_bundle(c.data_dir);
        if (std::abs(res.data.k - c.k) > 1e-12 || std::abs(res.data.gamma.radius - c.radius) > 1e-12 ||
            res.data.count() != c.count) {
            throw ConfigError("data", "stored bundle disagrees with k, R or n");
        }
        mf.emplace_back("out.data_delta", io::format_double(res.data.delta));
        mf.emplace_back("out.data_seed", std::to_string(res.data.seed));
    }
    res.data = apply_aperture(res.data, c.aperture);
    mf.emplace_back("out.active_indices", std::to_string(active_count(c.aperture, res.data.gamma.nodes.thetas)));

    res.F = detail::transformed_operator(res.data, c);
    const double fnorm = spectral_norm(res.F.entries);
    mf.emplace_back("out.F_norm", io::format_double(fnorm));

    std::optional<FilterPolynomial> P;
    std::optional<SingularSystem> sys;
    for (Functional f : c.functionals) {
        if (f == Functional::TDSM && !P) {
            P = fit_filter(fnorm, c.alpha);
            sys.emplace(res.F);
            mf.emplace_back("out.filter_c1", io::format_double(P->coeffs[0]));
            mf.emplace_back("out.filter_c2", io::format_double(P->coeffs[1]));
            mf.emplace_back("out.filter_c3", io::format_double(P->coeffs[2]));
            mf.emplace_back("out.filter_fit_residual", io::format_double(P->fit_residual));
        }
        res.images.push_back(detail::image_for(f, c, res.data, res.F, P ? &*P : nullptr, sys ? &*sys : nullptr));
        const ImageGrid& img = res.images.back();
        const ImageMetrics m = image_metrics(img, shape);
        res.metrics.push_back(m);
        const std::string tag = std::string("out.") + to_string(f) + ".";
        mf.emplace_back(tag + "raw_max", io::format_double(img.raw_max));
        mf.emplace_back(tag + "argmax", io::format_double(m.argmax.x()) + "," + io::format_double(m.argmax.y()));
        mf.emplace_back(tag + "argmax_distance", io::format_double(m.argmax_distance));
        mf.emplace_back(tag + "exterior_mean", io::format_double(m.exterior_mean));
        mf.emplace_back(tag + "interior_mean", io::format_double(m.interior_mean));

        if (f == Functional::FF && c.data_dir.empty() && c.delta > 0.0) {
            const NearFieldData ref = apply_aperture(clean, c.aperture);
            const OperatorMatrix F0 = detail::transformed_operator(ref, c);
            const ImageGrid img0 = evaluate_grid(f, [&](const Point2& z) { return w_ff(F0, z, c.k, c.p1); }, c.grid);
            mf.emplace_back("out.W_FF.noise_correlation", io::format_double(pearson_correlation(img.values, img0.values)));
        }
    }
    mf.emplace_back("out.started", started);
    mf.emplace_back("out.finished", detail::utc_now());
    return res;
}

/// <out>/{W_FF,W_TDSM,W_CD}.{csv,pgm}, manifest.txt and optionally data/.
inline void write_outputs(const ExperimentResult& res, const std::filesystem::path& out, bool save_data = false) {
    std::filesystem::create_directories(out);
    for (const auto& img : res.images) {
        io::write_image_csv(out / (std::string(to_string(img.functional)) + ".csv"), img);
        io::write_image_pgm(out / (std::string(to_string(img.functional)) + ".pgm"), img);
    }
    auto mf = io::open_out(out / "manifest.txt");
    mf << "# softscat run manifest; replay with: softscat run --config manifest.txt\n";
    for (const auto& [k, v] : res.manifest) mf << k << " = " << v << '\n';
    if (save_data) io::write_bundle(out / "data", res.data);
}

// ---------------------------------------------------------------------------
// Comparison

struct CompareEntry {
    Functional functional = Functional::FF;
    double correlation = 0.0;
    double max_abs_difference = 0.0;
    double argmax_displacement = 0.0;
};

inline CompareEntry compare_images(const ImageGrid& a, const ImageGrid& b) {
    if (a.xs != b.xs || a.ys != b.ys) throw std::invalid_argument("compare: sampling grids differ");
    CompareEntry e;
    e.functional = a.functional;
    e.correlation = pearson_correlation(a.values, b.values);
    for (size_t i = 0; i < a.values.size(); ++i) e.max_abs_difference = std::max(e.max_abs_difference, std::abs(a.values[i] - b.values[i]));
    e.argmax_displacement = (a.node(a.argmax()) - b.node(b.argmax())).norm();
    return e;
}

/// Compare every functional image present in both output directories.
inline std::vector<CompareEntry> compare_runs(const std::filesystem::path& a, const std::filesystem::path& b) {
    std::vector<CompareEntry> out;
    for (Functional f : {Functional::FF, Functional::TDSM, Functional::CD}) {
        const std::string name = std::string(to_string(f)) + ".csv";
        if (!std::filesystem::exists(a / name) || !std::filesystem::exists(b / name)) continue;
        ImageGrid ia = io::read_image_csv(a / name);
        ImageGrid ib = io::read_image_csv(b / name);
        ia.functional = ib.functional = f;
        out.push_back(compare_images(ia, ib));
    }
    if (out.empty()) throw std::invalid_argument("compare: no common images in the two run directories");
    return out;
}

}  // namespace softscat

// softscat: synthesize near-field data, reconstruct, compare runs.
//
//   softscat run --preset example3 --out DIR
//   softscat run --config FILE [--seed N --delta D ...]
//   softscat compare DIR_A DIR_B
//   softscat selftest [--full]
//
// Exit codes: 0 success, 1 configuration error, 2 numerical failure.
#include <cstdio>
#include <iostream>
#include <optional>

#include <CLI11.hpp>

#include "softscat/experiment.hpp"
#include "softscat/testing/acceptance.hpp"

namespace {

using namespace softscat;

constexpr int kConfigError = 1;
constexpr int kNumericalError = 2;

struct RunArgs {
    std::string preset, config, out = "softscat_out", data;
    std::optional<std::string> shape, aperture, functionals, grid;
    std::optional<double> k, delta, alpha, p1, p2, rho;
    std::optional<std::uint64_t> seed;
    std::optional<int> n, kernel, forward;
    bool save_data = false;
};

io::KeyValues collect_settings(const RunArgs& a) {
    io::KeyValues kv;
    if (!a.config.empty()) kv = io::read_key_values(a.config);
    if (!a.preset.empty()) {
        // a preset flag replaces the file's preset and drops nothing else
        kv["preset"] = a.preset;
    }
    auto put = [&kv](const char* key, const auto& opt) {
        if (!opt) return;
        if constexpr (std::is_same_v<std::decay_t<decltype(*opt)>, std::string>) kv[key] = *opt;
        else if constexpr (std::is_floating_point_v<std::decay_t<decltype(*opt)>>) kv[key] = io::format_double(*opt);
        else kv[key] = std::to_string(*opt);
    };
    put("shape", a.shape);
    put("aperture", a.aperture);
    put("functionals", a.functionals);
    put("grid_resolution", a.grid);
    put("k", a.k);
    put("delta", a.delta);
    put("alpha", a.alpha);
    put("p1", a.p1);
    put("p2", a.p2);
    put("rho", a.rho);
    put("seed", a.seed);
    put("n", a.n);
    put("M", a.kernel);
    put("M_fwd", a.forward);
    if (!a.data.empty()) kv["data"] = a.data;
    return kv;
}

int do_run(const RunArgs& a) {
    ExperimentConfig cfg;
    apply_settings(cfg, collect_settings(a));
    const ExperimentResult res = run_experiment(cfg);
    write_outputs(res, a.out, a.save_data);
    std::printf("%s: shape %s, delta %g, seed %llu -> %s\n", cfg.preset.empty() ? "run" : cfg.preset.c_str(),
                cfg.shape.c_str(), cfg.delta, static_cast<unsigned long long>(cfg.seed), a.out.c_str());
    for (size_t f = 0; f < res.images.size(); ++f) {
        const auto& m = res.metrics[f];
        std::printf("  %-7s argmax (%.4f, %.4f)  dist %.4f  exterior mean %.4f  interior mean %.4f\n",
                    to_string(res.images[f].functional), m.argmax.x(), m.argmax.y(), m.argmax_distance, m.exterior_mean,
                    m.interior_mean);
    }
    return 0;
}

int do_compare(const std::string& a, const std::string& b) {
    const auto entries = compare_runs(a, b);
    for (const auto& e : entries) {
        std::printf("%-7s correlation %.6f  max |diff| %.6g  argmax displacement %.6g\n", to_string(e.functional),
                    e.correlation, e.max_abs_difference, e.argmax_displacement);
    }
    return 0;
}

int do_selftest(bool full) {
    namespace acc = softscat::acceptance;
    const auto outcomes = full ? acc::run_all() : acc::run_fast();
    int failed = 0;
    for (const auto& o : outcomes) {
        acc::print(std::cout, o);
        failed += o.pass ? 0 : 1;
    }
    std::cout << outcomes.size() - failed << " passed, " << failed << " failed\n";
    return failed ? kNumericalError : 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Near-field inverse scattering: direct sampling reconstructions of sound-soft obstacles"};
    app.require_subcommand(1);

    RunArgs ra;
    auto* run = app.add_subcommand("run", "synthesize data (or load a bundle) and write images and a manifest");
    run->add_option("--preset", ra.preset, "named experiment: example1..example4, example4a/4b, example5a/5b");
    run->add_option("--config", ra.config, "key = value file; flags override it")->check(CLI::ExistingFile);
    run->add_option("--out", ra.out, "output directory")->capture_default_str();
    run->add_option("--data", ra.data, "reconstruct from a stored data bundle directory");
    run->add_option("--shape", ra.shape, "circle, acorn, flower or rounded-square");
    run->add_option("--k", ra.k, "wavenumber");
    run->add_option("--n", ra.n, "sources/receivers on the measurement circle");
    run->add_option("--M", ra.kernel, "kernel truncation for Q and R");
    run->add_option("--M-fwd", ra.forward, "forward series truncation");
    run->add_option("--delta", ra.delta, "noise level");
    run->add_option("--seed", ra.seed, "noise seed");
    run->add_option("--alpha", ra.alpha, "Tikhonov parameter");
    run->add_option("--p1", ra.p1, "W_FF exponent");
    run->add_option("--p2", ra.p2, "W_TDSM exponent");
    run->add_option("--rho", ra.rho, "W_CD exponent");
    run->add_option("--aperture", ra.aperture, "'full' or arcs 'lo,hi;lo,hi' (angles may use pi)");
    run->add_option("--functionals", ra.functionals, "comma list of FF, TDSM, CD");
    run->add_option("--grid", ra.grid, "grid resolution 'N' or 'NX,NY'");
    run->add_flag("--save-data", ra.save_data, "also write the (noisy, masked) data bundle to <out>/data");

    std::string dir_a, dir_b;
    auto* cmp = app.add_subcommand("compare", "correlation, max difference and argmax shift between two runs");
    cmp->add_option("A", dir_a, "first run directory")->required()->check(CLI::ExistingDirectory);
    cmp->add_option("B", dir_b, "second run directory")->required()->check(CLI::ExistingDirectory);

    bool full = false;
    auto* self = app.add_subcommand("selftest", "run the oracle and invariant checks");
    self->add_flag("--full", full, "include the reconstruction criteria (slower)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kConfigError;
    }

    try {
        if (*run) return do_run(ra);
        if (*cmp) return do_compare(dir_a, dir_b);
        if (*self) return do_selftest(full);
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kConfigError;
    } catch (const io::FormatError& e) {
        std::cerr << "input error: " << e.what() << '\n';
        return kConfigError;
    } catch (const NumericalError& e) {
        std::cerr << "numerical failure: " << e.what() << '\n';
        return kNumericalError;
    } catch (const std::invalid_argument& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kConfigError;
    } catch (const std::exception& e) {
        std::cerr << "numerical failure: " << e.what() << '\n';
        return kNumericalError;
    }
    return 0;
}

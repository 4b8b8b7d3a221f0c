#include <CLI11.hpp>

#include <cstdio>
#include <iostream>

#include "kcurves/cli/runner.hpp"

int main(int argc, char** argv) {
    CLI::App app{"Learning curves of kernel methods: sweeps, exact lattice formula, spectral predictors"};
    app.set_version_flag("--version", kcurves::kVersion);
    app.require_subcommand(1);

    kcurves::cli::RunOptions opt;
    std::string output;
    std::uint64_t seed = 0;
    for (const auto& name : kcurves::cli::subcommands()) {
        auto* sub = app.add_subcommand(name, "run the " + name + " recipe");
        sub->add_option("-c,--config", opt.config, "YAML config file")->required();
        sub->add_option("-o,--output", output, "CSV path (overrides `output`)");
        sub->add_option("-s,--seed", seed, "master seed (overrides `seed`)");
        sub->add_flag("--resume", opt.resume, "skip cells already recorded in <output>.cells");
    }
    CLI11_PARSE(app, argc, argv);

    const auto* sub = app.get_subcommands().front();
    if (sub->count("--output")) opt.output = output;
    if (sub->count("--seed")) opt.seed = seed;
    try {
        const auto res = kcurves::cli::run(sub->get_name(), opt);
        std::printf("wrote %s (%zu rows) and %s\n", res.csv.string().c_str(), res.table.rows.size(),
                    res.metadata.string().c_str());
        for (const auto& f : res.fits)
            std::printf("fit %s: exponent %.6g over [%g, %g], R^2 %.6f\n", f.name.c_str(), f.fit.exponent, f.fit.window.lo,
                        f.fit.window.hi, f.fit.r_squared);
        for (const auto& kv : res.results)
            std::printf("%s: %s\n", kv.first.as<std::string>().c_str(), kv.second.as<std::string>().c_str());
    } catch (const kcurves::ConfigError& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return 2;
    } catch (const kcurves::Error& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    return 0;
}

#include <cstdio>
#include <exception>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "gqc/cli/commands.hpp"
#include "gqc/trainer/config.hpp"

namespace {

// exit codes: 0 success, 2 validation error, 3 runtime failure
int guarded(const std::function<void()>& fn) {
    try {
        fn();
        return 0;
    } catch (const gqc::input_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "failure: " << e.what() << "\n";
        return 3;
    }
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"generative quantum circuits for degenerate ground spaces"};
    app.require_subcommand(1);

    // train
    auto* train = app.add_subcommand("train", "run the training loop");
    std::string config_path, preset, out_dir = "run";
    std::uint64_t seed = 0;
    bool have_seed = false;
    train->add_option("--config", config_path, "config JSON file");
    train->add_option("--preset", preset,
                      "bundled preset name (see --list-presets)");
    train->add_option("--out", out_dir, "run directory")->capture_default_str();
    train->add_option("--seed", seed, "master seed override")
        ->each([&](const std::string&) { have_seed = true; });
    bool list_presets = false;
    train->add_flag("--list-presets", list_presets, "print preset names and exit");

    // generate
    auto* gen = app.add_subcommand("generate", "sample states from a checkpoint");
    std::string ckpt_path, run_path, ens_out;
    long count = 1500;
    std::uint64_t gen_seed = 0;
    bool have_gen_seed = false;
    gen->add_option("--checkpoint", ckpt_path, "checkpoint file");
    gen->add_option("--run", run_path, "run directory (uses checkpoints/final.ckpt)");
    gen->add_option("--count", count, "number of samples")->capture_default_str();
    gen->add_option("--seed", gen_seed, "generation seed")
        ->each([&](const std::string&) { have_gen_seed = true; });
    gen->add_option("--out", ens_out, "output ensemble file");

    // certify
    auto* cert = app.add_subcommand("certify", "span diagnostics for an ensemble");
    std::string cert_ens, cert_run, cert_out;
    gqc::cli::CertifyOptions copts;
    double de = 0, cut = 0, reps = 0, cap = 0;
    std::string variant;
    cert->add_option("--ensemble", cert_ens, "ensemble file");
    cert->add_option("--run", cert_run,
                     "run directory (uses ensemble.bin, writes certification/)");
    cert->add_option("--out", cert_out, "output directory");
    cert->add_option("--delta-e", de, "relative energy cut")
        ->each([&](const std::string&) { copts.delta_e_rel = de; });
    cert->add_option("--p-variant", variant, "overlap score variant (amp_sum|prob_sum)")
        ->each([&](const std::string& v) {
            copts.variant = gqc::spanlab::overlap_variant_from_name(v);
        });
    cert->add_option("--p-cut", cut, "overlap score cut")
        ->each([&](const std::string&) { copts.overlap_cut = cut; });
    cert->add_option("--rank-eps", reps, "tolerance rank epsilon")
        ->each([&](const std::string&) { copts.rank_eps = reps; });
    cert->add_option("--subset-cap", cap, "orthogonal subset overlap cap")
        ->each([&](const std::string&) { copts.subset_cap = cap; });

    // export
    auto* exp = app.add_subcommand("export", "plot-ready CSV exports");
    std::string exp_run, exp_what = "dynamics", exp_out = ".";
    exp->add_option("--run", exp_run, "run directory")->required();
    exp->add_option("--what", exp_what, "dynamics|overlaps|heatmaps")
        ->capture_default_str();
    exp->add_option("--out", exp_out, "output directory")->capture_default_str();

    CLI11_PARSE(app, argc, argv);

    if (train->parsed()) {
        return guarded([&] {
            if (list_presets) {
                for (const auto& n : gqc::trainer::preset_names())
                    std::cout << n << "\n";
                return;
            }
            const auto dir = gqc::cli::cmd_train(
                config_path.empty() ? std::nullopt
                                    : std::optional<std::string>(config_path),
                preset.empty() ? std::nullopt : std::optional<std::string>(preset),
                have_seed ? std::optional<std::uint64_t>(seed) : std::nullopt,
                out_dir);
            std::cout << "run directory: " << dir.string() << "\n";
        });
    }
    if (gen->parsed()) {
        return guarded([&] {
            gqc::require(ckpt_path.empty() != run_path.empty(),
                         "generate: give exactly one of --checkpoint or --run");
            const std::filesystem::path ckpt =
                ckpt_path.empty()
                    ? std::filesystem::path(run_path) / "checkpoints" / "final.ckpt"
                    : std::filesystem::path(ckpt_path);
            const std::filesystem::path out =
                !ens_out.empty() ? std::filesystem::path(ens_out)
                : !run_path.empty()
                    ? std::filesystem::path(run_path) / "ensemble.bin"
                    : std::filesystem::path("ensemble.bin");
            const auto f = gqc::cli::cmd_generate(
                ckpt, count,
                have_gen_seed ? std::optional<std::uint64_t>(gen_seed)
                              : std::nullopt,
                out);
            std::cout << "ensemble: " << f.string() << "\n";
        });
    }
    if (cert->parsed()) {
        return guarded([&] {
            gqc::require(cert_ens.empty() != cert_run.empty(),
                         "certify: give exactly one of --ensemble or --run");
            const std::filesystem::path ens =
                cert_ens.empty()
                    ? std::filesystem::path(cert_run) / "ensemble.bin"
                    : std::filesystem::path(cert_ens);
            const std::filesystem::path out =
                !cert_out.empty() ? std::filesystem::path(cert_out)
                : !cert_run.empty()
                    ? std::filesystem::path(cert_run) / "certification"
                    : std::filesystem::path("certification");
            const auto report = gqc::cli::cmd_certify(ens, out, copts);
            std::cout << "report: " << report.string() << "\n";
        });
    }
    if (exp->parsed()) {
        return guarded([&] {
            gqc::cli::cmd_export(exp_run,
                                 gqc::cli::export_kind_from_name(exp_what),
                                 exp_out);
        });
    }
    return 0;
}

#pragma once

#include <filesystem>
#include <optional>
#include <string>

#include "gqc/io/run_io.hpp"
#include "gqc/spanlab/spanlab.hpp"

namespace gqc::cli {

namespace fs = std::filesystem;

// Paper-style certification thresholds per model/size; all overridable.
struct CertifyOptions {
    std::optional<double> delta_e_rel;
    std::optional<spanlab::OverlapVariant> variant;
    std::optional<double> overlap_cut;
    std::optional<double> rank_eps;
    std::optional<double> subset_cap;
    int representative_count = 10;
};

spanlab::AcceptThresholds default_thresholds(const models::SpinModelSpec& model);
double default_rank_eps(const models::SpinModelSpec& model);
double default_subset_cap(const models::SpinModelSpec& model);

// train: run a config (or preset) into a run directory; resumes if the
// directory already holds a checkpoint. Returns the run directory.
fs::path cmd_train(const std::optional<std::string>& config_path,
                   const std::optional<std::string>& preset,
                   const std::optional<std::uint64_t>& seed_override,
                   const fs::path& out_dir);

// generate: sample `count` states from a trained checkpoint.
fs::path cmd_generate(const fs::path& checkpoint, long count,
                      const std::optional<std::uint64_t>& seed,
                      const fs::path& out_file);

// certify: ED oracle + acceptance + span diagnostics + exports. Writes
// report.json, overlaps.csv and similarity heatmap CSVs into out_dir.
fs::path cmd_certify(const fs::path& ensemble_file, const fs::path& out_dir,
                     const CertifyOptions& opts = {});

enum class ExportKind { DYNAMICS, OVERLAPS, HEATMAPS };
ExportKind export_kind_from_name(const std::string& name);

// export: plot-ready CSVs derived from run artifacts.
void cmd_export(const fs::path& run_dir, ExportKind what, const fs::path& out_dir);

} // namespace gqc::cli

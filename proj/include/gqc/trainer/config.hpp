#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "gqc/features/features.hpp"
#include "gqc/generator/generator.hpp"
#include "gqc/models/spin_models.hpp"

namespace gqc::trainer {

enum class GradMode { EXACT, SHIFT_FULL, SHIFT_STOCHASTIC };

std::string grad_mode_name(GradMode m);
GradMode grad_mode_from_name(const std::string& name);

struct LrSchedule {
    double initial = 3e-4;
    double decay_factor = 0.995;
    long decay_interval = 10;
    double floor_fraction = 0.1;

    double at(long iteration) const;
};

struct Lambda2Schedule {
    double start = 1.0;
    double end = 1.0;
    long horizon = 1; // linear interpolation over [0, horizon], constant after

    double at(long iteration) const;
};

struct ShotStage {
    long from_iteration = 0;
    long shots = 1000;
};

struct ConvergenceSpec {
    double mean_tol = 0.02;
    double max_tol = 0.08;
    int required_hits = 5;
};

struct TrainConfig {
    models::SpinModelSpec model;
    int depth = 1;
    generator::NetworkShape network; // input/output dims filled from the ansatz
    int batch = 2;
    double lambda1 = 1.0;
    Lambda2Schedule lambda2;
    LrSchedule learning_rate;
    std::vector<features::FeatureKind> feature_kinds;
    GradMode mode = GradMode::EXACT;
    int active_params = 0;              // K, SHIFT_STOCHASTIC only
    std::vector<ShotStage> shot_schedule; // shift modes only
    ConvergenceSpec convergence;
    long max_iterations = 1000;
    std::uint64_t seed = 0;
    long checkpoint_interval = 1000;

    long shots_at(long iteration) const;
    void validate() const; // throws input_error naming the offending field
};

// JSON round-trip (versioned schema "version": 1).
TrainConfig config_from_json(const std::string& text);
TrainConfig load_config(const std::string& path);
std::string config_to_json(const TrainConfig& c);

// Bundled presets (presets/<name>.json next to the sources, overridable with
// the GQC_PRESET_DIR environment variable).
std::string preset_path(const std::string& name);
TrainConfig load_preset(const std::string& name);
std::vector<std::string> preset_names();

} // namespace gqc::trainer

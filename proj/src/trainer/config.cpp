#include "gqc/trainer/config.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "gqc/ansatz/ansatz.hpp"

namespace gqc::trainer {

using nlohmann::json;

std::string grad_mode_name(GradMode m) {
    switch (m) {
        case GradMode::EXACT: return "exact";
        case GradMode::SHIFT_FULL: return "shift_full";
        case GradMode::SHIFT_STOCHASTIC: return "shift_stochastic";
    }
    return "?";
}

GradMode grad_mode_from_name(const std::string& name) {
    if (name == "exact") return GradMode::EXACT;
    if (name == "shift_full") return GradMode::SHIFT_FULL;
    if (name == "shift_stochastic") return GradMode::SHIFT_STOCHASTIC;
    throw input_error("gradient.mode: unknown mode '" + name + "'");
}

double LrSchedule::at(long iteration) const {
    const long steps = iteration / std::max<long>(decay_interval, 1);
    const double eta = initial * std::pow(decay_factor, static_cast<double>(steps));
    return std::max(eta, initial * floor_fraction);
}

double Lambda2Schedule::at(long iteration) const {
    if (iteration >= horizon || horizon <= 0) return end;
    const double f = static_cast<double>(iteration) / static_cast<double>(horizon);
    return start + (end - start) * f;
}

long TrainConfig::shots_at(long iteration) const {
    long shots = 0;
    for (const auto& stage : shot_schedule)
        if (iteration >= stage.from_iteration) shots = stage.shots;
    return shots;
}

void TrainConfig::validate() const {
    auto fail = [](const std::string& field, const std::string& why) {
        throw input_error("config: " + field + " " + why);
    };
    if (model.n_sites < (model.model == models::SpinModel::MG ? 3 : 2))
        fail("model.sites", "too small for the chosen model");
    if (depth < 1) fail("circuit.depth", "must be >= 1");
    if (batch < 2) fail("batch", "must be >= 2");
    if (lambda1 <= 0.0) fail("lambda1", "must be > 0");
    if (lambda2.start <= 0.0) fail("lambda2.start", "must be > 0");
    if (lambda2.end <= 0.0) fail("lambda2.end", "must be > 0");
    if (lambda2.horizon < 1) fail("lambda2.horizon", "must be >= 1");
    if (learning_rate.initial <= 0.0) fail("learning_rate.initial", "must be > 0");
    if (learning_rate.decay_factor <= 0.0 || learning_rate.decay_factor > 1.0)
        fail("learning_rate.decay_factor", "must be in (0, 1]");
    if (learning_rate.decay_interval < 1)
        fail("learning_rate.decay_interval", "must be >= 1");
    if (convergence.mean_tol <= 0.0) fail("convergence.mean_tol", "must be > 0");
    if (convergence.max_tol <= 0.0) fail("convergence.max_tol", "must be > 0");
    if (convergence.required_hits < 1)
        fail("convergence.required_hits", "must be >= 1");
    if (feature_kinds.empty()) fail("features", "must name at least one feature set");
    if (max_iterations < 1) fail("max_iterations", "must be >= 1");

    const int n_params = (model.model == models::SpinModel::MG)
                             ? 15 * (model.n_sites - 1) * depth
                             : (9 * model.n_sites + 3 * (model.n_sites - 1)) * depth;
    if (network.input_dim != n_params)
        fail("network.input_dim", "must equal the circuit parameter count " +
                                      std::to_string(n_params));
    if (network.output_dim != n_params)
        fail("network.output_dim", "must equal the circuit parameter count " +
                                       std::to_string(n_params));
    network.validate();

    if (mode == GradMode::SHIFT_STOCHASTIC) {
        if (active_params < 1) fail("gradient.active_params", "must be >= 1");
        if (active_params > n_params)
            fail("gradient.active_params",
                 "exceeds the circuit parameter count " + std::to_string(n_params));
    }
    if (mode != GradMode::EXACT) {
        if (shot_schedule.empty())
            fail("shots.schedule", "must be non-empty for shift modes");
        for (const auto& s : shot_schedule)
            if (s.shots < 1) fail("shots.schedule", "shot counts must be >= 1");
        if (shot_schedule.front().from_iteration != 0)
            fail("shots.schedule", "first stage must start at iteration 0");
        for (std::size_t i = 1; i < shot_schedule.size(); ++i)
            if (shot_schedule[i].from_iteration <= shot_schedule[i - 1].from_iteration)
                fail("shots.schedule", "stages must have increasing start iterations");
    }
}

namespace {

json require_field(const json& j, const std::string& key, const std::string& path) {
    if (!j.contains(key))
        throw input_error("config: missing field " + path + key);
    return j.at(key);
}

} // namespace

TrainConfig config_from_json(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw input_error(std::string("config: invalid JSON: ") + e.what());
    }
    if (require_field(j, "version", "").get<int>() != 1)
        throw input_error("config: version must be 1");

    TrainConfig c;
    const json jm = require_field(j, "model", "");
    c.model.model = models::model_from_name(
        require_field(jm, "name", "model.").get<std::string>());
    c.model.n_sites = require_field(jm, "sites", "model.").get<int>();
    if (jm.contains("delta")) c.model.delta = jm.at("delta").get<double>();

    c.depth = require_field(require_field(j, "circuit", ""), "depth", "circuit.")
                  .get<int>();

    const json jn = require_field(j, "network", "");
    c.network.encoder_hidden =
        require_field(jn, "encoder", "network.").get<std::vector<int>>();
    c.network.latent_dim = require_field(jn, "latent", "network.").get<int>();
    c.network.decoder_hidden =
        require_field(jn, "decoder", "network.").get<std::vector<int>>();
    const int n_params =
        (c.model.model == models::SpinModel::MG)
            ? 15 * (c.model.n_sites - 1) * c.depth
            : (9 * c.model.n_sites + 3 * (c.model.n_sites - 1)) * c.depth;
    c.network.input_dim = n_params;
    c.network.output_dim = n_params;

    c.batch = require_field(j, "batch", "").get<int>();
    c.lambda1 = require_field(j, "lambda1", "").get<double>();

    const json jl2 = require_field(j, "lambda2", "");
    c.lambda2.start = require_field(jl2, "start", "lambda2.").get<double>();
    c.lambda2.end = require_field(jl2, "end", "lambda2.").get<double>();
    c.lambda2.horizon = require_field(jl2, "horizon", "lambda2.").get<long>();

    const json jlr = require_field(j, "learning_rate", "");
    c.learning_rate.initial =
        require_field(jlr, "initial", "learning_rate.").get<double>();
    if (jlr.contains("decay_factor"))
        c.learning_rate.decay_factor = jlr.at("decay_factor").get<double>();
    if (jlr.contains("decay_interval"))
        c.learning_rate.decay_interval = jlr.at("decay_interval").get<long>();
    if (jlr.contains("floor_fraction"))
        c.learning_rate.floor_fraction = jlr.at("floor_fraction").get<double>();

    for (const auto& name :
         require_field(j, "features", "").get<std::vector<std::string>>())
        c.feature_kinds.push_back(features::feature_kind_from_name(name));

    const json jg = require_field(j, "gradient", "");
    c.mode = grad_mode_from_name(
        require_field(jg, "mode", "gradient.").get<std::string>());
    if (jg.contains("active_params"))
        c.active_params = jg.at("active_params").get<int>();

    if (j.contains("shots")) {
        for (const auto& js :
             require_field(j.at("shots"), "schedule", "shots.")) {
            ShotStage st;
            st.from_iteration =
                require_field(js, "from_iteration", "shots.schedule.").get<long>();
            st.shots = require_field(js, "shots", "shots.schedule.").get<long>();
            c.shot_schedule.push_back(st);
        }
    }

    const json jc = require_field(j, "convergence", "");
    c.convergence.mean_tol =
        require_field(jc, "mean_tol", "convergence.").get<double>();
    c.convergence.max_tol =
        require_field(jc, "max_tol", "convergence.").get<double>();
    c.convergence.required_hits =
        require_field(jc, "required_hits", "convergence.").get<int>();

    c.max_iterations = require_field(j, "max_iterations", "").get<long>();
    c.seed = require_field(j, "seed", "").get<std::uint64_t>();
    if (j.contains("checkpoint_interval"))
        c.checkpoint_interval = j.at("checkpoint_interval").get<long>();

    c.validate();
    return c;
}

TrainConfig load_config(const std::string& path) {
    std::ifstream f(path);
    require(f.good(), "config: cannot open " + path);
    std::stringstream ss;
    ss << f.rdbuf();
    return config_from_json(ss.str());
}

std::string config_to_json(const TrainConfig& c) {
    json j;
    j["version"] = 1;
    j["model"]["name"] = models::model_name(c.model.model);
    j["model"]["sites"] = c.model.n_sites;
    if (c.model.model == models::SpinModel::XXZ)
        j["model"]["delta"] = c.model.delta;
    j["circuit"]["depth"] = c.depth;
    j["network"]["encoder"] = c.network.encoder_hidden;
    j["network"]["latent"] = c.network.latent_dim;
    j["network"]["decoder"] = c.network.decoder_hidden;
    j["batch"] = c.batch;
    j["lambda1"] = c.lambda1;
    j["lambda2"]["start"] = c.lambda2.start;
    j["lambda2"]["end"] = c.lambda2.end;
    j["lambda2"]["horizon"] = c.lambda2.horizon;
    j["learning_rate"]["initial"] = c.learning_rate.initial;
    j["learning_rate"]["decay_factor"] = c.learning_rate.decay_factor;
    j["learning_rate"]["decay_interval"] = c.learning_rate.decay_interval;
    j["learning_rate"]["floor_fraction"] = c.learning_rate.floor_fraction;
    std::vector<std::string> feats;
    for (auto k : c.feature_kinds) feats.push_back(features::feature_kind_name(k));
    j["features"] = feats;
    j["gradient"]["mode"] = grad_mode_name(c.mode);
    if (c.mode == GradMode::SHIFT_STOCHASTIC)
        j["gradient"]["active_params"] = c.active_params;
    if (!c.shot_schedule.empty()) {
        json stages = json::array();
        for (const auto& s : c.shot_schedule)
            stages.push_back({{"from_iteration", s.from_iteration},
                              {"shots", s.shots}});
        j["shots"]["schedule"] = stages;
    }
    j["convergence"]["mean_tol"] = c.convergence.mean_tol;
    j["convergence"]["max_tol"] = c.convergence.max_tol;
    j["convergence"]["required_hits"] = c.convergence.required_hits;
    j["max_iterations"] = c.max_iterations;
    j["seed"] = c.seed;
    j["checkpoint_interval"] = c.checkpoint_interval;
    return j.dump(2);
}

std::string preset_path(const std::string& name) {
    namespace fs = std::filesystem;
    std::vector<fs::path> roots;
    if (const char* env = std::getenv("GQC_PRESET_DIR")) roots.emplace_back(env);
#ifdef GQC_PRESET_DIR
    roots.emplace_back(GQC_PRESET_DIR);
#endif
    roots.emplace_back("presets");
    for (const auto& root : roots) {
        const fs::path p = root / (name + ".json");
        if (fs::exists(p)) return p.string();
    }
    throw input_error("preset not found: " + name);
}

TrainConfig load_preset(const std::string& name) {
    return load_config(preset_path(name));
}

std::vector<std::string> preset_names() {
    return {"mg_n9",       "mg_n10",      "aklt_n10",   "xxz_n8",
            "mg_n5_exact", "mg_n5_shots", "mg_n6_shots"};
}

} // namespace gqc::trainer

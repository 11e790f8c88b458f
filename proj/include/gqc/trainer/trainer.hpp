#pragma once

#include <filesystem>
#include <functional>
#include <optional>

#include "gqc/ansatz/ansatz.hpp"
#include "gqc/trainer/adam.hpp"
#include "gqc/trainer/config.hpp"

namespace gqc::trainer {

using ansatz::CircuitTemplate;
using ansatz::ParamVector;
using features::FeatureVector;

// Eq-style objective over one batch:
// L = lambda1 * mean(E) + lambda2 * sum_k diversity_k.
struct BatchLoss {
    double total = 0.0;
    double mean_energy = 0.0;
    double max_energy = 0.0;
    std::vector<double> diversity; // one value per feature set
};

BatchLoss batch_loss(const std::vector<double>& energies,
                     const std::vector<std::vector<FeatureVector>>& features_per_set,
                     double lambda1, double lambda2);

// d(sum_k diversity_k)/d(feature vector of each sample), per feature set.
std::vector<std::vector<FeatureVector>> diversity_feature_gradients(
    const std::vector<std::vector<FeatureVector>>& features_per_set);

double anneal_lambda2(long iteration, const Lambda2Schedule& schedule);

// Exact dL/dtheta for one sample: a single reverse sweep against the
// effective observable (lambda1/M) H + lambda2 * sum_k sum_j c_kj O_kj.
std::vector<double> grad_circuit_params_exact(
    const CircuitTemplate& tmpl, const ParamVector& theta,
    const qsim::CompiledObservable& hamiltonian,
    const std::vector<qsim::CompiledObservable>& feature_terms,
    const std::vector<FeatureVector>& feature_coeffs, double lambda1_over_m,
    double lambda2);

// Stochastic parameter-shift: g_j = 0.5*[L(theta + (pi/2) e_j) - L(theta - (pi/2) e_j)]
// for j in the active set, 0 elsewhere. `loss_at` evaluates the full loss at
// a shifted parameter vector (2K evaluations).
std::vector<double> grad_stochastic_shift(
    const CircuitTemplate& tmpl, const ParamVector& theta,
    const std::vector<int>& active_set,
    const std::function<double(int slot, double value)>& loss_at);

// Uniform K-subset of [0, n_params) without replacement.
std::vector<int> draw_active_set(int n_params, int k, RandomStream& rng);

struct ConvergenceTracker {
    ConvergenceSpec spec;
    int hits = 0;

    void update(double mean_energy, double max_energy, double e0_reference);
    bool converged() const { return hits >= spec.required_hits; }
};

struct IterationStats {
    long iteration = 0;
    double mean_energy = 0.0;
    double max_energy = 0.0;
    double l1_sim = 0.0;
    double l2_sim = 0.0;
    double mean_fidelity = 0.0;
    double lambda2 = 0.0;
    long shots = 0;
    double eta = 0.0;
};

struct TrainResult {
    generator::GeneratorParams params;
    AdamState adam;
    bool converged = false;
    long iterations = 0;
    double e0_reference = 0.0;
    std::vector<IterationStats> log;
};

// Full training loop. When run_dir is set, writes manifest.json, config.json,
// log.csv and checkpoints there; resumes from checkpoints/last.ckpt if present.
TrainResult train(const TrainConfig& config,
                  const std::optional<std::filesystem::path>& run_dir = std::nullopt);

CircuitTemplate template_for(const TrainConfig& config);

} // namespace gqc::trainer

#include "gqc/trainer/trainer.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <numeric>

#include "gqc/io/run_io.hpp"
#include "gqc/parallel.hpp"

namespace gqc::trainer {

using features::FeatureSpec;
using generator::GeneratorGrads;
using generator::GeneratorParams;

BatchLoss batch_loss(const std::vector<double>& energies,
                     const std::vector<std::vector<FeatureVector>>& features_per_set,
                     double lambda1, double lambda2) {
    const std::size_t m = energies.size();
    require(m >= 2, "batch_loss: need at least 2 samples");
    for (const auto& set : features_per_set)
        require(set.size() == m, "batch_loss: feature batch size mismatch");

    BatchLoss out;
    out.mean_energy =
        std::accumulate(energies.begin(), energies.end(), 0.0) / double(m);
    out.max_energy = *std::max_element(energies.begin(), energies.end());
    double div_sum = 0.0;
    for (const auto& set : features_per_set) {
        const double d = features::batch_diversity_loss(set);
        out.diversity.push_back(d);
        div_sum += d;
    }
    out.total = lambda1 * out.mean_energy + lambda2 * div_sum;
    return out;
}

std::vector<std::vector<FeatureVector>> diversity_feature_gradients(
    const std::vector<std::vector<FeatureVector>>& features_per_set) {
    std::vector<std::vector<FeatureVector>> grads;
    for (const auto& set : features_per_set) {
        const std::size_t m = set.size();
        require(m >= 2, "diversity_feature_gradients: need at least 2 samples");
        const double scale = 2.0 / (double(m) * double(m - 1));
        std::vector<double> norms(m);
        for (std::size_t i = 0; i < m; ++i) {
            double acc = 0.0;
            for (double v : set[i]) acc += v * v;
            norms[i] = std::sqrt(acc);
        }
        std::vector<FeatureVector> g(m, FeatureVector(set[0].size(), 0.0));
        for (std::size_t i = 0; i < m; ++i) {
            if (norms[i] < features::norm_eps) continue; // degenerate: zero grad
            for (std::size_t j = 0; j < m; ++j) {
                if (j == i || norms[j] < features::norm_eps) continue;
                double dot = 0.0;
                for (std::size_t t = 0; t < set[i].size(); ++t)
                    dot += set[i][t] * set[j][t];
                const double s = dot / (norms[i] * norms[j]);
                const double inv = 1.0 / (norms[i] * norms[j]);
                const double self = s / (norms[i] * norms[i]);
                for (std::size_t t = 0; t < set[i].size(); ++t)
                    g[i][t] += scale * (set[j][t] * inv - set[i][t] * self);
            }
        }
        grads.push_back(std::move(g));
    }
    return grads;
}

double anneal_lambda2(long iteration, const Lambda2Schedule& schedule) {
    require(iteration >= 0, "anneal_lambda2: negative iteration");
    return schedule.at(iteration);
}

std::vector<double> grad_circuit_params_exact(
    const CircuitTemplate& tmpl, const ParamVector& theta,
    const qsim::CompiledObservable& hamiltonian,
    const std::vector<qsim::CompiledObservable>& feature_terms,
    const std::vector<FeatureVector>& feature_coeffs, double lambda1_over_m,
    double lambda2) {
    require(feature_terms.size() == feature_coeffs.size(),
            "grad_circuit_params_exact: feature set count mismatch");
    qsim::CompiledObservable eff;
    eff.n_qubits = hamiltonian.n_qubits;
    for (const auto& t : hamiltonian.terms) {
        auto ct = t;
        ct.coeff *= lambda1_over_m;
        eff.terms.push_back(ct);
    }
    for (std::size_t k = 0; k < feature_terms.size(); ++k) {
        require(feature_terms[k].terms.size() == feature_coeffs[k].size(),
                "grad_circuit_params_exact: coefficient length mismatch");
        for (std::size_t j = 0; j < feature_terms[k].terms.size(); ++j) {
            const double c = lambda2 * feature_coeffs[k][j];
            if (std::abs(c) < 1e-18) continue;
            auto ct = feature_terms[k].terms[j];
            ct.coeff = c;
            eff.terms.push_back(ct);
        }
    }
    return ansatz::adjoint_gradient(tmpl, theta, eff);
}

std::vector<double> grad_stochastic_shift(
    const CircuitTemplate& tmpl, const ParamVector& theta,
    const std::vector<int>& active_set,
    const std::function<double(int slot, double value)>& loss_at) {
    require(static_cast<int>(active_set.size()) <= tmpl.n_params,
            "grad_stochastic_shift: active set larger than parameter count");
    constexpr double delta = M_PI / 2.0;
    std::vector<double> g(tmpl.n_params, 0.0);
    for (int j : active_set) {
        require(j >= 0 && j < tmpl.n_params, "grad_stochastic_shift: bad slot");
        const double lp = loss_at(j, theta[j] + delta);
        const double lm = loss_at(j, theta[j] - delta);
        g[j] = 0.5 * (lp - lm);
    }
    return g;
}

std::vector<int> draw_active_set(int n_params, int k, RandomStream& rng) {
    require(k >= 1 && k <= n_params, "draw_active_set: bad subset size");
    std::vector<int> idx(n_params);
    std::iota(idx.begin(), idx.end(), 0);
    for (int i = 0; i < k; ++i) {
        const int j =
            i + static_cast<int>(rng.uniform() * double(n_params - i));
        std::swap(idx[i], idx[std::min(j, n_params - 1)]);
    }
    idx.resize(k);
    std::sort(idx.begin(), idx.end());
    return idx;
}

void ConvergenceTracker::update(double mean_energy, double max_energy,
                                double e0_reference) {
    if (std::abs(mean_energy - e0_reference) < spec.mean_tol &&
        std::abs(max_energy - e0_reference) < spec.max_tol)
        ++hits;
}

CircuitTemplate template_for(const TrainConfig& config) {
    if (config.model.model == models::SpinModel::MG)
        return ansatz::build_mg_ansatz(config.model.n_sites, config.depth);
    return ansatz::build_spin1_ansatz(config.model.n_sites, config.depth);
}

namespace {

struct SampleEval {
    generator::ForwardCache net;
    ParamVector theta;
    qsim::StateVector state;
    double energy = 0.0;
    std::vector<FeatureVector> features; // one per feature set
};

// Pairwise cosine-similarity bookkeeping for one feature set: total over
// i<j, per-sample row sums, and leave-one-out sums of the normalized
// vectors. A shifted sample's row sum then costs one dot product.
struct SimCache {
    double total = 0.0;
    std::vector<double> row;             // sum over j != m of s(f_m, f_j)
    std::vector<FeatureVector> loo_sum;  // sum over j != m of f_j/|f_j|
};

SimCache build_sim_cache(const std::vector<FeatureVector>& set) {
    const std::size_t m = set.size();
    const std::size_t d = set[0].size();
    SimCache c;
    c.row.assign(m, 0.0);

    std::vector<FeatureVector> unit(m, FeatureVector(d, 0.0));
    FeatureVector all(d, 0.0);
    for (std::size_t i = 0; i < m; ++i) {
        double n2 = 0.0;
        for (double v : set[i]) n2 += v * v;
        const double n = std::sqrt(n2);
        if (n < features::norm_eps) continue; // degenerate: contributes 0
        for (std::size_t t = 0; t < d; ++t) {
            unit[i][t] = set[i][t] / n;
            all[t] += unit[i][t];
        }
    }
    c.loo_sum.assign(m, FeatureVector(d, 0.0));
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t t = 0; t < d; ++t)
            c.loo_sum[i][t] = all[t] - unit[i][t];

    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = i + 1; j < m; ++j) {
            const double s = features::cosine_similarity(set[i], set[j]);
            c.total += s;
            c.row[i] += s;
            c.row[j] += s;
        }
    return c;
}

std::uint64_t key2(long iter, long m, long batch) {
    return static_cast<std::uint64_t>(iter) * static_cast<std::uint64_t>(batch) +
           static_cast<std::uint64_t>(m);
}

} // namespace

TrainResult train(const TrainConfig& config,
                  const std::optional<std::filesystem::path>& run_dir) {
    namespace fs = std::filesystem;
    config.validate();

    const CircuitTemplate tmpl = template_for(config);
    const int n_params = tmpl.n_params;
    const int m_batch = config.batch;
    const auto& shape = config.network;

    const qsim::PauliSum h = config.model.hamiltonian();
    const auto h_c = qsim::compile(h);

    // ED reference for the convergence criterion. Falls back to a running
    // best with a stall criterion when the dimension is out of ED reach.
    bool have_e0 = dim_of(config.model.n_qubits()) <= 4096;
    double e0 = 0.0;
    if (have_e0) e0 = models::exact_diagonalize(h).energy;

    std::vector<FeatureSpec> specs;
    std::vector<qsim::CompiledObservable> specs_c;
    for (auto kind : config.feature_kinds) {
        specs.push_back(FeatureSpec::make(kind, config.model.n_qubits()));
        specs_c.push_back(qsim::compile(specs.back().terms));
    }

    // Shot mode measures the Hamiltonian and every feature term through one
    // shared plan; term means are split back out by index range.
    qsim::PauliSum union_obs(config.model.n_qubits());
    const std::size_t h_count = h.terms.size();
    std::vector<std::size_t> spec_offset;
    {
        union_obs += h;
        for (const auto& s : specs) {
            spec_offset.push_back(union_obs.terms.size());
            union_obs += s.terms;
        }
    }
    const bool shot_mode = config.mode != GradMode::EXACT;
    qsim::ShotPlan plan;
    std::optional<qsim::ShotSampler> sampler;
    long plan_shots = -1;

    // Initial weights, optimizer state, resume point.
    RandomStream init_rng = substream(config.seed, "init");
    GeneratorParams params = GeneratorParams::init(shape, init_rng);
    AdamState adam(params.count());
    long start_iter = 0;
    int tracker_hits = 0;
    std::vector<IterationStats> log;

    if (run_dir) {
        fs::create_directories(*run_dir / "checkpoints");
        const fs::path last = *run_dir / "checkpoints" / "last.ckpt";
        if (fs::exists(last)) {
            io::Checkpoint ckpt = io::load_checkpoint(last);
            auto strip = [](const TrainConfig& c) {
                TrainConfig r = c;
                r.max_iterations = 0; // resuming may extend the budget
                return config_to_json(r);
            };
            require(strip(ckpt.config) == strip(config),
                    "train: checkpoint config does not match");
            params = ckpt.params;
            adam = ckpt.adam;
            start_iter = ckpt.iteration;
            const fs::path logp = *run_dir / "log.csv";
            if (fs::exists(logp)) {
                log = io::read_log_csv(logp);
                while (!log.empty() && log.back().iteration >= start_iter)
                    log.pop_back();
                ConvergenceTracker replay{config.convergence, 0};
                for (const auto& r : log)
                    if (have_e0) replay.update(r.mean_energy, r.max_energy, e0);
                tracker_hits = replay.hits;
            }
        } else {
            std::ofstream cf(*run_dir / "config.json");
            cf << config_to_json(config) << "\n";
        }
    }

    ConvergenceTracker tracker{config.convergence, tracker_hits};

    auto save_ckpt = [&](long iteration, bool converged, const char* name) {
        if (!run_dir) return;
        io::Checkpoint ckpt{config, params, adam, iteration, converged};
        io::save_checkpoint(*run_dir / "checkpoints" / name, ckpt);
        io::write_log_csv(*run_dir / "log.csv", log);
    };

    const double lambda1 = config.lambda1;
    double initial_mean_energy = 0.0;
    bool have_initial = !log.empty();
    if (have_initial) initial_mean_energy = log.front().mean_energy;
    int divergence_run = 0;
    double best_energy = std::numeric_limits<double>::infinity();
    long best_energy_iter = 0;
    bool converged = false;
    long iter = start_iter;

    std::vector<SampleEval> batch(m_batch);

    for (; iter < config.max_iterations; ++iter) {
        const double lambda2 = anneal_lambda2(iter, config.lambda2);
        const double eta = config.learning_rate.at(iter);
        const long shots = shot_mode ? config.shots_at(iter) : 0;
        if (shot_mode && shots != plan_shots) {
            plan = qsim::group_terms(union_obs, shots);
            sampler.emplace(union_obs, plan);
            plan_shots = shots;
        }

        // Forward generation and measurement, independent per sample.
        for_each_index(m_batch, [&](long m) {
            SampleEval& s = batch[m];
            Eigen::VectorXd theta0(n_params);
            {
                RandomStream rng =
                    substream(config.seed, "prior", key2(iter, m, m_batch));
                for (int i = 0; i < n_params; ++i) theta0(i) = rng.normal();
            }
            RandomStream eps =
                substream(config.seed, "latent", key2(iter, m, m_batch));
            s.net = generator::forward(params, shape, theta0, eps);
            s.theta.assign(s.net.theta.data(),
                           s.net.theta.data() + s.net.theta.size());
            s.state = ansatz::prepare(tmpl, s.theta);
            s.features.assign(specs.size(), {});
            if (shot_mode) {
                RandomStream rng =
                    substream(config.seed, "measure", key2(iter, m, m_batch));
                const auto means = sampler->sample(s.state, rng);
                double e = 0.0;
                for (std::size_t t = 0; t < h_count; ++t)
                    e += h.terms[t].coefficient * means[t];
                s.energy = e;
                for (std::size_t k = 0; k < specs.size(); ++k) {
                    const std::size_t off = spec_offset[k];
                    s.features[k].assign(
                        means.begin() + off,
                        means.begin() + off + specs[k].size());
                }
            } else {
                s.energy = qsim::expectation(s.state, h_c);
                for (std::size_t k = 0; k < specs.size(); ++k)
                    s.features[k] = features::compute_features(s.state, specs[k]);
            }
        });

        std::vector<double> energies(m_batch);
        std::vector<std::vector<FeatureVector>> feats(
            specs.size(), std::vector<FeatureVector>(m_batch));
        for (int m = 0; m < m_batch; ++m) {
            energies[m] = batch[m].energy;
            for (std::size_t k = 0; k < specs.size(); ++k)
                feats[k][m] = batch[m].features[k];
        }
        const BatchLoss loss = batch_loss(energies, feats, lambda1, lambda2);

        double fid = 0.0;
        for (int i = 0; i < m_batch; ++i)
            for (int j = i + 1; j < m_batch; ++j)
                fid += std::norm(
                    qsim::inner_product(batch[i].state, batch[j].state));
        fid *= 2.0 / (double(m_batch) * double(m_batch - 1));

        // dL/dtheta per sample.
        std::vector<std::vector<double>> dtheta(m_batch);
        if (config.mode == GradMode::EXACT) {
            const auto fgrads = diversity_feature_gradients(feats);
            for_each_index(m_batch, [&](long m) {
                std::vector<FeatureVector> coeffs;
                for (std::size_t k = 0; k < specs.size(); ++k)
                    coeffs.push_back(fgrads[k][m]);
                dtheta[m] = grad_circuit_params_exact(
                    tmpl, batch[m].theta, h_c, specs_c, coeffs,
                    lambda1 / double(m_batch), lambda2);
            });
        } else {
            std::vector<int> active;
            if (config.mode == GradMode::SHIFT_FULL) {
                active.resize(n_params);
                std::iota(active.begin(), active.end(), 0);
            } else {
                RandomStream rng = substream(config.seed, "active_set", iter);
                active = draw_active_set(n_params, config.active_params, rng);
            }

            std::vector<SimCache> sims;
            for (std::size_t k = 0; k < specs.size(); ++k)
                sims.push_back(build_sim_cache(feats[k]));
            const double energy_sum =
                std::accumulate(energies.begin(), energies.end(), 0.0);
            const double pair_scale =
                2.0 / (double(m_batch) * double(m_batch - 1));

            for_each_index(m_batch, [&](long m) {
                const auto cache = ansatz::prepare_cached(tmpl, batch[m].theta);
                const auto mats = ansatz::gate_matrices(tmpl, batch[m].theta);
                auto loss_at = [&](int slot, double value) {
                    const bool plus = value > batch[m].theta[slot];
                    const std::uint64_t key =
                        ((key2(iter, m, m_batch) * n_params) + slot) * 2 +
                        (plus ? 1 : 0);
                    RandomStream rng =
                        substream(config.seed, "shift_measure", key);
                    const auto psi = ansatz::prepare_modified(
                        tmpl, batch[m].theta, cache, mats, slot, value);
                    const auto means = sampler->sample(psi, rng);
                    double e = 0.0;
                    for (std::size_t t = 0; t < h_count; ++t)
                        e += h.terms[t].coefficient * means[t];
                    double div = 0.0;
                    for (std::size_t k = 0; k < specs.size(); ++k) {
                        const std::size_t off = spec_offset[k];
                        double dot = 0.0, n2 = 0.0;
                        const auto& loo = sims[k].loo_sum[m];
                        for (int t = 0; t < specs[k].size(); ++t) {
                            const double v = means[off + t];
                            dot += v * loo[t];
                            n2 += v * v;
                        }
                        const double n = std::sqrt(n2);
                        const double row =
                            n < features::norm_eps ? 0.0 : dot / n;
                        div += pair_scale *
                               (sims[k].total - sims[k].row[m] + row);
                    }
                    return lambda1 * (energy_sum - energies[m] + e) /
                               double(m_batch) +
                           lambda2 * div;
                };
                dtheta[m] = grad_stochastic_shift(tmpl, batch[m].theta, active,
                                                  loss_at);
            });
        }

        // Chain rule into the network weights; deterministic accumulation.
        GeneratorGrads total = GeneratorGrads::zeros(shape);
        for (int m = 0; m < m_batch; ++m) {
            Eigen::VectorXd up = Eigen::Map<const Eigen::VectorXd>(
                dtheta[m].data(), static_cast<Eigen::Index>(dtheta[m].size()));
            total.accumulate(
                generator::backward(params, shape, batch[m].net, up));
        }

        auto flat_params = generator::flatten(params);
        const auto flat_grads = generator::flatten(total);
        adam_step(flat_params, flat_grads, adam, eta);
        generator::unflatten(params, flat_params);

        IterationStats row;
        row.iteration = iter;
        row.mean_energy = loss.mean_energy;
        row.max_energy = loss.max_energy;
        row.l1_sim = loss.diversity.size() > 0 ? loss.diversity[0] : 0.0;
        row.l2_sim = loss.diversity.size() > 1 ? loss.diversity[1] : 0.0;
        row.mean_fidelity = fid;
        row.lambda2 = lambda2;
        row.shots = shots;
        row.eta = eta;
        log.push_back(row);

        if (!have_initial) {
            initial_mean_energy = loss.mean_energy;
            have_initial = true;
        }
        const double guard = 10.0 * std::max(std::abs(initial_mean_energy), 1.0);
        divergence_run = loss.mean_energy > guard ? divergence_run + 1 : 0;
        if (divergence_run >= 100)
            throw std::runtime_error(
                "train: diverged (mean energy above 10x initial for 100 "
                "consecutive iterations)");

        if (have_e0) {
            tracker.update(loss.mean_energy, loss.max_energy, e0);
        } else {
            // Stall criterion: no improvement of the running best for a
            // quarter of the iteration budget counts as converged.
            if (loss.mean_energy < best_energy - 1e-9) {
                best_energy = loss.mean_energy;
                best_energy_iter = iter;
            }
            if (iter - best_energy_iter > config.max_iterations / 4)
                tracker.hits = tracker.spec.required_hits;
        }

        if (config.checkpoint_interval > 0 &&
            (iter + 1) % config.checkpoint_interval == 0)
            save_ckpt(iter + 1, false, "last.ckpt");

        if (tracker.converged()) {
            converged = true;
            ++iter;
            break;
        }
    }

    save_ckpt(iter, converged, "last.ckpt");
    save_ckpt(iter, converged, "final.ckpt");

    TrainResult result;
    result.params = std::move(params);
    result.adam = std::move(adam);
    result.converged = converged;
    result.iterations = iter;
    result.e0_reference = have_e0 ? e0 : best_energy;
    result.log = std::move(log);
    return result;
}

} // namespace gqc::trainer

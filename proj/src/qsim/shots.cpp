#include "gqc/qsim/shots.hpp"

#include <array>
#include <bit>
#include <cmath>

namespace gqc::qsim {

bool term_compatible(const PauliTerm& term, const std::vector<Axis>& setting) {
    for (const auto& [site, axis] : term.ops)
        if (setting[site] != axis) return false;
    return true;
}

ShotPlan group_terms(const PauliSum& obs, long shots) {
    require(shots > 0, "group_terms: shots must be positive");
    ShotPlan plan;
    plan.n_qubits = obs.n_qubits;
    plan.shots_per_setting = shots;
    plan.assignment.resize(obs.terms.size(), -1);

    // Settings under construction: -1 marks an unconstrained site.
    std::vector<std::vector<int>> open;
    for (std::size_t t = 0; t < obs.terms.size(); ++t) {
        const auto& term = obs.terms[t];
        int found = -1;
        for (std::size_t s = 0; s < open.size(); ++s) {
            bool ok = true;
            for (const auto& [site, axis] : term.ops) {
                const int want = static_cast<int>(axis);
                if (open[s][site] != -1 && open[s][site] != want) {
                    ok = false;
                    break;
                }
            }
            if (ok) {
                found = static_cast<int>(s);
                break;
            }
        }
        if (found < 0) {
            open.emplace_back(obs.n_qubits, -1);
            found = static_cast<int>(open.size()) - 1;
        }
        for (const auto& [site, axis] : term.ops)
            open[found][site] = static_cast<int>(axis);
        plan.assignment[t] = found;
    }

    plan.settings.reserve(open.size());
    for (const auto& s : open) {
        std::vector<Axis> axes(obs.n_qubits, Axis::Z);
        for (int q = 0; q < obs.n_qubits; ++q)
            if (s[q] != -1) axes[q] = static_cast<Axis>(s[q]);
        plan.settings.push_back(std::move(axes));
    }
    return plan;
}

namespace {

constexpr double inv_sqrt2 = 0.70710678118654752440;

// Rotations taking the measured axis to Z: H for X, and the eigenbasis
// rotation of Y for Y.
constexpr std::array<cplx, 4> rot_x = {cplx{inv_sqrt2, 0}, cplx{inv_sqrt2, 0},
                                       cplx{inv_sqrt2, 0}, cplx{-inv_sqrt2, 0}};
constexpr std::array<cplx, 4> rot_y = {cplx{inv_sqrt2, 0}, cplx{0, -inv_sqrt2},
                                       cplx{inv_sqrt2, 0}, cplx{0, inv_sqrt2}};

} // namespace

std::vector<double> setting_probabilities(const StateVector& s,
                                          const std::vector<Axis>& setting) {
    require(static_cast<int>(setting.size()) == s.n_qubits,
            "setting_probabilities: size mismatch");
    StateVector rotated = s;
    for (int q = 0; q < s.n_qubits; ++q) {
        const int target[1] = {q};
        if (setting[q] == Axis::X)
            apply_dense_serial(rotated, rot_x, target);
        else if (setting[q] == Axis::Y)
            apply_dense_serial(rotated, rot_y, target);
    }
    std::vector<double> probs(rotated.dim());
    for (std::size_t b = 0; b < probs.size(); ++b)
        probs[b] = std::norm(rotated.amplitudes[b]);
    return probs;
}

void multinomial_counts_into(const std::vector<double>& probs, long shots,
                             RandomStream& rng, std::vector<long>& counts) {
    counts.assign(probs.size(), 0);
    long remaining = shots;
    double mass_left = 1.0;
    for (std::size_t b = 0; b + 1 < probs.size() && remaining > 0; ++b) {
        const double p = probs[b];
        if (p <= 0.0) continue;
        double cond = p / mass_left;
        if (cond > 1.0) cond = 1.0;
        const long c = rng.binomial(remaining, cond);
        counts[b] = c;
        remaining -= c;
        mass_left -= p;
        if (mass_left <= 0.0) break;
    }
    if (remaining > 0) counts.back() += remaining;
}

std::vector<long> multinomial_counts(const std::vector<double>& probs,
                                     long shots, RandomStream& rng) {
    std::vector<long> counts;
    multinomial_counts_into(probs, shots, rng, counts);
    return counts;
}

std::vector<double> sample_term_means(const StateVector& s, const PauliSum& obs,
                                      const ShotPlan& plan, RandomStream& rng) {
    require(s.n_qubits == obs.n_qubits && s.n_qubits == plan.n_qubits,
            "sample_term_means: size mismatch");
    require(plan.assignment.size() == obs.terms.size(),
            "sample_term_means: plan does not match observable");
    for (std::size_t t = 0; t < obs.terms.size(); ++t) {
        const int setting = plan.assignment[t];
        require(setting >= 0 && setting < plan.n_settings(),
                "sample_term_means: term not covered by any setting");
        require(term_compatible(obs.terms[t], plan.settings[setting]),
                "sample_term_means: term incompatible with its setting");
    }

    const long shots = plan.shots_per_setting;
    const double inv_shots = 1.0 / static_cast<double>(shots);

    std::vector<double> means(obs.terms.size(), 0.0);
    for (int set = 0; set < plan.n_settings(); ++set) {
        bool used = false;
        for (std::size_t t = 0; t < obs.terms.size(); ++t)
            if (plan.assignment[t] == set) used = true;
        if (!used) continue;

        const auto probs = setting_probabilities(s, plan.settings[set]);
        const auto counts = multinomial_counts(probs, shots, rng);

        for (std::size_t t = 0; t < obs.terms.size(); ++t) {
            if (plan.assignment[t] != set) continue;
            std::uint64_t mask = 0;
            for (const auto& [site, axis] : obs.terms[t].ops) {
                (void)axis;
                mask |= std::uint64_t{1} << site;
            }
            long acc = 0;
            for (std::size_t b = 0; b < counts.size(); ++b) {
                if (counts[b] == 0) continue;
                acc += (std::popcount(b & mask) & 1) ? -counts[b] : counts[b];
            }
            means[t] = static_cast<double>(acc) * inv_shots;
        }
    }
    return means;
}

ShotSampler::ShotSampler(const PauliSum& obs, const ShotPlan& plan)
    : n_qubits_(plan.n_qubits),
      shots_(plan.shots_per_setting),
      n_terms_(obs.terms.size()) {
    require(plan.assignment.size() == obs.terms.size(),
            "ShotSampler: plan does not match observable");
    settings_.resize(plan.settings.size());
    for (std::size_t set = 0; set < plan.settings.size(); ++set) {
        for (int q = 0; q < n_qubits_; ++q) {
            if (plan.settings[set][q] == Axis::X)
                settings_[set].rotations.emplace_back(q, false);
            else if (plan.settings[set][q] == Axis::Y)
                settings_[set].rotations.emplace_back(q, true);
        }
    }
    for (std::size_t t = 0; t < obs.terms.size(); ++t) {
        const int set = plan.assignment[t];
        require(set >= 0 && set < plan.n_settings(),
                "ShotSampler: term not covered by any setting");
        require(term_compatible(obs.terms[t], plan.settings[set]),
                "ShotSampler: term incompatible with its setting");
        std::uint64_t mask = 0;
        for (const auto& [site, axis] : obs.terms[t].ops) {
            (void)axis;
            mask |= std::uint64_t{1} << site;
        }
        TermRef ref;
        ref.term = static_cast<int>(t);
        ref.sign.resize(dim_of(n_qubits_));
        for (std::size_t b = 0; b < ref.sign.size(); ++b)
            ref.sign[b] = (std::popcount(b & mask) & 1) ? -1 : 1;
        settings_[set].terms.push_back(std::move(ref));
    }
}

std::vector<double> ShotSampler::sample(const StateVector& s,
                                        RandomStream& rng) const {
    require(s.n_qubits == n_qubits_, "ShotSampler: size mismatch");
    const std::size_t dim = s.dim();
    std::vector<cplx> rotated(dim);
    std::vector<double> probs(dim);
    std::vector<long> counts;
    std::vector<double> means(n_terms_, 0.0);
    const double inv_shots = 1.0 / static_cast<double>(shots_);

    for (const auto& setting : settings_) {
        if (setting.terms.empty()) continue;
        std::copy(s.amplitudes.begin(), s.amplitudes.end(), rotated.begin());
        for (const auto& [q, is_y] : setting.rotations) {
            const std::size_t stride = std::size_t{1} << q;
            for (std::size_t g = 0; g < dim; g += 2 * stride) {
                for (std::size_t i = g; i < g + stride; ++i) {
                    const cplx a0 = rotated[i], a1 = rotated[i + stride];
                    const cplx c0 = inv_sqrt2 * a0;
                    if (is_y) {
                        const cplx c1{inv_sqrt2 * a1.imag(),
                                      -inv_sqrt2 * a1.real()};
                        rotated[i] = c0 + c1;
                        rotated[i + stride] = c0 - c1;
                    } else {
                        const cplx c1 = inv_sqrt2 * a1;
                        rotated[i] = c0 + c1;
                        rotated[i + stride] = c0 - c1;
                    }
                }
            }
        }
        for (std::size_t b = 0; b < dim; ++b) probs[b] = std::norm(rotated[b]);
        multinomial_counts_into(probs, shots_, rng, counts);
        for (const auto& [term, sign] : setting.terms) {
            long acc = 0;
            for (std::size_t b = 0; b < dim; ++b)
                acc += sign[b] * counts[b];
            means[term] = static_cast<double>(acc) * inv_shots;
        }
    }
    return means;
}

double estimate_shots(const StateVector& s, const PauliSum& obs,
                      const ShotPlan& plan, RandomStream& rng) {
    const auto means = sample_term_means(s, obs, plan, rng);
    double acc = 0.0;
    for (std::size_t t = 0; t < obs.terms.size(); ++t)
        acc += obs.terms[t].coefficient * means[t];
    return acc;
}

double estimate_shots(const StateVector& s, const PauliSum& obs,
                      const ShotPlan& plan, std::uint64_t seed) {
    RandomStream rng = substream(seed, "estimate_shots");
    return estimate_shots(s, obs, plan, rng);
}

} // namespace gqc::qsim

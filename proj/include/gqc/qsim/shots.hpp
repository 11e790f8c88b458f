#pragma once

#include <vector>

#include "gqc/qsim/pauli.hpp"
#include "gqc/qsim/state.hpp"
#include "gqc/rng.hpp"

namespace gqc::qsim {

// Measurement plan: each setting fixes one Pauli axis per qubit; every term
// is assigned to a setting it is qubit-wise compatible with.
struct ShotPlan {
    int n_qubits = 0;
    long shots_per_setting = 0;
    std::vector<std::vector<Axis>> settings; // axis per qubit
    std::vector<int> assignment;             // term index -> setting index

    int n_settings() const { return static_cast<int>(settings.size()); }
};

// Greedy first-fit grouping into qubit-wise-commuting settings.
ShotPlan group_terms(const PauliSum& obs, long shots);

bool term_compatible(const PauliTerm& term, const std::vector<Axis>& setting);

// Per-term sample means <P_t> under the plan, one multinomial draw per
// setting. Terms sharing a setting are estimated from the same samples.
std::vector<double> sample_term_means(const StateVector& s, const PauliSum& obs,
                                      const ShotPlan& plan, RandomStream& rng);

// Finite-shot estimate of <obs>: sum of coefficient-weighted term means.
double estimate_shots(const StateVector& s, const PauliSum& obs,
                      const ShotPlan& plan, RandomStream& rng);
double estimate_shots(const StateVector& s, const PauliSum& obs,
                      const ShotPlan& plan, std::uint64_t seed);

// Precompiled sampler for repeated estimation of one observable under one
// plan; per-setting rotations and term masks are resolved once.
class ShotSampler {
  public:
    ShotSampler(const PauliSum& obs, const ShotPlan& plan);

    // Same statistics as sample_term_means.
    std::vector<double> sample(const StateVector& s, RandomStream& rng) const;

  private:
    struct TermRef {
        int term;
        std::vector<std::int8_t> sign; // parity sign per outcome
    };
    struct Setting {
        std::vector<std::pair<int, bool>> rotations; // (qubit, axis==Y)
        std::vector<TermRef> terms;
    };
    int n_qubits_ = 0;
    long shots_ = 0;
    std::size_t n_terms_ = 0;
    std::vector<Setting> settings_;
};

// As multinomial_counts, writing into a caller-provided buffer.
void multinomial_counts_into(const std::vector<double>& probs, long shots,
                             RandomStream& rng, std::vector<long>& counts);

// Outcome probabilities of `s` measured in `setting` (basis rotation applied
// to a copy). Exposed for variance analysis in tests.
std::vector<double> setting_probabilities(const StateVector& s,
                                          const std::vector<Axis>& setting);

// Multinomial counts for `shots` draws over `probs` (conditional binomials).
std::vector<long> multinomial_counts(const std::vector<double>& probs,
                                     long shots, RandomStream& rng);

} // namespace gqc::qsim

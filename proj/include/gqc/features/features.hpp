#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "gqc/qsim/shots.hpp"
#include "gqc/qsim/state.hpp"

namespace gqc::features {

using qsim::Axis;
using qsim::PauliSum;
using qsim::ShotPlan;
using qsim::StateVector;

enum class FeatureKind { ONE_BODY, TWO_BODY_NN, TWO_BODY_EDGE };

std::string feature_kind_name(FeatureKind k);
FeatureKind feature_kind_from_name(const std::string& name);

// Ordered list of unit-coefficient Pauli terms a feature vector expands to.
// ONE_BODY: 3N single-site terms, site-major with axes x,y,z.
// TWO_BODY_NN: 9N terms over pairs (i, i+1) including the wrap pair (N-1, 0),
// pair-major with the 9 (alpha, beta) combinations.
// TWO_BODY_EDGE: 27 terms over pairs (0,1), (N-2,N-1), (N-1,0).
struct FeatureSpec {
    FeatureKind kind;
    int n_qubits = 0;
    PauliSum terms;

    int size() const { return static_cast<int>(terms.terms.size()); }
    static FeatureSpec make(FeatureKind kind, int n_qubits);
};

using FeatureVector = std::vector<double>;

constexpr double norm_eps = 1e-12;

FeatureVector compute_features(const StateVector& s, const FeatureSpec& spec);
FeatureVector compute_features(const StateVector& s, const FeatureSpec& spec,
                               const ShotPlan& plan, RandomStream& rng);

// <a,b>/(|a||b|), clamped to [-1, 1]. A vector with norm below norm_eps is
// degenerate: the similarity is defined as 0 and *degenerate is set.
double cosine_similarity(const FeatureVector& a, const FeatureVector& b,
                         bool* degenerate = nullptr);

// Batch-mean pairwise cosine similarity, 2/(M(M-1)) * sum over i<j.
double batch_diversity_loss(const std::vector<FeatureVector>& batch);

Eigen::MatrixXd similarity_matrix(const std::vector<FeatureVector>& vectors);

// Row-major CSV with a header row (column labels c0..c{n-1}).
void write_matrix_csv(const Eigen::MatrixXd& m, const std::string& path);

} // namespace gqc::features

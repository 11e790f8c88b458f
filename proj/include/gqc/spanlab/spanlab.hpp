#pragma once

#include <Eigen/Dense>
#include <optional>
#include <string>
#include <vector>

#include "gqc/common.hpp"

namespace gqc::spanlab {

enum class OverlapVariant { AMP_SUM, PROB_SUM };

std::string overlap_variant_name(OverlapVariant v);
OverlapVariant overlap_variant_from_name(const std::string& name);

// p_G(psi): AMP_SUM is sum_i |<g_i|psi>|, PROB_SUM is sum_i |<g_i|psi>|^2
// (the squared norm of the projection, in [0, 1]).
double overlap_score(const Eigen::VectorXcd& psi, const Eigen::MatrixXcd& basis,
                     OverlapVariant variant);

struct AcceptThresholds {
    double delta_e_rel = 0.005;
    OverlapVariant variant = OverlapVariant::AMP_SUM;
    double overlap_cut = 0.995;
};

struct Acceptance {
    std::vector<int> indices; // accepted columns, in input order
    double rate = 0.0;
    bool empty = false; // flagged, not fatal
};

Acceptance accept(const Eigen::VectorXd& energies,
                  const Eigen::MatrixXcd& states, double e0,
                  const Eigen::MatrixXcd& basis, const AcceptThresholds& thr);

struct RankResult {
    int rank = 0;
    Eigen::VectorXd normalized_singular_values;
};

// Count of sigma_i/sigma_1 > eps; values below 1e-14*sigma_1 are zeroed first.
RankResult tolerance_rank(const Eigen::MatrixXcd& c, double eps);
RankResult tolerance_rank(const Eigen::VectorXd& singular_values, double eps);

struct SpanMetrics {
    int rank_eps = 0;
    Eigen::VectorXd normalized_singular_values;
    Eigen::VectorXd angles; // principal angles, radians, in [0, pi/2]
    double mean_angle = 0.0;
    double max_angle = 0.0;
    double chordal_sq = 0.0;
    double acceptance_rate = 0.0;
    bool incomplete_span = false;
};

// Principal angles between span(C) (top-r left singular vectors) and the
// orthonormal basis U: cos(alpha_k) = sigma_k(X^dag U).
SpanMetrics principal_angles(const Eigen::MatrixXcd& c,
                             const Eigen::MatrixXcd& basis, int r);

// |<g_j|psi_i>| magnitudes, one row per state, one column per basis vector.
Eigen::MatrixXd overlap_distribution(const Eigen::MatrixXcd& states,
                                     const Eigen::MatrixXcd& basis);

// Greedy search for k states with pairwise overlap magnitude below the cap.
std::optional<std::vector<int>> orthogonal_subset(const Eigen::MatrixXcd& states,
                                                  int k, double overlap_cap);

} // namespace gqc::spanlab

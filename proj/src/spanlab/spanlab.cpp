#include "gqc/spanlab/spanlab.hpp"

#include <algorithm>
#include <cmath>

namespace gqc::spanlab {

std::string overlap_variant_name(OverlapVariant v) {
    return v == OverlapVariant::AMP_SUM ? "amp_sum" : "prob_sum";
}

OverlapVariant overlap_variant_from_name(const std::string& name) {
    if (name == "amp_sum") return OverlapVariant::AMP_SUM;
    if (name == "prob_sum") return OverlapVariant::PROB_SUM;
    throw input_error("unknown overlap variant: " + name);
}

namespace {

void check_orthonormal(const Eigen::MatrixXcd& basis) {
    const Eigen::MatrixXcd gram = basis.adjoint() * basis;
    const double err =
        (gram - Eigen::MatrixXcd::Identity(basis.cols(), basis.cols()))
            .cwiseAbs()
            .maxCoeff();
    require(err < 1e-8, "basis columns are not orthonormal");
}

} // namespace

double overlap_score(const Eigen::VectorXcd& psi, const Eigen::MatrixXcd& basis,
                     OverlapVariant variant) {
    require(psi.size() == basis.rows(), "overlap_score: dimension mismatch");
    check_orthonormal(basis);
    const Eigen::VectorXcd amps = basis.adjoint() * psi;
    double acc = 0.0;
    for (Eigen::Index i = 0; i < amps.size(); ++i) {
        const double a = std::abs(amps(i));
        acc += variant == OverlapVariant::AMP_SUM ? a : a * a;
    }
    return acc;
}

Acceptance accept(const Eigen::VectorXd& energies,
                  const Eigen::MatrixXcd& states, double e0,
                  const Eigen::MatrixXcd& basis, const AcceptThresholds& thr) {
    require(energies.size() == states.cols(), "accept: count mismatch");
    check_orthonormal(basis);
    Acceptance out;
    const double e_scale = std::abs(e0);
    require(e_scale > 0.0, "accept: reference energy must be nonzero");
    for (Eigen::Index i = 0; i < states.cols(); ++i) {
        const double de = std::abs(energies(i) - e0) / e_scale;
        if (de >= thr.delta_e_rel) continue;
        const double p = overlap_score(states.col(i), basis, thr.variant);
        if (p <= thr.overlap_cut) continue;
        out.indices.push_back(static_cast<int>(i));
    }
    out.rate = states.cols() > 0
                   ? double(out.indices.size()) / double(states.cols())
                   : 0.0;
    out.empty = out.indices.empty();
    return out;
}

RankResult tolerance_rank(const Eigen::VectorXd& singular_values, double eps) {
    require(singular_values.size() > 0, "tolerance_rank: no singular values");
    const double s1 = singular_values(0);
    require(s1 > 0.0, "tolerance_rank: zero matrix");
    RankResult out;
    std::vector<double> kept;
    for (Eigen::Index i = 0; i < singular_values.size(); ++i) {
        double s = singular_values(i);
        if (s < 1e-14 * s1) s = 0.0;
        kept.push_back(s / s1);
    }
    out.normalized_singular_values =
        Eigen::Map<Eigen::VectorXd>(kept.data(), kept.size());
    out.rank = 0;
    for (double s : kept)
        if (s > eps) ++out.rank;
    return out;
}

RankResult tolerance_rank(const Eigen::MatrixXcd& c, double eps) {
    require(c.size() > 0 && c.cwiseAbs().maxCoeff() > 0.0,
            "tolerance_rank: zero matrix");
    Eigen::BDCSVD<Eigen::MatrixXcd> svd(c);
    return tolerance_rank(svd.singularValues(), eps);
}

SpanMetrics principal_angles(const Eigen::MatrixXcd& c,
                             const Eigen::MatrixXcd& basis, int r) {
    require(r >= 1, "principal_angles: r must be positive");
    require(basis.cols() == r, "principal_angles: basis must have r columns");
    require(c.rows() == basis.rows(), "principal_angles: dimension mismatch");
    check_orthonormal(basis);

    Eigen::BDCSVD<Eigen::MatrixXcd> svd(c, Eigen::ComputeThinU);
    const Eigen::VectorXd sig = svd.singularValues();

    // If the ensemble offers fewer than r usable directions the span is
    // incomplete; missing directions count as maximally misaligned (pi/2).
    const int q = static_cast<int>(std::min<Eigen::Index>(sig.size(), r));
    SpanMetrics m;
    m.incomplete_span = q < r || sig(q - 1) < 1e-10 * sig(0);

    const Eigen::MatrixXcd x = svd.matrixU().leftCols(q);
    Eigen::BDCSVD<Eigen::MatrixXcd> cross(x.adjoint() * basis);
    const Eigen::VectorXd cosines = cross.singularValues();

    m.angles.resize(r);
    m.chordal_sq = 0.0;
    for (int k = 0; k < r; ++k) {
        const double ck =
            k < q ? std::clamp(cosines(k), 0.0, 1.0) : 0.0;
        m.angles(k) = std::acos(ck);
        m.chordal_sq += 1.0 - ck * ck; // sin^2
    }
    m.mean_angle = m.angles.mean();
    m.max_angle = m.angles.maxCoeff();
    return m;
}

Eigen::MatrixXd overlap_distribution(const Eigen::MatrixXcd& states,
                                     const Eigen::MatrixXcd& basis) {
    const Eigen::MatrixXcd amps = basis.adjoint() * states; // r x M
    return amps.cwiseAbs().transpose();                     // M x r
}

std::optional<std::vector<int>> orthogonal_subset(const Eigen::MatrixXcd& states,
                                                  int k, double overlap_cap) {
    require(k >= 1 && k <= states.cols(), "orthogonal_subset: bad subset size");
    std::vector<int> chosen;
    for (Eigen::Index i = 0; i < states.cols() && (int)chosen.size() < k; ++i) {
        bool ok = true;
        for (int j : chosen) {
            const double ov =
                std::abs((states.col(j).adjoint() * states.col(i))(0, 0));
            if (ov > overlap_cap) {
                ok = false;
                break;
            }
        }
        if (ok) chosen.push_back(static_cast<int>(i));
    }
    if ((int)chosen.size() < k) return std::nullopt;
    return chosen;
}

} // namespace gqc::spanlab

#include "gqc/features/features.hpp"

#include <cmath>
#include <fstream>

namespace gqc::features {

std::string feature_kind_name(FeatureKind k) {
    switch (k) {
        case FeatureKind::ONE_BODY: return "one_body";
        case FeatureKind::TWO_BODY_NN: return "two_body_nn";
        case FeatureKind::TWO_BODY_EDGE: return "two_body_edge";
    }
    return "?";
}

FeatureKind feature_kind_from_name(const std::string& name) {
    if (name == "one_body") return FeatureKind::ONE_BODY;
    if (name == "two_body_nn") return FeatureKind::TWO_BODY_NN;
    if (name == "two_body_edge") return FeatureKind::TWO_BODY_EDGE;
    throw input_error("unknown feature kind: " + name);
}

FeatureSpec FeatureSpec::make(FeatureKind kind, int n_qubits) {
    require(n_qubits >= 2, "FeatureSpec: need at least 2 qubits");
    FeatureSpec spec;
    spec.kind = kind;
    spec.n_qubits = n_qubits;
    spec.terms = PauliSum(n_qubits);
    const Axis axes[3] = {Axis::X, Axis::Y, Axis::Z};
    switch (kind) {
        case FeatureKind::ONE_BODY:
            for (int i = 0; i < n_qubits; ++i)
                for (Axis a : axes) spec.terms.add(1.0, {{i, a}});
            break;
        case FeatureKind::TWO_BODY_NN:
            for (int i = 0; i < n_qubits; ++i) {
                const int j = (i + 1) % n_qubits;
                for (Axis a : axes)
                    for (Axis b : axes) spec.terms.add(1.0, {{i, a}, {j, b}});
            }
            break;
        case FeatureKind::TWO_BODY_EDGE:
            for (auto [i, j] : {std::pair{0, 1},
                                {n_qubits - 2, n_qubits - 1},
                                {n_qubits - 1, 0}}) {
                for (Axis a : axes)
                    for (Axis b : axes) spec.terms.add(1.0, {{i, a}, {j, b}});
            }
            break;
    }
    return spec;
}

FeatureVector compute_features(const StateVector& s, const FeatureSpec& spec) {
    require(s.n_qubits == spec.n_qubits, "compute_features: size mismatch");
    const auto compiled = qsim::compile(spec.terms);
    FeatureVector v(compiled.terms.size());
    for (std::size_t t = 0; t < compiled.terms.size(); ++t)
        v[t] = qsim::expectation_term(s, compiled.terms[t]);
    return v;
}

FeatureVector compute_features(const StateVector& s, const FeatureSpec& spec,
                               const ShotPlan& plan, RandomStream& rng) {
    require(s.n_qubits == spec.n_qubits, "compute_features: size mismatch");
    return qsim::sample_term_means(s, spec.terms, plan, rng);
}

double cosine_similarity(const FeatureVector& a, const FeatureVector& b,
                         bool* degenerate) {
    require(a.size() == b.size(), "cosine_similarity: length mismatch");
    double dot = 0.0, na = 0.0, nb = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        dot += a[i] * b[i];
        na += a[i] * a[i];
        nb += b[i] * b[i];
    }
    na = std::sqrt(na);
    nb = std::sqrt(nb);
    if (na < norm_eps || nb < norm_eps) {
        if (degenerate) *degenerate = true;
        return 0.0;
    }
    const double sim = dot / (na * nb);
    return std::clamp(sim, -1.0, 1.0);
}

double batch_diversity_loss(const std::vector<FeatureVector>& batch) {
    const std::size_t m = batch.size();
    require(m >= 2, "batch_diversity_loss: need at least 2 vectors");
    double acc = 0.0;
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = i + 1; j < m; ++j)
            acc += cosine_similarity(batch[i], batch[j]);
    return 2.0 * acc / (static_cast<double>(m) * static_cast<double>(m - 1));
}

Eigen::MatrixXd similarity_matrix(const std::vector<FeatureVector>& vectors) {
    require(!vectors.empty(), "similarity_matrix: need at least 1 vector");
    const int m = static_cast<int>(vectors.size());
    Eigen::MatrixXd out(m, m);
    for (int i = 0; i < m; ++i) {
        out(i, i) = cosine_similarity(vectors[i], vectors[i]);
        for (int j = i + 1; j < m; ++j) {
            out(i, j) = cosine_similarity(vectors[i], vectors[j]);
            out(j, i) = out(i, j);
        }
    }
    return out;
}

void write_matrix_csv(const Eigen::MatrixXd& m, const std::string& path) {
    std::ofstream f(path);
    require(f.good(), "write_matrix_csv: cannot open " + path);
    for (Eigen::Index c = 0; c < m.cols(); ++c)
        f << (c ? "," : "") << "c" << c;
    f << "\n";
    f.precision(17);
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
        for (Eigen::Index c = 0; c < m.cols(); ++c)
            f << (c ? "," : "") << m(r, c);
        f << "\n";
    }
}

} // namespace gqc::features

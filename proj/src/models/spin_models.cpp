#include "gqc/models/spin_models.hpp"

#include <algorithm>
#include <bit>
#include <cmath>

namespace gqc::models {

using qsim::PauliTerm;

std::string model_name(SpinModel m) {
    switch (m) {
        case SpinModel::MG: return "mg";
        case SpinModel::AKLT: return "aklt";
        case SpinModel::XXZ: return "xxz";
    }
    return "?";
}

SpinModel model_from_name(const std::string& name) {
    if (name == "mg") return SpinModel::MG;
    if (name == "aklt") return SpinModel::AKLT;
    if (name == "xxz") return SpinModel::XXZ;
    throw input_error("unknown model name: " + name);
}

PauliSum SpinModelSpec::hamiltonian() const {
    switch (model) {
        case SpinModel::MG: return build_mg(n_sites);
        case SpinModel::AKLT: return build_aklt_encoded(n_sites);
        case SpinModel::XXZ: return build_xxz_encoded(n_sites, delta);
    }
    throw input_error("invalid model");
}

std::string SpinModelSpec::label() const {
    std::string s = model_name(model) + "_n" + std::to_string(n_sites);
    if (model == SpinModel::XXZ) s += "_d" + std::to_string(delta);
    return s;
}

PauliSum build_mg(int n_qubits) {
    require(n_qubits >= 3, "build_mg: need at least 3 sites");
    PauliSum h(n_qubits);
    for (int i = 0; i + 2 < n_qubits; ++i) {
        for (auto [a, b] : {std::pair{i, i + 1}, {i + 1, i + 2}, {i, i + 2}}) {
            for (Axis ax : {Axis::X, Axis::Y, Axis::Z})
                h.add(1.0, {{a, ax}, {b, ax}});
        }
    }
    h.canonicalize();
    return h;
}

namespace {

// S'_a on encoded site p (qubits 2p, 2p+1) as a Pauli sum.
PauliSum pair_spin_operator(int n_qubits, int pair_index, Axis axis) {
    PauliSum s(n_qubits);
    s.add(0.5, {{2 * pair_index, axis}});
    s.add(0.5, {{2 * pair_index + 1, axis}});
    return s;
}

PauliSum bond_bilinear(int n_qubits, int p, int q) {
    PauliSum acc(n_qubits);
    for (Axis ax : {Axis::X, Axis::Y, Axis::Z}) {
        acc += multiply(pair_spin_operator(n_qubits, p, ax),
                        pair_spin_operator(n_qubits, q, ax));
    }
    acc.canonicalize();
    return acc;
}

} // namespace

std::array<cplx, 16> encode_spin1_pair_operator(Axis axis) {
    // sigma matrices in the |q> basis {0,1}
    const cplx I{0.0, 1.0};
    std::array<cplx, 4> sig{};
    switch (axis) {
        case Axis::X: sig = {0.0, 1.0, 1.0, 0.0}; break;
        case Axis::Y: sig = {0.0, -I, I, 0.0}; break;
        case Axis::Z: sig = {1.0, 0.0, 0.0, -1.0}; break;
    }
    std::array<cplx, 16> out{};
    // (sig (x) I + I (x) sig) / 2 over |hi lo>
    for (int r = 0; r < 4; ++r) {
        for (int c = 0; c < 4; ++c) {
            const int rh = r >> 1, rl = r & 1, ch = c >> 1, cl = c & 1;
            cplx v = 0.0;
            if (rl == cl) v += sig[rh * 2 + ch];
            if (rh == ch) v += sig[rl * 2 + cl];
            out[r * 4 + c] = 0.5 * v;
        }
    }
    return out;
}

PauliSum build_aklt_encoded(int n_prime) {
    require(n_prime >= 2, "build_aklt_encoded: need at least 2 sites");
    const int n = 2 * n_prime;
    PauliSum h(n);
    for (int i = 0; i + 1 < n_prime; ++i) {
        PauliSum bl = bond_bilinear(n, i, i + 1);
        PauliSum sq = multiply(bl, bl);
        sq *= 1.0 / 3.0;
        h += bl;
        h += sq;
    }
    h.canonicalize();
    return h;
}

PauliSum build_xxz_encoded(int n_prime, double delta) {
    require(n_prime >= 2, "build_xxz_encoded: need at least 2 sites");
    const int n = 2 * n_prime;
    PauliSum h(n);
    for (int i = 0; i + 1 < n_prime; ++i) {
        for (Axis ax : {Axis::X, Axis::Y, Axis::Z}) {
            PauliSum bond = multiply(pair_spin_operator(n, i, ax),
                                     pair_spin_operator(n, i + 1, ax));
            if (ax == Axis::Z) bond *= delta;
            h += bond;
        }
    }
    h.canonicalize();
    return h;
}

PauliSum pair_singlet_projector(int n_qubits, int pair_index) {
    // |s><s| = (1 - x.x - y.y - z.z on the pair) / 4
    const int a = 2 * pair_index, b = 2 * pair_index + 1;
    PauliSum p(n_qubits);
    p.add(0.25, {});
    for (Axis ax : {Axis::X, Axis::Y, Axis::Z})
        p.add(-0.25, {{a, ax}, {b, ax}});
    return p;
}

Eigen::MatrixXcd dense_matrix(const PauliSum& h) {
    const std::size_t d = dim_of(h.n_qubits);
    require(d <= 4096, "dense_matrix: dimension exceeds 4096");
    const auto compiled = qsim::compile(h);
    static constexpr cplx i_pow[4] = {{1, 0}, {0, 1}, {-1, 0}, {0, -1}};
    Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(d, d);
    for (const auto& t : compiled.terms) {
        const cplx scale = t.coeff * i_pow[t.y_mod4];
        for (std::size_t b = 0; b < d; ++b) {
            const double sign = (std::popcount(b & t.zy) & 1) ? -1.0 : 1.0;
            m(b ^ t.flip, b) += scale * sign;
        }
    }
    return m;
}

GroundSpace exact_diagonalize(const PauliSum& h, double degeneracy_tol) {
    const std::size_t d = dim_of(h.n_qubits);
    if (d > 4096)
        throw capability_error("exact_diagonalize: dimension exceeds 4096");
    require(degeneracy_tol != 0.0, "exact_diagonalize: tolerance must be nonzero");

    Eigen::VectorXd evals;
    Eigen::MatrixXcd evecs;
    if (h.is_real()) {
        // Real symmetric path: every term has an even Y count.
        const Eigen::MatrixXcd mc = dense_matrix(h);
        ensure(mc.imag().cwiseAbs().maxCoeff() < 1e-12,
               "exact_diagonalize: expected a real matrix");
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(mc.real());
        ensure(solver.info() == Eigen::Success, "eigensolver failed");
        evals = solver.eigenvalues();
        evecs = solver.eigenvectors().cast<cplx>();
    } else {
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(dense_matrix(h));
        ensure(solver.info() == Eigen::Success, "eigensolver failed");
        evals = solver.eigenvalues();
        evecs = solver.eigenvectors();
    }

    const double width = evals(evals.size() - 1) - evals(0);
    const double tol = (degeneracy_tol > 0.0 ? degeneracy_tol : 1e-6) *
                       std::max(width, 1.0);

    GroundSpace gs;
    gs.energy = evals(0);
    int r = 0;
    while (r < evals.size() && evals(r) - evals(0) <= tol) ++r;
    gs.degeneracy = r;
    gs.basis = evecs.leftCols(r);
    return gs;
}

namespace {

// Product state of singlets on `bonds` and fixed computational values on
// `free_sites`. Bit b of the index is site b; |0> is spin up.
Eigen::VectorXcd dimer_state(int n, const std::vector<std::pair<int, int>>& bonds,
                             const std::vector<std::pair<int, int>>& free_sites) {
    const std::size_t d = dim_of(n);
    Eigen::VectorXcd v = Eigen::VectorXcd::Zero(d);
    const double w = std::pow(1.0 / std::sqrt(2.0), bonds.size());
    const std::size_t combos = std::size_t{1} << bonds.size();
    std::size_t base = 0;
    for (const auto& [site, value] : free_sites)
        if (value) base |= std::size_t{1} << site;
    for (std::size_t c = 0; c < combos; ++c) {
        std::size_t idx = base;
        double sign = 1.0;
        for (std::size_t j = 0; j < bonds.size(); ++j) {
            // singlet (|01> - |10>)/sqrt2 on (a, b) with a < b
            const auto& [a, b] = bonds[j];
            if ((c >> j) & 1) {
                idx |= std::size_t{1} << b; // |0_a 1_b>
            } else {
                idx |= std::size_t{1} << a; // |1_a 0_b>
                sign = -sign;
            }
        }
        v(idx) = sign * w;
    }
    return v;
}

} // namespace

Eigen::MatrixXcd mg_reference_basis(int n_qubits, const GroundSpace& gs) {
    const int n = n_qubits;
    require(n >= 3, "mg_reference_basis: need at least 3 sites");
    std::vector<Eigen::VectorXcd> raw;

    if (n % 2 == 1) {
        // coverings: (0,1)(2,3)... free last; (1,2)(3,4)... free first
        std::vector<std::pair<int, int>> a_bonds, b_bonds;
        for (int i = 0; i + 1 < n - 1; i += 2) a_bonds.emplace_back(i, i + 1);
        for (int i = 1; i + 1 < n; i += 2) b_bonds.emplace_back(i, i + 1);
        for (int spin : {0, 1})
            raw.push_back(dimer_state(n, a_bonds, {{n - 1, spin}}));
        for (int spin : {0, 1})
            raw.push_back(dimer_state(n, b_bonds, {{0, spin}}));
    } else {
        std::vector<std::pair<int, int>> a_bonds, b_bonds;
        for (int i = 0; i + 1 < n; i += 2) a_bonds.emplace_back(i, i + 1);
        for (int i = 1; i + 1 < n - 1; i += 2) b_bonds.emplace_back(i, i + 1);
        raw.push_back(dimer_state(n, a_bonds, {}));
        for (int s0 : {0, 1})
            for (int s1 : {0, 1})
                raw.push_back(dimer_state(n, b_bonds, {{0, s0}, {n - 1, s1}}));
    }

    ensure(static_cast<int>(raw.size()) == gs.degeneracy,
           "mg_reference_basis: covering count does not match degeneracy");

    // Each covering state must already lie in the ED ground space.
    const Eigen::MatrixXcd& u = gs.basis;
    for (const auto& v : raw) {
        const double residual = (v - u * (u.adjoint() * v)).norm();
        ensure(residual < 1e-8, "mg_reference_basis: covering outside ground space");
    }

    // Gram-Schmidt in the canonical order.
    Eigen::MatrixXcd q(raw[0].size(), raw.size());
    int cols = 0;
    for (const auto& v : raw) {
        Eigen::VectorXcd w = v;
        for (int j = 0; j < cols; ++j) w -= q.col(j) * (q.col(j).adjoint() * v);
        const double nrm = w.norm();
        ensure(nrm > 1e-8, "mg_reference_basis: coverings linearly dependent");
        q.col(cols++) = w / nrm;
    }
    return q;
}

} // namespace gqc::models

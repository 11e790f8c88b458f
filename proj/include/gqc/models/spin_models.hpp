#pragma once

#include <Eigen/Dense>
#include <array>
#include <string>

#include "gqc/qsim/pauli.hpp"

namespace gqc::models {

using qsim::Axis;
using qsim::PauliSum;

enum class SpinModel { MG, AKLT, XXZ };

std::string model_name(SpinModel m);
SpinModel model_from_name(const std::string& name);

// Which spin chain to build. For MG, n_sites is the qubit count N; for the
// spin-1 models it is the qutrit count N', encoded into 2*N' qubits.
struct SpinModelSpec {
    SpinModel model = SpinModel::MG;
    int n_sites = 0;
    double delta = -1.0; // XXZ anisotropy

    int n_qubits() const {
        return model == SpinModel::MG ? n_sites : 2 * n_sites;
    }
    PauliSum hamiltonian() const;
    std::string label() const;
};

// Majumdar-Ghosh chain, open boundaries, Pauli (not spin-1/2) operators:
// sum over i of sigma_i.sigma_{i+1} + sigma_{i+1}.sigma_{i+2} + sigma_i.sigma_{i+2}.
PauliSum build_mg(int n_qubits);

// Effective spin-1 operator on one qubit pair:
// S'_a = (sigma_a (x) I + I (x) sigma_a) / 2. Row-major 4x4 in the
// |q_hi q_lo> pair basis. Annihilates the pair singlet and acts as the
// spin-1 operator on the triplet under |0>->|00>, |1>->(|01>+|10>)/sqrt2,
// |2>->|11>.
std::array<cplx, 16> encode_spin1_pair_operator(Axis axis);

// Encoded AKLT chain on 2*n_prime qubits:
// sum_i S'_i.S'_{i+1} + (1/3)(S'_i.S'_{i+1})^2.
PauliSum build_aklt_encoded(int n_prime);

// Encoded spin-1 XXZ chain on 2*n_prime qubits:
// sum_i S'^x_i S'^x_{i+1} + S'^y_i S'^y_{i+1} + delta * S'^z_i S'^z_{i+1}.
PauliSum build_xxz_encoded(int n_prime, double delta);

// Projector onto the two-qubit singlet of the pair (2i, 2i+1).
PauliSum pair_singlet_projector(int n_qubits, int pair_index);

struct GroundSpace {
    double energy = 0.0;
    int degeneracy = 0;
    Eigen::MatrixXcd basis; // dim x degeneracy, orthonormal columns
};

// Dense Hermitian eigensolve. degeneracy_tol < 0 selects the default of
// 1e-6 relative to the spectral width.
GroundSpace exact_diagonalize(const PauliSum& h, double degeneracy_tol = -1.0);

// Dense matrix of a PauliSum (row-major basis index = qubit bits).
Eigen::MatrixXcd dense_matrix(const PauliSum& h);

// Deterministic orthonormal basis of the MG ground space built from the
// canonical dimer coverings, ordered from the covering that pairs (0,1) first.
// Columns orthonormalized in a fixed order; spans the same space as `gs`.
Eigen::MatrixXcd mg_reference_basis(int n_qubits, const GroundSpace& gs);

} // namespace gqc::models

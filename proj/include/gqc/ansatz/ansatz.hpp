#pragma once

#include <span>
#include <string>
#include <vector>

#include "gqc/qsim/pauli.hpp"
#include "gqc/qsim/state.hpp"

namespace gqc::ansatz {

using qsim::Axis;
using qsim::StateVector;

enum class AnsatzFamily { MG_BLOCK, SPIN1_SYM };

enum class GateKind : std::uint8_t {
    RZ,          // exp(-i t/2 sigma_z)
    RY,          // exp(-i t/2 sigma_y)
    CRX,         // |0><0| (x) I + |1><1| (x) Rx(t), control = first target
    CRY,
    CRZ,
    QUTRIT_GEN,  // exp(i t G_k) on the encoded triplet of a qubit pair
    CDIAG,       // phase e^{it} on |2>_control (x) |k>_target, encoded basis
};

struct GateSpec {
    GateKind kind;
    int generator_index = 0;   // Gell-Mann index 1..9, or diagonal level 0..2
    std::vector<int> targets;  // qubit sites; targets[0] is the local MSB
    int slot = -1;             // parameter slot
};

struct CircuitTemplate {
    AnsatzFamily family;
    int n_qubits = 0;
    int depth = 0;
    int n_params = 0;
    std::vector<GateSpec> gates; // every gate carries exactly one slot

    // One line per gate: "<index> <kind> k=<generator> targets=[...] slot=<s>".
    std::string describe() const;
};

using ParamVector = std::vector<double>;

// L layers of 15-parameter two-qubit blocks on pairs (0,1),(1,2),...,(N-2,N-1).
// Block: three repetitions of [Rz,Ry on a; Rz,Ry on b; controlled rotation
// a->b], controlled axes x,y,z for the three repetitions.
CircuitTemplate build_mg_ansatz(int n_qubits, int depth);

// L layers over n_prime encoded sites (2 qubits each): a 9-parameter
// single-qutrit unitary on every site (ordered product of exp(i a_k G_k),
// G_1..G_8 Gell-Mann, G_9 identity, embedded in the pair triplet), then a
// 3-parameter controlled-diagonal gate on each neighbor pair.
CircuitTemplate build_spin1_ansatz(int n_prime, int depth);

// 2^k x 2^k row-major unitary of one gate at parameter value t.
std::vector<cplx> gate_matrix(const GateSpec& g, double t);

// Left-multiplier generator: dU/dt = generator * U. Parameter-independent.
std::vector<cplx> gate_generator(const GateSpec& g);

StateVector prepare(const CircuitTemplate& tmpl, const ParamVector& params);

// Forward pass retaining the state after every gate (states[g+1] is the state
// after gate g; states[0] is |0...0>).
std::vector<StateVector> prepare_cached(const CircuitTemplate& tmpl,
                                        const ParamVector& params);

// Re-prepares with params[slot] replaced by value, reusing the cached prefix.
StateVector prepare_modified(const CircuitTemplate& tmpl, const ParamVector& params,
                             const std::vector<StateVector>& cache, int slot,
                             double value);

// Variant reusing precomputed matrices for the encoded-pair gates (circuit
// families whose gates are not plain rotations).
std::vector<std::vector<cplx>> gate_matrices(const CircuitTemplate& tmpl,
                                             const ParamVector& params);
StateVector prepare_modified(const CircuitTemplate& tmpl, const ParamVector& params,
                             const std::vector<StateVector>& cache,
                             const std::vector<std::vector<cplx>>& matrices,
                             int slot, double value);

// d|psi>/d theta_slot via the analytic single-generator derivative.
StateVector gate_derivative(const CircuitTemplate& tmpl, const ParamVector& params,
                            int slot);

// d<psi|obs|psi>/d theta for all slots, by reverse sweep. Exact.
std::vector<double> adjoint_gradient(const CircuitTemplate& tmpl,
                                     const ParamVector& params,
                                     const qsim::CompiledObservable& obs);

} // namespace gqc::ansatz

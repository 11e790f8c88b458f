#pragma once

#include <span>
#include <vector>

#include "gqc/common.hpp"
#include "gqc/qsim/pauli.hpp"

namespace gqc::qsim {

// Dense statevector over n_qubits. Site i maps to bit i of the amplitude
// index (site 0 is the least significant bit).
struct StateVector {
    int n_qubits = 0;
    std::vector<cplx> amplitudes;

    StateVector() = default;
    explicit StateVector(int n)
        : n_qubits(n), amplitudes(dim_of(n), cplx{0.0, 0.0}) {}

    std::size_t dim() const { return amplitudes.size(); }
};

StateVector zero_state(int n_qubits);

double norm(const StateVector& s);
cplx inner_product(const StateVector& a, const StateVector& b);

// Dense k-site gate application. `u` is a 2^k x 2^k row-major matrix over the
// local basis |q_{targets[0]} q_{targets[1]} ...>, with targets[0] the most
// significant local bit. Validates unitarity (1e-10) and site ranges.
void apply_gate(StateVector& s, std::span<const cplx> u,
                std::span<const int> targets);

// Kernel without the unitarity check, for gates already validated upstream.
// The two variants are numerically identical; the omp one threads over
// amplitude groups.
void apply_dense_serial(StateVector& s, std::span<const cplx> u,
                        std::span<const int> targets);
void apply_dense_omp(StateVector& s, std::span<const cplx> u,
                     std::span<const int> targets);
void apply_dense(StateVector& s, std::span<const cplx> u,
                 std::span<const int> targets); // picks a variant

bool is_unitary(std::span<const cplx> u, std::size_t dim, double tol = 1e-10);

// Specialized kernels for the rotation gates that dominate circuit
// preparation. Numerically equivalent to the dense path.
void apply_rz(StateVector& s, int qubit, double theta);
void apply_ry(StateVector& s, int qubit, double theta);
void apply_controlled_rotation(StateVector& s, int control, int target,
                               Axis axis, double theta);

// <psi|obs|psi>. The imaginary part is returned by expectation_complex for
// hermiticity audits; expectation returns the real part.
double expectation(const StateVector& s, const PauliSum& obs);
double expectation(const StateVector& s, const CompiledObservable& obs);
cplx expectation_complex(const StateVector& s, const CompiledObservable& obs);

double expectation_term(const StateVector& s, const CompiledTerm& t);

// obs|psi> as a new state (not normalized).
StateVector apply_observable(const StateVector& s, const CompiledObservable& obs);

} // namespace gqc::qsim

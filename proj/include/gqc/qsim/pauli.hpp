#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "gqc/common.hpp"

namespace gqc::qsim {

enum class Axis : std::uint8_t { X = 0, Y = 1, Z = 2 };

char axis_char(Axis a);

// One weighted Pauli string. Sites are distinct and kept sorted.
struct PauliTerm {
    double coefficient = 0.0;
    std::vector<std::pair<int, Axis>> ops; // (site, axis), sorted by site

    PauliTerm() = default;
    PauliTerm(double c, std::vector<std::pair<int, Axis>> o);

    bool is_identity() const { return ops.empty(); }
    int weight() const { return static_cast<int>(ops.size()); }
};

// Hermitian observable as a sum of weighted Pauli strings.
struct PauliSum {
    int n_qubits = 0;
    std::vector<PauliTerm> terms;

    PauliSum() = default;
    explicit PauliSum(int n) : n_qubits(n) {}

    void add(const PauliTerm& t);
    void add(double coeff, std::vector<std::pair<int, Axis>> ops);

    PauliSum& operator+=(const PauliSum& other);
    PauliSum& operator*=(double scale);

    // Merge identical strings, drop negligible coefficients.
    void canonicalize(double drop_tol = 1e-14);

    // True if every term has an even number of Y factors (real matrix).
    bool is_real() const;

    std::string to_string() const;
};

// Operator product with full single-site Pauli algebra. Imaginary parts of
// resulting coefficients must cancel (the callers form Hermitian products);
// a residual imaginary coefficient above tolerance is a contract violation.
PauliSum multiply(const PauliSum& a, const PauliSum& b, double drop_tol = 1e-14);

// Bit-mask form used by the statevector kernels.
struct CompiledTerm {
    std::uint64_t flip = 0; // X and Y sites
    std::uint64_t zy = 0;   // Z and Y sites (sign mask)
    int y_mod4 = 0;         // number of Y factors mod 4
    double coeff = 0.0;
};

struct CompiledObservable {
    int n_qubits = 0;
    std::vector<CompiledTerm> terms;
};

CompiledObservable compile(const PauliSum& obs);

} // namespace gqc::qsim

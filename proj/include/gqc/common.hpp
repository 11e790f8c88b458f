#pragma once

#include <complex>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace gqc {

using cplx = std::complex<double>;

// Thrown on bad user-facing input (sizes, ranges, malformed configs).
struct input_error : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// Thrown when an internal contract is violated (non-unitary gate, missing cache).
struct contract_error : std::logic_error {
    using std::logic_error::logic_error;
};

// Thrown when a request exceeds what this build supports (e.g. ED dimension).
struct capability_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

inline void require(bool cond, const std::string& msg) {
    if (!cond) throw input_error(msg);
}

inline void ensure(bool cond, const std::string& msg) {
    if (!cond) throw contract_error(msg);
}

inline std::size_t dim_of(int n_qubits) {
    return std::size_t{1} << n_qubits;
}

} // namespace gqc

#include "gqc/qsim/state.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>

namespace gqc::qsim {

StateVector zero_state(int n_qubits) {
    require(n_qubits >= 1 && n_qubits <= 20, "zero_state: unsupported size");
    StateVector s(n_qubits);
    s.amplitudes[0] = 1.0;
    return s;
}

double norm(const StateVector& s) {
    double acc = 0.0;
    for (const auto& a : s.amplitudes) acc += std::norm(a);
    return std::sqrt(acc);
}

cplx inner_product(const StateVector& a, const StateVector& b) {
    require(a.n_qubits == b.n_qubits, "inner_product: size mismatch");
    cplx acc = 0.0;
    for (std::size_t i = 0; i < a.dim(); ++i)
        acc += std::conj(a.amplitudes[i]) * b.amplitudes[i];
    return acc;
}

bool is_unitary(std::span<const cplx> u, std::size_t dim, double tol) {
    if (u.size() != dim * dim) return false;
    for (std::size_t i = 0; i < dim; ++i) {
        for (std::size_t j = 0; j < dim; ++j) {
            cplx acc = 0.0;
            for (std::size_t k = 0; k < dim; ++k)
                acc += std::conj(u[k * dim + i]) * u[k * dim + j];
            const cplx want = (i == j) ? cplx{1.0, 0.0} : cplx{0.0, 0.0};
            if (std::abs(acc - want) > tol) return false;
        }
    }
    return true;
}

namespace {

struct GateIndexing {
    int k = 0;                       // number of target sites
    std::size_t local_dim = 0;       // 2^k
    std::size_t groups = 0;          // 2^(n-k)
    std::array<std::size_t, 16> offset{}; // local index -> global offset
    std::array<int, 4> sorted{};     // ascending targets for expansion
};

GateIndexing make_indexing(const StateVector& s, std::span<const int> targets) {
    const int k = static_cast<int>(targets.size());
    require(k >= 1 && k <= 4, "gate: 1..4 target sites supported");
    GateIndexing g;
    g.k = k;
    g.local_dim = std::size_t{1} << k;
    g.groups = s.dim() >> k;
    std::array<int, 4> sorted{};
    for (int j = 0; j < k; ++j) {
        const int t = targets[j];
        require(t >= 0 && t < s.n_qubits, "gate: target site out of range");
        sorted[j] = t;
    }
    for (int j = 0; j < k; ++j)
        for (int l = j + 1; l < k; ++l)
            require(targets[j] != targets[l], "gate: repeated target site");
    std::sort(sorted.begin(), sorted.begin() + k);
    g.sorted = sorted;
    for (std::size_t l = 0; l < g.local_dim; ++l) {
        std::size_t off = 0;
        for (int j = 0; j < k; ++j)
            if ((l >> (k - 1 - j)) & 1) off |= std::size_t{1} << targets[j];
        g.offset[l] = off;
    }
    return g;
}

inline std::size_t expand_group(std::size_t r, const GateIndexing& g) {
    for (int j = 0; j < g.k; ++j) {
        const std::size_t mask = (std::size_t{1} << g.sorted[j]) - 1;
        r = ((r & ~mask) << 1) | (r & mask);
    }
    return r;
}

template <int K>
inline void apply_group(cplx* amp, std::span<const cplx> u,
                        const GateIndexing& g, std::size_t base) {
    constexpr std::size_t D = std::size_t{1} << K;
    std::array<cplx, D> x;
    for (std::size_t l = 0; l < D; ++l) x[l] = amp[base + g.offset[l]];
    for (std::size_t row = 0; row < D; ++row) {
        cplx acc = 0.0;
        const cplx* urow = u.data() + row * D;
        for (std::size_t col = 0; col < D; ++col) acc += urow[col] * x[col];
        amp[base + g.offset[row]] = acc;
    }
}

template <int K>
void apply_all_serial(StateVector& s, std::span<const cplx> u,
                      const GateIndexing& g) {
    cplx* amp = s.amplitudes.data();
    for (std::size_t r = 0; r < g.groups; ++r)
        apply_group<K>(amp, u, g, expand_group(r, g));
}

template <int K>
void apply_all_omp(StateVector& s, std::span<const cplx> u,
                   const GateIndexing& g) {
    cplx* amp = s.amplitudes.data();
    const std::int64_t groups = static_cast<std::int64_t>(g.groups);
#pragma omp parallel for schedule(static)
    for (std::int64_t r = 0; r < groups; ++r)
        apply_group<K>(amp, u, g, expand_group(static_cast<std::size_t>(r), g));
}

} // namespace

void apply_dense_serial(StateVector& s, std::span<const cplx> u,
                        std::span<const int> targets) {
    const GateIndexing g = make_indexing(s, targets);
    require(u.size() == g.local_dim * g.local_dim, "gate: matrix size mismatch");
    switch (g.k) {
        case 1: apply_all_serial<1>(s, u, g); break;
        case 2: apply_all_serial<2>(s, u, g); break;
        case 3: apply_all_serial<3>(s, u, g); break;
        case 4: apply_all_serial<4>(s, u, g); break;
    }
}

void apply_dense_omp(StateVector& s, std::span<const cplx> u,
                     std::span<const int> targets) {
    const GateIndexing g = make_indexing(s, targets);
    require(u.size() == g.local_dim * g.local_dim, "gate: matrix size mismatch");
    switch (g.k) {
        case 1: apply_all_omp<1>(s, u, g); break;
        case 2: apply_all_omp<2>(s, u, g); break;
        case 3: apply_all_omp<3>(s, u, g); break;
        case 4: apply_all_omp<4>(s, u, g); break;
    }
}

void apply_dense(StateVector& s, std::span<const cplx> u,
                 std::span<const int> targets) {
    // Threading only pays off once a group sweep is substantial.
    if (s.dim() >= (std::size_t{1} << 14))
        apply_dense_omp(s, u, targets);
    else
        apply_dense_serial(s, u, targets);
}

void apply_gate(StateVector& s, std::span<const cplx> u,
                std::span<const int> targets) {
    const std::size_t dim = std::size_t{1} << targets.size();
    ensure(is_unitary(u, dim), "apply_gate: block is not unitary");
    apply_dense(s, u, targets);
}

void apply_rz(StateVector& s, int qubit, double theta) {
    require(qubit >= 0 && qubit < s.n_qubits, "apply_rz: qubit out of range");
    const cplx p0 = std::exp(cplx{0.0, -theta / 2});
    const cplx p1 = std::exp(cplx{0.0, theta / 2});
    cplx* amp = s.amplitudes.data();
    const std::size_t stride = std::size_t{1} << qubit;
    for (std::size_t g = 0; g < s.dim(); g += 2 * stride)
        for (std::size_t i = g; i < g + stride; ++i) {
            amp[i] *= p0;
            amp[i + stride] *= p1;
        }
}

void apply_ry(StateVector& s, int qubit, double theta) {
    require(qubit >= 0 && qubit < s.n_qubits, "apply_ry: qubit out of range");
    const double c = std::cos(theta / 2), sn = std::sin(theta / 2);
    cplx* amp = s.amplitudes.data();
    const std::size_t stride = std::size_t{1} << qubit;
    for (std::size_t g = 0; g < s.dim(); g += 2 * stride)
        for (std::size_t i = g; i < g + stride; ++i) {
            const cplx a0 = amp[i], a1 = amp[i + stride];
            amp[i] = c * a0 - sn * a1;
            amp[i + stride] = sn * a0 + c * a1;
        }
}

void apply_controlled_rotation(StateVector& s, int control, int target,
                               Axis axis, double theta) {
    require(control >= 0 && control < s.n_qubits && target >= 0 &&
                target < s.n_qubits && control != target,
            "apply_controlled_rotation: bad sites");
    const double c = std::cos(theta / 2), sn = std::sin(theta / 2);
    const cplx p0 = std::exp(cplx{0.0, -theta / 2});
    const cplx p1 = std::exp(cplx{0.0, theta / 2});
    cplx* amp = s.amplitudes.data();
    const std::size_t cbit = std::size_t{1} << control;
    const std::size_t tbit = std::size_t{1} << target;
    const std::size_t d = s.dim();
    for (std::size_t b = 0; b < d; ++b) {
        if (!(b & cbit) || (b & tbit)) continue; // control set, target 0
        const std::size_t b1 = b | tbit;
        const cplx a0 = amp[b], a1 = amp[b1];
        switch (axis) {
            case Axis::X:
                amp[b] = c * a0 - cplx{0.0, sn} * a1;
                amp[b1] = -cplx{0.0, sn} * a0 + c * a1;
                break;
            case Axis::Y:
                amp[b] = c * a0 - sn * a1;
                amp[b1] = sn * a0 + c * a1;
                break;
            case Axis::Z:
                amp[b] = p0 * a0;
                amp[b1] = p1 * a1;
                break;
        }
    }
}

double expectation_term(const StateVector& s, const CompiledTerm& t) {
    static constexpr cplx i_pow[4] = {{1, 0}, {0, 1}, {-1, 0}, {0, -1}};
    const cplx* amp = s.amplitudes.data();
    cplx acc = 0.0;
    const std::size_t d = s.dim();
    for (std::size_t b = 0; b < d; ++b) {
        const double sign =
            (std::popcount(b & t.zy) & 1) ? -1.0 : 1.0;
        acc += std::conj(amp[b ^ t.flip]) * (sign * amp[b]);
    }
    acc *= i_pow[t.y_mod4];
    return t.coeff * acc.real();
}

cplx expectation_complex(const StateVector& s, const CompiledObservable& obs) {
    require(s.n_qubits == obs.n_qubits, "expectation: size mismatch");
    static constexpr cplx i_pow[4] = {{1, 0}, {0, 1}, {-1, 0}, {0, -1}};
    const cplx* amp = s.amplitudes.data();
    const std::size_t d = s.dim();
    cplx total = 0.0;
    for (const auto& t : obs.terms) {
        cplx acc = 0.0;
        for (std::size_t b = 0; b < d; ++b) {
            const double sign =
                (std::popcount(b & t.zy) & 1) ? -1.0 : 1.0;
            acc += std::conj(amp[b ^ t.flip]) * (sign * amp[b]);
        }
        total += t.coeff * i_pow[t.y_mod4] * acc;
    }
    return total;
}

double expectation(const StateVector& s, const CompiledObservable& obs) {
    return expectation_complex(s, obs).real();
}

double expectation(const StateVector& s, const PauliSum& obs) {
    require(s.n_qubits == obs.n_qubits, "expectation: size mismatch");
    return expectation(s, compile(obs));
}

StateVector apply_observable(const StateVector& s, const CompiledObservable& obs) {
    require(s.n_qubits == obs.n_qubits, "apply_observable: size mismatch");
    static constexpr cplx i_pow[4] = {{1, 0}, {0, 1}, {-1, 0}, {0, -1}};
    StateVector out(s.n_qubits);
    const cplx* amp = s.amplitudes.data();
    const std::size_t d = s.dim();
    for (const auto& t : obs.terms) {
        const cplx scale = t.coeff * i_pow[t.y_mod4];
        for (std::size_t b = 0; b < d; ++b) {
            const double sign =
                (std::popcount(b & t.zy) & 1) ? -1.0 : 1.0;
            out.amplitudes[b ^ t.flip] += scale * (sign * amp[b]);
        }
    }
    return out;
}

} // namespace gqc::qsim

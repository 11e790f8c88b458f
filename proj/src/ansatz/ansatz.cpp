#include "gqc/ansatz/ansatz.hpp"

#include <array>
#include <cmath>
#include <sstream>

namespace gqc::ansatz {

namespace {

constexpr cplx im{0.0, 1.0};
constexpr double inv_sqrt2 = 0.70710678118654752440;
constexpr double inv_sqrt3 = 0.57735026918962576451;

const char* kind_name(GateKind k) {
    switch (k) {
        case GateKind::RZ: return "rz";
        case GateKind::RY: return "ry";
        case GateKind::CRX: return "crx";
        case GateKind::CRY: return "cry";
        case GateKind::CRZ: return "crz";
        case GateKind::QUTRIT_GEN: return "qutrit";
        case GateKind::CDIAG: return "cdiag";
    }
    return "?";
}

// Gell-Mann matrices, row-major 3x3; index 9 is the identity.
std::array<cplx, 9> gell_mann(int k) {
    std::array<cplx, 9> g{};
    switch (k) {
        case 1: g[1] = 1; g[3] = 1; break;
        case 2: g[1] = -im; g[3] = im; break;
        case 3: g[0] = 1; g[4] = -1; break;
        case 4: g[2] = 1; g[6] = 1; break;
        case 5: g[2] = -im; g[6] = im; break;
        case 6: g[5] = 1; g[7] = 1; break;
        case 7: g[5] = -im; g[7] = im; break;
        case 8: g[0] = inv_sqrt3; g[4] = inv_sqrt3; g[8] = -2.0 * inv_sqrt3; break;
        case 9: g[0] = 1; g[4] = 1; g[8] = 1; break;
        default: throw input_error("gell_mann: index must be 1..9");
    }
    return g;
}

// exp(i t G) for the generators above. G_1..G_7 satisfy G^3 = G, G_8 and G_9
// are diagonal.
std::array<cplx, 9> qutrit_exponential(int k, double t) {
    std::array<cplx, 9> u{};
    if (k == 9) {
        const cplx p = std::exp(im * t);
        u[0] = u[4] = u[8] = p;
        return u;
    }
    if (k == 8) {
        u[0] = u[4] = std::exp(im * (t * inv_sqrt3));
        u[8] = std::exp(im * (-2.0 * t * inv_sqrt3));
        return u;
    }
    const auto g = gell_mann(k);
    std::array<cplx, 9> g2{};
    for (int r = 0; r < 3; ++r)
        for (int c = 0; c < 3; ++c)
            for (int l = 0; l < 3; ++l) g2[r * 3 + c] += g[r * 3 + l] * g[l * 3 + c];
    const double ct = std::cos(t) - 1.0, st = std::sin(t);
    for (int i = 0; i < 9; ++i) u[i] = ct * g2[i] + im * st * g[i];
    u[0] += 1.0;
    u[4] += 1.0;
    u[8] += 1.0;
    return u;
}

// Pair isometry V: |0> -> |00>, |1> -> (|01>+|10>)/sqrt2, |2> -> |11>,
// rows over the pair basis |hi lo>.
constexpr std::array<double, 12> isometry = {
    1, 0, 0,
    0, inv_sqrt2, 0,
    0, inv_sqrt2, 0,
    0, 0, 1,
};

// V M V^dag + (I - V V^dag): embeds a 3x3 triplet block, identity on the
// singlet component.
std::vector<cplx> embed_triplet(const std::array<cplx, 9>& m, bool add_singlet_identity) {
    std::vector<cplx> out(16, cplx{0.0, 0.0});
    for (int r = 0; r < 4; ++r)
        for (int c = 0; c < 4; ++c) {
            cplx acc = 0.0;
            for (int a = 0; a < 3; ++a)
                for (int b = 0; b < 3; ++b)
                    acc += isometry[r * 3 + a] * m[a * 3 + b] * isometry[c * 3 + b];
            out[r * 4 + c] = acc;
        }
    if (add_singlet_identity) {
        // singlet = (|01> - |10>)/sqrt2 -> indices 1 and 2
        out[1 * 4 + 1] += 0.5;
        out[1 * 4 + 2] -= 0.5;
        out[2 * 4 + 1] -= 0.5;
        out[2 * 4 + 2] += 0.5;
    }
    return out;
}

std::vector<cplx> single_qubit(GateKind kind, double t) {
    std::vector<cplx> u(4);
    const double c = std::cos(t / 2), s = std::sin(t / 2);
    if (kind == GateKind::RZ) {
        u[0] = std::exp(-im * (t / 2));
        u[3] = std::exp(im * (t / 2));
    } else { // RY
        u[0] = c;
        u[1] = -s;
        u[2] = s;
        u[3] = c;
    }
    return u;
}

std::vector<cplx> rotation_2x2(Axis axis, double t) {
    const double c = std::cos(t / 2), s = std::sin(t / 2);
    std::vector<cplx> r(4);
    switch (axis) {
        case Axis::X: r = {c, -im * s, -im * s, c}; break;
        case Axis::Y: r = {c, -s, s, c}; break;
        case Axis::Z: r = {std::exp(-im * (t / 2)), 0, 0, std::exp(im * (t / 2))}; break;
    }
    return r;
}

Axis controlled_axis(GateKind kind) {
    switch (kind) {
        case GateKind::CRX: return Axis::X;
        case GateKind::CRY: return Axis::Y;
        case GateKind::CRZ: return Axis::Z;
        default: throw input_error("not a controlled rotation");
    }
}

// Projector onto the encoded target level k of a pair, 4x4.
std::array<cplx, 16> level_projector(int k) {
    std::array<cplx, 9> m{};
    m[k * 3 + k] = 1.0;
    const auto v = embed_triplet(m, false);
    std::array<cplx, 16> out{};
    for (int i = 0; i < 16; ++i) out[i] = v[i];
    return out;
}

} // namespace

std::vector<cplx> gate_matrix(const GateSpec& g, double t) {
    switch (g.kind) {
        case GateKind::RZ:
        case GateKind::RY:
            return single_qubit(g.kind, t);
        case GateKind::CRX:
        case GateKind::CRY:
        case GateKind::CRZ: {
            std::vector<cplx> u(16, cplx{0.0, 0.0});
            u[0] = u[5] = 1.0; // control |0> block
            const auto r = rotation_2x2(controlled_axis(g.kind), t);
            u[10] = r[0];
            u[11] = r[1];
            u[14] = r[2];
            u[15] = r[3];
            return u;
        }
        case GateKind::QUTRIT_GEN:
            return embed_triplet(qutrit_exponential(g.generator_index, t), true);
        case GateKind::CDIAG: {
            // exp(i t P) = I + (e^{it} - 1) P with P = |11><11|_c (x) Pi_k
            std::vector<cplx> u(256, cplx{0.0, 0.0});
            for (int i = 0; i < 16; ++i) u[i * 16 + i] = 1.0;
            const auto pi = level_projector(g.generator_index);
            const cplx w = std::exp(im * t) - 1.0;
            for (int tr = 0; tr < 4; ++tr)
                for (int tc = 0; tc < 4; ++tc) {
                    const int row = (3 << 2) | tr, col = (3 << 2) | tc;
                    u[row * 16 + col] += w * pi[tr * 4 + tc];
                }
            return u;
        }
    }
    throw input_error("gate_matrix: unknown kind");
}

std::vector<cplx> gate_generator(const GateSpec& g) {
    switch (g.kind) {
        case GateKind::RZ: {
            std::vector<cplx> m(4, cplx{0.0, 0.0});
            m[0] = -im * 0.5;
            m[3] = im * 0.5;
            return m;
        }
        case GateKind::RY: {
            std::vector<cplx> m(4, cplx{0.0, 0.0});
            m[1] = -0.5;
            m[2] = 0.5;
            return m;
        }
        case GateKind::CRX:
        case GateKind::CRY:
        case GateKind::CRZ: {
            // -(i/2) |1><1| (x) sigma_axis
            std::vector<cplx> m(16, cplx{0.0, 0.0});
            const Axis ax = controlled_axis(g.kind);
            cplx s[4] = {};
            switch (ax) {
                case Axis::X: s[1] = s[2] = 1.0; break;
                case Axis::Y: s[1] = -im; s[2] = im; break;
                case Axis::Z: s[0] = 1.0; s[3] = -1.0; break;
            }
            for (int r = 0; r < 2; ++r)
                for (int c = 0; c < 2; ++c)
                    m[(2 + r) * 4 + (2 + c)] = -im * 0.5 * s[r * 2 + c];
            return m;
        }
        case GateKind::QUTRIT_GEN: {
            std::array<cplx, 9> g3 = gell_mann(g.generator_index);
            for (auto& x : g3) x *= im;
            return embed_triplet(g3, false);
        }
        case GateKind::CDIAG: {
            std::vector<cplx> m(256, cplx{0.0, 0.0});
            const auto pi = level_projector(g.generator_index);
            for (int tr = 0; tr < 4; ++tr)
                for (int tc = 0; tc < 4; ++tc) {
                    const int row = (3 << 2) | tr, col = (3 << 2) | tc;
                    m[row * 16 + col] = im * pi[tr * 4 + tc];
                }
            return m;
        }
    }
    throw input_error("gate_generator: unknown kind");
}

CircuitTemplate build_mg_ansatz(int n_qubits, int depth) {
    require(n_qubits >= 2, "build_mg_ansatz: need at least 2 qubits");
    require(depth >= 1, "build_mg_ansatz: depth must be positive");
    CircuitTemplate t;
    t.family = AnsatzFamily::MG_BLOCK;
    t.n_qubits = n_qubits;
    t.depth = depth;
    int slot = 0;
    const GateKind ctrl[3] = {GateKind::CRX, GateKind::CRY, GateKind::CRZ};
    for (int layer = 0; layer < depth; ++layer) {
        for (int a = 0; a + 1 < n_qubits; ++a) {
            const int b = a + 1;
            for (int rep = 0; rep < 3; ++rep) {
                t.gates.push_back({GateKind::RZ, 0, {a}, slot++});
                t.gates.push_back({GateKind::RY, 0, {a}, slot++});
                t.gates.push_back({GateKind::RZ, 0, {b}, slot++});
                t.gates.push_back({GateKind::RY, 0, {b}, slot++});
                t.gates.push_back({ctrl[rep], 0, {a, b}, slot++});
            }
        }
    }
    t.n_params = slot;
    ensure(t.n_params == 15 * (n_qubits - 1) * depth,
           "build_mg_ansatz: parameter count mismatch");
    return t;
}

CircuitTemplate build_spin1_ansatz(int n_prime, int depth) {
    require(n_prime >= 2, "build_spin1_ansatz: need at least 2 encoded sites");
    require(depth >= 1, "build_spin1_ansatz: depth must be positive");
    CircuitTemplate t;
    t.family = AnsatzFamily::SPIN1_SYM;
    t.n_qubits = 2 * n_prime;
    t.depth = depth;
    int slot = 0;
    for (int layer = 0; layer < depth; ++layer) {
        for (int p = 0; p < n_prime; ++p) {
            for (int k = 1; k <= 9; ++k)
                t.gates.push_back(
                    {GateKind::QUTRIT_GEN, k, {2 * p, 2 * p + 1}, slot++});
        }
        for (int p = 0; p + 1 < n_prime; ++p) {
            for (int k = 0; k < 3; ++k)
                t.gates.push_back({GateKind::CDIAG, k,
                                   {2 * p, 2 * p + 1, 2 * p + 2, 2 * p + 3},
                                   slot++});
        }
    }
    t.n_params = slot;
    ensure(t.n_params == (9 * n_prime + 3 * (n_prime - 1)) * depth,
           "build_spin1_ansatz: parameter count mismatch");
    return t;
}

std::string CircuitTemplate::describe() const {
    std::ostringstream os;
    os << (family == AnsatzFamily::MG_BLOCK ? "mg_block" : "spin1_sym")
       << " qubits=" << n_qubits << " depth=" << depth
       << " params=" << n_params << "\n";
    for (std::size_t i = 0; i < gates.size(); ++i) {
        const auto& g = gates[i];
        os << i << " " << kind_name(g.kind);
        if (g.kind == GateKind::QUTRIT_GEN || g.kind == GateKind::CDIAG)
            os << " k=" << g.generator_index;
        os << " targets=[";
        for (std::size_t j = 0; j < g.targets.size(); ++j)
            os << (j ? "," : "") << g.targets[j];
        os << "] slot=" << g.slot << "\n";
    }
    return os.str();
}

namespace {

void check_params(const CircuitTemplate& tmpl, const ParamVector& params) {
    require(static_cast<int>(params.size()) == tmpl.n_params,
            "parameter vector length does not match template");
}

// Rotation gates go through the specialized kernels; the encoded-pair gates
// use the dense path (with a caller-provided matrix when available).
void apply_gate_fast(StateVector& st, const GateSpec& g, double t,
                     const std::vector<cplx>* matrix) {
    switch (g.kind) {
        case GateKind::RZ: qsim::apply_rz(st, g.targets[0], t); return;
        case GateKind::RY: qsim::apply_ry(st, g.targets[0], t); return;
        case GateKind::CRX:
        case GateKind::CRY:
        case GateKind::CRZ:
            qsim::apply_controlled_rotation(st, g.targets[0], g.targets[1],
                                            controlled_axis(g.kind), t);
            return;
        default:
            if (matrix) {
                qsim::apply_dense(st, *matrix, g.targets);
            } else {
                const auto u = gate_matrix(g, t);
                qsim::apply_dense(st, u, g.targets);
            }
    }
}

} // namespace

StateVector prepare(const CircuitTemplate& tmpl, const ParamVector& params) {
    check_params(tmpl, params);
    StateVector st = qsim::zero_state(tmpl.n_qubits);
    for (const auto& g : tmpl.gates) apply_gate_fast(st, g, params[g.slot], nullptr);
    return st;
}

std::vector<StateVector> prepare_cached(const CircuitTemplate& tmpl,
                                        const ParamVector& params) {
    check_params(tmpl, params);
    std::vector<StateVector> states;
    states.reserve(tmpl.gates.size() + 1);
    states.push_back(qsim::zero_state(tmpl.n_qubits));
    for (const auto& g : tmpl.gates) {
        StateVector st = states.back();
        apply_gate_fast(st, g, params[g.slot], nullptr);
        states.push_back(std::move(st));
    }
    return states;
}

StateVector prepare_modified(const CircuitTemplate& tmpl, const ParamVector& params,
                             const std::vector<StateVector>& cache, int slot,
                             double value) {
    check_params(tmpl, params);
    require(slot >= 0 && slot < tmpl.n_params, "prepare_modified: bad slot");
    ensure(cache.size() == tmpl.gates.size() + 1,
           "prepare_modified: cache does not match template");
    // Slots are assigned in gate order, one per gate.
    const std::size_t g0 = static_cast<std::size_t>(slot);
    StateVector st = cache[g0];
    apply_gate_fast(st, tmpl.gates[g0], value, nullptr);
    for (std::size_t i = g0 + 1; i < tmpl.gates.size(); ++i)
        apply_gate_fast(st, tmpl.gates[i], params[tmpl.gates[i].slot], nullptr);
    return st;
}

std::vector<std::vector<cplx>> gate_matrices(const CircuitTemplate& tmpl,
                                             const ParamVector& params) {
    check_params(tmpl, params);
    std::vector<std::vector<cplx>> mats;
    mats.reserve(tmpl.gates.size());
    for (const auto& g : tmpl.gates) mats.push_back(gate_matrix(g, params[g.slot]));
    return mats;
}

StateVector prepare_modified(const CircuitTemplate& tmpl, const ParamVector& params,
                             const std::vector<StateVector>& cache,
                             const std::vector<std::vector<cplx>>& matrices,
                             int slot, double value) {
    check_params(tmpl, params);
    require(slot >= 0 && slot < tmpl.n_params, "prepare_modified: bad slot");
    ensure(cache.size() == tmpl.gates.size() + 1 &&
               matrices.size() == tmpl.gates.size(),
           "prepare_modified: cache does not match template");
    const std::size_t g0 = static_cast<std::size_t>(slot);
    StateVector st = cache[g0];
    apply_gate_fast(st, tmpl.gates[g0], value, nullptr);
    for (std::size_t i = g0 + 1; i < tmpl.gates.size(); ++i)
        apply_gate_fast(st, tmpl.gates[i], params[tmpl.gates[i].slot],
                        &matrices[i]);
    return st;
}

StateVector gate_derivative(const CircuitTemplate& tmpl, const ParamVector& params,
                            int slot) {
    check_params(tmpl, params);
    require(slot >= 0 && slot < tmpl.n_params, "gate_derivative: bad slot");
    StateVector st = qsim::zero_state(tmpl.n_qubits);
    for (const auto& g : tmpl.gates) {
        const auto u = gate_matrix(g, params[g.slot]);
        qsim::apply_dense(st, u, g.targets);
        if (g.slot == slot) {
            const auto gen = gate_generator(g);
            qsim::apply_dense(st, gen, g.targets);
        }
    }
    return st;
}

namespace {

// <lam| M |mu> over the local block of `targets`.
cplx local_form(const StateVector& lam, const StateVector& mu,
                std::span<const cplx> m, std::span<const int> targets) {
    const int k = static_cast<int>(targets.size());
    const std::size_t local_dim = std::size_t{1} << k;
    std::array<std::size_t, 16> offset{};
    for (std::size_t l = 0; l < local_dim; ++l) {
        std::size_t off = 0;
        for (int j = 0; j < k; ++j)
            if ((l >> (k - 1 - j)) & 1) off |= std::size_t{1} << targets[j];
        offset[l] = off;
    }
    std::array<int, 4> sorted{};
    for (int j = 0; j < k; ++j) sorted[j] = targets[j];
    std::sort(sorted.begin(), sorted.begin() + k);

    const std::size_t groups = lam.dim() >> k;
    cplx acc = 0.0;
    for (std::size_t r = 0; r < groups; ++r) {
        std::size_t base = r;
        for (int j = 0; j < k; ++j) {
            const std::size_t mask = (std::size_t{1} << sorted[j]) - 1;
            base = ((base & ~mask) << 1) | (base & mask);
        }
        for (std::size_t row = 0; row < local_dim; ++row) {
            cplx y = 0.0;
            const cplx* mrow = m.data() + row * local_dim;
            for (std::size_t col = 0; col < local_dim; ++col)
                y += mrow[col] * mu.amplitudes[base + offset[col]];
            acc += std::conj(lam.amplitudes[base + offset[row]]) * y;
        }
    }
    return acc;
}

std::vector<cplx> adjoint_matrix(const std::vector<cplx>& u, std::size_t dim) {
    std::vector<cplx> a(u.size());
    for (std::size_t r = 0; r < dim; ++r)
        for (std::size_t c = 0; c < dim; ++c)
            a[c * dim + r] = std::conj(u[r * dim + c]);
    return a;
}

} // namespace

std::vector<double> adjoint_gradient(const CircuitTemplate& tmpl,
                                     const ParamVector& params,
                                     const qsim::CompiledObservable& obs) {
    check_params(tmpl, params);
    StateVector mu = prepare(tmpl, params);
    StateVector lam = qsim::apply_observable(mu, obs);

    std::vector<double> grad(tmpl.n_params, 0.0);
    for (auto it = tmpl.gates.rbegin(); it != tmpl.gates.rend(); ++it) {
        const auto& g = *it;
        const auto gen = gate_generator(g);
        grad[g.slot] = 2.0 * local_form(lam, mu, gen, g.targets).real();

        const auto u = gate_matrix(g, params[g.slot]);
        const std::size_t dim = std::size_t{1} << g.targets.size();
        const auto udag = adjoint_matrix(u, dim);
        qsim::apply_dense(mu, udag, g.targets);
        qsim::apply_dense(lam, udag, g.targets);
    }
    return grad;
}

} // namespace gqc::ansatz

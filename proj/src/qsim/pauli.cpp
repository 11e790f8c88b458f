#include "gqc/qsim/pauli.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>

namespace gqc::qsim {

char axis_char(Axis a) {
    switch (a) {
        case Axis::X: return 'x';
        case Axis::Y: return 'y';
        case Axis::Z: return 'z';
    }
    return '?';
}

PauliTerm::PauliTerm(double c, std::vector<std::pair<int, Axis>> o)
    : coefficient(c), ops(std::move(o)) {
    std::sort(ops.begin(), ops.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });
    for (std::size_t i = 1; i < ops.size(); ++i)
        require(ops[i].first != ops[i - 1].first,
                "PauliTerm: repeated site index");
    for (const auto& [site, axis] : ops) {
        (void)axis;
        require(site >= 0, "PauliTerm: negative site index");
    }
}

void PauliSum::add(const PauliTerm& t) {
    if (!t.ops.empty())
        require(t.ops.back().first < n_qubits, "PauliSum: site out of range");
    terms.push_back(t);
}

void PauliSum::add(double coeff, std::vector<std::pair<int, Axis>> ops) {
    add(PauliTerm(coeff, std::move(ops)));
}

PauliSum& PauliSum::operator+=(const PauliSum& other) {
    require(n_qubits == other.n_qubits, "PauliSum: qubit count mismatch");
    terms.insert(terms.end(), other.terms.begin(), other.terms.end());
    return *this;
}

PauliSum& PauliSum::operator*=(double scale) {
    for (auto& t : terms) t.coefficient *= scale;
    return *this;
}

namespace {

// Canonical key for a sorted op list.
std::vector<std::pair<int, Axis>> sorted_ops(std::vector<std::pair<int, Axis>> ops) {
    std::sort(ops.begin(), ops.end());
    return ops;
}

} // namespace

void PauliSum::canonicalize(double drop_tol) {
    std::map<std::vector<std::pair<int, Axis>>, double> acc;
    for (const auto& t : terms) acc[sorted_ops(t.ops)] += t.coefficient;
    terms.clear();
    for (auto& [ops, coeff] : acc) {
        if (std::abs(coeff) <= drop_tol) continue;
        PauliTerm t;
        t.coefficient = coeff;
        t.ops = ops;
        terms.push_back(std::move(t));
    }
}

bool PauliSum::is_real() const {
    for (const auto& t : terms) {
        int ny = 0;
        for (const auto& [site, axis] : t.ops) {
            (void)site;
            if (axis == Axis::Y) ++ny;
        }
        if (ny % 2 != 0) return false;
    }
    return true;
}

std::string PauliSum::to_string() const {
    std::ostringstream os;
    for (std::size_t i = 0; i < terms.size(); ++i) {
        const auto& t = terms[i];
        if (i) os << " + ";
        os << t.coefficient;
        for (const auto& [site, axis] : t.ops)
            os << "*" << axis_char(axis) << site;
    }
    return os.str();
}

PauliSum multiply(const PauliSum& a, const PauliSum& b, double drop_tol) {
    require(a.n_qubits == b.n_qubits, "multiply: qubit count mismatch");
    // site-wise product table: sigma_a * sigma_b = phase * sigma_c (or I)
    // indexed [a][b] -> (c, phase exponent k with phase = i^k), c = -1 for I
    static constexpr int prod_axis[3][3] = {
        {-1, 2, 1},
        {2, -1, 0},
        {1, 0, -1},
    };
    static constexpr int prod_phase[3][3] = {
        {0, 1, 3}, // xx=I, xy=iz, xz=-iy
        {3, 0, 1}, // yx=-iz, yy=I, yz=ix
        {1, 3, 0}, // zx=iy, zy=-ix, zz=I
    };

    std::map<std::vector<std::pair<int, Axis>>, cplx> acc;
    for (const auto& ta : a.terms) {
        for (const auto& tb : b.terms) {
            std::vector<std::pair<int, Axis>> ops;
            ops.reserve(ta.ops.size() + tb.ops.size());
            int phase_pow = 0;
            std::size_t ia = 0, ib = 0;
            while (ia < ta.ops.size() || ib < tb.ops.size()) {
                if (ib == tb.ops.size() ||
                    (ia < ta.ops.size() && ta.ops[ia].first < tb.ops[ib].first)) {
                    ops.push_back(ta.ops[ia++]);
                } else if (ia == ta.ops.size() ||
                           tb.ops[ib].first < ta.ops[ia].first) {
                    ops.push_back(tb.ops[ib++]);
                } else {
                    const int site = ta.ops[ia].first;
                    const int ax = static_cast<int>(ta.ops[ia].second);
                    const int bx = static_cast<int>(tb.ops[ib].second);
                    const int cx = prod_axis[ax][bx];
                    phase_pow = (phase_pow + prod_phase[ax][bx]) % 4;
                    if (cx >= 0) ops.emplace_back(site, static_cast<Axis>(cx));
                    ++ia;
                    ++ib;
                }
            }
            static constexpr cplx i_pow[4] = {
                {1, 0}, {0, 1}, {-1, 0}, {0, -1}};
            acc[ops] += ta.coefficient * tb.coefficient * i_pow[phase_pow];
        }
    }

    PauliSum out(a.n_qubits);
    for (auto& [ops, coeff] : acc) {
        if (std::abs(coeff) <= drop_tol) continue;
        ensure(std::abs(coeff.imag()) <= 1e-10 * (1.0 + std::abs(coeff)),
               "multiply: non-Hermitian product (imaginary coefficient)");
        PauliTerm t;
        t.coefficient = coeff.real();
        t.ops = ops;
        out.terms.push_back(std::move(t));
    }
    return out;
}

CompiledObservable compile(const PauliSum& obs) {
    CompiledObservable c;
    c.n_qubits = obs.n_qubits;
    c.terms.reserve(obs.terms.size());
    for (const auto& t : obs.terms) {
        CompiledTerm ct;
        ct.coeff = t.coefficient;
        int ny = 0;
        for (const auto& [site, axis] : t.ops) {
            require(site < obs.n_qubits, "compile: site out of range");
            const std::uint64_t bit = std::uint64_t{1} << site;
            switch (axis) {
                case Axis::X: ct.flip |= bit; break;
                case Axis::Y: ct.flip |= bit; ct.zy |= bit; ++ny; break;
                case Axis::Z: ct.zy |= bit; break;
            }
        }
        ct.y_mod4 = ny % 4;
        c.terms.push_back(ct);
    }
    return c;
}

} // namespace gqc::qsim

#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>
#include <complex>

#include "gqc/models/spin_models.hpp"
#include "gqc/qsim/state.hpp"
#include "gqc/rng.hpp"

using namespace gqc;
using namespace gqc::models;

namespace {

constexpr cplx im{0.0, 1.0};

// spin-1 matrices in the m = +1, 0, -1 basis
Eigen::Matrix3cd spin1(Axis a) {
    Eigen::Matrix3cd m = Eigen::Matrix3cd::Zero();
    const double r = 1.0 / std::sqrt(2.0);
    switch (a) {
        case Axis::X:
            m(0, 1) = m(1, 0) = m(1, 2) = m(2, 1) = r;
            break;
        case Axis::Y:
            m(0, 1) = -im * r;
            m(1, 0) = im * r;
            m(1, 2) = -im * r;
            m(2, 1) = im * r;
            break;
        case Axis::Z:
            m(0, 0) = 1;
            m(2, 2) = -1;
            break;
    }
    return m;
}

// amplitude of the encoded level k on one qubit pair
double pair_amp(int level, int q_a, int q_b) {
    const int ones = q_a + q_b;
    if (level == 0) return ones == 0 ? 1.0 : 0.0;
    if (level == 2) return ones == 2 ? 1.0 : 0.0;
    return ones == 1 ? 1.0 / std::sqrt(2.0) : 0.0;
}

} // namespace

TEST_CASE("mg ground energies follow -3(N-2)") {
    for (int n = 3; n <= 9; ++n) {
        const auto gs = exact_diagonalize(build_mg(n));
        CHECK(gs.energy == doctest::Approx(-3.0 * (n - 2)).epsilon(1e-10));
    }
}

TEST_CASE("mg degeneracy is 4 for odd and 5 for even sizes") {
    for (int n = 5; n <= 9; ++n) {
        const auto gs = exact_diagonalize(build_mg(n));
        CHECK(gs.degeneracy == (n % 2 ? 4 : 5));
    }
}

TEST_CASE("mg n=10 reproduces (-24, 5)") {
    const auto gs = exact_diagonalize(build_mg(10));
    CHECK(gs.energy == doctest::Approx(-24.0).epsilon(1e-10));
    CHECK(gs.degeneracy == 5);
}

TEST_CASE("mg rejects chains shorter than 3") {
    CHECK_THROWS_AS(build_mg(2), input_error);
}

TEST_CASE("ground-space residuals and orthonormality") {
    const auto h = build_mg(7);
    const auto gs = exact_diagonalize(h);
    const auto hd = dense_matrix(h);
    for (int c = 0; c < gs.degeneracy; ++c) {
        const Eigen::VectorXcd r =
            hd * gs.basis.col(c) - gs.energy * gs.basis.col(c);
        CHECK(r.norm() < 1e-8);
    }
    const Eigen::MatrixXcd gram = gs.basis.adjoint() * gs.basis;
    CHECK((gram - Eigen::MatrixXcd::Identity(gs.degeneracy, gs.degeneracy))
              .cwiseAbs()
              .maxCoeff() < 1e-10);
}

TEST_CASE("encoded pair operator acts as the spin-1 generator") {
    const auto sz = encode_spin1_pair_operator(Axis::Z);
    // |00> (index 0): eigenvalue +1
    CHECK(std::abs(sz[0] - cplx{1.0, 0.0}) < 1e-14);
    // singlet (|01>-|10>)/sqrt2 is annihilated
    Eigen::Vector4cd singlet;
    singlet << 0, 1.0 / std::sqrt(2.0), -1.0 / std::sqrt(2.0), 0;
    Eigen::Matrix4cd szm;
    for (int r = 0; r < 4; ++r)
        for (int c = 0; c < 4; ++c) szm(r, c) = sz[r * 4 + c];
    CHECK((szm * singlet).norm() < 1e-14);

    // S'_x |00> = (|01> + |10>)/2
    const auto sx = encode_spin1_pair_operator(Axis::X);
    Eigen::Matrix4cd sxm;
    for (int r = 0; r < 4; ++r)
        for (int c = 0; c < 4; ++c) sxm(r, c) = sx[r * 4 + c];
    Eigen::Vector4cd v00;
    v00 << 1, 0, 0, 0;
    const Eigen::Vector4cd out = sxm * v00;
    CHECK(std::abs(out(1) - 0.5) < 1e-14);
    CHECK(std::abs(out(2) - 0.5) < 1e-14);
    CHECK(std::abs(out(0)) < 1e-14);
    CHECK(std::abs(out(3)) < 1e-14);
}

TEST_CASE("encoded aklt bond restricts to the spin-1 bond matrix") {
    const auto h = build_aklt_encoded(2);
    const Eigen::MatrixXcd hd = dense_matrix(h);

    // reference: S.S + (1/3)(S.S)^2 on two spin-1 sites
    Eigen::MatrixXcd ss = Eigen::MatrixXcd::Zero(9, 9);
    for (Axis a : {Axis::X, Axis::Y, Axis::Z}) {
        const auto s = spin1(a);
        Eigen::MatrixXcd k(9, 9);
        for (int r0 = 0; r0 < 3; ++r0)
            for (int r1 = 0; r1 < 3; ++r1)
                for (int c0 = 0; c0 < 3; ++c0)
                    for (int c1 = 0; c1 < 3; ++c1)
                        k(3 * r0 + r1, 3 * c0 + c1) = s(r0, c0) * s(r1, c1);
        ss += k;
    }
    const Eigen::MatrixXcd ref = ss + (ss * ss) / 3.0;

    // isometry of both pairs: qubit index b = q0 + 2q1 + 4q2 + 8q3
    Eigen::MatrixXcd w = Eigen::MatrixXcd::Zero(16, 9);
    for (int k0 = 0; k0 < 3; ++k0)
        for (int k1 = 0; k1 < 3; ++k1)
            for (int b = 0; b < 16; ++b) {
                const int q0 = b & 1, q1 = (b >> 1) & 1;
                const int q2 = (b >> 2) & 1, q3 = (b >> 3) & 1;
                w(b, 3 * k0 + k1) = pair_amp(k0, q0, q1) * pair_amp(k1, q2, q3);
            }
    const Eigen::MatrixXcd restricted = w.adjoint() * hd * w;
    CHECK((restricted - ref).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("encoded aklt chain at n'=5: degeneracy 4, open-chain energy") {
    const auto gs = exact_diagonalize(build_aklt_encoded(5));
    CHECK(gs.degeneracy == 4);
    // valence-bond zero modes of the projector form: E0 = -2(N'-1)/3
    CHECK(gs.energy == doctest::Approx(-8.0 / 3.0).epsilon(1e-9));
}

TEST_CASE("encoded xxz chain at n'=4, delta=-1: (-3, 9)") {
    const auto gs = exact_diagonalize(build_xxz_encoded(4, -1.0));
    CHECK(gs.energy == doctest::Approx(-3.0).epsilon(1e-10));
    CHECK(gs.degeneracy == 9);
}

TEST_CASE("encoded xy bond has zero expectation on the polarized state") {
    const auto h = build_xxz_encoded(2, 0.0);
    qsim::StateVector s = qsim::zero_state(4); // encoded |00>, all spins up
    CHECK(qsim::expectation(s, h) == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("diagonal 2x2 sanity case") {
    PauliSum h(1);
    h.add(-1.0, {{0, Axis::Z}}); // diag(-1, 1)
    const auto gs = exact_diagonalize(h);
    CHECK(gs.energy == doctest::Approx(-1.0));
    CHECK(gs.degeneracy == 1);
}

TEST_CASE("dimension above 4096 is a capability error") {
    PauliSum h(13);
    h.add(1.0, {{0, Axis::Z}});
    CHECK_THROWS_AS(exact_diagonalize(h), capability_error);
}

TEST_CASE("encoded operators never leak out of the symmetric subspace") {
    // random encoded product state, then H applied term by term
    const int np = 3;
    const auto h = build_aklt_encoded(np);
    RandomStream rng(17);
    qsim::StateVector psi(2 * np);
    std::vector<Eigen::Vector3cd> site(np);
    for (int p = 0; p < np; ++p) {
        for (int k = 0; k < 3; ++k) site[p](k) = cplx{rng.normal(), rng.normal()};
        site[p].normalize();
    }
    for (std::size_t b = 0; b < psi.dim(); ++b) {
        cplx amp = 1.0;
        for (int p = 0; p < np; ++p) {
            const int qa = (b >> (2 * p)) & 1, qb = (b >> (2 * p + 1)) & 1;
            cplx site_amp = 0.0;
            for (int k = 0; k < 3; ++k)
                site_amp += site[p](k) * pair_amp(k, qa, qb);
            amp *= site_amp;
        }
        psi.amplitudes[b] = amp;
    }
    CHECK(qsim::norm(psi) == doctest::Approx(1.0).epsilon(1e-10));

    auto hpsi = qsim::apply_observable(psi, qsim::compile(h));
    const double nm = qsim::norm(hpsi);
    for (auto& a : hpsi.amplitudes) a /= nm;
    for (int p = 0; p < np; ++p) {
        const auto proj = pair_singlet_projector(2 * np, p);
        CHECK(std::abs(qsim::expectation(hpsi, proj)) < 1e-10);
    }
}

TEST_CASE("mg reference basis is orthonormal and spans the ground space") {
    for (int n : {9, 10}) {
        const auto h = build_mg(n);
        const auto gs = exact_diagonalize(h);
        const auto ref = mg_reference_basis(n, gs);
        CHECK(ref.cols() == gs.degeneracy);
        const Eigen::MatrixXcd gram = ref.adjoint() * ref;
        CHECK((gram - Eigen::MatrixXcd::Identity(ref.cols(), ref.cols()))
                  .cwiseAbs()
                  .maxCoeff() < 1e-10);
        // same span: projecting onto the ED basis loses nothing
        const Eigen::MatrixXcd proj = gs.basis * (gs.basis.adjoint() * ref);
        CHECK((proj - ref).cwiseAbs().maxCoeff() < 1e-8);
    }
}

#include <doctest.h>

#include <bit>
#include <cmath>
#include <complex>

#include "gqc/models/spin_models.hpp"
#include "gqc/qsim/shots.hpp"
#include "gqc/qsim/state.hpp"
#include "gqc/rng.hpp"

using namespace gqc;
using namespace gqc::qsim;

namespace {

constexpr cplx im{0.0, 1.0};

StateVector random_state(int n, std::uint64_t seed) {
    RandomStream rng(seed);
    StateVector s(n);
    for (auto& a : s.amplitudes) a = {rng.normal(), rng.normal()};
    const double nm = norm(s);
    for (auto& a : s.amplitudes) a /= nm;
    return s;
}

std::vector<cplx> rz_matrix(double t) {
    return {std::exp(-im * (t / 2)), 0.0, 0.0, std::exp(im * (t / 2))};
}

} // namespace

TEST_CASE("x gate permutes basis states") {
    StateVector s = zero_state(2);
    const std::vector<cplx> x = {0, 1, 1, 0};
    const int t0[1] = {0};
    apply_gate(s, x, t0);
    // |00> -> |10> (site 0 flipped): index bit 0 set
    CHECK(std::abs(s.amplitudes[1] - cplx{1, 0}) < 1e-15);
    PauliSum z0(2);
    z0.add(1.0, {{0, Axis::Z}});
    PauliSum z1(2);
    z1.add(1.0, {{1, Axis::Z}});
    CHECK(expectation(s, z0) == doctest::Approx(-1.0));
    CHECK(expectation(s, z1) == doctest::Approx(1.0));
}

TEST_CASE("identity gate leaves any state unchanged") {
    StateVector s = random_state(3, 11);
    const StateVector before = s;
    const std::vector<cplx> id = {1, 0, 0, 1};
    const int t[1] = {1};
    apply_gate(s, id, t);
    for (std::size_t i = 0; i < s.dim(); ++i)
        CHECK(std::abs(s.amplitudes[i] - before.amplitudes[i]) < 1e-15);
}

TEST_CASE("rz composed with its inverse restores the state") {
    StateVector s = random_state(4, 5);
    const StateVector before = s;
    const int t[1] = {2};
    apply_gate(s, rz_matrix(M_PI / 2), t);
    apply_gate(s, rz_matrix(-M_PI / 2), t);
    double err = 0;
    for (std::size_t i = 0; i < s.dim(); ++i)
        err = std::max(err, std::abs(s.amplitudes[i] - before.amplitudes[i]));
    CHECK(err < 1e-12);
}

TEST_CASE("non-unitary block is rejected") {
    StateVector s = zero_state(2);
    const std::vector<cplx> bad = {1, 0, 0, 2};
    const int t[1] = {0};
    CHECK_THROWS_AS(apply_gate(s, bad, t), contract_error);
}

TEST_CASE("site out of range is an input error") {
    StateVector s = zero_state(2);
    const std::vector<cplx> x = {0, 1, 1, 0};
    const int t[1] = {2};
    CHECK_THROWS_AS(apply_gate(s, x, t), input_error);
}

TEST_CASE("sigma_z expectations on |0...0>") {
    StateVector s = zero_state(5);
    for (int i = 0; i < 5; ++i) {
        PauliSum z(5);
        z.add(1.0, {{i, Axis::Z}});
        CHECK(expectation(s, z) == doctest::Approx(1.0));
    }
}

TEST_CASE("polarized state energy of the mg chain") {
    // every one of the 3(N-2) bonds contributes +1 on |up...up>
    const auto h = models::build_mg(9);
    StateVector s = zero_state(9);
    CHECK(expectation(s, h) == doctest::Approx(21.0));
}

TEST_CASE("ground vectors of the mg chain at n=9 have energy -21") {
    const auto h = models::build_mg(9);
    const auto gs = models::exact_diagonalize(h);
    for (int c = 0; c < gs.degeneracy; ++c) {
        StateVector s(9);
        for (std::size_t r = 0; r < s.dim(); ++r) s.amplitudes[r] = gs.basis(r, c);
        CHECK(expectation(s, h) == doctest::Approx(-21.0).epsilon(1e-8));
    }
}

TEST_CASE("expectation size mismatch is an input error") {
    StateVector s = zero_state(3);
    PauliSum z(4);
    z.add(1.0, {{0, Axis::Z}});
    CHECK_THROWS_AS(expectation(s, z), input_error);
}

TEST_CASE("hermiticity: imaginary part of expectations vanishes") {
    const StateVector s = random_state(6, 77);
    PauliSum obs(6);
    RandomStream rng(3);
    for (int t = 0; t < 20; ++t) {
        std::vector<std::pair<int, Axis>> ops;
        for (int q = 0; q < 6; ++q)
            if (rng.uniform() < 0.5)
                ops.emplace_back(q, static_cast<Axis>(int(rng.uniform() * 3)));
        obs.add(rng.normal(), ops);
    }
    CHECK(std::abs(expectation_complex(s, compile(obs)).imag()) < 1e-10);
}

TEST_CASE("norm is preserved by random gate sequences") {
    StateVector s = zero_state(5);
    RandomStream rng(9);
    for (int i = 0; i < 200; ++i) {
        const double t = 4 * M_PI * (rng.uniform() - 0.5);
        const int q = int(rng.uniform() * 5);
        const int tq[1] = {q};
        apply_gate(s, rz_matrix(t), tq);
        const double c = std::cos(t / 2), sn = std::sin(t / 2);
        const std::vector<cplx> ry = {c, -sn, sn, c};
        apply_gate(s, ry, tq);
    }
    CHECK(std::abs(norm(s) - 1.0) < 1e-9);
}

TEST_CASE("grouping merges compatible terms") {
    PauliSum obs(3);
    obs.add(1.0, {{1, Axis::Z}});
    obs.add(1.0, {{2, Axis::Z}});
    const auto plan = group_terms(obs, 100);
    CHECK(plan.n_settings() == 1);

    PauliSum obs2(3);
    obs2.add(1.0, {{1, Axis::X}});
    obs2.add(1.0, {{1, Axis::Z}});
    CHECK(group_terms(obs2, 100).n_settings() == 2);
}

TEST_CASE("mg hamiltonian groups into at most 3 settings") {
    const auto h = models::build_mg(5);
    const auto plan = group_terms(h, 100);
    CHECK(plan.n_settings() <= 3);
}

TEST_CASE("zero-variance outcome is exact at any shot count") {
    StateVector s = zero_state(1);
    PauliSum z(1);
    z.add(1.0, {{0, Axis::Z}});
    for (long shots : {1L, 10L, 1000L}) {
        const auto plan = group_terms(z, shots);
        CHECK(estimate_shots(s, z, plan, 7u) == doctest::Approx(1.0));
    }
}

TEST_CASE("sigma_x on |0> stays inside the 3-sigma binomial band") {
    StateVector s = zero_state(1);
    PauliSum x(1);
    x.add(1.0, {{0, Axis::X}});
    const auto plan = group_terms(x, 10000);
    RandomStream rng = substream(21, "band");
    const double est = estimate_shots(s, x, plan, rng);
    CHECK(std::abs(est) < 0.03); // 3/sqrt(10^4)
}

TEST_CASE("mg n=5 ground-state energy estimate at 1.2e4 shots") {
    const auto h = models::build_mg(5);
    const auto gs = models::exact_diagonalize(h);
    StateVector s(5);
    for (std::size_t r = 0; r < s.dim(); ++r) s.amplitudes[r] = gs.basis(r, 0);
    const auto plan = group_terms(h, 12000);
    RandomStream rng = substream(4, "mg5");
    const double est = estimate_shots(s, h, plan, rng);
    CHECK(std::abs(est - (-9.0)) < 0.15);
}

TEST_CASE("uncovered term is an input error") {
    StateVector s = zero_state(2);
    PauliSum z(2);
    z.add(1.0, {{0, Axis::Z}});
    PauliSum zx(2);
    zx.add(1.0, {{0, Axis::Z}});
    zx.add(1.0, {{0, Axis::X}});
    const auto plan = group_terms(z, 100); // covers only the z term
    RandomStream rng(1);
    CHECK_THROWS_AS(sample_term_means(s, zx, plan, rng), input_error);
}

TEST_CASE("estimator error halves when shots quadruple") {
    const StateVector s = random_state(3, 123);
    PauliSum obs(3);
    obs.add(0.7, {{0, Axis::X}, {1, Axis::Z}});
    obs.add(-0.4, {{1, Axis::Y}});
    obs.add(0.2, {{2, Axis::Z}});
    auto spread = [&](long shots) {
        const auto plan = group_terms(obs, shots);
        double s1 = 0, s2 = 0;
        const int reps = 100;
        for (int i = 0; i < reps; ++i) {
            RandomStream rng = substream(1000 + i, "conv");
            const double e = estimate_shots(s, obs, plan, rng);
            s1 += e;
            s2 += e * e;
        }
        return std::sqrt(s2 / reps - (s1 / reps) * (s1 / reps));
    };
    const double r = spread(1000) / spread(4000);
    CHECK(r > 1.5); // 2 +- 25%
    CHECK(r < 2.5);
}

TEST_CASE("high-shot estimates agree with exact expectations") {
    // 5-standard-error band, with the standard error computed exactly from
    // the per-setting outcome distribution.
    PauliSum obs(4);
    obs.add(0.8, {{0, Axis::Z}, {1, Axis::Z}});
    obs.add(-0.5, {{1, Axis::X}});
    obs.add(0.3, {{2, Axis::Y}, {3, Axis::X}});
    const long shots = 1000000;
    const auto plan = group_terms(obs, shots);
    for (int trial = 0; trial < 20; ++trial) {
        const StateVector s = random_state(4, 500 + trial);
        const double exact = expectation(s, obs);

        // Var = sum over settings of Var[sum of assigned weighted parities]/shots
        double var = 0.0;
        for (int set = 0; set < plan.n_settings(); ++set) {
            const auto probs = setting_probabilities(s, plan.settings[set]);
            std::vector<double> f(probs.size(), 0.0);
            for (std::size_t t = 0; t < obs.terms.size(); ++t) {
                if (plan.assignment[t] != set) continue;
                std::uint64_t mask = 0;
                for (const auto& [site, axis] : obs.terms[t].ops) {
                    (void)axis;
                    mask |= std::uint64_t{1} << site;
                }
                for (std::size_t b = 0; b < probs.size(); ++b)
                    f[b] += obs.terms[t].coefficient *
                            ((std::popcount(b & mask) & 1) ? -1.0 : 1.0);
            }
            double m1 = 0, m2 = 0;
            for (std::size_t b = 0; b < probs.size(); ++b) {
                m1 += probs[b] * f[b];
                m2 += probs[b] * f[b] * f[b];
            }
            var += (m2 - m1 * m1) / double(shots);
        }
        RandomStream rng = substream(33, "oracle", trial);
        const double est = estimate_shots(s, obs, plan, rng);
        CHECK(std::abs(est - exact) < 5.0 * std::sqrt(var) + 1e-12);
    }
}

// Timing comparison of the serial reference kernels against the OpenMP
// variants: gate application sweeps and batched state preparation.

#include <chrono>
#include <cstdio>
#include <vector>

#include "gqc/ansatz/ansatz.hpp"
#include "gqc/models/spin_models.hpp"
#include "gqc/parallel.hpp"
#include "gqc/qsim/state.hpp"
#include "gqc/rng.hpp"

using namespace gqc;

namespace {

double seconds(const std::function<void()>& fn, int reps) {
    const auto t0 = std::chrono::steady_clock::now();
    for (int i = 0; i < reps; ++i) fn();
    const auto t1 = std::chrono::steady_clock::now();
    return std::chrono::duration<double>(t1 - t0).count() / reps;
}

void bench_gate_kernels() {
    std::printf("gate kernel sweep (100 two-qubit gates per pass)\n");
    std::printf("%8s %14s %14s %8s\n", "qubits", "serial[ms]", "omp[ms]", "ratio");
    for (int n : {10, 12, 14, 16}) {
        RandomStream rng(7);
        qsim::StateVector st = qsim::zero_state(n);
        for (auto& a : st.amplitudes) a = {rng.normal(), rng.normal()};
        const double nm = qsim::norm(st);
        for (auto& a : st.amplitudes) a /= nm;

        ansatz::GateSpec g{ansatz::GateKind::CRY, 0, {0, 1}, 0};
        const auto u = ansatz::gate_matrix(g, 0.3);
        auto pass = [&](auto apply) {
            for (int i = 0; i < 100; ++i) {
                const int a = i % (n - 1);
                const int t[2] = {a, a + 1};
                apply(st, u, t);
            }
        };
        const double ts = seconds(
            [&] { pass([](auto& s, const auto& m, const auto& t) {
                     qsim::apply_dense_serial(s, m, t);
                 }); },
            5);
        const double tp = seconds(
            [&] { pass([](auto& s, const auto& m, const auto& t) {
                     qsim::apply_dense_omp(s, m, t);
                 }); },
            5);
        std::printf("%8d %14.3f %14.3f %8.2f\n", n, ts * 1e3, tp * 1e3, ts / tp);
    }
}

void bench_batch_prepare() {
    const int n = 10, depth = 6, batch = 70;
    const auto tmpl = ansatz::build_mg_ansatz(n, depth);
    const auto h = qsim::compile(models::build_mg(n));
    std::vector<ansatz::ParamVector> thetas(batch);
    for (int m = 0; m < batch; ++m) {
        RandomStream rng = substream(11, "bench", m);
        thetas[m].resize(tmpl.n_params);
        for (auto& v : thetas[m]) v = 0.3 * rng.normal();
    }
    std::vector<double> energies(batch);
    auto work = [&](long m) {
        const auto psi = ansatz::prepare(tmpl, thetas[m]);
        energies[m] = qsim::expectation(psi, h);
    };
    std::printf("\nbatch preparation + energy (mg 10 qubits, depth %d, batch %d)\n",
                depth, batch);
    const double ts = seconds([&] { for_each_index_serial(batch, work); }, 3);
    const double tp = seconds([&] { for_each_index_omp(batch, work); }, 3);
    std::printf("threads=%d  serial %.3f ms  omp %.3f ms  speedup %.2fx\n",
                max_threads(), ts * 1e3, tp * 1e3, ts / tp);
}

} // namespace

int main() {
    bench_gate_kernels();
    bench_batch_prepare();
    return 0;
}

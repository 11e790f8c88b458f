#include <doctest.h>

#include <vector>

#include "gqc/ansatz/ansatz.hpp"
#include "gqc/models/spin_models.hpp"
#include "gqc/parallel.hpp"
#include "gqc/qsim/state.hpp"
#include "gqc/rng.hpp"

using namespace gqc;

TEST_CASE("serial and omp gate kernels agree bitwise") {
    RandomStream rng(31);
    for (int n : {4, 8, 11}) {
        qsim::StateVector a = qsim::zero_state(n);
        for (auto& v : a.amplitudes) v = {rng.normal(), rng.normal()};
        qsim::StateVector b = a;

        for (int i = 0; i < 50; ++i) {
            const ansatz::GateSpec g{i % 2 ? ansatz::GateKind::CRY
                                           : ansatz::GateKind::RZ,
                                     0,
                                     i % 2 ? std::vector<int>{i % (n - 1),
                                                              i % (n - 1) + 1}
                                           : std::vector<int>{i % n},
                                     0};
            const auto u = ansatz::gate_matrix(g, 0.1 * i - 1.7);
            qsim::apply_dense_serial(a, u, g.targets);
            qsim::apply_dense_omp(b, u, g.targets);
        }
        for (std::size_t i = 0; i < a.dim(); ++i)
            CHECK(a.amplitudes[i] == b.amplitudes[i]);
    }
}

TEST_CASE("serial and omp batch sweeps fill identical slots") {
    const auto tmpl = ansatz::build_mg_ansatz(5, 2);
    const auto h = qsim::compile(models::build_mg(5));
    const int batch = 16;
    std::vector<double> serial(batch), omp(batch);
    auto work = [&](std::vector<double>& out) {
        return [&out, &tmpl, &h](long m) {
            RandomStream rng = substream(77, "batch", m);
            ansatz::ParamVector p(tmpl.n_params);
            for (auto& v : p) v = rng.normal();
            out[m] = qsim::expectation(ansatz::prepare(tmpl, p), h);
        };
    };
    for_each_index_serial(batch, work(serial));
    for_each_index_omp(batch, work(omp));
    for (int m = 0; m < batch; ++m) CHECK(serial[m] == omp[m]);
}

#include <doctest.h>

#include <cmath>
#include <numeric>

#include "gqc/models/spin_models.hpp"
#include "gqc/trainer/trainer.hpp"

using namespace gqc;
using namespace gqc::trainer;
using features::FeatureVector;

namespace {

qsim::StateVector column_state(const Eigen::MatrixXcd& u, int col, int n) {
    qsim::StateVector s(n);
    for (Eigen::Index r = 0; r < u.rows(); ++r) s.amplitudes[r] = u(r, col);
    return s;
}

// Full exact-mode loss of a batch of circuit parameter vectors.
double full_loss(const ansatz::CircuitTemplate& tmpl,
                 const std::vector<ansatz::ParamVector>& thetas,
                 const qsim::PauliSum& h,
                 const std::vector<features::FeatureSpec>& specs,
                 double lambda1, double lambda2) {
    std::vector<double> energies;
    std::vector<std::vector<FeatureVector>> feats(specs.size());
    const auto hc = qsim::compile(h);
    for (const auto& th : thetas) {
        const auto psi = ansatz::prepare(tmpl, th);
        energies.push_back(qsim::expectation(psi, hc));
        for (std::size_t k = 0; k < specs.size(); ++k)
            feats[k].push_back(features::compute_features(psi, specs[k]));
    }
    return batch_loss(energies, feats, lambda1, lambda2).total;
}

} // namespace

TEST_CASE("batch loss of identical ground-state copies") {
    const auto h = models::build_mg(9);
    const auto gs = models::exact_diagonalize(h);
    const auto basis = models::mg_reference_basis(9, gs);
    const auto psi = column_state(basis, 0, 9);

    const double e = qsim::expectation(psi, h);
    std::vector<features::FeatureSpec> specs = {
        features::FeatureSpec::make(features::FeatureKind::ONE_BODY, 9),
        features::FeatureSpec::make(features::FeatureKind::TWO_BODY_NN, 9)};
    std::vector<FeatureVector> f = {features::compute_features(psi, specs[0]),
                                    features::compute_features(psi, specs[1])};
    const int m = 4;
    std::vector<double> energies(m, e);
    std::vector<std::vector<FeatureVector>> feats = {
        std::vector<FeatureVector>(m, f[0]),
        std::vector<FeatureVector>(m, f[1])};
    const auto loss = batch_loss(energies, feats, 1.0, 0.2);
    CHECK(loss.total == doctest::Approx(-20.6).epsilon(1e-8));
    CHECK(loss.mean_energy == doctest::Approx(-21.0).epsilon(1e-8));
    CHECK(loss.diversity[0] == doctest::Approx(1.0));
    CHECK(loss.diversity[1] == doctest::Approx(1.0));
}

TEST_CASE("lambda2 = 0 reduces the loss to the mean energy") {
    std::vector<double> energies = {-3.0, -1.0};
    std::vector<std::vector<FeatureVector>> feats = {
        {{1.0, 0.0}, {0.5, 0.5}}};
    // zero lambda2 is outside the config contract but fine for the formula
    const auto loss = batch_loss(energies, feats, 1.0, 0.0);
    CHECK(loss.total == doctest::Approx(-2.0));
}

TEST_CASE("pairwise-orthogonal features leave only the energy term") {
    std::vector<double> energies = {-2.0, -4.0, -6.0};
    std::vector<std::vector<FeatureVector>> feats = {
        {{1, 0, 0}, {0, 1, 0}, {0, 0, 1}},
        {{0, 2, 0}, {0, 0, 3}, {1, 0, 0}}};
    const auto loss = batch_loss(energies, feats, 0.7, 5.0);
    CHECK(loss.total == doctest::Approx(0.7 * -4.0).epsilon(1e-12));
}

TEST_CASE("adam leaves parameters alone under zero gradient") {
    std::vector<double> p = {1.0, -2.0};
    AdamState st(2);
    adam_step(p, {0.0, 0.0}, st, 0.1);
    CHECK(p[0] == 1.0);
    CHECK(p[1] == -2.0);
}

TEST_CASE("adam first step moves by eta per coordinate") {
    std::vector<double> p = {0.0, 0.0};
    AdamState st(2);
    adam_step(p, {3.0, -0.5}, st, 0.01);
    CHECK(p[0] == doctest::Approx(-0.01).epsilon(1e-6));
    CHECK(p[1] == doctest::Approx(0.01).epsilon(1e-6));
}

TEST_CASE("two identical-gradient adam steps equal one step at doubled eta") {
    std::vector<double> p1 = {0.0};
    AdamState s1(1);
    adam_step(p1, {2.0}, s1, 0.01);
    adam_step(p1, {2.0}, s1, 0.01);

    std::vector<double> p2 = {0.0};
    AdamState s2(1);
    adam_step(p2, {2.0}, s2, 0.02);
    CHECK(p1[0] == doctest::Approx(p2[0]).epsilon(1e-9));
}

TEST_CASE("lambda2 anneal endpoints and midpoint") {
    Lambda2Schedule s{10.0, 0.2, 500};
    CHECK(anneal_lambda2(0, s) == doctest::Approx(10.0));
    CHECK(anneal_lambda2(500, s) == doctest::Approx(0.2));
    CHECK(anneal_lambda2(5000, s) == doctest::Approx(0.2));
    CHECK(anneal_lambda2(250, s) == doctest::Approx(5.1));
    double prev = s.at(0);
    for (long i = 1; i < 700; i += 7) {
        CHECK(s.at(i) <= prev + 1e-12);
        prev = s.at(i);
    }
}

TEST_CASE("learning rate decays exponentially to a floor") {
    LrSchedule lr{3e-4, 0.995, 10, 0.1};
    CHECK(lr.at(0) == doctest::Approx(3e-4));
    CHECK(lr.at(10) == doctest::Approx(3e-4 * 0.995));
    CHECK(lr.at(100000) == doctest::Approx(3e-5));
}

TEST_CASE("shift rule is exact on a single-qubit ry loss") {
    // L(t) = <sigma_z> after Ry(t)|0> = cos t
    ansatz::CircuitTemplate t;
    t.family = ansatz::AnsatzFamily::MG_BLOCK;
    t.n_qubits = 1;
    t.depth = 1;
    t.gates.push_back({ansatz::GateKind::RY, 0, {0}, 0});
    t.n_params = 1;

    for (double angle : {0.0, M_PI / 4, 1.0, -0.7, 2.5}) {
        ansatz::ParamVector theta = {angle};
        auto loss_at = [&](int, double value) { return std::cos(value); };
        const auto g = grad_stochastic_shift(t, theta, {0}, loss_at);
        CHECK(std::abs(g[0] - (-std::sin(angle))) < 1e-12);
    }

    auto constant = [](int, double) { return 4.2; };
    const auto g0 = grad_stochastic_shift(t, {0.3}, {0}, constant);
    CHECK(g0[0] == 0.0);
}

TEST_CASE("subset-averaged stochastic shift scales by K over n_p") {
    // three chained ry gates on one qubit; full-shift gradient of cos(sum)
    ansatz::CircuitTemplate t;
    t.family = ansatz::AnsatzFamily::MG_BLOCK;
    t.n_qubits = 1;
    t.depth = 1;
    for (int i = 0; i < 3; ++i)
        t.gates.push_back({ansatz::GateKind::RY, 0, {0}, i});
    t.n_params = 3;
    const ansatz::ParamVector theta = {0.3, -0.8, 1.1};
    qsim::PauliSum z(1);
    z.add(1.0, {{0, qsim::Axis::Z}});
    const auto zc = qsim::compile(z);

    auto loss_at = [&](int slot, double value) {
        ansatz::ParamVector p = theta;
        p[slot] = value;
        return qsim::expectation(ansatz::prepare(t, p), zc);
    };

    std::vector<int> all = {0, 1, 2};
    const auto full = grad_stochastic_shift(t, theta, all, loss_at);

    for (int k = 1; k <= 2; ++k) {
        std::vector<std::vector<int>> subsets;
        if (k == 1)
            subsets = {{0}, {1}, {2}};
        else
            subsets = {{0, 1}, {0, 2}, {1, 2}};
        std::vector<double> avg(3, 0.0);
        for (const auto& sub : subsets) {
            const auto g = grad_stochastic_shift(t, theta, sub, loss_at);
            for (int i = 0; i < 3; ++i) avg[i] += g[i] / subsets.size();
        }
        for (int i = 0; i < 3; ++i)
            CHECK(avg[i] == doctest::Approx(full[i] * k / 3.0).epsilon(1e-12));
    }
}

TEST_CASE("active sets are uniform without replacement") {
    RandomStream rng(4);
    std::vector<int> counts(10, 0);
    for (int trial = 0; trial < 6000; ++trial) {
        const auto set = draw_active_set(10, 3, rng);
        CHECK(set.size() == 3);
        for (std::size_t i = 1; i < set.size(); ++i) CHECK(set[i] > set[i - 1]);
        for (int s : set) ++counts[s];
    }
    for (int c : counts) {
        CHECK(c > 1500); // expectation 1800, loose band
        CHECK(c < 2100);
    }
}

TEST_CASE("exact single-observable gradient matches finite differences") {
    const auto tmpl = ansatz::build_mg_ansatz(3, 1);
    qsim::PauliSum h(3);
    h.add(0.8, {{0, qsim::Axis::Z}, {1, qsim::Axis::Z}});
    const auto hc = qsim::compile(h);
    RandomStream rng(5);
    ansatz::ParamVector theta(tmpl.n_params);
    for (auto& v : theta) v = rng.normal();

    const double l1_over_m = 0.25;
    const auto grad = grad_circuit_params_exact(tmpl, theta, hc, {}, {},
                                                l1_over_m, 0.2);
    const double step = 1e-5;
    for (int j = 0; j < tmpl.n_params; j += 4) {
        auto p = theta;
        p[j] += step;
        const double lp = l1_over_m * qsim::expectation(ansatz::prepare(tmpl, p), hc);
        p[j] -= 2 * step;
        const double lm = l1_over_m * qsim::expectation(ansatz::prepare(tmpl, p), hc);
        CHECK(grad[j] == doctest::Approx((lp - lm) / (2 * step)).epsilon(1e-6));
    }
}

TEST_CASE("identical batch samples receive identical gradients") {
    const auto tmpl = ansatz::build_mg_ansatz(4, 1);
    const auto h = models::build_mg(4);
    const auto hc = qsim::compile(h);
    std::vector<features::FeatureSpec> specs = {
        features::FeatureSpec::make(features::FeatureKind::ONE_BODY, 4)};
    const auto sc = qsim::compile(specs[0].terms);

    RandomStream rng(6);
    ansatz::ParamVector theta(tmpl.n_params);
    for (auto& v : theta) v = 0.4 * rng.normal();

    const int m = 3;
    const auto psi = ansatz::prepare(tmpl, theta);
    const auto f = features::compute_features(psi, specs[0]);
    std::vector<std::vector<FeatureVector>> feats = {
        std::vector<FeatureVector>(m, f)};
    const auto fg = diversity_feature_gradients(feats);
    std::vector<std::vector<double>> grads;
    for (int i = 0; i < m; ++i)
        grads.push_back(grad_circuit_params_exact(tmpl, theta, hc, {sc},
                                                  {fg[0][i]}, 1.0 / m, 0.2));
    for (int i = 1; i < m; ++i)
        for (int j = 0; j < tmpl.n_params; ++j)
            CHECK(grads[i][j] == doctest::Approx(grads[0][j]).epsilon(1e-12));
}

TEST_CASE("full mg n=5 batch loss gradient matches finite differences") {
    const auto tmpl = ansatz::build_mg_ansatz(5, 3);
    const auto h = models::build_mg(5);
    const auto hc = qsim::compile(h);
    std::vector<features::FeatureSpec> specs = {
        features::FeatureSpec::make(features::FeatureKind::ONE_BODY, 5),
        features::FeatureSpec::make(features::FeatureKind::TWO_BODY_NN, 5)};
    std::vector<qsim::CompiledObservable> specs_c = {
        qsim::compile(specs[0].terms), qsim::compile(specs[1].terms)};

    const int m = 3;
    const double lambda1 = 1.0, lambda2 = 0.8;
    std::vector<ansatz::ParamVector> thetas;
    for (int i = 0; i < m; ++i) {
        RandomStream rng(100 + i);
        ansatz::ParamVector th(tmpl.n_params);
        for (auto& v : th) v = 0.6 * rng.normal();
        thetas.push_back(th);
    }

    std::vector<std::vector<FeatureVector>> feats(2);
    for (const auto& th : thetas) {
        const auto psi = ansatz::prepare(tmpl, th);
        feats[0].push_back(features::compute_features(psi, specs[0]));
        feats[1].push_back(features::compute_features(psi, specs[1]));
    }
    const auto fg = diversity_feature_gradients(feats);

    RandomStream pick(9);
    const double step = 1e-5;
    double worst = 0.0;
    for (int trial = 0; trial < 24; ++trial) {
        const int mi = static_cast<int>(pick.uniform() * m);
        const int j = static_cast<int>(pick.uniform() * tmpl.n_params);
        const auto grad = grad_circuit_params_exact(
            tmpl, thetas[mi], hc, specs_c, {fg[0][mi], fg[1][mi]},
            lambda1 / m, lambda2);

        auto shifted = thetas;
        shifted[mi][j] += step;
        const double lp = full_loss(tmpl, shifted, h, specs, lambda1, lambda2);
        shifted[mi][j] -= 2 * step;
        const double lm = full_loss(tmpl, shifted, h, specs, lambda1, lambda2);
        const double fd = (lp - lm) / (2 * step);
        worst = std::max(worst, std::abs(grad[j] - fd) / std::max(1.0, std::abs(fd)));
    }
    CHECK(worst < 1e-5);
}

TEST_CASE("convergence tracker counts cumulative hits") {
    ConvergenceTracker t{{0.02, 0.08, 3}, 0};
    t.update(-8.99, -8.95, -9.0); // both inside
    t.update(-8.9, -8.5, -9.0);   // both outside
    t.update(-9.01, -8.93, -9.0);
    CHECK_FALSE(t.converged());
    t.update(-9.0, -9.0, -9.0);
    CHECK(t.converged());
}

TEST_CASE("end-to-end weight gradient on a 3-site toy") {
    // miniature instance: full analytic dL/d(weights) vs finite differences
    const auto tmpl = ansatz::build_mg_ansatz(3, 1);
    const auto h = models::build_mg(3);
    const auto hc = qsim::compile(h);
    std::vector<features::FeatureSpec> specs = {
        features::FeatureSpec::make(features::FeatureKind::ONE_BODY, 3),
        features::FeatureSpec::make(features::FeatureKind::TWO_BODY_NN, 3)};
    std::vector<qsim::CompiledObservable> specs_c = {
        qsim::compile(specs[0].terms), qsim::compile(specs[1].terms)};

    generator::NetworkShape shape;
    shape.input_dim = shape.output_dim = tmpl.n_params;
    shape.encoder_hidden = {8};
    shape.latent_dim = 3;
    shape.decoder_hidden = {8};

    RandomStream init = substream(1, "init");
    auto params = generator::GeneratorParams::init(shape, init);
    const int m = 2;
    const double lambda1 = 1.0, lambda2 = 0.5;

    auto pipeline = [&](const generator::GeneratorParams& p,
                        std::vector<generator::ForwardCache>* caches) {
        std::vector<ansatz::ParamVector> thetas;
        for (int i = 0; i < m; ++i) {
            Eigen::VectorXd theta0(tmpl.n_params);
            RandomStream prior = substream(2, "prior", i);
            for (int j = 0; j < tmpl.n_params; ++j) theta0(j) = prior.normal();
            RandomStream eps = substream(2, "eps", i);
            auto cache = generator::forward(p, shape, theta0, eps);
            thetas.emplace_back(cache.theta.data(),
                                cache.theta.data() + cache.theta.size());
            if (caches) caches->push_back(std::move(cache));
        }
        return thetas;
    };

    std::vector<generator::ForwardCache> caches;
    const auto thetas = pipeline(params, &caches);

    std::vector<std::vector<FeatureVector>> feats(2);
    for (const auto& th : thetas) {
        const auto psi = ansatz::prepare(tmpl, th);
        feats[0].push_back(features::compute_features(psi, specs[0]));
        feats[1].push_back(features::compute_features(psi, specs[1]));
    }
    const auto fg = diversity_feature_gradients(feats);

    auto total = generator::GeneratorGrads::zeros(shape);
    for (int i = 0; i < m; ++i) {
        const auto dtheta = grad_circuit_params_exact(
            tmpl, thetas[i], hc, specs_c, {fg[0][i], fg[1][i]}, lambda1 / m,
            lambda2);
        const Eigen::VectorXd up = Eigen::Map<const Eigen::VectorXd>(
            dtheta.data(), static_cast<Eigen::Index>(dtheta.size()));
        total.accumulate(generator::backward(params, shape, caches[i], up));
    }

    const auto flat_g = generator::flatten(total);
    auto flat_p = generator::flatten(params);
    RandomStream pick(33);
    const double step = 1e-5;
    double worst = 0.0;
    for (int trial = 0; trial < 60; ++trial) {
        const std::size_t i =
            static_cast<std::size_t>(pick.uniform() * flat_p.size());
        const double keep = flat_p[i];
        auto eval = [&](double v) {
            flat_p[i] = v;
            generator::unflatten(params, flat_p);
            const auto ths = pipeline(params, nullptr);
            return full_loss(tmpl, ths, h, specs, lambda1, lambda2);
        };
        const double lp = eval(keep + step);
        const double lm = eval(keep - step);
        flat_p[i] = keep;
        generator::unflatten(params, flat_p);
        const double fd = (lp - lm) / (2 * step);
        worst = std::max(worst, std::abs(flat_g[i] - fd) / std::max(1.0, std::abs(fd)));
    }
    CHECK(worst < 1e-4);
}

TEST_CASE("seeded miniature training run reaches the ground space") {
    TrainConfig cfg;
    cfg.model = {models::SpinModel::MG, 3, -1.0};
    cfg.depth = 1;
    cfg.network.input_dim = cfg.network.output_dim = 30;
    cfg.network.encoder_hidden = {16};
    cfg.network.latent_dim = 4;
    cfg.network.decoder_hidden = {16};
    cfg.batch = 8;
    cfg.lambda1 = 1.0;
    cfg.lambda2 = {2.0, 0.2, 60};
    cfg.learning_rate = {3e-3, 0.995, 10, 0.1};
    cfg.feature_kinds = {features::FeatureKind::ONE_BODY,
                         features::FeatureKind::TWO_BODY_NN};
    cfg.mode = GradMode::EXACT;
    cfg.convergence = {0.05, 0.2, 3};
    cfg.max_iterations = 2500;
    cfg.seed = 11;
    cfg.checkpoint_interval = 0;

    const auto result = train(cfg);
    CHECK(result.e0_reference == doctest::Approx(-3.0));
    CHECK(result.converged);
    CHECK(result.log.back().mean_energy < -2.9);
    // early diversity phase spreads the batch before energy descent
    CHECK(result.log.front().mean_fidelity >
          result.log[std::min<std::size_t>(60, result.log.size() - 1)]
              .mean_fidelity);
}

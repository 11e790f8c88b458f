#include "gqc/trainer/adam.hpp"

#include <cmath>

namespace gqc::trainer {

void adam_step(std::vector<double>& params, const std::vector<double>& grads,
               AdamState& state, double eta, const AdamConfig& cfg) {
    require(params.size() == grads.size(), "adam_step: size mismatch");
    require(state.m.size() == params.size() && state.v.size() == params.size(),
            "adam_step: state size mismatch");
    state.t += 1;
    const double bc1 = 1.0 - std::pow(cfg.beta1, static_cast<double>(state.t));
    const double bc2 = 1.0 - std::pow(cfg.beta2, static_cast<double>(state.t));
    for (std::size_t i = 0; i < params.size(); ++i) {
        state.m[i] = cfg.beta1 * state.m[i] + (1.0 - cfg.beta1) * grads[i];
        state.v[i] = cfg.beta2 * state.v[i] + (1.0 - cfg.beta2) * grads[i] * grads[i];
        const double mhat = state.m[i] / bc1;
        const double vhat = state.v[i] / bc2;
        params[i] -= eta * mhat / (std::sqrt(vhat) + cfg.eps);
    }
}

} // namespace gqc::trainer

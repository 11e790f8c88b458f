#pragma once

#include <vector>

#include "gqc/common.hpp"

namespace gqc::trainer {

struct AdamConfig {
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps = 1e-8;
};

struct AdamState {
    std::vector<double> m;
    std::vector<double> v;
    long t = 0;

    explicit AdamState(std::size_t n = 0) : m(n, 0.0), v(n, 0.0) {}
};

// One Adam update with bias correction; params -= eta * m_hat / (sqrt(v_hat) + eps).
void adam_step(std::vector<double>& params, const std::vector<double>& grads,
               AdamState& state, double eta, const AdamConfig& cfg = {});

} // namespace gqc::trainer

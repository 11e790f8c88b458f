#pragma once

#include <Eigen/Dense>
#include <optional>
#include <vector>

#include "gqc/common.hpp"
#include "gqc/rng.hpp"

namespace gqc::generator {

using Eigen::MatrixXd;
using Eigen::VectorXd;

// selu(x) = lambda*x (x>0), lambda*alpha*(e^x - 1) (x<=0)
double selu(double x);
double selu_derivative(double x);
constexpr double selu_lambda = 1.0507009873554804934193349852946;
constexpr double selu_alpha = 1.6732632423543772848170429916717;

struct NetworkShape {
    int input_dim = 0; // n_p
    std::vector<int> encoder_hidden;
    int latent_dim = 0;
    std::vector<int> decoder_hidden;
    int output_dim = 0; // n_p

    void validate() const;
    // Full layer width lists including input/output.
    std::vector<int> encoder_widths() const; // input .. hidden .. 2*latent
    std::vector<int> decoder_widths() const; // latent .. hidden .. output
};

struct GeneratorParams {
    std::vector<MatrixXd> enc_w;
    std::vector<VectorXd> enc_b;
    std::vector<MatrixXd> dec_w;
    std::vector<VectorXd> dec_b;

    std::size_t count() const;
    // Zero-mean Gaussian weights at variance 1/fan_in, zero biases.
    static GeneratorParams init(const NetworkShape& shape, RandomStream& rng);
    static GeneratorParams zeros(const NetworkShape& shape);
};

struct LatentSample {
    VectorXd mu;
    VectorXd log_var;
    VectorXd eps;
    VectorXd z; // mu + exp(log_var/2) .* eps
};

struct ForwardCache {
    VectorXd theta0;
    std::vector<VectorXd> enc_pre; // pre-activations per layer
    std::vector<VectorXd> enc_act; // post-activations (inputs to next layer)
    LatentSample latent;
    std::vector<VectorXd> dec_pre;
    std::vector<VectorXd> dec_act;
    VectorXd theta;
};

LatentSample encode(const GeneratorParams& p, const NetworkShape& shape,
                    const VectorXd& theta0, RandomStream& eps_stream);
VectorXd decode(const GeneratorParams& p, const NetworkShape& shape,
                const VectorXd& z);

// Full pass with cached activations for backward().
ForwardCache forward(const GeneratorParams& p, const NetworkShape& shape,
                     const VectorXd& theta0, RandomStream& eps_stream);

struct GeneratorGrads {
    std::vector<MatrixXd> enc_w;
    std::vector<VectorXd> enc_b;
    std::vector<MatrixXd> dec_w;
    std::vector<VectorXd> dec_b;

    static GeneratorGrads zeros(const NetworkShape& shape);
    void accumulate(const GeneratorGrads& other);
};

// Reverse-mode gradients of a scalar loss through decoder, reparameterized
// latent (dz/dmu = 1, dz/dlogvar = (z-mu)/2) and encoder. Optional direct
// upstream paths into (mu, logvar) are added before the encoder sweep.
GeneratorGrads backward(const GeneratorParams& p, const NetworkShape& shape,
                        const ForwardCache& cache, const VectorXd& dL_dtheta,
                        const std::optional<VectorXd>& dL_dmu = std::nullopt,
                        const std::optional<VectorXd>& dL_dlogvar = std::nullopt);

// Flat views over every tensor, in a fixed order (encoder then decoder,
// weights before biases per layer). Used by the optimizer and checkpoints.
void visit(GeneratorParams& p, const std::function<void(double&)>& fn);
void visit(const GeneratorParams& p, const std::function<void(double)>& fn);
std::vector<double> flatten(const GeneratorParams& p);
void unflatten(GeneratorParams& p, const std::vector<double>& flat);
std::vector<double> flatten(const GeneratorGrads& g);

} // namespace gqc::generator

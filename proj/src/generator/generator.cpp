#include "gqc/generator/generator.hpp"

#include <cmath>
#include <functional>

namespace gqc::generator {

double selu(double x) {
    return x > 0.0 ? selu_lambda * x
                   : selu_lambda * selu_alpha * (std::exp(x) - 1.0);
}

double selu_derivative(double x) {
    return x > 0.0 ? selu_lambda : selu_lambda * selu_alpha * std::exp(x);
}

void NetworkShape::validate() const {
    require(input_dim > 0 && output_dim > 0 && latent_dim > 0,
            "network shape: dimensions must be positive");
    for (int w : encoder_hidden)
        require(w > 0, "network shape: encoder width must be positive");
    for (int w : decoder_hidden)
        require(w > 0, "network shape: decoder width must be positive");
}

std::vector<int> NetworkShape::encoder_widths() const {
    std::vector<int> w;
    w.push_back(input_dim);
    w.insert(w.end(), encoder_hidden.begin(), encoder_hidden.end());
    w.push_back(2 * latent_dim);
    return w;
}

std::vector<int> NetworkShape::decoder_widths() const {
    std::vector<int> w;
    w.push_back(latent_dim);
    w.insert(w.end(), decoder_hidden.begin(), decoder_hidden.end());
    w.push_back(output_dim);
    return w;
}

std::size_t GeneratorParams::count() const {
    std::size_t n = 0;
    for (const auto& w : enc_w) n += w.size();
    for (const auto& b : enc_b) n += b.size();
    for (const auto& w : dec_w) n += w.size();
    for (const auto& b : dec_b) n += b.size();
    return n;
}

namespace {

void init_stack(const std::vector<int>& widths, std::vector<MatrixXd>& ws,
                std::vector<VectorXd>& bs, RandomStream* rng) {
    ws.clear();
    bs.clear();
    for (std::size_t l = 0; l + 1 < widths.size(); ++l) {
        MatrixXd w = MatrixXd::Zero(widths[l + 1], widths[l]);
        if (rng) {
            const double sd = 1.0 / std::sqrt(static_cast<double>(widths[l]));
            for (Eigen::Index i = 0; i < w.size(); ++i)
                w.data()[i] = sd * rng->normal();
        }
        ws.push_back(std::move(w));
        bs.push_back(VectorXd::Zero(widths[l + 1]));
    }
}

} // namespace

GeneratorParams GeneratorParams::init(const NetworkShape& shape,
                                      RandomStream& rng) {
    shape.validate();
    GeneratorParams p;
    init_stack(shape.encoder_widths(), p.enc_w, p.enc_b, &rng);
    init_stack(shape.decoder_widths(), p.dec_w, p.dec_b, &rng);
    // Small-output start: the initial ensemble must be concentrated in angle
    // space so the batch descends coherently before the diversity term
    // spreads it. The output bias offsets the center away from the all-zero
    // stationary point.
    p.dec_w.back() *= 0.05;
    for (Eigen::Index i = 0; i < p.dec_b.back().size(); ++i)
        p.dec_b.back()(i) = 0.3 * rng.normal();
    return p;
}

GeneratorParams GeneratorParams::zeros(const NetworkShape& shape) {
    shape.validate();
    GeneratorParams p;
    init_stack(shape.encoder_widths(), p.enc_w, p.enc_b, nullptr);
    init_stack(shape.decoder_widths(), p.dec_w, p.dec_b, nullptr);
    return p;
}

namespace {

// Affine stack with SELU on all but the last layer. Fills pre/act caches.
VectorXd mlp_forward(const std::vector<MatrixXd>& ws,
                     const std::vector<VectorXd>& bs, const VectorXd& x,
                     std::vector<VectorXd>* pre, std::vector<VectorXd>* act) {
    VectorXd a = x;
    if (act) act->push_back(a);
    for (std::size_t l = 0; l < ws.size(); ++l) {
        VectorXd p = ws[l] * a + bs[l];
        if (pre) pre->push_back(p);
        if (l + 1 < ws.size()) {
            a = p.unaryExpr([](double v) { return selu(v); });
            if (act) act->push_back(a);
        } else {
            a = std::move(p);
        }
    }
    return a;
}

// Backward through the same stack. `delta_out` is dL/d(output). Returns
// dL/d(input); writes per-layer weight/bias grads.
VectorXd mlp_backward(const std::vector<MatrixXd>& ws,
                      const std::vector<VectorXd>& pre,
                      const std::vector<VectorXd>& act, VectorXd delta_out,
                      std::vector<MatrixXd>& gw, std::vector<VectorXd>& gb) {
    VectorXd delta = std::move(delta_out);
    for (std::size_t li = ws.size(); li-- > 0;) {
        gw[li] += delta * act[li].transpose();
        gb[li] += delta;
        VectorXd back = ws[li].transpose() * delta;
        if (li > 0) {
            const VectorXd& p = pre[li - 1];
            delta = back.cwiseProduct(
                p.unaryExpr([](double v) { return selu_derivative(v); }));
        } else {
            delta = std::move(back);
        }
    }
    return delta;
}

} // namespace

LatentSample encode(const GeneratorParams& p, const NetworkShape& shape,
                    const VectorXd& theta0, RandomStream& eps_stream) {
    require(theta0.size() == shape.input_dim, "encode: input length mismatch");
    const VectorXd out = mlp_forward(p.enc_w, p.enc_b, theta0, nullptr, nullptr);
    LatentSample s;
    s.mu = out.head(shape.latent_dim);
    s.log_var = out.tail(shape.latent_dim);
    s.eps = VectorXd(shape.latent_dim);
    for (int i = 0; i < shape.latent_dim; ++i) s.eps(i) = eps_stream.normal();
    s.z = s.mu + (s.log_var * 0.5).array().exp().matrix().cwiseProduct(s.eps);
    return s;
}

VectorXd decode(const GeneratorParams& p, const NetworkShape& shape,
                const VectorXd& z) {
    require(z.size() == shape.latent_dim, "decode: latent length mismatch");
    return mlp_forward(p.dec_w, p.dec_b, z, nullptr, nullptr);
}

ForwardCache forward(const GeneratorParams& p, const NetworkShape& shape,
                     const VectorXd& theta0, RandomStream& eps_stream) {
    require(theta0.size() == shape.input_dim, "forward: input length mismatch");
    ForwardCache c;
    c.theta0 = theta0;
    const VectorXd out =
        mlp_forward(p.enc_w, p.enc_b, theta0, &c.enc_pre, &c.enc_act);
    c.latent.mu = out.head(shape.latent_dim);
    c.latent.log_var = out.tail(shape.latent_dim);
    c.latent.eps = VectorXd(shape.latent_dim);
    for (int i = 0; i < shape.latent_dim; ++i)
        c.latent.eps(i) = eps_stream.normal();
    c.latent.z = c.latent.mu +
                 (c.latent.log_var * 0.5)
                     .array()
                     .exp()
                     .matrix()
                     .cwiseProduct(c.latent.eps);
    c.theta = mlp_forward(p.dec_w, p.dec_b, c.latent.z, &c.dec_pre, &c.dec_act);
    return c;
}

GeneratorGrads GeneratorGrads::zeros(const NetworkShape& shape) {
    GeneratorGrads g;
    init_stack(shape.encoder_widths(), g.enc_w, g.enc_b, nullptr);
    init_stack(shape.decoder_widths(), g.dec_w, g.dec_b, nullptr);
    return g;
}

void GeneratorGrads::accumulate(const GeneratorGrads& other) {
    for (std::size_t i = 0; i < enc_w.size(); ++i) enc_w[i] += other.enc_w[i];
    for (std::size_t i = 0; i < enc_b.size(); ++i) enc_b[i] += other.enc_b[i];
    for (std::size_t i = 0; i < dec_w.size(); ++i) dec_w[i] += other.dec_w[i];
    for (std::size_t i = 0; i < dec_b.size(); ++i) dec_b[i] += other.dec_b[i];
}

GeneratorGrads backward(const GeneratorParams& p, const NetworkShape& shape,
                        const ForwardCache& cache, const VectorXd& dL_dtheta,
                        const std::optional<VectorXd>& dL_dmu,
                        const std::optional<VectorXd>& dL_dlogvar) {
    ensure(cache.theta.size() == shape.output_dim,
           "backward: forward cache missing or mismatched");
    require(dL_dtheta.size() == shape.output_dim,
            "backward: upstream gradient length mismatch");

    GeneratorGrads g = GeneratorGrads::zeros(shape);

    const VectorXd dz = mlp_backward(p.dec_w, cache.dec_pre, cache.dec_act,
                                     dL_dtheta, g.dec_w, g.dec_b);

    VectorXd dmu = dz;
    VectorXd dlogvar = dz.cwiseProduct(cache.latent.z - cache.latent.mu) * 0.5;
    if (dL_dmu) dmu += *dL_dmu;
    if (dL_dlogvar) dlogvar += *dL_dlogvar;

    VectorXd dout(2 * shape.latent_dim);
    dout << dmu, dlogvar;
    mlp_backward(p.enc_w, cache.enc_pre, cache.enc_act, std::move(dout), g.enc_w,
                 g.enc_b);
    return g;
}

namespace {

template <typename Params, typename Fn>
void visit_impl(Params& p, const Fn& fn) {
    for (auto& w : p.enc_w)
        for (Eigen::Index i = 0; i < w.size(); ++i) fn(w.data()[i]);
    for (auto& b : p.enc_b)
        for (Eigen::Index i = 0; i < b.size(); ++i) fn(b.data()[i]);
    for (auto& w : p.dec_w)
        for (Eigen::Index i = 0; i < w.size(); ++i) fn(w.data()[i]);
    for (auto& b : p.dec_b)
        for (Eigen::Index i = 0; i < b.size(); ++i) fn(b.data()[i]);
}

} // namespace

void visit(GeneratorParams& p, const std::function<void(double&)>& fn) {
    visit_impl(p, fn);
}

void visit(const GeneratorParams& p, const std::function<void(double)>& fn) {
    visit_impl(p, [&](const double& v) { fn(v); });
}

std::vector<double> flatten(const GeneratorParams& p) {
    std::vector<double> out;
    out.reserve(p.count());
    visit(p, [&](double v) { out.push_back(v); });
    return out;
}

void unflatten(GeneratorParams& p, const std::vector<double>& flat) {
    require(flat.size() == p.count(), "unflatten: size mismatch");
    std::size_t i = 0;
    visit(p, [&](double& v) { v = flat[i++]; });
}

std::vector<double> flatten(const GeneratorGrads& g) {
    std::vector<double> out;
    for (const auto& w : g.enc_w)
        out.insert(out.end(), w.data(), w.data() + w.size());
    for (const auto& b : g.enc_b)
        out.insert(out.end(), b.data(), b.data() + b.size());
    for (const auto& w : g.dec_w)
        out.insert(out.end(), w.data(), w.data() + w.size());
    for (const auto& b : g.dec_b)
        out.insert(out.end(), b.data(), b.data() + b.size());
    return out;
}

} // namespace gqc::generator

// Copyright Contributors to the iags project
// SPDX-License-Identifier: Apache-2.0

#include "iags/predictor/predictor.hpp"

#include "iags/common/error.hpp"
#include "iags/common/text_io.hpp"

#include <cmath>
#include <random>

namespace iags::predictor {

namespace {

double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

void check_channels(const FeatureMap& features, int k)
{
    if (features.channels() != k)
        throw Error(ErrorCategory::InvalidInput, "predictor: feature channel count does not match the head");
}

} // namespace

PredictorParams init_predictor(int channels, std::uint64_t seed)
{
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal(0.0, 0.01);
    PredictorParams phi;
    phi.weights.resize(channels);
    for (int k = 0; k < channels; ++k)
        phi.weights[k] = normal(rng);
    return phi;
}

ScalarMap predict(const FeatureMap& features, const PredictorParams& phi)
{
    const int k = phi.channels();
    check_channels(features, k);
    ScalarMap h = make_scalar(features.width(), features.height());
    for (std::size_t p = 0; p < h.size(); ++p) {
        double z = phi.bias;
        for (int c = 0; c < k; ++c)
            z += phi.weights[c] * features[p * k + c];
        h[p] = sigmoid(z);
    }
    return h;
}

Mask mlp_mask(const ScalarMap& inlier_prob)
{
    Mask m = make_mask(inlier_prob.width(), inlier_prob.height());
    for (std::size_t i = 0; i < m.size(); ++i)
        m[i] = inlier_prob[i] < 0.5 ? 1 : 0;
    return m;
}

PredictorGrad predictor_backward(const FeatureMap& features, const ScalarMap& inlier_prob, const ScalarMap& grad_h)
{
    const int k = features.channels();
    if (!features.same_shape(inlier_prob) || !features.same_shape(grad_h))
        throw Error(ErrorCategory::InvalidInput, "predictor_backward: map dimensions differ");
    PredictorGrad g{Eigen::VectorXd::Zero(k), 0.0};
    for (std::size_t p = 0; p < inlier_prob.size(); ++p) {
        const double gz = grad_h[p] * inlier_prob[p] * (1.0 - inlier_prob[p]);
        if (gz == 0.0)
            continue;
        g.bias += gz;
        for (int c = 0; c < k; ++c)
            g.weights[c] += gz * features[p * k + c];
    }
    return g;
}

std::string format_predictor(const PredictorParams& phi)
{
    std::string out = std::to_string(phi.channels()) + " " + io::format_double(phi.bias);
    for (int c = 0; c < phi.channels(); ++c)
        out += " " + io::format_double(phi.weights[c]);
    return out + "\n";
}

PredictorParams parse_predictor(const std::string& text, const std::string& source)
{
    const auto tokens = io::split_tokens(text);
    if (tokens.size() < 2)
        throw Error(ErrorCategory::InvalidInput, source + ": predictor needs a channel count and a bias");
    const long k = io::parse_long(tokens[0], source);
    if (k < 1 || tokens.size() != static_cast<std::size_t>(k) + 2)
        throw Error(ErrorCategory::InvalidInput, source + ": predictor weight count does not match its header");
    PredictorParams phi;
    phi.bias = io::parse_double(tokens[1], source);
    phi.weights.resize(k);
    for (long c = 0; c < k; ++c)
        phi.weights[c] = io::parse_double(tokens[c + 2], source);
    return phi;
}

void write_predictor(const std::filesystem::path& path, const PredictorParams& phi)
{
    io::write_text_file(path, format_predictor(phi));
}

PredictorParams read_predictor(const std::filesystem::path& path)
{
    return parse_predictor(io::read_text_file(path), path.string());
}

} // namespace iags::predictor

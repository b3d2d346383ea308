// Copyright Contributors to the iags project
// SPDX-License-Identifier: Apache-2.0

#include "iags/train/optimizer.hpp"

#include "iags/common/error.hpp"

#include <algorithm>
#include <cmath>

namespace iags::train {

namespace {

inline void adam_update(double& param, double grad, double& m, double& v, long t, double rate, const AdamSettings& a)
{
    m = a.beta1 * m + (1.0 - a.beta1) * grad;
    v = a.beta2 * v + (1.0 - a.beta2) * grad * grad;
    const double mhat = m / (1.0 - std::pow(a.beta1, static_cast<double>(t)));
    const double vhat = v / (1.0 - std::pow(a.beta2, static_cast<double>(t)));
    param -= rate * mhat / (std::sqrt(vhat) + a.epsilon);
}

} // namespace

FieldOptimizer::FieldOptimizer(const FieldLearningRates& rates, double scene_extent, long total_iterations,
                               AdamSettings adam)
    : rates_(rates), extent_(scene_extent), total_(std::max(1L, total_iterations)), adam_(adam)
{
}

void FieldOptimizer::resize(std::size_t splats)
{
    m_.resize(splats, {});
    v_.resize(splats, {});
    steps_.resize(splats, 0);
}

double FieldOptimizer::mean_rate(long iteration) const
{
    const double f = std::clamp(static_cast<double>(iteration) / static_cast<double>(total_), 0.0, 1.0);
    return extent_ * std::exp((1.0 - f) * std::log(rates_.means) + f * std::log(rates_.means_final));
}

void FieldOptimizer::step(splat::SplatField& field, const splat::FieldGrads& grads, long iteration)
{
    if (grads.splats.size() != field.size())
        throw Error(ErrorCategory::InvalidInput, "FieldOptimizer: gradient count does not match the field");
    resize(field.size());
    const double lr_mean = mean_rate(iteration);
    for (std::size_t i = 0; i < field.size(); ++i) {
        splat::Splat& s = field.splats[i];
        const splat::SplatGrad& g = grads.splats[i];
        auto& m = m_[i];
        auto& v = v_[i];
        const long t = ++steps_[i];
        for (int k = 0; k < 3; ++k) {
            adam_update(s.mean[k], g.mean[k], m[k], v[k], t, lr_mean, adam_);
            adam_update(s.log_scale[k], g.log_scale[k], m[3 + k], v[3 + k], t, rates_.scales, adam_);
            adam_update(s.color[k], g.color[k], m[11 + k], v[11 + k], t, rates_.colors, adam_);
        }
        for (int k = 0; k < 4; ++k)
            adam_update(s.quat[k], g.quat[k], m[6 + k], v[6 + k], t, rates_.quats, adam_);
        adam_update(s.opacity_logit, g.opacity_logit, m[10], v[10], t, rates_.opacities, adam_);
    }
    splat::normalize_quats(field);
}

void FieldOptimizer::remap(const std::vector<long>& source)
{
    std::vector<std::array<double, kSplatParams>> m(source.size()), v(source.size());
    std::vector<long> steps(source.size(), 0);
    for (std::size_t i = 0; i < source.size(); ++i) {
        const long s = source[i];
        if (s >= 0 && static_cast<std::size_t>(s) < m_.size()) {
            m[i] = m_[s];
            v[i] = v_[s];
            steps[i] = steps_[s];
        }
    }
    m_ = std::move(m);
    v_ = std::move(v);
    steps_ = std::move(steps);
}

void PredictorOptimizer::step(predictor::PredictorParams& phi, const predictor::PredictorGrad& grad)
{
    const std::size_t k = static_cast<std::size_t>(phi.channels());
    if (m_.size() != k + 1) {
        m_.assign(k + 1, 0.0);
        v_.assign(k + 1, 0.0);
        steps_ = 0;
    }
    ++steps_;
    for (std::size_t c = 0; c < k; ++c)
        adam_update(phi.weights[c], grad.weights[c], m_[c], v_[c], steps_, rate_, adam_);
    adam_update(phi.bias, grad.bias, m_[k], v_[k], steps_, rate_, adam_);
}

void PredictorOptimizer::reset()
{
    m_.clear();
    v_.clear();
    steps_ = 0;
}

} // namespace iags::train

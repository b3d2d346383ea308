// Copyright Contributors to the iags project
// SPDX-License-Identifier: Apache-2.0

#include "iags/common/error.hpp"
#include "iags/predictor/losses.hpp"
#include "iags/predictor/predictor.hpp"
#include "iags/predictor/residual.hpp"
#include "iags/train/schedule.hpp"

#include <doctest.h>

#include <algorithm>
#include <numeric>
#include <random>

using namespace iags;
using namespace iags::predictor;

namespace {

ScalarMap ramp(int w, int h)
{
    ScalarMap r = make_scalar(w, h);
    std::iota(r.storage().begin(), r.storage().end(), 0.0);
    return r;
}

ScalarMap random_map(std::mt19937_64& rng, int w, int h)
{
    std::uniform_real_distribution<double> u(0.0, 1.0);
    ScalarMap r = make_scalar(w, h);
    for (double& v : r.storage())
        v = u(rng);
    return r;
}

Mask random_mask(std::mt19937_64& rng, int w, int h, double p)
{
    std::bernoulli_distribution b(p);
    Mask m = make_mask(w, h);
    for (auto& v : m.storage())
        v = b(rng);
    return m;
}

Mask brute_dilate(const Mask& m)
{
    Mask out = make_mask(m.width(), m.height());
    for (int y = 0; y < m.height(); ++y)
        for (int x = 0; x < m.width(); ++x)
            for (int dy = -1; dy <= 1; ++dy)
                for (int dx = -1; dx <= 1; ++dx) {
                    const int xx = x + dx, yy = y + dy;
                    if (xx >= 0 && yy >= 0 && xx < m.width() && yy < m.height() && m(xx, yy))
                        out(x, y) = 1;
                }
    return out;
}

} // namespace

TEST_CASE("residual mask examples")
{
    CHECK(mask_count(residual_mask(make_scalar(10, 10, 0.3), 0.7)) == 0);

    const ScalarMap r = ramp(10, 10);
    const Mask raw = raw_residual_mask(r, 0.7);
    CHECK(mask_count(raw) == 30);
    for (std::size_t i = 0; i < 100; ++i)
        CHECK(raw[i] == (i >= 70 ? 1 : 0));

    Mask single = make_mask(5, 5);
    single(2, 2) = 1;
    const Mask d = dilate3x3(single);
    CHECK(mask_count(d) == 9);
    CHECK(d(1, 1) == 1);
    CHECK(d(3, 3) == 1);
    CHECK(d(0, 0) == 0);
}

TEST_CASE("quantile cardinality, dilation and monotonicity on random residuals")
{
    std::mt19937_64 rng(77);
    for (int trial = 0; trial < 100; ++trial) {
        const ScalarMap r = random_map(rng, 17, 13); // distinct with probability 1
        const double n = 17.0 * 13.0;
        const double taus[] = {0.3, 0.5, 0.7, 0.85, 0.95};
        Mask prev_raw, prev_dil;
        for (double tau : taus) {
            const Mask raw = raw_residual_mask(r, tau);
            const double frac = mask_count(raw) / n;
            CHECK(frac >= 1.0 - tau - 1.0 / n);
            CHECK(frac <= 1.0 - tau + 1.0 / n);
            const Mask dil = residual_mask(r, tau);
            CHECK(dil == brute_dilate(raw));
            if (!prev_raw.empty()) {
                CHECK(mask_subset(raw, prev_raw));
                CHECK(mask_subset(dil, prev_dil));
            }
            prev_raw = raw;
            prev_dil = dil;
        }
        const Mask m = random_mask(rng, 9, 11, 0.1);
        CHECK(dilate3x3(m) == brute_dilate(m));
    }
}

TEST_CASE("bounds")
{
    const BoundMaps c = compute_bounds(make_scalar(8, 8, 1.0), {});
    CHECK(mask_count(c.upper) == 64);
    CHECK(mask_count(c.lower) == 64);

    // One-row ramp so dilation only spreads sideways: bottom 70 floor, top 5 forced outliers before dilation.
    const ScalarMap r = ramp(100, 1);
    const BoundMaps b = compute_bounds(r, {0.7, 0.95});
    CHECK(mask_not(b.upper) == dilate3x3(raw_residual_mask(r, 0.7)));
    CHECK(mask_count(raw_residual_mask(r, 0.7)) == 30);
    CHECK(mask_count(raw_residual_mask(r, 0.95)) == 5);
    CHECK(mask_count(mask_not(b.lower)) == 6); // top 5 plus one dilated neighbour

    std::mt19937_64 rng(5);
    for (int trial = 0; trial < 100; ++trial) {
        const ScalarMap rr = random_map(rng, 12, 12);
        const BoundMaps bb = compute_bounds(rr, {0.6 + 0.003 * trial, 0.95});
        CHECK(mask_subset(bb.upper, bb.lower));
    }
    CHECK_THROWS_AS(compute_bounds(r, {0.9, 0.8}), Error);
}

TEST_CASE("residual normalization")
{
    ScalarMap r = make_scalar(2, 1);
    r[0] = 0.5;
    r[1] = 2.0;
    const ScalarMap n = normalize_residual(r);
    CHECK(n[0] == 0.25);
    CHECK(n[1] == 1.0);
    CHECK(normalize_residual(make_scalar(3, 3)) == make_scalar(3, 3));
}

TEST_CASE("predict examples and mask")
{
    std::mt19937_64 rng(3);
    FeatureMap f(6, 5, kFeatureChannels);
    std::normal_distribution<double> n;
    for (double& v : f.storage())
        v = n(rng);
    PredictorParams zero{Eigen::VectorXd::Zero(kFeatureChannels), 0.0};
    const ScalarMap half = predict(f, zero);
    for (double h : half.values())
        CHECK(h == 0.5);
    PredictorParams big{Eigen::VectorXd::Zero(kFeatureChannels), 50.0};
    CHECK(mask_count(mlp_mask(predict(f, big))) == 0);

    PredictorParams phi = init_predictor(kFeatureChannels, 9);
    phi.weights = Eigen::VectorXd::Random(kFeatureChannels);
    phi.bias = 0.3;
    const ScalarMap h = predict(f, phi);
    for (std::size_t p = 0; p < 30; ++p) {
        double z = phi.bias;
        for (int k = 0; k < kFeatureChannels; ++k)
            z += phi.weights(k) * f[p * kFeatureChannels + k];
        CHECK(h[p] == doctest::Approx(1.0 / (1.0 + std::exp(-z))).epsilon(1e-15));
    }
    CHECK_THROWS_AS(predict(f, PredictorParams{Eigen::VectorXd::Zero(3), 0.0}), Error);
}

TEST_CASE("shifting a feature channel with a compensating bias keeps the mask")
{
    std::mt19937_64 rng(4);
    std::normal_distribution<double> n;
    FeatureMap f(8, 8, kFeatureChannels);
    for (double& v : f.storage())
        v = n(rng);
    PredictorParams phi{Eigen::VectorXd::Zero(kFeatureChannels), 0.1};
    for (int k = 0; k < kFeatureChannels; ++k)
        phi.weights(k) = n(rng);
    const Mask base = mlp_mask(predict(f, phi));
    for (int k = 0; k < kFeatureChannels; ++k) {
        FeatureMap g = f;
        const double c = 0.75;
        for (std::size_t p = 0; p < 64; ++p)
            g[p * kFeatureChannels + k] += c;
        PredictorParams psi = phi;
        psi.bias -= phi.weights(k) * c;
        const ScalarMap h0 = predict(f, phi), h1 = predict(g, psi);
        for (std::size_t p = 0; p < 64; ++p)
            if (std::abs(h0[p] - 0.5) > 1e-9)
                CHECK(((h0[p] < 0.5) == (h1[p] < 0.5)));
        CHECK(mlp_mask(h1) == base);
    }
}

TEST_CASE("features are standardized per channel")
{
    std::mt19937_64 rng(6);
    ColorImage a = make_color(10, 7), b = make_color(10, 7);
    std::uniform_real_distribution<double> u;
    for (double& v : a.storage())
        v = u(rng);
    for (double& v : b.storage())
        v = u(rng);
    const FeatureMap f = compute_features(a, b);
    REQUIRE(f.channels() == kFeatureChannels);
    for (int k = 0; k < kFeatureChannels; ++k) {
        double m = 0, s = 0;
        for (std::size_t p = 0; p < 70; ++p)
            m += f[p * kFeatureChannels + k];
        m /= 70;
        for (std::size_t p = 0; p < 70; ++p)
            s += std::pow(f[p * kFeatureChannels + k] - m, 2);
        CHECK(std::abs(m) < 1e-12);
        CHECK(s / 70 == doctest::Approx(1.0).epsilon(1e-12));
    }
    const FeatureMap flat = compute_features(make_color(4, 4, 0.3), make_color(4, 4, 0.3));
    for (double v : flat.values())
        CHECK(v == 0.0);
}

TEST_CASE("reset is deterministic and starts near 0.5")
{
    CHECK(init_predictor(kFeatureChannels, 42) == init_predictor(kFeatureChannels, 42));
    CHECK_FALSE(init_predictor(kFeatureChannels, 42) == init_predictor(kFeatureChannels, 43));
    std::mt19937_64 rng(1);
    ColorImage a = make_color(16, 16), b = make_color(16, 16);
    std::uniform_real_distribution<double> u;
    for (double& v : a.storage())
        v = u(rng);
    for (double& v : b.storage())
        v = u(rng);
    const ScalarMap h = predict(compute_features(a, b), init_predictor(kFeatureChannels, 42));
    for (double v : h.values())
        CHECK(std::abs(v - 0.5) < 0.05);
    CHECK(init_predictor(kFeatureChannels, 42).bias == 0.0);
}

TEST_CASE("loss examples")
{
    const int w = 4, h = 5;
    const double n = w * h;
    Mask up = make_mask(w, h), lo = make_mask(w, h, 1);
    ScalarMap hh = make_scalar(w, h, 0.5);
    CHECK(supervision_loss(hh, up, lo) == 0.0);
    up(0, 0) = up(1, 0) = up(2, 0) = 1;
    hh(0, 0) = hh(1, 0) = hh(2, 0) = 0.75; // U - delta with delta = 0.25
    CHECK(supervision_loss(hh, up, lo) == doctest::Approx(3 * 0.25 / n).epsilon(1e-15));

    Mask prior = make_mask(w, h);
    prior(3, 3) = prior(2, 4) = 1;
    CHECK(prior_loss(make_scalar(w, h, 1.0), prior) == 0.0);
    CHECK(prior_loss(make_scalar(w, h, 0.0), prior) == doctest::Approx(2.0 / n));

    CHECK(discard_loss(make_scalar(w, h, 1.0), prior, make_scalar(w, h, 0.7)) == 0.0);
    CHECK(discard_loss(make_scalar(w, h, 0.0), prior, make_scalar(w, h, 1.0)) == doctest::Approx(-2.0 / n));

    const MaskLossTerms only = mask_loss(hh, up, lo, prior, make_scalar(w, h, 0.3), {0.0, 0.0});
    CHECK(only.total == only.supervision);
    const MaskLossTerms zero = mask_loss(make_scalar(w, h, 1.0), make_mask(w, h), make_mask(w, h, 1), make_mask(w, h),
                                         make_scalar(w, h), {});
    CHECK(zero.total == 0.0);
    CHECK_THROWS_AS(supervision_loss(hh, make_mask(2, 2), lo), Error);
}

TEST_CASE("losses equal scalar brute force on random inputs")
{
    std::mt19937_64 rng(31);
    for (int trial = 0; trial < 100; ++trial) {
        const int w = 7, h = 6;
        const ScalarMap hh = random_map(rng, w, h), r = random_map(rng, w, h);
        const BoundMaps b = compute_bounds(random_map(rng, w, h), {0.7, 0.95});
        const Mask prior = random_mask(rng, w, h, 0.4);
        const MaskLossWeights lw{0.3 + 0.01 * trial, 0.05 * trial};
        double sup = 0, pri = 0, dis = 0;
        for (int y = 0; y < h; ++y)
            for (int x = 0; x < w; ++x) {
                const double H = hh(x, y);
                sup += std::max(b.upper(x, y) - H, 0.0) + std::max(H - b.lower(x, y), 0.0);
                pri += std::max(prior(x, y) - H, 0.0);
                dis += prior(x, y) * (1.0 - H) * r(x, y);
            }
        sup /= w * h;
        pri /= w * h;
        dis = -dis / (w * h);
        const MaskLossTerms t = mask_loss(hh, b.upper, b.lower, prior, r, lw);
        CHECK(std::abs(t.supervision - sup) <= 1e-12);
        CHECK(std::abs(t.prior - pri) <= 1e-12);
        CHECK(std::abs(t.discard - dis) <= 1e-12);
        CHECK(std::abs(t.total - (sup + lw.prior * pri + lw.discard * dis)) <= 1e-12);
    }
}

TEST_CASE("phi gradients match finite differences away from the hinge kinks")
{
    std::mt19937_64 rng(13);
    std::normal_distribution<double> n;
    for (int trial = 0; trial < 20; ++trial) {
        const int w = 6, h = 6;
        FeatureMap f(w, h, kFeatureChannels);
        for (double& v : f.storage())
            v = n(rng);
        PredictorParams phi{Eigen::VectorXd::Zero(kFeatureChannels), 0.2 * n(rng)};
        for (int k = 0; k < kFeatureChannels; ++k)
            phi.weights(k) = 0.3 * n(rng);
        const BoundMaps b = compute_bounds(random_map(rng, w, h), {0.7, 0.95});
        const Mask prior = random_mask(rng, w, h, 0.5);
        const ScalarMap r = random_map(rng, w, h);
        const MaskLossWeights lw{1.0, 0.1};
        const auto loss = [&](const PredictorParams& p) {
            return mask_loss(predict(f, p), b.upper, b.lower, prior, r, lw).total;
        };
        const ScalarMap H = predict(f, phi);
        const PredictorGrad g = predictor_backward(f, H, mask_loss_grad(H, b.upper, b.lower, prior, r, lw));
        const double step = 1e-6;
        for (int k = 0; k <= kFeatureChannels; ++k) {
            PredictorParams p = phi, m = phi;
            if (k < kFeatureChannels) {
                p.weights(k) += step;
                m.weights(k) -= step;
            } else {
                p.bias += step;
                m.bias -= step;
            }
            // H is in (0,1) and the masks are binary, so the hinge kinks (H = 0 or 1) are never reached.
            const double fd = (loss(p) - loss(m)) / (2 * step);
            const double an = k < kFeatureChannels ? g.weights(k) : g.bias;
            const double rel = std::abs(fd - an) / std::max({std::abs(fd), std::abs(an), 1e-8});
            CHECK(rel < 1e-4);
        }
    }
}

TEST_CASE("tau_low annealing")
{
    CHECK(train::anneal_tau_low(0, 15000) == 0.7);
    CHECK(train::anneal_tau_low(15000, 15000) == 0.85);
    CHECK(train::anneal_tau_low(7500, 15000) == doctest::Approx(0.775).epsilon(1e-12));
}

TEST_CASE("predictor text round trip")
{
    PredictorParams phi = init_predictor(kFeatureChannels, 5);
    phi.bias = -1.0 / 3.0;
    CHECK(parse_predictor(format_predictor(phi), "mem") == phi);
    CHECK_THROWS_AS(parse_predictor("3 0.1 0.2", "bad"), Error);
}

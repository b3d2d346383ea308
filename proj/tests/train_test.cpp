// Copyright Contributors to the iags project
// SPDX-License-Identifier: Apache-2.0

#include "iags/common/error.hpp"
#include "iags/common/text_io.hpp"
#include "iags/refine/oracle.hpp"
#include "iags/splat/checkpoint.hpp"
#include "iags/train/gs_loss.hpp"
#include "iags/train/optimizer.hpp"
#include "iags/train/pearson.hpp"
#include "iags/train/schedule.hpp"
#include "iags/train/trainer.hpp"
#include "support/random_scene.hpp"

#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <random>

#include <unistd.h>

using namespace iags;
using namespace iags::train;
namespace fs = std::filesystem;

namespace {

ColorImage random_color(std::mt19937_64& rng, int w, int h)
{
    std::uniform_real_distribution<double> u;
    ColorImage img = make_color(w, h);
    for (double& v : img.storage())
        v = u(rng);
    return img;
}

ScalarMap random_depth(std::mt19937_64& rng, int w, int h)
{
    std::uniform_real_distribution<double> u(1.0, 5.0);
    ScalarMap d = make_scalar(w, h);
    for (double& v : d.storage())
        v = u(rng);
    return d;
}

Mask random_mask(std::mt19937_64& rng, int w, int h, double p)
{
    std::bernoulli_distribution b(p);
    Mask m = make_mask(w, h);
    for (auto& v : m.storage())
        v = b(rng);
    return m;
}

/// Direct evaluation of the composite loss, written from the definition.
double brute_gs(const ColorImage& r, const ColorImage& refined, const ColorImage& init, const Mask& mlp, const Mask& ref,
                const ScalarMap& dr, const ScalarMap& dc)
{
    const int w = r.width(), h = r.height();
    double l2 = 0, l1 = 0;
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x)
            for (int c = 0; c < 3; ++c) {
                if (mlp(x, y) || ref(x, y))
                    l2 += std::pow(r(x, y, c) - refined(x, y, c), 2);
                else
                    l1 += std::abs(r(x, y, c) - init(x, y, c));
            }
    std::vector<double> a, b;
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x)
            if (std::isfinite(dr(x, y)) && std::isfinite(dc(x, y))) {
                a.push_back(dc(x, y));
                b.push_back(dr(x, y));
            }
    double ma = 0, mb = 0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        ma += a[i];
        mb += b[i];
    }
    ma /= a.size();
    mb /= b.size();
    double sab = 0, saa = 0, sbb = 0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        sab += (a[i] - ma) * (b[i] - mb);
        saa += (a[i] - ma) * (a[i] - ma);
        sbb += (b[i] - mb) * (b[i] - mb);
    }
    const double n = 3.0 * w * h;
    return l2 / n + l1 / n - sab / std::sqrt(saa * sbb);
}

} // namespace

TEST_CASE("pearson examples")
{
    const std::vector<double> x{1, 2, 3}, y{2, 4, 7}, neg{-1, -2, -3};
    CHECK(pearson(x, x).value == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(pearson(x, neg).value == doctest::Approx(-1.0).epsilon(1e-15));
    CHECK(pearson(x, y).value == doctest::Approx(0.9934).epsilon(1e-4 / 0.9934));
    const std::vector<double> flat{2, 2, 2};
    const PearsonResult z = pearson(x, flat);
    CHECK(z.value == 0.0);
    CHECK(z.zero_variance);
    CHECK_THROWS_AS(pearson(x, std::vector<double>{1, 2}), Error);
    CHECK_THROWS_AS(pearson(std::vector<double>{1}, std::vector<double>{1}), Error);
}

TEST_CASE("pearson gradient matches finite differences")
{
    std::mt19937_64 rng(3);
    std::normal_distribution<double> n;
    for (int trial = 0; trial < 20; ++trial) {
        std::vector<double> x(30), y(30);
        for (int i = 0; i < 30; ++i) {
            x[i] = n(rng);
            y[i] = 0.5 * x[i] + n(rng);
        }
        const std::vector<double> g = pearson_grad_y(x, y);
        for (int i = 0; i < 30; ++i) {
            auto yp = y, ym = y;
            yp[i] += 1e-6;
            ym[i] -= 1e-6;
            const double fd = (pearson(x, yp).value - pearson(x, ym).value) / 2e-6;
            CHECK(std::abs(fd - g[i]) <= 1e-7 + 1e-5 * std::abs(fd));
        }
    }
}

TEST_CASE("gs_loss examples")
{
    std::mt19937_64 rng(5);
    const int w = 6, h = 5;
    const ColorImage img = random_color(rng, w, h);
    const ScalarMap d = random_depth(rng, w, h);
    const GsLossResult only = gs_loss(img, img, img, random_mask(rng, w, h, 0.3), random_mask(rng, w, h, 0.3), d, d);
    CHECK(only.terms.total == doctest::Approx(-1.0).epsilon(1e-14));

    ColorImage shifted = img;
    for (double& v : shifted.storage())
        v += 0.125;
    const ScalarMap dc = random_depth(rng, w, h);
    const GsLossResult full = gs_loss(img, shifted, random_color(rng, w, h), make_mask(w, h, 1), make_mask(w, h), d, dc);
    CHECK(full.terms.total == doctest::Approx(0.125 * 0.125 - full.terms.pearson).epsilon(1e-14));
    CHECK(full.terms.l1 == 0.0);
}

TEST_CASE("gs_loss decomposition and brute force")
{
    std::mt19937_64 rng(6);
    for (int trial = 0; trial < 50; ++trial) {
        const int w = 7, h = 4;
        const ColorImage r = random_color(rng, w, h), ref = random_color(rng, w, h), init = random_color(rng, w, h);
        ScalarMap dr = random_depth(rng, w, h), dc = random_depth(rng, w, h);
        dc(1, 1) = kDepthSentinel;
        const Mask mlp = random_mask(rng, w, h, 0.2), rm = random_mask(rng, w, h, 0.3);
        const GsLossResult g = gs_loss(r, ref, init, mlp, rm, dr, dc);
        CHECK(std::abs(g.terms.total - brute_gs(r, ref, init, mlp, rm, dr, dc)) <= 1e-12);

        const GsLossResult none = gs_loss(r, ref, init, make_mask(w, h), make_mask(w, h), dr, dc);
        CHECK(none.terms.l2 == 0.0);
        CHECK(none.terms.total == none.terms.l1 - none.terms.pearson);
        const GsLossResult all = gs_loss(r, ref, init, make_mask(w, h, 1), make_mask(w, h), dr, dc);
        CHECK(all.terms.l1 == 0.0);
        CHECK(all.terms.total == all.terms.l2 - all.terms.pearson);
    }
}

TEST_CASE("gs_loss gradients match finite differences")
{
    std::mt19937_64 rng(7);
    const int w = 5, h = 5;
    const ColorImage r = random_color(rng, w, h), ref = random_color(rng, w, h), init = random_color(rng, w, h);
    const ScalarMap dr = random_depth(rng, w, h), dc = random_depth(rng, w, h);
    const Mask mlp = random_mask(rng, w, h, 0.3), rm = random_mask(rng, w, h, 0.3);
    const GsLossResult g = gs_loss(r, ref, init, mlp, rm, dr, dc);
    const double step = 1e-7;
    for (std::size_t i = 0; i < r.size(); ++i) {
        ColorImage p = r, m = r;
        p[i] += step;
        m[i] -= step;
        const double fd = (gs_loss(p, ref, init, mlp, rm, dr, dc).terms.total - gs_loss(m, ref, init, mlp, rm, dr, dc).terms.total) /
                          (2 * step);
        CHECK(std::abs(fd - g.grad_color[i]) <= 1e-6 * std::max(1.0, std::abs(fd)));
    }
    for (std::size_t i = 0; i < dr.size(); ++i) {
        ScalarMap p = dr, m = dr;
        p[i] += step;
        m[i] -= step;
        const double fd = (gs_loss(r, ref, init, mlp, rm, p, dc).terms.total - gs_loss(r, ref, init, mlp, rm, m, dc).terms.total) /
                          (2 * step);
        CHECK(std::abs(fd - g.grad_depth[i]) <= 1e-6 * std::max(1.0, std::abs(fd)));
    }
}

TEST_CASE("schedule")
{
    CHECK(anneal_noise_level(0, 15000) == 0.6);
    CHECK(anneal_noise_level(15000, 15000) == 0.3);
    CHECK(anneal_tau_low(0, 15000) == 0.7);
    CHECK(anneal_tau_low(15000, 15000) == 0.85);
    for (long it = 0; it <= 15000; it += 37)
        CHECK(std::abs(anneal_noise_level(it, 15000) - (0.6 - 0.3 * it / 15000.0)) <= 1e-9);
    const auto rounds = refinement_iterations(15000, 2000);
    CHECK(rounds == std::vector<long>{2000, 4000, 6000, 8000, 10000, 12000, 14000});
    CHECK(refinement_iterations(10, 5) == std::vector<long>{5, 10});
    CHECK_THROWS_AS(refinement_iterations(100, 200), Error);
    CHECK_THROWS_AS(anneal(0, 1, 11, 10), Error);
}

TEST_CASE("config validation")
{
    TrainConfig c;
    CHECK_NOTHROW(c.validate());
    c.refine_interval = c.total_iterations + 1;
    CHECK_THROWS_AS(c.validate(), Error);
    c = TrainConfig{};
    c.s_end = 0.7;
    CHECK_THROWS_AS(c.validate(), Error);
    c = TrainConfig{};
    c.tau_high = 0.8;
    CHECK_THROWS_AS(c.validate(), Error);
}

TEST_CASE("field optimizer")
{
    std::mt19937_64 rng(9);
    splat::SplatField f = testing::random_field(rng, 3);
    splat::normalize_quats(f);
    FieldOptimizer opt({}, 2.0, 100);
    CHECK(opt.mean_rate(0) == doctest::Approx(2.0 * 1.6e-4).epsilon(1e-12));
    CHECK(opt.mean_rate(100) == doctest::Approx(2.0 * 1.6e-6).epsilon(1e-12));
    splat::FieldGrads g;
    g.splats.resize(3);
    g.splats[0].color = {1.0, -1.0, 0.0};
    g.splats[1].quat = {0.3, -0.2, 0.1, 0.5};
    const splat::SplatField before = f;
    opt.step(f, g, 0);
    // First Adam step moves each coordinate by the learning rate against the gradient sign.
    CHECK(f.splats[0].color.x() == doctest::Approx(before.splats[0].color.x() - 2.5e-3).epsilon(1e-9));
    CHECK(f.splats[0].color.y() == doctest::Approx(before.splats[0].color.y() + 2.5e-3).epsilon(1e-9));
    CHECK(f.splats[0].color.z() == before.splats[0].color.z());
    CHECK(f.splats[2].mean == before.splats[2].mean);
    CHECK(f.splats[2].color == before.splats[2].color);
    for (const auto& s : f.splats)
        CHECK(std::abs(s.quat.norm() - 1.0) < 1e-12);

    opt.remap({2, -1, 0});
    g.splats.assign(3, {});
    CHECK_NOTHROW(opt.step(f, g, 1));
    g.splats.resize(2);
    CHECK_THROWS_AS(opt.step(f, g, 2), Error);
}

namespace {

struct TinyScene {
    std::vector<geometry::CameraView> cams;
    std::vector<ColorImage> gt;
    std::vector<ScalarMap> depth;
    splat::SplatField start;
};

TinyScene tiny_scene(std::uint64_t seed)
{
    std::mt19937_64 rng(seed);
    TinyScene s;
    const splat::SplatField truth = testing::random_field(rng, 12);
    for (int v = 0; v < 4; ++v) {
        geometry::CameraView cam = testing::small_camera(16, 18.0);
        cam.pose.translation = {0.05 * v, 0.0, 0.0};
        const splat::RenderOutput r = splat::rasterize(truth, cam);
        ColorImage c = r.color;
        for (double& x : c.storage())
            x = std::clamp(x, 0.0, 1.0);
        s.cams.push_back(cam);
        s.gt.push_back(c);
        s.depth.push_back(r.depth);
    }
    s.start = truth;
    for (auto& sp : s.start.splats) {
        sp.color = Eigen::Vector3d::Constant(0.5);
        sp.mean.x() += 0.05;
    }
    splat::normalize_quats(s.start);
    return s;
}

class FixedDepth final : public geometry::DepthEstimator {
public:
    explicit FixedDepth(std::vector<ScalarMap> d) : d_(std::move(d)) {}
    ScalarMap estimate(const ColorImage&, const geometry::CameraView&, std::size_t view) override { return d_[view]; }

private:
    std::vector<ScalarMap> d_;
};

class Recorder final : public TrainObserver {
public:
    std::vector<RoundInfo> rounds;
    void on_round(const RoundInfo& info, const TrainState&) override { rounds.push_back(info); }
};

class Failing final : public refine::Refiner {
public:
    refine::RefineResponse run(const refine::RefineRequest&) override { throw Error(ErrorCategory::Timeout, "simulated"); }
};

TrainConfig tiny_config()
{
    TrainConfig c;
    c.total_iterations = 60;
    c.refine_interval = 20;
    c.densify_from = 10;
    c.densify_until = 40;
    c.densify_interval = 10;
    c.log_interval = 10;
    c.seed = 5;
    return c;
}

TrainState tiny_state(const TinyScene& s)
{
    std::vector<Mask> refine, occ;
    std::mt19937_64 rng(1);
    for (std::size_t v = 0; v < s.cams.size(); ++v) {
        refine.push_back(random_mask(rng, 16, 16, 0.2));
        occ.push_back(random_mask(rng, 16, 16, 0.3));
    }
    return TrainState::create(s.start, s.cams, s.gt, refine, occ, 5);
}

} // namespace

TEST_CASE("trainer cadence, reset and determinism")
{
    const TinyScene s = tiny_scene(3);
    const TrainConfig cfg = tiny_config();

    refine::OracleRefiner r1(s.gt, 11, 0.0), r2(s.gt, 11, 0.0);
    FixedDepth d1(s.depth), d2(s.depth);
    Recorder obs;
    const TrainState a = train::train(tiny_state(s), cfg, {r1, d1, nullptr, &obs, {}});
    const TrainState b = train::train(tiny_state(s), cfg, {r2, d2, nullptr, nullptr, {}});

    CHECK(a.rounds == 3);
    CHECK(r1.calls() == 3);
    REQUIRE(obs.rounds.size() == 3);
    for (std::size_t k = 0; k < 3; ++k) {
        const RoundInfo& info = obs.rounds[k];
        CHECK(info.round == static_cast<long>(k + 1));
        CHECK(info.iteration == 20 * static_cast<long>(k + 1));
        CHECK(info.noise_level == anneal_noise_level(info.iteration, 60));
        CHECK(info.phi_after == predictor::init_predictor(predictor::kFeatureChannels, predictor_seed(5, info.round)));
        CHECK_FALSE(info.phi_before == info.phi_after);
    }
    CHECK(obs.rounds.back().noise_level == 0.3);
    CHECK(format_metric_log(a.log) == format_metric_log(b.log));
    CHECK(a.field == b.field);
    CHECK(a.phi == b.phi);
    CHECK(a.log.back().event == "final");
    CHECK(splat::is_finite(a.field));
}

TEST_CASE("ablation keeps the predictor untouched and the mask empty")
{
    const TinyScene s = tiny_scene(4);
    TrainConfig cfg = tiny_config();
    cfg.inconsistency_aware = false;
    refine::OracleRefiner r(s.gt, 2, 0.0);
    FixedDepth d(s.depth);
    Recorder obs;
    const TrainState init = tiny_state(s);
    const TrainState out = train::train(init, cfg, {r, d, nullptr, &obs, {}});
    CHECK(out.phi == init.phi);
    for (const RoundInfo& info : obs.rounds) {
        CHECK(info.phi_before == info.phi_after);
        for (const Mask& m : info.mlp)
            CHECK(mask_count(m) == 0);
    }
}

TEST_CASE("refiner failure checkpoints and aborts")
{
    const TinyScene s = tiny_scene(5);
    const fs::path dir = fs::temp_directory_path() / ("iags_train_fail_" + std::to_string(::getpid()));
    fs::remove_all(dir);
    Failing bad;
    FixedDepth d(s.depth);
    try {
        train::train(tiny_state(s), tiny_config(), {bad, d, nullptr, nullptr, dir});
        FAIL("expected the refiner error to propagate");
    } catch (const Error& e) {
        CHECK(e.category() == ErrorCategory::Timeout);
    }
    CHECK(fs::exists(dir / "field.txt"));
    CHECK(fs::exists(dir / "predictor.txt"));
    const std::string log = io::read_text_file(dir / "metrics.csv");
    CHECK(log.find("20,refine") != std::string::npos);
    CHECK(splat::is_finite(splat::read_field(dir / "field.txt")));
    fs::remove_all(dir);
}

TEST_CASE("state construction checks view counts")
{
    const TinyScene s = tiny_scene(6);
    CHECK_THROWS_AS(TrainState::create(s.start, s.cams, {}, {}, {}, 1), Error);
    std::vector<Mask> m(4, make_mask(16, 16));
    std::vector<Mask> wrong(4, make_mask(8, 8));
    CHECK_THROWS_AS(TrainState::create(s.start, s.cams, s.gt, wrong, m, 1), Error);
    CHECK_NOTHROW(TrainState::create(s.start, s.cams, s.gt, m, m, 1));
}

TEST_CASE("metric log format")
{
    MetricRecord r;
    r.iteration = 4;
    r.event = "refine";
    r.loss.l2 = 0.5;
    r.masked_psnr = 20.25;
    const std::string s = format_metric_log({r});
    CHECK(s.rfind("iteration,event,l2,l1,pearson,gs_total,mask_supervision,mask_prior,mask_discard,mask_total,splats,"
                  "masked_psnr,mask_iou\n",
                  0) == 0);
    CHECK(s.find("4,refine,0.5,0,0,0,0,0,0,0,0,20.25,-\n") != std::string::npos);
}

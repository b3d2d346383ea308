// Copyright Contributors to the iags project
// SPDX-License-Identifier: Apache-2.0

#include "iags/common/error.hpp"
#include "iags/common/metrics.hpp"
#include "iags/pipeline/commands.hpp"
#include "iags/pipeline/config.hpp"
#include "iags/pipeline/dataset.hpp"
#include "iags/pipeline/synthetic.hpp"

#include <doctest.h>

#include <filesystem>
#include <random>

#include <unistd.h>

using namespace iags;
using namespace iags::pipeline;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name)
{
    const fs::path p = fs::temp_directory_path() / ("iags_pipe_" + name + "_" + std::to_string(::getpid()));
    fs::remove_all(p);
    return p;
}

SynthSpec small_spec()
{
    SynthSpec s;
    s.splats = 60;
    s.views = 4;
    s.width = s.height = 24;
    s.focal = 21.0;
    s.corrupt_views = {2};
    return s;
}

} // namespace

TEST_CASE("config serialization round-trips")
{
    PipelineConfig c = parse_config("profile = desk\nseed = 17\ncorrupt_regions = 8:21,5,39,28 9:26,5,44,28\n"
                                    "aux_views = 1 3\ninconsistency_aware = false\n# comment\n",
                                    "inline");
    CHECK(c.profile == "desk");
    CHECK(c.train.total_iterations == 3000);
    CHECK(c.seed == 17);
    REQUIRE(c.synth.regions.size() == 2);
    CHECK(c.synth.regions[1] == CorruptRegion{9, {26, 5, 44, 28}});
    CHECK(c.aux_views == std::vector<std::size_t>{1, 3});
    CHECK_FALSE(c.train.inconsistency_aware);

    const std::string once = serialize_config(c);
    const std::string twice = serialize_config(parse_config(once, "once"));
    CHECK(once == twice);
}

TEST_CASE("config rejects bad input")
{
    const auto category = [](const std::string& text) {
        try {
            parse_config(text, "inline");
        } catch (const Error& e) {
            return e.category();
        }
        return ErrorCategory::InvalidInput;
    };
    CHECK(category("no_such_key = 1\n") == ErrorCategory::Config);
    CHECK(category("seed = banana\n") == ErrorCategory::Config);
    CHECK(category("profile = huge\n") == ErrorCategory::Config);
    CHECK(category("iterations = 100\nrefine_interval = 200\n") == ErrorCategory::Config);
    CHECK(category("refiner = magic\n") == ErrorCategory::Config);
}

TEST_CASE("profiles")
{
    PipelineConfig c;
    apply_profile(c, "paper");
    CHECK(c.train.total_iterations == 15000);
    CHECK(c.train.refine_interval == 2000);
    apply_profile(c, "smoke");
    CHECK(c.train.total_iterations == 500);
    CHECK(c.synth.views == 8);
    CHECK_THROWS_AS(apply_profile(c, "nope"), Error);
    const PipelineConfig o = parse_config("profile = paper\n", "inline", std::string("desk"));
    CHECK(o.train.total_iterations == 3000);
}

TEST_CASE("synthetic scenes are deterministic and corruption stays inside its regions")
{
    const SynthSpec spec = small_spec();
    const SyntheticScene a = generate_synthetic(spec, 9);
    const SyntheticScene b = generate_synthetic(spec, 9);
    REQUIRE(a.cams.size() == 4);
    CHECK(a.field == b.field);
    for (std::size_t v = 0; v < 4; ++v) {
        CHECK(a.frames[v].storage() == b.frames[v].storage());
        const Mask m = region_mask(24, 24, a.regions, v);
        for (int y = 0; y < 24; ++y)
            for (int x = 0; x < 24; ++x)
                if (!m(x, y))
                    for (int c = 0; c < 3; ++c)
                        CHECK(a.frames[v](x, y, c) == a.gt_frames[v](x, y, c));
        if (v != 2)
            CHECK(mask_count(m) == 0);
    }
    CHECK(mask_count(region_mask(24, 24, a.regions, 2)) > 0);

    SynthSpec clean = spec;
    clean.corrupt_fraction = 0.0;
    const SyntheticScene c = generate_synthetic(clean, 9);
    for (std::size_t v = 0; v < 4; ++v)
        CHECK(c.frames[v].storage() == c.gt_frames[v].storage());
}

TEST_CASE("region resolution")
{
    SynthSpec s = small_spec();
    s.regions = {{1, {20, 20, 30, 22}}};
    CHECK_THROWS_AS(resolve_regions(s), Error);
    s.regions = {{7, {0, 0, 2, 2}}};
    CHECK_THROWS_AS(resolve_regions(s), Error);
    s.regions = {{1, {0, 0, 2, 2}}};
    CHECK(resolve_regions(s).size() == 1);
    s.regions.clear();
    s.corrupt_views = {0, 1, 2, 3};
    CHECK_THROWS_AS(resolve_regions(s), Error);
}

TEST_CASE("quantize8")
{
    ColorImage img = make_color(2, 1);
    img(0, 0, 0) = -0.3;
    img(1, 0, 1) = 1.7;
    img(1, 0, 2) = 0.5;
    const ColorImage q = quantize8(img);
    CHECK(q(0, 0, 0) == 0.0);
    CHECK(q(1, 0, 1) == 1.0);
    CHECK(q(1, 0, 2) == 128.0 / 255.0);
}

TEST_CASE("dataset files round-trip")
{
    const fs::path dir = scratch("dataset");
    const Dataset d = dataset_from_scene(generate_synthetic(small_spec(), 4));
    write_dataset(dir, d, 0.001);
    const Dataset r = read_dataset(dir, 0.001);
    REQUIRE(r.cams.size() == d.cams.size());
    CHECK(r.regions == d.regions);
    CHECK(r.has_ground_truth());
    for (std::size_t v = 0; v < d.cams.size(); ++v) {
        CHECK(r.frames[v].storage() == d.frames[v].storage());
        CHECK(r.gt_frames[v].storage() == d.gt_frames[v].storage());
        for (std::size_t p = 0; p < d.gt_depth[v].size(); ++p) {
            if (std::isfinite(d.gt_depth[v][p]))
                CHECK(std::abs(r.gt_depth[v][p] - d.gt_depth[v][p]) <= 0.0005 + 1e-12);
            else
                CHECK_FALSE(std::isfinite(r.gt_depth[v][p]));
        }
    }
    fs::remove(dir / "trajectory.txt");
    CHECK_THROWS_AS(read_dataset(dir, 0.001), Error);
    fs::remove_all(dir);
}

TEST_CASE("evaluation of the ground-truth field")
{
    const Dataset d = dataset_from_scene(generate_synthetic(small_spec(), 4));
    REQUIRE(d.gt_field);
    const EvalReport rep = evaluate(*d.gt_field, d);
    CHECK(rep.mean_pearson == doctest::Approx(1.0).epsilon(1e-12));
    REQUIRE(rep.psnr);
    CHECK(*rep.psnr > 45.0);

    Dataset flat = d;
    for (ScalarMap& m : flat.gt_depth)
        std::fill(m.storage().begin(), m.storage().end(), 3.0);
    const EvalReport z = evaluate(*d.gt_field, flat);
    for (bool b : z.zero_variance)
        CHECK(b);
    CHECK(z.mean_pearson == 0.0);
}

TEST_CASE("pooled mask IoU")
{
    Mask a = make_mask(4, 1), b = make_mask(4, 1), c = make_mask(4, 1);
    a(0, 0) = a(1, 0) = 1;
    b(1, 0) = b(2, 0) = 1;
    CHECK(mask_iou({a}, {b}) == doctest::Approx(1.0 / 3.0));
    CHECK(mask_iou({a, c}, {a, c}) == 1.0);
    CHECK(mask_iou({c}, {c}) == 1.0);
    CHECK(mask_iou({a, a}, {b, c}) == doctest::Approx(1.0 / 5.0)); // 1 / (3 + 2)
}

TEST_CASE("commands check their preconditions")
{
    PipelineConfig c;
    apply_profile(c, "smoke");
    c.dataset_dir = scratch("pre_ds");
    c.output_dir = scratch("pre_run");
    c.synth = small_spec();
    cmd_synth(c);
    try {
        cmd_train(c);
        FAIL("training without initialization should fail");
    } catch (const Error& e) {
        CHECK(e.category() == ErrorCategory::Precondition);
    }
    CHECK_THROWS_AS(cmd_eval(c), Error);
    fs::remove_all(c.dataset_dir);
    fs::remove_all(c.output_dir);
}

// Copyright Contributors to the iags project
// SPDX-License-Identifier: Apache-2.0

#include "iags/common/error.hpp"
#include "iags/common/png_io.hpp"
#include "iags/common/text_io.hpp"
#include "iags/refine/change_map.hpp"
#include "iags/refine/file_exchange.hpp"
#include "iags/refine/oracle.hpp"
#include "iags/refine/refiner.hpp"

#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <random>
#include <set>
#include <thread>

using namespace iags;
using namespace iags::refine;
namespace fs = std::filesystem;

namespace {

/// t > T*w on the exact binary value of w, by integer arithmetic.
bool substitute_exact(long t, long total, double w)
{
    if (w == 0.0)
        return t > 0;
    int e = 0;
    const double m = std::frexp(w, &e); // w = m * 2^e, m in [0.5, 1)
    const auto mant = static_cast<__int128>(std::ldexp(m, 53));
    const int shift = 53 - e; // w = mant / 2^shift
    if (shift < 0 || shift > 100)
        throw std::logic_error("w out of test range");
    return static_cast<__int128>(t) * (static_cast<__int128>(1) << shift) > static_cast<__int128>(total) * mant;
}

RefineRequest make_request(int frames, int w, int h, double weight, std::uint64_t seed = 1)
{
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u;
    RefineRequest r;
    for (int i = 0; i < frames; ++i) {
        ColorImage f = make_color(w, h);
        for (double& v : f.storage())
            v = u(rng);
        r.frames.push_back(f);
        r.change_maps.push_back(make_scalar(w, h, weight));
        ScalarMap d = make_scalar(w, h, 2.0 + i);
        d(0, 0) = kDepthSentinel;
        r.depth_maps.push_back(d);
    }
    r.text_prompt = "a quiet room";
    r.noise_level = 0.45;
    return r;
}

std::vector<ColorImage> random_frames(int n, int w, int h, std::uint64_t seed)
{
    return make_request(n, w, h, 0.0, seed).frames;
}

class Scratch {
public:
    explicit Scratch(const std::string& name) : path_(fs::temp_directory_path() / ("iags_" + name + "_" + std::to_string(::getpid())))
    {
        fs::remove_all(path_);
        fs::create_directories(path_);
    }
    ~Scratch() { fs::remove_all(path_); }
    const fs::path& path() const { return path_; }

private:
    fs::path path_;
};

ErrorCategory category_of(const std::function<void()>& fn)
{
    try {
        fn();
    } catch (const Error& e) {
        return e.category();
    }
    FAIL("expected an iags::Error");
    return ErrorCategory::InvalidInput;
}

} // namespace

TEST_CASE("change map tiers")
{
    Mask mlp = make_mask(3, 1), ref = make_mask(3, 1);
    mlp(0, 0) = 1;
    ref(0, 0) = 1;
    ref(1, 0) = 1;
    const ScalarMap c = change_map(mlp, ref, 0.6);
    CHECK(c(0, 0) == doctest::Approx(0.6).epsilon(1e-15));
    CHECK(c(1, 0) == doctest::Approx(0.36).epsilon(1e-15));
    CHECK(c(2, 0) == doctest::Approx(0.09).epsilon(1e-15));
    CHECK(change_map(make_mask(1, 1), make_mask(1, 1, 1), 0.5)(0, 0) == doctest::Approx(0.3).epsilon(1e-15));

    std::mt19937_64 rng(2);
    std::bernoulli_distribution b(0.3);
    Mask a = make_mask(20, 20), r = make_mask(20, 20);
    for (std::size_t i = 0; i < a.size(); ++i) {
        a[i] = b(rng);
        r[i] = b(rng);
    }
    a[0] = 1;
    r[1] = 1;
    a[1] = 0;
    a[2] = r[2] = 0;
    const ScalarMap m = change_map(a, r, 0.42);
    CHECK(std::set<double>(m.storage().begin(), m.storage().end()).size() == 3);
    CHECK(m == change_map(a, r, 0.42));
    CHECK_THROWS_AS(change_map(a, make_mask(2, 2), 0.4), Error);
}

TEST_CASE("should_substitute examples")
{
    for (long t = 0; t <= 10; ++t)
        CHECK_FALSE(should_substitute(t, 10, 1.0));
    for (long t = 0; t < 10; ++t)
        CHECK(should_substitute(t, 10, 0.0) == (t > 0));
    CHECK(should_substitute(7, 10, 0.5));
    CHECK_FALSE(should_substitute(5, 10, 0.5));
}

TEST_CASE("should_substitute truth table and monotonicity")
{
    for (long total = 1; total <= 50; ++total) {
        for (int k = 0; k <= 10; ++k) {
            const double w = k / 10.0;
            for (long t = 0; t <= total; ++t) {
                const bool got = should_substitute(t, total, w);
                CHECK(got == substitute_exact(t, total, w));
                if (t > 0 && should_substitute(t - 1, total, w))
                    CHECK(got);
                if (k > 0 && !should_substitute(t, total, (k - 1) / 10.0))
                    CHECK_FALSE(got);
            }
        }
    }
}

TEST_CASE("oracle refine examples")
{
    const RefineRequest zero = make_request(2, 6, 5, 0.0);
    const auto gt = random_frames(2, 6, 5, 99);
    const RefineResponse same = oracle_refine(zero, gt, 3);
    CHECK(same.frames == zero.frames);

    const RefineRequest one = make_request(2, 6, 5, 1.0);
    CHECK(oracle_refine(one, gt, 3, 0.0).frames == gt);
    const RefineResponse n1 = oracle_refine(one, gt, 3);
    CHECK(n1.frames == oracle_refine(one, gt, 3).frames);
    CHECK_FALSE(n1.frames == oracle_refine(one, gt, 4).frames);
    for (std::size_t i = 0; i < 2; ++i)
        for (std::size_t p = 0; p < gt[i].size(); ++p)
            CHECK(std::abs(n1.frames[i][p] - gt[i][p]) < 0.02 * 6 + 1e-12);

    const RefineRequest half = make_request(2, 6, 5, 0.5);
    const RefineResponse h = oracle_refine(half, gt, 3, 0.0);
    for (std::size_t i = 0; i < 2; ++i)
        for (std::size_t p = 0; p < gt[i].size(); ++p)
            CHECK(h.frames[i][p] == doctest::Approx(0.5 * (half.frames[i][p] + gt[i][p])).epsilon(1e-15));

    // Idempotent at w = 1 without noise.
    RefineRequest again = one;
    again.frames = oracle_refine(one, gt, 3, 0.0).frames;
    CHECK(oracle_refine(again, gt, 5, 0.0).frames == again.frames);
}

namespace {

class ScriptedRefiner final : public Refiner {
public:
    std::function<RefineResponse(const RefineRequest&)> fn;
    RefineResponse run(const RefineRequest& r) override { return fn(r); }
};

} // namespace

TEST_CASE("refine validates responses and never mutates the request")
{
    const RefineRequest req = make_request(3, 5, 4, 0.3);
    const RefineRequest copy = req;
    ScriptedRefiner s;

    s.fn = [](const RefineRequest& r) {
        RefineResponse out{r.frames};
        out.frames[0][0] = 1.7;
        out.frames[1][1] = -0.2;
        return out;
    };
    const RefineResponse ok = refine::refine(req, s);
    CHECK(ok.frames[0][0] == 1.0);
    CHECK(ok.frames[1][1] == 0.0);

    s.fn = [](const RefineRequest& r) { return RefineResponse{{r.frames[0]}}; };
    try {
        refine::refine(req, s);
        FAIL("expected failure");
    } catch (const Error& e) {
        CHECK(e.category() == ErrorCategory::MalformedResponse);
        CHECK(std::string(e.what()).find("returned 1 frames, expected 3") != std::string::npos);
    }
    s.fn = [](const RefineRequest& r) {
        RefineResponse out{r.frames};
        out.frames[2] = make_color(4, 4);
        return out;
    };
    CHECK(category_of([&] { refine::refine(req, s); }) == ErrorCategory::MalformedResponse);
    s.fn = [](const RefineRequest& r) {
        RefineResponse out{r.frames};
        out.frames[1][3] = std::nan("");
        return out;
    };
    CHECK(category_of([&] { refine::refine(req, s); }) == ErrorCategory::MalformedResponse);
    s.fn = [](const RefineRequest&) -> RefineResponse { throw std::runtime_error("gpu on fire"); };
    CHECK(category_of([&] { refine::refine(req, s); }) == ErrorCategory::Refiner);

    RefineRequest bad = req;
    bad.change_maps.pop_back();
    CHECK(category_of([&] { refine::refine(bad, s); }) == ErrorCategory::InvalidInput);
    bad = req;
    bad.change_maps[0][0] = 1.5;
    CHECK(category_of([&] { refine::refine(bad, s); }) == ErrorCategory::InvalidInput);
    CHECK(category_of([&] { refine::refine(RefineRequest{}, s); }) == ErrorCategory::InvalidInput);

    CHECK(req.frames == copy.frames);
    CHECK(req.change_maps == copy.change_maps);
}

TEST_CASE("file exchange round trip against an in-process server")
{
    Scratch dir("exchange_ok");
    const RefineRequest req = make_request(3, 8, 6, 0.6);
    const auto gt = random_frames(3, 8, 6, 17);
    RefineRequest seen;
    std::thread server([&] {
        serve_exchange_once(dir.path(), [&](const RefineRequest& r) {
            seen = r;
            return oracle_refine(r, gt, 1, 0.0);
        }, std::chrono::seconds(20));
    });
    FileExchangeRefiner client({dir.path(), std::chrono::seconds(20)});
    const RefineResponse resp = refine::refine(req, client);
    server.join();

    REQUIRE(seen.frames.size() == 3);
    CHECK(seen.text_prompt == req.text_prompt);
    CHECK(seen.noise_level == req.noise_level);
    CHECK(seen.total_steps == req.total_steps);
    for (std::size_t i = 0; i < 3; ++i) {
        for (std::size_t p = 0; p < req.frames[i].size(); ++p)
            CHECK(std::abs(seen.frames[i][p] - req.frames[i][p]) <= 0.5 / 255 + 1e-12);
        CHECK(seen.change_maps[i][5] == std::round(0.6 * 255) / 255);
        CHECK(seen.depth_maps[i](0, 0) == kDepthSentinel);
        CHECK(seen.depth_maps[i](3, 3) == doctest::Approx(2.0 + i).epsilon(1e-12));
        // Response frames come back 8-bit quantized.
        for (std::size_t p = 0; p < resp.frames[i].size(); ++p)
            CHECK(std::abs(resp.frames[i][p] * 255 - std::round(resp.frames[i][p] * 255)) < 1e-9);
    }
    const auto meta = io::read_text_file(dir.path() / "request.json");
    for (const char* key : {"text_prompt", "noise_level", "total_steps", "frame_count", "width", "height", "frames",
                            "change_maps", "depth_maps", "refined"})
        CHECK(meta.find(std::string("\"") + key + "\"") != std::string::npos);
    CHECK(fs::exists(dir.path() / "frame_0002.png"));
    CHECK(fs::exists(dir.path() / "change_0000.png"));
    CHECK(fs::exists(dir.path() / "depth_0001.png"));
    CHECK_FALSE(fs::exists(dir.path() / kRequestSentinel));
    CHECK_FALSE(fs::exists(dir.path() / kResponseSentinel));
}

TEST_CASE("file exchange failure categories")
{
    const RefineRequest req = make_request(2, 5, 5, 0.3);
    const auto run_against = [&](const std::string& name, const std::function<void(const fs::path&)>& serve,
                                 std::chrono::milliseconds timeout = std::chrono::seconds(20)) {
        Scratch dir(name);
        std::thread server([&] {
            if (wait_for_request(dir.path(), std::chrono::seconds(20)))
                serve(dir.path());
        });
        FileExchangeRefiner client({dir.path(), timeout});
        const ErrorCategory c = category_of([&] { refine::refine(req, client); });
        fs::remove(dir.path() / "request.json"); // unblock nothing; the server has finished or timed out
        server.join();
        return c;
    };

    CHECK(run_against("x_error", [](const fs::path& d) { write_exchange_failure(d, "out of memory"); }) ==
          ErrorCategory::Refiner);
    CHECK(run_against("x_garbage", [](const fs::path& d) { write_exchange_status(d, "???"); }) == ErrorCategory::Protocol);
    CHECK(run_against("x_count", [&](const fs::path& d) {
              write_exchange_response(d, RefineResponse{{req.frames[0]}});
          }) == ErrorCategory::MalformedResponse);
    CHECK(run_against("x_extra", [&](const fs::path& d) {
              write_exchange_response(d, RefineResponse{{req.frames[0], req.frames[1], req.frames[1]}});
          }) == ErrorCategory::MalformedResponse);
    CHECK(run_against("x_dims", [&](const fs::path& d) {
              write_exchange_response(d, RefineResponse{{make_color(3, 3), make_color(3, 3)}});
          }) == ErrorCategory::MalformedResponse);
    CHECK(run_against("x_png", [&](const fs::path& d) {
              write_exchange_response(d, RefineResponse{req.frames});
              io::write_text_file(d / exchange_file_name("refined", 1), "not a png");
          }) == ErrorCategory::MalformedResponse);

    Scratch silent("x_silent");
    FileExchangeRefiner client({silent.path(), std::chrono::milliseconds(60)});
    CHECK(category_of([&] { refine::refine(req, client); }) == ErrorCategory::Timeout);
    CHECK(category_of([] { FileExchangeRefiner({}); }) == ErrorCategory::Config);
}

TEST_CASE("exchange file names")
{
    CHECK(exchange_file_name("frame", 7) == "frame_0007.png");
    CHECK(exchange_file_name("refined", 1234) == "refined_1234.png");
}

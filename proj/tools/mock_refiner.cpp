// Copyright Contributors to the iags project
// SPDX-License-Identifier: Apache-2.0

// Minimal external refiner speaking only the directory exchange. Each request is answered with
// w * GT + (1 - w) * frame when --ground-truth holds gt/frame_####.png, or the frames unchanged.
// --fault injects a broken reply for exercising the engine's error paths.

#include "iags/common/png_io.hpp"
#include "iags/pipeline/dataset.hpp"
#include "iags/refine/file_exchange.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>

namespace fs = std::filesystem;
using namespace iags;

int main(int argc, char** argv)
{
    CLI::App app{"Mock video refiner for the file exchange protocol"};
    std::string exchange;
    std::string ground_truth;
    int rounds = 1;
    long timeout_ms = 600000;
    std::string fault = "none";
    app.add_option("--exchange", exchange, "exchange directory")->required();
    app.add_option("--ground-truth", ground_truth, "dataset directory with gt/frame_####.png");
    app.add_option("--rounds", rounds, "requests to serve before exiting (0 = until idle timeout)");
    app.add_option("--timeout-ms", timeout_ms, "give up after this long without a request");
    app.add_option("--fault", fault, "reply defect")->check(CLI::IsMember({"none", "count", "dims", "garbage", "error", "silent"}));
    CLI11_PARSE(app, argc, argv);

    const fs::path dir = exchange;
    fs::create_directories(dir);
    for (int served = 0; rounds == 0 || served < rounds; ++served) {
        if (!refine::wait_for_request(dir, std::chrono::milliseconds(timeout_ms))) {
            if (rounds == 0)
                return 0; // idle: the engine is done
            std::fprintf(stderr, "mock_refiner: no request within %ld ms\n", timeout_ms);
            return 2;
        }
        try {
            refine::RefineRequest req = refine::read_exchange_request(dir);
            if (fault == "error") {
                refine::write_exchange_failure(dir, "mock fault");
                continue;
            }
            if (fault == "garbage") {
                refine::write_exchange_status(dir, "???");
                continue;
            }
            if (fault == "silent") {
                fs::remove(dir / refine::kRequestSentinel);
                continue;
            }
            refine::RefineResponse resp;
            for (std::size_t i = 0; i < req.frames.size(); ++i) {
                ColorImage out = req.frames[i];
                if (!ground_truth.empty()) {
                    const ColorImage gt = io::read_color_png(fs::path(ground_truth) / "gt" / pipeline::frame_file("frame", i));
                    const ScalarMap& w = req.change_maps[i];
                    for (std::size_t p = 0; p < w.size(); ++p)
                        for (int c = 0; c < 3; ++c)
                            out[p * 3 + c] = w[p] * gt[p * 3 + c] + (1.0 - w[p]) * out[p * 3 + c];
                }
                resp.frames.push_back(std::move(out));
            }
            if (fault == "count")
                resp.frames.pop_back();
            else if (fault == "dims")
                resp.frames.back() = make_color(resp.frames.back().width() + 1, resp.frames.back().height());
            refine::write_exchange_response(dir, resp);
        } catch (const std::exception& e) {
            refine::write_exchange_failure(dir, e.what());
        }
    }
    return 0;
}

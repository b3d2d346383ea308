// Copyright Contributors to the iags project
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "iags/refine/refiner.hpp"

#include <chrono>
#include <filesystem>
#include <functional>
#include <string>

namespace iags::refine {

// Directory exchange with an out-of-process refiner:
//   engine  -> request.json, frame_####.png (8-bit RGB), change_####.png (8-bit, round(w*255)),
//              depth_####.png (16-bit, code = round(depth / depth_scale), 0 = no depth), then request.ready
//   refiner -> refined_####.png (8-bit RGB), then response.ready
// response.ready is empty or "ok" on success; "error: <message>" reports a refiner failure.

inline constexpr const char* kRequestSentinel = "request.ready";
inline constexpr const char* kResponseSentinel = "response.ready";

std::string exchange_file_name(const char* prefix, std::size_t frame);

struct ExchangeOptions {
    std::filesystem::path directory;
    std::chrono::milliseconds timeout{600'000};
    std::chrono::milliseconds poll{5};
};

/// Engine side. Blocks until the response sentinel appears or the timeout expires (Timeout).
class FileExchangeRefiner final : public Refiner {
public:
    explicit FileExchangeRefiner(ExchangeOptions options);
    RefineResponse run(const RefineRequest& request) override;

private:
    ExchangeOptions options_;
};

// Refiner side, used by the mock refiner tool and tests.

/// Waits for request.ready and loads the request (change maps and depth come back quantized).
/// Returns false on timeout.
bool wait_for_request(const std::filesystem::path& directory, std::chrono::milliseconds timeout,
                      std::chrono::milliseconds poll = std::chrono::milliseconds{5});
RefineRequest read_exchange_request(const std::filesystem::path& directory);
/// Consumes request.ready, writes refined frames, then response.ready.
void write_exchange_response(const std::filesystem::path& directory, const RefineResponse& response);
void write_exchange_failure(const std::filesystem::path& directory, const std::string& message);
/// Consumes request.ready and writes response.ready with arbitrary contents.
void write_exchange_status(const std::filesystem::path& directory, const std::string& status);

/// Serves one request with `handler`. Returns false if no request arrived in time.
bool serve_exchange_once(const std::filesystem::path& directory,
                         const std::function<RefineResponse(const RefineRequest&)>& handler,
                         std::chrono::milliseconds timeout);

} // namespace iags::refine

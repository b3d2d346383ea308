// Copyright Contributors to the iags project
// SPDX-License-Identifier: Apache-2.0

#include "iags/refine/file_exchange.hpp"

#include "iags/common/error.hpp"
#include "iags/common/png_io.hpp"
#include "iags/common/text_io.hpp"

#include <fmt/format.h>
#include <json.hpp>

#include <thread>

namespace iags::refine {

namespace fs = std::filesystem;
using json = nlohmann::json;

namespace {

bool wait_for_file(const fs::path& path, std::chrono::milliseconds timeout, std::chrono::milliseconds poll)
{
    const auto deadline = std::chrono::steady_clock::now() + timeout;
    for (;;) {
        if (fs::exists(path))
            return true;
        if (std::chrono::steady_clock::now() >= deadline)
            return false;
        std::this_thread::sleep_for(poll);
    }
}

void remove_matching(const fs::path& dir, std::string_view prefix)
{
    std::error_code ec;
    for (const auto& entry : fs::directory_iterator(dir, ec))
        if (entry.path().filename().string().starts_with(prefix))
            fs::remove(entry.path(), ec);
}

std::size_t count_matching(const fs::path& dir, std::string_view prefix)
{
    std::size_t n = 0;
    std::error_code ec;
    for (const auto& entry : fs::directory_iterator(dir, ec))
        if (entry.path().filename().string().starts_with(prefix))
            ++n;
    return n;
}

/// Sentinels are renamed into place so a poller never sees a half-written file.
void write_sentinel(const fs::path& path, std::string_view contents)
{
    const fs::path tmp = path.string() + ".tmp";
    io::write_text_file(tmp, contents);
    fs::rename(tmp, path);
}

} // namespace

std::string exchange_file_name(const char* prefix, std::size_t frame)
{
    return fmt::format("{}_{:04d}.png", prefix, frame);
}

FileExchangeRefiner::FileExchangeRefiner(ExchangeOptions options) : options_(std::move(options))
{
    if (options_.directory.empty())
        throw Error(ErrorCategory::Config, "file exchange: no exchange directory configured");
}

RefineResponse FileExchangeRefiner::run(const RefineRequest& request)
{
    const fs::path& dir = options_.directory;
    const std::size_t n = request.frames.size();
    if (n == 0)
        throw Error(ErrorCategory::InvalidInput, "file exchange: request has no frames");
    try {
        fs::create_directories(dir);
        // Stale state from an interrupted round would be mistaken for this round's answer.
        fs::remove(dir / kResponseSentinel);
        fs::remove(dir / kRequestSentinel);
        remove_matching(dir, "refined_");

        json meta;
        meta["text_prompt"] = request.text_prompt;
        meta["noise_level"] = request.noise_level;
        meta["total_steps"] = request.total_steps;
        meta["frame_count"] = n;
        meta["width"] = request.frames[0].width();
        meta["height"] = request.frames[0].height();
        meta["depth_scale"] = request.depth_scale;
        json frames = json::array(), changes = json::array(), depths = json::array(), refined = json::array();
        for (std::size_t i = 0; i < n; ++i) {
            frames.push_back(exchange_file_name("frame", i));
            changes.push_back(exchange_file_name("change", i));
            refined.push_back(exchange_file_name("refined", i));
            io::write_color_png(dir / frames.back().get<std::string>(), request.frames[i]);
            io::write_unit_png(dir / changes.back().get<std::string>(), request.change_maps[i]);
            if (!request.depth_maps.empty()) {
                depths.push_back(exchange_file_name("depth", i));
                io::write_depth_png(dir / depths.back().get<std::string>(), request.depth_maps[i], request.depth_scale);
            }
        }
        meta["frames"] = frames;
        meta["change_maps"] = changes;
        meta["depth_maps"] = depths;
        meta["refined"] = refined;
        io::write_text_file(dir / "request.json", meta.dump(2) + "\n");
        write_sentinel(dir / kRequestSentinel, "");
    } catch (const Error& e) {
        throw Error(ErrorCategory::Protocol, fmt::format("file exchange: writing request failed: {}", e.what()));
    } catch (const fs::filesystem_error& e) {
        throw Error(ErrorCategory::Protocol, fmt::format("file exchange: writing request failed: {}", e.what()));
    }

    if (!wait_for_file(dir / kResponseSentinel, options_.timeout, options_.poll))
        throw Error(ErrorCategory::Timeout,
                    fmt::format("file exchange: no {} in '{}' after {} ms", kResponseSentinel, dir.string(),
                                options_.timeout.count()));

    std::string status = io::read_text_file(dir / kResponseSentinel);
    while (!status.empty() && std::isspace(static_cast<unsigned char>(status.back())))
        status.pop_back();
    std::error_code ec;
    fs::remove(dir / kResponseSentinel, ec);
    fs::remove(dir / kRequestSentinel, ec);
    if (status.starts_with("error"))
        throw Error(ErrorCategory::Refiner, fmt::format("refiner reported: {}", status));
    if (!status.empty() && status != "ok")
        throw Error(ErrorCategory::Protocol, fmt::format("file exchange: unexpected {} contents '{}'", kResponseSentinel, status));

    RefineResponse response;
    response.frames.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        const fs::path path = dir / exchange_file_name("refined", i);
        if (!fs::exists(path))
            throw Error(ErrorCategory::MalformedResponse,
                        fmt::format("refiner returned {} frames, expected {} (missing {})", count_matching(dir, "refined_"),
                                    n, path.filename().string()));
        try {
            response.frames.push_back(io::read_color_png(path));
        } catch (const Error& e) {
            throw Error(ErrorCategory::MalformedResponse, fmt::format("refined frame {}: {}", i, e.what()));
        }
    }
    if (const std::size_t extra = count_matching(dir, "refined_"); extra != n)
        throw Error(ErrorCategory::MalformedResponse, fmt::format("refiner returned {} frames, expected {}", extra, n));
    return response;
}

bool wait_for_request(const fs::path& directory, std::chrono::milliseconds timeout, std::chrono::milliseconds poll)
{
    return wait_for_file(directory / kRequestSentinel, timeout, poll);
}

RefineRequest read_exchange_request(const fs::path& directory)
{
    json meta;
    try {
        meta = json::parse(io::read_text_file(directory / "request.json"));
    } catch (const json::exception& e) {
        throw Error(ErrorCategory::Protocol, fmt::format("request.json: {}", e.what()));
    }
    RefineRequest request;
    try {
        request.text_prompt = meta.at("text_prompt").get<std::string>();
        request.noise_level = meta.at("noise_level").get<double>();
        request.total_steps = meta.at("total_steps").get<long>();
        request.depth_scale = meta.at("depth_scale").get<double>();
        const std::size_t n = meta.at("frame_count").get<std::size_t>();
        const auto& frames = meta.at("frames");
        const auto& changes = meta.at("change_maps");
        const auto& depths = meta.at("depth_maps");
        if (frames.size() != n || changes.size() != n || (!depths.empty() && depths.size() != n))
            throw Error(ErrorCategory::Protocol, "request.json: file lists disagree with frame_count");
        for (std::size_t i = 0; i < n; ++i) {
            request.frames.push_back(io::read_color_png(directory / frames[i].get<std::string>()));
            request.change_maps.push_back(io::read_unit_png(directory / changes[i].get<std::string>()));
            if (!depths.empty())
                request.depth_maps.push_back(io::read_depth_png(directory / depths[i].get<std::string>(), request.depth_scale));
        }
    } catch (const json::exception& e) {
        throw Error(ErrorCategory::Protocol, fmt::format("request.json: {}", e.what()));
    }
    return request;
}

void write_exchange_response(const fs::path& directory, const RefineResponse& response)
{
    std::error_code ec;
    fs::remove(directory / kRequestSentinel, ec);
    for (std::size_t i = 0; i < response.frames.size(); ++i)
        io::write_color_png(directory / exchange_file_name("refined", i), response.frames[i]);
    write_sentinel(directory / kResponseSentinel, "ok\n");
}

void write_exchange_status(const fs::path& directory, const std::string& status)
{
    std::error_code ec;
    fs::remove(directory / kRequestSentinel, ec);
    write_sentinel(directory / kResponseSentinel, status + "\n");
}

void write_exchange_failure(const fs::path& directory, const std::string& message)
{
    write_exchange_status(directory, "error: " + message);
}

bool serve_exchange_once(const fs::path& directory, const std::function<RefineResponse(const RefineRequest&)>& handler,
                         std::chrono::milliseconds timeout)
{
    if (!wait_for_request(directory, timeout))
        return false;
    try {
        write_exchange_response(directory, handler(read_exchange_request(directory)));
    } catch (const std::exception& e) {
        write_exchange_failure(directory, e.what());
    }
    return true;
}

} // namespace iags::refine

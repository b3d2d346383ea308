// Copyright Contributors to the iags project
// SPDX-License-Identifier: Apache-2.0

#include "iags/pipeline/config.hpp"

#include "iags/common/error.hpp"
#include "iags/common/text_io.hpp"

#include <fmt/format.h>

#include <array>
#include <functional>

namespace iags::pipeline {

namespace {

std::string_view trim(std::string_view s)
{
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front())))
        s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back())))
        s.remove_suffix(1);
    return s;
}

[[noreturn]] void bad_value(std::string_view key, std::string_view value, std::string_view want)
{
    throw Error(ErrorCategory::Config, fmt::format("{}: expected {}, got '{}'", key, want, value));
}

double to_double(std::string_view key, std::string_view v)
{
    try {
        return io::parse_double(v, key);
    } catch (const Error&) {
        bad_value(key, v, "a number");
    }
}

long to_long(std::string_view key, std::string_view v)
{
    try {
        return io::parse_long(v, key);
    } catch (const Error&) {
        bad_value(key, v, "an integer");
    }
}

bool to_bool(std::string_view key, std::string_view v)
{
    if (v == "true" || v == "1")
        return true;
    if (v == "false" || v == "0")
        return false;
    bad_value(key, v, "true or false");
}

std::vector<std::size_t> to_indices(std::string_view key, std::string_view v)
{
    std::vector<std::size_t> out;
    for (const std::string& t : io::split_tokens(v)) {
        const long i = to_long(key, t);
        if (i < 0)
            bad_value(key, t, "a non-negative view index");
        out.push_back(static_cast<std::size_t>(i));
    }
    return out;
}

std::string from_indices(const std::vector<std::size_t>& v)
{
    std::string out;
    for (std::size_t i : v)
        out += (out.empty() ? "" : " ") + std::to_string(i);
    return out;
}

// "view:x0,y0,x1,y1" entries separated by whitespace.
std::vector<CorruptRegion> to_regions(std::string_view key, std::string_view v)
{
    std::vector<CorruptRegion> out;
    for (const std::string& t : io::split_tokens(v)) {
        const auto colon = t.find(':');
        if (colon == std::string::npos)
            bad_value(key, t, "view:x0,y0,x1,y1");
        CorruptRegion r;
        r.view = static_cast<std::size_t>(to_long(key, std::string_view(t).substr(0, colon)));
        std::array<long, 4> c{};
        std::string_view rest = std::string_view(t).substr(colon + 1);
        for (int k = 0; k < 4; ++k) {
            const auto comma = rest.find(',');
            if ((k < 3) == (comma == std::string_view::npos))
                bad_value(key, t, "view:x0,y0,x1,y1");
            c[k] = to_long(key, rest.substr(0, comma));
            rest = k < 3 ? rest.substr(comma + 1) : std::string_view{};
        }
        r.rect = {static_cast<int>(c[0]), static_cast<int>(c[1]), static_cast<int>(c[2]), static_cast<int>(c[3])};
        out.push_back(r);
    }
    return out;
}

std::string from_regions(const std::vector<CorruptRegion>& v)
{
    std::string out;
    for (const CorruptRegion& r : v)
        out += fmt::format("{}{}:{},{},{},{}", out.empty() ? "" : " ", r.view, r.rect.x0, r.rect.y0, r.rect.x1, r.rect.y1);
    return out;
}

struct Entry {
    std::function<std::string(const PipelineConfig&)> get;
    std::function<void(PipelineConfig&, std::string_view key, std::string_view value)> set;
};

using Table = std::vector<std::pair<std::string, Entry>>;

template <class Member>
Entry number(Member member)
{
    return {[member](const PipelineConfig& c) {
                const auto& v = std::invoke(member, c);
                if constexpr (std::is_floating_point_v<std::decay_t<decltype(v)>>)
                    return io::format_double(v);
                else
                    return std::to_string(v);
            },
            [member](PipelineConfig& c, std::string_view k, std::string_view v) {
                auto& ref = std::invoke(member, c);
                using T = std::decay_t<decltype(ref)>;
                if constexpr (std::is_floating_point_v<T>)
                    ref = to_double(k, v);
                else if constexpr (std::is_same_v<T, bool>)
                    ref = to_bool(k, v);
                else {
                    const long x = to_long(k, v);
                    if constexpr (std::is_unsigned_v<T>)
                        if (x < 0)
                            bad_value(k, v, "a non-negative integer");
                    ref = static_cast<T>(x);
                }
            }};
}

template <class Get>
Entry text(Get get)
{
    return {[get](const PipelineConfig& c) { return std::string(get(const_cast<PipelineConfig&>(c))); },
            [get](PipelineConfig& c, std::string_view, std::string_view v) { get(c) = std::string(v); }};
}

template <class Get>
Entry path(Get get)
{
    return {[get](const PipelineConfig& c) { return get(const_cast<PipelineConfig&>(c)).string(); },
            [get](PipelineConfig& c, std::string_view, std::string_view v) { get(c) = std::string(v); }};
}

const Table& table()
{
    // Accessors returning references let nested members share the same helpers.
#define IAGS_NUM(expr) number([](auto& c) -> auto& { return expr; })
    static const Table t = {
        {"profile", text([](PipelineConfig& c) -> std::string& { return c.profile; })},
        {"seed", IAGS_NUM(c.seed)},
        {"dataset_dir", path([](PipelineConfig& c) -> std::filesystem::path& { return c.dataset_dir; })},
        {"output_dir", path([](PipelineConfig& c) -> std::filesystem::path& { return c.output_dir; })},
        {"exchange_dir", path([](PipelineConfig& c) -> std::filesystem::path& { return c.exchange_dir; })},
        {"refiner", text([](PipelineConfig& c) -> std::string& { return c.refiner; })},
        {"refiner_timeout_ms", IAGS_NUM(c.refiner_timeout_ms)},
        {"oracle_noise", IAGS_NUM(c.oracle_noise)},
        {"depth_noise", IAGS_NUM(c.depth_noise)},
        {"text_prompt", text([](PipelineConfig& c) -> std::string& { return c.train.text_prompt; })},
        {"reference_view", IAGS_NUM(c.reference_view)},
        {"aux_views", {[](const PipelineConfig& c) { return from_indices(c.aux_views); },
                       [](PipelineConfig& c, std::string_view k, std::string_view v) { c.aux_views = to_indices(k, v); }}},
        {"relative_margin", IAGS_NUM(c.expansion.relative_margin)},
        {"voxel_resolution", IAGS_NUM(c.expansion.voxel_resolution)},
        {"bounds_inflate", IAGS_NUM(c.expansion.bounds_inflate)},
        {"sort_by_offset", number([](auto& c) -> auto& { return c.expansion.sort_by_offset; })},
        {"init_splats", IAGS_NUM(c.init_splats)},
        {"init_opacity", IAGS_NUM(c.init_opacity)},
        {"iterations", IAGS_NUM(c.train.total_iterations)},
        {"refine_interval", IAGS_NUM(c.train.refine_interval)},
        {"s_start", IAGS_NUM(c.train.s_start)},
        {"s_end", IAGS_NUM(c.train.s_end)},
        {"tau_low_start", IAGS_NUM(c.train.tau_low_start)},
        {"tau_low_end", IAGS_NUM(c.train.tau_low_end)},
        {"tau_high", IAGS_NUM(c.train.tau_high)},
        {"lambda_prior", IAGS_NUM(c.train.mask_weights.prior)},
        {"lambda_discard", IAGS_NUM(c.train.mask_weights.discard)},
        {"loss_l2", IAGS_NUM(c.train.loss_weights.l2)},
        {"loss_l1", IAGS_NUM(c.train.loss_weights.l1)},
        {"loss_depth", IAGS_NUM(c.train.loss_weights.depth)},
        {"w_max", IAGS_NUM(c.train.tiers.max)},
        {"w_mid", IAGS_NUM(c.train.tiers.mid)},
        {"w_min", IAGS_NUM(c.train.tiers.min)},
        {"denoise_steps", IAGS_NUM(c.train.denoise_steps)},
        {"depth_scale", IAGS_NUM(c.train.depth_scale)},
        {"lr_means", IAGS_NUM(c.train.rates.means)},
        {"lr_means_final", IAGS_NUM(c.train.rates.means_final)},
        {"lr_colors", IAGS_NUM(c.train.rates.colors)},
        {"lr_opacities", IAGS_NUM(c.train.rates.opacities)},
        {"lr_scales", IAGS_NUM(c.train.rates.scales)},
        {"lr_quats", IAGS_NUM(c.train.rates.quats)},
        {"lr_predictor", IAGS_NUM(c.train.predictor_rate)},
        {"densify_from", IAGS_NUM(c.train.densify_from)},
        {"densify_until", IAGS_NUM(c.train.densify_until)},
        {"densify_interval", IAGS_NUM(c.train.densify_interval)},
        {"densify_grad_threshold", IAGS_NUM(c.train.density.grad_threshold)},
        {"prune_opacity", IAGS_NUM(c.train.density.prune_opacity)},
        {"max_splats", IAGS_NUM(c.train.density.max_splats)},
        {"inconsistency_aware", number([](auto& c) -> auto& { return c.train.inconsistency_aware; })},
        {"log_interval", IAGS_NUM(c.train.log_interval)},
        {"synth_splats", IAGS_NUM(c.synth.splats)},
        {"synth_views", IAGS_NUM(c.synth.views)},
        {"synth_width", IAGS_NUM(c.synth.width)},
        {"synth_height", IAGS_NUM(c.synth.height)},
        {"synth_focal", IAGS_NUM(c.synth.focal)},
        {"synth_arc_radius", IAGS_NUM(c.synth.arc_radius)},
        {"synth_arc_degrees", IAGS_NUM(c.synth.arc_degrees)},
        {"corrupt_regions", {[](const PipelineConfig& c) { return from_regions(c.synth.regions); },
                             [](PipelineConfig& c, std::string_view k, std::string_view v) { c.synth.regions = to_regions(k, v); }}},
        {"corrupt_views", {[](const PipelineConfig& c) { return from_indices(c.synth.corrupt_views); },
                           [](PipelineConfig& c, std::string_view k, std::string_view v) { c.synth.corrupt_views = to_indices(k, v); }}},
        {"corrupt_fraction", IAGS_NUM(c.synth.corrupt_fraction)},
        {"corrupt_mode", {[](const PipelineConfig& c) {
                              return std::string(c.synth.corrupt_mode == CorruptionMode::Recolor ? "recolor" : "shuffle");
                          },
                          [](PipelineConfig& c, std::string_view k, std::string_view v) {
                              if (v == "recolor")
                                  c.synth.corrupt_mode = CorruptionMode::Recolor;
                              else if (v == "shuffle")
                                  c.synth.corrupt_mode = CorruptionMode::Shuffle;
                              else
                                  bad_value(k, v, "recolor or shuffle");
                          }}},
    };
#undef IAGS_NUM
    return t;
}

const Entry* find_entry(std::string_view key)
{
    for (const auto& [name, entry] : table())
        if (name == key)
            return &entry;
    return nullptr;
}

} // namespace

void apply_profile(PipelineConfig& c, const std::string& profile)
{
    train::TrainConfig& t = c.train;
    if (profile == "paper") {
        t.total_iterations = 15000;
        t.refine_interval = 2000;
        t.densify_from = 500;
        t.densify_until = 7500;
        t.densify_interval = 100;
        t.log_interval = 100;
        c.synth.views = 12;
    } else if (profile == "desk") {
        t.total_iterations = 3000;
        t.refine_interval = 400;
        t.densify_from = 100;
        t.densify_until = 1500;
        t.densify_interval = 100;
        t.log_interval = 50;
        c.synth.views = 12;
    } else if (profile == "smoke") {
        t.total_iterations = 500;
        t.refine_interval = 100;
        t.densify_from = 100;
        t.densify_until = 300;
        t.densify_interval = 100;
        t.log_interval = 25;
        c.synth.views = 8;
    } else {
        throw Error(ErrorCategory::Config, fmt::format("unknown profile '{}' (expected smoke, desk or paper)", profile));
    }
    c.profile = profile;
}

void PipelineConfig::validate() const
{
    train.validate();
    const auto fail = [](const std::string& what) { throw Error(ErrorCategory::Config, what); };
    if (refiner != "oracle" && refiner != "exchange")
        fail("refiner must be 'oracle' or 'exchange'");
    if (refiner_timeout_ms < 1)
        fail("refiner_timeout_ms must be >= 1");
    if (oracle_noise < 0.0 || depth_noise < 0.0)
        fail("noise levels must be non-negative");
    if (!(expansion.relative_margin >= 0.0) || expansion.voxel_resolution < 1 || expansion.bounds_inflate < 0.0)
        fail("geometry tolerances out of range");
    if (init_splats < 1)
        fail("init_splats must be >= 1");
    if (!(init_opacity > 0.0 && init_opacity < 1.0))
        fail("init_opacity must lie in (0, 1)");
    if (synth.splats < 1 || synth.views < 2 || synth.width < 8 || synth.height < 8 || !(synth.focal > 0.0))
        fail("synthetic scene size out of range");
    if (!(synth.arc_radius > 0.0))
        fail("synth_arc_radius must be positive");
    if (!(synth.corrupt_fraction >= 0.0 && synth.corrupt_fraction < 1.0))
        fail("corrupt_fraction must lie in [0, 1)");
}

PipelineConfig parse_config(const std::string& text, const std::string& source,
                            const std::optional<std::string>& profile_override)
{
    std::vector<std::pair<std::string, std::string>> pairs;
    std::size_t line_no = 0;
    std::size_t start = 0;
    while (start <= text.size()) {
        const std::size_t end = std::min(text.find('\n', start), text.size());
        std::string_view line(text.data() + start, end - start);
        start = end + 1;
        ++line_no;
        if (const auto hash = line.find('#'); hash != std::string_view::npos)
            line = line.substr(0, hash);
        line = trim(line);
        if (line.empty())
            continue;
        const auto eq = line.find('=');
        if (eq == std::string_view::npos)
            throw Error(ErrorCategory::Config, fmt::format("{}:{}: expected 'key = value'", source, line_no));
        const std::string key(trim(line.substr(0, eq)));
        if (!find_entry(key))
            throw Error(ErrorCategory::Config, fmt::format("{}:{}: unknown key '{}'", source, line_no, key));
        pairs.emplace_back(key, std::string(trim(line.substr(eq + 1))));
    }

    PipelineConfig config;
    std::string profile = "paper";
    for (const auto& [k, v] : pairs)
        if (k == "profile")
            profile = v;
    if (profile_override)
        profile = *profile_override;
    apply_profile(config, profile);
    for (const auto& [k, v] : pairs)
        if (k != "profile")
            find_entry(k)->set(config, k, v);
    config.validate();
    return config;
}

PipelineConfig load_config(const std::filesystem::path& path, const std::optional<std::string>& profile_override)
{
    return parse_config(io::read_text_file(path), path.string(), profile_override);
}

std::string serialize_config(const PipelineConfig& config)
{
    std::string out;
    for (const auto& [name, entry] : table())
        out += name + " = " + entry.get(config) + "\n";
    return out;
}

} // namespace iags::pipeline

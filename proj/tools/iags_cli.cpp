// Copyright Contributors to the iags project
// SPDX-License-Identifier: Apache-2.0

// iags init|train|synth|eval|render --config <path> [--seed <n>] [--profile smoke|desk|paper]

#include "iags/common/error.hpp"
#include "iags/common/text_io.hpp"
#include "iags/pipeline/commands.hpp"
#include "iags/pipeline/config.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <exception>
#include <optional>
#include <string>

namespace {

int fail(std::string_view category, const std::string& message)
{
    // One machine-parseable line: "error <category>: <message>".
    std::fprintf(stderr, "error %.*s: %s\n", static_cast<int>(category.size()), category.data(), message.c_str());
    return 1;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Inconsistency-aware Gaussian splatting pipeline"};
    app.require_subcommand(1, 1);
    app.fallthrough(); // options may follow the subcommand

    std::string config_path;
    std::optional<std::uint64_t> seed;
    std::optional<std::string> profile;
    std::optional<std::string> dump;
    app.add_option("--config", config_path, "key = value configuration file");
    app.add_option("--seed", seed, "override the configured seed");
    app.add_option("--profile", profile, "schedule preset")->check(CLI::IsMember({"smoke", "desk", "paper"}));
    app.add_option("--dump-config", dump, "write the effective configuration here");

    app.add_subcommand("synth", "generate a synthetic dataset with ground truth");
    app.add_subcommand("init", "warp-and-inpaint initialization: point cloud, masks, seed field");
    app.add_subcommand("train", "optimize the splat field with periodic video refinement");
    app.add_subcommand("eval", "depth Pearson, PSNR, masked PSNR and mask IoU of the trained field");
    app.add_subcommand("render", "render the trained field along the trajectory");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0)
            return app.exit(e);
        return fail("usage", e.what());
    }

    try {
        using namespace iags::pipeline;
        PipelineConfig config = config_path.empty() ? parse_config(std::string{}, "<defaults>", profile)
                                                    : load_config(config_path, profile);
        if (seed)
            config.seed = *seed;
        if (dump)
            iags::io::write_text_file(*dump, serialize_config(config));

        const std::string cmd = app.get_subcommands().front()->get_name();
        if (cmd == "synth") {
            cmd_synth(config);
        } else if (cmd == "init") {
            cmd_init(config);
        } else if (cmd == "train") {
            cmd_train(config);
        } else if (cmd == "eval") {
            std::fputs(format_report(cmd_eval(config)).c_str(), stdout);
        } else {
            cmd_render(config);
        }
    } catch (const iags::Error& e) {
        return fail(iags::category_name(e.category()), e.what());
    } catch (const std::exception& e) {
        return fail("internal", e.what());
    }
    return 0;
}

// Copyright 2026 The hfreadout Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <cstdlib>
#include <filesystem>
#include <iostream>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "commands.hpp"
#include "config.hpp"
#include "hfreadout/errors.hpp"

namespace {

using namespace hfro::app;

int resolve_worker_count(int flag, const RunConfig &config) {
    if (flag > 0) return flag;
    if (const char *env = std::getenv("HFRO_WORKERS")) {
        char *end = nullptr;
        const long v = std::strtol(env, &end, 10);
        if (end != env && *end == '\0' && v > 0 && v <= 4096) return static_cast<int>(v);
        std::cerr << "warning: ignoring HFRO_WORKERS='" << env << "'\n";
    }
    if (config.workers) return *config.workers;
    return 1;
}

int report_errors(const ParseResult &parsed) {
    for (const auto &w : parsed.warnings) std::cerr << "warning: " << w << "\n";
    if (parsed.errors.empty()) return kExitOk;
    std::cerr << "config error:\n";
    for (const auto &e : parsed.errors) std::cerr << "  " << e << "\n";
    return kExitConfig;
}

int execute(const std::string &kind, const std::string &config_path, int workers_flag, const std::string &out_flag) {
    const ParseResult parsed = load_config(config_path, kind);
    if (const int code = report_errors(parsed)) return code;
    const RunConfig &config = *parsed.config;
    RunContext ctx;
    ctx.workers = resolve_worker_count(workers_flag, config);
    ctx.output_dir = !out_flag.empty() ? out_flag : config.output_dir.value_or(".");
    ctx.base_dir = std::filesystem::path(config_path).parent_path().string();
    if (ctx.base_dir.empty()) ctx.base_dir = ".";
    try {
        run(config, ctx, std::cerr);
    } catch (const hfro::IoError &e) {
        std::cerr << "I/O error: " << e.what() << "\n";
        return kExitIo;
    } catch (const hfro::NumericalError &e) {
        std::cerr << "numerical failure in " << kind << ": " << e.what() << "\n";
        return kExitNumerical;
    } catch (const hfro::InvalidParameter &e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const hfro::ConfigError &e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    }
    return kExitOk;
}

int validate(const std::string &config_path, const std::string &kind) {
    const ParseResult parsed = load_config(config_path, kind);
    if (const int code = report_errors(parsed)) return code;
    std::cout << "ok\n" << to_json(*parsed.config).dump(2) << "\n";
    return kExitOk;
}

}  // namespace

int main(int argc, char **argv) {
    CLI::App app{"hfro: transmon readout modelling"};
    app.set_version_flag("--version", fmt::format("hfro {} (config schema {})", HFRO_VERSION, kSchemaVersion));
    app.require_subcommand(1);

    std::string config_path;
    std::string out_dir;
    int workers = 0;
    auto add_run_options = [&](CLI::App *sub) {
        sub->add_option("--config", config_path, "JSON config file")->required();
        sub->add_option("--workers", workers, "worker threads (overrides HFRO_WORKERS and the config)")
            ->check(CLI::Range(1, 4096));
        sub->add_option("--out", out_dir, "output directory");
    };

    CLI::App *spectrum = app.add_subcommand("spectrum", "transmon levels and charge matrix elements");
    CLI::App *chi = app.add_subcommand("chi", "dispersive shift and optional ratio scan");
    CLI::App *purcell = app.add_subcommand("purcell", "Purcell decay of a lumped readout circuit");
    CLI::App *atlas = app.add_subcommand("atlas", "Floquet hybridization map over drive frequency and power");
    CLI::App *qnd = app.add_subcommand("qnd", "QND metrics from records or a conditional table");
    CLI::App *synth = qnd->add_subcommand("synth", "synthetic measurement records");
    for (CLI::App *sub : {spectrum, chi, purcell, atlas, synth}) add_run_options(sub);
    qnd->add_option("--config", config_path, "JSON config file");
    qnd->add_option("--workers", workers, "worker threads (overrides HFRO_WORKERS and the config)")
        ->check(CLI::Range(1, 4096));
    qnd->add_option("--out", out_dir, "output directory");

    std::string kind;
    CLI::App *check = app.add_subcommand("validate", "schema check without computation");
    check->add_option("--config", config_path, "JSON config file")->required();
    check->add_option("--kind", kind, "config kind when the file has no kind key");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError &e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kExitConfig;
    }

    if (check->parsed()) return validate(config_path, kind);
    if (synth->parsed()) return execute("qnd-synth", config_path, workers, out_dir);
    if (qnd->parsed()) {
        if (config_path.empty()) {
            std::cerr << "config error: --config is required\n";
            return kExitConfig;
        }
        return execute("qnd", config_path, workers, out_dir);
    }
    for (CLI::App *sub : {spectrum, chi, purcell, atlas}) {
        if (sub->parsed()) return execute(sub->get_name(), config_path, workers, out_dir);
    }
    return kExitConfig;
}

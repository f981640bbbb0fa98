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

// Run configuration for the hfro tool: one JSON object per run.
//
// Every block is parsed into plain structs so a config survives
// serialize -> parse unchanged. Unknown keys are errors.

#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

namespace hfro::app {

using Json = nlohmann::ordered_json;

inline constexpr int kSchemaVersion = 1;

struct TransmonBlock {
    double e_c_hz = 0.0;
    double e_j_hz = 0.0;
    double n_g = 0.0;
    int n_cut = 40;
    friend bool operator==(const TransmonBlock &, const TransmonBlock &) = default;
};

struct SpectrumConfig {
    TransmonBlock transmon;
    int levels = 10;
    friend bool operator==(const SpectrumConfig &, const SpectrumConfig &) = default;
};

struct RatioScanBlock {
    double omega_min_hz = 0.0;
    double omega_max_hz = 0.0;
    int points = 0;
    std::vector<double> n_g_list{0.25, 0.0};
    double visibility = 0.1;
    friend bool operator==(const RatioScanBlock &, const RatioScanBlock &) = default;
};

struct ChiConfig {
    TransmonBlock transmon;
    double omega_r_bare_hz = 0.0;
    std::optional<double> g_hz;
    std::optional<double> eta;
    std::string method = "full_sum";
    std::optional<int> m_max;
    std::optional<RatioScanBlock> ratio_scan;
    friend bool operator==(const ChiConfig &, const ChiConfig &) = default;
};

struct CircuitBlock {
    double l_q_h = 0.0;
    double c_q_f = 0.0;
    double c_c_f = 0.0;
    double l_res_h = 0.0;
    double c_res_f = 0.0;
    std::string topology = "inductive";
    double l_tr_h = 0.0;
    double c_tr_f = 0.0;
    double z0_ohm = 50.0;
    friend bool operator==(const CircuitBlock &, const CircuitBlock &) = default;
};

struct TargetsBlock {
    double omega_q_hz = 0.0;
    double omega_r_hz = 0.0;
    double eta = 0.0;
    double kappa_hz = 0.0;
    double z0_ohm = 50.0;
    std::string topology = "inductive";
    friend bool operator==(const TargetsBlock &, const TargetsBlock &) = default;
};

struct SweepBlock {
    double f_min_hz = 0.0;
    double f_max_hz = 0.0;
    int points = 0;
    friend bool operator==(const SweepBlock &, const SweepBlock &) = default;
};

struct PurcellConfig {
    std::optional<CircuitBlock> circuit;
    std::optional<TargetsBlock> targets;
    std::optional<SweepBlock> admittance;
    friend bool operator==(const PurcellConfig &, const PurcellConfig &) = default;
};

struct GridBlock {
    double omega_min = 0.0;
    double omega_max = 0.0;
    int n_omega = 0;
    double power_min = 0.0;
    double power_max = 0.0;
    int n_power = 0;
    std::string power_kind = "stark";
    friend bool operator==(const GridBlock &, const GridBlock &) = default;
};

struct TrackBlock {
    std::vector<int> levels{0, 1};
    double threshold = 0.8;
    int windows = 8;
    friend bool operator==(const TrackBlock &, const TrackBlock &) = default;
};

struct TransitionBlock {
    int initial = 1;
    int final_level = 8;
    std::vector<double> powers;
    double omega_min = 0.0;
    double omega_max = 0.0;
    friend bool operator==(const TransitionBlock &, const TransitionBlock &) = default;
};

struct AtlasConfig {
    TransmonBlock transmon;
    GridBlock grid;
    int levels = 20;
    double tolerance = 1e-7;
    TrackBlock track;
    std::optional<TransitionBlock> transition;
    friend bool operator==(const AtlasConfig &, const AtlasConfig &) = default;
};

struct TableBlock {
    /// rows[k][i] = {P(i_s, 0_m | k_s), P(i_s, 1_m | k_s)}.
    std::vector<std::vector<std::vector<double>>> rows;
    friend bool operator==(const TableBlock &, const TableBlock &) = default;
};

struct QndConfig {
    std::optional<std::string> records;
    std::string format = "csv";
    std::optional<TableBlock> table;
    friend bool operator==(const QndConfig &, const QndConfig &) = default;
};

struct QndSynthConfig {
    double assign = 0.0;
    double bitflip = 0.0;
    double leakage = 0.0;
    double initial_leakage = 0.0;
    int sequence_length = 18;
    std::uint64_t shots = 0;
    std::uint64_t seed = 0;
    friend bool operator==(const QndSynthConfig &, const QndSynthConfig &) = default;
};

using Body = std::variant<SpectrumConfig, ChiConfig, PurcellConfig, AtlasConfig, QndConfig, QndSynthConfig>;

struct RunConfig {
    Body body;
    std::optional<int> workers;
    std::optional<std::string> output_dir;
    friend bool operator==(const RunConfig &, const RunConfig &) = default;
};

/// "spectrum", "chi", "purcell", "atlas", "qnd", "qnd-synth".
std::string kind_of(const Body &body);
const std::vector<std::string> &known_kinds();

struct ParseResult {
    std::optional<RunConfig> config;
    std::vector<std::string> errors;
    std::vector<std::string> warnings;
};

/// Collects every schema violation. `kind` overrides a missing "kind" key and must
/// agree with a present one.
ParseResult parse_config(const Json &j, const std::string &kind = "");

/// Reads and parses a file; an empty file is reported like an empty object.
ParseResult load_config(const std::string &path, const std::string &kind = "");

/// Full form with every default spelled out, keys in schema order.
Json to_json(const RunConfig &config);

/// Compact canonical text of the computation-relevant part (no workers, no output_dir).
std::string canonical_text(const RunConfig &config);

}  // namespace hfro::app

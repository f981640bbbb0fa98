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

#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <unistd.h>

#include "commands.hpp"
#include "config.hpp"
#include "hfreadout/errors.hpp"
#include "output.hpp"

using namespace hfro::app;
namespace fs = std::filesystem;

namespace {
fs::path scratch(const std::string &name) {
    const fs::path p = fs::temp_directory_path() / ("hfro_cli_" + std::to_string(::getpid()) + "_" + name);
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
}

std::string slurp(const fs::path &p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

Json device_chi() {
    return Json::parse(R"({"kind": "chi", "transmon": {"e_c_hz": 36e6, "e_j_hz": 2.2e9, "n_g": 0.25},
                           "omega_r_bare_hz": 9.2233e9, "eta": 0.38})");
}

RunConfig parsed(const Json &j) {
    const ParseResult r = parse_config(j);
    REQUIRE(r.errors.empty());
    return *r.config;
}

std::string run_to(const RunConfig &c, const fs::path &dir, int workers) {
    std::ostringstream log;
    run(c, RunContext{workers, dir.string(), "."}, log);
    return log.str();
}
}  // namespace

TEST_SUITE("cli") {
    TEST_CASE("config round trip") {
        const RunConfig a = parsed(device_chi());
        const RunConfig b = parsed(to_json(a));
        CHECK(a == b);
        CHECK(to_json(a).dump() == to_json(b).dump());
        CHECK(canonical_text(a) == canonical_text(b));
    }

    TEST_CASE("unknown keys are rejected") {
        Json j = device_chi();
        j["colour"] = "blue";
        j["transmon"]["e_k_hz"] = 1.0;
        const ParseResult r = parse_config(j);
        CHECK_FALSE(r.config.has_value());
        CHECK(r.errors.size() >= 2);
    }

    TEST_CASE("offset charge is normalized with a warning") {
        Json j = device_chi();
        j["transmon"]["n_g"] = 1.3;
        const ParseResult r = parse_config(j);
        REQUIRE(r.config.has_value());
        CHECK(std::get<ChiConfig>(r.config->body).transmon.n_g == doctest::Approx(0.3).epsilon(1e-12));
        CHECK(r.warnings.size() == 1);
    }

    TEST_CASE("empty config lists the required keys") {
        const ParseResult r = parse_config(Json::object());
        CHECK_FALSE(r.config.has_value());
        REQUIRE_FALSE(r.errors.empty());
        const ParseResult chi = parse_config(Json::object(), "chi");
        CHECK(chi.errors.size() >= 2);
        const fs::path dir = scratch("empty");
        std::ofstream(dir / "empty.json").close();
        CHECK_FALSE(load_config((dir / "empty.json").string()).errors.empty());
        fs::remove_all(dir);
    }

    TEST_CASE("kind mismatch") {
        CHECK_FALSE(parse_config(device_chi(), "atlas").errors.empty());
        Json j = device_chi();
        j["kind"] = "banana";
        CHECK_FALSE(parse_config(j).errors.empty());
    }

    TEST_CASE("worker count and output directory stay out of the hash") {
        Json j = device_chi();
        const RunConfig a = parsed(j);
        j["workers"] = 8;
        j["output_dir"] = "elsewhere";
        const RunConfig b = parsed(j);
        CHECK(canonical_text(a) == canonical_text(b));
        CHECK_FALSE(a == b);
    }

    TEST_CASE("number format") {
        CHECK(format_number(-9.0e5) == "-9.00000000000e+05");
        CHECK(format_number(-0.0) == "0.00000000000e+00");
        CHECK(format_number(std::nan("")) == "nan");
        CHECK(format_number(1.0 / 3.0) == "3.33333333333e-01");
    }

    TEST_CASE("sha256") {
        CHECK(sha256_hex("abc") == "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
    }

    TEST_CASE("atomic writes fail loudly") {
        CHECK_THROWS_AS(write_atomic("/nonexistent-dir/x/y.txt", "data"), hfro::IoError);
    }

    TEST_CASE("device chi run") {
        const fs::path dir = scratch("chi");
        run_to(parsed(device_chi()), dir, 1);
        std::istringstream csv(slurp(dir / "chi.csv"));
        std::string header, row, field;
        std::getline(csv, header);
        std::getline(csv, row);
        std::vector<std::string> names, values;
        for (std::istringstream h(header); std::getline(h, field, ',');) names.push_back(field);
        for (std::istringstream v(row); std::getline(v, field, ',');) values.push_back(field);
        REQUIRE(names.size() == values.size());
        double chi = NAN;
        for (std::size_t i = 0; i < names.size(); ++i) {
            if (names[i] == "chi_hz") chi = std::stod(values[i]);
        }
        CHECK(chi == doctest::Approx(-0.90e6).epsilon(0.05));
        const Json manifest = Json::parse(slurp(dir / "manifest.json"));
        CHECK(manifest["config_sha256"] == sha256_hex(canonical_text(parsed(device_chi()))));
        fs::remove_all(dir);
    }

    TEST_CASE("qnd outputs do not depend on the worker count") {
        const RunConfig synth = parsed(Json::parse(
            R"({"kind": "qnd-synth", "rates": {"assign": 0.003, "bitflip": 0.0004, "leakage": 0.0002}, "shots": 20000, "seed": 7})"));
        const fs::path a = scratch("synth1");
        const fs::path b = scratch("synth4");
        run_to(synth, a, 1);
        run_to(synth, b, 4);
        CHECK(slurp(a / "records.csv") == slurp(b / "records.csv"));
        CHECK(slurp(a / "manifest.json") == slurp(b / "manifest.json"));

        Json q = Json::parse(R"({"kind": "qnd"})");
        q["records"] = (a / "records.csv").string();
        const RunConfig qc = parsed(q);
        const fs::path c = scratch("qnd1");
        const fs::path d = scratch("qnd4");
        run_to(qc, c, 1);
        run_to(qc, d, 4);
        CHECK(slurp(c / "qnd_tally.json") == slurp(d / "qnd_tally.json"));
        for (const fs::path &p : {a, b, c, d}) fs::remove_all(p);
    }

    TEST_CASE("bad records file is an io error") {
        const RunConfig qc = parsed(Json::parse(R"({"kind": "qnd", "records": "/nonexistent/records.csv"})"));
        const fs::path dir = scratch("qndbad");
        CHECK_THROWS_AS(run_to(qc, dir, 1), hfro::IoError);
        fs::remove_all(dir);
    }
}

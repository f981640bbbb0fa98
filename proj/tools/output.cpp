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

#include "output.hpp"

#include <openssl/evp.h>
#include <unistd.h>

#include <cmath>
#include <filesystem>
#include <fstream>

#include <fmt/format.h>

#include "hfreadout/errors.hpp"

namespace hfro::app {

namespace fs = std::filesystem;

std::string format_number(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    if (v == 0.0) v = 0.0;  // drop the sign of -0
    return fmt::format("{:.11e}", v);
}

std::string sha256_hex(const std::string &data) {
    unsigned char digest[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    if (EVP_Digest(data.data(), data.size(), digest, &len, EVP_sha256(), nullptr) != 1) {
        throw Error("SHA-256 digest failed");
    }
    std::string out;
    out.reserve(2 * len);
    for (unsigned int i = 0; i < len; ++i) out += fmt::format("{:02x}", digest[i]);
    return out;
}

void write_atomic(const std::string &path, const std::string &data) {
    const fs::path target(path);
    fs::path tmp = target;
    tmp.replace_filename("." + target.filename().string() + fmt::format(".tmp{}", static_cast<long>(::getpid())));
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw IoError("cannot create " + tmp.string());
        out.write(data.data(), static_cast<std::streamsize>(data.size()));
        out.flush();
        if (!out) {
            std::error_code ignored;
            fs::remove(tmp, ignored);
            throw IoError("cannot write " + tmp.string());
        }
    }
    std::error_code ec;
    fs::rename(tmp, target, ec);
    if (ec) {
        std::error_code ignored;
        fs::remove(tmp, ignored);
        throw IoError("cannot move output into place at " + target.string() + ": " + ec.message());
    }
}

OutputSet::OutputSet(std::string dir) : dir_(std::move(dir)) {
    std::error_code ec;
    fs::create_directories(dir_, ec);
    if (ec || !fs::is_directory(dir_)) throw IoError("cannot create output directory " + dir_);
}

void OutputSet::write(const std::string &name, const std::string &data) {
    write_atomic((fs::path(dir_) / name).string(), data);
    files_.push_back({name, data.size(), sha256_hex(data)});
}

void OutputSet::write_manifest(const RunConfig &config, const Json &summary) {
    const std::string canonical = canonical_text(config);
    Json m;
    m["tool"] = "hfro";
    m["tool_version"] = HFRO_VERSION;
    m["schema_version"] = kSchemaVersion;
    m["kind"] = kind_of(config.body);
    m["config_sha256"] = sha256_hex(canonical);
    m["config"] = Json::parse(canonical);
    Json files = Json::array();
    for (const WrittenFile &f : files_) files.push_back(Json{{"name", f.name}, {"bytes", f.bytes}, {"sha256", f.sha256}});
    m["files"] = files;
    if (!summary.empty()) m["summary"] = summary;
    write_atomic((fs::path(dir_) / "manifest.json").string(), m.dump(2) + "\n");
}

std::string csv_row(const std::vector<std::string> &fields) {
    std::string s;
    for (std::size_t i = 0; i < fields.size(); ++i) {
        if (i) s += ',';
        s += fields[i];
    }
    s += '\n';
    return s;
}

}  // namespace hfro::app

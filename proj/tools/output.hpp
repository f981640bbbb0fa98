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

// Artifact writing: fixed number formatting, atomic file replacement and the run manifest.

#pragma once

#include <string>
#include <vector>

#include "config.hpp"

namespace hfro::app {

/// Scientific notation with 12 significant digits; "nan" and "inf" spelled out.
std::string format_number(double v);

std::string sha256_hex(const std::string &data);

/// Writes data to path through a temporary sibling and a rename. Throws IoError.
void write_atomic(const std::string &path, const std::string &data);

struct WrittenFile {
    std::string name;
    std::size_t bytes = 0;
    std::string sha256;
};

/// Output directory of one run. Files are listed in the manifest in write order.
class OutputSet {
  public:
    explicit OutputSet(std::string dir);

    void write(const std::string &name, const std::string &data);
    /// manifest.json: tool and schema versions, config hash and echo, file digests.
    void write_manifest(const RunConfig &config, const Json &summary = Json::object());

    const std::string &dir() const { return dir_; }
    const std::vector<WrittenFile> &files() const { return files_; }

  private:
    std::string dir_;
    std::vector<WrittenFile> files_;
};

/// Comma-joined row with a trailing newline.
std::string csv_row(const std::vector<std::string> &fields);

}  // namespace hfro::app

// SPDX-License-Identifier: Apache-2.0
//
// uvchan: multi-UAV to multi-vehicle radio channel simulator
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

#pragma once

#include <filesystem>
#include <fstream>
#include <initializer_list>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace uvchan::io
{

class IoError : public std::runtime_error
{
  public:
    using std::runtime_error::runtime_error;
};

// Shortest decimal text that round-trips the double.
std::string num(double v);
std::string num(std::size_t v);

// Tab-delimited table. Header lines start with '#', then one column-name line.
class TableWriter
{
  public:
    TableWriter(const std::filesystem::path &path, const std::vector<std::pair<std::string, std::string>> &header,
                const std::vector<std::string> &columns);
    ~TableWriter();

    TableWriter(const TableWriter &) = delete;
    TableWriter &operator=(const TableWriter &) = delete;

    void row(const std::vector<std::string> &cells);
    void close(); // throws IoError on any write failure

  private:
    std::filesystem::path path_;
    std::ofstream out_;
    std::size_t columns_ = 0;
    bool closed_ = false;
};

void write_text(const std::filesystem::path &path, const std::string &text);
void write_partial_marker(const std::filesystem::path &dir, const std::string &message);
std::string file_sha256(const std::filesystem::path &path);

} // namespace uvchan::io

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

#include "uvchan/io.hpp"

#include "uvchan/scenario.hpp"

#include <charconv>
#include <sstream>

namespace uvchan::io
{

std::string num(double v)
{
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

std::string num(std::size_t v) { return std::to_string(v); }

TableWriter::TableWriter(const std::filesystem::path &path,
                         const std::vector<std::pair<std::string, std::string>> &header,
                         const std::vector<std::string> &columns)
    : path_(path), out_(path, std::ios::binary | std::ios::trunc), columns_(columns.size())
{
    if (!out_)
        throw IoError("cannot open '" + path.string() + "' for writing");
    for (const auto &[k, v] : header)
        out_ << "# " << k << ": " << v << '\n';
    for (std::size_t c = 0; c < columns.size(); ++c)
        out_ << (c ? "\t" : "") << columns[c];
    out_ << '\n';
}

TableWriter::~TableWriter()
{
    if (!closed_)
        out_.close();
}

void TableWriter::row(const std::vector<std::string> &cells)
{
    if (cells.size() != columns_)
        throw IoError(path_.string() + ": row has " + std::to_string(cells.size()) + " cells, expected " +
                      std::to_string(columns_));
    for (std::size_t c = 0; c < cells.size(); ++c)
        out_ << (c ? "\t" : "") << cells[c];
    out_ << '\n';
}

void TableWriter::close()
{
    out_.flush();
    const bool ok = static_cast<bool>(out_);
    out_.close();
    closed_ = true;
    if (!ok || out_.fail())
        throw IoError("write failed for '" + path_.string() + "'");
}

void write_text(const std::filesystem::path &path, const std::string &text)
{
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    out << text;
    out.flush();
    if (!out)
        throw IoError("write failed for '" + path.string() + "'");
}

void write_partial_marker(const std::filesystem::path &dir, const std::string &message)
{
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    std::ofstream out(dir / "PARTIAL", std::ios::trunc);
    out << "incomplete output: " << message << '\n';
}

std::string file_sha256(const std::filesystem::path &path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw IoError("cannot read '" + path.string() + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return sha256_hex(ss.str());
}

} // namespace uvchan::io

// SPDX-License-Identifier: Apache-2.0
//
// bira-twin: digital twin and measurement simulator for a bistatic
// spherical positioning facility
// Copyright (C) 2026 bira-twin contributors
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

#include "bira/io.hpp"
#include "bira/common.hpp"

#include <zlib.h>

#include <array>
#include <charconv>
#include <fstream>
#include <iterator>
#include <stdexcept>

namespace bira
{
    std::vector<std::uint8_t> read_binary_file(const std::filesystem::path &path)
    {
        std::ifstream in(path, std::ios::binary);
        if (!in)
            throw Error("io", "cannot open " + path.string());
        return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
    }

    void write_binary_file(const std::filesystem::path &path, const std::vector<std::uint8_t> &bytes)
    {
        std::ofstream out(path, std::ios::binary | std::ios::trunc);
        if (!out)
            throw Error("io", "cannot write " + path.string());
        out.write(reinterpret_cast<const char *>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
        if (!out)
            throw Error("io", "write failed for " + path.string());
    }

    std::string read_text_file(const std::filesystem::path &path)
    {
        std::ifstream in(path, std::ios::binary);
        if (!in)
            throw Error("io", "cannot open " + path.string());
        return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
    }

    void write_text_file(const std::filesystem::path &path, const std::string &text)
    {
        std::ofstream out(path, std::ios::binary | std::ios::trunc);
        if (!out)
            throw Error("io", "cannot write " + path.string());
        out << text;
        if (!out)
            throw Error("io", "write failed for " + path.string());
    }

    std::uint32_t crc32_of(const std::uint8_t *data, std::size_t size)
    {
        uLong crc = crc32(0L, Z_NULL, 0);
        while (size > 0)
        {
            const auto chunk = static_cast<uInt>(std::min<std::size_t>(size, 1u << 30));
            crc = crc32(crc, data, chunk);
            data += chunk;
            size -= chunk;
        }
        return static_cast<std::uint32_t>(crc);
    }

    std::string format_double(double v)
    {
        std::array<char, 64> buf{};
        const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), v);
        return std::string(buf.data(), res.ptr);
    }

    double parse_double(std::string_view token)
    {
        if (token.size() > 1 && token.front() == '+' && token[1] != '-')
            token.remove_prefix(1);
        double v = 0.0;
        const auto res = std::from_chars(token.data(), token.data() + token.size(), v);
        if (token.empty() || res.ec != std::errc() || res.ptr != token.data() + token.size())
            throw std::invalid_argument("not a number: '" + std::string(token) + "'");
        if (!std::isfinite(v))
            throw std::invalid_argument("not a finite number: '" + std::string(token) + "'");
        return v;
    }
}

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

#ifndef BIRA_IO_HPP
#define BIRA_IO_HPP

#include <cstdint>
#include <cstring>
#include <filesystem>
#include <string_view>
#include <string>
#include <vector>

namespace bira
{
    std::vector<std::uint8_t> read_binary_file(const std::filesystem::path &path);
    void write_binary_file(const std::filesystem::path &path, const std::vector<std::uint8_t> &bytes);
    std::string read_text_file(const std::filesystem::path &path);
    void write_text_file(const std::filesystem::path &path, const std::string &text);

    // IEEE 802.3 CRC-32 (zlib polynomial).
    std::uint32_t crc32_of(const std::uint8_t *data, std::size_t size);

    // Shortest decimal text that parses back to the same double.
    std::string format_double(double v);

    // Strict whole-token parse, throws std::invalid_argument.
    double parse_double(std::string_view token);

    // Little-endian field encoding for the binary formats.
    inline void put_le(std::vector<std::uint8_t> &out, std::uint64_t v, int bytes)
    {
        for (int i = 0; i < bytes; ++i)
            out.push_back(static_cast<std::uint8_t>((v >> (8 * i)) & 0xFF));
    }
    inline void put_u16(std::vector<std::uint8_t> &out, std::uint16_t v) { put_le(out, v, 2); }
    inline void put_u32(std::vector<std::uint8_t> &out, std::uint32_t v) { put_le(out, v, 4); }
    inline void put_u64(std::vector<std::uint8_t> &out, std::uint64_t v) { put_le(out, v, 8); }
    inline void put_f64(std::vector<std::uint8_t> &out, double v)
    {
        std::uint64_t bits = 0;
        std::memcpy(&bits, &v, sizeof bits);
        put_le(out, bits, 8);
    }

    inline std::uint64_t get_le(const std::uint8_t *p, int n)
    {
        std::uint64_t v = 0;
        for (int i = 0; i < n; ++i)
            v |= static_cast<std::uint64_t>(p[i]) << (8 * i);
        return v;
    }
    inline double get_f64(const std::uint8_t *p)
    {
        const std::uint64_t bits = get_le(p, 8);
        double v = 0.0;
        std::memcpy(&v, &bits, sizeof v);
        return v;
    }
}

#endif

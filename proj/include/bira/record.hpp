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

#ifndef BIRA_RECORD_HPP
#define BIRA_RECORD_HPP

#include "bira/common.hpp"
#include "bira/geometry.hpp"

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace bira
{
    // Uniform frequency grid f_k = start + k * step, k < count.
    struct FrequencyGrid
    {
        double start = 2e9;
        double step = 10e6;
        std::size_t count = 1601;

        double at(std::size_t k) const { return start + static_cast<double>(k) * step; }
        double stop() const { return at(count - 1); }
        double bandwidth() const { return stop() - start; }
        std::vector<double> values() const;

        // Grid from start/stop/step; the step must divide the span.
        static FrequencyGrid from_range(double f_start, double f_stop, double f_step);
        bool operator==(const FrequencyGrid &) const = default;
    };

    enum class Window
    {
        Rect,
        Hann
    };

    std::string_view window_name(Window w);
    Window window_from_name(std::string_view name);

    // Symmetric window over n points (Hann with zero end points).
    std::vector<double> make_window(Window w, std::size_t n);

    // Complex S21 over a frequency grid plus the measurement tag.
    struct TransferRecord
    {
        FrequencyGrid grid;
        std::vector<cdouble> s21;
        BistaticConstellation constellation;
        double time = 0.0; // acquisition time, s
        std::string label;

        std::size_t size() const { return s21.size(); }
        void validate() const;
    };

    // Throws ConfigError unless both records share the grid and the tag.
    void require_compatible(const TransferRecord &a, const TransferRecord &b, bool check_tag = true);

    // Columnar text: '#' header lines, then "frequency_Hz re im" per line.
    std::string record_to_text(const TransferRecord &r);
    TransferRecord record_from_text(std::string_view text);

    // Binary twin: "BIRAS21R", u16 version, u64 count, 8 f64 constellation,
    // f64 time, f64 start and step, then re, im per point; CRC-32 trailer.
    // All fields little-endian. The label is not stored.
    std::vector<std::uint8_t> record_to_binary(const TransferRecord &r);
    TransferRecord record_from_binary(const std::vector<std::uint8_t> &bytes);

    void save_record(const std::filesystem::path &path, const TransferRecord &r);
    TransferRecord load_record(const std::filesystem::path &path);
}

#endif

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

#include "bira/record.hpp"
#include "bira/io.hpp"

#include <array>
#include <sstream>

namespace bira
{
    std::vector<double> FrequencyGrid::values() const
    {
        std::vector<double> v(count);
        for (std::size_t k = 0; k < count; ++k)
            v[k] = at(k);
        return v;
    }

    FrequencyGrid FrequencyGrid::from_range(double f_start, double f_stop, double f_step)
    {
        if (!std::isfinite(f_start) || !std::isfinite(f_stop) || !std::isfinite(f_step))
            throw ConfigError("frequency grid values must be finite");
        if (!(f_start > 0.0))
            throw ConfigError("f_start must be positive");
        if (!(f_stop > f_start))
            throw ConfigError("f_stop must exceed f_start");
        if (!(f_step > 0.0))
            throw ConfigError("f_step must be positive");
        const double n = (f_stop - f_start) / f_step;
        const double rounded = std::round(n);
        if (std::abs(n - rounded) > 1e-6)
            throw ConfigError("f_step " + format_double(f_step) + " does not divide the span " +
                              format_double(f_stop - f_start));
        return {f_start, f_step, static_cast<std::size_t>(rounded) + 1};
    }

    std::string_view window_name(Window w)
    {
        return w == Window::Rect ? "rect" : "hann";
    }

    Window window_from_name(std::string_view name)
    {
        if (name == "rect")
            return Window::Rect;
        if (name == "hann")
            return Window::Hann;
        throw ConfigError("unknown window '" + std::string(name) + "'");
    }

    std::vector<double> make_window(Window w, std::size_t n)
    {
        std::vector<double> v(n, 1.0);
        if (w == Window::Hann && n > 1)
            for (std::size_t i = 0; i < n; ++i)
                v[i] = 0.5 - 0.5 * std::cos(2.0 * kPi * static_cast<double>(i) / static_cast<double>(n - 1));
        return v;
    }

    void TransferRecord::validate() const
    {
        if (s21.size() != grid.count)
            throw FormatError("record length " + std::to_string(s21.size()) + " differs from grid length " +
                              std::to_string(grid.count));
        if (!(grid.step > 0.0) || !(grid.start > 0.0) || grid.count == 0)
            throw FormatError("record grid must be non-empty with positive start and step");
        for (const auto &v : s21)
            if (!std::isfinite(v.real()) || !std::isfinite(v.imag()))
                throw FormatError("record contains non-finite values");
    }

    void require_compatible(const TransferRecord &a, const TransferRecord &b, bool check_tag)
    {
        const bool same_grid = a.grid.count == b.grid.count &&
                               std::abs(a.grid.start - b.grid.start) <= 1e-9 * a.grid.start &&
                               std::abs(a.grid.step - b.grid.step) <= 1e-9 * a.grid.step;
        if (!same_grid || a.s21.size() != b.s21.size())
            throw ConfigError("records are on different frequency grids");
        if (check_tag && !(a.constellation == b.constellation))
            throw ConfigError("records carry different constellation tags");
    }

    namespace
    {
        constexpr const char *kTextMagic = "# bira-record v1";
        constexpr char kBinMagic[8] = {'B', 'I', 'R', 'A', 'S', '2', '1', 'R'};
        constexpr std::uint16_t kBinVersion = 1;

        std::array<double, 8> tag_values(const BistaticConstellation &c)
        {
            return {c.phi_ill, c.theta_ill, c.phi_obs, c.theta_obs, c.pol_ill, c.pol_obs, c.r_ill, c.r_obs};
        }

        BistaticConstellation tag_from(const std::array<double, 8> &v)
        {
            return {v[0], v[1], v[2], v[3], v[4], v[5], v[6], v[7]};
        }

        FrequencyGrid grid_from_points(const std::vector<double> &f)
        {
            if (f.empty())
                throw FormatError("record has no frequency points");
            if (f.size() == 1)
                return {f[0], 1.0, 1};
            const double step = (f.back() - f.front()) / static_cast<double>(f.size() - 1);
            if (!(step > 0.0))
                throw FormatError("record frequencies must ascend");
            for (std::size_t k = 0; k < f.size(); ++k)
                if (std::abs(f[k] - (f[0] + static_cast<double>(k) * step)) > 1e-6 * step)
                    throw FormatError("record frequencies are not uniformly spaced at point " + std::to_string(k));
            return {f[0], step, f.size()};
        }
    }

    std::string record_to_text(const TransferRecord &r)
    {
        r.validate();
        std::ostringstream os;
        os << kTextMagic << "\n";
        if (!r.label.empty())
            os << "# label " << r.label << "\n";
        os << "# time " << format_double(r.time) << "\n";
        os << "# constellation";
        for (double v : tag_values(r.constellation))
            os << ' ' << format_double(v);
        os << "\n# columns: frequency_Hz re im\n";
        for (std::size_t k = 0; k < r.size(); ++k)
            os << format_double(r.grid.at(k)) << ' ' << format_double(r.s21[k].real()) << ' '
               << format_double(r.s21[k].imag()) << "\n";
        return os.str();
    }

    TransferRecord record_from_text(std::string_view text)
    {
        TransferRecord r;
        std::vector<double> freqs;
        std::istringstream in{std::string(text)};
        std::string line;
        int line_no = 0;
        bool seen_magic = false;
        while (std::getline(in, line))
        {
            ++line_no;
            if (!line.empty() && line.back() == '\r')
                line.pop_back();
            if (line.empty())
                continue;
            if (line[0] == '#')
            {
                if (line == kTextMagic)
                    seen_magic = true;
                else if (line.rfind("# label ", 0) == 0)
                    r.label = line.substr(8);
                else if (line.rfind("# time ", 0) == 0)
                {
                    try
                    {
                        r.time = parse_double(line.substr(7));
                    }
                    catch (const std::invalid_argument &)
                    {
                        throw ParseError(line_no, 8, "invalid time");
                    }
                }
                else if (line.rfind("# constellation", 0) == 0)
                {
                    std::istringstream fields(line.substr(15));
                    std::array<double, 8> v{};
                    std::string tok;
                    for (std::size_t i = 0; i < 8; ++i)
                    {
                        if (!(fields >> tok))
                            throw ParseError(line_no, 1, "constellation needs 8 values");
                        try
                        {
                            v[i] = parse_double(tok);
                        }
                        catch (const std::invalid_argument &)
                        {
                            throw ParseError(line_no, 1, "invalid constellation value '" + tok + "'");
                        }
                    }
                    r.constellation = tag_from(v);
                }
                continue;
            }
            if (!seen_magic)
                throw ParseError(line_no, 1, "missing '# bira-record v1' header");
            std::array<double, 3> v{};
            std::size_t pos = 0;
            for (int i = 0; i < 3; ++i)
            {
                while (pos < line.size() && (line[pos] == ' ' || line[pos] == '\t'))
                    ++pos;
                const std::size_t start = pos;
                while (pos < line.size() && line[pos] != ' ' && line[pos] != '\t')
                    ++pos;
                if (start == pos)
                    throw ParseError(line_no, static_cast<int>(start) + 1, "expected 3 columns");
                try
                {
                    v[i] = parse_double(std::string_view(line).substr(start, pos - start));
                }
                catch (const std::invalid_argument &)
                {
                    throw ParseError(line_no, static_cast<int>(start) + 1, "invalid number");
                }
            }
            while (pos < line.size() && (line[pos] == ' ' || line[pos] == '\t'))
                ++pos;
            if (pos != line.size())
                throw ParseError(line_no, static_cast<int>(pos) + 1, "unexpected trailing field");
            freqs.push_back(v[0]);
            r.s21.emplace_back(v[1], v[2]);
        }
        if (!seen_magic)
            throw FormatError("missing '# bira-record v1' header");
        r.grid = grid_from_points(freqs);
        r.validate();
        return r;
    }

    std::vector<std::uint8_t> record_to_binary(const TransferRecord &r)
    {
        r.validate();
        std::vector<std::uint8_t> out;
        for (char c : kBinMagic)
            out.push_back(static_cast<std::uint8_t>(c));
        put_u16(out, kBinVersion);
        put_u64(out, r.size());
        for (double v : tag_values(r.constellation))
            put_f64(out, v);
        put_f64(out, r.time);
        put_f64(out, r.grid.start);
        put_f64(out, r.grid.step);
        for (std::size_t k = 0; k < r.size(); ++k)
        {
            put_f64(out, r.s21[k].real());
            put_f64(out, r.s21[k].imag());
        }
        put_u32(out, crc32_of(out.data(), out.size()));
        return out;
    }

    TransferRecord record_from_binary(const std::vector<std::uint8_t> &bytes)
    {
        constexpr std::size_t header = 8 + 2 + 8 + 8 * 8 + 8 + 16;
        if (bytes.size() < header + 4)
            throw FormatError("record file truncated");
        if (std::memcmp(bytes.data(), kBinMagic, 8) != 0)
            throw FormatError("not a bira record file");
        const auto version = static_cast<std::uint16_t>(get_le(bytes.data() + 8, 2));
        if (version != kBinVersion)
            throw FormatError("unsupported record version " + std::to_string(version));
        const std::uint64_t count = get_le(bytes.data() + 10, 8);
        if (count > (bytes.size() - header - 4) / 16 || header + 16 * count + 4 != bytes.size())
            throw FormatError("record size does not match its point count");
        const std::size_t body = bytes.size() - 4;
        if (static_cast<std::uint32_t>(get_le(bytes.data() + body, 4)) != crc32_of(bytes.data(), body))
            throw FormatError("record checksum mismatch");
        TransferRecord r;
        std::array<double, 8> tag{};
        const std::uint8_t *p = bytes.data() + 18;
        for (auto &v : tag)
        {
            v = get_f64(p);
            p += 8;
        }
        r.constellation = tag_from(tag);
        r.time = get_f64(p);
        r.grid.start = get_f64(p + 8);
        r.grid.step = get_f64(p + 16);
        r.grid.count = static_cast<std::size_t>(count);
        p += 24;
        r.s21.resize(r.grid.count);
        for (auto &v : r.s21)
        {
            v = {get_f64(p), get_f64(p + 8)};
            p += 16;
        }
        r.validate();
        return r;
    }

    void save_record(const std::filesystem::path &path, const TransferRecord &r)
    {
        if (path.extension() == ".bin")
            write_binary_file(path, record_to_binary(r));
        else
            write_text_file(path, record_to_text(r));
    }

    TransferRecord load_record(const std::filesystem::path &path)
    {
        if (path.extension() == ".bin")
            return record_from_binary(read_binary_file(path));
        return record_from_text(read_text_file(path));
    }
}

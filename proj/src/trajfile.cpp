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

#include "bira/trajfile.hpp"
#include "bira/io.hpp"

#include <sstream>

namespace bira
{
    namespace
    {
        constexpr std::array<std::string_view, kMotionParamCount> kParamNames = {"v_max", "a_max", "d_max", "j_max"};

        struct Token
        {
            std::string_view text;
            int column; // 1-based
        };

        std::vector<Token> split_fields(std::string_view line)
        {
            std::vector<Token> out;
            std::size_t i = 0;
            while (i < line.size())
            {
                while (i < line.size() && (line[i] == ' ' || line[i] == '\t'))
                    ++i;
                if (i >= line.size())
                    break;
                const std::size_t start = i;
                while (i < line.size() && line[i] != ' ' && line[i] != '\t')
                    ++i;
                out.push_back({line.substr(start, i - start), static_cast<int>(start) + 1});
            }
            return out;
        }

        std::string interval_text(const Interval &iv)
        {
            return "[" + format_double(iv.min) + ", " + format_double(iv.max) + "]";
        }

        double parse_number(const Token &tok, int line)
        {
            try
            {
                return parse_double(tok.text);
            }
            catch (const std::invalid_argument &)
            {
                throw ParseError(line, tok.column, "non-numeric field '" + std::string(tok.text) + "'");
            }
        }

        void parse_directive(std::string_view body, int line, int column_offset, MotionOverrides &params)
        {
            const auto fields = split_fields(body);
            if (fields.size() != 2)
                throw ParseError(line, column_offset, "directive must be '!key value'");
            const Token &key = fields[0];
            const int key_col = key.column + column_offset;
            const auto dot = key.text.find('.');
            if (dot == std::string_view::npos)
                throw ParseError(line, key_col, "unknown directive '" + std::string(key.text) + "'");
            const std::string_view pname = key.text.substr(0, dot), aname = key.text.substr(dot + 1);
            std::optional<MotionParam> param;
            for (std::size_t i = 0; i < kMotionParamCount; ++i)
                if (kParamNames[i] == pname)
                    param = static_cast<MotionParam>(i);
            const auto axis = axis_from_name(aname);
            if (!param || !axis)
                throw ParseError(line, key_col, "unknown directive '" + std::string(key.text) + "'");
            if (params.get(*axis, *param))
                throw ParseError(line, key_col, "duplicate directive '" + std::string(key.text) + "'");
            const Token val{fields[1].text, fields[1].column + column_offset};
            const double v = parse_number(val, line);
            if (!(v > 0.0))
                throw ParseError(line, val.column, "directive value must be positive");
            params.set(*axis, *param, v);
        }
    }

    std::string_view motion_param_name(MotionParam p)
    {
        return kParamNames[static_cast<std::size_t>(p)];
    }

    bool MotionOverrides::empty() const
    {
        for (const auto &axis : values)
            for (const auto &v : axis)
                if (v)
                    return false;
        return true;
    }

    Trajectory parse_trajectory(std::string_view text, const AxisLimits &limits)
    {
        Trajectory traj;
        int line_no = 0;
        std::size_t pos = 0;
        while (pos <= text.size())
        {
            const std::size_t nl = text.find('\n', pos);
            std::string_view line = text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
            ++line_no;
            if (!line.empty() && line.back() == '\r')
                line.remove_suffix(1);

            std::size_t first = 0;
            while (first < line.size() && (line[first] == ' ' || line[first] == '\t'))
                ++first;

            if (first < line.size() && line[first] != '#')
            {
                if (line[first] == '!')
                    parse_directive(line.substr(first + 1), line_no, static_cast<int>(first) + 1, traj.params);
                else
                {
                    const auto fields = split_fields(line);
                    if (fields.size() != kAxisCount)
                    {
                        const int col = fields.size() > kAxisCount ? fields[kAxisCount].column : static_cast<int>(line.size()) + 1;
                        throw ParseError(line_no, col,
                                         "expected " + std::to_string(kAxisCount) + " columns, found " +
                                             std::to_string(fields.size()));
                    }
                    MachineState s;
                    for (Axis a : kAllAxes)
                    {
                        const Token &tok = fields[index(a)];
                        const double v = parse_number(tok, line_no);
                        const Interval &iv = limits[index(a)];
                        if (!iv.contains(v))
                            throw ParseError(line_no, tok.column,
                                             std::string(axis_name(a)) + " = " + std::string(tok.text) +
                                                 " outside " + interval_text(iv),
                                             std::string(axis_name(a)));
                        s[a] = v;
                    }
                    traj.waypoints.push_back(s);
                    traj.source_lines.push_back(line_no);
                }
            }
            if (nl == std::string_view::npos)
                break;
            pos = nl + 1;
        }
        return traj;
    }

    std::string serialize_trajectory(const Trajectory &traj)
    {
        std::ostringstream os;
        os << "# bira trajectory\n";
        os << "# columns:";
        for (Axis a : kAllAxes)
            os << ' ' << axis_name(a);
        os << '\n';
        for (Axis a : kAllAxes)
            for (std::size_t p = 0; p < kMotionParamCount; ++p)
                if (const auto v = traj.params.get(a, static_cast<MotionParam>(p)))
                    os << '!' << kParamNames[p] << '.' << axis_name(a) << ' ' << format_double(*v) << '\n';
        for (const MachineState &s : traj.waypoints)
        {
            for (Axis a : kAllAxes)
            {
                if (a != Axis::MovingAz)
                    os << ' ';
                os << format_double(s[a]);
            }
            os << '\n';
        }
        return os.str();
    }
}

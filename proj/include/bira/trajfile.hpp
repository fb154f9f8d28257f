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

#ifndef BIRA_TRAJFILE_HPP
#define BIRA_TRAJFILE_HPP

#include "bira/geometry.hpp"

#include <optional>
#include <string>
#include <vector>

namespace bira
{
    enum class MotionParam : std::size_t
    {
        VMax = 0,
        AMax,
        DMax,
        JMax
    };

    inline constexpr std::size_t kMotionParamCount = 4;

    std::string_view motion_param_name(MotionParam p);

    // File-level motion selections, one optional value per axis and parameter.
    struct MotionOverrides
    {
        std::array<std::array<std::optional<double>, kMotionParamCount>, kAxisCount> values{};

        std::optional<double> get(Axis axis, MotionParam p) const
        {
            return values[index(axis)][static_cast<std::size_t>(p)];
        }
        void set(Axis axis, MotionParam p, double v) { values[index(axis)][static_cast<std::size_t>(p)] = v; }
        bool empty() const;
        bool operator==(const MotionOverrides &) const = default;
    };

    struct Trajectory
    {
        std::vector<MachineState> waypoints;
        MotionOverrides params;
        std::vector<int> source_lines; // 1-based line of each waypoint, empty when built in code

        // Waypoints and parameters; the line map is diagnostic only.
        bool operator==(const Trajectory &other) const
        {
            return waypoints == other.waypoints && params == other.params;
        }
    };

    // Grammar (one record per line, LF or CRLF):
    //   blank line | '#' comment | '!' key value | 8 numeric columns
    // Columns: moving_az moving_coel static_coel turntable pol_tx pol_rx radial_tx radial_rx.
    // Directive keys are <param>.<axis> with param in v_max, a_max, d_max, j_max.
    Trajectory parse_trajectory(std::string_view text, const AxisLimits &limits = default_axis_limits());

    std::string serialize_trajectory(const Trajectory &traj);
}

#endif

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

#ifndef BIRA_MOTION_HPP
#define BIRA_MOTION_HPP

#include "bira/collision.hpp"
#include "bira/geometry.hpp"
#include "bira/trajfile.hpp"

#include <nlohmann/json.hpp>

#include <optional>
#include <string>
#include <vector>

namespace bira
{
    struct AxisMotionLimits
    {
        double v_max = 1.0;
        double a_max = 1.0; // acceleration
        double d_max = 1.0; // deceleration
        double j_max = 1.0;

        double get(MotionParam p) const;
        void set(MotionParam p, double v);
        bool operator==(const AxisMotionLimits &) const = default;
    };

    // Units per axis: deg or m, per s, s^2, s^3. The defaults are placeholders,
    // not published motor data.
    struct MotionLimits
    {
        std::array<AxisMotionLimits, kAxisCount> axes = defaults();

        AxisMotionLimits &operator[](Axis a) { return axes[index(a)]; }
        const AxisMotionLimits &operator[](Axis a) const { return axes[index(a)]; }

        static std::array<AxisMotionLimits, kAxisCount> defaults();
        void validate() const;
        bool operator==(const MotionLimits &) const = default;
    };

    struct JerkSegment
    {
        double t0 = 0.0; // start time within the profile
        double duration = 0.0;
        double jerk = 0.0;
        double p0 = 0.0; // state at t0
        double v0 = 0.0;
        double a0 = 0.0;
    };

    struct AxisKinematics
    {
        double position = 0.0;
        double velocity = 0.0;
        double acceleration = 0.0;
        double jerk = 0.0;
    };

    // Rest-to-rest constant-jerk profile of one axis.
    struct AxisProfile
    {
        double start = 0.0;
        double target = 0.0;
        double peak_velocity = 0.0; // magnitude reached during the move
        std::vector<JerkSegment> segments;

        double duration() const { return segments.empty() ? 0.0 : segments.back().t0 + segments.back().duration; }
        AxisKinematics at(double t) const;
    };

    AxisProfile plan_axis_profile(double from, double to, const AxisMotionLimits &limits);

    // Closed-form duration of a rest-to-rest move over |distance|.
    double axis_move_duration(double distance, const AxisMotionLimits &limits);

    struct MotionProfile
    {
        MachineState from;
        MachineState to;
        std::array<AxisProfile, kAxisCount> axes;
        double duration = 0.0;

        MachineState state_at(double t) const;
    };

    MotionProfile plan_profile(const MachineState &from, const MachineState &to, const MotionLimits &limits);

    struct ProfileSample
    {
        double t = 0.0;
        MachineState state;
        std::array<double, kAxisCount> velocity{};
        std::array<double, kAxisCount> acceleration{};
    };

    // Samples at multiples of dt below the duration plus the end time, and
    // optionally every segment boundary of every axis. The last sample is the
    // target state exactly.
    std::vector<ProfileSample> sample_profile(const MotionProfile &profile, double dt,
                                              bool include_boundaries = false);

    // Machine limits with the file-level selections applied. Selections above
    // the machine value are returned in `excess` and left at the machine value.
    struct EffectiveLimits
    {
        MotionLimits limits;
        std::vector<std::string> excess;
    };
    EffectiveLimits apply_overrides(const MotionLimits &machine, const MotionOverrides &overrides);

    enum class VerifyMode
    {
        Stepped,
        Continuous
    };

    std::string_view verify_mode_name(VerifyMode m);
    std::optional<VerifyMode> verify_mode_from_name(std::string_view name);

    struct Violation
    {
        std::size_t waypoint_index = 0; // target waypoint of the offending leg
        double time = 0.0;              // trajectory time in s, overheads included
        std::string kind;               // "collision" or "limit"
        std::string detail;
        MachineState state;
    };

    struct VerificationReport
    {
        bool accepted = true;
        std::optional<Violation> first_violation;
        VerifyMode mode = VerifyMode::Stepped;
        std::size_t waypoint_count = 0;
        double motion_duration_s = 0.0;
        double per_step_overhead_s = 0.1;
        double total_duration_s = 0.0;
        std::size_t samples_checked = 0;
        std::array<double, kAxisCount> detour_metric{}; // planned / net travel, inf for closed loops
    };

    struct VerifyOptions
    {
        double sample_dt = 1e-3;
        double per_step_overhead_s = 0.1;
    };

    VerificationReport verify_trajectory(const Trajectory &traj, const MotionLimits &limits,
                                         const CollisionTable &table, VerifyMode mode, const FacilityConfig &cfg,
                                         const VerifyOptions &options = {});

    nlohmann::json report_to_json(const VerificationReport &report);
}

#endif

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

#include "bira/motion.hpp"
#include "bira/config.hpp"
#include "bira/io.hpp"

#include <algorithm>

namespace bira
{
    namespace
    {
        struct Phase
        {
            double duration;
            double jerk;
        };

        // Time to change velocity by v from rest acceleration to rest acceleration.
        double ramp_time(double v, double a, double j)
        {
            if (v <= 0.0)
                return 0.0;
            return v >= a * a / j ? v / a + a / j : 2.0 * std::sqrt(v / j);
        }

        void append_ramp(std::vector<Phase> &out, double v, double a, double j, double sign)
        {
            if (v <= 0.0)
                return;
            if (v >= a * a / j)
            {
                out.push_back({a / j, sign * j});
                out.push_back({v / a - a / j, 0.0});
                out.push_back({a / j, -sign * j});
            }
            else
            {
                const double t = std::sqrt(v / j);
                out.push_back({t, sign * j});
                out.push_back({t, -sign * j});
            }
        }

        // Distance covered by accelerating to v and decelerating back to rest.
        double ramps_distance(double v, const AxisMotionLimits &lim)
        {
            return 0.5 * v * (ramp_time(v, lim.a_max, lim.j_max) + ramp_time(v, lim.d_max, lim.j_max));
        }

        double peak_velocity(double distance, const AxisMotionLimits &lim)
        {
            if (ramps_distance(lim.v_max, lim) <= distance)
                return lim.v_max;
            double lo = 0.0, hi = lim.v_max;
            for (int i = 0; i < 200 && hi - lo > 1e-15 * lim.v_max; ++i)
            {
                const double mid = 0.5 * (lo + hi);
                (ramps_distance(mid, lim) <= distance ? lo : hi) = mid;
            }
            return lo;
        }

        AxisKinematics evaluate(const JerkSegment &s, double t)
        {
            const double dt = t - s.t0;
            AxisKinematics k;
            k.jerk = s.jerk;
            k.acceleration = s.a0 + s.jerk * dt;
            k.velocity = s.v0 + s.a0 * dt + 0.5 * s.jerk * dt * dt;
            k.position = s.p0 + s.v0 * dt + 0.5 * s.a0 * dt * dt + s.jerk * dt * dt * dt / 6.0;
            return k;
        }

        std::string axis_param_text(Axis a, MotionParam p)
        {
            return std::string(motion_param_name(p)) + "." + std::string(axis_name(a));
        }
    }

    double AxisMotionLimits::get(MotionParam p) const
    {
        switch (p)
        {
        case MotionParam::VMax:
            return v_max;
        case MotionParam::AMax:
            return a_max;
        case MotionParam::DMax:
            return d_max;
        case MotionParam::JMax:
            return j_max;
        }
        return 0.0;
    }

    void AxisMotionLimits::set(MotionParam p, double v)
    {
        switch (p)
        {
        case MotionParam::VMax:
            v_max = v;
            break;
        case MotionParam::AMax:
            a_max = v;
            break;
        case MotionParam::DMax:
            d_max = v;
            break;
        case MotionParam::JMax:
            j_max = v;
            break;
        }
    }

    std::array<AxisMotionLimits, kAxisCount> MotionLimits::defaults()
    {
        std::array<AxisMotionLimits, kAxisCount> d{};
        d[index(Axis::MovingAz)] = {5.0, 5.0, 5.0, 20.0};
        d[index(Axis::MovingCoel)] = {10.0, 10.0, 10.0, 40.0};
        d[index(Axis::StaticCoel)] = {10.0, 10.0, 10.0, 40.0};
        d[index(Axis::Turntable)] = {3.0, 2.0, 2.0, 10.0};
        d[index(Axis::PolTx)] = {30.0, 60.0, 60.0, 300.0};
        d[index(Axis::PolRx)] = {30.0, 60.0, 60.0, 300.0};
        d[index(Axis::RadialTx)] = {0.02, 0.05, 0.05, 0.5};
        d[index(Axis::RadialRx)] = {0.02, 0.05, 0.05, 0.5};
        return d;
    }

    void MotionLimits::validate() const
    {
        for (Axis a : kAllAxes)
            for (std::size_t p = 0; p < kMotionParamCount; ++p)
            {
                const double v = (*this)[a].get(static_cast<MotionParam>(p));
                if (!std::isfinite(v) || !(v > 0.0))
                    throw ConfigError(axis_param_text(a, static_cast<MotionParam>(p)) + " must be positive");
            }
    }

    AxisKinematics AxisProfile::at(double t) const
    {
        if (segments.empty() || t <= 0.0)
            return {segments.empty() ? target : start, 0.0, 0.0, 0.0};
        if (t >= duration())
            return {target, 0.0, 0.0, 0.0};
        auto it = std::upper_bound(segments.begin(), segments.end(), t,
                                   [](double x, const JerkSegment &s) { return x < s.t0; });
        return evaluate(*std::prev(it), t);
    }

    double axis_move_duration(double distance, const AxisMotionLimits &lim)
    {
        distance = std::abs(distance);
        if (distance == 0.0)
            return 0.0;
        const double v = peak_velocity(distance, lim);
        const double cruise = std::max(0.0, distance - ramps_distance(v, lim)) / v;
        return ramp_time(v, lim.a_max, lim.j_max) + cruise + ramp_time(v, lim.d_max, lim.j_max);
    }

    AxisProfile plan_axis_profile(double from, double to, const AxisMotionLimits &lim)
    {
        AxisProfile prof;
        prof.start = from;
        prof.target = to;
        const double distance = std::abs(to - from);
        if (distance == 0.0)
            return prof;
        const double sign = to > from ? 1.0 : -1.0;
        const double v = peak_velocity(distance, lim);
        prof.peak_velocity = v;

        std::vector<Phase> phases;
        append_ramp(phases, v, lim.a_max, lim.j_max, sign);
        const double cruise = std::max(0.0, distance - ramps_distance(v, lim)) / v;
        phases.push_back({cruise, 0.0});
        append_ramp(phases, v, lim.d_max, lim.j_max, -sign);

        JerkSegment cur{0.0, 0.0, 0.0, from, 0.0, 0.0};
        for (const Phase &ph : phases)
        {
            if (!(ph.duration > 0.0))
                continue;
            cur.duration = ph.duration;
            cur.jerk = ph.jerk;
            prof.segments.push_back(cur);
            const AxisKinematics end = evaluate(cur, cur.t0 + cur.duration);
            cur.t0 += ph.duration;
            cur.p0 = end.position;
            cur.v0 = end.velocity;
            cur.a0 = end.acceleration;
        }
        return prof;
    }

    MachineState MotionProfile::state_at(double t) const
    {
        MachineState s;
        for (Axis a : kAllAxes)
            s[a] = axes[index(a)].at(t).position;
        return s;
    }

    MotionProfile plan_profile(const MachineState &from, const MachineState &to, const MotionLimits &limits)
    {
        MotionProfile p;
        p.from = from;
        p.to = to;
        for (Axis a : kAllAxes)
        {
            p.axes[index(a)] = plan_axis_profile(from[a], to[a], limits[a]);
            p.duration = std::max(p.duration, p.axes[index(a)].duration());
        }
        return p;
    }

    std::vector<ProfileSample> sample_profile(const MotionProfile &profile, double dt, bool include_boundaries)
    {
        if (!(dt > 0.0))
            throw ConfigError("sample interval must be positive");
        const double T = profile.duration;
        std::vector<double> times;
        for (std::size_t k = 0;; ++k)
        {
            const double t = static_cast<double>(k) * dt;
            if (t >= T && k > 0)
                break;
            times.push_back(std::min(t, T));
            if (T == 0.0)
                break;
        }
        if (include_boundaries)
            for (const AxisProfile &ax : profile.axes)
                for (const JerkSegment &s : ax.segments)
                {
                    times.push_back(s.t0);
                    times.push_back(s.t0 + s.duration);
                }
        if (T > 0.0)
            times.push_back(T);
        std::sort(times.begin(), times.end());
        times.erase(std::unique(times.begin(), times.end(), [](double a, double b) { return b - a < 1e-12; }),
                    times.end());
        if (T > 0.0)
            times.back() = T;

        std::vector<ProfileSample> out;
        out.reserve(times.size());
        for (double t : times)
        {
            ProfileSample s;
            s.t = t;
            for (Axis a : kAllAxes)
            {
                const AxisKinematics k = profile.axes[index(a)].at(t);
                s.state[a] = k.position;
                s.velocity[index(a)] = k.velocity;
                s.acceleration[index(a)] = k.acceleration;
            }
            out.push_back(s);
        }
        out.back().state = profile.to;
        return out;
    }

    EffectiveLimits apply_overrides(const MotionLimits &machine, const MotionOverrides &overrides)
    {
        EffectiveLimits out{machine, {}};
        for (Axis a : kAllAxes)
            for (std::size_t i = 0; i < kMotionParamCount; ++i)
            {
                const auto p = static_cast<MotionParam>(i);
                const auto v = overrides.get(a, p);
                if (!v)
                    continue;
                if (*v > machine[a].get(p))
                    out.excess.push_back(axis_param_text(a, p) + " = " + format_double(*v) +
                                         " exceeds machine limit " + format_double(machine[a].get(p)));
                else
                    out.limits[a].set(p, *v);
            }
        return out;
    }

    std::string_view verify_mode_name(VerifyMode m)
    {
        return m == VerifyMode::Stepped ? "stepped" : "continuous";
    }

    std::optional<VerifyMode> verify_mode_from_name(std::string_view name)
    {
        if (name == "stepped")
            return VerifyMode::Stepped;
        if (name == "continuous")
            return VerifyMode::Continuous;
        return std::nullopt;
    }

    VerificationReport verify_trajectory(const Trajectory &traj, const MotionLimits &limits,
                                         const CollisionTable &table, VerifyMode mode, const FacilityConfig &cfg,
                                         const VerifyOptions &options)
    {
        limits.validate();
        VerificationReport rep;
        rep.mode = mode;
        rep.waypoint_count = traj.waypoints.size();
        rep.per_step_overhead_s = mode == VerifyMode::Stepped ? options.per_step_overhead_s : 0.0;

        auto fail = [&](std::size_t wp, double t, const char *kind, std::string detail, const MachineState &s) {
            if (!rep.first_violation)
                rep.first_violation = Violation{wp, t, kind, std::move(detail), s};
        };

        // Returns false and records a violation if the state is unsafe.
        auto check_state = [&](const MachineState &s, std::size_t wp, double t) {
            try
            {
                check_limits(s, cfg.axis_limits);
                ++rep.samples_checked;
                if (table.query(s))
                {
                    fail(wp, t, "collision", "collision table reports contact", s);
                    return false;
                }
            }
            catch (const RangeError &e)
            {
                fail(wp, t, "limit", e.what(), s);
                return false;
            }
            return true;
        };

        const EffectiveLimits eff = apply_overrides(limits, traj.params);
        if (!eff.excess.empty())
            fail(0, 0.0, "limit", eff.excess.front(),
                 traj.waypoints.empty() ? MachineState{} : traj.waypoints.front());

        double clock = 0.0, motion = 0.0;
        bool checking = !rep.first_violation.has_value();
        for (std::size_t i = 0; i < traj.waypoints.size(); ++i)
        {
            if (i == 0)
            {
                if (checking)
                    checking = check_state(traj.waypoints[0], 0, 0.0);
            }
            else
            {
                const MotionProfile prof = plan_profile(traj.waypoints[i - 1], traj.waypoints[i], eff.limits);
                if (checking)
                    for (const ProfileSample &s : sample_profile(prof, options.sample_dt, true))
                        if (!(checking = check_state(s.state, i, clock + s.t)))
                            break;
                clock += prof.duration;
                motion += prof.duration;
            }
            clock += rep.per_step_overhead_s;
        }

        std::array<double, kAxisCount> travel{};
        for (std::size_t i = 1; i < traj.waypoints.size(); ++i)
            for (Axis a : kAllAxes)
                travel[index(a)] += std::abs(traj.waypoints[i][a] - traj.waypoints[i - 1][a]);
        for (Axis a : kAllAxes)
        {
            const double net =
                traj.waypoints.empty() ? 0.0 : std::abs(traj.waypoints.back()[a] - traj.waypoints.front()[a]);
            const double tr = travel[index(a)];
            rep.detour_metric[index(a)] = tr == 0.0 ? 1.0 : (net == 0.0 ? std::numeric_limits<double>::infinity()
                                                                         : tr / net);
        }

        rep.motion_duration_s = motion;
        rep.total_duration_s = clock;
        rep.accepted = !rep.first_violation.has_value();
        return rep;
    }

    nlohmann::json report_to_json(const VerificationReport &r)
    {
        nlohmann::json detour = nlohmann::json::object();
        for (Axis a : kAllAxes)
        {
            const double d = r.detour_metric[index(a)];
            detour[std::string(axis_name(a))] = std::isfinite(d) ? nlohmann::json(d) : nlohmann::json("inf");
        }
        nlohmann::json v = nullptr;
        if (r.first_violation)
            v = {{"waypoint_index", r.first_violation->waypoint_index},
                 {"time_s", r.first_violation->time},
                 {"kind", r.first_violation->kind},
                 {"detail", r.first_violation->detail},
                 {"state", r.first_violation->state}};
        return {{"accepted", r.accepted},
                {"mode", verify_mode_name(r.mode)},
                {"waypoint_count", r.waypoint_count},
                {"motion_duration_s", r.motion_duration_s},
                {"per_step_overhead_s", r.per_step_overhead_s},
                {"total_duration_s", r.total_duration_s},
                {"samples_checked", r.samples_checked},
                {"first_violation", v},
                {"detour_metric", detour}};
    }
}

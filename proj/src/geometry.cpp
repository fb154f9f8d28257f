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

#include "bira/geometry.hpp"

#include <algorithm>
#include <sstream>
#include <vector>

namespace bira
{
    namespace
    {
        constexpr std::array<std::string_view, kAxisCount> kAxisNames = {
            "moving_az", "moving_coel", "static_coel", "turntable",
            "pol_tx", "pol_rx", "radial_tx", "radial_rx"};

        constexpr std::array<double MachineState::*, kAxisCount> kAxisMembers = {
            &MachineState::moving_az, &MachineState::moving_coel, &MachineState::static_coel,
            &MachineState::turntable, &MachineState::pol_tx, &MachineState::pol_rx,
            &MachineState::radial_tx, &MachineState::radial_rx};

        std::string format_interval(const Interval &iv)
        {
            std::ostringstream os;
            os << "[" << iv.min << ", " << iv.max << "]";
            return os.str();
        }

        MachineState apply_offsets(const MachineState &state, const FacilityConfig &cfg)
        {
            MachineState eff = state;
            for (Axis a : kAllAxes)
                eff[a] += cfg.axis_offsets[index(a)];
            return eff;
        }

        // Probe pose of one gantry. The boom plane contains the zenith and the
        // horizontal direction at plane_az; the mechanical frame rotates rigidly
        // with the boom about the plane normal.
        ProbePose gantry_pose(double plane_az, double coel, double pol, double radial)
        {
            const double pa = deg2rad(plane_az);
            const double c = deg2rad(coel);
            const double p = deg2rad(pol);

            const Vec3 z = Vec3::UnitZ();
            const Vec3 t0(std::cos(pa), std::sin(pa), 0.0);
            const Vec3 w(-std::sin(pa), std::cos(pa), 0.0);

            const Vec3 u = std::cos(c) * z + std::sin(c) * t0;
            const Vec3 t = -std::sin(c) * z + std::cos(c) * t0;

            ProbePose pose;
            pose.position = radial * u;
            pose.boresight = -u;
            pose.pol_co = std::cos(p) * t + std::sin(p) * w;
            pose.pol_cross = pose.boresight.cross(pose.pol_co);
            return pose;
        }

        constexpr double kLimitTolerance = 1e-9;

        // Accepts values within rounding distance of a limit and clamps them onto it.
        std::optional<double> fit_interval(double v, const Interval &iv)
        {
            if (v < iv.min - kLimitTolerance || v > iv.max + kLimitTolerance)
                return std::nullopt;
            return std::clamp(v, iv.min, iv.max);
        }

        // Representative of x + 360k inside iv closest to ref, if any.
        std::optional<double> periodic_representative(double x, const Interval &iv, double ref)
        {
            if (!iv.bounded())
            {
                const double k = std::round((ref - x) / 360.0);
                return x + 360.0 * k;
            }
            std::optional<double> best;
            const double base = x - 360.0 * std::floor((x - iv.min + kLimitTolerance) / 360.0);
            for (int k = -1; k <= 1; ++k)
            {
                const auto v = fit_interval(base + 360.0 * k, iv);
                if (!v)
                    continue;
                if (!best || std::abs(*v - ref) < std::abs(*best - ref))
                    best = v;
            }
            return best;
        }

        struct Candidate
        {
            MachineState state;
            double cost = 0.0;
            double non_turntable = 0.0;
        };
    }

    std::string_view axis_name(Axis axis)
    {
        return kAxisNames[index(axis)];
    }

    std::optional<Axis> axis_from_name(std::string_view name)
    {
        for (Axis a : kAllAxes)
            if (kAxisNames[index(a)] == name)
                return a;
        return std::nullopt;
    }

    double &MachineState::operator[](Axis axis)
    {
        return this->*kAxisMembers[index(axis)];
    }

    double MachineState::operator[](Axis axis) const
    {
        return this->*kAxisMembers[index(axis)];
    }

    std::array<double, kAxisCount> MachineState::to_array() const
    {
        std::array<double, kAxisCount> out{};
        for (Axis a : kAllAxes)
            out[index(a)] = (*this)[a];
        return out;
    }

    MachineState MachineState::from_array(const std::array<double, kAxisCount> &values)
    {
        MachineState s;
        for (Axis a : kAllAxes)
            s[a] = values[index(a)];
        return s;
    }

    AxisLimits default_axis_limits()
    {
        AxisLimits lim;
        lim[index(Axis::MovingAz)] = {-118.0, 66.0};
        lim[index(Axis::MovingCoel)] = {-114.0, 114.0};
        lim[index(Axis::StaticCoel)] = {-115.0, 115.0};
        lim[index(Axis::Turntable)] = {};
        lim[index(Axis::PolTx)] = {-10.0, 188.0};
        lim[index(Axis::PolRx)] = {-10.0, 188.0};
        lim[index(Axis::RadialTx)] = {3.38, 3.50};
        lim[index(Axis::RadialRx)] = {3.38, 3.50};
        return lim;
    }

    void FacilityConfig::validate() const
    {
        if (!(focal_height > 0.0))
            throw ConfigError("focal_height must be positive");
        if (!(probe_aperture_radius > 0.0) || !(boom_radius_nominal > probe_aperture_radius))
            throw ConfigError("boom_radius_nominal must exceed probe_aperture_radius > 0");
        if (!(radial_travel >= 0.0))
            throw ConfigError("radial_travel must be non-negative");
        if (!(turntable_diameter > 0.0))
            throw ConfigError("turntable_diameter must be positive");
        for (Axis a : kAllAxes)
        {
            const Interval &iv = axis_limits[index(a)];
            if (std::isnan(iv.min) || std::isnan(iv.max) || !(iv.min <= iv.max))
                throw ConfigError("empty limit interval for axis " + std::string(axis_name(a)));
            if (!std::isfinite(axis_offsets[index(a)]))
                throw ConfigError("non-finite offset for axis " + std::string(axis_name(a)));
        }
        if (std::abs(static_branch) != 1 || std::abs(moving_branch) != 1)
            throw ConfigError("boom branch must be +1 or -1");
    }

    void check_limits(const MachineState &state, const AxisLimits &limits)
    {
        for (Axis a : kAllAxes)
        {
            const double v = state[a];
            const Interval &iv = limits[index(a)];
            if (!std::isfinite(v) || !iv.contains(v))
            {
                std::ostringstream os;
                os << axis_name(a) << " = " << v << " outside " << format_interval(iv);
                throw RangeError(std::string(axis_name(a)), os.str());
            }
        }
    }

    Vec3 direction(double theta_deg, double phi_deg)
    {
        const double t = deg2rad(theta_deg), p = deg2rad(phi_deg);
        return {std::sin(t) * std::cos(p), std::sin(t) * std::sin(p), std::cos(t)};
    }

    Vec3 theta_hat(double theta_deg, double phi_deg)
    {
        const double t = deg2rad(theta_deg), p = deg2rad(phi_deg);
        return {std::cos(t) * std::cos(p), std::cos(t) * std::sin(p), -std::sin(t)};
    }

    Vec3 phi_hat(double /*theta_deg*/, double phi_deg)
    {
        const double p = deg2rad(phi_deg);
        return {-std::sin(p), std::cos(p), 0.0};
    }

    ProbePair forward_kinematics(const MachineState &state, const FacilityConfig &cfg)
    {
        check_limits(state, cfg.axis_limits);
        const MachineState eff = apply_offsets(state, cfg);
        ProbePair out;
        out.tx = gantry_pose(cfg.moving_plane_azimuth(eff.moving_az), eff.moving_coel, eff.pol_tx, eff.radial_tx);
        out.rx = gantry_pose(FacilityConfig::static_plane_azimuth(), eff.static_coel, eff.pol_rx, eff.radial_rx);
        return out;
    }

    BistaticConstellation machine_to_bistatic(const MachineState &state, const FacilityConfig &cfg)
    {
        check_limits(state, cfg.axis_limits);
        const MachineState eff = apply_offsets(state, cfg);

        BistaticConstellation c;
        {
            const bool below = eff.moving_coel < 0.0;
            const double hall_az = cfg.moving_plane_azimuth(eff.moving_az) + (below ? 180.0 : 0.0);
            c.theta_ill = std::abs(eff.moving_coel);
            c.phi_ill = wrap360(hall_az - eff.turntable);
            c.pol_ill = wrap360(eff.pol_tx + (below ? 180.0 : 0.0));
            c.r_ill = eff.radial_tx;
        }
        {
            const bool below = eff.static_coel < 0.0;
            const double hall_az = FacilityConfig::static_plane_azimuth() + (below ? 180.0 : 0.0);
            c.theta_obs = std::abs(eff.static_coel);
            c.phi_obs = wrap360(hall_az - eff.turntable);
            c.pol_obs = wrap360(eff.pol_rx + (below ? 180.0 : 0.0));
            c.r_obs = eff.radial_rx;
        }
        return c;
    }

    MachineState bistatic_to_machine(const BistaticConstellation &target, const MappingPolicy &policy,
                                     const FacilityConfig &cfg)
    {
        const auto &lim = cfg.axis_limits;
        const auto &off = cfg.axis_offsets;
        const MachineState &cur = policy.current;

        auto reach_bound = [](const Interval &iv, double offset) {
            return std::max(std::abs(iv.min + offset), std::abs(iv.max + offset));
        };
        const double theta_ill_max = reach_bound(lim[index(Axis::MovingCoel)], off[index(Axis::MovingCoel)]);
        const double theta_obs_max = reach_bound(lim[index(Axis::StaticCoel)], off[index(Axis::StaticCoel)]);

        auto fail = [](const char *bound, double value, const std::string &why) {
            std::ostringstream os;
            os << bound << " = " << value << " " << why;
            throw ReachabilityError(bound, os.str());
        };
        if (!(target.theta_ill >= 0.0) || target.theta_ill > theta_ill_max)
            fail("theta_ill", target.theta_ill, "outside reachable [0, " + std::to_string(theta_ill_max) + "]");
        if (!(target.theta_obs >= 0.0) || target.theta_obs > theta_obs_max)
            fail("theta_obs", target.theta_obs, "outside reachable [0, " + std::to_string(theta_obs_max) + "]");

        const auto radial_tx_fit = fit_interval(target.r_ill - off[index(Axis::RadialTx)], lim[index(Axis::RadialTx)]);
        const auto radial_rx_fit = fit_interval(target.r_obs - off[index(Axis::RadialRx)], lim[index(Axis::RadialRx)]);
        if (!radial_tx_fit)
            fail("r_ill", target.r_ill, "outside radial travel");
        if (!radial_rx_fit)
            fail("r_obs", target.r_obs, "outside radial travel");
        const double radial_tx = *radial_tx_fit;
        const double radial_rx = *radial_rx_fit;

        std::vector<Candidate> candidates;
        std::string last_reason = "phi_ill";

        const int obs_signs = target.theta_obs > 0.0 ? 2 : 1;
        const int ill_signs = target.theta_ill > 0.0 ? 2 : 1;
        for (int so = 0; so < obs_signs; ++so)
        {
            const bool obs_below = so == 1;
            for (int si = 0; si < ill_signs; ++si)
            {
                const bool ill_below = si == 1;
                MachineState s;
                s.radial_tx = radial_tx;
                s.radial_rx = radial_rx;

                const auto sc = fit_interval((obs_below ? -target.theta_obs : target.theta_obs) - off[index(Axis::StaticCoel)],
                                             lim[index(Axis::StaticCoel)]);
                const auto mc = fit_interval((ill_below ? -target.theta_ill : target.theta_ill) - off[index(Axis::MovingCoel)],
                                             lim[index(Axis::MovingCoel)]);
                if (!sc)
                {
                    last_reason = "theta_obs";
                    continue;
                }
                if (!mc)
                {
                    last_reason = "theta_ill";
                    continue;
                }
                s.static_coel = *sc;
                s.moving_coel = *mc;

                const double rx_hall = FacilityConfig::static_plane_azimuth() + (obs_below ? 180.0 : 0.0);
                const double tt_eff = rx_hall - target.phi_obs;
                s.turntable = *periodic_representative(tt_eff - off[index(Axis::Turntable)],
                                                       lim[index(Axis::Turntable)], cur.turntable);
                const double tt_eff_chosen = s.turntable + off[index(Axis::Turntable)];

                const double tx_hall = target.phi_ill + tt_eff_chosen;
                const double plane_az = tx_hall - (ill_below ? 180.0 : 0.0);
                const double az_eff = plane_az - cfg.moving_rail_offset - cfg.moving_branch * 90.0;
                const auto az = periodic_representative(az_eff - off[index(Axis::MovingAz)],
                                                        lim[index(Axis::MovingAz)], cur.moving_az);
                if (!az)
                {
                    last_reason = "phi_ill";
                    continue;
                }
                s.moving_az = *az;

                const auto ptx = periodic_representative(target.pol_ill - (ill_below ? 180.0 : 0.0) - off[index(Axis::PolTx)],
                                                         lim[index(Axis::PolTx)], cur.pol_tx);
                if (!ptx)
                {
                    last_reason = "pol_ill";
                    continue;
                }
                const auto prx = periodic_representative(target.pol_obs - (obs_below ? 180.0 : 0.0) - off[index(Axis::PolRx)],
                                                         lim[index(Axis::PolRx)], cur.pol_rx);
                if (!prx)
                {
                    last_reason = "pol_obs";
                    continue;
                }
                s.pol_tx = *ptx;
                s.pol_rx = *prx;

                // Values indistinguishable from the current position are not moved.
                for (Axis a : kAllAxes)
                    if (std::abs(s[a] - cur[a]) <= 1e-9)
                        s[a] = cur[a];

                Candidate c{s, 0.0, 0.0};
                for (Axis a : kAllAxes)
                {
                    const double d = policy.weights[index(a)] * std::abs(s[a] - cur[a]);
                    c.cost += d;
                    if (a != Axis::Turntable)
                        c.non_turntable += d;
                }
                candidates.push_back(c);
            }
        }

        if (candidates.empty())
        {
            const double value = last_reason == "pol_ill"   ? target.pol_ill
                                 : last_reason == "pol_obs" ? target.pol_obs
                                 : last_reason == "theta_ill" ? target.theta_ill
                                 : last_reason == "theta_obs" ? target.theta_obs
                                                              : target.phi_ill;
            fail(last_reason.c_str(), value, "not reachable by any machine configuration");
        }

        const Candidate *best = &candidates.front();
        for (const Candidate &c : candidates)
        {
            constexpr double tie = 1e-9;
            if (c.cost < best->cost - tie ||
                (std::abs(c.cost - best->cost) <= tie && c.non_turntable < best->non_turntable - tie))
                best = &c;
        }
        return best->state;
    }

    Vec3 illuminator_position(const BistaticConstellation &c)
    {
        return c.r_ill * direction(c.theta_ill, c.phi_ill);
    }

    Vec3 observer_position(const BistaticConstellation &c)
    {
        return c.r_obs * direction(c.theta_obs, c.phi_obs);
    }

    double bistatic_angle(const BistaticConstellation &c)
    {
        const Vec3 a = direction(c.theta_ill, c.phi_ill);
        const Vec3 b = direction(c.theta_obs, c.phi_obs);
        return rad2deg(std::atan2(a.cross(b).norm(), a.dot(b)));
    }
}

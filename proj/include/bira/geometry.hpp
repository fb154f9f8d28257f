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

#ifndef BIRA_GEOMETRY_HPP
#define BIRA_GEOMETRY_HPP

#include "bira/common.hpp"

#include <Eigen/Dense>
#include <array>
#include <limits>
#include <optional>
#include <string_view>

// Coordinate conventions
// ----------------------
// Hall frame: origin at the focal point, z up, x along the azimuth of the
// static gantry's probe plane (the static probe sits at +x for positive
// co-elevation). Azimuths are counter-clockwise seen from above.
// DUT frame: hall frame rotated with the turntable, so a turntable angle of
// +a maps hall azimuth p to DUT azimuth p - a.
// Co-elevation is measured down from the zenith. A negative machine
// co-elevation places the probe on the opposite side of its boom plane.
// All public angles are degrees, all lengths meters.

namespace bira
{
    using Vec3 = Eigen::Vector3d;
    using Mat3 = Eigen::Matrix3d;

    enum class Axis : std::size_t
    {
        MovingAz = 0,
        MovingCoel,
        StaticCoel,
        Turntable,
        PolTx,
        PolRx,
        RadialTx,
        RadialRx
    };

    inline constexpr std::size_t kAxisCount = 8;
    inline constexpr std::array<Axis, kAxisCount> kAllAxes = {
        Axis::MovingAz, Axis::MovingCoel, Axis::StaticCoel, Axis::Turntable,
        Axis::PolTx, Axis::PolRx, Axis::RadialTx, Axis::RadialRx};

    std::string_view axis_name(Axis axis);
    std::optional<Axis> axis_from_name(std::string_view name);
    inline std::size_t index(Axis axis) { return static_cast<std::size_t>(axis); }

    struct MachineState
    {
        double moving_az = 0.0;   // deg, rail position of the moving pedestal
        double moving_coel = 0.0; // deg
        double static_coel = 0.0; // deg
        double turntable = 0.0;   // deg, unrestricted
        double pol_tx = 0.0;      // deg, roll positioner on the moving gantry
        double pol_rx = 0.0;      // deg, roll positioner on the static gantry
        double radial_tx = 3.44;  // m
        double radial_rx = 3.44;  // m

        double &operator[](Axis axis);
        double operator[](Axis axis) const;

        std::array<double, kAxisCount> to_array() const;
        static MachineState from_array(const std::array<double, kAxisCount> &values);

        bool operator==(const MachineState &) const = default;
    };

    struct Interval
    {
        double min = -std::numeric_limits<double>::infinity();
        double max = std::numeric_limits<double>::infinity();

        bool contains(double x) const { return x >= min && x <= max; }
        bool bounded() const { return std::isfinite(min) && std::isfinite(max); }
        double span() const { return max - min; }
    };

    using AxisLimits = std::array<Interval, kAxisCount>;

    AxisLimits default_axis_limits();

    struct FacilityConfig
    {
        double focal_height = 2.27;         // focal point above the hall floor
        double boom_radius_nominal = 3.44;  // nominal radial axis position
        double radial_travel = 0.06;        // +- around the nominal radius
        double probe_aperture_radius = 3.0; // distance of a mounted probe aperture
        double turntable_diameter = 6.5;
        AxisLimits axis_limits = default_axis_limits();
        std::array<double, kAxisCount> axis_offsets{}; // additive per-axis correction

        // Boom branch per gantry: probe plane azimuth = pedestal azimuth + branch * 90.
        int static_branch = -1;
        int moving_branch = -1;
        // Hall azimuth of the moving pedestal at moving_az = 0.
        double moving_rail_offset = -20.0;

        void validate() const;

        double static_pedestal_azimuth() const { return -static_branch * 90.0; }
        double moving_pedestal_azimuth(double moving_az) const { return moving_az + moving_rail_offset; }
        double moving_plane_azimuth(double moving_az) const
        {
            return moving_pedestal_azimuth(moving_az) + moving_branch * 90.0;
        }
        static constexpr double static_plane_azimuth() { return 0.0; }
    };

    // Throws RangeError naming the first axis outside its limits.
    void check_limits(const MachineState &state, const AxisLimits &limits);

    struct ProbePose
    {
        Vec3 position;  // hall frame
        Vec3 boresight; // unit, toward the focal point
        Vec3 pol_co;    // unit, electric field direction of the probe at roll 0 rotated by roll
        Vec3 pol_cross; // boresight x pol_co
    };

    struct ProbePair
    {
        ProbePose tx; // moving gantry
        ProbePose rx; // static gantry
    };

    struct BistaticConstellation
    {
        double phi_ill = 0.0;   // DUT-frame azimuth of the illuminating probe, [0, 360)
        double theta_ill = 0.0; // co-elevation, [0, 114]
        double phi_obs = 0.0;
        double theta_obs = 0.0; // [0, 115]
        double pol_ill = 0.0;   // effective polarization, 0 = theta-polarized, [0, 360)
        double pol_obs = 0.0;
        double r_ill = 3.44;
        double r_obs = 3.44;

        bool operator==(const BistaticConstellation &) const = default;
    };

    // Unit vector for a co-elevation/azimuth pair.
    Vec3 direction(double theta_deg, double phi_deg);

    // Local spherical basis vectors at (theta, phi).
    Vec3 theta_hat(double theta_deg, double phi_deg);
    Vec3 phi_hat(double theta_deg, double phi_deg);

    ProbePair forward_kinematics(const MachineState &state, const FacilityConfig &cfg);

    BistaticConstellation machine_to_bistatic(const MachineState &state, const FacilityConfig &cfg);

    struct MappingPolicy
    {
        MachineState current; // state the travel is measured from
        std::array<double, kAxisCount> weights{1.0, 1.0, 1.0, 1.0, 1.0, 1.0, 1.0, 1.0};
    };

    MachineState bistatic_to_machine(const BistaticConstellation &target, const MappingPolicy &policy,
                                     const FacilityConfig &cfg);

    // Probe positions in the DUT frame for a constellation.
    Vec3 illuminator_position(const BistaticConstellation &c);
    Vec3 observer_position(const BistaticConstellation &c);

    // Bistatic angle at the focal point between the two probe directions, deg.
    double bistatic_angle(const BistaticConstellation &c);
}

#endif

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

#ifndef BIRA_COLLISION_HPP
#define BIRA_COLLISION_HPP

#include "bira/geometry.hpp"

#include <array>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace bira
{
    // Box with center, half extents along its three local axes and an
    // orthonormal orientation (columns are the local axes in hall frame).
    struct OrientedBox
    {
        Vec3 center = Vec3::Zero();
        Vec3 half = Vec3::Zero();
        Mat3 axes = Mat3::Identity();

        double bounding_radius() const { return half.norm(); }
        std::array<Vec3, 8> corners() const;
    };

    // Separating-axis test for two oriented boxes (touching counts as overlap).
    bool boxes_overlap(const OrientedBox &a, const OrientedBox &b);

    // Parametric link dimensions of one gantry. The boom is a quarter arc from
    // the hub (on the pedestal, in the focal plane) to the probe tip.
    struct GantryLinks
    {
        double boom_arc_radius = 3.75;   // arc centerline distance from the focal point
        double boom_width = 0.30;        // along the boom rotation axis
        double boom_thickness = 0.20;    // along the arc radius
        int boom_segments = 5;           // boxes approximating the arc (3..8)
        double positioner_size = 0.28;   // square section of radial + roll positioner
        double probe_length = 0.44;      // flange to aperture
        double probe_diameter = 0.20;    // enclosing cylinder of the mounted probe
        double pedestal_size = 0.50;     // square footprint of the pedestal
        double pedestal_top = 0.15;      // pedestal height above the focal plane
    };

    struct BoundingBoxModel
    {
        double clearance = 0.10; // added to every half extent
        GantryLinks moving;
        GantryLinks static_gantry;

        void validate() const;
    };

    // Inflated boxes of each gantry. Only moving_az, moving_coel and static_coel
    // enter; the radial axes are taken at their nominal value.
    std::vector<OrientedBox> moving_gantry_boxes(double moving_az, double moving_coel,
                                                 const BoundingBoxModel &model, const FacilityConfig &cfg);
    std::vector<OrientedBox> static_gantry_boxes(double static_coel, const BoundingBoxModel &model,
                                                 const FacilityConfig &cfg);

    bool boxes_collide(const std::vector<OrientedBox> &a, const std::vector<OrientedBox> &b);

    bool check_collision(const MachineState &state, const BoundingBoxModel &model, const FacilityConfig &cfg);

    struct AxisGrid
    {
        double min = 0.0;
        double max = 0.0;
        double step = 1.0;

        // floor(span / step) + 1 nodes starting at min.
        std::size_t size() const;
        double value(std::size_t i) const { return min + static_cast<double>(i) * step; }
        void validate(const std::string &name) const;
        bool operator==(const AxisGrid &) const = default;
    };

    struct TableGrids
    {
        AxisGrid moving_az{-118.0, 66.0, 1.0};
        AxisGrid moving_coel{-114.0, 114.0, 1.0};
        AxisGrid static_coel{-115.0, 115.0, 1.0};

        static TableGrids from_limits(const FacilityConfig &cfg, double step);
        std::size_t cell_count() const { return moving_az.size() * moving_coel.size() * static_coel.size(); }
        bool operator==(const TableGrids &) const = default;
    };

    using GeometryHash = std::array<std::uint8_t, 32>;

    // SHA-256 over the canonical JSON form of model and facility configuration.
    GeometryHash geometry_hash(const BoundingBoxModel &model, const FacilityConfig &cfg);
    std::string to_hex(const GeometryHash &hash);

    struct SliceMask
    {
        double moving_az = 0.0;
        AxisGrid static_coel; // columns
        AxisGrid moving_coel; // rows
        std::vector<std::uint8_t> cells; // row-major, 1 = colliding

        bool at(std::size_t i_mc, std::size_t i_sc) const { return cells[i_mc * static_coel.size() + i_sc] != 0; }
    };

    // Dense bit table over (moving_az, moving_coel, static_coel), az outermost,
    // static_coel innermost, bits little-endian within each byte.
    class CollisionTable
    {
    public:
        static constexpr std::uint16_t kVersion = 1;

        CollisionTable() = default;
        CollisionTable(TableGrids grids, GeometryHash hash);

        const TableGrids &grids() const { return grids_; }
        const GeometryHash &hash() const { return hash_; }
        std::uint16_t version() const { return version_; }
        std::size_t cell_count() const { return grids_.cell_count(); }
        const std::vector<std::uint8_t> &payload() const { return bits_; }

        std::size_t linear_index(std::size_t i_az, std::size_t i_mc, std::size_t i_sc) const;
        bool cell(std::size_t i_az, std::size_t i_mc, std::size_t i_sc) const;
        void set_cell(std::size_t i_az, std::size_t i_mc, std::size_t i_sc, bool colliding);
        std::size_t colliding_count() const;

        // Conservative lookup: colliding if any surrounding grid node collides.
        // Throws RangeError outside the grid.
        bool query(const MachineState &state) const;
        bool query(double moving_az, double moving_coel, double static_coel) const;

        SliceMask slice(double moving_az) const;

        void save(const std::filesystem::path &path) const;
        std::vector<std::uint8_t> serialize() const;
        static CollisionTable load(const std::filesystem::path &path);
        static CollisionTable deserialize(const std::vector<std::uint8_t> &bytes);

        bool operator==(const CollisionTable &) const = default;

    private:
        TableGrids grids_;
        GeometryHash hash_{};
        std::uint16_t version_ = kVersion;
        std::vector<std::uint8_t> bits_;
    };

    // Every cell is check_collision at its grid node. Work is split over
    // azimuth slices; the result is independent of thread_count.
    CollisionTable generate_table(const BoundingBoxModel &model, const FacilityConfig &cfg, const TableGrids &grids,
                                  unsigned thread_count = 0);
}

#endif

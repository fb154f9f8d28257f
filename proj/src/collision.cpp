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

#include "bira/collision.hpp"
#include "bira/config.hpp"
#include "bira/io.hpp"

#include <openssl/evp.h>

#include <atomic>
#include <cstring>
#include <numeric>
#include <sstream>
#include <thread>

namespace bira
{
    namespace
    {
        struct GantryFrame
        {
            Vec3 hub_dir; // horizontal, toward the pedestal
            Vec3 tip_dir; // from the focal point toward the probe
        };

        GantryFrame gantry_frame(double plane_az, double pedestal_az, double coel)
        {
            const double pa = deg2rad(plane_az), ped = deg2rad(pedestal_az), c = deg2rad(coel);
            const Vec3 z = Vec3::UnitZ();
            const Vec3 t0(std::cos(pa), std::sin(pa), 0.0);
            GantryFrame f;
            f.hub_dir = Vec3(std::cos(ped), std::sin(ped), 0.0);
            f.tip_dir = std::cos(c) * z + std::sin(c) * t0;
            return f;
        }

        OrientedBox make_box(const Vec3 &center, const Vec3 &e0, const Vec3 &e1, const Vec3 &e2,
                             double h0, double h1, double h2, double clearance)
        {
            OrientedBox b;
            b.center = center;
            b.axes.col(0) = e0;
            b.axes.col(1) = e1;
            b.axes.col(2) = e2;
            b.half = Vec3(h0 + clearance, h1 + clearance, h2 + clearance);
            return b;
        }

        std::vector<OrientedBox> gantry_boxes(const GantryFrame &f, const GantryLinks &links, double radial,
                                              double focal_height, double clearance)
        {
            std::vector<OrientedBox> boxes;
            boxes.reserve(static_cast<std::size_t>(links.boom_segments) + 3);

            const double R = links.boom_arc_radius;
            const Vec3 normal = f.hub_dir.cross(f.tip_dir);

            // Pedestal column from the floor to just above the hub.
            {
                const Vec3 side = Vec3::UnitZ().cross(f.hub_dir);
                const double z_lo = -focal_height, z_hi = links.pedestal_top;
                const Vec3 c = R * f.hub_dir + Vec3(0.0, 0.0, 0.5 * (z_lo + z_hi));
                boxes.push_back(make_box(c, f.hub_dir, side, Vec3::UnitZ(), 0.5 * links.pedestal_size,
                                         0.5 * links.pedestal_size, 0.5 * (z_hi - z_lo), clearance));
            }

            // Quarter arc from hub to tip, one box per segment enclosing the tube.
            const int n = links.boom_segments;
            const double delta = 0.5 * kPi / n;
            const double sagitta = R * (1.0 - std::cos(0.5 * delta));
            for (int i = 0; i < n; ++i)
            {
                const double s0 = i * delta, s1 = (i + 1) * delta, sm = 0.5 * (s0 + s1);
                const Vec3 p0 = R * (std::cos(s0) * f.hub_dir + std::sin(s0) * f.tip_dir);
                const Vec3 p1 = R * (std::cos(s1) * f.hub_dir + std::sin(s1) * f.tip_dir);
                const Vec3 m = std::cos(sm) * f.hub_dir + std::sin(sm) * f.tip_dir;
                const Vec3 chord = p1 - p0;
                const double len = chord.norm();
                const Vec3 c = (R - 0.5 * sagitta) * m;
                const double h_chord = 0.5 * len + 0.5 * links.boom_thickness * std::sin(0.5 * delta);
                const double h_radial = 0.5 * sagitta + 0.5 * links.boom_thickness;
                boxes.push_back(make_box(c, chord / len, m, normal, h_chord, h_radial, 0.5 * links.boom_width,
                                         clearance));
            }

            // Radial and roll positioner between the flange and the boom tip.
            {
                const double r_in = radial, r_out = R - 0.5 * links.boom_thickness;
                if (r_out > r_in)
                {
                    const Vec3 c = 0.5 * (r_in + r_out) * f.tip_dir;
                    boxes.push_back(make_box(c, f.tip_dir, f.hub_dir, normal, 0.5 * (r_out - r_in),
                                             0.5 * links.positioner_size, 0.5 * links.positioner_size, clearance));
                }
            }

            // Probe enclosing box, flange toward the focal point.
            {
                const Vec3 c = (radial - 0.5 * links.probe_length) * f.tip_dir;
                boxes.push_back(make_box(c, f.tip_dir, f.hub_dir, normal, 0.5 * links.probe_length,
                                         0.5 * links.probe_diameter, 0.5 * links.probe_diameter, clearance));
            }
            return boxes;
        }

        void validate_links(const GantryLinks &l, const char *name)
        {
            auto pos = [&](double v, const char *field) {
                if (!(v > 0.0))
                    throw ConfigError(std::string(name) + "." + field + " must be positive");
            };
            pos(l.boom_arc_radius, "boom_arc_radius");
            pos(l.boom_width, "boom_width");
            pos(l.boom_thickness, "boom_thickness");
            pos(l.positioner_size, "positioner_size");
            pos(l.probe_length, "probe_length");
            pos(l.probe_diameter, "probe_diameter");
            pos(l.pedestal_size, "pedestal_size");
            if (l.boom_segments < 3 || l.boom_segments > 8)
                throw ConfigError(std::string(name) + ".boom_segments must lie in [3, 8]");
            if (!(l.pedestal_top >= 0.0))
                throw ConfigError(std::string(name) + ".pedestal_top must be non-negative");
        }

        constexpr char kMagic[8] = {'B', 'I', 'R', 'A', 'C', 'O', 'L', 'T'};
        constexpr std::size_t kHeaderSize = 8 + 2 + 3 * 24 + 32;

        // Grid index for a coordinate; one node when on grid, two otherwise.
        std::pair<std::size_t, std::size_t> bracket(double x, const AxisGrid &g, const char *axis)
        {
            const std::size_t n = g.size();
            const double u = (x - g.min) / g.step;
            constexpr double eps = 1e-9;
            if (!std::isfinite(u) || u < -eps || u > static_cast<double>(n - 1) + eps)
            {
                std::ostringstream os;
                os << axis << " = " << x << " outside collision table grid [" << g.min << ", "
                   << g.value(n - 1) << "]";
                throw RangeError(axis, os.str());
            }
            const double r = std::round(u);
            if (std::abs(u - r) <= eps)
            {
                const auto i = static_cast<std::size_t>(std::max(0.0, r));
                return {i, i};
            }
            const auto i0 = static_cast<std::size_t>(std::floor(u));
            return {i0, std::min(i0 + 1, n - 1)};
        }
    }

    std::array<Vec3, 8> OrientedBox::corners() const
    {
        std::array<Vec3, 8> out;
        for (int i = 0; i < 8; ++i)
        {
            const double sx = (i & 1) ? 1.0 : -1.0;
            const double sy = (i & 2) ? 1.0 : -1.0;
            const double sz = (i & 4) ? 1.0 : -1.0;
            out[static_cast<std::size_t>(i)] = center + axes.col(0) * (sx * half.x()) +
                                               axes.col(1) * (sy * half.y()) + axes.col(2) * (sz * half.z());
        }
        return out;
    }

    bool boxes_overlap(const OrientedBox &a, const OrientedBox &b)
    {
        constexpr double eps = 1e-12;
        const Mat3 R = a.axes.transpose() * b.axes;
        const Vec3 t = a.axes.transpose() * (b.center - a.center);
        Mat3 absR;
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j)
                absR(i, j) = std::abs(R(i, j)) + eps;

        const Vec3 &ea = a.half;
        const Vec3 &eb = b.half;

        for (int i = 0; i < 3; ++i)
        {
            const double ra = ea[i];
            const double rb = eb[0] * absR(i, 0) + eb[1] * absR(i, 1) + eb[2] * absR(i, 2);
            if (std::abs(t[i]) > ra + rb)
                return false;
        }
        for (int j = 0; j < 3; ++j)
        {
            const double ra = ea[0] * absR(0, j) + ea[1] * absR(1, j) + ea[2] * absR(2, j);
            const double rb = eb[j];
            if (std::abs(t[0] * R(0, j) + t[1] * R(1, j) + t[2] * R(2, j)) > ra + rb)
                return false;
        }
        for (int i = 0; i < 3; ++i)
        {
            const int i1 = (i + 1) % 3, i2 = (i + 2) % 3;
            for (int j = 0; j < 3; ++j)
            {
                const int j1 = (j + 1) % 3, j2 = (j + 2) % 3;
                const double ra = ea[i1] * absR(i2, j) + ea[i2] * absR(i1, j);
                const double rb = eb[j1] * absR(i, j2) + eb[j2] * absR(i, j1);
                const double d = t[i2] * R(i1, j) - t[i1] * R(i2, j);
                if (std::abs(d) > ra + rb)
                    return false;
            }
        }
        return true;
    }

    void BoundingBoxModel::validate() const
    {
        if (!(clearance >= 0.0))
            throw ConfigError("clearance must be non-negative");
        validate_links(moving, "moving");
        validate_links(static_gantry, "static");
    }

    std::vector<OrientedBox> moving_gantry_boxes(double moving_az, double moving_coel, const BoundingBoxModel &model,
                                                 const FacilityConfig &cfg)
    {
        const double az = moving_az + cfg.axis_offsets[index(Axis::MovingAz)];
        const double coel = moving_coel + cfg.axis_offsets[index(Axis::MovingCoel)];
        const GantryFrame f = gantry_frame(cfg.moving_plane_azimuth(az), cfg.moving_pedestal_azimuth(az), coel);
        return gantry_boxes(f, model.moving, cfg.boom_radius_nominal, cfg.focal_height, model.clearance);
    }

    std::vector<OrientedBox> static_gantry_boxes(double static_coel, const BoundingBoxModel &model,
                                                 const FacilityConfig &cfg)
    {
        const double coel = static_coel + cfg.axis_offsets[index(Axis::StaticCoel)];
        const GantryFrame f = gantry_frame(FacilityConfig::static_plane_azimuth(), cfg.static_pedestal_azimuth(), coel);
        return gantry_boxes(f, model.static_gantry, cfg.boom_radius_nominal, cfg.focal_height, model.clearance);
    }

    bool boxes_collide(const std::vector<OrientedBox> &a, const std::vector<OrientedBox> &b)
    {
        for (const OrientedBox &x : a)
        {
            const double rx = x.bounding_radius();
            for (const OrientedBox &y : b)
            {
                const double reach = rx + y.bounding_radius();
                if ((x.center - y.center).squaredNorm() > reach * reach)
                    continue;
                if (boxes_overlap(x, y))
                    return true;
            }
        }
        return false;
    }

    bool check_collision(const MachineState &state, const BoundingBoxModel &model, const FacilityConfig &cfg)
    {
        return boxes_collide(moving_gantry_boxes(state.moving_az, state.moving_coel, model, cfg),
                             static_gantry_boxes(state.static_coel, model, cfg));
    }

    std::size_t AxisGrid::size() const
    {
        if (!(step > 0.0) || !(max >= min))
            return 0;
        return static_cast<std::size_t>(std::floor((max - min) / step + 1e-9)) + 1;
    }

    void AxisGrid::validate(const std::string &name) const
    {
        if (!std::isfinite(min) || !std::isfinite(max) || !std::isfinite(step) || !(step > 0.0) || !(max >= min))
            throw ConfigError("empty grid for axis " + name);
    }

    TableGrids TableGrids::from_limits(const FacilityConfig &cfg, double step)
    {
        const auto &lim = cfg.axis_limits;
        TableGrids g;
        g.moving_az = {lim[index(Axis::MovingAz)].min, lim[index(Axis::MovingAz)].max, step};
        g.moving_coel = {lim[index(Axis::MovingCoel)].min, lim[index(Axis::MovingCoel)].max, step};
        g.static_coel = {lim[index(Axis::StaticCoel)].min, lim[index(Axis::StaticCoel)].max, step};
        return g;
    }

    GeometryHash geometry_hash(const BoundingBoxModel &model, const FacilityConfig &cfg)
    {
        nlohmann::json j;
        j["facility"] = cfg;
        j["collision_model"] = model;
        const std::string text = j.dump();

        GeometryHash out{};
        unsigned int len = 0;
        if (EVP_Digest(text.data(), text.size(), out.data(), &len, EVP_sha256(), nullptr) != 1 || len != out.size())
            throw Error("internal", "SHA-256 digest failed");
        return out;
    }

    std::string to_hex(const GeometryHash &hash)
    {
        static constexpr char digits[] = "0123456789abcdef";
        std::string s;
        s.reserve(64);
        for (std::uint8_t b : hash)
        {
            s.push_back(digits[b >> 4]);
            s.push_back(digits[b & 0xF]);
        }
        return s;
    }

    CollisionTable::CollisionTable(TableGrids grids, GeometryHash hash)
        : grids_(std::move(grids)), hash_(hash)
    {
        grids_.moving_az.validate("moving_az");
        grids_.moving_coel.validate("moving_coel");
        grids_.static_coel.validate("static_coel");
        bits_.assign((grids_.cell_count() + 7) / 8, 0);
    }

    std::size_t CollisionTable::linear_index(std::size_t i_az, std::size_t i_mc, std::size_t i_sc) const
    {
        return (i_az * grids_.moving_coel.size() + i_mc) * grids_.static_coel.size() + i_sc;
    }

    bool CollisionTable::cell(std::size_t i_az, std::size_t i_mc, std::size_t i_sc) const
    {
        const std::size_t k = linear_index(i_az, i_mc, i_sc);
        return (bits_[k >> 3] >> (k & 7)) & 1u;
    }

    void CollisionTable::set_cell(std::size_t i_az, std::size_t i_mc, std::size_t i_sc, bool colliding)
    {
        const std::size_t k = linear_index(i_az, i_mc, i_sc);
        const auto mask = static_cast<std::uint8_t>(1u << (k & 7));
        if (colliding)
            bits_[k >> 3] |= mask;
        else
            bits_[k >> 3] &= static_cast<std::uint8_t>(~mask);
    }

    std::size_t CollisionTable::colliding_count() const
    {
        std::size_t n = 0;
        for (std::uint8_t b : bits_)
            n += static_cast<std::size_t>(__builtin_popcount(b));
        return n;
    }

    bool CollisionTable::query(const MachineState &state) const
    {
        return query(state.moving_az, state.moving_coel, state.static_coel);
    }

    bool CollisionTable::query(double moving_az, double moving_coel, double static_coel) const
    {
        const auto [a0, a1] = bracket(moving_az, grids_.moving_az, "moving_az");
        const auto [m0, m1] = bracket(moving_coel, grids_.moving_coel, "moving_coel");
        const auto [s0, s1] = bracket(static_coel, grids_.static_coel, "static_coel");
        for (std::size_t a : {a0, a1})
            for (std::size_t m : {m0, m1})
                for (std::size_t s : {s0, s1})
                    if (cell(a, m, s))
                        return true;
        return false;
    }

    SliceMask CollisionTable::slice(double moving_az) const
    {
        const auto [a0, a1] = bracket(moving_az, grids_.moving_az, "moving_az");
        if (a0 != a1)
        {
            std::ostringstream os;
            os << "moving_az = " << moving_az << " is not a grid node (step " << grids_.moving_az.step << ")";
            throw RangeError("moving_az", os.str());
        }
        SliceMask mask;
        mask.moving_az = grids_.moving_az.value(a0);
        mask.static_coel = grids_.static_coel;
        mask.moving_coel = grids_.moving_coel;
        const std::size_t nm = grids_.moving_coel.size(), ns = grids_.static_coel.size();
        mask.cells.resize(nm * ns);
        for (std::size_t m = 0; m < nm; ++m)
            for (std::size_t s = 0; s < ns; ++s)
                mask.cells[m * ns + s] = cell(a0, m, s) ? 1 : 0;
        return mask;
    }

    std::vector<std::uint8_t> CollisionTable::serialize() const
    {
        std::vector<std::uint8_t> out;
        out.reserve(kHeaderSize + bits_.size() + 4);
        for (char c : kMagic)
            out.push_back(static_cast<std::uint8_t>(c));
        put_u16(out, version_);
        for (const AxisGrid *g : {&grids_.moving_az, &grids_.moving_coel, &grids_.static_coel})
        {
            put_f64(out, g->min);
            put_f64(out, g->max);
            put_f64(out, g->step);
        }
        out.insert(out.end(), hash_.begin(), hash_.end());
        out.insert(out.end(), bits_.begin(), bits_.end());
        put_u32(out, crc32_of(out.data(), out.size()));
        return out;
    }

    CollisionTable CollisionTable::deserialize(const std::vector<std::uint8_t> &bytes)
    {
        if (bytes.size() < kHeaderSize + 4)
            throw FormatError("collision table truncated");
        if (!std::equal(std::begin(kMagic), std::end(kMagic), bytes.begin()))
            throw FormatError("bad collision table magic");
        const auto stored_crc = static_cast<std::uint32_t>(get_le(bytes.data() + bytes.size() - 4, 4));
        if (stored_crc != crc32_of(bytes.data(), bytes.size() - 4))
            throw FormatError("collision table checksum mismatch");

        const auto version = static_cast<std::uint16_t>(get_le(bytes.data() + 8, 2));
        if (version != kVersion)
            throw FormatError("unsupported collision table version " + std::to_string(version));

        TableGrids grids;
        const std::uint8_t *p = bytes.data() + 10;
        for (AxisGrid *g : {&grids.moving_az, &grids.moving_coel, &grids.static_coel})
        {
            g->min = get_f64(p);
            g->max = get_f64(p + 8);
            g->step = get_f64(p + 16);
            p += 24;
        }
        GeometryHash hash{};
        std::copy(p, p + 32, hash.begin());

        CollisionTable t;
        try
        {
            t = CollisionTable(grids, hash);
        }
        catch (const ConfigError &e)
        {
            throw FormatError(std::string("collision table grid invalid: ") + e.what());
        }
        const std::size_t payload = bytes.size() - 4 - kHeaderSize;
        if (payload != t.bits_.size())
            throw FormatError("collision table payload size does not match its grids");
        std::copy(bytes.begin() + static_cast<std::ptrdiff_t>(kHeaderSize),
                  bytes.begin() + static_cast<std::ptrdiff_t>(kHeaderSize + payload), t.bits_.begin());
        t.version_ = version;
        return t;
    }

    void CollisionTable::save(const std::filesystem::path &path) const
    {
        write_binary_file(path, serialize());
    }

    CollisionTable CollisionTable::load(const std::filesystem::path &path)
    {
        return deserialize(read_binary_file(path));
    }

    CollisionTable generate_table(const BoundingBoxModel &model, const FacilityConfig &cfg, const TableGrids &grids,
                                  unsigned thread_count)
    {
        model.validate();
        cfg.validate();
        CollisionTable table(grids, geometry_hash(model, cfg));

        const std::size_t na = grids.moving_az.size(), nm = grids.moving_coel.size(), ns = grids.static_coel.size();
        if (na == 0 || nm == 0 || ns == 0)
            throw ConfigError("empty grid");

        std::vector<std::vector<OrientedBox>> static_boxes(ns);
        for (std::size_t s = 0; s < ns; ++s)
            static_boxes[s] = static_gantry_boxes(grids.static_coel.value(s), model, cfg);

        std::vector<std::uint8_t> cells(na * nm * ns, 0);
        std::atomic<std::size_t> next{0};
        auto worker = [&] {
            for (std::size_t a = next++; a < na; a = next++)
            {
                const double az = grids.moving_az.value(a);
                for (std::size_t m = 0; m < nm; ++m)
                {
                    const auto moving = moving_gantry_boxes(az, grids.moving_coel.value(m), model, cfg);
                    std::uint8_t *row = cells.data() + (a * nm + m) * ns;
                    for (std::size_t s = 0; s < ns; ++s)
                        row[s] = boxes_collide(moving, static_boxes[s]) ? 1 : 0;
                }
            }
        };

        if (thread_count == 0)
            thread_count = std::max(1u, std::thread::hardware_concurrency());
        thread_count = static_cast<unsigned>(std::min<std::size_t>(thread_count, na));
        if (thread_count <= 1)
            worker();
        else
        {
            std::vector<std::jthread> pool;
            for (unsigned i = 0; i < thread_count; ++i)
                pool.emplace_back(worker);
        }

        for (std::size_t a = 0; a < na; ++a)
            for (std::size_t m = 0; m < nm; ++m)
                for (std::size_t s = 0; s < ns; ++s)
                    if (cells[(a * nm + m) * ns + s])
                        table.set_cell(a, m, s, true);
        return table;
    }
}

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

#include "bira/config.hpp"
#include "bira/io.hpp"
#include "json_util.hpp"

namespace bira
{
    namespace
    {
        json bound(double v)
        {
            return std::isfinite(v) ? json(v) : json(nullptr);
        }

        Axis axis_key(const std::string &key, const std::string &context)
        {
            const auto a = axis_from_name(key);
            if (!a)
                throw ConfigError("unknown axis '" + key + "' in " + context);
            return *a;
        }
    }

    void to_json(json &j, const Interval &v)
    {
        j = json::array({bound(v.min), bound(v.max)});
    }

    void from_json(const json &j, Interval &v)
    {
        if (!j.is_array() || j.size() != 2)
            throw ConfigError("interval must be [min, max], got " + j.dump());
        const double inf = std::numeric_limits<double>::infinity();
        v.min = j[0].is_null() ? -inf : j[0].get<double>();
        v.max = j[1].is_null() ? inf : j[1].get<double>();
    }

    void to_json(json &j, const FacilityConfig &v)
    {
        json limits = json::object(), offsets = json::object();
        for (Axis a : kAllAxes)
        {
            limits[std::string(axis_name(a))] = v.axis_limits[index(a)];
            offsets[std::string(axis_name(a))] = v.axis_offsets[index(a)];
        }
        j = json{{"focal_height", v.focal_height},
                 {"boom_radius_nominal", v.boom_radius_nominal},
                 {"radial_travel", v.radial_travel},
                 {"probe_aperture_radius", v.probe_aperture_radius},
                 {"turntable_diameter", v.turntable_diameter},
                 {"axis_limits", limits},
                 {"axis_offsets", offsets},
                 {"static_branch", v.static_branch},
                 {"moving_branch", v.moving_branch},
                 {"moving_rail_offset", v.moving_rail_offset}};
    }

    void from_json(const json &j, FacilityConfig &v)
    {
        read_object(j, "facility",
                    {{"focal_height", number(v.focal_height)},
                     {"boom_radius_nominal", number(v.boom_radius_nominal)},
                     {"radial_travel", number(v.radial_travel)},
                     {"probe_aperture_radius", number(v.probe_aperture_radius)},
                     {"turntable_diameter", number(v.turntable_diameter)},
                     {"axis_limits",
                      [&v](const json &o) {
                          if (!o.is_object())
                              throw ConfigError("facility.axis_limits must be an object");
                          for (const auto &[key, value] : o.items())
                              v.axis_limits[index(axis_key(key, "facility.axis_limits"))] = value.get<Interval>();
                      }},
                     {"axis_offsets",
                      [&v](const json &o) {
                          if (!o.is_object())
                              throw ConfigError("facility.axis_offsets must be an object");
                          for (const auto &[key, value] : o.items())
                              v.axis_offsets[index(axis_key(key, "facility.axis_offsets"))] = value.get<double>();
                      }},
                     {"static_branch", integer(v.static_branch)},
                     {"moving_branch", integer(v.moving_branch)},
                     {"moving_rail_offset", number(v.moving_rail_offset)}});
    }

    void to_json(json &j, const GantryLinks &v)
    {
        j = json{{"boom_arc_radius", v.boom_arc_radius}, {"boom_width", v.boom_width},
                 {"boom_thickness", v.boom_thickness},   {"boom_segments", v.boom_segments},
                 {"positioner_size", v.positioner_size}, {"probe_length", v.probe_length},
                 {"probe_diameter", v.probe_diameter},   {"pedestal_size", v.pedestal_size},
                 {"pedestal_top", v.pedestal_top}};
    }

    void from_json(const json &j, GantryLinks &v)
    {
        read_object(j, "gantry links",
                    {{"boom_arc_radius", number(v.boom_arc_radius)},
                     {"boom_width", number(v.boom_width)},
                     {"boom_thickness", number(v.boom_thickness)},
                     {"boom_segments", integer(v.boom_segments)},
                     {"positioner_size", number(v.positioner_size)},
                     {"probe_length", number(v.probe_length)},
                     {"probe_diameter", number(v.probe_diameter)},
                     {"pedestal_size", number(v.pedestal_size)},
                     {"pedestal_top", number(v.pedestal_top)}});
    }

    void to_json(json &j, const BoundingBoxModel &v)
    {
        j = json{{"clearance", v.clearance}, {"moving", v.moving}, {"static", v.static_gantry}};
    }

    void from_json(const json &j, BoundingBoxModel &v)
    {
        read_object(j, "collision_model",
                    {{"clearance", number(v.clearance)},
                     {"moving", [&v](const json &o) { v.moving = o.get<GantryLinks>(); }},
                     {"static", [&v](const json &o) { v.static_gantry = o.get<GantryLinks>(); }}});
    }

    void to_json(json &j, const AxisMotionLimits &v)
    {
        j = json{{"v_max", v.v_max}, {"a_max", v.a_max}, {"d_max", v.d_max}, {"j_max", v.j_max}};
    }

    void from_json(const json &j, AxisMotionLimits &v)
    {
        read_object(j, "motion limits",
                    {{"v_max", number(v.v_max)},
                     {"a_max", number(v.a_max)},
                     {"d_max", number(v.d_max)},
                     {"j_max", number(v.j_max)}});
    }

    void to_json(json &j, const MotionLimits &v)
    {
        j = json::object();
        for (Axis a : kAllAxes)
            j[std::string(axis_name(a))] = v[a];
    }

    void from_json(const json &j, MotionLimits &v)
    {
        if (!j.is_object())
            throw ConfigError("motion_limits must be an object");
        for (const auto &[key, value] : j.items())
        {
            AxisMotionLimits &target = v[axis_key(key, "motion_limits")];
            AxisMotionLimits parsed = target;
            from_json(value, parsed);
            target = parsed;
        }
    }

    void to_json(json &j, const MachineState &v)
    {
        j = json::object();
        for (Axis a : kAllAxes)
            j[std::string(axis_name(a))] = v[a];
    }

    void from_json(const json &j, MachineState &v)
    {
        if (!j.is_object())
            throw ConfigError("machine state must be an object");
        for (const auto &[key, value] : j.items())
        {
            if (!value.is_number())
                throw ConfigError("machine state." + key + ": expected a number");
            v[axis_key(key, "machine state")] = value.get<double>();
        }
    }

    void to_json(json &j, const BistaticConstellation &v)
    {
        j = json{{"phi_ill", v.phi_ill}, {"theta_ill", v.theta_ill}, {"phi_obs", v.phi_obs},
                 {"theta_obs", v.theta_obs}, {"pol_ill", v.pol_ill},  {"pol_obs", v.pol_obs},
                 {"r_ill", v.r_ill},     {"r_obs", v.r_obs}};
    }

    void from_json(const json &j, BistaticConstellation &v)
    {
        read_object(j, "constellation",
                    {{"phi_ill", number(v.phi_ill)},
                     {"theta_ill", number(v.theta_ill)},
                     {"phi_obs", number(v.phi_obs)},
                     {"theta_obs", number(v.theta_obs)},
                     {"pol_ill", number(v.pol_ill)},
                     {"pol_obs", number(v.pol_obs)},
                     {"r_ill", number(v.r_ill)},
                     {"r_obs", number(v.r_obs)}});
    }

    void to_json(json &j, const ProbePose &v)
    {
        auto vec = [](const Vec3 &x) { return json::array({x.x(), x.y(), x.z()}); };
        j = json{{"position", vec(v.position)},
                 {"boresight", vec(v.boresight)},
                 {"pol_co", vec(v.pol_co)},
                 {"pol_cross", vec(v.pol_cross)}};
    }

    void to_json(json &j, const AxisGrid &v)
    {
        j = json{{"min", v.min}, {"max", v.max}, {"step", v.step}, {"size", v.size()}};
    }

    void from_json(const json &j, AxisGrid &v)
    {
        double ignored = 0.0;
        read_object(j, "grid",
                    {{"min", number(v.min)}, {"max", number(v.max)}, {"step", number(v.step)},
                     {"size", number(ignored)}});
    }

    void SiteConfig::validate() const
    {
        facility.validate();
        collision_model.validate();
        motion_limits.validate();
    }

    void to_json(json &j, const SiteConfig &v)
    {
        j = json{{"facility", v.facility},
                 {"collision_model", v.collision_model},
                 {"motion_limits", v.motion_limits}};
    }

    void from_json(const json &j, SiteConfig &v)
    {
        read_object(j, "config",
                    {{"facility", [&v](const json &o) { from_json(o, v.facility); }},
                     {"collision_model", [&v](const json &o) { from_json(o, v.collision_model); }},
                     {"motion_limits", [&v](const json &o) { from_json(o, v.motion_limits); }}});
    }

    SiteConfig parse_site_config(const std::string &text)
    {
        json j;
        try
        {
            j = json::parse(text);
        }
        catch (const json::parse_error &e)
        {
            throw ConfigError(std::string("config is not valid JSON: ") + e.what());
        }
        SiteConfig cfg;
        from_json(j, cfg);
        cfg.validate();
        return cfg;
    }

    SiteConfig load_site_config(const std::filesystem::path &path)
    {
        return parse_site_config(read_text_file(path));
    }
}

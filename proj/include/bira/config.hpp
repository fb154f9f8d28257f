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

#ifndef BIRA_CONFIG_HPP
#define BIRA_CONFIG_HPP

#include "bira/collision.hpp"
#include "bira/geometry.hpp"
#include "bira/motion.hpp"

#include <nlohmann/json.hpp>

#include <filesystem>

// JSON forms of the configuration types. Unbounded interval ends are written
// as null. Readers reject unknown keys and keep defaults for absent ones.

namespace bira
{
    void to_json(nlohmann::json &j, const Interval &v);
    void from_json(const nlohmann::json &j, Interval &v);
    void to_json(nlohmann::json &j, const FacilityConfig &v);
    void from_json(const nlohmann::json &j, FacilityConfig &v);
    void to_json(nlohmann::json &j, const GantryLinks &v);
    void from_json(const nlohmann::json &j, GantryLinks &v);
    void to_json(nlohmann::json &j, const BoundingBoxModel &v);
    void from_json(const nlohmann::json &j, BoundingBoxModel &v);
    void to_json(nlohmann::json &j, const AxisMotionLimits &v);
    void from_json(const nlohmann::json &j, AxisMotionLimits &v);
    void to_json(nlohmann::json &j, const MotionLimits &v);
    void from_json(const nlohmann::json &j, MotionLimits &v);
    void to_json(nlohmann::json &j, const MachineState &v);
    void from_json(const nlohmann::json &j, MachineState &v);
    void to_json(nlohmann::json &j, const BistaticConstellation &v);
    void from_json(const nlohmann::json &j, BistaticConstellation &v);
    void to_json(nlohmann::json &j, const ProbePose &v);
    void to_json(nlohmann::json &j, const AxisGrid &v);
    void from_json(const nlohmann::json &j, AxisGrid &v);

    // Everything a site needs: geometry, collision boxes and motor limits.
    struct SiteConfig
    {
        FacilityConfig facility;
        BoundingBoxModel collision_model;
        MotionLimits motion_limits;

        void validate() const;
    };

    void to_json(nlohmann::json &j, const SiteConfig &v);
    void from_json(const nlohmann::json &j, SiteConfig &v);

    SiteConfig parse_site_config(const std::string &text);
    SiteConfig load_site_config(const std::filesystem::path &path);
}

#endif

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

#ifndef BIRA_SCATTERING_HPP
#define BIRA_SCATTERING_HPP

#include "bira/geometry.hpp"
#include "bira/record.hpp"

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace bira
{
    // Far-field amplitudes S1 (perpendicular) and S2 (parallel) of a perfectly
    // conducting sphere in the Bohren-Huffman convention, at scattering angle
    // theta_s (0 = forward).
    struct MieAmplitudes
    {
        cdouble s1;
        cdouble s2;
    };

    // Number of partial waves for size parameter ka.
    int mie_term_count(double ka);

    MieAmplitudes mie_pec_amplitudes(double ka, double theta_s_deg);

    enum class Polarization
    {
        Theta,
        Phi
    };

    std::string_view polarization_name(Polarization p);
    Polarization polarization_from_name(std::string_view name);

    struct MieResult
    {
        double rcs = 0.0;         // m^2
        cdouble amplitude;        // S1 or S2, dimensionless
        cdouble scattering_length; // m, multiplies exp(-jkr)/r in the e^{jwt} convention
    };

    // Sphere RCS for a cut in the equatorial plane of both probes. beta is
    // the bistatic angle (0 = monostatic, 180 = forward). Theta polarization
    // lies normal to the cut plane, phi polarization in it.
    MieResult mie_bistatic_rcs(double radius, double frequency, double beta_deg, Polarization pol);

    // Scattering length for arbitrary directions and polarizations. k_inc is
    // the propagation direction of the incident wave, k_sca that of the
    // scattered wave; p_tx and p_rx are the unit field directions.
    cdouble mie_scattering_length(double radius, double frequency, const Vec3 &k_inc, const Vec3 &k_sca,
                                  const Vec3 &p_tx, const Vec3 &p_rx);

    struct SpherePathModel
    {
        double specular_extra = 0.0; // m, relative to 2R
        double creeping_extra = 0.0;
    };

    SpherePathModel sphere_path_model(double beta_deg, double gantry_radius, double sphere_radius,
                                      double creeping_offset = 0.008);

    // Scene description ------------------------------------------------------

    enum class SphereModel
    {
        Mie,       // exact series at the sphere center
        Geometric  // specular point plus creeping wave
    };

    struct SphereTarget
    {
        std::string name;
        Vec3 center = Vec3::Zero();
        double radius = 0.15;
        SphereModel model = SphereModel::Mie;
        // Rigid rotation with the turntable about the z axis: center(t) =
        // Rz(orbit_rate * t) * center.
        double orbit_rate = 0.0; // deg/s
    };

    struct PointScatterer
    {
        std::string name;
        Vec3 position = Vec3::Zero();
        cdouble amplitude{1.0, 0.0}; // scattering length, m
    };

    struct LimbHarmonic
    {
        int order = 1;
        double amplitude = 0.0; // rad
        double phase = 0.0;     // rad
    };

    // Rigid cluster that swings about pivot/axis with the periodic angle
    // sum_h A_h sin(2 pi h t / period + phase_h), on top of a translation of
    // the whole cluster at velocity.
    struct Limb
    {
        std::string name;
        Vec3 pivot = Vec3::Zero();
        Vec3 axis = Vec3::UnitY();
        double period = 1.0;
        std::vector<LimbHarmonic> harmonics;
        std::vector<PointScatterer> points; // positions at zero angle
        Vec3 velocity = Vec3::Zero();

        double angle(double t) const;
        double angle_rate(double t) const;
    };

    struct SceneOptions
    {
        double shadow_attenuation_db = 20.0;
        bool inter_target = false;
        double creeping_decay_db_per_m = 25.0;
        double creeping_offset = 0.008;
    };

    struct Scene
    {
        std::vector<SphereTarget> spheres;
        std::vector<PointScatterer> points;
        std::vector<Limb> limbs;
        SceneOptions options;

        bool empty() const { return spheres.empty() && points.empty() && limbs.empty(); }
        // Throws ConfigError; targets must stay within the turntable radius.
        void validate(double turntable_radius = 3.25) const;
    };

    Scene parse_scene(const std::string &json_text);
    std::string scene_to_json(const Scene &scene);
    Scene load_scene(const std::filesystem::path &path);

    // Probe antennas in the DUT frame.
    struct ProbeGeometry
    {
        Vec3 tx = Vec3::Zero();
        Vec3 rx = Vec3::Zero();
        Vec3 pol_tx = Vec3::UnitZ();
        Vec3 pol_rx = Vec3::UnitZ();
    };

    ProbeGeometry probes_from_constellation(const BistaticConstellation &c);

    enum class PathKind
    {
        Los,     // Tx -> scatterer center -> Rx
        Specular,
        Creeping,
        InterTarget
    };

    std::string_view path_kind_name(PathKind k);

    struct PathContribution
    {
        PathKind kind = PathKind::Los;
        std::string target;
        double length = 0.0; // m, Tx -> ... -> Rx
        double spreading = 1.0; // product of segment lengths
        cdouble amplitude;   // scattering length incl. shadow factor, m (m^2 for bounces)
        bool occluded = false;

        // Set for Mie spheres, whose amplitude is re-evaluated per frequency.
        struct MieGeometry
        {
            double radius = 0.0;
            Vec3 k_inc, k_sca, p_tx, p_rx;
            double factor = 1.0;
        };
        std::optional<MieGeometry> mie;

        // Contribution to S21 at frequency f.
        cdouble transfer(double frequency) const;
    };

    // Instantaneous state of one scatterer.
    struct ScattererState
    {
        std::string name;
        Vec3 position = Vec3::Zero();
        Vec3 velocity = Vec3::Zero();
        cdouble amplitude;
        double range_rate = 0.0; // d/dt (d_tx + d_rx), m/s
        double path_length = 0.0;
    };

    // d/dt of |x - tx| + |x - rx| for a point moving at velocity v.
    double bistatic_range_rate(const Vec3 &position, const Vec3 &velocity, const ProbeGeometry &probes);

    // Point scatterers (static and articulated) and sphere centers at time t.
    std::vector<ScattererState> animate_scene(const Scene &scene, double t, const ProbeGeometry &probes);

    // Paths at time t. Mie amplitudes are reported at the reference frequency.
    std::vector<PathContribution> scene_paths(const Scene &scene, const ProbeGeometry &probes, double t,
                                              double reference_frequency);

    TransferRecord scene_response(const Scene &scene, const BistaticConstellation &c, const FrequencyGrid &grid,
                                  double t = 0.0);
    TransferRecord scene_response(const Scene &scene, const ProbeGeometry &probes, const FrequencyGrid &grid,
                                  double t = 0.0);
}

#endif

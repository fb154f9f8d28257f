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

#ifndef BIRA_PIPELINE_HPP
#define BIRA_PIPELINE_HPP

#include "bira/dsp.hpp"

#include <vector>

// Measurement chains run on synthetic data: background subtraction, time
// gating and calibration against a reference sphere for RCS; antenna
// deconvolution and impulse responses for the path-length scans.

namespace bira
{
    struct RcsPipelineOptions
    {
        SweepConfig sweep = [] {
            SweepConfig s;
            s.noise_floor_db = -110.0;
            return s;
        }();
        InstrumentModel instrument = InstrumentModel::facility();
        double dut_radius = 0.15;
        double cal_radius = 0.05;
        // Relative to r_ill + r_obs. Narrow enough to exclude the +1.27 m
        // positioner echo copy of the target.
        GateOptions gate{0.15, 1.2, 0.1, Window::Rect, 0.0};
        double polarization = 0.0; // deg, both probes
        std::uint64_t seed = 1;
    };

    struct RcsMeasurement
    {
        RcsResult recovered;
        std::vector<double> analytic; // Mie sigma of the DUT at the same constellation
    };

    // One bistatic angle in the equatorial plane.
    RcsMeasurement measure_sphere_rcs(double beta_deg, const RcsPipelineOptions &opt = {});

    struct SpherePathScanOptions
    {
        SweepConfig sweep = [] {
            SweepConfig s;
            s.noise_floor_db = -110.0;
            return s;
        }();
        InstrumentModel instrument = InstrumentModel::facility();
        double gantry_radius = 2.9;
        double sphere_radius = 0.1524;
        double polarization = 0.0;
        ImpulseOptions ir{Window::Hann, 8, 0.0, -1.0}; // reference is set to 2R
        double view_min = -1.0; // m relative to 2R, exported range
        double view_max = 1.0;
        std::uint64_t seed = 1;
    };

    struct SpherePathScan
    {
        double beta = 0.0;
        ImpulseResponse response;
        SpherePathModel model;
        // Strongest tap with path length inside [view_min, view_max].
        double peak_length = 0.0;
    };

    class SpherePathScanner
    {
    public:
        explicit SpherePathScanner(SpherePathScanOptions opt = {});
        SpherePathScan scan(double beta_deg) const;
        const AntennaKernel &kernel() const { return kernel_; }
        const SpherePathScanOptions &options() const { return opt_; }

    private:
        SpherePathScanOptions opt_;
        AntennaKernel kernel_;
    };

    // Local maxima of |h| inside [lo, hi] (relative path lengths).
    std::vector<double> local_maxima(const ImpulseResponse &ir, double lo, double hi);
}

#endif

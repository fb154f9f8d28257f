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

#include "bira/pipeline.hpp"

namespace bira
{
    namespace
    {
        BistaticConstellation equatorial(double beta, double radius, double pol)
        {
            if (!(beta >= 0.0 && beta <= 180.0))
                throw RangeError("beta", "bistatic angle " + std::to_string(beta) + " outside [0, 180]");
            BistaticConstellation c;
            c.theta_ill = c.theta_obs = 90.0;
            c.phi_ill = 0.0;
            c.phi_obs = beta;
            c.pol_ill = c.pol_obs = pol;
            c.r_ill = c.r_obs = radius;
            return c;
        }

        Scene sphere_scene(const std::string &name, double radius)
        {
            Scene s;
            s.spheres.push_back({name, Vec3::Zero(), radius});
            return s;
        }
    }

    RcsMeasurement measure_sphere_rcs(double beta_deg, const RcsPipelineOptions &opt)
    {
        const BistaticConstellation c = equatorial(beta_deg, 3.44, opt.polarization);
        const Scene dut = sphere_scene("dut", opt.dut_radius), cal = sphere_scene("cal", opt.cal_radius), empty;
        // Four acquisitions with independent noise: DUT, its background, the
        // reference sphere and its background.
        const std::uint64_t s = opt.seed * 4;
        const TransferRecord d = synthesize_sweep(dut, c, opt.sweep, opt.instrument, s);
        const TransferRecord db = synthesize_sweep(empty, c, opt.sweep, opt.instrument, s + 1);
        const TransferRecord k = synthesize_sweep(cal, c, opt.sweep, opt.instrument, s + 2);
        const TransferRecord kb = synthesize_sweep(empty, c, opt.sweep, opt.instrument, s + 3);
        GateOptions g = opt.gate;
        g.reference = c.r_ill + c.r_obs;
        const TransferRecord dg = time_gate(background_subtract(d, db), g);
        const TransferRecord kg = time_gate(background_subtract(k, kb), g);
        RcsMeasurement m;
        m.recovered = calibrate_rcs(dg, kg, reference_sphere_rcs(opt.cal_radius, kg.grid, c));
        m.analytic = reference_sphere_rcs(opt.dut_radius, dg.grid, c);
        return m;
    }

    SpherePathScanner::SpherePathScanner(SpherePathScanOptions opt) : opt_(std::move(opt))
    {
        const double los = 2.0 * opt_.gantry_radius;
        kernel_ = extract_antenna_response(synthesize_thru(opt_.sweep, opt_.instrument, los, opt_.seed * 3 + 2), los);
    }

    SpherePathScan SpherePathScanner::scan(double beta_deg) const
    {
        const BistaticConstellation c = equatorial(beta_deg, opt_.gantry_radius, opt_.polarization);
        const Scene target = sphere_scene("sphere", opt_.sphere_radius), empty;
        const TransferRecord d = synthesize_sweep(target, c, opt_.sweep, opt_.instrument, opt_.seed * 3);
        const TransferRecord b = synthesize_sweep(empty, c, opt_.sweep, opt_.instrument, opt_.seed * 3 + 1);
        const DeconvolutionResult dec = deconvolve_antenna(background_subtract(d, b), kernel_);
        ImpulseOptions io = opt_.ir;
        io.reference = 2.0 * opt_.gantry_radius;
        SpherePathScan out;
        out.beta = beta_deg;
        out.response = to_impulse_response(dec.record, io);
        out.model = sphere_path_model(beta_deg, opt_.gantry_radius, opt_.sphere_radius);
        double best = -1.0;
        for (std::size_t i = 0; i < out.response.taps.size(); ++i)
        {
            const double l = out.response.path_length(i);
            if (l < opt_.view_min || l > opt_.view_max)
                continue;
            if (std::abs(out.response.taps[i]) > best)
            {
                best = std::abs(out.response.taps[i]);
                out.peak_length = l;
            }
        }
        return out;
    }

    std::vector<double> local_maxima(const ImpulseResponse &ir, double lo, double hi)
    {
        std::vector<double> out;
        const std::size_t n = ir.taps.size();
        for (std::size_t i = 1; i + 1 < n; ++i)
        {
            const double l = ir.path_length(i);
            if (l < lo || l > hi)
                continue;
            const double a = std::abs(ir.taps[i]);
            if (a > std::abs(ir.taps[i - 1]) && a >= std::abs(ir.taps[i + 1]))
                out.push_back(l);
        }
        return out;
    }
}

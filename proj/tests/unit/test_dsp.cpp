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

#include <catch_amalgamated.hpp>
#include "bira/dsp.hpp"
#include "bira/fft.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <random>

// Covered tests:
// - Transforms: naive DFT oracle, Parseval, exact rect inverse
// - Range span, bin size and two-path resolution
// - Time gating on the two-path fixture, identity and idempotence
// - Background subtraction and calibration
// - Antenna kernel extraction and deconvolution
// - OFDM channel estimation, prefix violations, estimator variance
// - Range-Doppler pixels, rate sign and peaks
// - Record text and binary formats

using namespace bira;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace
{
    cdouble path(double f, double length)
    {
        return std::polar(1.0, -2.0 * kPi * f * length / kSpeedOfLight);
    }

    // Sum of unit-free point paths: (length, amplitude).
    TransferRecord paths_record(const FrequencyGrid &g, const std::vector<std::pair<double, cdouble>> &paths)
    {
        TransferRecord r;
        r.grid = g;
        r.s21.assign(g.count, 0.0);
        for (std::size_t k = 0; k < g.count; ++k)
            for (const auto &[l, a] : paths)
                r.s21[k] += a * path(g.at(k), l);
        return r;
    }

    TransferRecord random_record(const FrequencyGrid &g, std::uint64_t seed)
    {
        std::mt19937_64 rng(seed);
        std::normal_distribution<double> n(0.0, 1.0);
        TransferRecord r;
        r.grid = g;
        for (std::size_t k = 0; k < g.count; ++k)
            r.s21.emplace_back(n(rng), n(rng));
        r.constellation.phi_obs = 40.0;
        r.constellation.theta_ill = r.constellation.theta_obs = 90.0;
        r.time = 1.25;
        r.label = "random";
        return r;
    }

    double max_rel_diff(const TransferRecord &a, const TransferRecord &b)
    {
        double scale = 0.0, worst = 0.0;
        for (std::size_t k = 0; k < a.size(); ++k)
        {
            scale = std::max(scale, std::abs(b.s21[k]));
            worst = std::max(worst, std::abs(a.s21[k] - b.s21[k]));
        }
        return worst / scale;
    }

    // Nearest tap to a path length relative to the reference.
    std::size_t tap_at(const ImpulseResponse &ir, double x)
    {
        const double n = std::round((x - ir.options.axis_start) / ir.bin());
        const double m = static_cast<double>(ir.taps.size());
        return static_cast<std::size_t>(std::fmod(std::fmod(n, m) + m, m));
    }

    double local_peak_db(const ImpulseResponse &ir, double x, int halfwidth = 2)
    {
        const std::size_t c = tap_at(ir, x);
        double best = 0.0;
        for (int d = -halfwidth; d <= halfwidth; ++d)
        {
            const std::size_t i = (c + ir.taps.size() + static_cast<std::size_t>(d + static_cast<int>(ir.taps.size()))) %
                                  ir.taps.size();
            best = std::max(best, std::abs(ir.taps[i]));
        }
        return db20(best);
    }
}

TEST_CASE("DSP - impulse response matches a direct evaluation")
{
    const FrequencyGrid g{2e9, 25e6, 64};
    const TransferRecord r = random_record(g, 3);
    ImpulseOptions opt{Window::Hann, 2, 3.0, -1.0};
    const ImpulseResponse ir = to_impulse_response(r, opt);
    REQUIRE(ir.taps.size() == 128);
    const auto w = make_window(Window::Hann, g.count);
    double wsum = 0.0;
    for (double v : w)
        wsum += v;
    for (std::size_t n = 0; n < ir.taps.size(); n += 7)
    {
        const double l = opt.reference + ir.path_length(n);
        cdouble h = 0.0;
        for (std::size_t k = 0; k < g.count; ++k)
            h += w[k] * r.s21[k] * std::polar(1.0, 2.0 * kPi * g.at(k) * l / kSpeedOfLight);
        h /= wsum;
        CHECK(std::abs(ir.taps[n] - h) < 1e-12 * std::max(1.0, std::abs(h)));
    }
    CHECK(ir.constellation == r.constellation);
    CHECK(ir.time == r.time);
    CHECK(ir.label == r.label);
}

TEST_CASE("DSP - rect impulse response preserves energy and inverts exactly")
{
    const FrequencyGrid g{2e9, 10e6, 301};
    const TransferRecord r = random_record(g, 9);
    const ImpulseResponse ir = to_impulse_response(r, {Window::Rect, 1, 1.7, -0.4});
    double e_f = 0.0, e_t = 0.0;
    for (const auto &v : r.s21)
        e_f += std::norm(v);
    for (const auto &v : ir.taps)
        e_t += std::norm(v);
    CHECK_THAT(e_t, WithinRel(e_f / static_cast<double>(g.count), 1e-10));

    for (std::size_t pad : {1u, 4u})
    {
        const TransferRecord back = from_impulse_response(to_impulse_response(r, {Window::Rect, pad, 5.0, -2.0}));
        CHECK(max_rel_diff(back, r) < 1e-12);
        CHECK(back.constellation == r.constellation);
    }
    CHECK_THROWS_AS(from_impulse_response(to_impulse_response(r, {Window::Hann, 1, 0.0, 0.0})), ConfigError);
    CHECK_THROWS_AS(to_impulse_response(r, {Window::Rect, 0, 0.0, 0.0}), ConfigError);
}

TEST_CASE("DSP - range span, bin and peak location")
{
    const SweepConfig cfg;
    CHECK_THAT(cfg.unambiguous_span(), WithinAbs(29.98, 0.005));
    // c/B with the exact speed of light; 1.875 cm is the rounded c = 3e8 value.
    SweepConfig wide;
    CHECK_THAT(wide.resolution(), WithinRel(0.01875, 1e-3));
    CHECK(cfg.grid().count == 1601);

    const TransferRecord r = paths_record(cfg.grid(), {{2.0 * 3.44 + 5.0, 1.0}});
    const ImpulseResponse ir = to_impulse_response(r, {Window::Hann, 4, 2.0 * 3.44, -10.0});
    CHECK_THAT(ir.span(), WithinRel(cfg.unambiguous_span(), 1e-12));
    CHECK_THAT(ir.path_length(ir.peak_index()), WithinAbs(5.0, ir.bin() / 2.0));
    CHECK_THAT(std::abs(ir.taps[ir.peak_index()]), WithinAbs(1.0, 0.01));
}

TEST_CASE("DSP - two paths 2 cm apart resolve at 16 GHz but not at 4 GHz")
{
    auto dip_db = [](double f0, double f1) {
        const FrequencyGrid g = FrequencyGrid::from_range(f0, f1, 10e6);
        const TransferRecord r = paths_record(g, {{6.0, 1.0}, {6.02, 1.0}});
        const ImpulseResponse ir = to_impulse_response(r, {Window::Rect, 64, 6.0, -0.5});
        const double a = std::abs(ir.taps[tap_at(ir, 0.0)]), b = std::abs(ir.taps[tap_at(ir, 0.02)]);
        const double mid = std::abs(ir.taps[tap_at(ir, 0.01)]);
        return db20(std::min(a, b) / mid);
    };
    CHECK(dip_db(2e9, 18e9) >= 3.0);
    CHECK(dip_db(12e9, 16e9) <= 0.0);
    CHECK(dip_db(2e9, 6e9) <= 0.0);
}

TEST_CASE("DSP - gate removes the +12 m parasite without distorting the target")
{
    const FrequencyGrid g = SweepConfig{}.grid();
    const double l0 = 6.88;
    const TransferRecord target = paths_record(g, {{l0, 1.0}});
    const TransferRecord both = paths_record(g, {{l0, 1.0}, {l0 + 12.0, 0.5}});
    const GateOptions gate{0.0, 2.0, 0.1, Window::Rect, l0};
    const TransferRecord gated = time_gate(both, gate);

    const ImpulseOptions view{Window::Hann, 4, l0, -5.0};
    const ImpulseResponse before = to_impulse_response(both, view), after = to_impulse_response(gated, view);
    CHECK(local_peak_db(before, 12.0) - local_peak_db(after, 12.0) >= 40.0);
    CHECK(std::abs(local_peak_db(after, 0.0) - local_peak_db(before, 0.0)) <= 0.1);

    // Amplitude distortion away from the band edges, where the gate truncates
    // the sinc tails of the target.
    double worst = 0.0;
    for (std::size_t k = 100; k + 100 < g.count; ++k)
        worst = std::max(worst, std::abs(db20(std::abs(gated.s21[k]) / std::abs(target.s21[k]))));
    CHECK(worst <= 0.1);
}

TEST_CASE("DSP - gate identities")
{
    const FrequencyGrid g{2e9, 20e6, 401};
    const TransferRecord r = random_record(g, 4);
    const double span = kSpeedOfLight / g.step;
    const TransferRecord all = time_gate(r, {0.0, span, 0.0, Window::Rect, 0.0});
    CHECK(max_rel_diff(all, r) < 1e-12);

    const GateOptions hard{1.0, 2.0, 0.0, Window::Rect, 3.0};
    const TransferRecord once = time_gate(r, hard), twice = time_gate(once, hard);
    CHECK(max_rel_diff(twice, once) < 1e-12);

    CHECK(gate_weight(hard, 1.0, span) == 1.0);
    CHECK(gate_weight(hard, 2.0 + 1e-9, span) == 0.0);
    CHECK(gate_weight(hard, 1.0 + span, span) == 1.0);
    const GateOptions soft{0.0, 2.0, 0.2, Window::Rect, 0.0};
    CHECK_THAT(gate_weight(soft, 1.1, span), WithinAbs(0.5, 1e-12));
    const GateOptions hann{0.0, 2.0, 0.0, Window::Hann, 0.0};
    CHECK_THAT(gate_weight(hann, 0.5, span), WithinAbs(0.5, 1e-12));
    CHECK(gate_weight(hann, 1.0, span) < 1e-30);

    CHECK_THROWS_AS(time_gate(r, {0.0, span, 0.1, Window::Rect, 0.0}), ConfigError);
    CHECK_THROWS_AS(time_gate(r, {0.0, -1.0, 0.1, Window::Rect, 0.0}), ConfigError);
}

TEST_CASE("DSP - background subtraction removes clutter exactly")
{
    const FrequencyGrid g{2e9, 10e6, 201};
    const TransferRecord bg = paths_record(g, {{7.9, 0.01}, {10.4, 0.003}});
    TransferRecord dut = paths_record(g, {{6.5, 0.2}, {7.9, 0.01}, {10.4, 0.003}});
    const TransferRecord target = paths_record(g, {{6.5, 0.2}});
    CHECK(max_rel_diff(background_subtract(dut, bg), target) < 1e-12);

    TransferRecord other = bg;
    other.grid.step = 11e6;
    CHECK_THROWS_AS(background_subtract(dut, other), ConfigError);
    other = bg;
    other.constellation.phi_obs = 10.0;
    CHECK_THROWS_AS(background_subtract(dut, other), ConfigError);
}

TEST_CASE("DSP - RCS calibration")
{
    const FrequencyGrid g{4e9, 50e6, 81};
    const TransferRecord cal = random_record(g, 11);
    const std::vector<double> sigma_cal(g.count, 0.02);

    const RcsResult same = calibrate_rcs(cal, cal, sigma_cal);
    for (std::size_t k = 0; k < g.count; ++k)
        CHECK_THAT(same.sigma[k], WithinRel(0.02, 1e-12));
    CHECK_THAT(same.beta, WithinAbs(40.0, 1e-9));

    TransferRecord twice = cal;
    for (auto &v : twice.s21)
        v *= 2.0;
    const auto dbsm_same = same.sigma_dbsm(), dbsm_twice = calibrate_rcs(twice, cal, sigma_cal).sigma_dbsm();
    for (std::size_t k = 0; k < g.count; ++k)
        CHECK_THAT(dbsm_twice[k] - dbsm_same[k], WithinAbs(6.0206, 1e-4));

    // A common instrument factor cancels.
    const TransferRecord dut = random_record(g, 12);
    TransferRecord dut_k = dut, cal_k = cal;
    for (std::size_t k = 0; k < g.count; ++k)
    {
        const cdouble factor = std::polar(0.3 + 0.01 * static_cast<double>(k), 0.1 * static_cast<double>(k));
        dut_k.s21[k] *= factor;
        cal_k.s21[k] *= factor;
    }
    const RcsResult a = calibrate_rcs(dut, cal, sigma_cal), b = calibrate_rcs(dut_k, cal_k, sigma_cal);
    for (std::size_t k = 0; k < g.count; ++k)
        CHECK_THAT(b.sigma[k], WithinRel(a.sigma[k], 1e-12));

    TransferRecord holey = cal;
    holey.s21[17] = 1e-6;
    try
    {
        calibrate_rcs(dut, holey, sigma_cal);
        FAIL("expected a calibration hole");
    }
    catch (const CalibrationHoleError &e)
    {
        REQUIRE(e.frequencies().size() == 1);
        CHECK(e.frequencies()[0] == g.at(17));
        CHECK(std::string(e.kind()) == "calibration");
    }
    CHECK_THROWS_AS(calibrate_rcs(dut, cal, std::vector<double>(3, 1.0)), ConfigError);
}

TEST_CASE("DSP - reference sphere RCS follows the Mie cut")
{
    BistaticConstellation c;
    c.theta_ill = c.theta_obs = 90.0;
    c.phi_obs = 50.0;
    const FrequencyGrid g{2e9, 1e9, 17};
    const auto sigma = reference_sphere_rcs(0.05, g, c);
    for (std::size_t k = 0; k < g.count; ++k)
        CHECK_THAT(sigma[k], WithinRel(mie_bistatic_rcs(0.05, g.at(k), 50.0, Polarization::Theta).rcs, 1e-9));
}

TEST_CASE("DSP - antenna kernel extraction and deconvolution")
{
    const SweepConfig cfg;
    const FrequencyGrid g = cfg.grid();
    const InstrumentModel inst = InstrumentModel::facility();
    const double los = 6.88;

    // Ideal instrument: the kernel is unity and deconvolution is the identity.
    const AntennaKernel unit = extract_antenna_response(synthesize_thru(cfg, InstrumentModel::ideal(), los), los);
    for (std::size_t k = 100; k + 100 < g.count; ++k)
        CHECK(std::abs(unit.response.s21[k] - 1.0) < 1e-3);

    // Exact kernel from the instrument model.
    AntennaKernel exact;
    exact.response.grid = g;
    for (std::size_t k = 0; k < g.count; ++k)
        exact.response.s21.push_back(inst.kernel(g.at(k)));
    Scene point;
    point.points.push_back({"p", Vec3::Zero(), 0.05});
    BistaticConstellation c;
    c.theta_ill = c.theta_obs = 90.0;
    c.phi_obs = 30.0;
    SweepConfig clean = cfg;
    InstrumentModel no_bg = inst;
    no_bg.background.clear();
    const TransferRecord raw = synthesize_sweep(point, c, clean, no_bg);
    const TransferRecord truth = scene_response(point, c, g);
    CHECK(max_rel_diff(deconvolve_antenna(raw, exact, 0.0).record, truth) < 1e-9);

    // Kernel measured on a thru and gated around the direct path: the flange
    // echo inside the kernel gate drops by at least 20 dB.
    const AntennaKernel measured = extract_antenna_response(synthesize_thru(cfg, inst, los), los);
    const DeconvolutionResult d = deconvolve_antenna(raw, measured);
    const ImpulseOptions view{Window::Hann, 4, 2.0 * 3.44, -2.0};
    const ImpulseResponse ir_raw = to_impulse_response(raw, view), ir_dec = to_impulse_response(d.record, view);
    const double echo = inst.echoes.front().offset;
    const double floor_raw = local_peak_db(ir_raw, echo) - local_peak_db(ir_raw, 0.0);
    const double floor_dec = local_peak_db(ir_dec, echo) - local_peak_db(ir_dec, 0.0);
    CHECK(floor_raw - floor_dec >= 20.0);
    CHECK(d.weak_points == 0);

    // Heavy regularization shrinks the result towards zero and reports it.
    const DeconvolutionResult heavy = deconvolve_antenna(raw, measured, 1e6);
    CHECK(heavy.weak_points == g.count);
    CHECK_FALSE(heavy.warnings.empty());
    for (std::size_t k = 0; k < g.count; k += 50)
        CHECK(std::abs(heavy.record.s21[k]) < 1e-5 * std::abs(raw.s21[k]) + 1e-30);
    CHECK_THROWS_AS(deconvolve_antenna(raw, measured, -1.0), ConfigError);
}

TEST_CASE("DSP - OFDM channel estimate is exact without noise")
{
    const OfdmParams p;
    CHECK_THAT(p.spacing(), WithinRel(7.8125e6, 1e-12));
    CHECK_THAT(p.symbol_duration(), WithinRel(160e-9, 1e-12));
    for (const auto &paths : {std::vector<ChannelPath>{{3.0, cdouble(0.01, 0.0)}},
                              std::vector<ChannelPath>{{2.0, cdouble(0.02, 0.0)}, {8.5, cdouble(0.0, -0.007)}}})
    {
        const auto x = qpsk_symbol(p.subcarriers, 5);
        for (const auto &v : x)
            CHECK_THAT(std::abs(v), WithinAbs(1.0, 1e-15));
        const auto rx = ofdm_propagate({x, x}, paths, p);
        const OfdmEstimate est = ofdm_channel_estimate(x, rx[1], p);
        const FrequencyGrid g = p.grid();
        for (std::size_t k = 0; k < g.count; ++k)
            CHECK(std::abs(est.record.s21[k] - channel_transfer(paths, g.at(k))) < 1e-9);
        CHECK(est.warnings.empty());
    }
}

TEST_CASE("DSP - OFDM prefix violation is reported")
{
    const OfdmParams p;
    const double cp_length = kSpeedOfLight * static_cast<double>(p.cyclic_prefix) / p.sample_rate();
    CHECK_THAT(cp_length, WithinAbs(9.593, 1e-3));
    const auto x = qpsk_symbol(p.subcarriers, 1), y = qpsk_symbol(p.subcarriers, 2);
    const std::vector<ChannelPath> paths{{3.0, 0.01}, {cp_length + 6.0, 0.01}};
    const auto rx = ofdm_propagate({y, x}, paths, p);
    const OfdmEstimate est = ofdm_channel_estimate(x, rx[1], p);
    CHECK_FALSE(est.warnings.empty());
    CHECK(est.outside_energy_fraction > 0.01);
    CHECK_THROWS_AS(ofdm_propagate({x}, {{200.0, 1.0}}, p), ConfigError);
}

TEST_CASE("DSP - OFDM least-squares error variance")
{
    const OfdmParams p;
    const double sigma2 = 1e-6;
    const std::vector<ChannelPath> paths{{4.0, 0.01}};
    const FrequencyGrid g = p.grid();
    double mse = 0.0;
    std::size_t count = 0;
    for (std::uint64_t trial = 0; trial < 200; ++trial)
    {
        const auto x = qpsk_symbol(p.subcarriers, trial);
        const auto rx = ofdm_propagate({x}, paths, p, sigma2, 1000 + trial);
        const OfdmEstimate est = ofdm_channel_estimate(x, rx[0], p);
        for (std::size_t k = 0; k < g.count; ++k, ++count)
            mse += std::norm(est.record.s21[k] - channel_transfer(paths, g.at(k)));
    }
    mse /= static_cast<double>(count);
    // Normalized inverse DFT of unit pilots: per-subcarrier error sigma^2 / N.
    CHECK(std::abs(db10(mse / (sigma2 / static_cast<double>(p.subcarriers)))) <= 1.0);
}

TEST_CASE("DSP - range-Doppler axes and peaks")
{
    const OfdmParams p;
    const FrequencyGrid g = p.grid();
    const double cpi = cpi_for_pixel(p.f_center, 0.25);
    CHECK_THAT(cpi, WithinAbs(0.09993, 1e-5));
    const std::size_t m = 128;
    const double period = cpi / static_cast<double>(m);

    auto records_for = [&](double l0, double rate, std::vector<double> times) {
        std::vector<TransferRecord> out;
        for (double t : times)
        {
            TransferRecord r = paths_record(g, {{l0 + rate * t, 0.01}});
            r.time = t;
            out.push_back(r);
        }
        return out;
    };
    std::vector<double> times;
    for (std::size_t s = 0; s < m; ++s)
        times.push_back(static_cast<double>(s) * period);

    const RangeDopplerOptions opt{Window::Hann, Window::Hann, 6.88, -2.0, false};
    const RangeDopplerMap still = range_doppler(records_for(6.88 + 1.0, 0.0, times), p.f_center, opt);
    CHECK_THAT(still.pixel_range, WithinAbs(0.1499, 1e-4));
    CHECK_THAT(still.pixel_rate, WithinAbs(0.25, 1e-9));
    CHECK_THAT(still.cpi, WithinRel(cpi, 1e-12));
    const auto ps = find_peaks(still);
    REQUIRE_FALSE(ps.empty());
    CHECK(ps[0].range_rate == 0.0);
    CHECK_THAT(ps[0].path_length, WithinAbs(1.0, still.pixel_range / 2.0));

    const RangeDopplerMap moving = range_doppler(records_for(6.88 + 1.0, 1.0, times), p.f_center, opt);
    const auto pm = find_peaks(moving);
    REQUIRE_FALSE(pm.empty());
    CHECK(std::abs(pm[0].range_rate - 1.0) <= moving.pixel_rate / 2.0);
    CHECK(std::abs(pm[0].path_length - 1.0) <= moving.pixel_range);

    // Playing the same motion backwards mirrors the rate.
    std::vector<TransferRecord> rev = records_for(6.88 + 1.0, 1.0, times);
    std::reverse(rev.begin(), rev.end());
    for (std::size_t s = 0; s < m; ++s)
        rev[s].time = times[s];
    const auto pr = find_peaks(range_doppler(rev, p.f_center, opt));
    REQUIRE_FALSE(pr.empty());
    CHECK_THAT(pr[0].range_rate, WithinAbs(-pm[0].range_rate, 1e-12));

    // Static clutter removal empties the stationary map.
    RangeDopplerOptions removing = opt;
    removing.remove_static = true;
    const RangeDopplerMap cleared = range_doppler(records_for(7.88, 0.0, times), p.f_center, removing);
    CHECK(*std::max_element(cleared.magnitude.begin(), cleared.magnitude.end()) < 1e-12);

    std::vector<double> uneven = times;
    uneven[5] += period / 3.0;
    CHECK_THROWS_AS(range_doppler(records_for(7.88, 0.0, uneven), p.f_center, opt), ConfigError);
    CHECK_THROWS_AS(range_doppler(records_for(7.88, 0.0, {0.0}), p.f_center, opt), ConfigError);

    const std::string csv = range_doppler_to_csv(moving);
    CHECK(csv.rfind("#", 0) == 0);
    CHECK(std::count(csv.begin(), csv.end(), '\n') >= static_cast<long>(moving.path_length.size()));
}

TEST_CASE("DSP - micro-Doppler configuration")
{
    MicroDopplerConfig cfg;
    CHECK_THAT(cfg.cpi(), WithinAbs(0.09993, 1e-5));
    CHECK_THAT(cfg.period(), WithinRel(cfg.cpi() / 128.0, 1e-12));
    CHECK(cfg.period() > cfg.ofdm.symbol_duration());
    CHECK_NOTHROW(cfg.validate());
    cfg.periods = 1;
    CHECK_THROWS_AS(cfg.validate(), ConfigError);
}

TEST_CASE("DSP - records round-trip through text and binary")
{
    TransferRecord r = random_record(FrequencyGrid{2e9, 10e6, 33}, 21);
    const TransferRecord t = record_from_text(record_to_text(r));
    CHECK(t.grid == r.grid);
    CHECK(t.constellation == r.constellation);
    CHECK(t.label == r.label);
    CHECK(t.time == r.time);
    for (std::size_t k = 0; k < r.size(); ++k)
        CHECK(t.s21[k] == r.s21[k]);

    auto bytes = record_to_binary(r);
    const TransferRecord b = record_from_binary(bytes);
    CHECK(b.grid == r.grid);
    CHECK(b.s21 == r.s21);
    CHECK(b.constellation == r.constellation);
    bytes[40] ^= 0x01;
    CHECK_THROWS_AS(record_from_binary(bytes), FormatError);
    bytes.resize(10);
    CHECK_THROWS_AS(record_from_binary(bytes), FormatError);

    const auto dir = std::filesystem::temp_directory_path() / "bira_record_test";
    std::filesystem::create_directories(dir);
    save_record(dir / "r.bin", r);
    save_record(dir / "r.txt", r);
    CHECK(load_record(dir / "r.bin").s21 == r.s21);
    CHECK(load_record(dir / "r.txt").s21 == r.s21);
    std::filesystem::remove_all(dir);

    try
    {
        record_from_text("# bira-record v1\n# columns: frequency_Hz re im\n2e9 1 0\n2.01e9 x 0\n");
        FAIL("expected a parse error");
    }
    catch (const ParseError &e)
    {
        CHECK(e.line() == 4);
    }
    CHECK_THROWS_AS(FrequencyGrid::from_range(2e9, 3e9, 3e8), ConfigError);
    CHECK(FrequencyGrid::from_range(2e9, 3e9, 1e8).count == 11);
}

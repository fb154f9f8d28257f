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

#ifndef BIRA_DSP_HPP
#define BIRA_DSP_HPP

#include "bira/record.hpp"
#include "bira/scattering.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace bira
{
    struct SweepConfig
    {
        double f_start = 2e9;
        double f_stop = 18e9;
        double f_step = 10e6;
        Window window = Window::Hann;
        std::optional<double> noise_floor_db; // per point, dB re |S21| = 1

        FrequencyGrid grid() const { return FrequencyGrid::from_range(f_start, f_stop, f_step); }
        double unambiguous_span() const { return kSpeedOfLight / f_step; }
        double resolution() const { return kSpeedOfLight / (f_stop - f_start); }
    };

    // Discrete echo of the antenna transfer function at a path-length offset.
    struct KernelEcho
    {
        double offset = 0.0; // m, relative to the direct path
        cdouble amplitude;
    };

    // Additive path present with and without the target (room clutter).
    struct BackgroundPath
    {
        double length = 0.0; // m, absolute Tx -> Rx path length
        cdouble amplitude;   // dimensionless transfer
    };

    struct InstrumentModel
    {
        std::vector<KernelEcho> echoes;
        // Diffuse tail: random echoes with an exponential envelope starting
        // after the direct path.
        double tail_level_db = -200.0; // envelope at the tail start
        double tail_start = 0.02;      // m
        double tail_decay = 0.15;      // m per 1/e in amplitude
        int tail_taps = 0;
        std::uint64_t tail_seed = 1;
        std::vector<BackgroundPath> background;

        static InstrumentModel ideal() { return {}; }
        // Flange (+0.2811 m), radial positioner (+1.2741 m) and gantry double
        // bounce (+12 m) echoes, a diffuse tail and two clutter paths.
        static InstrumentModel facility();

        std::vector<KernelEcho> kernel_taps() const;
        cdouble kernel(double frequency) const;
    };

    // K(f) * (scene + background) + noise, noise seeded by `seed`.
    TransferRecord synthesize_sweep(const Scene &scene, const BistaticConstellation &c, const SweepConfig &cfg,
                                    const InstrumentModel &instrument, std::uint64_t seed = 0);

    // Anti-parallel probes at distance `distance` without target: K(f) e^{-jkd}/d.
    TransferRecord synthesize_thru(const SweepConfig &cfg, const InstrumentModel &instrument, double distance,
                                   std::uint64_t seed = 0);

    TransferRecord background_subtract(const TransferRecord &dut, const TransferRecord &bg);

    struct ImpulseOptions
    {
        Window window = Window::Hann;
        std::size_t zero_pad = 1;  // tap count = zero_pad * point count
        double reference = 0.0;    // path length mapped to zero, m
        double axis_start = 0.0;   // first tap, m relative to the reference
    };

    // Windowed inverse transform h(L) = sum_k w_k S_k e^{j 2 pi f_k L / c} / sum_k w_k
    // on L = reference + axis_start + n * bin. A unit path at L0 gives h(L0) = 1.
    struct ImpulseResponse
    {
        FrequencyGrid grid;
        ImpulseOptions options;
        std::vector<cdouble> taps;
        BistaticConstellation constellation;
        double time = 0.0;
        std::string label;

        double bin() const { return kSpeedOfLight / (static_cast<double>(taps.size()) * grid.step); }
        double resolution() const { return kSpeedOfLight / grid.bandwidth(); }
        double span() const { return kSpeedOfLight / grid.step; }
        // Relative to the reference.
        double path_length(std::size_t n) const;
        std::size_t peak_index() const;
    };

    ImpulseResponse to_impulse_response(const TransferRecord &r, const ImpulseOptions &opt = {});
    // Exact inverse when the window has no zeros (rect); taps beyond the
    // record's band are discarded.
    TransferRecord from_impulse_response(const ImpulseResponse &ir);

    struct GateOptions
    {
        double center = 0.0;  // m, relative to the reference
        double width = 2.0;   // m, flat part
        double rolloff = 0.1; // m, raised-cosine edge on each side
        Window shape = Window::Rect; // hann: a Hann taper over the full width, no flat part
        double reference = 0.0;
    };

    // Gate weight at path length x (relative to the reference).
    double gate_weight(const GateOptions &g, double x, double span);

    TransferRecord time_gate(const TransferRecord &r, const GateOptions &g);

    class CalibrationHoleError : public Error
    {
    public:
        CalibrationHoleError(std::vector<double> frequencies, const std::string &message)
            : Error("calibration", message), frequencies_(std::move(frequencies)) {}
        const std::vector<double> &frequencies() const noexcept { return frequencies_; }

    private:
        std::vector<double> frequencies_;
    };

    struct RcsResult
    {
        FrequencyGrid grid;
        BistaticConstellation constellation;
        double beta = 0.0;                // deg
        std::vector<double> sigma;        // m^2
        std::vector<double> sigma_cal;    // m^2
        std::vector<double> reflectivity; // |S21_dut|^2

        std::vector<double> sigma_dbsm() const;
    };

    // sigma_dut = |S_dut|^2 / |S_cal|^2 * sigma_cal per frequency. Points with
    // |S_cal| below hole_threshold_db relative to the median raise
    // CalibrationHoleError.
    RcsResult calibrate_rcs(const TransferRecord &dut, const TransferRecord &cal, const std::vector<double> &sigma_cal,
                            double hole_threshold_db = -40.0);

    // Bistatic RCS of a reference sphere at the record's constellation,
    // including both probe polarizations.
    std::vector<double> reference_sphere_rcs(double radius, const FrequencyGrid &grid, const BistaticConstellation &c);

    struct AntennaKernel
    {
        TransferRecord response; // normalized to the direct path
        GateOptions gate;
        double los_length = 0.0;
    };

    AntennaKernel extract_antenna_response(const TransferRecord &thru, double los_length, const GateOptions &gate = {0.0, 0.6, 0.1, Window::Rect, 0.0});

    struct DeconvolutionResult
    {
        TransferRecord record;
        std::vector<std::string> warnings;
        std::size_t weak_points = 0; // |K|^2 below epsilon * peak
    };

    DeconvolutionResult deconvolve_antenna(const TransferRecord &r, const AntennaKernel &kernel, double epsilon = 1e-6);

    // OFDM ---------------------------------------------------------------------

    struct OfdmParams
    {
        double f_center = 12e9;
        double bandwidth = 2e9;
        std::size_t subcarriers = 256;
        std::size_t cyclic_prefix = 64;

        double spacing() const { return bandwidth / static_cast<double>(subcarriers); }
        double sample_rate() const { return bandwidth; }
        double symbol_duration() const
        {
            return static_cast<double>(subcarriers + cyclic_prefix) / sample_rate();
        }
        // Subcarrier k sits at f_center + (k - N/2) * spacing.
        FrequencyGrid grid() const;
        void validate() const;
    };

    // Unit-modulus QPSK pilots on every subcarrier.
    std::vector<cdouble> qpsk_symbol(std::size_t n, std::uint64_t seed);

    // Time samples (prefix then N useful samples) of x[n] = sum_k X_k e^{j 2 pi k n / N}.
    std::vector<cdouble> ofdm_modulate(const std::vector<cdouble> &symbol, const OfdmParams &p);

    struct ChannelPath
    {
        double length = 0.0; // m
        cdouble amplitude;   // complex gain excluding the carrier phase
    };

    // H(f) = sum amplitude * e^{-j 2 pi f L / c}.
    cdouble channel_transfer(const std::vector<ChannelPath> &paths, double frequency);

    // Received baseband samples of consecutive symbols through the channel.
    // Delays longer than the prefix pick up the previous symbol. Noise has
    // variance noise_variance per complex sample.
    std::vector<std::vector<cdouble>> ofdm_propagate(const std::vector<std::vector<cdouble>> &symbols,
                                                     const std::vector<ChannelPath> &paths, const OfdmParams &p,
                                                     double noise_variance = 0.0, std::uint64_t seed = 0);

    struct OfdmEstimate
    {
        TransferRecord record;
        double outside_energy_fraction = 0.0; // impulse-response energy beyond the prefix
        std::vector<std::string> warnings;
    };

    // Least-squares per-subcarrier estimate Y_k / X_k after prefix removal.
    OfdmEstimate ofdm_channel_estimate(const std::vector<cdouble> &tx_symbol, const std::vector<cdouble> &rx_samples,
                                       const OfdmParams &p, double prefix_warning_db = -30.0);

    // Range-Doppler ------------------------------------------------------------

    struct RangeDopplerOptions
    {
        Window range_window = Window::Hann;
        Window doppler_window = Window::Hann;
        double reference = 0.0;
        double axis_start = 0.0;
        bool remove_static = false; // subtract the slow-time mean per range bin
    };

    struct RangeDopplerMap
    {
        std::vector<double> path_length; // rows, m relative to the reference
        std::vector<double> range_rate;  // columns, m/s, ascending
        std::vector<double> magnitude;   // row-major |X|
        double pixel_range = 0.0;        // c / (N * step), the occupied bandwidth of N subcarriers
        double pixel_rate = 0.0;         // lambda_c / CPI
        double cpi = 0.0;                // s
        double period = 0.0;             // s
        double frame_time = 0.0;         // s, first record time
        double f_center = 0.0;

        double at(std::size_t i, std::size_t j) const { return magnitude[i * range_rate.size() + j]; }
        double max_rate() const { return range_rate.empty() ? 0.0 : -range_rate.front(); }
    };

    // Slow-time records must be uniformly spaced in time. Range rate is
    // d/dt (d_tx + d_rx) = -f_D * lambda_c.
    RangeDopplerMap range_doppler(const std::vector<TransferRecord> &records, double f_center,
                                  const RangeDopplerOptions &opt = {});

    // CPI giving the requested range-rate pixel at f_center.
    double cpi_for_pixel(double f_center, double pixel_rate);

    struct MapPeak
    {
        std::size_t row = 0, col = 0;
        double path_length = 0.0;
        double range_rate = 0.0;
        double level_db = 0.0;      // relative to the map maximum
        double rate_extent = 0.0;   // m/s, contiguous -6 dB width along the rate axis
    };

    // Local maxima (8-neighbourhood) above threshold_db relative to the map
    // maximum, strongest first, suppressing weaker peaks within min_separation
    // pixels (Chebyshev distance).
    std::vector<MapPeak> find_peaks(const RangeDopplerMap &m, double threshold_db = -20.0,
                                    std::size_t min_separation = 2);

    std::string range_doppler_to_csv(const RangeDopplerMap &m);

    // Periodic OFDM illumination of a moving scene: one pilot symbol per
    // slow-time period, least-squares estimates, one map per frame.
    struct MicroDopplerConfig
    {
        OfdmParams ofdm;
        double pixel_rate = 0.25;   // m/s, fixes the CPI through cpi_for_pixel
        std::size_t periods = 128;  // slow-time periods per CPI
        double frame_interval = 0.1; // s between frame starts
        std::size_t frames = 8;
        double start_time = 0.0;
        double noise_variance = 0.0; // per complex sample
        std::uint64_t seed = 0;
        RangeDopplerOptions processing{Window::Hann, Window::Hann, 0.0, -2.0, true};

        double cpi() const { return cpi_for_pixel(ofdm.f_center, pixel_rate); }
        double period() const { return cpi() / static_cast<double>(periods); }
        void validate() const;
    };

    struct MicroDopplerResult
    {
        std::vector<RangeDopplerMap> frames;
        std::vector<std::string> warnings;
    };

    // Processing reference defaults to the nominal path r_ill + r_obs.
    MicroDopplerResult simulate_micro_doppler(const Scene &scene, const BistaticConstellation &c,
                                              const MicroDopplerConfig &cfg);
}

#endif

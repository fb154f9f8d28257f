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

#include "bira/dsp.hpp"
#include "bira/fft.hpp"
#include "bira/io.hpp"

#include <algorithm>
#include <random>
#include <set>
#include <sstream>

namespace bira
{
    namespace
    {
        double wavenumber(double f)
        {
            return 2.0 * kPi * f / kSpeedOfLight;
        }

        cdouble propagation(double f, double length)
        {
            return std::polar(1.0, -wavenumber(f) * length);
        }

        void add_noise(TransferRecord &r, std::optional<double> floor_db, std::uint64_t seed)
        {
            if (!floor_db)
                return;
            std::mt19937_64 rng(seed);
            std::normal_distribution<double> normal(0.0, std::sqrt(from_db10(*floor_db) / 2.0));
            for (auto &v : r.s21)
                v += cdouble(normal(rng), normal(rng));
        }

        double sum(const std::vector<double> &v)
        {
            double s = 0.0;
            for (double x : v)
                s += x;
            return s;
        }
    }

    InstrumentModel InstrumentModel::facility()
    {
        InstrumentModel m;
        m.echoes = {{0.2811, std::polar(from_db20(-22.0), 0.7)},
                    {1.2741, std::polar(from_db20(-28.0), -1.9)},
                    {12.0, std::polar(from_db20(-18.0), 2.4)}};
        m.tail_level_db = -30.0;
        m.tail_start = 0.02;
        m.tail_decay = 0.08;
        m.tail_taps = 40;
        m.tail_seed = 7;
        m.background = {{7.9, std::polar(from_db20(-55.0), 0.3)}, {10.4, std::polar(from_db20(-60.0), 2.0)}};
        return m;
    }

    std::vector<KernelEcho> InstrumentModel::kernel_taps() const
    {
        std::vector<KernelEcho> taps = echoes;
        if (tail_taps > 0)
        {
            std::mt19937_64 rng(tail_seed);
            std::uniform_real_distribution<double> unit(0.0, 1.0);
            const double level = from_db20(tail_level_db);
            const double span = 5.0 * tail_decay;
            for (int i = 0; i < tail_taps; ++i)
            {
                const double x = tail_start + span * (i + unit(rng)) / tail_taps;
                const double a = level * std::exp(-(x - tail_start) / tail_decay) * (0.5 + unit(rng));
                taps.push_back({x, std::polar(a, 2.0 * kPi * unit(rng))});
            }
        }
        return taps;
    }

    cdouble InstrumentModel::kernel(double f) const
    {
        cdouble k = 1.0;
        for (const auto &e : kernel_taps())
            k += e.amplitude * propagation(f, e.offset);
        return k;
    }

    namespace
    {
        std::vector<cdouble> kernel_values(const InstrumentModel &m, const FrequencyGrid &grid)
        {
            const auto taps = m.kernel_taps();
            std::vector<cdouble> k(grid.count, 1.0);
            for (std::size_t i = 0; i < grid.count; ++i)
                for (const auto &e : taps)
                    k[i] += e.amplitude * propagation(grid.at(i), e.offset);
            return k;
        }
    }

    TransferRecord synthesize_sweep(const Scene &scene, const BistaticConstellation &c, const SweepConfig &cfg,
                                    const InstrumentModel &instrument, std::uint64_t seed)
    {
        const FrequencyGrid grid = cfg.grid();
        TransferRecord r = scene_response(scene, c, grid);
        const auto k = kernel_values(instrument, grid);
        for (std::size_t i = 0; i < grid.count; ++i)
        {
            cdouble bg = 0.0;
            for (const auto &b : instrument.background)
                bg += b.amplitude * propagation(grid.at(i), b.length);
            r.s21[i] = k[i] * (r.s21[i] + bg);
        }
        add_noise(r, cfg.noise_floor_db, seed);
        return r;
    }

    TransferRecord synthesize_thru(const SweepConfig &cfg, const InstrumentModel &instrument, double distance,
                                   std::uint64_t seed)
    {
        if (!(distance > 0.0))
            throw ConfigError("thru distance must be positive");
        TransferRecord r;
        r.grid = cfg.grid();
        r.label = "thru";
        const auto k = kernel_values(instrument, r.grid);
        r.s21.resize(r.grid.count);
        for (std::size_t i = 0; i < r.grid.count; ++i)
            r.s21[i] = k[i] * propagation(r.grid.at(i), distance) / distance;
        add_noise(r, cfg.noise_floor_db, seed);
        return r;
    }

    TransferRecord background_subtract(const TransferRecord &dut, const TransferRecord &bg)
    {
        require_compatible(dut, bg);
        TransferRecord r = dut;
        for (std::size_t i = 0; i < r.size(); ++i)
            r.s21[i] -= bg.s21[i];
        return r;
    }

    // Impulse response -----------------------------------------------------------

    double ImpulseResponse::path_length(std::size_t n) const
    {
        return options.axis_start + static_cast<double>(n) * bin();
    }

    std::size_t ImpulseResponse::peak_index() const
    {
        std::size_t best = 0;
        for (std::size_t i = 1; i < taps.size(); ++i)
            if (std::abs(taps[i]) > std::abs(taps[best]))
                best = i;
        return best;
    }

    ImpulseResponse to_impulse_response(const TransferRecord &r, const ImpulseOptions &opt)
    {
        r.validate();
        if (opt.zero_pad < 1)
            throw ConfigError("zero_pad must be >= 1");
        const std::size_t n = r.size(), m = n * opt.zero_pad;
        const auto w = make_window(opt.window, n);
        const double gain = sum(w);
        if (!(gain > 0.0))
            throw ConfigError("window has no energy for " + std::to_string(n) + " points");
        const double shift = opt.reference + opt.axis_start;
        std::vector<cdouble> x(m, 0.0);
        for (std::size_t k = 0; k < n; ++k)
            x[k] = w[k] * r.s21[k] * std::polar(1.0, wavenumber(r.grid.at(k)) * shift);
        std::vector<cdouble> h = idft(x);
        ImpulseResponse ir;
        ir.grid = r.grid;
        ir.options = opt;
        ir.constellation = r.constellation;
        ir.time = r.time;
        ir.label = r.label;
        const double bin = kSpeedOfLight / (static_cast<double>(m) * r.grid.step);
        for (std::size_t i = 0; i < m; ++i)
            h[i] *= std::polar(1.0 / gain, wavenumber(r.grid.start) * static_cast<double>(i) * bin);
        ir.taps = std::move(h);
        return ir;
    }

    TransferRecord from_impulse_response(const ImpulseResponse &ir)
    {
        const std::size_t n = ir.grid.count, m = ir.taps.size();
        if (m < n || m % n != 0)
            throw ConfigError("impulse response length does not match its grid");
        const auto w = make_window(ir.options.window, n);
        const double gain = sum(w);
        const double bin = ir.bin();
        std::vector<cdouble> h(m);
        for (std::size_t i = 0; i < m; ++i)
            h[i] = ir.taps[i] * std::polar(gain, -wavenumber(ir.grid.start) * static_cast<double>(i) * bin);
        const std::vector<cdouble> x = dft(h);
        TransferRecord r;
        r.grid = ir.grid;
        r.constellation = ir.constellation;
        r.time = ir.time;
        r.label = ir.label;
        r.s21.resize(n);
        const double shift = ir.options.reference + ir.options.axis_start;
        for (std::size_t k = 0; k < n; ++k)
        {
            if (w[k] <= 0.0)
                throw ConfigError("window has zeros; impulse response cannot be inverted");
            r.s21[k] = x[k] / static_cast<double>(m) * std::polar(1.0 / w[k], -wavenumber(r.grid.at(k)) * shift);
        }
        return r;
    }

    double gate_weight(const GateOptions &g, double x, double span)
    {
        double d = std::fmod(x - g.center, span);
        if (d < -span / 2.0)
            d += span;
        if (d >= span / 2.0)
            d -= span;
        const double a = std::abs(d), half = g.width / 2.0;
        if (g.shape == Window::Hann)
            return a <= half ? std::pow(std::cos(kPi * d / g.width), 2) : 0.0;
        if (a <= half)
            return 1.0;
        if (g.rolloff > 0.0 && a < half + g.rolloff)
            return 0.5 * (1.0 + std::cos(kPi * (a - half) / g.rolloff));
        return 0.0;
    }

    TransferRecord time_gate(const TransferRecord &r, const GateOptions &g)
    {
        const double span = kSpeedOfLight / r.grid.step;
        if (!(g.width > 0.0) || !(g.rolloff >= 0.0) || !std::isfinite(g.center))
            throw ConfigError("gate width must be positive and roll-off non-negative");
        const double extent = g.width + (g.shape == Window::Rect ? 2.0 * g.rolloff : 0.0);
        if (extent > span * (1.0 + 1e-12))
            throw ConfigError("gate extent " + format_double(extent) + " m exceeds the unambiguous span " +
                              format_double(span) + " m");
        ImpulseOptions opt;
        opt.window = Window::Rect;
        opt.reference = g.reference;
        ImpulseResponse ir = to_impulse_response(r, opt);
        for (std::size_t i = 0; i < ir.taps.size(); ++i)
            ir.taps[i] *= gate_weight(g, ir.path_length(i), span);
        return from_impulse_response(ir);
    }

    // Calibration ----------------------------------------------------------------

    std::vector<double> RcsResult::sigma_dbsm() const
    {
        std::vector<double> out(sigma.size());
        for (std::size_t i = 0; i < sigma.size(); ++i)
            out[i] = db10(sigma[i]);
        return out;
    }

    RcsResult calibrate_rcs(const TransferRecord &dut, const TransferRecord &cal, const std::vector<double> &sigma_cal,
                            double hole_threshold_db)
    {
        require_compatible(dut, cal);
        if (sigma_cal.size() != cal.size())
            throw ConfigError("sigma_cal length differs from the record length");
        std::vector<double> mags(cal.size());
        for (std::size_t i = 0; i < cal.size(); ++i)
            mags[i] = std::abs(cal.s21[i]);
        std::vector<double> sorted = mags;
        std::nth_element(sorted.begin(), sorted.begin() + static_cast<std::ptrdiff_t>(sorted.size() / 2), sorted.end());
        const double limit = sorted[sorted.size() / 2] * from_db20(hole_threshold_db);
        std::vector<double> holes;
        for (std::size_t i = 0; i < cal.size(); ++i)
            if (!(mags[i] >= limit) || mags[i] == 0.0)
                holes.push_back(cal.grid.at(i));
        if (!holes.empty())
        {
            std::ostringstream os;
            os << holes.size() << " calibration hole(s) below " << format_double(hole_threshold_db)
               << " dB of the median, first at " << format_double(holes.front()) << " Hz";
            throw CalibrationHoleError(holes, os.str());
        }
        RcsResult res;
        res.grid = dut.grid;
        res.constellation = dut.constellation;
        res.beta = bistatic_angle(dut.constellation);
        res.sigma_cal = sigma_cal;
        res.sigma.resize(dut.size());
        res.reflectivity.resize(dut.size());
        for (std::size_t i = 0; i < dut.size(); ++i)
        {
            res.reflectivity[i] = std::norm(dut.s21[i]);
            res.sigma[i] = res.reflectivity[i] / std::norm(cal.s21[i]) * sigma_cal[i];
        }
        return res;
    }

    std::vector<double> reference_sphere_rcs(double radius, const FrequencyGrid &grid, const BistaticConstellation &c)
    {
        const ProbeGeometry p = probes_from_constellation(c);
        std::vector<double> out(grid.count);
        for (std::size_t i = 0; i < grid.count; ++i)
            out[i] = 4.0 * kPi * std::norm(mie_scattering_length(radius, grid.at(i), -p.tx, p.rx, p.pol_tx, p.pol_rx));
        return out;
    }

    AntennaKernel extract_antenna_response(const TransferRecord &thru, double los_length, const GateOptions &gate)
    {
        if (!(los_length > 0.0))
            throw ConfigError("LOS length must be positive");
        TransferRecord normalized = thru;
        for (std::size_t i = 0; i < thru.size(); ++i)
            normalized.s21[i] *= los_length * std::polar(1.0, wavenumber(thru.grid.at(i)) * los_length);
        AntennaKernel k;
        k.gate = gate;
        k.gate.reference = 0.0;
        k.los_length = los_length;
        k.response = time_gate(normalized, k.gate);
        k.response.label = "antenna kernel";
        return k;
    }

    DeconvolutionResult deconvolve_antenna(const TransferRecord &r, const AntennaKernel &kernel, double epsilon)
    {
        require_compatible(r, kernel.response, false);
        if (!(epsilon >= 0.0) || !std::isfinite(epsilon))
            throw ConfigError("epsilon must be non-negative");
        double peak = 0.0;
        for (const auto &v : kernel.response.s21)
            peak = std::max(peak, std::norm(v));
        if (!(peak > 0.0))
            throw ConfigError("antenna kernel is identically zero");
        const double reg = epsilon * peak;
        DeconvolutionResult out;
        out.record = r;
        for (std::size_t i = 0; i < r.size(); ++i)
        {
            const cdouble k = kernel.response.s21[i];
            if (std::norm(k) < reg)
                ++out.weak_points;
            const double denom = std::norm(k) + reg;
            out.record.s21[i] = denom > 0.0 ? r.s21[i] * std::conj(k) / denom : 0.0;
        }
        if (out.weak_points > 0)
            out.warnings.push_back(std::to_string(out.weak_points) +
                                   " frequency point(s) with |K|^2 below the regularization level");
        return out;
    }

    // OFDM -------------------------------------------------------------------------

    FrequencyGrid OfdmParams::grid() const
    {
        return {f_center - bandwidth / 2.0, spacing(), subcarriers};
    }

    void OfdmParams::validate() const
    {
        if (subcarriers < 2 || subcarriers % 2 != 0)
            throw ConfigError("subcarrier count must be even and >= 2");
        if (cyclic_prefix >= subcarriers)
            throw ConfigError("cyclic prefix must be shorter than the symbol");
        if (!(bandwidth > 0.0) || !(f_center > bandwidth / 2.0))
            throw ConfigError("OFDM band must be positive and above DC");
    }

    std::vector<cdouble> qpsk_symbol(std::size_t n, std::uint64_t seed)
    {
        std::mt19937_64 rng(seed);
        std::uniform_int_distribution<int> q(0, 3);
        std::vector<cdouble> x(n);
        for (auto &v : x)
            v = std::polar(1.0, kPi / 4.0 + kPi / 2.0 * q(rng));
        return x;
    }

    namespace
    {
        // x[n] = sum_k X_k e^{j 2 pi (k - N/2) n / N}, n < N.
        std::vector<cdouble> baseband(const std::vector<cdouble> &symbol)
        {
            std::vector<cdouble> x = idft(symbol);
            for (std::size_t n = 1; n < x.size(); n += 2)
                x[n] = -x[n];
            return x;
        }
    }

    std::vector<cdouble> ofdm_modulate(const std::vector<cdouble> &symbol, const OfdmParams &p)
    {
        p.validate();
        if (symbol.size() != p.subcarriers)
            throw ConfigError("symbol length differs from the subcarrier count");
        const std::vector<cdouble> x = baseband(symbol);
        std::vector<cdouble> out(x.end() - static_cast<std::ptrdiff_t>(p.cyclic_prefix), x.end());
        out.insert(out.end(), x.begin(), x.end());
        return out;
    }

    cdouble channel_transfer(const std::vector<ChannelPath> &paths, double f)
    {
        cdouble h = 0.0;
        for (const auto &q : paths)
            h += q.amplitude * propagation(f, q.length);
        return h;
    }

    std::vector<std::vector<cdouble>> ofdm_propagate(const std::vector<std::vector<cdouble>> &symbols,
                                                     const std::vector<ChannelPath> &paths, const OfdmParams &p,
                                                     double noise_variance, std::uint64_t seed)
    {
        p.validate();
        const std::size_t n = p.subcarriers, cp = p.cyclic_prefix;
        const double fs = p.sample_rate(), t_cp = static_cast<double>(cp) / fs, df = p.spacing();
        for (const auto &s : symbols)
            if (s.size() != n)
                throw ConfigError("symbol length differs from the subcarrier count");
        std::vector<std::vector<cdouble>> rx(symbols.size(), std::vector<cdouble>(n + cp, 0.0));
        for (const auto &path : paths)
        {
            const double tau = path.length / kSpeedOfLight;
            if (tau < 0.0)
                throw ConfigError("path length must be non-negative");
            if (tau > static_cast<double>(n) / fs)
                throw ConfigError("path delay exceeds one symbol");
            const cdouble gain = path.amplitude * std::polar(1.0, -2.0 * kPi * p.f_center * tau);
            for (std::size_t s = 0; s < symbols.size(); ++s)
            {
                // Current symbol delayed by tau; the previous one delayed by
                // tau - T_cp lands in samples earlier than the prefix allows.
                const std::vector<cdouble> &prev = symbols[(s + symbols.size() - 1) % symbols.size()];
                std::vector<cdouble> a(n), b(n);
                for (std::size_t k = 0; k < n; ++k)
                {
                    const double fb = (static_cast<double>(k) - static_cast<double>(n) / 2.0) * df;
                    a[k] = symbols[s][k] * std::polar(1.0, -2.0 * kPi * fb * tau);
                    b[k] = prev[k] * std::polar(1.0, -2.0 * kPi * fb * (tau - t_cp));
                }
                const auto cur = baseband(a), old = baseband(b);
                for (std::size_t m = 0; m < n + cp; ++m)
                {
                    const double t = (static_cast<double>(m) - static_cast<double>(cp)) / fs;
                    const std::size_t idx = (m + n - cp) % n;
                    rx[s][m] += gain * (t - tau >= -t_cp - 1e-15 ? cur[idx] : old[idx]);
                }
            }
        }
        if (noise_variance > 0.0)
        {
            std::mt19937_64 rng(seed);
            std::normal_distribution<double> normal(0.0, std::sqrt(noise_variance / 2.0));
            for (auto &sym : rx)
                for (auto &v : sym)
                    v += cdouble(normal(rng), normal(rng));
        }
        return rx;
    }

    OfdmEstimate ofdm_channel_estimate(const std::vector<cdouble> &tx_symbol, const std::vector<cdouble> &rx_samples,
                                       const OfdmParams &p, double prefix_warning_db)
    {
        p.validate();
        const std::size_t n = p.subcarriers, cp = p.cyclic_prefix;
        if (tx_symbol.size() != n)
            throw ConfigError("pilot symbol length differs from the subcarrier count");
        if (rx_samples.size() != n + cp)
            throw ConfigError("received block must hold prefix plus symbol samples");
        std::vector<cdouble> y(rx_samples.begin() + static_cast<std::ptrdiff_t>(cp), rx_samples.end());
        for (std::size_t i = 1; i < n; i += 2)
            y[i] = -y[i];
        const std::vector<cdouble> yk = dft(y);
        OfdmEstimate est;
        est.record.grid = p.grid();
        est.record.s21.resize(n);
        for (std::size_t k = 0; k < n; ++k)
        {
            if (std::abs(tx_symbol[k]) == 0.0)
                throw ConfigError("pilot grid has an empty subcarrier");
            est.record.s21[k] = yk[k] / static_cast<double>(n) / tx_symbol[k];
        }

        // Delay profile over the symbol: taps past the prefix (plus the Hann
        // main-lobe width) indicate delays the prefix does not cover.
        const auto w = make_window(Window::Hann, n);
        std::vector<cdouble> hk(n);
        for (std::size_t k = 0; k < n; ++k)
            hk[k] = w[k] * est.record.s21[k];
        const auto h = idft(hk);
        double total = 0.0, outside = 0.0;
        for (std::size_t i = 0; i < n; ++i)
        {
            const double e = std::norm(h[i]);
            total += e;
            if (i >= cp + 2 && i < n - 2)
                outside += e;
        }
        est.outside_energy_fraction = total > 0.0 ? outside / total : 0.0;
        if (total > 0.0 && est.outside_energy_fraction > from_db10(prefix_warning_db))
        {
            std::ostringstream os;
            os << "cyclic prefix violation: " << format_double(db10(est.outside_energy_fraction))
               << " dB of the delay-profile energy lies beyond the prefix";
            est.warnings.push_back(os.str());
        }
        return est;
    }

    // Range-Doppler ----------------------------------------------------------------

    double cpi_for_pixel(double f_center, double pixel_rate)
    {
        return kSpeedOfLight / f_center / pixel_rate;
    }

    RangeDopplerMap range_doppler(const std::vector<TransferRecord> &records, double f_center,
                                  const RangeDopplerOptions &opt)
    {
        if (records.size() < 2)
            throw ConfigError("range-Doppler processing needs at least two records");
        if (!(f_center > 0.0))
            throw ConfigError("carrier frequency must be positive");
        const std::size_t m = records.size();
        const double period = (records.back().time - records.front().time) / static_cast<double>(m - 1);
        if (!(period > 0.0))
            throw ConfigError("record times must ascend");
        for (std::size_t i = 0; i < m; ++i)
        {
            require_compatible(records[0], records[i], false);
            const double expect = records.front().time + static_cast<double>(i) * period;
            if (std::abs(records[i].time - expect) > 1e-6 * period)
                throw ConfigError("slow-time records are not uniformly spaced (record " + std::to_string(i) + ")");
        }
        ImpulseOptions io;
        io.window = opt.range_window;
        io.reference = opt.reference;
        io.axis_start = opt.axis_start;
        std::vector<ImpulseResponse> irs;
        irs.reserve(m);
        for (const auto &r : records)
            irs.push_back(to_impulse_response(r, io));
        const std::size_t rows = irs[0].taps.size();
        const auto w = make_window(opt.doppler_window, m);
        const double gain = sum(w);
        const double lambda = kSpeedOfLight / f_center;

        RangeDopplerMap map;
        map.f_center = f_center;
        map.period = period;
        map.cpi = period * static_cast<double>(m);
        map.pixel_range = kSpeedOfLight / (static_cast<double>(records[0].size()) * records[0].grid.step);
        map.pixel_rate = lambda / map.cpi;
        map.frame_time = records.front().time;
        map.path_length.resize(rows);
        for (std::size_t i = 0; i < rows; ++i)
            map.path_length[i] = irs[0].path_length(i);
        map.range_rate.resize(m);
        const std::ptrdiff_t half = static_cast<std::ptrdiff_t>(m / 2);
        for (std::size_t j = 0; j < m; ++j)
            map.range_rate[j] = static_cast<double>(static_cast<std::ptrdiff_t>(j) - half) * map.pixel_rate;
        map.magnitude.assign(rows * m, 0.0);
        std::vector<cdouble> slow(m);
        for (std::size_t i = 0; i < rows; ++i)
        {
            cdouble mean = 0.0;
            if (opt.remove_static)
            {
                for (std::size_t s = 0; s < m; ++s)
                    mean += irs[s].taps[i];
                mean /= static_cast<double>(m);
            }
            for (std::size_t s = 0; s < m; ++s)
                slow[s] = w[s] * (irs[s].taps[i] - mean);
            const auto x = dft(slow);
            for (std::size_t j = 0; j < m; ++j)
            {
                // Rate r corresponds to f_D = -r / lambda, the DFT bin (half - j) mod m.
                const std::ptrdiff_t k = ((half - static_cast<std::ptrdiff_t>(j)) % static_cast<std::ptrdiff_t>(m) +
                                          static_cast<std::ptrdiff_t>(m)) % static_cast<std::ptrdiff_t>(m);
                map.magnitude[i * m + j] = std::abs(x[static_cast<std::size_t>(k)]) / gain;
            }
        }
        return map;
    }

    std::vector<MapPeak> find_peaks(const RangeDopplerMap &m, double threshold_db, std::size_t min_separation)
    {
        const std::size_t rows = m.path_length.size(), cols = m.range_rate.size();
        double top = 0.0;
        for (double v : m.magnitude)
            top = std::max(top, v);
        std::vector<MapPeak> cand;
        if (!(top > 0.0))
            return cand;
        const double floor = top * from_db20(threshold_db);
        for (std::size_t i = 0; i < rows; ++i)
            for (std::size_t j = 0; j < cols; ++j)
            {
                const double v = m.at(i, j);
                if (v < floor)
                    continue;
                bool is_max = true;
                for (int di = -1; di <= 1 && is_max; ++di)
                    for (int dj = -1; dj <= 1; ++dj)
                    {
                        if (di == 0 && dj == 0)
                            continue;
                        const std::size_t ii = (i + rows + static_cast<std::size_t>(di + static_cast<int>(rows))) % rows;
                        const std::size_t jj = static_cast<std::size_t>(static_cast<long>(j) + dj);
                        if (jj >= cols)
                            continue;
                        if (m.at(ii, jj) > v)
                        {
                            is_max = false;
                            break;
                        }
                    }
                if (!is_max)
                    continue;
                MapPeak p;
                p.row = i;
                p.col = j;
                p.path_length = m.path_length[i];
                p.range_rate = m.range_rate[j];
                p.level_db = db20(v / top);
                std::size_t lo = j, hi = j;
                while (lo > 0 && m.at(i, lo - 1) >= v / 2.0)
                    --lo;
                while (hi + 1 < cols && m.at(i, hi + 1) >= v / 2.0)
                    ++hi;
                p.rate_extent = static_cast<double>(hi - lo + 1) * m.pixel_rate;
                cand.push_back(p);
            }
        std::stable_sort(cand.begin(), cand.end(), [](const MapPeak &a, const MapPeak &b) { return a.level_db > b.level_db; });
        std::vector<MapPeak> out;
        for (const auto &c : cand)
        {
            bool near = false;
            for (const auto &o : out)
            {
                const std::size_t dr = std::min((c.row + rows - o.row) % rows, (o.row + rows - c.row) % rows);
                const std::size_t dc = c.col > o.col ? c.col - o.col : o.col - c.col;
                if (std::max(dr, dc) < min_separation)
                {
                    near = true;
                    break;
                }
            }
            if (!near)
                out.push_back(c);
        }
        return out;
    }

    std::string range_doppler_to_csv(const RangeDopplerMap &m)
    {
        std::ostringstream os;
        os << "# bira range-doppler map\n";
        os << "# frame_time_s " << format_double(m.frame_time) << "\n";
        os << "# f_center_Hz " << format_double(m.f_center) << "\n";
        os << "# cpi_s " << format_double(m.cpi) << "\n";
        os << "# period_s " << format_double(m.period) << "\n";
        os << "# pixel_range_m " << format_double(m.pixel_range) << "\n";
        os << "# pixel_rate_m_s " << format_double(m.pixel_rate) << "\n";
        os << "# rows: bistatic path length (m); columns: bistatic range rate (m/s); values: |X| linear\n";
        os << "path_length_m";
        for (double r : m.range_rate)
            os << ',' << format_double(r);
        os << "\n";
        for (std::size_t i = 0; i < m.path_length.size(); ++i)
        {
            os << format_double(m.path_length[i]);
            for (std::size_t j = 0; j < m.range_rate.size(); ++j)
                os << ',' << format_double(m.at(i, j));
            os << "\n";
        }
        return os.str();
    }

    void MicroDopplerConfig::validate() const
    {
        ofdm.validate();
        if (!(pixel_rate > 0.0))
            throw ConfigError("pixel_rate must be positive");
        if (periods < 2)
            throw ConfigError("at least two periods per CPI are required");
        if (frames < 1 || !(frame_interval > 0.0))
            throw ConfigError("frame count and interval must be positive");
        if (period() < ofdm.symbol_duration())
            throw ConfigError("slow-time period is shorter than one OFDM symbol");
        if (!(noise_variance >= 0.0))
            throw ConfigError("noise variance must be non-negative");
    }

    MicroDopplerResult simulate_micro_doppler(const Scene &scene, const BistaticConstellation &c,
                                              const MicroDopplerConfig &cfg)
    {
        cfg.validate();
        const ProbeGeometry probes = probes_from_constellation(c);
        const std::vector<cdouble> pilot = qpsk_symbol(cfg.ofdm.subcarriers, cfg.seed ^ 0x5eedULL);
        const double fc = cfg.ofdm.f_center, kc = wavenumber(fc);
        RangeDopplerOptions opt = cfg.processing;
        if (opt.reference == 0.0)
            opt.reference = c.r_ill + c.r_obs;
        MicroDopplerResult out;
        std::set<std::string> seen;
        for (std::size_t f = 0; f < cfg.frames; ++f)
        {
            std::vector<TransferRecord> records;
            for (std::size_t m = 0; m < cfg.periods; ++m)
            {
                const double t = cfg.start_time + static_cast<double>(f) * cfg.frame_interval +
                                 static_cast<double>(m) * cfg.period();
                std::vector<ChannelPath> channel;
                for (const auto &p : scene_paths(scene, probes, t, fc))
                    channel.push_back({p.length, p.transfer(fc) * std::polar(1.0, kc * p.length)});
                const auto rx = ofdm_propagate({pilot}, channel, cfg.ofdm, cfg.noise_variance,
                                               cfg.seed + 1000003ULL * f + m);
                OfdmEstimate est = ofdm_channel_estimate(pilot, rx[0], cfg.ofdm);
                for (const auto &w : est.warnings)
                    if (seen.insert(w).second)
                        out.warnings.push_back(w);
                est.record.time = t;
                est.record.constellation = c;
                records.push_back(std::move(est.record));
            }
            out.frames.push_back(range_doppler(records, fc, opt));
        }
        return out;
    }
}

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

// bira: batch entry points of the twin. See docs/cli.md for exit codes.

#include "bira/collision.hpp"
#include "bira/config.hpp"
#include "bira/dsp.hpp"
#include "bira/io.hpp"
#include "bira/motion.hpp"
#include "bira/pipeline.hpp"
#include "bira/service.hpp"
#include "bira/trajfile.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <csignal>
#include <filesystem>
#include <iomanip>
#include <iostream>
#include <sstream>

using namespace bira;

namespace
{
    enum Exit : int
    {
        kOk = 0,
        kRejected = 1,
        kUsage = 2,
        kInput = 3,
        kIo = 4,
        kDomain = 5,
        kInternal = 6
    };

    int exit_code_for(const std::string &kind)
    {
        if (kind == "parse" || kind == "format" || kind == "config")
            return kInput;
        if (kind == "io")
            return kIo;
        if (kind == "range" || kind == "reachability" || kind == "geometry" || kind == "calibration")
            return kDomain;
        return kInternal;
    }

    // --config, then $BIRA_CONFIG, then built-in defaults.
    SiteConfig site_config(const std::string &path)
    {
        if (!path.empty())
            return load_site_config(path);
        if (const char *env = std::getenv("BIRA_CONFIG"); env && *env)
            return load_site_config(env);
        SiteConfig s;
        s.validate();
        return s;
    }

    struct Range
    {
        double lo = 0.0, hi = 0.0, step = 1.0;
        std::vector<double> values() const
        {
            std::vector<double> out;
            const double n = std::floor((hi - lo) / step + 1e-9);
            for (double i = 0; i <= n; ++i)
                out.push_back(lo + i * step);
            return out;
        }
    };

    // "lo..hi" or "lo:hi:step".
    Range parse_range(const std::string &text, double default_step, const std::string &what)
    {
        Range r;
        r.step = default_step;
        try
        {
            if (const auto dots = text.find(".."); dots != std::string::npos)
            {
                r.lo = parse_double(text.substr(0, dots));
                r.hi = parse_double(text.substr(dots + 2));
            }
            else
            {
                const auto a = text.find(':'), b = text.rfind(':');
                if (a == std::string::npos || a == b)
                    throw std::invalid_argument("expected lo..hi or lo:hi:step");
                r.lo = parse_double(text.substr(0, a));
                r.hi = parse_double(text.substr(a + 1, b - a - 1));
                r.step = parse_double(text.substr(b + 1));
            }
        }
        catch (const std::invalid_argument &e)
        {
            throw ConfigError(what + " '" + text + "': " + e.what());
        }
        if (!(r.hi >= r.lo) || !(r.step > 0.0))
            throw ConfigError(what + " '" + text + "' must ascend with a positive step");
        return r;
    }

    Polarization polarization_arg(const std::string &name) { return polarization_from_name(name); }

    std::string csv_number(double v)
    {
        return std::isfinite(v) ? format_double(v) : (v > 0 ? "inf" : (v < 0 ? "-inf" : "nan"));
    }

    Service *g_service = nullptr;
    void on_signal(int)
    {
        if (g_service)
            g_service->stop();
    }
}

int main(int argc, char **argv)
{
    CLI::App app{"bira: bistatic positioner digital twin and measurement simulator"};
    app.require_subcommand(1);
    std::string config_path;
    app.add_option("--config", config_path, "Site configuration JSON (default: $BIRA_CONFIG, then built-in)");

    // table -------------------------------------------------------------------
    auto *table = app.add_subcommand("table", "Collision table tools");
    table->require_subcommand(1);
    auto *build = table->add_subcommand("build", "Generate a collision table");
    double step = 1.0;
    std::string out_path;
    unsigned threads = 0;
    build->add_option("--config", config_path, "Site configuration JSON");
    build->add_option("--step", step, "Grid step in degrees")->required();
    build->add_option("--out", out_path, "Output table file")->required();
    build->add_option("--threads", threads, "Worker threads (0 = all cores)");

    auto *slice = table->add_subcommand("slice", "Export a moving-azimuth slice as CSV");
    std::string table_path;
    double az = 0.0;
    slice->add_option("--table", table_path, "Collision table file")->required();
    slice->add_option("--az", az, "Moving azimuth in degrees")->required();
    slice->add_option("--out", out_path, "Output CSV")->required();

    // traj ----------------------------------------------------------------------
    auto *traj = app.add_subcommand("traj", "Trajectory tools");
    traj->require_subcommand(1);
    auto *verify = traj->add_subcommand("verify", "Verify a trajectory file");
    std::string traj_path, mode_name = "stepped", report_path;
    verify->add_option("--config", config_path, "Site configuration JSON");
    verify->add_option("--table", table_path, "Collision table file")->required();
    verify->add_option("--traj", traj_path, "Trajectory file")->required();
    verify->add_option("--mode", mode_name, "stepped or continuous")->check(CLI::IsMember({"stepped", "continuous"}));
    verify->add_option("--report", report_path, "Also write the report JSON to this file");

    // sim -----------------------------------------------------------------------
    auto *sim = app.add_subcommand("sim", "Measurement simulations (CSV output)");
    sim->require_subcommand(1);
    std::uint64_t seed = 1;
    std::string pol_name = "theta";

    auto *rcs = sim->add_subcommand("sphere-rcs", "Bistatic RCS cut: Mie and pipeline-recovered");
    double radius = 0.15, f_ghz = 6.0;
    std::string cut = "0:180:1";
    rcs->add_option("--radius", radius, "Sphere radius in m");
    rcs->add_option("--f", f_ghz, "Frequency in GHz (on the 2-18 GHz, 10 MHz sweep grid)");
    rcs->add_option("--cut", cut, "Bistatic angles lo:hi:step or lo..hi, degrees");
    rcs->add_option("--pol", pol_name, "theta or phi")->check(CLI::IsMember({"theta", "phi"}));
    rcs->add_option("--seed", seed, "Noise seed");
    rcs->add_option("--out", out_path, "Output CSV")->required();

    auto *imp = sim->add_subcommand("sphere-impresp", "Path-length x angle impulse-response magnitude");
    std::string band = "2..18";
    std::string imp_cut = "0:180:2";
    imp->add_option("--band", band, "Frequency band lo..hi in GHz");
    imp->add_option("--cut", imp_cut, "Bistatic angles lo:hi:step, degrees");
    imp->add_option("--pol", pol_name, "theta or phi")->check(CLI::IsMember({"theta", "phi"}));
    imp->add_option("--seed", seed, "Noise seed");
    imp->add_option("--out", out_path, "Output CSV")->required();

    auto *ud = sim->add_subcommand("udoppler", "Range-Doppler frames of a moving scene");
    std::string scene_path, out_dir;
    std::size_t frames = 8;
    double start = 0.0, interval = 0.1, theta_ill = 60.0, theta_obs = 65.0, phi_obs = 25.0, noise = 0.0;
    ud->add_option("--scene", scene_path, "Scene JSON")->required();
    ud->add_option("--frames", frames, "Number of frames");
    ud->add_option("--start", start, "First frame start time in s");
    ud->add_option("--interval", interval, "Time between frame starts in s");
    ud->add_option("--theta-ill", theta_ill, "Illuminator co-elevation in degrees");
    ud->add_option("--theta-obs", theta_obs, "Observer co-elevation in degrees");
    ud->add_option("--phi-obs", phi_obs, "Observer azimuth in degrees");
    ud->add_option("--noise", noise, "Noise variance per complex sample");
    ud->add_option("--seed", seed, "Noise seed");
    ud->add_option("--out", out_dir, "Output directory")->required();

    // serve ---------------------------------------------------------------------
    auto *serve = app.add_subcommand("serve", "Run the HTTP service");
    std::string host = "127.0.0.1", scenes_dir;
    int port = 8080;
    serve->add_option("--config", config_path, "Site configuration JSON");
    serve->add_option("--table", table_path, "Collision table file (omit to disable collision endpoints)");
    serve->add_option("--port", port, "TCP port");
    serve->add_option("--host", host, "Bind address");
    serve->add_option("--scenes", scenes_dir, "Directory of scene JSON files");

    try
    {
        app.parse(argc, argv);
    }
    catch (const CLI::CallForHelp &e)
    {
        return app.exit(e);
    }
    catch (const CLI::CallForAllHelp &e)
    {
        return app.exit(e);
    }
    catch (const CLI::ParseError &e)
    {
        std::cerr << "error: usage: " << e.what() << "\n";
        return kUsage;
    }

    try
    {
        if (*build)
        {
            const SiteConfig site = site_config(config_path);
            const TableGrids grids = TableGrids::from_limits(site.facility, step);
            const auto t0 = std::chrono::steady_clock::now();
            const CollisionTable t = generate_table(site.collision_model, site.facility, grids, threads);
            const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
            t.save(out_path);
            std::cout << "cells " << t.cell_count() << "\n"
                      << "colliding " << t.colliding_count() << "\n"
                      << "colliding_fraction " << format_double(static_cast<double>(t.colliding_count()) /
                                                                static_cast<double>(t.cell_count()))
                      << "\n"
                      << "geometry_hash " << to_hex(t.hash()) << "\n"
                      << "seconds " << std::fixed << std::setprecision(2) << secs << "\n";
            return kOk;
        }
        if (*slice)
        {
            const CollisionTable t = CollisionTable::load(table_path);
            const SliceMask m = t.slice(az);
            std::ostringstream os;
            os << "# moving_az " << format_double(m.moving_az) << "\n";
            os << "# rows: moving_coel, columns: static_coel, 1 = colliding\n";
            os << "moving_coel";
            for (std::size_t j = 0; j < m.static_coel.size(); ++j)
                os << "," << format_double(m.static_coel.value(j));
            os << "\n";
            for (std::size_t i = 0; i < m.moving_coel.size(); ++i)
            {
                os << format_double(m.moving_coel.value(i));
                for (std::size_t j = 0; j < m.static_coel.size(); ++j)
                    os << "," << (m.at(i, j) ? 1 : 0);
                os << "\n";
            }
            write_text_file(out_path, os.str());
            return kOk;
        }
        if (*verify)
        {
            const SiteConfig site = site_config(config_path);
            const CollisionTable t = CollisionTable::load(table_path);
            const GeometryHash expect = geometry_hash(site.collision_model, site.facility);
            if (t.hash() != expect)
                throw ConfigError("table geometry " + to_hex(t.hash()) + " differs from the configuration " +
                                  to_hex(expect));
            const Trajectory tr = parse_trajectory(read_text_file(traj_path), site.facility.axis_limits);
            const VerificationReport r =
                verify_trajectory(tr, site.motion_limits, t, *verify_mode_from_name(mode_name), site.facility);
            const std::string text = report_to_json(r).dump(2) + "\n";
            std::cout << text;
            if (!report_path.empty())
                write_text_file(report_path, text);
            return r.accepted ? kOk : kRejected;
        }
        if (*rcs)
        {
            RcsPipelineOptions opt;
            opt.dut_radius = radius;
            opt.polarization = polarization_arg(pol_name) == Polarization::Theta ? 0.0 : 90.0;
            opt.seed = seed;
            const FrequencyGrid grid = opt.sweep.grid();
            const double f = f_ghz * 1e9;
            const double idx = (f - grid.start) / grid.step;
            if (!(idx >= -1e-9 && idx <= static_cast<double>(grid.count - 1) + 1e-9) ||
                std::abs(idx - std::round(idx)) > 1e-6)
                throw RangeError("f", "frequency " + format_double(f_ghz) + " GHz is not on the sweep grid");
            const auto k = static_cast<std::size_t>(std::llround(idx));
            std::ostringstream os;
            os << "# sphere radius " << format_double(radius) << " m, " << format_double(f_ghz)
               << " GHz, pol " << pol_name << ", reference sphere " << format_double(opt.cal_radius)
               << " m, seed " << seed << "\n";
            os << "beta_deg,mie_dbsm,recovered_dbsm,error_db\n";
            for (double beta : parse_range(cut, 1.0, "cut").values())
            {
                const RcsMeasurement m = measure_sphere_rcs(beta, opt);
                const double a = db10(m.analytic[k]), r = db10(m.recovered.sigma[k]);
                os << format_double(beta) << "," << csv_number(a) << "," << csv_number(r) << ","
                   << csv_number(r - a) << "\n";
            }
            write_text_file(out_path, os.str());
            return kOk;
        }
        if (*imp)
        {
            const Range b = parse_range(band, 1.0, "band");
            SpherePathScanOptions opt;
            opt.sweep.f_start = b.lo * 1e9;
            opt.sweep.f_stop = b.hi * 1e9;
            opt.polarization = polarization_arg(pol_name) == Polarization::Theta ? 0.0 : 90.0;
            opt.seed = seed;
            const SpherePathScanner scanner(opt);
            std::ostringstream os;
            os << "# band " << format_double(b.lo) << ".." << format_double(b.hi) << " GHz, gantry radius "
               << format_double(opt.gantry_radius) << " m, sphere radius " << format_double(opt.sphere_radius)
               << " m, pol " << pol_name << ", path length relative to 2R\n";
            os << "beta_deg,path_length_m,magnitude_db,specular_extra_m,creeping_extra_m\n";
            for (double beta : parse_range(imp_cut, 2.0, "cut").values())
            {
                const SpherePathScan s = scanner.scan(beta);
                for (std::size_t i = 0; i < s.response.taps.size(); ++i)
                {
                    const double l = s.response.path_length(i);
                    if (l < opt.view_min || l > opt.view_max)
                        continue;
                    os << format_double(beta) << "," << format_double(l) << ","
                       << csv_number(db20(std::abs(s.response.taps[i]))) << ","
                       << format_double(s.model.specular_extra) << "," << format_double(s.model.creeping_extra)
                       << "\n";
                }
            }
            write_text_file(out_path, os.str());
            return kOk;
        }
        if (*ud)
        {
            const Scene scene = load_scene(scene_path);
            BistaticConstellation c;
            c.theta_ill = theta_ill;
            c.theta_obs = theta_obs;
            c.phi_obs = phi_obs;
            MicroDopplerConfig cfg;
            cfg.frames = frames;
            cfg.start_time = start;
            cfg.frame_interval = interval;
            cfg.noise_variance = noise;
            cfg.seed = seed;
            const MicroDopplerResult r = simulate_micro_doppler(scene, c, cfg);
            std::filesystem::create_directories(out_dir);
            std::ostringstream peaks;
            peaks << "frame,frame_time_s,path_length_m,range_rate_mps,level_db,rate_extent_mps\n";
            for (std::size_t i = 0; i < r.frames.size(); ++i)
            {
                char name[32];
                std::snprintf(name, sizeof name, "frame_%03zu.csv", i);
                write_text_file(std::filesystem::path(out_dir) / name, range_doppler_to_csv(r.frames[i]));
                for (const auto &p : find_peaks(r.frames[i], -12.0))
                    peaks << i << "," << format_double(r.frames[i].frame_time) << "," << format_double(p.path_length)
                          << "," << format_double(p.range_rate) << "," << format_double(p.level_db) << ","
                          << format_double(p.rate_extent) << "\n";
            }
            write_text_file(std::filesystem::path(out_dir) / "peaks.csv", peaks.str());
            for (const auto &w : r.warnings)
                std::cerr << "warning: " << w << "\n";
            std::cout << "frames " << r.frames.size() << "\n";
            return kOk;
        }
        if (*serve)
        {
            SiteConfig site = site_config(config_path);
            std::optional<CollisionTable> t;
            if (!table_path.empty())
                t = CollisionTable::load(table_path);
            std::map<std::string, Scene> scenes;
            if (!scenes_dir.empty())
                scenes = SessionState::load_scene_directory(scenes_dir);
            Service svc(SessionState::create(std::move(site), std::move(t), std::move(scenes)));
            g_service = &svc;
            std::signal(SIGINT, on_signal);
            std::signal(SIGTERM, on_signal);
            std::cerr << "listening on " << host << ":" << port << "\n";
            if (!svc.listen(host, port))
                throw Error("io", "cannot listen on " + host + ":" + std::to_string(port));
            g_service = nullptr;
            return kOk;
        }
    }
    catch (const Error &e)
    {
        std::cerr << "error: " << e.kind() << ": " << e.what() << "\n";
        return exit_code_for(e.kind());
    }
    catch (const std::exception &e)
    {
        std::cerr << "error: internal: " << e.what() << "\n";
        return kInternal;
    }
    return kUsage;
}

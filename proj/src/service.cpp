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

#include "bira/service.hpp"
#include "bira/io.hpp"
#include "bira/motion.hpp"
#include "bira/trajfile.hpp"
#include "json_util.hpp"

#include <httplib.h>

#include <atomic>
#include <chrono>
#include <condition_variable>
#include <deque>
#include <iostream>
#include <mutex>
#include <random>
#include <regex>
#include <sstream>
#include <thread>

namespace bira
{
    namespace
    {
        // Thrown by handlers; mapped to a status code with a JSON error body.
        class HttpError : public Error
        {
        public:
            HttpError(int status, std::string kind, const std::string &message)
                : Error(std::move(kind), message), status(status) {}
            int status;
        };

        json parse_body(const std::string &body)
        {
            if (body.empty())
                throw HttpError(400, "parse", "request body is empty");
            try
            {
                return json::parse(body);
            }
            catch (const json::parse_error &e)
            {
                // Byte offsets from the JSON parser turned into 1-based line/column.
                const std::size_t upto = std::min<std::size_t>(e.byte == 0 ? 0 : e.byte - 1, body.size());
                int line = 1, column = 1;
                for (std::size_t i = 0; i < upto; ++i)
                {
                    if (body[i] == '\n')
                    {
                        ++line;
                        column = 1;
                    }
                    else
                        ++column;
                }
                std::string msg = e.what();
                const auto pos = msg.find("]: ");
                if (pos != std::string::npos)
                    msg = msg.substr(pos + 3);
                throw ParseError(line, column, msg);
            }
        }

        const json &require(const json &j, const std::string &key)
        {
            if (!j.is_object())
                throw ConfigError("request body must be an object");
            const auto it = j.find(key);
            if (it == j.end())
                throw ConfigError("missing key '" + key + "'");
            return *it;
        }

        void reject_unknown(const json &j, std::initializer_list<const char *> keys, const std::string &context)
        {
            if (!j.is_object())
                throw ConfigError(context + " must be an object");
            for (const auto &[key, value] : j.items())
            {
                bool known = false;
                for (const char *k : keys)
                    known = known || key == k;
                if (!known)
                    throw ConfigError("unknown key '" + key + "' in " + context);
            }
        }

        json vec_json(const Vec3 &v) { return json::array({v.x(), v.y(), v.z()}); }

        json box_json(const OrientedBox &b)
        {
            json axes = json::array();
            for (int c = 0; c < 3; ++c)
                axes.push_back(vec_json(b.axes.col(c)));
            return json{{"center", vec_json(b.center)}, {"half", vec_json(b.half)}, {"axes", axes}};
        }

        json error_json(const std::string &kind, const std::string &message)
        {
            return json{{"error", {{"kind", kind}, {"message", message}}}};
        }

        InstrumentModel instrument_from_name(const std::string &name)
        {
            if (name == "ideal")
                return InstrumentModel::ideal();
            if (name == "facility")
                return InstrumentModel::facility();
            throw ConfigError("unknown instrument '" + name + "' (expected ideal or facility)");
        }

        double seconds_since(std::chrono::steady_clock::time_point t0)
        {
            return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        }
    }

    void from_json(const json &j, SweepConfig &v)
    {
        std::string window(window_name(v.window));
        read_object(j, "sweep",
                    {{"f_start", number(v.f_start)},
                     {"f_stop", number(v.f_stop)},
                     {"f_step", number(v.f_step)},
                     {"window", text(window)},
                     {"noise_floor_db", [&v](const json &x) {
                          if (x.is_null())
                              v.noise_floor_db.reset();
                          else if (x.is_number())
                              v.noise_floor_db = x.get<double>();
                          else
                              throw ConfigError("sweep.noise_floor_db: expected a number or null");
                      }}});
        v.window = window_from_name(window);
        (void)v.grid();
    }

    void to_json(json &j, const SweepConfig &v)
    {
        j = json{{"f_start", v.f_start},
                 {"f_stop", v.f_stop},
                 {"f_step", v.f_step},
                 {"window", window_name(v.window)},
                 {"noise_floor_db", v.noise_floor_db ? json(*v.noise_floor_db) : json(nullptr)}};
    }

    std::shared_ptr<const SessionState> SessionState::create(SiteConfig site, std::optional<CollisionTable> table,
                                                             std::map<std::string, Scene> scenes)
    {
        site.validate();
        if (table)
        {
            const GeometryHash expect = geometry_hash(site.collision_model, site.facility);
            if (table->hash() != expect)
                throw ConfigError("collision table was built for geometry " + to_hex(table->hash()) +
                                  ", configuration has " + to_hex(expect));
        }
        const double radius = site.facility.turntable_diameter / 2.0;
        for (const auto &[name, scene] : scenes)
        {
            try
            {
                scene.validate(radius);
            }
            catch (const Error &e)
            {
                throw ConfigError("scene '" + name + "': " + e.what());
            }
        }
        auto s = std::make_shared<SessionState>();
        s->site = std::move(site);
        s->table = std::move(table);
        s->scenes = std::move(scenes);
        return s;
    }

    std::map<std::string, Scene> SessionState::load_scene_directory(const std::filesystem::path &dir)
    {
        std::map<std::string, Scene> out;
        if (!std::filesystem::is_directory(dir))
            throw ConfigError("scene directory not found: " + dir.string());
        for (const auto &entry : std::filesystem::directory_iterator(dir))
            if (entry.is_regular_file() && entry.path().extension() == ".json")
                out.emplace(entry.path().stem().string(), load_scene(entry.path()));
        return out;
    }

    struct Service::Impl
    {
        struct Job
        {
            std::string id;
            std::string status = "queued"; // queued, running, done, failed
            Scene scene;
            BistaticConstellation constellation;
            SweepConfig sweep;
            InstrumentModel instrument;
            std::string instrument_name;
            std::uint64_t seed = 0;
            std::string record_text;
            json summary;
            json error;
        };

        struct Frame
        {
            double t = 0.0;
            MachineState state;
            std::optional<bool> collision;
            std::size_t leg = 0;
        };

        struct Playback
        {
            std::string id;
            std::vector<Frame> frames;
            double rate = 1.0; // trajectory seconds per wall-clock second, 0 = unpaced
            std::mutex m;
            std::condition_variable cv;
            bool paused = false;
            std::optional<double> seek;
            bool streaming = false;
            std::size_t cursor = 0;
        };

        std::shared_ptr<const SessionState> session;
        ServiceOptions options;
        httplib::Server server;

        mutable std::mutex jobs_mutex;
        mutable std::condition_variable jobs_cv;
        mutable std::condition_variable idle_cv;
        mutable std::deque<std::string> queue;
        mutable std::map<std::string, std::shared_ptr<Job>> jobs;
        mutable std::deque<std::string> finished;
        mutable std::uint64_t next_job = 1;
        mutable bool busy = false;
        bool stopping = false;
        std::thread worker;

        mutable std::mutex playback_mutex;
        mutable std::map<std::string, std::shared_ptr<Playback>> playbacks;
        mutable std::uint64_t next_playback = 1;

        mutable std::atomic<std::uint64_t> error_counter{0};

        Impl(std::shared_ptr<const SessionState> s, ServiceOptions o) : session(std::move(s)), options(o)
        {
            if (!session)
                throw ConfigError("service needs a session");
            worker = std::thread([this] { run_jobs(); });
            install_routes();
        }

        ~Impl()
        {
            {
                std::lock_guard lock(jobs_mutex);
                stopping = true;
            }
            jobs_cv.notify_all();
            if (worker.joinable())
                worker.join();
        }

        // Routing -------------------------------------------------------------

        HttpResponse dispatch(const std::string &method, const std::string &path, const std::string &body) const
        {
            try
            {
                return route(method, path, body);
            }
            catch (const HttpError &e)
            {
                return {e.status, "application/json", error_json(e.kind(), e.what()).dump()};
            }
            catch (const ParseError &e)
            {
                json j = error_json(e.kind(), e.what());
                j["error"]["line"] = e.line();
                j["error"]["column"] = e.column();
                if (!e.axis().empty())
                    j["error"]["axis"] = e.axis();
                return {400, "application/json", j.dump()};
            }
            catch (const RangeError &e)
            {
                json j = error_json(e.kind(), e.what());
                j["error"]["axis"] = e.axis();
                return {422, "application/json", j.dump()};
            }
            catch (const ReachabilityError &e)
            {
                json j = error_json(e.kind(), e.what());
                j["error"]["bound"] = e.bound();
                return {422, "application/json", j.dump()};
            }
            catch (const GeometryError &e)
            {
                return {422, "application/json", error_json(e.kind(), e.what()).dump()};
            }
            catch (const Error &e)
            {
                return {400, "application/json", error_json(e.kind(), e.what()).dump()};
            }
            catch (const std::exception &e)
            {
                return internal_error(e.what());
            }
            catch (...)
            {
                return internal_error("unknown exception");
            }
        }

        HttpResponse internal_error(const std::string &detail) const
        {
            std::ostringstream id;
            id << "E" << std::hex << (std::chrono::steady_clock::now().time_since_epoch().count() & 0xFFFFFF) << "-"
               << error_counter.fetch_add(1);
            std::cerr << "bira-service: internal error " << id.str() << ": " << detail << std::endl;
            json j{{"error", {{"kind", "internal"}, {"message", "internal error"}, {"id", id.str()}}}};
            return {500, "application/json", j.dump()};
        }

        HttpResponse route(const std::string &method, const std::string &path, const std::string &body) const
        {
            static const std::regex job_re(R"(/jobs/([A-Za-z0-9-]+))");
            static const std::regex job_record_re(R"(/jobs/([A-Za-z0-9-]+)/record)");
            static const std::regex control_re(R"(/playback/([A-Za-z0-9-]+)/control)");
            static const std::regex playback_re(R"(/playback/([A-Za-z0-9-]+))");
            std::smatch m;
            auto only = [&](const char *allowed) {
                if (method != allowed)
                    throw HttpError(405, "method", method + " is not allowed on " + path);
            };
            if (path == "/capabilities")
            {
                only("GET");
                return ok(capabilities());
            }
            if (path == "/fk")
            {
                only("POST");
                return ok(fk(parse_body(body)));
            }
            if (path == "/bistatic")
            {
                only("POST");
                return ok(bistatic(parse_body(body)));
            }
            if (path == "/trajectory/verify")
            {
                only("POST");
                return ok(verify(parse_body(body)));
            }
            if (path == "/simulate/sweep")
            {
                only("POST");
                return ok(submit_sweep(parse_body(body)), 202);
            }
            if (std::regex_match(path, m, job_record_re))
            {
                only("GET");
                return job_record(m[1]);
            }
            if (std::regex_match(path, m, job_re))
            {
                only("GET");
                return ok(job_status(m[1]));
            }
            if (path == "/playback")
            {
                only("POST");
                return ok(create_playback(parse_body(body)), 201);
            }
            if (std::regex_match(path, m, control_re))
            {
                only("POST");
                return ok(control_playback(m[1], parse_body(body)));
            }
            if (std::regex_match(path, m, playback_re))
            {
                only("GET");
                return ok(playback_info(m[1]));
            }
            throw HttpError(404, "not_found", "no endpoint " + path);
        }

        static HttpResponse ok(const json &j, int status = 200) { return {status, "application/json", j.dump()}; }

        const CollisionTable &table() const
        {
            if (!session->table)
                throw HttpError(503, "unavailable", "no collision table loaded; collision endpoints are disabled");
            return *session->table;
        }

        // Endpoints -----------------------------------------------------------

        json capabilities() const
        {
            const SiteConfig &site = session->site;
            json axes = json::array();
            for (Axis a : kAllAxes)
                axes.push_back(axis_name(a));
            json table_info{{"present", session->table.has_value()}};
            if (session->table)
            {
                const auto &t = *session->table;
                table_info["geometry_hash"] = to_hex(t.hash());
                table_info["version"] = t.version();
                table_info["cell_count"] = t.cell_count();
                table_info["colliding_fraction"] =
                    static_cast<double>(t.colliding_count()) / static_cast<double>(t.cell_count());
                table_info["grids"] = {{"moving_az", t.grids().moving_az},
                                       {"moving_coel", t.grids().moving_coel},
                                       {"static_coel", t.grids().static_coel}};
            }
            json scenes = json::array();
            for (const auto &[name, s] : session->scenes)
                scenes.push_back(name);
            json config;
            to_json(config, site);
            return json{{"service", "bira-twin"},
                        {"api_version", 1},
                        {"axes", axes},
                        {"config", config},
                        {"table", table_info},
                        {"collision_endpoints", session->table.has_value()},
                        {"scenes", scenes},
                        {"instruments", {"ideal", "facility"}},
                        {"verify_modes", {"stepped", "continuous"}},
                        {"job_queue_capacity", options.job_queue_capacity}};
        }

        MachineState read_state(const json &j) const
        {
            MachineState s;
            s.radial_tx = s.radial_rx = session->site.facility.boom_radius_nominal;
            from_json(j, s);
            return s;
        }

        json fk(const json &body) const
        {
            reject_unknown(body, {"state"}, "fk request");
            const MachineState s = read_state(require(body, "state"));
            const FacilityConfig &cfg = session->site.facility;
            check_limits(s, cfg.axis_limits);
            const ProbePair p = forward_kinematics(s, cfg);
            const BistaticConstellation c = machine_to_bistatic(s, cfg);
            json boxes_moving = json::array(), boxes_static = json::array();
            const BoundingBoxModel &model = session->site.collision_model;
            for (const auto &b : moving_gantry_boxes(s.moving_az, s.moving_coel, model, cfg))
                boxes_moving.push_back(box_json(b));
            for (const auto &b : static_gantry_boxes(s.static_coel, model, cfg))
                boxes_static.push_back(box_json(b));
            json tx, rx, st, con;
            to_json(tx, p.tx);
            to_json(rx, p.rx);
            to_json(st, s);
            to_json(con, c);
            return json{{"state", st},
                        {"tx", tx},
                        {"rx", rx},
                        {"constellation", con},
                        {"bistatic_angle", bistatic_angle(c)},
                        {"collision", session->table ? json(session->table->query(s)) : json(nullptr)},
                        {"boxes", {{"moving", boxes_moving}, {"static", boxes_static}, {"clearance", model.clearance}}}};
        }

        json bistatic(const json &body) const
        {
            reject_unknown(body, {"constellation", "policy"}, "bistatic request");
            BistaticConstellation c;
            from_json(require(body, "constellation"), c);
            MappingPolicy policy;
            policy.current.radial_tx = policy.current.radial_rx = session->site.facility.boom_radius_nominal;
            if (const auto it = body.find("policy"); it != body.end())
            {
                reject_unknown(*it, {"current", "weights"}, "policy");
                if (const auto cur = it->find("current"); cur != it->end())
                    policy.current = read_state(*cur);
                if (const auto w = it->find("weights"); w != it->end())
                {
                    MachineState weights = MachineState::from_array(policy.weights);
                    from_json(*w, weights);
                    policy.weights = weights.to_array();
                }
            }
            const MachineState s = bistatic_to_machine(c, policy, session->site.facility);
            json st, achieved;
            to_json(st, s);
            to_json(achieved, machine_to_bistatic(s, session->site.facility));
            return json{{"state", st},
                        {"constellation", achieved},
                        {"collision", session->table ? json(session->table->query(s)) : json(nullptr)}};
        }

        json verify(const json &body) const
        {
            reject_unknown(body, {"trajectory", "mode"}, "verify request");
            const CollisionTable &t = table();
            const json &text = require(body, "trajectory");
            if (!text.is_string())
                throw ConfigError("trajectory must be the trajectory file text");
            VerifyMode mode = VerifyMode::Stepped;
            if (const auto it = body.find("mode"); it != body.end())
            {
                const auto parsed = it->is_string() ? verify_mode_from_name(it->get<std::string>()) : std::nullopt;
                if (!parsed)
                    throw ConfigError("mode must be \"stepped\" or \"continuous\"");
                mode = *parsed;
            }
            const Trajectory traj = parse_trajectory(text.get<std::string>(), session->site.facility.axis_limits);
            return report_to_json(
                verify_trajectory(traj, session->site.motion_limits, t, mode, session->site.facility));
        }

        // Jobs ----------------------------------------------------------------

        json submit_sweep(const json &body) const
        {
            reject_unknown(body, {"scene", "constellation", "sweep", "instrument", "seed"}, "sweep request");
            auto job = std::make_shared<Job>();
            const json &scene = require(body, "scene");
            if (scene.is_string())
            {
                const auto it = session->scenes.find(scene.get<std::string>());
                if (it == session->scenes.end())
                    throw HttpError(404, "not_found", "unknown scene '" + scene.get<std::string>() + "'");
                job->scene = it->second;
            }
            else
            {
                job->scene = parse_scene(scene.dump());
                job->scene.validate(session->site.facility.turntable_diameter / 2.0);
            }
            from_json(require(body, "constellation"), job->constellation);
            if (const auto it = body.find("sweep"); it != body.end())
                from_json(*it, job->sweep);
            job->instrument_name = "ideal";
            if (const auto it = body.find("instrument"); it != body.end())
            {
                if (!it->is_string())
                    throw ConfigError("instrument must be a name");
                job->instrument_name = it->get<std::string>();
            }
            job->instrument = instrument_from_name(job->instrument_name);
            if (const auto it = body.find("seed"); it != body.end())
            {
                if (!it->is_number_unsigned())
                    throw ConfigError("seed must be a non-negative integer");
                job->seed = it->get<std::uint64_t>();
            }
            // The scene must be resolvable at this constellation before queueing.
            (void)scene_paths(job->scene, probes_from_constellation(job->constellation), 0.0, job->sweep.f_start);

            std::lock_guard lock(jobs_mutex);
            if (queue.size() >= options.job_queue_capacity)
                throw HttpError(503, "busy", "job queue is full (" + std::to_string(options.job_queue_capacity) + ")");
            job->id = "job-" + std::to_string(next_job++);
            jobs.emplace(job->id, job);
            queue.push_back(job->id);
            jobs_cv.notify_all();
            return json{{"job", job->id}, {"status", job->status}, {"href", "/jobs/" + job->id}};
        }

        void run_jobs()
        {
            for (;;)
            {
                std::shared_ptr<Job> job;
                {
                    std::unique_lock lock(jobs_mutex);
                    jobs_cv.wait(lock, [&] { return stopping || !queue.empty(); });
                    if (stopping)
                        return;
                    job = jobs.at(queue.front());
                    queue.pop_front();
                    job->status = "running";
                    busy = true;
                }
                std::string status = "done", record_text;
                json summary, error;
                try
                {
                    TransferRecord r =
                        synthesize_sweep(job->scene, job->constellation, job->sweep, job->instrument, job->seed);
                    r.label = job->id;
                    double peak = 0.0;
                    for (const auto &v : r.s21)
                        peak = std::max(peak, std::abs(v));
                    json sweep;
                    to_json(sweep, job->sweep);
                    summary = json{{"points", r.size()},
                                   {"peak_db", db20(peak)},
                                   {"sweep", sweep},
                                   {"instrument", job->instrument_name},
                                   {"seed", job->seed},
                                   {"record", "/jobs/" + job->id + "/record"}};
                    record_text = record_to_text(r);
                }
                catch (const Error &e)
                {
                    status = "failed";
                    error = json{{"kind", e.kind()}, {"message", e.what()}};
                }
                catch (const std::exception &e)
                {
                    status = "failed";
                    error = json{{"kind", "internal"}, {"message", "internal error"}};
                    std::cerr << "bira-service: job " << job->id << " failed: " << e.what() << std::endl;
                }
                std::lock_guard lock(jobs_mutex);
                job->status = status;
                job->record_text = std::move(record_text);
                job->summary = std::move(summary);
                job->error = std::move(error);
                finished.push_back(job->id);
                while (finished.size() > options.job_history)
                {
                    jobs.erase(finished.front());
                    finished.pop_front();
                }
                busy = false;
                idle_cv.notify_all();
            }
        }

        std::shared_ptr<Job> find_job(const std::string &id) const
        {
            const auto it = jobs.find(id);
            if (it == jobs.end())
                throw HttpError(404, "not_found", "unknown job '" + id + "'");
            return it->second;
        }

        json job_status(const std::string &id) const
        {
            std::lock_guard lock(jobs_mutex);
            const auto job = find_job(id);
            json j{{"job", job->id}, {"status", job->status}};
            if (job->status == "done")
                j["result"] = job->summary;
            if (job->status == "failed")
                j["error"] = job->error;
            return j;
        }

        HttpResponse job_record(const std::string &id) const
        {
            std::lock_guard lock(jobs_mutex);
            const auto job = find_job(id);
            if (job->status != "done")
                throw HttpError(409, "not_ready", "job '" + id + "' is " + job->status);
            return {200, "text/plain", job->record_text};
        }

        void wait_idle() const
        {
            std::unique_lock lock(jobs_mutex);
            idle_cv.wait(lock, [&] { return queue.empty() && !busy; });
        }

        // Playback --------------------------------------------------------------

        json create_playback(const json &body) const
        {
            reject_unknown(body, {"trajectory", "dt", "rate"}, "playback request");
            const json &text = require(body, "trajectory");
            if (!text.is_string())
                throw ConfigError("trajectory must be the trajectory file text");
            double dt = 0.01, rate = 1.0;
            if (const auto it = body.find("dt"); it != body.end())
                number(dt)(*it);
            if (const auto it = body.find("rate"); it != body.end())
                number(rate)(*it);
            if (!(dt > 0.0) || !std::isfinite(dt))
                throw ConfigError("dt must be positive");
            if (!(rate >= 0.0) || !std::isfinite(rate))
                throw ConfigError("rate must be non-negative");
            const Trajectory traj = parse_trajectory(text.get<std::string>(), session->site.facility.axis_limits);
            const EffectiveLimits lim = apply_overrides(session->site.motion_limits, traj.params);

            std::vector<MotionProfile> legs;
            double total = 0.0;
            for (std::size_t i = 1; i < traj.waypoints.size(); ++i)
            {
                legs.push_back(plan_profile(traj.waypoints[i - 1], traj.waypoints[i], lim.limits));
                total += legs.back().duration;
            }
            if (total / dt + static_cast<double>(traj.waypoints.size()) > static_cast<double>(options.max_playback_samples))
                throw ConfigError("playback would exceed " + std::to_string(options.max_playback_samples) +
                                  " frames; increase dt");

            auto pb = std::make_shared<Playback>();
            pb->rate = rate;
            auto flag = [&](const MachineState &s) -> std::optional<bool> {
                if (!session->table)
                    return std::nullopt;
                return session->table->query(s);
            };
            if (!traj.waypoints.empty())
                pb->frames.push_back({0.0, traj.waypoints.front(), flag(traj.waypoints.front()), 0});
            double offset = 0.0;
            for (std::size_t i = 0; i < legs.size(); ++i)
            {
                const auto samples = sample_profile(legs[i], dt);
                for (std::size_t k = 1; k < samples.size(); ++k)
                    pb->frames.push_back({offset + samples[k].t, samples[k].state, flag(samples[k].state), i + 1});
                offset += legs[i].duration;
            }

            std::lock_guard lock(playback_mutex);
            pb->id = "pb-" + std::to_string(next_playback++);
            playbacks.emplace(pb->id, pb);
            json j = playback_summary(*pb);
            if (!lim.excess.empty())
                j["warnings"] = lim.excess;
            return j;
        }

        static json playback_summary(const Playback &pb)
        {
            return json{{"playback", pb.id},
                        {"frames", pb.frames.size()},
                        {"duration", pb.frames.empty() ? 0.0 : pb.frames.back().t},
                        {"rate", pb.rate},
                        {"stream", "/playback/" + pb.id + "/stream"},
                        {"control", "/playback/" + pb.id + "/control"}};
        }

        std::shared_ptr<Playback> find_playback(const std::string &id) const
        {
            std::lock_guard lock(playback_mutex);
            const auto it = playbacks.find(id);
            if (it == playbacks.end())
                throw HttpError(404, "not_found", "unknown playback '" + id + "'");
            return it->second;
        }

        json playback_info(const std::string &id) const
        {
            const auto pb = find_playback(id);
            std::lock_guard lock(pb->m);
            json j = playback_summary(*pb);
            j["paused"] = pb->paused;
            j["streaming"] = pb->streaming;
            j["cursor"] = pb->cursor;
            return j;
        }

        json control_playback(const std::string &id, const json &body) const
        {
            reject_unknown(body, {"action", "time"}, "control frame");
            const auto pb = find_playback(id);
            const json &action = require(body, "action");
            if (!action.is_string())
                throw ConfigError("action must be pause, resume or seek_time");
            const std::string a = action.get<std::string>();
            std::lock_guard lock(pb->m);
            if (a == "pause")
                pb->paused = true;
            else if (a == "resume")
                pb->paused = false;
            else if (a == "seek_time")
            {
                double t = 0.0;
                number(t)(require(body, "time"));
                if (!std::isfinite(t))
                    throw ConfigError("seek time must be finite");
                pb->seek = t;
            }
            else
                throw ConfigError("unknown action '" + a + "' (expected pause, resume or seek_time)");
            pb->cv.notify_all();
            return json{{"playback", pb->id}, {"paused", pb->paused}, {"cursor", pb->cursor}};
        }

        static json frame_json(const Frame &f, std::size_t index, bool last)
        {
            json st;
            to_json(st, f.state);
            json j{{"index", index},
                   {"t", f.t},
                   {"leg", f.leg},
                   {"state", st},
                   {"collision", f.collision ? json(*f.collision) : json(nullptr)}};
            if (last)
                j["final"] = true;
            return j;
        }

        // Server-paced NDJSON stream. One stream per playback at a time.
        void stream(const httplib::Request &req, httplib::Response &res) const
        {
            std::shared_ptr<Playback> pb;
            try
            {
                pb = find_playback(req.matches[1]);
            }
            catch (const HttpError &e)
            {
                res.status = e.status;
                res.set_content(error_json(e.kind(), e.what()).dump(), "application/json");
                return;
            }
            {
                std::lock_guard lock(pb->m);
                if (pb->streaming)
                {
                    res.status = 409;
                    res.set_content(error_json("conflict", "playback is already streaming").dump(),
                                    "application/json");
                    return;
                }
                pb->streaming = true;
                pb->cursor = 0;
                pb->seek.reset();
            }
            struct Clock
            {
                std::chrono::steady_clock::time_point wall0 = std::chrono::steady_clock::now();
                double t0 = 0.0;
            };
            auto clock = std::make_shared<Clock>();
            if (!pb->frames.empty())
                clock->t0 = pb->frames.front().t;
            res.set_chunked_content_provider(
                "application/x-ndjson",
                [pb, clock](std::size_t, httplib::DataSink &sink) {
                    std::unique_lock lock(pb->m);
                    if (pb->frames.empty())
                    {
                        sink.done();
                        return true;
                    }
                    auto apply_seek = [&] {
                        if (!pb->seek)
                            return;
                        const double t = *pb->seek;
                        pb->seek.reset();
                        const auto it = std::lower_bound(pb->frames.begin(), pb->frames.end(), t,
                                                         [](const Frame &f, double x) { return f.t < x; });
                        pb->cursor = std::min<std::size_t>(static_cast<std::size_t>(it - pb->frames.begin()),
                                                           pb->frames.size() - 1);
                        clock->wall0 = std::chrono::steady_clock::now();
                        clock->t0 = pb->frames[pb->cursor].t;
                    };
                    apply_seek();
                    if (pb->paused)
                    {
                        pb->cv.wait_for(lock, std::chrono::milliseconds(50));
                        if (!pb->paused)
                        {
                            clock->wall0 = std::chrono::steady_clock::now();
                            clock->t0 = pb->frames[pb->cursor].t;
                        }
                        return sink.is_writable();
                    }
                    if (pb->rate > 0.0)
                    {
                        const double due = (pb->frames[pb->cursor].t - clock->t0) / pb->rate;
                        const double wait = due - seconds_since(clock->wall0);
                        if (wait > 0.0)
                        {
                            pb->cv.wait_for(lock, std::chrono::duration<double>(std::min(wait, 0.05)));
                            return sink.is_writable();
                        }
                    }
                    const std::size_t i = pb->cursor;
                    const bool last = i + 1 == pb->frames.size();
                    const std::string line = frame_json(pb->frames[i], i, last).dump() + "\n";
                    if (!sink.write(line.data(), line.size()))
                        return false;
                    if (last)
                        sink.done();
                    else
                        ++pb->cursor;
                    return true;
                },
                [pb](bool) {
                    std::lock_guard lock(pb->m);
                    pb->streaming = false;
                });
        }

        void install_routes()
        {
            server.Get(R"(/playback/([A-Za-z0-9-]+)/stream)",
                       [this](const httplib::Request &req, httplib::Response &res) { stream(req, res); });
            auto generic = [this](const httplib::Request &req, httplib::Response &res) {
                const HttpResponse r = dispatch(req.method, req.path, req.body);
                res.status = r.status;
                res.set_content(r.body, r.content_type);
            };
            server.Get(".*", generic);
            server.Post(".*", generic);
            server.Put(".*", generic);
            server.Delete(".*", generic);
        }
    };

    Service::Service(std::shared_ptr<const SessionState> session, ServiceOptions options)
        : impl_(std::make_unique<Impl>(std::move(session), options))
    {
    }

    Service::~Service()
    {
        stop();
    }

    HttpResponse Service::handle(const std::string &method, const std::string &path, const std::string &body) const
    {
        return impl_->dispatch(method, path, body);
    }

    bool Service::listen(const std::string &host, int port)
    {
        return impl_->server.listen(host, port);
    }

    int Service::bind_any_port(const std::string &host)
    {
        return impl_->server.bind_to_any_port(host);
    }

    bool Service::listen_after_bind()
    {
        return impl_->server.listen_after_bind();
    }

    void Service::stop()
    {
        if (impl_ && impl_->server.is_running())
            impl_->server.stop();
    }

    void Service::wait_idle() const
    {
        impl_->wait_idle();
    }
}

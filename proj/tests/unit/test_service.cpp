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
#include "bira/service.hpp"

#include <httplib.h>

#include <chrono>
#include <thread>

// Covered tests:
// - Capabilities with and without a collision table
// - /fk against forward kinematics, latency, limits and diagnostics
// - /bistatic round trip and reachability errors
// - /trajectory/verify on the colliding fixture
// - Sweep jobs: deterministic results, bounded queue
// - Playback stream: exact final frame, pause and seek
// - Determinism and concurrent requests

using namespace bira;
using Catch::Matchers::WithinAbs;
using nlohmann::json;

namespace
{
    const CollisionTable &table2()
    {
        static const CollisionTable table = generate_table(BoundingBoxModel{}, FacilityConfig{},
                                                           TableGrids::from_limits(FacilityConfig{}, 2.0));
        return table;
    }

    std::shared_ptr<const SessionState> session(bool with_table)
    {
        std::map<std::string, Scene> scenes;
        scenes["two_spheres"] = load_scene(std::string(BIRA_SOURCE_DIR) + "/data/scenes/two_spheres.json");
        return SessionState::create(SiteConfig{}, with_table ? std::optional(table2()) : std::nullopt, scenes);
    }

    std::string row(double az, double mc, double sc)
    {
        return std::to_string(az) + " " + std::to_string(mc) + " " + std::to_string(sc) + " 0 0 0 3.44 3.44\n";
    }

    json state_json(double az, double mc, double sc)
    {
        return json{{"moving_az", az}, {"moving_coel", mc}, {"static_coel", sc}};
    }

    json body(const HttpResponse &r) { return json::parse(r.body); }
}

TEST_CASE("Service - capabilities report the table state")
{
    Service without(session(false));
    const json c = body(without.handle("GET", "/capabilities", ""));
    CHECK(c["table"]["present"] == false);
    CHECK(c["collision_endpoints"] == false);
    CHECK(c["axes"].size() == 8);
    CHECK(c["scenes"] == json::array({"two_spheres"}));
    const HttpResponse v = without.handle("POST", "/trajectory/verify", R"({"trajectory": ""})");
    CHECK(v.status == 503);
    CHECK(body(v)["error"]["kind"] == "unavailable");
    CHECK(body(without.handle("POST", "/fk", json{{"state", state_json(0, 0, 0)}}.dump()))["collision"].is_null());

    Service with(session(true));
    const json t = body(with.handle("GET", "/capabilities", ""));
    CHECK(t["table"]["present"] == true);
    CHECK(t["table"]["cell_count"] == table2().cell_count());
    CHECK(t["table"]["geometry_hash"] == to_hex(geometry_hash(BoundingBoxModel{}, FacilityConfig{})));

    SiteConfig other;
    other.collision_model.clearance = 0.2;
    CHECK_THROWS_AS(SessionState::create(other, table2()), ConfigError);
}

TEST_CASE("Service - forward kinematics endpoint")
{
    Service svc(session(true));
    const FacilityConfig cfg;

    // Zenith: both probes on the vertical axis.
    const HttpResponse zr = svc.handle("POST", "/fk", json{{"state", state_json(0, 0, 0)}}.dump());
    REQUIRE(zr.status == 200);
    const json z = body(zr);
    const ProbePair p = forward_kinematics(MachineState{}, cfg);
    for (int i = 0; i < 3; ++i)
    {
        CHECK(z["tx"]["position"][i].get<double>() == p.tx.position[i]);
        CHECK(z["rx"]["position"][i].get<double>() == p.rx.position[i]);
    }
    CHECK_THAT(z["tx"]["position"][2].get<double>(), WithinAbs(cfg.boom_radius_nominal, 1e-9));
    CHECK(z["collision"] == table2().query(MachineState{}));
    CHECK(z["boxes"]["moving"].size() > 0);

    const MachineState s{-70, -60, 60, 15, 0, 90, 3.44, 3.44};
    json sj;
    to_json(sj, s);
    const json r = body(svc.handle("POST", "/fk", json{{"state", sj}}.dump()));
    BistaticConstellation expect = machine_to_bistatic(s, cfg), got;
    from_json(r["constellation"], got);
    CHECK(got == expect);
    CHECK(r["collision"] == table2().query(s));

    // Slider budget: 50 ms per request.
    const std::string req = json{{"state", sj}}.dump();
    const auto t0 = std::chrono::steady_clock::now();
    for (int i = 0; i < 20; ++i)
        REQUIRE(svc.handle("POST", "/fk", req).status == 200);
    const double per = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count() / 20.0;
    CHECK(per < 0.05);

    const HttpResponse bad = svc.handle("POST", "/fk", "{\n  \"state\": {\"moving_az\": }\n}");
    CHECK(bad.status == 400);
    CHECK(body(bad)["error"]["line"] == 2);
    CHECK(body(bad)["error"]["column"].get<int>() > 1);

    const HttpResponse range = svc.handle("POST", "/fk", json{{"state", state_json(80, 0, 0)}}.dump());
    CHECK(range.status == 422);
    CHECK(body(range)["error"]["axis"] == "moving_az");

    CHECK(svc.handle("POST", "/fk", R"({"state": {"warp": 1}})").status == 400);
    CHECK(svc.handle("POST", "/fk", R"({"pose": {}})").status == 400);
    CHECK(svc.handle("POST", "/fk", "").status == 400);
    CHECK(svc.handle("GET", "/fk", "").status == 405);
    CHECK(svc.handle("GET", "/nowhere", "").status == 404);
}

TEST_CASE("Service - bistatic endpoint")
{
    Service svc(session(true));
    const FacilityConfig cfg;
    const MachineState s{-40, 30, -50, 10, 0, 0, 3.44, 3.44};
    json c;
    to_json(c, machine_to_bistatic(s, cfg));
    const HttpResponse r = svc.handle("POST", "/bistatic", json{{"constellation", c}}.dump());
    REQUIRE(r.status == 200);
    MachineState got;
    from_json(body(r)["state"], got);
    const BistaticConstellation back = machine_to_bistatic(got, cfg), want = machine_to_bistatic(s, cfg);
    CHECK_THAT(back.theta_ill, WithinAbs(want.theta_ill, 1e-9));
    CHECK_THAT(back.theta_obs, WithinAbs(want.theta_obs, 1e-9));
    CHECK_THAT(bistatic_angle(back), WithinAbs(bistatic_angle(want), 1e-9));

    json far = c;
    far["theta_ill"] = 170.0;
    const HttpResponse u = svc.handle("POST", "/bistatic", json{{"constellation", far}}.dump());
    CHECK(u.status == 422);
}

TEST_CASE("Service - trajectory verification endpoint")
{
    Service svc(session(true));
    const std::string colliding = row(-70, -30, 80) + row(-70, -20, 90) + row(-70, -90, 20);
    const HttpResponse r =
        svc.handle("POST", "/trajectory/verify", json{{"trajectory", colliding}, {"mode", "continuous"}}.dump());
    REQUIRE(r.status == 200);
    const json rep = body(r);
    CHECK(rep["accepted"] == false);
    CHECK(rep["first_violation"]["waypoint_index"] == 2);
    CHECK(rep["first_violation"]["kind"] == "collision");

    const json empty = body(svc.handle("POST", "/trajectory/verify", R"({"trajectory": ""})"));
    CHECK(empty["accepted"] == true);
    CHECK(empty["total_duration_s"] == 0.0);

    const HttpResponse parse =
        svc.handle("POST", "/trajectory/verify", json{{"trajectory", row(0, 0, 0) + "1 2 x 0 0 0 3.44 3.44\n"}}.dump());
    CHECK(parse.status == 400);
    CHECK(body(parse)["error"]["line"] == 2);
    CHECK(svc.handle("POST", "/trajectory/verify", R"({"trajectory": "", "mode": "fast"})").status == 400);

    // Identical requests give identical bodies.
    const std::string req = json{{"trajectory", colliding}}.dump();
    CHECK(svc.handle("POST", "/trajectory/verify", req).body == svc.handle("POST", "/trajectory/verify", req).body);
}

TEST_CASE("Service - sweep jobs")
{
    Service svc(session(false));
    BistaticConstellation c;
    c.theta_ill = c.theta_obs = 90.0;
    c.phi_obs = 30.0;
    json cj;
    to_json(cj, c);
    const json sweep{{"f_start", 2e9}, {"f_stop", 4e9}, {"f_step", 20e6}, {"window", "hann"}, {"noise_floor_db", -90.0}};
    const json req{{"scene", "two_spheres"}, {"constellation", cj}, {"sweep", sweep}, {"instrument", "facility"},
                   {"seed", 7}};
    const HttpResponse a = svc.handle("POST", "/simulate/sweep", req.dump());
    REQUIRE(a.status == 202);
    const HttpResponse b = svc.handle("POST", "/simulate/sweep", req.dump());
    svc.wait_idle();
    const std::string ja = body(a)["job"], jb = body(b)["job"];
    CHECK(ja != jb);
    const json sa = body(svc.handle("GET", "/jobs/" + ja, ""));
    REQUIRE(sa["status"] == "done");
    CHECK(sa["result"]["points"] == 101);
    const HttpResponse ra = svc.handle("GET", "/jobs/" + ja + "/record", "");
    const HttpResponse rb = svc.handle("GET", "/jobs/" + jb + "/record", "");
    REQUIRE(ra.status == 200);
    const TransferRecord rec_a = record_from_text(ra.body), rec_b = record_from_text(rb.body);
    CHECK(rec_a.s21 == rec_b.s21);

    SweepConfig cfg;
    from_json(sweep, cfg);
    const TransferRecord direct =
        synthesize_sweep(load_scene(std::string(BIRA_SOURCE_DIR) + "/data/scenes/two_spheres.json"), c, cfg,
                         InstrumentModel::facility(), 7);
    CHECK(rec_a.s21 == direct.s21);

    json unknown = req;
    unknown["scene"] = "nope";
    CHECK(svc.handle("POST", "/simulate/sweep", unknown.dump()).status == 404);
    json inl = req;
    inl["scene"] = json{{"points", json::array({json{{"name", "p"}, {"position", {0, 0, 0}}}})}};
    CHECK(svc.handle("POST", "/simulate/sweep", inl.dump()).status == 202);
    json badsweep = req;
    badsweep["sweep"]["f_step"] = 3e8;
    CHECK(svc.handle("POST", "/simulate/sweep", badsweep.dump()).status == 400);
    CHECK(svc.handle("GET", "/jobs/job-999", "").status == 404);
    svc.wait_idle();

    ServiceOptions none;
    none.job_queue_capacity = 0;
    Service full(session(false), none);
    const HttpResponse busy = full.handle("POST", "/simulate/sweep", req.dump());
    CHECK(busy.status == 503);
    CHECK(body(busy)["error"]["kind"] == "busy");
}

TEST_CASE("Service - playback stream over HTTP")
{
    Service svc(session(true));
    const int port = svc.bind_any_port("127.0.0.1");
    REQUIRE(port > 0);
    std::thread server([&] { svc.listen_after_bind(); });
    httplib::Client client("127.0.0.1", port);
    client.set_read_timeout(10, 0);

    auto collect = [&](const std::string &id, auto on_frame) {
        std::string buffer;
        std::vector<json> frames;
        auto res = client.Get("/playback/" + id + "/stream", [&](const char *data, std::size_t n) {
            buffer.append(data, n);
            std::size_t pos;
            while ((pos = buffer.find('\n')) != std::string::npos)
            {
                frames.push_back(json::parse(buffer.substr(0, pos)));
                buffer.erase(0, pos + 1);
                on_frame(frames);
            }
            return true;
        });
        REQUIRE(res);
        CHECK(res->status == 200);
        return frames;
    };

    SECTION("2-waypoint trajectory ends exactly on the target")
    {
        const std::string traj = row(-10, 20, 30) + "-5.5 25.25 33.125 7 0 0 3.44 3.44\n";
        auto res = client.Post("/playback", json{{"trajectory", traj}, {"dt", 0.01}, {"rate", 0.0}}.dump(),
                               "application/json");
        REQUIRE(res);
        REQUIRE(res->status == 201);
        const std::string id = json::parse(res->body)["playback"];
        const auto frames = collect(id, [](const auto &) {});
        REQUIRE(frames.size() > 2);
        const json &last = frames.back();
        CHECK(last["final"] == true);
        CHECK(last["state"]["moving_az"].get<double>() == -5.5);
        CHECK(last["state"]["moving_coel"].get<double>() == 25.25);
        CHECK(last["state"]["static_coel"].get<double>() == 33.125);
        CHECK(last["state"]["turntable"].get<double>() == 7.0);
        CHECK(last["collision"].is_boolean());
        for (std::size_t i = 1; i < frames.size(); ++i)
        {
            const double step = frames[i]["t"].get<double>() - frames[i - 1]["t"].get<double>();
            CHECK(step > 0.0);
            CHECK(step <= 0.01 + 1e-12);
        }
    }

    SECTION("pause and seek control frames")
    {
        const std::string traj = row(0, 0, 0) + row(0, 10, 0);
        auto res = client.Post("/playback", json{{"trajectory", traj}, {"dt", 0.05}, {"rate", 4.0}}.dump(),
                               "application/json");
        REQUIRE(res);
        const json info = json::parse(res->body);
        const std::string id = info["playback"];
        const double duration = info["duration"];
        REQUIRE(duration > 1.5);

        httplib::Client control("127.0.0.1", port), seeker("127.0.0.1", port);
        std::size_t at_pause = 0, after_pause = 0;
        bool paused = false, seeked = false;
        std::thread resumer;
        double seek_target = duration - 0.2;
        const auto frames = collect(id, [&](const std::vector<json> &f) {
            if (!paused && f.size() == 3)
            {
                paused = true;
                REQUIRE(control.Post("/playback/" + id + "/control", R"({"action": "pause"})", "application/json")
                            ->status == 200);
                at_pause = f.size();
                resumer = std::thread([&control, id, &after_pause, &f] {
                    std::this_thread::sleep_for(std::chrono::milliseconds(300));
                    after_pause = f.size();
                    control.Post("/playback/" + id + "/control",
                                 R"({"action": "seek_time", "time": )" + std::to_string(0.0) + "}",
                                 "application/json");
                    control.Post("/playback/" + id + "/control", R"({"action": "resume"})", "application/json");
                });
            }
            if (paused && !seeked && f.size() == 8)
            {
                seeked = true;
                seeker.Post("/playback/" + id + "/control",
                            json{{"action", "seek_time"}, {"time", seek_target}}.dump(), "application/json");
            }
        });
        resumer.join();
        CHECK(after_pause <= at_pause + 1);
        // After the seek the stream jumps forward to the requested time.
        bool jumped = false;
        for (std::size_t i = 8; i < frames.size(); ++i)
            jumped = jumped || frames[i]["t"].get<double>() >= seek_target - 1e-12;
        CHECK(jumped);
        CHECK(frames.size() < 20);
        CHECK(frames.back()["final"] == true);

        CHECK(client.Post("/playback/" + id + "/control", R"({"action": "rewind"})", "application/json")->status ==
              400);
        CHECK(client.Get("/playback/pb-999/stream")->status == 404);
    }

    svc.stop();
    server.join();
}

TEST_CASE("Service - concurrent requests see one session")
{
    Service svc(session(true));
    const std::string req = json{{"state", state_json(-70, -60, 60)}}.dump();
    const std::string expect = svc.handle("POST", "/fk", req).body;
    std::vector<std::thread> threads;
    std::atomic<int> mismatches{0};
    for (int t = 0; t < 4; ++t)
        threads.emplace_back([&] {
            for (int i = 0; i < 50; ++i)
                if (svc.handle("POST", "/fk", req).body != expect)
                    ++mismatches;
        });
    for (auto &t : threads)
        t.join();
    CHECK(mismatches == 0);
}

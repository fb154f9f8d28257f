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

#ifndef BIRA_SERVICE_HPP
#define BIRA_SERVICE_HPP

#include "bira/collision.hpp"
#include "bira/config.hpp"
#include "bira/dsp.hpp"
#include "bira/scattering.hpp"

#include <nlohmann/json.hpp>

#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <string>

// HTTP interface to the twin. Bodies are JSON; the playback stream is
// newline-delimited JSON. See docs/service.md for the endpoint contracts.

namespace bira
{
    // Immutable after construction; shared by every request.
    struct SessionState
    {
        SiteConfig site;
        std::optional<CollisionTable> table;
        std::map<std::string, Scene> scenes;

        // Throws ConfigError when the table was built for another geometry.
        static std::shared_ptr<const SessionState> create(SiteConfig site, std::optional<CollisionTable> table = {},
                                                          std::map<std::string, Scene> scenes = {});
        // Every *.json below `dir`, keyed by file stem.
        static std::map<std::string, Scene> load_scene_directory(const std::filesystem::path &dir);
    };

    struct ServiceOptions
    {
        std::size_t job_queue_capacity = 16;
        std::size_t job_history = 256; // finished jobs kept for GET /jobs/{id}
        std::size_t max_playback_samples = 2'000'000;
    };

    struct HttpResponse
    {
        int status = 200;
        std::string content_type = "application/json";
        std::string body;
    };

    void from_json(const nlohmann::json &j, SweepConfig &v);
    void to_json(nlohmann::json &j, const SweepConfig &v);

    class Service
    {
    public:
        explicit Service(std::shared_ptr<const SessionState> session, ServiceOptions options = {});
        ~Service();
        Service(const Service &) = delete;
        Service &operator=(const Service &) = delete;

        // Request dispatch without a socket, for every endpoint except the
        // playback stream.
        HttpResponse handle(const std::string &method, const std::string &path, const std::string &body) const;

        // Blocks until stop(). Returns false if the port cannot be bound.
        bool listen(const std::string &host, int port);
        // Binds an ephemeral port and returns it; serve with listen_after_bind().
        int bind_any_port(const std::string &host);
        bool listen_after_bind();
        void stop();

        // Blocks until the job queue is drained (tests and shutdown).
        void wait_idle() const;

    private:
        struct Impl;
        std::unique_ptr<Impl> impl_;
    };
}

#endif

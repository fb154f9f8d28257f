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

#ifndef BIRA_JSON_UTIL_HPP
#define BIRA_JSON_UTIL_HPP

#include "bira/common.hpp"

#include <nlohmann/json.hpp>

#include <functional>
#include <map>
#include <string>

namespace bira
{
    namespace
    {
        using json = nlohmann::json;
        using FieldReader = std::function<void(const json &)>;

        // Applies the reader registered for each key; unknown keys are errors.
        [[maybe_unused]] void read_object(const json &j, const std::string &context, const std::map<std::string, FieldReader> &fields)
        {
            if (!j.is_object())
                throw ConfigError(context + " must be an object");
            for (const auto &[key, value] : j.items())
            {
                const auto it = fields.find(key);
                if (it == fields.end())
                    throw ConfigError("unknown key '" + key + "' in " + context);
                try
                {
                    it->second(value);
                }
                catch (const json::exception &e)
                {
                    throw ConfigError(context + "." + key + ": " + e.what());
                }
            }
        }

        [[maybe_unused]] FieldReader number(double &target)
        {
            return [&target](const json &v) {
                if (!v.is_number())
                    throw ConfigError("expected a number, got " + v.dump());
                target = v.get<double>();
            };
        }

        [[maybe_unused]] FieldReader integer(int &target)
        {
            return [&target](const json &v) {
                if (!v.is_number_integer())
                    throw ConfigError("expected an integer, got " + v.dump());
                target = v.get<int>();
            };
        }

        [[maybe_unused]] FieldReader boolean(bool &target)
        {
            return [&target](const json &v) {
                if (!v.is_boolean())
                    throw ConfigError("expected a boolean, got " + v.dump());
                target = v.get<bool>();
            };
        }

        [[maybe_unused]] FieldReader text(std::string &target)
        {
            return [&target](const json &v) {
                if (!v.is_string())
                    throw ConfigError("expected a string, got " + v.dump());
                target = v.get<std::string>();
            };
        }
    }
}

#endif

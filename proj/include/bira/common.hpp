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

#ifndef BIRA_COMMON_HPP
#define BIRA_COMMON_HPP

#include <cmath>
#include <complex>
#include <numbers>
#include <stdexcept>
#include <string>

namespace bira
{
    using cdouble = std::complex<double>;

    inline constexpr double kSpeedOfLight = 299792458.0; // m/s
    inline constexpr double kPi = std::numbers::pi;

    // Error hierarchy. Every error carries a short machine-readable kind so
    // the CLI and the service can report it on a single line.
    class Error : public std::runtime_error
    {
    public:
        Error(std::string kind, const std::string &message)
            : std::runtime_error(message), kind_(std::move(kind)) {}
        const std::string &kind() const noexcept { return kind_; }

    private:
        std::string kind_;
    };

    // Value outside an axis limit or a grid.
    class RangeError : public Error
    {
    public:
        RangeError(std::string axis, const std::string &message)
            : Error("range", message), axis_(std::move(axis)) {}
        const std::string &axis() const noexcept { return axis_; }

    private:
        std::string axis_;
    };

    // Bistatic constellation that no machine state realizes.
    class ReachabilityError : public Error
    {
    public:
        ReachabilityError(std::string bound, const std::string &message)
            : Error("reachability", message), bound_(std::move(bound)) {}
        const std::string &bound() const noexcept { return bound_; }

    private:
        std::string bound_;
    };

    class ConfigError : public Error
    {
    public:
        explicit ConfigError(const std::string &message) : Error("config", message) {}
    };

    class GeometryError : public Error
    {
    public:
        explicit GeometryError(const std::string &message) : Error("geometry", message) {}
    };

    // Positioned parse failure (1-based line and column). A failure caused by
    // a value outside an axis limit names the axis and is of kind "range".
    class ParseError : public Error
    {
    public:
        ParseError(int line, int column, const std::string &message, std::string axis = {})
            : Error(axis.empty() ? "parse" : "range",
                    "line " + std::to_string(line) + ", column " + std::to_string(column) + ": " + message),
              line_(line), column_(column), axis_(std::move(axis)) {}
        int line() const noexcept { return line_; }
        int column() const noexcept { return column_; }
        const std::string &axis() const noexcept { return axis_; }

    private:
        int line_;
        int column_;
        std::string axis_;
    };

    class FormatError : public Error
    {
    public:
        explicit FormatError(const std::string &message) : Error("format", message) {}
    };

    inline constexpr double deg2rad(double deg) { return deg * (kPi / 180.0); }
    inline constexpr double rad2deg(double rad) { return rad * (180.0 / kPi); }

    // Wraps an angle into [0, 360).
    inline double wrap360(double deg)
    {
        double r = std::fmod(deg, 360.0);
        if (r < 0.0)
            r += 360.0;
        if (r >= 360.0)
            r -= 360.0;
        return r;
    }

    // Wraps an angle into [-180, 180).
    inline double wrap180(double deg)
    {
        return wrap360(deg + 180.0) - 180.0;
    }

    // Smallest absolute difference of two angles, in [0, 180].
    inline double angle_distance(double a, double b)
    {
        return std::abs(wrap180(a - b));
    }

    inline double db10(double power) { return 10.0 * std::log10(power); }
    inline double db20(double amplitude) { return 20.0 * std::log10(amplitude); }
    inline double from_db10(double db) { return std::pow(10.0, db / 10.0); }
    inline double from_db20(double db) { return std::pow(10.0, db / 20.0); }
}

#endif

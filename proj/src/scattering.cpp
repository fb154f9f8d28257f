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

#include "bira/scattering.hpp"
#include "bira/io.hpp"
#include "json_util.hpp"

#include <Eigen/Geometry>

#include <set>

namespace bira
{
    int mie_term_count(double ka)
    {
        return static_cast<int>(std::ceil(ka + 4.05 * std::cbrt(ka) + 2.0));
    }

    MieAmplitudes mie_pec_amplitudes(double x, double theta_s_deg)
    {
        if (!(x > 0.0) || !std::isfinite(x))
            throw ConfigError("size parameter must be positive");
        if (x > 1e4)
            throw RangeError("ka", "size parameter " + format_double(x) + " exceeds 1e4");
        const int n_max = mie_term_count(x);

        // Logarithmic derivative of psi_n, downward from well above n_max.
        const int n_start = std::max(n_max, static_cast<int>(std::ceil(x))) + 16;
        std::vector<double> d(static_cast<std::size_t>(n_start) + 1, 0.0);
        for (int n = n_start; n > 0; --n)
        {
            const double q = n / x;
            d[n - 1] = q - 1.0 / (d[n] + q);
        }

        const double mu = std::cos(deg2rad(theta_s_deg));
        double psi_prev = std::sin(x);   // psi_{n-1}
        double zeta_prev = -std::cos(x); // x y_{n-1}
        double zeta = -std::cos(x) / x - std::sin(x);
        double pi_prev = 0.0, pi_n = 1.0;
        cdouble s1 = 0.0, s2 = 0.0;
        for (int n = 1; n <= n_max; ++n)
        {
            const double q = n / x;
            const double psi = psi_prev / (d[n] + q);
            const cdouble xi(psi, zeta);
            const cdouble xi_prev(psi_prev, zeta_prev);
            const cdouble a = (d[n] * psi) / (xi_prev - q * xi);
            const cdouble b = psi / xi;

            const double tau = n * mu * pi_n - (n + 1.0) * pi_prev;
            const double w = (2.0 * n + 1.0) / (n * (n + 1.0));
            s1 += w * (a * pi_n + b * tau);
            s2 += w * (a * tau + b * pi_n);

            const double pi_next = ((2.0 * n + 1.0) / n) * mu * pi_n - ((n + 1.0) / n) * pi_prev;
            pi_prev = pi_n;
            pi_n = pi_next;
            const double zeta_next = (2.0 * n + 1.0) / x * zeta - zeta_prev;
            zeta_prev = zeta;
            zeta = zeta_next;
            psi_prev = psi;
        }
        return {s1, s2};
    }

    std::string_view polarization_name(Polarization p)
    {
        return p == Polarization::Theta ? "theta" : "phi";
    }

    Polarization polarization_from_name(std::string_view name)
    {
        if (name == "theta")
            return Polarization::Theta;
        if (name == "phi")
            return Polarization::Phi;
        throw ConfigError("unknown polarization '" + std::string(name) + "'");
    }

    namespace
    {
        double wavenumber(double frequency)
        {
            return 2.0 * kPi * frequency / kSpeedOfLight;
        }

        void check_sphere_args(double radius, double frequency)
        {
            if (!(radius > 0.0) || !std::isfinite(radius))
                throw ConfigError("sphere radius must be positive");
            if (!(frequency > 0.0) || !std::isfinite(frequency))
                throw ConfigError("frequency must be positive");
        }

        // Engineering (e^{jwt}) scattering length from a Bohren-Huffman amplitude.
        cdouble to_scattering_length(cdouble s, double k)
        {
            return std::conj(s) / cdouble(0.0, k);
        }
    }

    MieResult mie_bistatic_rcs(double radius, double frequency, double beta_deg, Polarization pol)
    {
        check_sphere_args(radius, frequency);
        if (!(beta_deg >= 0.0 && beta_deg <= 180.0))
            throw RangeError("beta", "bistatic angle must lie in [0, 180]");
        const double k = wavenumber(frequency);
        const MieAmplitudes s = mie_pec_amplitudes(k * radius, 180.0 - beta_deg);
        MieResult r;
        r.amplitude = pol == Polarization::Theta ? s.s1 : s.s2;
        r.rcs = 4.0 * kPi * std::norm(r.amplitude) / (k * k);
        r.scattering_length = to_scattering_length(r.amplitude, k);
        return r;
    }

    cdouble mie_scattering_length(double radius, double frequency, const Vec3 &k_inc, const Vec3 &k_sca,
                                  const Vec3 &p_tx, const Vec3 &p_rx)
    {
        check_sphere_args(radius, frequency);
        const Vec3 ki = k_inc.normalized();
        const Vec3 ks = k_sca.normalized();
        const double theta_s = rad2deg(std::atan2(ki.cross(ks).norm(), ki.dot(ks)));
        Vec3 n = ki.cross(ks);
        if (n.norm() < 1e-12)
        {
            // Forward or backward: every plane through k_inc is a scattering plane.
            n = ki.unitOrthogonal();
        }
        n.normalize();
        const Vec3 e_perp = -n;
        const Vec3 e_par_i = n.cross(ki);
        const Vec3 e_par_s = n.cross(ks);
        const double k = wavenumber(frequency);
        const MieAmplitudes s = mie_pec_amplitudes(k * radius, theta_s);
        const cdouble amp = s.s2 * p_rx.dot(e_par_s) * e_par_i.dot(p_tx) + s.s1 * p_rx.dot(e_perp) * e_perp.dot(p_tx);
        return to_scattering_length(amp, k);
    }

    SpherePathModel sphere_path_model(double beta_deg, double gantry_radius, double sphere_radius,
                                      double creeping_offset)
    {
        const double h = deg2rad(beta_deg) / 2.0;
        const double a = gantry_radius - sphere_radius * std::abs(std::cos(h));
        const double b = sphere_radius * std::sin(h);
        SpherePathModel m;
        m.specular_extra = 2.0 * std::sqrt(a * a + b * b) - 2.0 * gantry_radius;
        m.creeping_extra = std::abs(beta_deg - 180.0) / 360.0 * kPi * 2.0 * sphere_radius + creeping_offset;
        return m;
    }

    // Scene ------------------------------------------------------------------

    double Limb::angle(double t) const
    {
        double a = 0.0;
        for (const auto &h : harmonics)
            a += h.amplitude * std::sin(2.0 * kPi * h.order * t / period + h.phase);
        return a;
    }

    double Limb::angle_rate(double t) const
    {
        double r = 0.0;
        for (const auto &h : harmonics)
        {
            const double w = 2.0 * kPi * h.order / period;
            r += h.amplitude * w * std::cos(w * t + h.phase);
        }
        return r;
    }

    void Scene::validate(double turntable_radius) const
    {
        const auto inside = [&](const Vec3 &p, double extra, const std::string &what) {
            if (!p.allFinite())
                throw ConfigError(what + ": non-finite position");
            if (std::hypot(p.x(), p.y()) + extra > turntable_radius + 1e-12)
                throw ConfigError(what + " lies outside the turntable radius");
        };
        for (const auto &s : spheres)
        {
            if (!(s.radius > 0.0) || !std::isfinite(s.radius))
                throw ConfigError("sphere '" + s.name + "': radius must be positive");
            if (!std::isfinite(s.orbit_rate))
                throw ConfigError("sphere '" + s.name + "': orbit rate must be finite");
            inside(s.center, s.radius, "sphere '" + s.name + "'");
        }
        for (const auto &p : points)
        {
            if (!std::isfinite(p.amplitude.real()) || !std::isfinite(p.amplitude.imag()))
                throw ConfigError("point '" + p.name + "': amplitude must be finite");
            inside(p.position, 0.0, "point '" + p.name + "'");
        }
        for (const auto &l : limbs)
        {
            const std::string what = "limb '" + l.name + "'";
            if (!(l.period > 0.0) || !std::isfinite(l.period))
                throw ConfigError(what + ": period must be positive");
            if (!(l.axis.norm() > 0.0) || !l.axis.allFinite())
                throw ConfigError(what + ": axis must be non-zero");
            if (!l.velocity.allFinite())
                throw ConfigError(what + ": velocity must be finite");
            for (const auto &h : l.harmonics)
            {
                if (h.order < 1)
                    throw ConfigError(what + ": harmonic order must be >= 1");
                if (!std::isfinite(h.amplitude) || !std::isfinite(h.phase))
                    throw ConfigError(what + ": harmonic values must be finite");
            }
            inside(l.pivot, 0.0, what + " pivot");
            for (const auto &p : l.points)
                inside(p.position, 0.0, what + " point '" + p.name + "'");
        }
    }

    namespace
    {
        FieldReader vec3(Vec3 &target)
        {
            return [&target](const json &v) {
                if (!v.is_array() || v.size() != 3)
                    throw ConfigError("expected [x, y, z], got " + v.dump());
                for (int i = 0; i < 3; ++i)
                {
                    if (!v[i].is_number())
                        throw ConfigError("expected [x, y, z], got " + v.dump());
                    target[i] = v[i].get<double>();
                }
            };
        }

        FieldReader complex_value(cdouble &target)
        {
            return [&target](const json &v) {
                if (v.is_number())
                {
                    target = v.get<double>();
                    return;
                }
                if (!v.is_array() || v.size() != 2 || !v[0].is_number() || !v[1].is_number())
                    throw ConfigError("expected a number or [re, im], got " + v.dump());
                target = {v[0].get<double>(), v[1].get<double>()};
            };
        }

        json vec_json(const Vec3 &v)
        {
            return json::array({v.x(), v.y(), v.z()});
        }

        PointScatterer read_point(const json &j, const std::string &context)
        {
            PointScatterer p;
            read_object(j, context, {{"name", text(p.name)},
                                     {"position", vec3(p.position)},
                                     {"amplitude", complex_value(p.amplitude)}});
            return p;
        }

        json point_json(const PointScatterer &p)
        {
            return {{"name", p.name},
                    {"position", vec_json(p.position)},
                    {"amplitude", json::array({p.amplitude.real(), p.amplitude.imag()})}};
        }

        template <class T, class F>
        FieldReader list(std::vector<T> &target, const std::string &context, F read_one)
        {
            return [&target, context, read_one](const json &v) {
                if (!v.is_array())
                    throw ConfigError(context + " must be an array");
                target.clear();
                for (std::size_t i = 0; i < v.size(); ++i)
                    target.push_back(read_one(v[i], context + "[" + std::to_string(i) + "]"));
            };
        }
    }

    Scene parse_scene(const std::string &json_text)
    {
        json j;
        try
        {
            j = json::parse(json_text);
        }
        catch (const json::parse_error &e)
        {
            throw ConfigError(std::string("scene: ") + e.what());
        }
        Scene scene;
        auto read_sphere = [](const json &v, const std::string &ctx) {
            SphereTarget s;
            std::string model = "mie";
            read_object(v, ctx, {{"name", text(s.name)},
                                 {"center", vec3(s.center)},
                                 {"radius", number(s.radius)},
                                 {"model", text(model)},
                                 {"orbit_rate_deg_s", number(s.orbit_rate)}});
            if (model == "mie")
                s.model = SphereModel::Mie;
            else if (model == "geometric")
                s.model = SphereModel::Geometric;
            else
                throw ConfigError(ctx + ".model: expected 'mie' or 'geometric'");
            return s;
        };
        auto read_limb = [](const json &v, const std::string &ctx) {
            Limb l;
            LimbHarmonic fundamental;
            bool has_fundamental = false;
            read_object(v, ctx,
                        {{"name", text(l.name)},
                         {"pivot", vec3(l.pivot)},
                         {"axis", vec3(l.axis)},
                         {"period", number(l.period)},
                         {"amplitude", [&](const json &a) { has_fundamental = true; number(fundamental.amplitude)(a); }},
                         {"phase", [&](const json &a) { has_fundamental = true; number(fundamental.phase)(a); }},
                         {"harmonics", list(l.harmonics, ctx + ".harmonics",
                                            [](const json &h, const std::string &hc) {
                                                LimbHarmonic out;
                                                read_object(h, hc, {{"order", integer(out.order)},
                                                                    {"amplitude", number(out.amplitude)},
                                                                    {"phase", number(out.phase)}});
                                                return out;
                                            })},
                         {"velocity", vec3(l.velocity)},
                         {"points", list(l.points, ctx + ".points", read_point)}});
            if (has_fundamental)
                l.harmonics.insert(l.harmonics.begin(), fundamental);
            return l;
        };
        read_object(j, "scene",
                    {{"spheres", list(scene.spheres, "spheres", read_sphere)},
                     {"points", list(scene.points, "points", read_point)},
                     {"limbs", list(scene.limbs, "limbs", read_limb)},
                     {"options", [&](const json &v) {
                          read_object(v, "options",
                                      {{"shadow_attenuation_db", number(scene.options.shadow_attenuation_db)},
                                       {"inter_target", boolean(scene.options.inter_target)},
                                       {"creeping_decay_db_per_m", number(scene.options.creeping_decay_db_per_m)},
                                       {"creeping_offset", number(scene.options.creeping_offset)}});
                      }}});
        if (scene.options.shadow_attenuation_db < 0.0 || !std::isfinite(scene.options.shadow_attenuation_db))
            throw ConfigError("options.shadow_attenuation_db must be >= 0");
        if (scene.options.creeping_decay_db_per_m < 0.0 || !std::isfinite(scene.options.creeping_decay_db_per_m))
            throw ConfigError("options.creeping_decay_db_per_m must be >= 0");
        return scene;
    }

    std::string scene_to_json(const Scene &scene)
    {
        json j;
        j["spheres"] = json::array();
        for (const auto &s : scene.spheres)
            j["spheres"].push_back({{"name", s.name},
                                    {"center", vec_json(s.center)},
                                    {"radius", s.radius},
                                    {"model", s.model == SphereModel::Mie ? "mie" : "geometric"},
                                    {"orbit_rate_deg_s", s.orbit_rate}});
        j["points"] = json::array();
        for (const auto &p : scene.points)
            j["points"].push_back(point_json(p));
        j["limbs"] = json::array();
        for (const auto &l : scene.limbs)
        {
            json h = json::array();
            for (const auto &x : l.harmonics)
                h.push_back({{"order", x.order}, {"amplitude", x.amplitude}, {"phase", x.phase}});
            json pts = json::array();
            for (const auto &p : l.points)
                pts.push_back(point_json(p));
            j["limbs"].push_back({{"name", l.name},
                                  {"pivot", vec_json(l.pivot)},
                                  {"axis", vec_json(l.axis)},
                                  {"period", l.period},
                                  {"harmonics", h},
                                  {"velocity", vec_json(l.velocity)},
                                  {"points", pts}});
        }
        j["options"] = {{"shadow_attenuation_db", scene.options.shadow_attenuation_db},
                        {"inter_target", scene.options.inter_target},
                        {"creeping_decay_db_per_m", scene.options.creeping_decay_db_per_m},
                        {"creeping_offset", scene.options.creeping_offset}};
        return j.dump(2) + "\n";
    }

    Scene load_scene(const std::filesystem::path &path)
    {
        return parse_scene(read_text_file(path));
    }

    ProbeGeometry probes_from_constellation(const BistaticConstellation &c)
    {
        ProbeGeometry p;
        p.tx = illuminator_position(c);
        p.rx = observer_position(c);
        const double a = deg2rad(c.pol_ill), b = deg2rad(c.pol_obs);
        p.pol_tx = std::cos(a) * theta_hat(c.theta_ill, c.phi_ill) + std::sin(a) * phi_hat(c.theta_ill, c.phi_ill);
        p.pol_rx = std::cos(b) * theta_hat(c.theta_obs, c.phi_obs) + std::sin(b) * phi_hat(c.theta_obs, c.phi_obs);
        return p;
    }

    std::string_view path_kind_name(PathKind k)
    {
        switch (k)
        {
        case PathKind::Los:
            return "los";
        case PathKind::Specular:
            return "specular";
        case PathKind::Creeping:
            return "creeping";
        case PathKind::InterTarget:
            return "inter_target";
        }
        return "unknown";
    }

    cdouble PathContribution::transfer(double frequency) const
    {
        cdouble a = amplitude;
        if (mie)
            a = mie->factor * mie_scattering_length(mie->radius, frequency, mie->k_inc, mie->k_sca, mie->p_tx, mie->p_rx);
        const double phase = -2.0 * kPi * frequency * length / kSpeedOfLight;
        return a * std::polar(1.0, phase) / spreading;
    }

    double bistatic_range_rate(const Vec3 &position, const Vec3 &velocity, const ProbeGeometry &probes)
    {
        const Vec3 u_tx = (position - probes.tx).normalized();
        const Vec3 u_rx = (position - probes.rx).normalized();
        return velocity.dot(u_tx + u_rx);
    }

    namespace
    {
        struct Placed
        {
            std::string name;
            Vec3 position;
            Vec3 velocity;
            cdouble amplitude;
        };

        Vec3 orbit(const Vec3 &p, double rate_deg, double t)
        {
            return Eigen::AngleAxisd(deg2rad(rate_deg * t), Vec3::UnitZ()) * p;
        }

        std::vector<Placed> place_points(const Scene &scene, double t)
        {
            std::vector<Placed> out;
            for (const auto &p : scene.points)
                out.push_back({p.name, p.position, Vec3::Zero(), p.amplitude});
            for (const auto &l : scene.limbs)
            {
                const Vec3 axis = l.axis.normalized();
                const Eigen::AngleAxisd rot(l.angle(t), axis);
                const double rate = l.angle_rate(t);
                const Vec3 pivot = l.pivot + l.velocity * t;
                for (const auto &p : l.points)
                {
                    const Vec3 x = pivot + rot * (p.position - l.pivot);
                    const Vec3 v = rate * axis.cross(x - pivot) + l.velocity;
                    out.push_back({l.name + "/" + p.name, x, v, p.amplitude});
                }
            }
            return out;
        }

        // True if the open segment a-b passes through the sphere.
        bool segment_hits_sphere(const Vec3 &a, const Vec3 &b, const Vec3 &c, double r)
        {
            const Vec3 ab = b - a;
            const double len2 = ab.squaredNorm();
            double s = len2 > 0.0 ? (c - a).dot(ab) / len2 : 0.0;
            s = std::clamp(s, 0.0, 1.0);
            return (a + s * ab - c).norm() < r;
        }

        void check_probe_clearance(const Vec3 &x, double r, const ProbeGeometry &probes, const std::string &name)
        {
            const double tol = 1e-6;
            if ((x - probes.tx).norm() <= r + tol || (x - probes.rx).norm() <= r + tol)
                throw GeometryError("scatterer '" + name + "' coincides with a probe");
        }
    }

    std::vector<ScattererState> animate_scene(const Scene &scene, double t, const ProbeGeometry &probes)
    {
        std::vector<ScattererState> out;
        auto add = [&](const std::string &name, const Vec3 &x, const Vec3 &v, cdouble amp) {
            ScattererState s;
            s.name = name;
            s.position = x;
            s.velocity = v;
            s.amplitude = amp;
            s.range_rate = bistatic_range_rate(x, v, probes);
            s.path_length = (x - probes.tx).norm() + (x - probes.rx).norm();
            out.push_back(s);
        };
        for (const auto &p : place_points(scene, t))
            add(p.name, p.position, p.velocity, p.amplitude);
        for (const auto &s : scene.spheres)
        {
            const Vec3 c = orbit(s.center, s.orbit_rate, t);
            const Vec3 v = deg2rad(s.orbit_rate) * Vec3::UnitZ().cross(c);
            add(s.name, c, v, s.radius / 2.0);
        }
        return out;
    }

    std::vector<PathContribution> scene_paths(const Scene &scene, const ProbeGeometry &probes, double t,
                                              double reference_frequency)
    {
        struct Ball
        {
            const SphereTarget *target;
            Vec3 center;
        };
        std::vector<Ball> balls;
        for (const auto &s : scene.spheres)
            balls.push_back({&s, orbit(s.center, s.orbit_rate, t)});
        const std::vector<Placed> pts = place_points(scene, t);
        const double shadow = from_db20(-scene.options.shadow_attenuation_db);

        // Occluded if a leg to either probe crosses a sphere other than `self`.
        auto occluded = [&](const Vec3 &x, const SphereTarget *self) {
            for (const auto &b : balls)
            {
                if (b.target == self)
                    continue;
                if (segment_hits_sphere(probes.tx, x, b.center, b.target->radius) ||
                    segment_hits_sphere(x, probes.rx, b.center, b.target->radius))
                    return true;
            }
            return false;
        };

        std::vector<PathContribution> paths;
        for (const auto &p : pts)
        {
            check_probe_clearance(p.position, 0.0, probes, p.name);
            PathContribution c;
            c.kind = PathKind::Los;
            c.target = p.name;
            const double d1 = (p.position - probes.tx).norm(), d2 = (probes.rx - p.position).norm();
            c.length = d1 + d2;
            c.spreading = d1 * d2;
            c.occluded = occluded(p.position, nullptr);
            c.amplitude = p.amplitude * (c.occluded ? shadow : 1.0);
            paths.push_back(c);
        }

        for (const auto &b : balls)
        {
            const SphereTarget &s = *b.target;
            check_probe_clearance(b.center, s.radius, probes, s.name);
            const Vec3 to_tx = probes.tx - b.center, to_rx = probes.rx - b.center;
            const double d1 = to_tx.norm(), d2 = to_rx.norm();
            const bool occ = occluded(b.center, &s);
            const double factor = occ ? shadow : 1.0;
            if (s.model == SphereModel::Mie)
            {
                PathContribution c;
                c.kind = PathKind::Los;
                c.target = s.name;
                c.length = d1 + d2;
                c.spreading = d1 * d2;
                c.occluded = occ;
                c.mie = PathContribution::MieGeometry{s.radius, -to_tx, to_rx, probes.pol_tx, probes.pol_rx, factor};
                c.amplitude = factor * mie_scattering_length(s.radius, reference_frequency, -to_tx, to_rx,
                                                             probes.pol_tx, probes.pol_rx);
                paths.push_back(c);
                continue;
            }
            const Vec3 u1 = to_tx / d1, u2 = to_rx / d2;
            const double beta = rad2deg(std::atan2(u1.cross(u2).norm(), u1.dot(u2)));
            const Vec3 bis = u1 + u2;
            if (bis.norm() > 1e-9)
            {
                // Specular point on the bisector of the two probe directions.
                const Vec3 n = bis.normalized();
                const Vec3 x = b.center + s.radius * n;
                const Vec3 reflected = 2.0 * n.dot(probes.pol_tx) * n - probes.pol_tx;
                PathContribution c;
                c.kind = PathKind::Specular;
                c.target = s.name;
                const double a1 = (x - probes.tx).norm(), a2 = (probes.rx - x).norm();
                c.length = a1 + a2;
                c.spreading = d1 * d2;
                c.occluded = occ;
                c.amplitude = factor * (s.radius / 2.0) * probes.pol_rx.dot(reflected);
                paths.push_back(c);
            }
            const double arc = std::abs(beta - 180.0) / 360.0 * 2.0 * kPi * s.radius;
            PathContribution c;
            c.kind = PathKind::Creeping;
            c.target = s.name;
            c.length = d1 + d2 + arc + scene.options.creeping_offset;
            c.spreading = d1 * d2;
            c.occluded = occ;
            c.amplitude = factor * (s.radius / 2.0) * probes.pol_rx.dot(probes.pol_tx) *
                          from_db20(-scene.options.creeping_decay_db_per_m * arc);
            paths.push_back(c);
        }

        if (scene.options.inter_target)
        {
            // Every scatterer acts as a point with its own amplitude; spheres
            // use the geometric-optics value r/2.
            std::vector<Placed> all = pts;
            for (const auto &b : balls)
                all.push_back({b.target->name, b.center, Vec3::Zero(), b.target->radius / 2.0});
            for (std::size_t i = 0; i < all.size(); ++i)
                for (std::size_t k = 0; k < all.size(); ++k)
                {
                    if (i == k)
                        continue;
                    const double d1 = (all[i].position - probes.tx).norm();
                    const double d12 = (all[k].position - all[i].position).norm();
                    const double d2 = (probes.rx - all[k].position).norm();
                    if (d12 < 1e-9)
                        continue;
                    PathContribution c;
                    c.kind = PathKind::InterTarget;
                    c.target = all[i].name + ">" + all[k].name;
                    c.length = d1 + d12 + d2;
                    c.spreading = d1 * d12 * d2;
                    c.amplitude = all[i].amplitude * all[k].amplitude;
                    paths.push_back(c);
                }
        }
        return paths;
    }

    TransferRecord scene_response(const Scene &scene, const ProbeGeometry &probes, const FrequencyGrid &grid,
                                  double t)
    {
        TransferRecord r;
        r.grid = grid;
        r.time = t;
        r.s21.assign(grid.count, cdouble(0.0, 0.0));
        const auto paths = scene_paths(scene, probes, t, grid.at(0));
        for (std::size_t k = 0; k < grid.count; ++k)
        {
            const double f = grid.at(k);
            cdouble sum = 0.0;
            for (const auto &p : paths)
                sum += p.transfer(f);
            r.s21[k] = sum;
        }
        return r;
    }

    TransferRecord scene_response(const Scene &scene, const BistaticConstellation &c, const FrequencyGrid &grid,
                                  double t)
    {
        TransferRecord r = scene_response(scene, probes_from_constellation(c), grid, t);
        r.constellation = c;
        return r;
    }
}

#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <initializer_list>
#include <numbers>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "gkcat/curve.hpp"

namespace gkcat {

/// One analytic piece of a path in the z-plane, parametrized over t in [0,1].
struct PathSegment {
    std::function<Complex(double)> pos;
    std::function<Complex(double)> vel;  // d pos / dt
};

struct Path {
    std::vector<PathSegment> segments;
    std::string name;

    Complex start() const { return segments.front().pos(0.0); }
    Complex end() const { return segments.back().pos(1.0); }

    /// Largest jump between consecutive segment endpoints.
    double continuity_defect() const {
        double worst = 0.0;
        for (std::size_t i = 0; i + 1 < segments.size(); ++i)
            worst = std::max(worst, std::abs(segments[i].pos(1.0) -
                                             segments[i + 1].pos(0.0)));
        return worst;
    }
};

inline PathSegment line_segment(Complex z0, Complex z1) {
    return {[=](double t) { return z0 + t * (z1 - z0); },
            [=](double) { return z1 - z0; }};
}

/// Arc of an axis-aligned ellipse: z(t) = center + rx cos(ang) + i ry sin(ang),
/// ang sweeping linearly from ang0 to ang1.
inline PathSegment ellipse_arc(Complex center, double rx, double ry,
                               double ang0, double ang1) {
    const double span = ang1 - ang0;
    return {[=](double t) {
                const double a = ang0 + span * t;
                return center + Complex(rx * std::cos(a), ry * std::sin(a));
            },
            [=](double t) {
                const double a = ang0 + span * t;
                return Complex(-rx * std::sin(a) * span, ry * std::cos(a) * span);
            }};
}

/// Circular arc on |z| = radius from angle ang0 to ang1.
inline PathSegment circle_arc(double radius, double ang0, double ang1) {
    return ellipse_arc(Complex(0.0), radius, radius, ang0, ang1);
}

/// Path from z = 1 to z = 1/(2 lambda) whose interior lies strictly in the
/// lower half-plane: a half-ellipse through the two real endpoints with
/// depth min(0.3, 1/(2 lambda)) unless overridden.
inline Path make_path_c1(const CurveParams& p, double depth = -1.0) {
    const double z_end = 0.5 / p.lambda;
    if (depth <= 0.0) depth = std::min(0.3, z_end);
    const double cx = 0.5 * (1.0 + z_end);
    const double rx = 0.5 * (1.0 - z_end);
    // angle 0 -> pi keeps Im(z) = -depth sin(ang) <= 0
    Path path;
    path.name = "c1";
    path.segments.push_back(ellipse_arc(Complex(cx), rx, -depth, 0.0, std::numbers::pi));
    return path;
}

/// Path from z = 1 to z = -1 through the lower half-plane, passing below
/// both 0 and 1/lambda: half-ellipse of depth 0.75 centered at the origin.
inline Path make_path_c2(const CurveParams& /*p*/, double depth = 0.75) {
    Path path;
    path.name = "c2";
    path.segments.push_back(ellipse_arc(Complex(0.0), 1.0, -depth, 0.0, std::numbers::pi));
    return path;
}

inline Path reversed(const Path& in) {
    Path out;
    out.name = in.name + "^-1";
    for (auto it = in.segments.rbegin(); it != in.segments.rend(); ++it) {
        auto pos = it->pos;
        auto vel = it->vel;
        out.segments.push_back({[pos](double t) { return pos(1.0 - t); },
                                [vel](double t) { return -vel(1.0 - t); }});
    }
    return out;
}

/// Image under z -> conj(z) (mirror across the real axis).
inline Path conjugated(const Path& in) {
    Path out;
    out.name = "conj(" + in.name + ")";
    for (const auto& seg : in.segments) {
        auto pos = seg.pos;
        auto vel = seg.vel;
        out.segments.push_back(
            {[pos](double t) { return std::conj(pos(t)); },
             [vel](double t) { return std::conj(vel(t)); }});
    }
    return out;
}

/// Image under z -> 1/z.
inline Path inverted(const Path& in) {
    Path out;
    out.name = "inv(" + in.name + ")";
    for (const auto& seg : in.segments) {
        auto pos = seg.pos;
        auto vel = seg.vel;
        out.segments.push_back({[pos](double t) { return 1.0 / pos(t); },
                                [vel, pos](double t) {
                                    const Complex z = pos(t);
                                    return -vel(t) / (z * z);
                                }});
    }
    return out;
}

inline Path concat(std::initializer_list<Path> parts) {
    Path out;
    for (const auto& part : parts) {
        if (!out.name.empty()) out.name += ".";
        out.name += part.name;
        out.segments.insert(out.segments.end(), part.segments.begin(),
                            part.segments.end());
    }
    return out;
}

/// Minimum distance from the sampled path to any of the given points.
inline double min_clearance(const Path& path, std::span<const Complex> points,
                            int samples_per_segment = 10000) {
    double best = std::numeric_limits<double>::infinity();
    for (const auto& seg : path.segments) {
        for (int i = 0; i <= samples_per_segment; ++i) {
            const Complex z = seg.pos(static_cast<double>(i) / samples_per_segment);
            for (const Complex& q : points)
                best = std::min(best, std::abs(z - q));
        }
    }
    return best;
}

/// Clearance requirement for admissible paths.
inline double required_clearance(const CurveParams& p) {
    return 1e-3 * std::min(1.0 / p.lambda, p.lambda - 1.0);
}

}  // namespace gkcat

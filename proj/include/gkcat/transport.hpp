#pragma once

#include <array>
#include <cmath>
#include <cstddef>

#include "gkcat/curve.hpp"
#include "gkcat/errors.hpp"
#include "gkcat/mat2.hpp"
#include "gkcat/path.hpp"

namespace gkcat {

struct TransportOptions {
    double rel_tol = 1e-12;
    double abs_tol = 1e-14;
    double det_ceiling = 1e-6;     // hard abort threshold on |det F - 1|
    double snap_move_limit = 1e-6; // root snap larger than this means a missed branch
    long max_steps = 2000000;      // per path, attempted steps
};

struct TransportResult {
    SurfacePoint endpoint;
    Mat2 frame;
    double det_drift = 0.0;      // max |det F - 1| seen along the way
    long step_count = 0;         // accepted steps
    double error_estimate = 0.0; // accumulated local truncation estimates
};

namespace detail {

// Dormand-Prince 5(4) coefficients.
inline constexpr double kC[7] = {0.0, 1.0 / 5, 3.0 / 10, 4.0 / 5, 8.0 / 9, 1.0, 1.0};
inline constexpr double kA[7][6] = {
    {},
    {1.0 / 5},
    {3.0 / 40, 9.0 / 40},
    {44.0 / 45, -56.0 / 15, 32.0 / 9},
    {19372.0 / 6561, -25360.0 / 2187, 64448.0 / 6561, -212.0 / 729},
    {9017.0 / 3168, -355.0 / 33, 46732.0 / 5247, 49.0 / 176, -5103.0 / 18656},
    {35.0 / 384, 0.0, 500.0 / 1113, 125.0 / 192, -2187.0 / 6784, 11.0 / 84}};
// difference between 5th- and 4th-order weights
inline constexpr double kE[7] = {71.0 / 57600,    0.0,          -71.0 / 16695,
                                 71.0 / 1920,     -17253.0 / 339200,
                                 22.0 / 525,      -1.0 / 40};

/// One adaptive pass over t in [0,1] for a complex N-dimensional system.
/// rhs(t, y, dy); on_accept(t, y) may adjust the state (root snapping) and
/// throw to abort.  FSAL: stage 7 of an accepted step seeds the next step.
template <std::size_t N, typename Rhs, typename OnAccept>
void integrate_unit_interval(Rhs&& rhs, std::array<Complex, N>& y,
                             const TransportOptions& opt, long& accepted,
                             double& err_acc, OnAccept&& on_accept) {
    using State = std::array<Complex, N>;
    double t = 0.0;
    double h = 0.05;
    State k[7];
    rhs(t, y, k[0]);
    bool fsal_valid = true;
    long attempts = 0;
    while (t < 1.0) {
        if (++attempts > opt.max_steps)
            throw TransportError("integration exceeded the step budget");
        if (h < 1e-14)
            throw TransportError("step size underflow near a singularity");
        if (t + h > 1.0) h = 1.0 - t;

        if (!fsal_valid) rhs(t, y, k[0]);
        State work, y5;
        for (int stage = 1; stage < 7; ++stage) {
            for (std::size_t i = 0; i < N; ++i) {
                Complex acc = 0.0;
                for (int j = 0; j < stage; ++j) acc += kA[stage][j] * k[j][i];
                work[i] = y[i] + h * acc;
            }
            rhs(t + kC[stage] * h, work, k[stage]);
        }
        y5 = work;  // stage 7 input is the 5th-order solution

        double err = 0.0;
        double raw = 0.0;
        for (std::size_t i = 0; i < N; ++i) {
            Complex e = 0.0;
            for (int j = 0; j < 7; ++j) e += kE[j] * k[j][i];
            const double ei = std::abs(h * e);
            const double scale =
                opt.abs_tol + opt.rel_tol * std::max(std::abs(y[i]), std::abs(y5[i]));
            err = std::max(err, ei / scale);
            raw = std::max(raw, ei);
        }

        if (err <= 1.0) {
            t += h;
            y = y5;
            k[0] = k[6];  // FSAL
            fsal_valid = true;
            ++accepted;
            err_acc += raw;
            on_accept(t, y);
        } else {
            fsal_valid = false;
        }
        const double factor =
            std::clamp(0.9 * std::pow(std::max(err, 1e-10), -0.2), 0.2, 5.0);
        h *= factor;
    }
}

/// Coefficient matrix of the frame equation, applied to F:
/// dF = (G, -G^2; 1, -G) Omega F with Omega = c dz/(z w).
inline void frame_rhs(const CurveParams& p, Complex z, Complex dz, Complex w,
                      const Mat2& f, Complex& dw, Mat2& df) {
    dw = w * log_derivative_w(p, z) * dz;
    const Complex g = p.lambda_pow * w;
    const Complex om = p.c / (z * w) * dz;
    df.a = (g * f.a - g * g * f.c) * om;
    df.b = (g * f.b - g * g * f.d) * om;
    df.c = (f.a - g * f.c) * om;
    df.d = (f.b - g * f.d) * om;
}

}  // namespace detail

/// Integrates the coupled system (w, F) along the path.  The determinant of
/// F is conserved by the trace-free coefficient matrix; its drift is only
/// monitored, as an accuracy certificate.  After each accepted step w is
/// snapped to the nearest exact root of the curve equation.
inline TransportResult transport(const CurveParams& p, const Path& path,
                                 Complex w_init, const Mat2& frame_init,
                                 const TransportOptions& opt = {}) {
    if (path.segments.empty())
        throw std::invalid_argument("path has no segments");
    if (path.continuity_defect() > 1e-9)
        throw std::invalid_argument("path segments are not continuous");

    {
        const Complex res = curve_residual(p, {path.start(), w_init});
        if (std::abs(res) > 1e-6)
            throw std::invalid_argument("initial point does not lie on the curve");
    }

    std::array<Complex, 5> y = {w_init, frame_init.a, frame_init.b,
                                frame_init.c, frame_init.d};
    TransportResult out;
    out.det_drift = det_drift(frame_init);

    for (const auto& seg : path.segments) {
        auto rhs = [&](double t, const std::array<Complex, 5>& s,
                       std::array<Complex, 5>& ds) {
            const Complex z = seg.pos(t);
            const Complex dz = seg.vel(t);
            Mat2 f{s[1], s[2], s[3], s[4]};
            Mat2 df;
            detail::frame_rhs(p, z, dz, s[0], f, ds[0], df);
            ds[1] = df.a;
            ds[2] = df.b;
            ds[3] = df.c;
            ds[4] = df.d;
        };
        auto on_accept = [&](double t, std::array<Complex, 5>& s) {
            const Complex z = seg.pos(t);
            const Complex snapped = snap_w(p, z, s[0]);
            if (std::abs(snapped - s[0]) > opt.snap_move_limit)
                throw TransportError("root snap moved w too far (missed branch crossing)");
            s[0] = snapped;
            if (std::abs(z) > kEndRadius || std::abs(s[0]) > kEndRadius)
                throw TransportError("transport ran into an end of the surface");
            const Mat2 f{s[1], s[2], s[3], s[4]};
            const double drift = det_drift(f);
            out.det_drift = std::max(out.det_drift, drift);
            if (drift > opt.det_ceiling)
                throw TransportError("determinant drift exceeded the ceiling");
        };
        detail::integrate_unit_interval<5>(rhs, y, opt, out.step_count,
                                           out.error_estimate, on_accept);
    }

    out.endpoint = {path.end(), y[0]};
    out.frame = {y[1], y[2], y[3], y[4]};
    return out;
}

/// Max entrywise difference of the frames transported along two paths with
/// the same endpoints and identical initial data.  Since the equation is
/// holomorphic away from the singular points, homotopic paths must agree;
/// the caller interprets large values.
inline double homotopy_difference(const CurveParams& p, const Path& path_a,
                                  const Path& path_b, Complex w_init,
                                  const TransportOptions& opt = {}) {
    const auto ra = transport(p, path_a, w_init, Mat2::identity(), opt);
    const auto rb = transport(p, path_b, w_init, Mat2::identity(), opt);
    return max_abs_diff(ra.frame, rb.frame);
}

}  // namespace gkcat

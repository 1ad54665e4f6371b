#pragma once

// Test-only reference integrator, independent of the adaptive transport
// implementation: classical fixed-step RK4 with the right-hand side written
// out from scratch.  Slow and simple on purpose.

#include <array>
#include <cmath>
#include <complex>

#include "gkcat/curve.hpp"
#include "gkcat/mat2.hpp"
#include "gkcat/path.hpp"

namespace oracle {

using gkcat::Complex;
using gkcat::CurveParams;
using gkcat::Mat2;
using gkcat::Path;

using State = std::array<Complex, 5>;  // w, A, B, C, D

inline State derivative(const CurveParams& p, Complex z, Complex dz,
                        const State& y) {
    const Complex w = y[0];
    const double k = p.k;
    const Complex log_dw =
        (1.0 / z + k / (z - 1.0 / p.lambda) + k / (p.lambda - z)) / (k + 1.0);
    const Complex g = std::pow(p.lambda, k / (k + 1.0)) * w;
    const Complex om = p.c / (z * w) * dz;
    const Complex A = y[1], B = y[2], C = y[3], D = y[4];
    return {w * log_dw * dz,
            (g * A - g * g * C) * om,
            (g * B - g * g * D) * om,
            (A - g * C) * om,
            (B - g * D) * om};
}

struct Endpoint {
    Complex w;
    Mat2 frame;
};

inline Endpoint fixed_step_transport(const CurveParams& p, const Path& path,
                                     Complex w0, const Mat2& f0,
                                     long steps_per_segment) {
    State y = {w0, f0.a, f0.b, f0.c, f0.d};
    for (const auto& seg : path.segments) {
        const double h = 1.0 / static_cast<double>(steps_per_segment);
        for (long i = 0; i < steps_per_segment; ++i) {
            const double t = i * h;
            auto eval = [&](double tt, const State& s) {
                return derivative(p, seg.pos(tt), seg.vel(tt), s);
            };
            const State k1 = eval(t, y);
            State s2;
            for (int j = 0; j < 5; ++j) s2[j] = y[j] + 0.5 * h * k1[j];
            const State k2 = eval(t + 0.5 * h, s2);
            State s3;
            for (int j = 0; j < 5; ++j) s3[j] = y[j] + 0.5 * h * k2[j];
            const State k3 = eval(t + 0.5 * h, s3);
            State s4;
            for (int j = 0; j < 5; ++j) s4[j] = y[j] + h * k3[j];
            const State k4 = eval(t + h, s4);
            for (int j = 0; j < 5; ++j)
                y[j] += h / 6.0 * (k1[j] + 2.0 * k2[j] + 2.0 * k3[j] + k4[j]);
        }
    }
    return {y[0], Mat2{y[1], y[2], y[3], y[4]}};
}

}  // namespace oracle

#pragma once

#include <cmath>
#include <complex>
#include <numbers>
#include <string>

#include "gkcat/errors.hpp"
#include "gkcat/mat2.hpp"

namespace gkcat {

/// Defining data of the branched curve w^(k+1) = z ((z - 1/lambda)/(lambda - z))^k
/// together with the Weierstrass scale c and the derived constants used
/// throughout: w0 = lambda^(-k/(k+1)) (the w coordinate of the base point
/// over z = 1) and Lambda = exp(2 pi i/(k+1)) (the sheet rotation).
struct CurveParams {
    int k = 1;
    double lambda = 2.0;
    double c = 1.0;
    double w0 = 0.0;
    Complex Lambda;
    double lambda_pow = 0.0;  // lambda^(k/(k+1))
};

/// Validates ranges and fills in the derived constants.  The powers use the
/// principal real branch (lambda > 1, so log/exp are unambiguous).
inline CurveParams make_params(int k, double lambda, double c) {
    if (k < 1) throw std::invalid_argument("k must be >= 1");
    if (!(lambda > 1.0)) throw std::invalid_argument("lambda must exceed 1");
    if (c == 0.0) throw std::invalid_argument("c must be nonzero");
    CurveParams p;
    p.k = k;
    p.lambda = lambda;
    p.c = c;
    const double expo = static_cast<double>(k) / (k + 1);
    p.lambda_pow = std::exp(expo * std::log(lambda));
    // nudge the stored powers by an ulp or two so that the Gauss map is
    // exactly 1 at the base point; the perturbation sits below every other
    // tolerance in play (the powers are only ulp-accurate to begin with)
    auto fit_w0 = [&p] {
        double w = 1.0 / p.lambda_pow;
        for (int i = 0; i < 6; ++i, w = std::nextafter(w, 2.0))
            if (p.lambda_pow * w == 1.0) { p.w0 = w; return true; }
        w = 1.0 / p.lambda_pow;
        for (int i = 0; i < 6; ++i, w = std::nextafter(w, 0.0))
            if (p.lambda_pow * w == 1.0) { p.w0 = w; return true; }
        return false;
    };
    for (int j = 0; j < 8 && !fit_w0(); ++j)
        p.lambda_pow = std::nextafter(p.lambda_pow, 2.0 * p.lambda_pow);
    const double ang = 2.0 * std::numbers::pi / (k + 1);
    p.Lambda = Complex(std::cos(ang), std::sin(ang));
    return p;
}

/// A point (z, w) on the curve; the sheet is carried implicitly by w.
struct SurfacePoint {
    Complex z;
    Complex w;
};

/// Points with coordinates this large are treated as having run into one of
/// the punctures (0,0), (inf,inf).
inline constexpr double kEndRadius = 1e12;

inline bool near_end(const SurfacePoint& pt) {
    return std::abs(pt.z) > kEndRadius || std::abs(pt.w) > kEndRadius;
}

/// Right-hand side of the curve equation: z ((z - 1/lambda)/(lambda - z))^k.
inline Complex curve_rhs(const CurveParams& p, Complex z) {
    if (z == Complex(p.lambda))
        throw SingularEvaluation("curve equation is singular at z = lambda");
    Complex ratio = (z - 1.0 / p.lambda) / (p.lambda - z);
    Complex pow = 1.0;
    for (int i = 0; i < p.k; ++i) pow *= ratio;
    return z * pow;
}

/// w^(k+1) - z ((z - 1/lambda)/(lambda - z))^k.  Vanishes on the curve.
inline Complex curve_residual(const CurveParams& p, const SurfacePoint& pt) {
    Complex wp = 1.0;
    for (int i = 0; i < p.k + 1; ++i) wp *= pt.w;
    return wp - curve_rhs(p, pt.z);
}

/// w'/w as a function of z, obtained by differentiating the curve relation:
/// (1/(k+1)) (1/z + k/(z - 1/lambda) + k/(lambda - z)).
inline Complex log_derivative_w(const CurveParams& p, Complex z) {
    const Complex li = 1.0 / p.lambda;
    if (z == Complex(0.0) || z == Complex(li) || z == Complex(p.lambda))
        throw SingularEvaluation("logarithmic derivative undefined at branch point");
    const double k = p.k;
    return (1.0 / z + k / (z - li) + k / (p.lambda - z)) / (k + 1.0);
}

/// Hyperbolic Gauss map G = lambda^(k/(k+1)) w.
inline Complex gauss_map(const CurveParams& p, const SurfacePoint& pt) {
    return p.lambda_pow * pt.w;
}

/// Coefficient of dz in Omega = c dz/(z w).
inline Complex omega_coefficient(const CurveParams& p, const SurfacePoint& pt) {
    if (pt.z == Complex(0.0) || pt.w == Complex(0.0))
        throw SingularEvaluation("Omega is singular where z = 0 or w = 0");
    return p.c / (pt.z * pt.w);
}

/// Closed-form coefficient of dz^2 in the Hopf differential Q = Omega dG:
///
///   c lambda^(k/(k+1))/(k+1) * (z^2 + ((k-1)/lambda - (k+1) lambda) z + 1)
///                              / (z^2 (z - 1/lambda)(z - lambda))
///
/// Must agree with omega_coefficient * dG/dz (via log_derivative_w) at every
/// curve point; the two evaluation routes are compared in the tests.
inline Complex hopf_coefficient(const CurveParams& p, const SurfacePoint& pt) {
    const Complex z = pt.z;
    const double li = 1.0 / p.lambda;
    if (z == Complex(0.0) || z == Complex(li) || z == Complex(p.lambda))
        throw SingularEvaluation("Hopf coefficient singular at branch point");
    const double k = p.k;
    const double mid = (k - 1.0) * li - (k + 1.0) * p.lambda;
    const Complex num = z * z + mid * z + 1.0;
    const Complex den = z * z * (z - li) * (z - p.lambda);
    return p.c * p.lambda_pow / (k + 1.0) * num / den;
}

/// Nearest exact (k+1)-th root of the curve right-hand side.  Used after
/// each accepted integration step to keep w algebraically on the curve.
inline Complex snap_w(const CurveParams& p, Complex z, Complex w) {
    const Complex rhs = curve_rhs(p, z);
    const int n = p.k + 1;
    // principal root, then rotate through the n candidates
    const Complex root0 = std::pow(rhs, 1.0 / n);
    Complex best = root0;
    double best_dist = std::abs(root0 - w);
    Complex cand = root0;
    for (int j = 1; j < n; ++j) {
        cand *= p.Lambda;
        const double dist = std::abs(cand - w);
        if (dist < best_dist) {
            best_dist = dist;
            best = cand;
        }
    }
    return best;
}

}  // namespace gkcat

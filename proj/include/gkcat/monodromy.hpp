#pragma once

#include <cmath>
#include <string>

#include "gkcat/curve.hpp"
#include "gkcat/errors.hpp"
#include "gkcat/mat2.hpp"
#include "gkcat/path.hpp"
#include "gkcat/transport.hpp"

namespace gkcat {

/// Ambient space of a constructed surface.  De Sitter surfaces are subtyped
/// by the eigenvalue class of their end monodromy.
enum class Ambient { H3, DSElliptic, DSHyperbolic, DSParabolic };

inline bool is_de_sitter(Ambient a) { return a != Ambient::H3; }

inline const char* to_string(Ambient a) {
    switch (a) {
        case Ambient::H3: return "h3";
        case Ambient::DSElliptic: return "ds-elliptic";
        case Ambient::DSHyperbolic: return "ds-hyperbolic";
        case Ambient::DSParabolic: return "ds-parabolic";
    }
    return "?";
}

/// Monodromy of the first generator loop, assembled from the frame F1
/// transported along c1 (entries A,B;C,D) and Lambda:
///
///   (conj A, -conj C; -conj B, conj D)
///   (D, Lambda C; B/Lambda, A)
///   (conj D, -Lambda conj B; -conj C/Lambda, conj A)
///   (A, B; C, D)
///
/// The partial products (right to left) are the frames after each of the
/// four portions of the loop.
inline Mat2 first_loop_monodromy(const Mat2& f, Complex Lambda) {
    const Complex A = f.a, B = f.b, C = f.c, D = f.d;
    const Complex Li = 1.0 / Lambda;
    const Mat2 n1{std::conj(A), -std::conj(C), -std::conj(B), std::conj(D)};
    const Mat2 n2{D, Lambda * C, Li * B, A};
    const Mat2 n3{std::conj(D), -Lambda * std::conj(B), -Li * std::conj(C),
                  std::conj(A)};
    return n1 * (n2 * (n3 * f));
}

/// Monodromy of the second generator loop from the frame F2 transported
/// along c2: (conj D, -conj B; -conj C, conj A) (A, B; C, D).
inline Mat2 second_loop_monodromy(const Mat2& f) {
    const Mat2 n1{std::conj(f.d), -std::conj(f.b), -std::conj(f.c),
                  std::conj(f.a)};
    return n1 * f;
}

/// Deviation from the (r1, p; -conj p, r2) shape with real diagonal.
inline double first_form_residual(const Mat2& m) {
    return std::max({std::abs(m.a.imag()), std::abs(m.d.imag()),
                     std::abs(m.c + std::conj(m.b))});
}

/// Deviation from the (q, i r3; i r4, conj q) shape.
inline double second_form_residual(const Mat2& m) {
    return std::max({std::abs(m.b.real()), std::abs(m.c.real()),
                     std::abs(m.d - std::conj(m.a))});
}

/// The two loop monodromies with the scalars that drive the closing
/// condition: h1 = 2 Re(p)/(r2 - r1) and h2 = 2 Im(q)/(r4 - r3).
struct ClosingData {
    Mat2 m1, m2;
    Complex p, q;
    double r1 = 0, r2 = 0, r3 = 0, r4 = 0;
    double h1 = 0, h2 = 0;
    double form_residual = 0;
};

inline ClosingData extract_closing(const Mat2& m1, const Mat2& m2,
                                   double form_tol = 1e-8) {
    ClosingData out;
    out.m1 = m1;
    out.m2 = m2;
    out.form_residual = std::max(first_form_residual(m1), second_form_residual(m2));
    if (out.form_residual > form_tol)
        throw ClosingError(ClosingError::Kind::MalformedForm,
                           "monodromy does not have the expected shape");
    if (det_drift(m1) > 1e-9 || det_drift(m2) > 1e-9)
        throw ClosingError(ClosingError::Kind::MalformedForm,
                           "monodromy determinant drifted from 1");
    out.p = m1.b;
    out.r1 = m1.a.real();
    out.r2 = m1.d.real();
    out.q = m2.a;
    out.r3 = m2.b.imag();
    out.r4 = m2.c.imag();
    const double den1 = out.r2 - out.r1;
    const double den2 = out.r4 - out.r3;
    if (std::abs(den1) < 1e-12 || std::abs(den2) < 1e-12)
        throw ClosingError(ClosingError::Kind::DegenerateDenominator,
                           "closing denominator vanishes, h undefined");
    out.h1 = 2.0 * out.p.real() / den1;
    out.h2 = 2.0 * out.q.imag() / den2;
    return out;
}

/// Transports the identity frame from the base point (1, w0) along c1 and
/// c2 and extracts the closing data.  This is the scalar map
/// (c, lambda) -> (h1, h2).
inline ClosingData closing_pair(const CurveParams& p,
                                const TransportOptions& topt = {},
                                double form_tol = 1e-8) {
    const auto t1 = transport(p, make_path_c1(p), Complex(p.w0),
                              Mat2::identity(), topt);
    const auto t2 = transport(p, make_path_c2(p), Complex(p.w0),
                              Mat2::identity(), topt);
    return extract_closing(first_loop_monodromy(t1.frame, p.Lambda),
                           second_loop_monodromy(t2.frame), form_tol);
}

/// Residuals of the three curve-symmetry relations for the frame, checked
/// by transporting along the image of c1 under each symmetry and comparing
/// with the predicted transform of the c1 frame:
///   mirror     (z,w) -> (conj z, conj w):        F -> entrywise conjugate
///   inversion  (z,w) -> (1/z, w0^2/w):           F -> (D, C; B, A)
///   rotation   (z,w) -> (conj z, Lambda conj w): F -> (conj A, Lambda conj B;
///                                                      conj C/Lambda, conj D)
struct SymmetryReport {
    double mirror = 0.0;
    double inversion = 0.0;
    double rotation = 0.0;
    double max_residual() const { return std::max({mirror, inversion, rotation}); }
};

inline SymmetryReport symmetry_residuals(const CurveParams& p,
                                         const TransportOptions& topt = {}) {
    const Path c1 = make_path_c1(p);
    const Mat2 f = transport(p, c1, Complex(p.w0), Mat2::identity(), topt).frame;

    SymmetryReport rep;
    {
        const Mat2 got =
            transport(p, conjugated(c1), Complex(p.w0), Mat2::identity(), topt).frame;
        rep.mirror = max_abs_diff(got, f.conj());
    }
    {
        // the inversion fixes the base point: w0^2/w0 = w0
        const Mat2 got =
            transport(p, inverted(c1), Complex(p.w0), Mat2::identity(), topt).frame;
        const Mat2 want{f.d, f.c, f.b, f.a};
        rep.inversion = max_abs_diff(got, want);
    }
    {
        const Mat2 got = transport(p, conjugated(c1), p.Lambda * p.w0,
                                   Mat2::identity(), topt).frame;
        const Mat2 want{std::conj(f.a), p.Lambda * std::conj(f.b),
                        std::conj(f.c) / p.Lambda, std::conj(f.d)};
        rep.rotation = max_abs_diff(got, want);
    }
    return rep;
}

/// Change of initial frame: P^-1 m P with P = (alpha, beta; beta, alpha)
/// for H3 targets and P = (alpha, beta; alpha, -beta) for de Sitter ones.
/// P must be unimodular.
inline Mat2 conjugated_monodromy(const Mat2& m, double alpha, double beta,
                                 Ambient target) {
    const Mat2 p = (target == Ambient::H3)
                       ? Mat2{alpha, beta, beta, alpha}
                       : Mat2{alpha, beta, alpha, -beta};
    if (std::abs(p.det() - 1.0) > 1e-9)
        throw std::invalid_argument("initial frame is not unimodular");
    return p.inverse() * m * p;
}

/// Max-entry norm of M M* - I (zero iff M is in SU(2), given det M = 1).
inline double su2_residual(const Mat2& m) {
    const Mat2 prod = m * m.star();
    return max_abs_diff(prod, Mat2::identity());
}

/// Max-entry norm of M e3 M* - e3 with e3 = diag(1, -1) (zero iff M is in SU(1,1)).
inline double su11_residual(const Mat2& m) {
    const Mat2 e3{1.0, 0.0, 0.0, -1.0};
    const Mat2 prod = m * e3 * m.star();
    return max_abs_diff(prod, e3);
}

}  // namespace gkcat

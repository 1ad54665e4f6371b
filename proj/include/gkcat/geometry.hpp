#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <numbers>
#include <string>
#include <vector>

#include "gkcat/curve.hpp"
#include "gkcat/errors.hpp"
#include "gkcat/json_writer.hpp"
#include "gkcat/monodromy.hpp"
#include "gkcat/parallel.hpp"
#include "gkcat/path.hpp"
#include "gkcat/solver.hpp"
#include "gkcat/transport.hpp"

namespace gkcat {

/// Minkowski R^{3,1} coordinates of the Hermitian matrix X:
/// x0 = (X11+X22)/2, x3 = (X11-X22)/2, x1 = Re X12, x2 = Im X12.
/// H3 points satisfy <x,x> = -1 with x0 > 0, de Sitter points <x,x> = +1.
struct AmbientPoint {
    double x0 = 0, x1 = 0, x2 = 0, x3 = 0;

    double minkowski_norm() const {
        return -x0 * x0 + x1 * x1 + x2 * x2 + x3 * x3;
    }
};

/// F F* for H3, F e3 F* for de Sitter space.
inline AmbientPoint immerse(const Mat2& f, Ambient ambient) {
    Mat2 x;
    if (ambient == Ambient::H3) {
        x = f * f.star();
    } else {
        const Mat2 e3{1.0, 0.0, 0.0, -1.0};
        x = f * e3 * f.star();
    }
    AmbientPoint out;
    out.x0 = 0.5 * (x.a.real() + x.d.real());
    out.x3 = 0.5 * (x.a.real() - x.d.real());
    out.x1 = x.b.real();
    out.x2 = x.b.imag();
    return out;
}

/// Hyperboloid-to-ball map (x1,x2,x3)/(1+x0); output norm < 1.
inline std::array<double, 3> poincare_project(const AmbientPoint& pt) {
    if (pt.x0 < 1.0 - 1e-6)
        throw std::invalid_argument("not a point of the upper hyperboloid");
    const double s = 1.0 / (1.0 + pt.x0);
    return {pt.x1 * s, pt.x2 * s, pt.x3 * s};
}

/// Bounded projection used for de Sitter meshes: (x1,x2,x3)/(1+sqrt(1+x0^2)).
inline std::array<double, 3> de_sitter_project(const AmbientPoint& pt) {
    const double s = 1.0 / (1.0 + std::sqrt(1.0 + pt.x0 * pt.x0));
    return {pt.x1 * s, pt.x2 * s, pt.x3 * s};
}

// ---------------------------------------------------------------------------
// Euclidean counterpart periods.

enum class LoopClass { Gamma1, Gamma2 };
enum class PeriodVariant { Minimal, Maximal };

inline const char* to_string(LoopClass l) {
    return l == LoopClass::Gamma1 ? "gamma1" : "gamma2";
}
inline const char* to_string(PeriodVariant v) {
    return v == PeriodVariant::Minimal ? "minimal" : "maximal";
}

/// z-projection of the generator loops, assembled from c1/c2 and the curve
/// symmetries: the first loop is c1, then the mirror of c1 reversed, then
/// the inversion image of c1, then the mirror of that reversed; the second
/// loop is c2 followed by its mirror reversed.
inline Path loop_path(const CurveParams& p, LoopClass loop) {
    if (loop == LoopClass::Gamma1) {
        const Path c1 = make_path_c1(p);
        return concat({c1, conjugated(reversed(c1)), inverted(c1),
                       conjugated(reversed(inverted(c1)))});
    }
    const Path c2 = make_path_c2(p);
    return concat({c2, conjugated(reversed(c2))});
}

/// Real part of the contour integral of the Weierstrass-type vector form
/// around the loop: (1 -+ G^2, i(1 +- G^2), 2G) Omega, minimal variant with
/// the upper signs.  The w coordinate is continued along the loop together
/// with the three quadrature components.
inline std::array<double, 3> euclidean_period(const CurveParams& p,
                                              LoopClass loop,
                                              PeriodVariant variant,
                                              const TransportOptions& opt = {}) {
    const Path path = loop_path(p, loop);
    const double sign = variant == PeriodVariant::Minimal ? -1.0 : 1.0;
    std::array<Complex, 4> y = {Complex(p.w0), 0.0, 0.0, 0.0};
    long steps = 0;
    double err_acc = 0.0;
    for (const auto& seg : path.segments) {
        auto rhs = [&](double t, const std::array<Complex, 4>& s,
                       std::array<Complex, 4>& ds) {
            const Complex z = seg.pos(t);
            const Complex dz = seg.vel(t);
            const Complex w = s[0];
            const Complex g = p.lambda_pow * w;
            const Complex g2 = g * g;
            const Complex om = p.c / (z * w) * dz;
            ds[0] = w * log_derivative_w(p, z) * dz;
            ds[1] = (1.0 + sign * g2) * om;
            ds[2] = Complex(0.0, 1.0) * (1.0 - sign * g2) * om;
            ds[3] = 2.0 * g * om;
        };
        auto on_accept = [&](double t, std::array<Complex, 4>& s) {
            const Complex snapped = snap_w(p, seg.pos(t), s[0]);
            if (std::abs(snapped - s[0]) > opt.snap_move_limit)
                throw TransportError("root snap moved w too far (missed branch crossing)");
            s[0] = snapped;
        };
        detail::integrate_unit_interval<4>(rhs, y, opt, steps, err_acc, on_accept);
    }
    return {y[1].real(), y[2].real(), y[3].real()};
}

// ---------------------------------------------------------------------------
// Mesh construction.

struct MeshResolution {
    int radial = 48;
    int angular = 64;
};

struct MeshVertex {
    std::array<double, 3> position{};  // projected coordinates
    AmbientPoint ambient;
    double gauss_mod = 0.0;  // |G| at the vertex
    bool singular = false;   // |G| within 1e-3 of 1; de Sitter meshes only
};

struct MeshQuality {
    double max_plaquette_residual = 0;  // frame consistency of interior cells
    double max_seam_mismatch = 0;       // position agreement across the cut
    double max_norm_defect = 0;         // Minkowski norm deviation
    int omitted_cells = 0;
};

struct MeshData {
    std::vector<MeshVertex> vertices;
    std::vector<std::array<int, 3>> faces;
    int k = 0;
    double lambda = 0, c = 0;
    Ambient ambient = Ambient::H3;
    MeshResolution resolution;
    double r_min = 0, r_max = 0;
    MeshQuality quality;
};

namespace detail {

struct MeshNode {
    Complex w;
    Mat2 frame;
};

inline std::array<double, 3> project_vertex(const AmbientPoint& pt, Ambient a) {
    return a == Ambient::H3 ? poincare_project(pt) : de_sitter_project(pt);
}

}  // namespace detail

/// Lays a polar lattice over the annulus r in [r_min, r_max] across all k+1
/// sheets and transports the corrected initial frame from the base point
/// along a spanning tree: sheet seeds via the branch loop around 1/lambda,
/// then the unit circle to each staggered ray angle, then radially along
/// each ray.  Non-tree (angular) edges are re-transported to measure the
/// plaquette residual; cut-crossing edges are compared by immersed position,
/// which is where the verified monodromy shows up.
inline MeshData build_mesh(const CurveParams& p, const SolveResult& root,
                           MeshResolution res = {},
                           const TransportOptions& topt = {},
                           double r_min = 0.05, double r_max = 20.0) {
    if (res.radial < 2 || res.angular < 8)
        throw std::invalid_argument("mesh resolution too small");
    const int n_r = res.radial, n_t = res.angular, sheets = p.k + 1;
    const double li = 1.0 / p.lambda;

    // log-spaced radii, nudged off the branch points on the positive axis;
    // the margin stays below half a grid cell so the nudge cannot collide
    // neighboring radii
    std::vector<double> radii(n_r);
    const double log0 = std::log(r_min), log1 = std::log(r_max);
    const double cell = std::exp((log1 - log0) / (n_r - 1)) - 1.0;
    const double margin_rel = std::min(0.05, 0.45 * cell);
    for (int i = 0; i < n_r; ++i) {
        double r = std::exp(log0 + (log1 - log0) * i / (n_r - 1));
        for (double b : {li, p.lambda}) {
            const double margin = margin_rel * b;
            if (std::abs(r - b) < margin) r = (r < b) ? b - margin : b + margin;
        }
        radii[i] = r;
    }
    // pin the lattice to the unit circle, where |G| = 1 identically: the
    // ring through the base point is then part of the vertex set (and is
    // the visible part of the singular set on de Sitter meshes)
    if (r_min < 1.0 && r_max > 1.0) {
        int nearest = 0;
        for (int i = 1; i < n_r; ++i)
            if (std::abs(std::log(radii[i])) < std::abs(std::log(radii[nearest])))
                nearest = i;
        radii[nearest] = 1.0;
    }

    // staggered angles keep every ray off the positive real axis
    std::vector<double> thetas(n_t);
    for (int j = 0; j < n_t; ++j)
        thetas[j] = 2.0 * std::numbers::pi * (j + 0.5) / n_t;

    const Mat2 frame0 = root.ambient == Ambient::H3
                            ? Mat2{root.alpha, root.beta, root.beta, root.alpha}
                            : Mat2{root.alpha, root.beta, root.alpha, -root.beta};

    // sheet seeds at (1, Lambda^s w0): the loop c1 . mirror(c1)^-1 winds
    // once around 1/lambda and advances the sheet by one
    const Path c1 = make_path_c1(p);
    const Path sheet_loop = concat({c1, conjugated(reversed(c1))});
    std::vector<detail::MeshNode> seeds(sheets);
    seeds[0] = {Complex(p.w0), frame0};
    for (int s = 1; s < sheets; ++s) {
        const auto t = transport(p, sheet_loop, seeds[s - 1].w,
                                 seeds[s - 1].frame, topt);
        seeds[s] = {t.endpoint.w, t.frame};
    }

    // anchors on the unit circle at each ray angle, per sheet
    std::vector<std::vector<detail::MeshNode>> anchors(
        sheets, std::vector<detail::MeshNode>(n_t));
    for (int s = 0; s < sheets; ++s) {
        detail::MeshNode cur = seeds[s];
        double ang = 0.0;
        for (int j = 0; j < n_t; ++j) {
            Path arc;
            arc.name = "anchor-arc";
            arc.segments.push_back(circle_arc(1.0, ang, thetas[j]));
            const auto t = transport(p, arc, cur.w, cur.frame, topt);
            cur = {t.endpoint.w, t.frame};
            anchors[s][j] = cur;
            ang = thetas[j];
        }
    }

    // radial transports, parallel across (sheet, ray)
    std::vector<detail::MeshNode> nodes(
        static_cast<std::size_t>(sheets) * n_r * n_t);
    auto node_index = [n_r, n_t](int s, int i, int j) {
        return (static_cast<std::size_t>(s) * n_r + i) * n_t + j;
    };
    parallel_for(static_cast<std::size_t>(sheets) * n_t, [&](std::size_t idx) {
        const int s = static_cast<int>(idx) / n_t;
        const int j = static_cast<int>(idx) % n_t;
        const Complex dir(std::cos(thetas[j]), std::sin(thetas[j]));
        // walk down from the unit circle, then up
        for (int pass = 0; pass < 2; ++pass) {
            detail::MeshNode cur = anchors[s][j];
            double r_prev = 1.0;
            if (pass == 0) {
                for (int i = n_r - 1; i >= 0; --i) {
                    if (radii[i] >= 1.0) continue;
                    Path hop;
                    hop.segments.push_back(
                        line_segment(r_prev * dir, radii[i] * dir));
                    const auto t = transport(p, hop, cur.w, cur.frame, topt);
                    cur = {t.endpoint.w, t.frame};
                    nodes[node_index(s, i, j)] = cur;
                    r_prev = radii[i];
                }
            } else {
                for (int i = 0; i < n_r; ++i) {
                    if (radii[i] < 1.0) continue;
                    Path hop;
                    hop.segments.push_back(
                        line_segment(r_prev * dir, radii[i] * dir));
                    const auto t = transport(p, hop, cur.w, cur.frame, topt);
                    cur = {t.endpoint.w, t.frame};
                    nodes[node_index(s, i, j)] = cur;
                    r_prev = radii[i];
                }
            }
        }
    });

    MeshData mesh;
    mesh.k = p.k;
    mesh.lambda = p.lambda;
    mesh.c = p.c;
    mesh.ambient = root.ambient;
    mesh.resolution = res;
    mesh.r_min = r_min;
    mesh.r_max = r_max;

    mesh.vertices.resize(nodes.size());
    double norm_defect = 0.0;
    const double target_norm = root.ambient == Ambient::H3 ? -1.0 : 1.0;
    for (std::size_t idx = 0; idx < nodes.size(); ++idx) {
        MeshVertex v;
        v.ambient = immerse(nodes[idx].frame, root.ambient);
        v.position = detail::project_vertex(v.ambient, root.ambient);
        v.gauss_mod = p.lambda_pow * std::abs(nodes[idx].w);
        if (is_de_sitter(root.ambient))
            v.singular = std::abs(v.gauss_mod - 1.0) < 1e-3;
        norm_defect = std::max(norm_defect,
                               std::abs(v.ambient.minkowski_norm() - target_norm));
        mesh.vertices[idx] = v;
    }
    mesh.quality.max_norm_defect = norm_defect;

    // sheet shift when crossing the positive real axis counterclockwise:
    // +1 below 1/lambda and above lambda, 0 in between
    auto cut_shift = [&](double r) {
        return (r < li || r > p.lambda) ? 1 : 0;
    };

    // faces; cells in the radius bands straddling a branch-point circle are
    // omitted at the cut (they would wrap a branch point)
    for (int s = 0; s < sheets; ++s) {
        for (int i = 0; i + 1 < n_r; ++i) {
            const bool straddles =
                (radii[i] < li) != (radii[i + 1] < li) ||
                (radii[i] < p.lambda) != (radii[i + 1] < p.lambda);
            for (int j = 0; j < n_t; ++j) {
                const bool wrap = (j + 1 == n_t);
                if (wrap && straddles) {
                    ++mesh.quality.omitted_cells;
                    continue;
                }
                int s2 = s, j2 = j + 1;
                if (wrap) {
                    j2 = 0;
                    s2 = (s + cut_shift(radii[i])) % sheets;
                }
                const int v00 = static_cast<int>(node_index(s, i, j));
                const int v10 = static_cast<int>(node_index(s, i + 1, j));
                const int v11 = static_cast<int>(node_index(s2, i + 1, j2));
                const int v01 = static_cast<int>(node_index(s2, i, j2));
                mesh.faces.push_back({v00, v10, v11});
                mesh.faces.push_back({v00, v11, v01});
            }
        }
    }

    // non-tree edge consistency: re-transport every angular edge and compare
    // with the stored endpoint (frames inside the cut domain, immersed
    // positions across the cut)
    std::vector<double> plaq(static_cast<std::size_t>(sheets) * n_r, 0.0);
    std::vector<double> seam(static_cast<std::size_t>(sheets) * n_r, 0.0);
    parallel_for(static_cast<std::size_t>(sheets) * n_r, [&](std::size_t idx) {
        const int s = static_cast<int>(idx) / n_r;
        const int i = static_cast<int>(idx) % n_r;
        double worst_frame = 0.0, worst_seam = 0.0;
        for (int j = 0; j < n_t; ++j) {
            const bool wrap = (j + 1 == n_t);
            const int j2 = wrap ? 0 : j + 1;
            const int s2 = wrap ? (s + cut_shift(radii[i])) % sheets : s;
            const double a0 = thetas[j];
            const double a1 = wrap ? thetas[0] + 2.0 * std::numbers::pi
                                   : thetas[j2];
            Path arc;
            arc.segments.push_back(circle_arc(radii[i], a0, a1));
            const auto& from = nodes[node_index(s, i, j)];
            const auto to = transport(p, arc, from.w, from.frame, topt);
            const auto& stored = nodes[node_index(s2, i, j2)];
            if (!wrap) {
                worst_frame =
                    std::max(worst_frame, max_abs_diff(to.frame, stored.frame));
            } else {
                const AmbientPoint got = immerse(to.frame, root.ambient);
                const AmbientPoint want = immerse(stored.frame, root.ambient);
                const double diff = std::max(
                    {std::abs(got.x0 - want.x0), std::abs(got.x1 - want.x1),
                     std::abs(got.x2 - want.x2), std::abs(got.x3 - want.x3)});
                worst_seam = std::max(worst_seam, diff);
            }
        }
        plaq[idx] = worst_frame;
        seam[idx] = worst_seam;
    });
    for (double v : plaq)
        mesh.quality.max_plaquette_residual =
            std::max(mesh.quality.max_plaquette_residual, v);
    for (double v : seam)
        mesh.quality.max_seam_mismatch =
            std::max(mesh.quality.max_seam_mismatch, v);

    // drop degenerate triangles (zero area in the projected coordinates)
    auto area2 = [&](const std::array<int, 3>& f) {
        const auto& a = mesh.vertices[f[0]].position;
        const auto& b = mesh.vertices[f[1]].position;
        const auto& c = mesh.vertices[f[2]].position;
        const double ux = b[0] - a[0], uy = b[1] - a[1], uz = b[2] - a[2];
        const double vx = c[0] - a[0], vy = c[1] - a[1], vz = c[2] - a[2];
        const double cx = uy * vz - uz * vy;
        const double cy = uz * vx - ux * vz;
        const double cz = ux * vy - uy * vx;
        return cx * cx + cy * cy + cz * cz;
    };
    std::erase_if(mesh.faces,
                  [&](const std::array<int, 3>& f) { return area2(f) <= 0.0; });

    return mesh;
}

// ---------------------------------------------------------------------------
// Export.

inline void write_obj(const MeshData& mesh, const std::string& filename) {
    std::ofstream out(filename);
    if (!out) throw std::runtime_error("cannot open " + filename);
    char line[160];
    std::snprintf(line, sizeof line, "# gkcat mesh k=%d lambda=%.12g c=%.12g space=%s\n",
                  mesh.k, mesh.lambda, mesh.c, to_string(mesh.ambient));
    out << line;
    for (const auto& v : mesh.vertices) {
        std::snprintf(line, sizeof line, "v %.9g %.9g %.9g\n", v.position[0],
                      v.position[1], v.position[2]);
        out << line;
    }
    for (const auto& f : mesh.faces) {
        std::snprintf(line, sizeof line, "f %d %d %d\n", f[0] + 1, f[1] + 1,
                      f[2] + 1);
        out << line;
    }
}

/// Binary little-endian PLY.  Per vertex: projected position (x, y, z),
/// raw Minkowski coordinates (x0..x3), and a `singular` flag as uchar.
inline void write_ply(const MeshData& mesh, const std::string& filename) {
    std::ofstream out(filename, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open " + filename);
    out << "ply\nformat binary_little_endian 1.0\n";
    out << "comment gkcat mesh k=" << mesh.k << " space=" << to_string(mesh.ambient)
        << "\n";
    out << "element vertex " << mesh.vertices.size() << "\n";
    for (const char* prop : {"x", "y", "z"})
        out << "property float " << prop << "\n";
    for (const char* prop : {"x0", "x1", "x2", "x3"})
        out << "property float " << prop << "\n";
    out << "property uchar singular\n";
    out << "element face " << mesh.faces.size() << "\n";
    out << "property list uchar int vertex_indices\n";
    out << "end_header\n";
    auto put_float = [&](double v) {
        const float f = static_cast<float>(v);
        out.write(reinterpret_cast<const char*>(&f), 4);
    };
    for (const auto& v : mesh.vertices) {
        put_float(v.position[0]);
        put_float(v.position[1]);
        put_float(v.position[2]);
        put_float(v.ambient.x0);
        put_float(v.ambient.x1);
        put_float(v.ambient.x2);
        put_float(v.ambient.x3);
        const unsigned char flag = v.singular ? 1 : 0;
        out.write(reinterpret_cast<const char*>(&flag), 1);
    }
    for (const auto& f : mesh.faces) {
        const unsigned char n = 3;
        out.write(reinterpret_cast<const char*>(&n), 1);
        for (int idx : f) {
            const std::int32_t v = idx;
            out.write(reinterpret_cast<const char*>(&v), 4);
        }
    }
}

inline std::string mesh_metadata_json(const MeshData& mesh) {
    JsonWriter w;
    w.begin_object();
    w.field("k", mesh.k);
    w.field("lambda", mesh.lambda);
    w.field("c", mesh.c);
    w.field("ambient", to_string(mesh.ambient));
    w.field("projection", mesh.ambient == Ambient::H3 ? "poincare-ball"
                                                      : "bounded-minkowski");
    w.key("resolution");
    w.begin_object();
    w.field("radial", mesh.resolution.radial);
    w.field("angular", mesh.resolution.angular);
    w.end_object();
    w.field("sheets", mesh.k + 1);
    w.field("r_min", mesh.r_min);
    w.field("r_max", mesh.r_max);
    w.field("vertex_count", static_cast<int>(mesh.vertices.size()));
    w.field("face_count", static_cast<int>(mesh.faces.size()));
    int singular = 0;
    for (const auto& v : mesh.vertices) singular += v.singular ? 1 : 0;
    w.field("singular_vertex_count", singular);
    w.key("quality");
    w.begin_object();
    w.field("max_plaquette_residual", mesh.quality.max_plaquette_residual);
    w.field("max_seam_mismatch", mesh.quality.max_seam_mismatch);
    w.field("max_norm_defect", mesh.quality.max_norm_defect);
    w.field("omitted_cells", mesh.quality.omitted_cells);
    w.end_object();
    w.end_object();
    return w.str();
}

inline void write_mesh_json(const MeshData& mesh, const std::string& filename) {
    std::ofstream out(filename);
    if (!out) throw std::runtime_error("cannot open " + filename);
    out << mesh_metadata_json(mesh);
}

}  // namespace gkcat

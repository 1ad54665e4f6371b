#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "gkcat/curve.hpp"
#include "gkcat/errors.hpp"
#include "gkcat/monodromy.hpp"
#include "gkcat/parallel.hpp"

namespace gkcat {

struct SolverOptions {
    TransportOptions transport;
    double form_tol = 1e-8;
    double root_tol = 1e-10;         // bracket width at which refinement stops
    double gap_accept = 1e-8;        // |h1 - h2| for a genuine root
    double exclusion_radius = 1e-3;  // around c = 0, where Omega degenerates
    double unit_h_band = 1e-6;       // roots with |h| this close to 1 are rejected
};

/// h1 - h2 at the given parameters.
inline double h_gap(const CurveParams& p, const SolverOptions& opt = {}) {
    const ClosingData cd = closing_pair(p, opt.transport, opt.form_tol);
    return cd.h1 - cd.h2;
}

enum class SampleStatus { Ok, Excluded, Degenerate, Failed };

inline const char* to_string(SampleStatus s) {
    switch (s) {
        case SampleStatus::Ok: return "ok";
        case SampleStatus::Excluded: return "excluded";
        case SampleStatus::Degenerate: return "degenerate";
        case SampleStatus::Failed: return "failed";
    }
    return "?";
}

struct ScanSample {
    double c = 0;
    double h1 = 0, h2 = 0, gap = 0;
    SampleStatus status = SampleStatus::Failed;
};

/// Evaluates the gap on a uniform grid of `steps` points.  Per-sample
/// failures are recorded, not thrown; samples inside the exclusion radius
/// around c = 0 are skipped.  Evaluations run in parallel.
inline std::vector<ScanSample> scan(int k, double lambda, double c_min,
                                    double c_max, int steps,
                                    const SolverOptions& opt = {}) {
    if (steps <= 0 || c_max < c_min) return {};
    std::vector<ScanSample> samples(steps);
    const double dx = steps > 1 ? (c_max - c_min) / (steps - 1) : 0.0;
    parallel_for(static_cast<std::size_t>(steps), [&](std::size_t i) {
        ScanSample& s = samples[i];
        s.c = c_min + dx * static_cast<double>(i);
        if (std::abs(s.c) < opt.exclusion_radius) {
            s.status = SampleStatus::Excluded;
            return;
        }
        try {
            const ClosingData cd =
                closing_pair(make_params(k, lambda, s.c), opt.transport, opt.form_tol);
            s.h1 = cd.h1;
            s.h2 = cd.h2;
            s.gap = cd.h1 - cd.h2;
            s.status = SampleStatus::Ok;
        } catch (const ClosingError& e) {
            s.status = e.kind == ClosingError::Kind::DegenerateDenominator
                           ? SampleStatus::Degenerate
                           : SampleStatus::Failed;
        } catch (const TransportError&) {
            s.status = SampleStatus::Failed;
        }
    });
    return samples;
}

/// Sign changes of the gap between consecutive valid samples.  Note that a
/// pole of h2 also flips the sign; find_root tells the two cases apart.
inline std::vector<std::pair<double, double>>
sign_change_brackets(const std::vector<ScanSample>& samples) {
    std::vector<std::pair<double, double>> out;
    const ScanSample* prev = nullptr;
    for (const auto& s : samples) {
        if (s.status != SampleStatus::Ok) continue;
        if (prev && std::signbit(prev->gap) != std::signbit(s.gap))
            out.emplace_back(prev->c, s.c);
        prev = &s;
    }
    return out;
}

inline double end_discriminant(double c, int k, double lambda) {
    return 1.0 - 4.0 * c * (k + 1) *
                     std::exp(static_cast<double>(k) / (k + 1) * std::log(lambda));
}

/// |h| > 1 puts the surface in H3; |h| < 1 in de Sitter space, subtyped by
/// the sign of the end discriminant 1 - 4 c (k+1) lambda^(k/(k+1)).
inline Ambient classify(double h, double c, int k, double lambda) {
    if (std::abs(std::abs(h) - 1.0) <= 1e-6)
        throw SolverError("|h| = 1 is excluded by the closing condition");
    if (std::abs(h) > 1.0) return Ambient::H3;
    const double disc = end_discriminant(c, k, lambda);
    if (std::abs(disc) <= 1e-10) return Ambient::DSParabolic;
    return disc > 0.0 ? Ambient::DSElliptic : Ambient::DSHyperbolic;
}

/// Initial-frame scalars reproducing h.
///   H3:  h = (a^2+b^2)/(2ab) with a^2 - b^2 = 1; sign(b) = sign(h).
///   DS:  h = (a^2-b^2)/(a^2+b^2) with -2ab = 1; b > 0, a < 0.
inline std::pair<double, double> initial_frame(double h, Ambient target) {
    if (target == Ambient::H3) {
        if (std::abs(h) <= 1.0)
            throw std::invalid_argument("H3 initial frame needs |h| > 1");
        const double s = 0.5 * (std::sqrt(h * h / (h * h - 1.0)) - 1.0);
        const double beta = std::copysign(std::sqrt(s), h);
        return {std::sqrt(1.0 + s), beta};
    }
    if (std::abs(h) >= 1.0)
        throw std::invalid_argument("de Sitter initial frame needs |h| < 1");
    const double beta = std::pow((1.0 - h) / (4.0 * (1.0 + h)), 0.25);
    return {-0.5 / beta, beta};
}

/// h as reproduced from the frame scalars; inverse of initial_frame.
inline double h_from_frame(double alpha, double beta, Ambient target) {
    const double a2 = alpha * alpha, b2 = beta * beta;
    if (target == Ambient::H3) return (a2 + b2) / (2.0 * alpha * beta);
    return (a2 - b2) / (a2 + b2);
}

struct SolveResult {
    int k = 0;
    double lambda = 0;
    double c_star = 0;
    double h = 0;
    Ambient ambient = Ambient::H3;
    double discriminant = 0;
    double alpha = 0, beta = 0;
    double gap_residual = 0;         // |h1 - h2| at c_star
    double membership_residual = 0;  // worst unitary-group residual of both
                                     // conjugated monodromies
    std::pair<double, double> bracket{0, 0};
};

namespace detail {

/// Gap evaluation that remembers the full closing data of the last call.
struct GapFn {
    int k;
    double lambda;
    const SolverOptions& opt;
    ClosingData last;

    double operator()(double c) {
        last = closing_pair(make_params(k, lambda, c), opt.transport, opt.form_tol);
        return last.h1 - last.h2;
    }
};

/// Brent's method: bisection safeguarded by inverse quadratic / secant
/// acceleration.  Returns the best abscissa once the bracket is below tol.
template <typename Fn>
double brent(Fn& fn, double xa, double xb, double fa, double fb, double tol,
             int max_iter = 200) {
    double xc = xa, fc = fa;
    double d = xb - xa, e = d;
    for (int iter = 0; iter < max_iter; ++iter) {
        if (std::abs(fc) < std::abs(fb)) {
            xa = xb; xb = xc; xc = xa;
            fa = fb; fb = fc; fc = fa;
        }
        const double mid = 0.5 * (xc - xb);
        const double scaled_tol = 0.5 * tol + 2.0 * 1e-16 * std::abs(xb);
        if (std::abs(mid) <= scaled_tol || fb == 0.0) return xb;
        if (std::abs(e) >= scaled_tol && std::abs(fa) > std::abs(fb)) {
            double pp, qq;
            const double s = fb / fa;
            if (xa == xc) {  // secant
                pp = 2.0 * mid * s;
                qq = 1.0 - s;
            } else {  // inverse quadratic
                const double q = fa / fc, r = fb / fc;
                pp = s * (2.0 * mid * q * (q - r) - (xb - xa) * (r - 1.0));
                qq = (q - 1.0) * (r - 1.0) * (s - 1.0);
            }
            if (pp > 0.0) qq = -qq;
            pp = std::abs(pp);
            if (2.0 * pp < std::min(3.0 * mid * qq - std::abs(scaled_tol * qq),
                                    std::abs(e * qq))) {
                e = d;
                d = pp / qq;
            } else {
                d = mid;
                e = d;
            }
        } else {
            d = mid;
            e = d;
        }
        xa = xb;
        fa = fb;
        xb += (std::abs(d) > scaled_tol) ? d : std::copysign(scaled_tol, mid);
        fb = fn(xb);
        if ((fb > 0.0) == (fc > 0.0)) {
            xc = xa;
            fc = fa;
            d = e = xb - xa;
        }
    }
    return xb;
}

}  // namespace detail

/// Refines a bracket with opposite gap signs down to root_tol, then verifies
/// the refined point: the gap must actually vanish there (a pole of h2 also
/// flips the sign but leaves a huge residual) and |h| must stay away from 1.
inline SolveResult find_root(int k, double lambda,
                             std::pair<double, double> bracket,
                             const SolverOptions& opt = {}) {
    detail::GapFn gap{k, lambda, opt, {}};
    double fa, fb;
    try {
        fa = gap(bracket.first);
        fb = gap(bracket.second);
    } catch (const ClosingError& e) {
        throw SolverError(std::string("bracket endpoint failed: ") + e.what());
    }
    if (std::signbit(fa) == std::signbit(fb))
        throw SolverError("gap has no sign change over the bracket");

    double c_star, res;
    try {
        c_star = detail::brent(gap, bracket.first, bracket.second, fa, fb,
                               opt.root_tol);
        // polish to the noise floor of the gap: the group-membership defect
        // of the conjugated monodromies is the gap amplified by the entry
        // magnitudes, so stopping at root_tol is not always enough
        c_star = detail::brent(gap, bracket.first, bracket.second, fa, fb,
                               1e-15 * std::max(1.0, std::abs(c_star)));
        res = std::abs(gap(c_star));
    } catch (const ClosingError& e) {
        // refinement walked into a degenerate point, e.g. a pole of h2
        throw SolverError(std::string("no root in bracket: ") + e.what());
    } catch (const TransportError& e) {
        throw SolverError(std::string("no root in bracket: ") + e.what());
    }
    if (res > opt.gap_accept)
        throw SolverError("bracket does not contain a root (pole crossing?)");
    const ClosingData cd = gap.last;

    SolveResult out;
    out.k = k;
    out.lambda = lambda;
    out.c_star = c_star;
    out.h = 0.5 * (cd.h1 + cd.h2);
    out.gap_residual = res;
    out.bracket = bracket;
    if (std::abs(std::abs(out.h) - 1.0) <= opt.unit_h_band)
        throw SolverError("root has |h| = 1, excluded by the closing condition");
    out.ambient = classify(out.h, c_star, k, lambda);
    out.discriminant = end_discriminant(c_star, k, lambda);
    const auto [alpha, beta] = initial_frame(out.h, out.ambient);
    out.alpha = alpha;
    out.beta = beta;
    const Mat2 g1 = conjugated_monodromy(cd.m1, alpha, beta, out.ambient);
    const Mat2 g2 = conjugated_monodromy(cd.m2, alpha, beta, out.ambient);
    out.membership_residual =
        out.ambient == Ambient::H3
            ? std::max(su2_residual(g1), su2_residual(g2))
            : std::max(su11_residual(g1), su11_residual(g2));
    return out;
}

// ---------------------------------------------------------------------------
// Targeted search used by the CLI and the tables.

enum class Target { H3, DSElliptic, DSHyperbolic };

inline const char* to_string(Target t) {
    switch (t) {
        case Target::H3: return "h3";
        case Target::DSElliptic: return "ds-elliptic";
        case Target::DSHyperbolic: return "ds-hyperbolic";
    }
    return "?";
}

inline bool matches(Target t, Ambient a) {
    return (t == Target::H3 && a == Ambient::H3) ||
           (t == Target::DSElliptic && a == Ambient::DSElliptic) ||
           (t == Target::DSHyperbolic && a == Ambient::DSHyperbolic);
}

struct ScanWindow {
    double lo, hi;
    int steps;
};

/// Default c windows per family.  Wide enough to cover the whole genus range
/// at lambda near 2; pole crossings inside them are rejected by find_root.
inline ScanWindow default_window(Target t) {
    switch (t) {
        case Target::H3: return {-0.2, -0.004, 400};
        case Target::DSElliptic: return {-0.75, -0.25, 200};
        case Target::DSHyperbolic: return {0.25, 0.85, 240};
    }
    return {0, 0, 0};
}

/// First genuine root of the requested family.  With an explicit bracket the
/// classification must match the target; without one the default window is
/// scanned and every sign change tried in order.  Empty optional = no root.
inline std::optional<SolveResult>
solve_target(int k, double lambda, Target target,
             std::optional<std::pair<double, double>> bracket,
             const SolverOptions& opt = {}) {
    if (bracket) {
        SolveResult r = find_root(k, lambda, *bracket, opt);  // may throw SolverError
        if (!matches(target, r.ambient)) return std::nullopt;
        return r;
    }
    const ScanWindow win = default_window(target);
    const auto samples = scan(k, lambda, win.lo, win.hi, win.steps, opt);
    for (const auto& br : sign_change_brackets(samples)) {
        try {
            SolveResult r = find_root(k, lambda, br, opt);
            if (matches(target, r.ambient)) return r;
        } catch (const SolverError&) {
            // pole crossing or excluded h; try the next bracket
        }
    }
    return std::nullopt;
}

struct TableRow {
    int k = 0;
    std::optional<SolveResult> h3, elliptic, hyperbolic;
    std::string diagnostics;
};

inline TableRow solve_table_row(int k, double lambda,
                                const SolverOptions& opt = {}) {
    TableRow row;
    row.k = k;
    struct Slot {
        Target target;
        std::optional<SolveResult>& dest;
    } slots[] = {{Target::H3, row.h3},
                 {Target::DSElliptic, row.elliptic},
                 {Target::DSHyperbolic, row.hyperbolic}};
    for (auto& slot : slots) {
        try {
            slot.dest = solve_target(k, lambda, slot.target, std::nullopt, opt);
            if (!slot.dest) {
                if (!row.diagnostics.empty()) row.diagnostics += "; ";
                row.diagnostics += std::string(to_string(slot.target)) + ": no root";
            }
        } catch (const std::exception& e) {
            if (!row.diagnostics.empty()) row.diagnostics += "; ";
            row.diagnostics += std::string(to_string(slot.target)) + ": " + e.what();
        }
    }
    return row;
}

/// All rows k = 1..k_max, computed in parallel across k.
inline std::vector<TableRow> solve_table(int k_max, double lambda,
                                         const SolverOptions& opt = {}) {
    if (k_max < 1) throw std::invalid_argument("k_max must be >= 1");
    std::vector<TableRow> rows(static_cast<std::size_t>(k_max));
    parallel_for(rows.size(), [&](std::size_t i) {
        rows[i] = solve_table_row(static_cast<int>(i) + 1, lambda, opt);
    });
    return rows;
}

struct ContinuationResult {
    std::vector<SolveResult> roots;
    bool complete = true;
    std::string diagnostic;
};

/// Walks lambda from lambda_from to lambda_to in `steps` increments,
/// re-solving with the previous root as bracket center (+-10% width, one
/// doubling retry).  steps == 0 just re-verifies the seed.  A lost bracket
/// aborts the branch and returns the partial list.
inline ContinuationResult continue_in_lambda(int k, double lambda_from,
                                             double lambda_to, int steps,
                                             double seed_c,
                                             const SolverOptions& opt = {}) {
    ContinuationResult out;
    auto solve_near = [&](double lambda, double center) -> SolveResult {
        double width = std::max(0.1 * std::abs(center), 32.0 * opt.root_tol);
        for (int attempt = 0; attempt < 2; ++attempt, width *= 2.0) {
            try {
                return find_root(k, lambda, {center - width, center + width}, opt);
            } catch (const SolverError&) {
                if (attempt == 1) throw;
            }
        }
        throw SolverError("unreachable");
    };
    try {
        if (steps == 0) {
            out.roots.push_back(solve_near(lambda_from, seed_c));
            return out;
        }
        double center = seed_c;
        for (int i = 1; i <= steps; ++i) {
            const double lambda =
                lambda_from + (lambda_to - lambda_from) * i / steps;
            SolveResult r = solve_near(lambda, center);
            center = r.c_star;
            out.roots.push_back(std::move(r));
        }
    } catch (const std::exception& e) {
        out.complete = false;
        out.diagnostic = std::string("branch lost: ") + e.what();
    }
    return out;
}

}  // namespace gkcat

#include <doctest.h>

#include <cmath>
#include <random>

#include "gkcat/monodromy.hpp"

using namespace gkcat;

namespace {

/// Random SL(2,C) matrix with controlled norm: raw determinants below 0.5
/// are rejected before normalizing, which keeps entries O(1) and the form
/// residuals near machine precision.
Mat2 random_sl2(std::mt19937& rng) {
    std::normal_distribution<double> n(0.0, 1.0);
    for (;;) {
        const Mat2 m{{n(rng), n(rng)}, {n(rng), n(rng)},
                     {n(rng), n(rng)}, {n(rng), n(rng)}};
        const Complex det = m.det();
        if (std::abs(det) < 0.5) continue;
        const Complex s = 1.0 / std::sqrt(det);
        return {m.a * s, m.b * s, m.c * s, m.d * s};
    }
}

}  // namespace

TEST_CASE("first loop monodromy: identity and worked example") {
    CHECK(max_abs_diff(first_loop_monodromy(Mat2::identity(), Complex(-1.0)),
                       Mat2::identity()) == 0.0);

    // F = (1+i, i; i, 0) with Lambda = -1 (genus 1)
    const Mat2 f{{1.0, 1.0}, {0.0, 1.0}, {0.0, 1.0}, {0.0, 0.0}};
    const Mat2 want{{-3.0, 0.0}, {-2.0, 0.0}, {2.0, 0.0}, {1.0, 0.0}};
    CHECK(max_abs_diff(first_loop_monodromy(f, Complex(-1.0)), want) < 1e-15);
}

TEST_CASE("second loop monodromy: identity and real input") {
    CHECK(max_abs_diff(second_loop_monodromy(Mat2::identity()),
                       Mat2::identity()) == 0.0);
    // real entries: the product is adjugate(F) F, off-diagonals vanish
    const Mat2 f{2.0, 3.0, 1.0, 2.0};  // det 1
    const Mat2 m = second_loop_monodromy(f);
    CHECK(std::abs(m.b) < 1e-15);
    CHECK(std::abs(m.c) < 1e-15);
}

TEST_CASE("structural form identities over random SL(2,C)") {
    std::mt19937 rng(20240607);
    for (int k = 1; k <= 6; ++k) {
        const Complex Lambda = make_params(k, 2.0, 1.0).Lambda;
        double worst1 = 0.0, worst2 = 0.0, worst_det = 0.0;
        for (int i = 0; i < 1000; ++i) {
            const Mat2 f = random_sl2(rng);
            const Mat2 m1 = first_loop_monodromy(f, Lambda);
            const Mat2 m2 = second_loop_monodromy(f);
            worst1 = std::max(worst1, first_form_residual(m1));
            worst2 = std::max(worst2, second_form_residual(m2));
            worst_det = std::max({worst_det, det_drift(m1), det_drift(m2)});
        }
        CHECK(worst1 <= 1e-12);
        CHECK(worst2 <= 1e-13);
        CHECK(worst_det <= 1e-9);
    }
}

TEST_CASE("closing extraction") {
    SUBCASE("identity monodromies are degenerate") {
        CHECK_THROWS_AS(extract_closing(Mat2::identity(), Mat2::identity()),
                        ClosingError);
        try {
            extract_closing(Mat2::identity(), Mat2::identity());
        } catch (const ClosingError& e) {
            CHECK(e.kind == ClosingError::Kind::DegenerateDenominator);
        }
    }
    SUBCASE("worked extraction and h2 degeneracy") {
        const Mat2 m1{-3.0, -2.0, 2.0, 1.0};
        const Mat2 m2{{0.0, 1.0}, 0.0, 0.0, {0.0, -1.0}};  // diag(i, -i)
        // h1 = 2 Re(-2) / (1 - (-3)) = -1, but r4 - r3 = 0
        CHECK_THROWS_AS(extract_closing(m1, m2), ClosingError);
        // pair m1 with a non-degenerate second monodromy to read off h1
        // (|q|^2 + r3 r4 = 0.45 + 0.55 = 1)
        const Mat2 ok2{{0.6, 0.3}, {0.0, 0.5}, {0.0, 1.1}, {0.6, -0.3}};
        const ClosingData cd = extract_closing(m1, ok2, 1e-6);
        CHECK(cd.h1 == doctest::Approx(-1.0));
        CHECK(cd.r1 == doctest::Approx(-3.0));
        CHECK(cd.r2 == doctest::Approx(1.0));
        CHECK(cd.p.real() == doctest::Approx(-2.0));
    }
    SUBCASE("malformed shapes are rejected") {
        const Mat2 bad{Complex(1.0, 0.5), 0.0, 0.0, Complex(1.0, -0.5)};
        CHECK_THROWS_AS(extract_closing(bad, Mat2{1.0, Complex(0.0, 0.2),
                                                  Complex(0.0, 0.2), 1.0}),
                        ClosingError);
    }
}

TEST_CASE("closing pair reproduces reference roots") {
    {
        const ClosingData cd = closing_pair(make_params(1, 2.0, -0.557726));
        CHECK(cd.h1 == doctest::Approx(0.130869).epsilon(1e-4));
        CHECK(cd.h2 == doctest::Approx(0.130869).epsilon(1e-4));
    }
    {
        const ClosingData cd = closing_pair(make_params(2, 2.0, 0.548964));
        CHECK(cd.h1 == doctest::Approx(0.0345248).epsilon(1e-3));
        CHECK(cd.h2 == doctest::Approx(0.0345248).epsilon(1e-3));
    }
    {
        // generic c does not close
        const ClosingData cd = closing_pair(make_params(1, 2.0, 0.1));
        CHECK(std::abs(cd.h1 - cd.h2) > 1e-3);
    }
}

TEST_CASE("monodromy product equals the frame transported around the loop") {
    // strong consistency check of the four-factor product: continue the
    // frame around the whole first loop and compare with the assembled
    // monodromy; same for the second loop
    for (double c : {0.5, -0.0467552}) {
        const CurveParams p = make_params(1, 2.0, c);
        const Path c1 = make_path_c1(p);
        const Path loop1 = concat({c1, conjugated(reversed(c1)), inverted(c1),
                                   conjugated(reversed(inverted(c1)))});
        const auto around = transport(p, loop1, p.w0, Mat2::identity());
        CHECK(std::abs(around.endpoint.w - Complex(p.w0)) < 1e-9);
        const auto f1 = transport(p, c1, p.w0, Mat2::identity());
        CHECK(max_abs_diff(around.frame,
                           first_loop_monodromy(f1.frame, p.Lambda)) < 1e-9);

        const Path c2 = make_path_c2(p);
        const Path loop2 = concat({c2, conjugated(reversed(c2))});
        const auto around2 = transport(p, loop2, p.w0, Mat2::identity());
        const auto f2 = transport(p, c2, p.w0, Mat2::identity());
        CHECK(max_abs_diff(around2.frame, second_loop_monodromy(f2.frame)) <
              1e-9);
    }
}

TEST_CASE("symmetry residuals are small") {
    const SymmetryReport rep = symmetry_residuals(make_params(1, 2.0, 0.5));
    CHECK(rep.mirror <= 1e-8);
    CHECK(rep.inversion <= 1e-8);
    CHECK(rep.rotation <= 1e-8);
}

TEST_CASE("conjugated monodromy") {
    const Mat2 m{{0.3, 1.0}, {2.0, -0.5}, {-1.9, 0.4}, {0.7, -0.2}};
    SUBCASE("identity frame leaves the matrix alone") {
        CHECK(max_abs_diff(conjugated_monodromy(m, 1.0, 0.0, Ambient::H3), m) <
              1e-15);
    }
    SUBCASE("similarity invariants survive") {
        const Mat2 g = conjugated_monodromy(m, 1.25, 0.75, Ambient::H3);
        CHECK(std::abs(g.trace() - m.trace()) < 1e-12);
        CHECK(std::abs(g.det() - m.det()) < 1e-12);
    }
    SUBCASE("non-unimodular frames are rejected") {
        CHECK_THROWS_AS(conjugated_monodromy(m, 1.0, 0.5, Ambient::H3),
                        std::invalid_argument);
        CHECK_THROWS_AS(conjugated_monodromy(m, 1.0, 1.0, Ambient::DSElliptic),
                        std::invalid_argument);
    }
}

TEST_CASE("membership residuals at a solved root") {
    // H3 root at genus 1
    const CurveParams p = make_params(1, 2.0, -0.0467552441920853);
    const ClosingData cd = closing_pair(p);
    const double h = 0.5 * (cd.h1 + cd.h2);
    REQUIRE(std::abs(cd.h1 - cd.h2) < 1e-6);
    const double s = 0.5 * (std::sqrt(h * h / (h * h - 1.0)) - 1.0);
    const double beta = std::copysign(std::sqrt(s), h);
    const double alpha = std::sqrt(1.0 + s);
    CHECK(su2_residual(conjugated_monodromy(cd.m1, alpha, beta, Ambient::H3)) <=
          1e-6);
    CHECK(su2_residual(conjugated_monodromy(cd.m2, alpha, beta, Ambient::H3)) <=
          1e-6);
}

TEST_CASE("h values carry no imaginary leakage") {
    // the extraction formulas are real by construction; the form residual
    // bounds what was discarded
    for (double c : {0.3, -0.45, 0.62}) {
        const ClosingData cd = closing_pair(make_params(2, 2.0, c));
        CHECK(cd.form_residual <= 1e-10);
    }
}

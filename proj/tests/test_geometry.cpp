#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "oracles.hpp"
#include "wg/geometry.hpp"

#include <cmath>

using namespace wg;

TEST_CASE("circle parametrization and classification")
{
    CircleCurve c(Vec2(0.1, -0.2), 0.5);
    for (double t : {0.0, 0.13, 0.5, 0.77, 0.999}) {
        Vec2 p = c.at(t);
        CHECK(std::abs((p - Vec2(0.1, -0.2)).norm() - 0.5) < 1e-15);
        CHECK(c.classify(p) == Side::on);
        // velocity is tangent: orthogonal to the radius
        CHECK(std::abs(c.velocity(t).dot(p - Vec2(0.1, -0.2))) < 1e-12);
        // parameter recovery
        double tr = c.param_near(p);
        CHECK(std::min(std::abs(tr - t), 1.0 - std::abs(tr - t)) < 1e-12);
    }
    CHECK(c.classify(Vec2(0.1, -0.2)) == Side::side1);
    CHECK(c.classify(Vec2(0.9, 0.9)) == Side::side2);
    CHECK(c.classify(Vec2(0.6, -0.2)) == Side::on); // exactly on
    // the side-1 outward normal points away from the center
    Vec2 n = c.normal_out_of_side1(0.3);
    CHECK(n.dot(c.at(0.3) - Vec2(0.1, -0.2)) > 0.0);
}

TEST_CASE("polar star arc length agrees with an adaptive quadrature oracle")
{
    const double r0 = 0.5, a = 0.25;
    const int m = 2;
    PolarStarCurve star(Vec2(0, 0), r0, a, m);
    double ours = arc_length(star, 0.0, 1.0, 64);
    double ref = oracle::polar_arc_length(
        [&](double th) { return r0 + a * std::sin(m * th); },
        [&](double th) { return a * m * std::cos(m * th); }, 0.0, 2.0 * M_PI);
    CHECK(std::abs(ours - ref) < 1e-10);

    // partial arcs and projection
    for (double t : {0.05, 0.42, 0.83}) {
        Vec2 p = star.at(t);
        CHECK(star.classify(p) == Side::on);
        Vec2 inward = star.at(t) * 0.9;
        CHECK(star.classify(inward) == Side::side1);
        CHECK(star.classify(star.project(inward)) == Side::on);
    }
}

TEST_CASE("curve factory round-trips kind and parameters")
{
    auto c = make_curve("circle", {0.0, 0.0, 0.5});
    CHECK(c->kind() == "circle");
    CHECK(c->params() == std::vector<double>{0.0, 0.0, 0.5});
    auto s = make_curve("polar_star", {0.0, 0.0, 0.5, 0.25, 2.0});
    CHECK(s->kind() == "polar_star");
    CHECK_THROWS_AS(make_curve("nurbs", {}), std::invalid_argument);
    // a star touching the origin is not a simple closed curve
    CHECK_THROWS_AS(PolarStarCurve(Vec2(0, 0), 1.0 / 7.0, 1.0 / 7.0, 5),
                    std::invalid_argument);
}

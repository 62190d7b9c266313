// geometry.hpp -- interface curves: closed, simple, piecewise-C2 parametric
// curves p(t), t in [0,1), oriented counterclockwise.  Side 1 is the bounded
// region enclosed by the curve.
#pragma once

#include "wg/quadrature.hpp"

#include <memory>
#include <string>
#include <vector>

namespace wg {

constexpr double tol_geom = 1e-12;

enum class Side { side1, side2, on };

class InterfaceCurve {
public:
    virtual ~InterfaceCurve() = default;

    virtual Vec2 at(double t) const = 0;
    virtual Vec2 velocity(double t) const = 0; // dp/dt, nonvanishing

    // Signed level function with the curve as zero set; negative on side 1.
    virtual double level(const Vec2& x) const = 0;

    // Parameter of the curve point radially/nearest associated with x
    // (x assumed on or near the curve).
    virtual double param_near(const Vec2& x) const = 0;

    // Point on the curve obtained by moving x along the shortest direction.
    virtual Vec2 project(const Vec2& x) const = 0;

    virtual std::string kind() const = 0;
    virtual std::vector<double> params() const = 0;

    Side classify(const Vec2& x, double tol = tol_geom) const
    {
        double d = level(x);
        if (d < -tol) return Side::side1;
        if (d > tol) return Side::side2;
        return Side::on;
    }

    // Unit tangent and the side-1 outward normal (tangent rotated -90 deg;
    // side 1 lies left of the ccw direction of travel).
    Vec2 unit_tangent(double t) const
    {
        Vec2 v = velocity(t);
        return v / v.norm();
    }
    Vec2 normal_out_of_side1(double t) const
    {
        Vec2 u = unit_tangent(t);
        return Vec2(u.y(), -u.x());
    }
};

// x^2 + y^2 = r^2 around a center.
class CircleCurve final : public InterfaceCurve {
public:
    CircleCurve(Vec2 center, double radius) : c_(center), r_(radius) {}

    Vec2 at(double t) const override;
    Vec2 velocity(double t) const override;
    double level(const Vec2& x) const override { return (x - c_).norm() - r_; }
    double param_near(const Vec2& x) const override;
    Vec2 project(const Vec2& x) const override;
    std::string kind() const override { return "circle"; }
    std::vector<double> params() const override { return {c_.x(), c_.y(), r_}; }

private:
    Vec2 c_;
    double r_;
};

// Polar star r(theta) = r0 + a sin(m theta) around a center; requires
// r0 > |a| so the curve stays simple.
class PolarStarCurve final : public InterfaceCurve {
public:
    PolarStarCurve(Vec2 center, double r0, double a, int m);

    Vec2 at(double t) const override;
    Vec2 velocity(double t) const override;
    double level(const Vec2& x) const override;
    double param_near(const Vec2& x) const override;
    Vec2 project(const Vec2& x) const override;
    std::string kind() const override { return "polar_star"; }
    std::vector<double> params() const override
    {
        return {c_.x(), c_.y(), r0_, a_, double(m_)};
    }

private:
    double radius(double theta) const;
    double dradius(double theta) const;
    Vec2 c_;
    double r0_, a_;
    int m_;
};

std::shared_ptr<InterfaceCurve> make_curve(const std::string& kind,
                                           const std::vector<double>& params);

// Arc length of p over [t0, t1] by composite Gauss; exact to roundoff for the
// short smooth arcs produced by interface fitting.
double arc_length(const InterfaceCurve& curve, double t0, double t1, int panels = 4);

} // namespace wg

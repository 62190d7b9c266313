#include "wg/geometry.hpp"

#include <cmath>
#include <stdexcept>

namespace wg {

static constexpr double two_pi = 2.0 * M_PI;

Vec2 CircleCurve::at(double t) const
{
    double th = two_pi * t;
    return c_ + r_ * Vec2(std::cos(th), std::sin(th));
}

Vec2 CircleCurve::velocity(double t) const
{
    double th = two_pi * t;
    return two_pi * r_ * Vec2(-std::sin(th), std::cos(th));
}

double CircleCurve::param_near(const Vec2& x) const
{
    double th = std::atan2(x.y() - c_.y(), x.x() - c_.x());
    double t = th / two_pi;
    return t < 0.0 ? t + 1.0 : t;
}

Vec2 CircleCurve::project(const Vec2& x) const
{
    return at(param_near(x));
}

PolarStarCurve::PolarStarCurve(Vec2 center, double r0, double a, int m)
    : c_(center), r0_(r0), a_(a), m_(m)
{
    if (!(r0 > std::abs(a)))
        throw std::invalid_argument("polar_star requires r0 > |a| (simple closed curve)");
}

double PolarStarCurve::radius(double theta) const { return r0_ + a_ * std::sin(m_ * theta); }
double PolarStarCurve::dradius(double theta) const { return a_ * m_ * std::cos(m_ * theta); }

Vec2 PolarStarCurve::at(double t) const
{
    double th = two_pi * t;
    return c_ + radius(th) * Vec2(std::cos(th), std::sin(th));
}

Vec2 PolarStarCurve::velocity(double t) const
{
    double th = two_pi * t;
    double r = radius(th), dr = dradius(th);
    Vec2 er(std::cos(th), std::sin(th)), et(-std::sin(th), std::cos(th));
    return two_pi * (dr * er + r * et);
}

double PolarStarCurve::level(const Vec2& x) const
{
    Vec2 d = x - c_;
    double th = std::atan2(d.y(), d.x());
    return d.norm() - radius(th);
}

double PolarStarCurve::param_near(const Vec2& x) const
{
    double th = std::atan2(x.y() - c_.y(), x.x() - c_.x());
    double t = th / two_pi;
    return t < 0.0 ? t + 1.0 : t;
}

Vec2 PolarStarCurve::project(const Vec2& x) const
{
    // radial move onto the zero level set; for |level| << feature size this is
    // within O(level^2) of the true closest point
    return at(param_near(x));
}

std::shared_ptr<InterfaceCurve> make_curve(const std::string& kind,
                                           const std::vector<double>& params)
{
    if (kind == "circle") {
        if (params.size() != 3) throw std::invalid_argument("circle expects cx cy r");
        return std::make_shared<CircleCurve>(Vec2(params[0], params[1]), params[2]);
    }
    if (kind == "polar_star") {
        if (params.size() != 5)
            throw std::invalid_argument("polar_star expects cx cy r0 a m");
        return std::make_shared<PolarStarCurve>(Vec2(params[0], params[1]), params[2],
                                                params[3], int(params[4]));
    }
    throw std::invalid_argument("unknown curve kind: " + kind);
}

double arc_length(const InterfaceCurve& curve, double t0, double t1, int panels)
{
    const Gauss1D& g = gauss_legendre(16);
    double total = 0.0;
    double dt = (t1 - t0) / panels;
    for (int p = 0; p < panels; ++p) {
        double a = t0 + p * dt;
        for (size_t i = 0; i < g.x.size(); ++i)
            total += g.w[i] * dt * curve.velocity(a + g.x[i] * dt).norm();
    }
    return total;
}

} // namespace wg

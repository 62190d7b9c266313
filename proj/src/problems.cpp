#include "wg/problems.hpp"

#include <cmath>
#include <random>

namespace wg {

ProblemData ManufacturedProblem::data() const
{
    ProblemData d;
    d.A1 = A1;
    d.A2 = A2;
    auto make_f = [](const ExactField& fld, Mat2 A) {
        return [fld, A](const Vec2& x) -> Vec2 { return -A * fld.lap_u(x) + fld.grad_p(x); };
    };
    d.f1 = make_f(omega1, A1);
    d.f2 = make_f(omega2, A2);
    d.g = omega2.u;
    ExactField u1 = omega1, u2 = omega2;
    d.phi = [u1, u2](const Vec2& x) -> Vec2 { return u1.u(x) - u2.u(x); };
    Mat2 A1c = A1, A2c = A2;
    d.psi = [u1, u2, A1c, A2c](const Vec2& x, const Vec2& n1) -> Vec2 {
        Mat2 sigma1 = A1c * u1.grad_u(x) - u1.p(x) * Mat2::Identity();
        Mat2 sigma2 = A2c * u2.grad_u(x) - u2.p(x) * Mat2::Identity();
        return (sigma1 - sigma2) * n1; // n2 = -n1
    };
    if (chord_interface_data && curve) {
        auto cv = curve;
        auto phi0 = d.phi;
        auto psi0 = d.psi;
        d.phi = [cv, phi0](const Vec2& x) { return phi0(cv->project(x)); };
        d.psi = [cv, psi0](const Vec2& x, const Vec2&) {
            double t = cv->param_near(x);
            return psi0(cv->at(t), cv->normal_out_of_side1(t));
        };
    }
    return d;
}

namespace {

ExactField problem1_inner()
{
    ExactField f;
    f.u = [](const Vec2& v) -> Vec2 {
        double x = v.x(), y = v.y();
        return {std::sin(2 * y) * std::cos(x), (std::sin(y) * std::sin(y) - 2) * std::sin(x)};
    };
    f.grad_u = [](const Vec2& v) -> Mat2 {
        double x = v.x(), y = v.y();
        Mat2 g;
        g(0, 0) = -std::sin(2 * y) * std::sin(x);
        g(0, 1) = 2 * std::cos(2 * y) * std::cos(x);
        g(1, 0) = (std::sin(y) * std::sin(y) - 2) * std::cos(x);
        g(1, 1) = std::sin(2 * y) * std::sin(x);
        return g;
    };
    f.lap_u = [](const Vec2& v) -> Vec2 {
        double x = v.x(), y = v.y();
        return {-5 * std::sin(2 * y) * std::cos(x),
                (2 - std::sin(y) * std::sin(y)) * std::sin(x) + 2 * std::cos(2 * y) * std::sin(x)};
    };
    f.p = [](const Vec2&) { return 1.0; };
    f.grad_p = [](const Vec2&) -> Vec2 { return {0.0, 0.0}; };
    return f;
}

ExactField problem1_outer()
{
    const double pi = M_PI;
    ExactField f;
    f.u = [pi](const Vec2& v) -> Vec2 {
        double x = v.x(), y = v.y();
        return {-std::cos(pi * x) * std::sin(pi * y), std::sin(pi * x) * std::cos(pi * y)};
    };
    f.grad_u = [pi](const Vec2& v) -> Mat2 {
        double x = v.x(), y = v.y();
        Mat2 g;
        g(0, 0) = pi * std::sin(pi * x) * std::sin(pi * y);
        g(0, 1) = -pi * std::cos(pi * x) * std::cos(pi * y);
        g(1, 0) = pi * std::cos(pi * x) * std::cos(pi * y);
        g(1, 1) = -pi * std::sin(pi * x) * std::sin(pi * y);
        return g;
    };
    f.lap_u = [pi](const Vec2& v) -> Vec2 {
        double x = v.x(), y = v.y();
        return {2 * pi * pi * std::cos(pi * x) * std::sin(pi * y),
                -2 * pi * pi * std::sin(pi * x) * std::cos(pi * y)};
    };
    f.p = [pi](const Vec2&) { return pi / (16.0 - pi); };
    f.grad_p = [](const Vec2&) -> Vec2 { return {0.0, 0.0}; };
    return f;
}

// Problems 2 and 3 share the exact velocity pair.
ExactField vortex_inner()
{
    const double pi = M_PI;
    ExactField f;
    f.u = [pi](const Vec2& v) -> Vec2 {
        double x = v.x(), y = v.y();
        double sx = std::sin(pi * x), sy = std::sin(pi * y);
        return {pi * sx * sx * std::sin(2 * pi * y), -pi * std::sin(2 * pi * x) * sy * sy};
    };
    f.grad_u = [pi](const Vec2& v) -> Mat2 {
        double x = v.x(), y = v.y();
        double sx = std::sin(pi * x), sy = std::sin(pi * y);
        double s2x = std::sin(2 * pi * x), s2y = std::sin(2 * pi * y);
        double c2x = std::cos(2 * pi * x), c2y = std::cos(2 * pi * y);
        Mat2 g;
        g(0, 0) = pi * pi * s2x * s2y;
        g(0, 1) = 2 * pi * pi * sx * sx * c2y;
        g(1, 0) = -2 * pi * pi * c2x * sy * sy;
        g(1, 1) = -pi * pi * s2x * s2y;
        return g;
    };
    f.lap_u = [pi](const Vec2& v) -> Vec2 {
        double x = v.x(), y = v.y();
        double sx = std::sin(pi * x), sy = std::sin(pi * y);
        double s2x = std::sin(2 * pi * x), s2y = std::sin(2 * pi * y);
        double c2x = std::cos(2 * pi * x), c2y = std::cos(2 * pi * y);
        double p3 = pi * pi * pi;
        return {2 * p3 * c2x * s2y - 4 * p3 * sx * sx * s2y,
                4 * p3 * s2x * sy * sy - 2 * p3 * s2x * c2y};
    };
    f.p = [](const Vec2&) { return 0.0; };
    f.grad_p = [](const Vec2&) -> Vec2 { return {0.0, 0.0}; };
    return f;
}

ExactField vortex_outer()
{
    const double pi = M_PI;
    ExactField f;
    f.u = [pi](const Vec2& v) -> Vec2 {
        double x = v.x(), y = v.y();
        return {x * x * y * y + std::exp(-y),
                -2.0 / 3.0 * x * y * y * y + 2.0 - pi * std::sin(pi * x)};
    };
    f.grad_u = [pi](const Vec2& v) -> Mat2 {
        double x = v.x(), y = v.y();
        Mat2 g;
        g(0, 0) = 2 * x * y * y;
        g(0, 1) = 2 * x * x * y - std::exp(-y);
        g(1, 0) = -2.0 / 3.0 * y * y * y - pi * pi * std::cos(pi * x);
        g(1, 1) = -2 * x * y * y;
        return g;
    };
    f.lap_u = [pi](const Vec2& v) -> Vec2 {
        double x = v.x(), y = v.y();
        return {2 * y * y + 2 * x * x + std::exp(-y),
                pi * pi * pi * std::sin(pi * x) - 4 * x * y};
    };
    f.p = [](const Vec2&) { return 0.0; };
    f.grad_p = [](const Vec2&) -> Vec2 { return {0.0, 0.0}; };
    return f;
}

} // namespace

ManufacturedProblem make_problem(int id)
{
    ManufacturedProblem prob;
    prob.id = id;
    switch (id) {
    case 1:
        prob.curve = std::make_shared<CircleCurve>(Vec2(0, 0), 0.5);
        prob.omega1 = problem1_inner();
        prob.omega2 = problem1_outer();
        break;
    case 2:
        // 5-petal flower; base radius 1/2 keeps the curve simple and closed
        prob.curve = std::make_shared<PolarStarCurve>(Vec2(0, 0), 0.5, 1.0 / 7.0, 5);
        prob.omega1 = vortex_inner();
        prob.omega2 = vortex_outer();
        break;
    case 3:
        prob.curve = std::make_shared<PolarStarCurve>(Vec2(0, 0), 0.5, 0.25, 2);
        prob.omega1 = vortex_inner();
        prob.omega2 = vortex_outer();
        prob.A2 = 10.0 * Mat2::Identity();
        break;
    default:
        throw std::invalid_argument("unknown problem id " + std::to_string(id));
    }
    check_derivatives(prob);
    return prob;
}

void check_derivatives(const ManufacturedProblem& prob, int npoints, unsigned long long seed)
{
    std::mt19937_64 rng(seed);
    auto uniform = [&rng](double lo, double hi) {
        return lo + (hi - lo) * ((rng() >> 11) * 0x1.0p-53);
    };
    const double hg = 1e-6, hl = 1e-4;
    for (const ExactField* fld : {&prob.omega1, &prob.omega2}) {
        for (int i = 0; i < npoints; ++i) {
            Vec2 x(uniform(prob.domain.x0 + 0.01, prob.domain.x1 - 0.01),
                   uniform(prob.domain.y0 + 0.01, prob.domain.y1 - 0.01));
            Mat2 g = fld->grad_u(x);
            Vec2 lap = fld->lap_u(x);
            Vec2 gp = fld->grad_p(x);
            for (int j = 0; j < 2; ++j) {
                Vec2 e = (j == 0) ? Vec2(1, 0) : Vec2(0, 1);
                Vec2 du = (fld->u(x + hg * e) - fld->u(x - hg * e)) / (2 * hg);
                for (int i2 = 0; i2 < 2; ++i2)
                    if (std::abs(du[i2] - g(i2, j)) > 1e-6 * std::max(1.0, std::abs(g(i2, j))))
                        throw DerivativeMismatch("grad_u component (" + std::to_string(i2) +
                                                 "," + std::to_string(j) + ")");
                double dp = (fld->p(x + hg * e) - fld->p(x - hg * e)) / (2 * hg);
                if (std::abs(dp - gp[j]) > 1e-6 * std::max(1.0, std::abs(gp[j])))
                    throw DerivativeMismatch("grad_p component " + std::to_string(j));
            }
            Vec2 lap_fd = (fld->u(x + hl * Vec2(1, 0)) + fld->u(x - hl * Vec2(1, 0)) +
                           fld->u(x + hl * Vec2(0, 1)) + fld->u(x - hl * Vec2(0, 1)) -
                           4.0 * fld->u(x)) /
                          (hl * hl);
            for (int i2 = 0; i2 < 2; ++i2)
                if (std::abs(lap_fd[i2] - lap[i2]) > 1e-6 * std::max(1.0, std::abs(lap[i2])))
                    throw DerivativeMismatch("lap_u component " + std::to_string(i2));
        }
    }
}

} // namespace wg

#include "wg/quadrature.hpp"

#include <cmath>
#include <map>
#include <mutex>

namespace wg {

static Gauss1D compute_gauss(int n)
{
    // Newton on the Legendre polynomial over [-1,1], then map to [0,1].
    Gauss1D rule;
    rule.x.resize(n);
    rule.w.resize(n);
    for (int i = 0; i < n; ++i) {
        double t = std::cos(M_PI * (i + 0.75) / (n + 0.5));
        double p0 = 0.0, p1 = 0.0;
        for (int it = 0; it < 100; ++it) {
            p0 = 1.0;
            p1 = t;
            for (int j = 2; j <= n; ++j) {
                double p2 = ((2.0 * j - 1.0) * t * p1 - (j - 1.0) * p0) / j;
                p0 = p1;
                p1 = p2;
            }
            double dp = n * (t * p1 - p0) / (t * t - 1.0);
            double dt = p1 / dp;
            t -= dt;
            if (std::abs(dt) < 1e-16) break;
        }
        // recompute derivative at the converged node
        p0 = 1.0;
        p1 = t;
        for (int j = 2; j <= n; ++j) {
            double p2 = ((2.0 * j - 1.0) * t * p1 - (j - 1.0) * p0) / j;
            p0 = p1;
            p1 = p2;
        }
        double dp = n * (t * p1 - p0) / (t * t - 1.0);
        rule.x[i] = 0.5 * (1.0 - t); // nodes come out descending; store ascending in x
        rule.w[i] = 1.0 / ((1.0 - t * t) * dp * dp);
    }
    return rule;
}

const Gauss1D& gauss_legendre(int n)
{
    static std::map<int, Gauss1D> cache;
    static std::mutex mtx;
    std::lock_guard<std::mutex> lock(mtx);
    auto it = cache.find(n);
    if (it == cache.end()) it = cache.emplace(n, compute_gauss(n)).first;
    return it->second;
}

std::vector<RefPoint> ref_square_rule(int m)
{
    if (m < 1) m = 1;
    const int n = gauss_points_for(m);
    const Gauss1D& g = gauss_legendre(n);
    std::vector<RefPoint> pts;
    pts.reserve(n * n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            pts.push_back({g.x[i], g.x[j], g.w[i] * g.w[j]});
    return pts;
}

std::vector<RefPoint> ref_triangle_rule(int m, int min_points_1d)
{
    if (m < 1) m = 1;
    // Duffy collapse (x, y) = (u, v(1-u)) with jacobian (1-u): the pullback of a
    // degree-m monomial has degree m+1 in u and m in v.
    int n = std::max(gauss_points_for(m + 1), min_points_1d);
    const Gauss1D& g = gauss_legendre(n);
    std::vector<RefPoint> pts;
    pts.reserve(n * n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            double u = g.x[i], v = g.x[j];
            pts.push_back({u, v * (1.0 - u), g.w[i] * g.w[j] * (1.0 - u)});
        }
    return pts;
}

} // namespace wg

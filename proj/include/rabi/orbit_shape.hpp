// orbit_shape.hpp: Regular/chaotic labelling of section orbits

#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <utility>
#include <vector>

#include "rabi/classical.hpp"

namespace rabi {

inline double convex_hull_area(std::vector<SectionPoint> pts) {
    if (pts.size() < 3) return 0.0;
    std::sort(pts.begin(), pts.end(), [](const SectionPoint& a, const SectionPoint& b) {
        return a.q1 < b.q1 || (a.q1 == b.q1 && a.p1 < b.p1);
    });
    auto cross = [](const SectionPoint& o, const SectionPoint& a, const SectionPoint& b) {
        return (a.q1 - o.q1) * (b.p1 - o.p1) - (a.p1 - o.p1) * (b.q1 - o.q1);
    };
    // Andrew's monotone chain
    std::vector<SectionPoint> hull(2 * pts.size());
    std::size_t k = 0;
    for (std::size_t i = 0; i < pts.size(); ++i) {
        while (k >= 2 && cross(hull[k - 2], hull[k - 1], pts[i]) <= 0) --k;
        hull[k++] = pts[i];
    }
    for (std::size_t i = pts.size() - 1, lower = k + 1; i-- > 0;) {
        while (k >= lower && cross(hull[k - 2], hull[k - 1], pts[i]) <= 0) --k;
        hull[k++] = pts[i];
    }
    hull.resize(k - 1);
    double area = 0.0;
    for (std::size_t i = 0; i < hull.size(); ++i) {
        const auto& a = hull[i];
        const auto& b = hull[(i + 1) % hull.size()];
        area += a.q1 * b.p1 - b.q1 * a.p1;
    }
    return 0.5 * std::abs(area);
}

// Local thickness of a point cloud: mean over points of sqrt(lmin / lmax) for
// the covariance of each point and its k nearest neighbours. Samples of a
// smooth curve give values near 0, a two-dimensional scatter gives O(1).
inline double curve_residual(const std::vector<SectionPoint>& pts, std::size_t k = 8) {
    const std::size_t n = pts.size();
    if (n <= k) return 0.0;
    std::vector<std::pair<double, std::size_t>> d(n);
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            const double dq = pts[j].q1 - pts[i].q1, dp = pts[j].p1 - pts[i].p1;
            d[j] = {dq * dq + dp * dp, j};
        }
        std::partial_sort(d.begin(), d.begin() + static_cast<std::ptrdiff_t>(k + 1), d.end());
        double mq = 0, mp = 0;
        for (std::size_t a = 0; a <= k; ++a) {
            mq += pts[d[a].second].q1;
            mp += pts[d[a].second].p1;
        }
        mq /= double(k + 1);
        mp /= double(k + 1);
        double cqq = 0, cpp = 0, cqp = 0;
        for (std::size_t a = 0; a <= k; ++a) {
            const double dq = pts[d[a].second].q1 - mq, dp = pts[d[a].second].p1 - mp;
            cqq += dq * dq;
            cpp += dp * dp;
            cqp += dq * dp;
        }
        const double half_tr = 0.5 * (cqq + cpp);
        const double disc = std::sqrt(std::max(0.0, 0.25 * (cqq - cpp) * (cqq - cpp) + cqp * cqp));
        const double lmax = half_tr + disc, lmin = std::max(0.0, half_tr - disc);
        total += lmax > 0 ? std::sqrt(lmin / lmax) : 0.0;
    }
    return total / double(n);
}

enum class OrbitClass { regular, chaotic };

inline const char* to_string(OrbitClass c) { return c == OrbitClass::regular ? "regular" : "chaotic"; }

struct OrbitShape {
    double hull_area{0.0};
    double curve_residual{0.0};
    OrbitClass label{OrbitClass::regular};
};

inline constexpr double kChaoticResidual = 0.2;

inline OrbitShape classify_orbit(const SectionPointSet& s) {
    OrbitShape shape;
    shape.hull_area = convex_hull_area(s.points);
    shape.curve_residual = curve_residual(s.points);
    shape.label = shape.curve_residual > kChaoticResidual ? OrbitClass::chaotic : OrbitClass::regular;
    return shape;
}

} // namespace rabi

// grid.hpp: Rectangular grids of real values with axis metadata

#pragma once

#include <cmath>
#include <cstddef>
#include <limits>
#include <string>

#include <Eigen/Dense>

#include "rabi/errors.hpp"

namespace rabi {

struct Axis {
    std::string name;
    double min{0.0};
    double max{1.0};
    int n{2};

    double at(int i) const { return n == 1 ? 0.5 * (min + max) : min + (max - min) * double(i) / double(n - 1); }
    double step() const { return n == 1 ? 0.0 : (max - min) / double(n - 1); }

    void validate() const {
        if (n < 1) throw ValidationError("axis " + name + ": resolution must be >= 1");
        if (!(max >= min) || !std::isfinite(min) || !std::isfinite(max)) {
            throw ValidationError("axis " + name + ": need finite min <= max");
        }
        if (n > 1 && !(max > min)) throw ValidationError("axis " + name + ": empty range with resolution > 1");
    }

    friend bool operator==(const Axis&, const Axis&) = default;
};

// values(iy, ix) holds the sample at (x.at(ix), y.at(iy)). Missing samples are NaN.
struct GridField {
    Axis x;
    Axis y;
    Eigen::MatrixXd values;

    GridField() = default;
    GridField(Axis x_axis, Axis y_axis, double fill = 0.0)
        : x(std::move(x_axis)), y(std::move(y_axis)), values(Eigen::MatrixXd::Constant(y.n, x.n, fill)) {}

    std::size_t size() const { return static_cast<std::size_t>(x.n) * static_cast<std::size_t>(y.n); }
    double cell_area() const { return x.step() * y.step(); }
};

inline constexpr double kMissing = std::numeric_limits<double>::quiet_NaN();

} // namespace rabi

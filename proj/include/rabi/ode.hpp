// ode.hpp: Adaptive Dormand–Prince 5(4) stepper with dense output

#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <limits>
#include <sstream>
#include <utility>

#include <Eigen/Dense>

#include "rabi/errors.hpp"

namespace rabi {

struct StepperOptions {
    double rtol{1e-10};
    double atol{1e-10};
    double h_init{0.0};  // 0 selects a starting step automatically
    double h_max{std::numeric_limits<double>::infinity()};
};

// Explicit 5(4) pair with local extrapolation, FSAL and Hairer's fourth-order
// continuous extension. Rhs is any callable Vec(const Vec&); a non-finite
// result rejects the trial step and shrinks h.
template <int Dim, class Rhs>
class DormandPrince45 {
public:
    using Vec = Eigen::Matrix<double, Dim, 1>;

    DormandPrince45(Rhs rhs, const Vec& y0, double t0, double direction, StepperOptions opts = {})
        : rhs_(std::move(rhs)), opts_(opts), t_(t0), t_prev_(t0), y_(y0), y_prev_(y0),
          dir_(direction < 0 ? -1.0 : 1.0) {
        k1_ = rhs_(y_);
        h_ = opts_.h_init > 0 ? opts_.h_init : initial_step();
    }

    double t() const { return t_; }
    const Vec& y() const { return y_; }
    double t_prev() const { return t_prev_; }
    const Vec& y_prev() const { return y_prev_; }
    double last_step() const { return t_ - t_prev_; }
    std::size_t accepted() const { return accepted_; }
    std::size_t rejected() const { return rejected_; }

    // Overwrites the current state (e.g. after a manifold projection). The
    // dense interpolant of the last step is left untouched.
    void replace_state(const Vec& y) {
        y_ = y;
        k1_ = rhs_(y_);
    }

    // Advances one accepted step, never past t_stop in the integration direction.
    void step(double t_stop) {
        static constexpr double a21 = 1.0 / 5;
        static constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
        static constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
        static constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                                a54 = -212.0 / 729;
        static constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                                a64 = 49.0 / 176, a65 = -5103.0 / 18656;
        static constexpr double a71 = 35.0 / 384, a73 = 500.0 / 1113, a74 = 125.0 / 192,
                                a75 = -2187.0 / 6784, a76 = 11.0 / 84;
        static constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                                e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;
        static constexpr double d1 = -12715105075.0 / 11282082432.0, d3 = 87487479700.0 / 32700410799.0,
                                d4 = -10690763975.0 / 1880347072.0, d5 = 701980252875.0 / 199316789632.0,
                                d6 = -1453857185.0 / 822651844.0, d7 = 69997945.0 / 29380423.0;

        for (;;) {
            double h = dir_ * std::min(std::abs(h_), opts_.h_max);
            bool last = false;
            if (dir_ * (t_ + h - t_stop) >= 0.0) {
                h = t_stop - t_;
                last = true;
            }
            if (std::abs(h) < 1e-14 * std::max(1.0, std::abs(t_))) {
                std::ostringstream os;
                os << "step size underflow at t=" << t_ << " (h=" << h << ")";
                throw StepSizeError(os.str());
            }

            const Vec k2 = rhs_(y_ + h * a21 * k1_);
            const Vec k3 = rhs_(y_ + h * (a31 * k1_ + a32 * k2));
            const Vec k4 = rhs_(y_ + h * (a41 * k1_ + a42 * k2 + a43 * k3));
            const Vec k5 = rhs_(y_ + h * (a51 * k1_ + a52 * k2 + a53 * k3 + a54 * k4));
            const Vec k6 = rhs_(y_ + h * (a61 * k1_ + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5));
            const Vec y1 = y_ + h * (a71 * k1_ + a73 * k3 + a74 * k4 + a75 * k5 + a76 * k6);
            const Vec k7 = rhs_(y1);
            const Vec err = h * (e1 * k1_ + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);

            double norm = 0.0;
            for (int i = 0; i < y_.size(); ++i) {
                const double sc = opts_.atol + opts_.rtol * std::max(std::abs(y_[i]), std::abs(y1[i]));
                norm += (err[i] / sc) * (err[i] / sc);
            }
            norm = std::sqrt(norm / double(y_.size()));

            if (!std::isfinite(norm) || !y1.allFinite()) {
                h_ = 0.2 * std::abs(h);
                ++rejected_;
                continue;
            }
            const double fac = std::clamp(0.9 * std::pow(std::max(norm, 1e-300), -0.2), 0.2, 5.0);
            if (norm > 1.0) {
                h_ = std::abs(h) * std::min(1.0, fac);
                ++rejected_;
                continue;
            }

            const Vec diff = y1 - y_;
            const Vec bspl = h * k1_ - diff;
            cont_[0] = y_;
            cont_[1] = diff;
            cont_[2] = bspl;
            cont_[3] = diff - h * k7 - bspl;
            cont_[4] = h * (d1 * k1_ + d3 * k3 + d4 * k4 + d5 * k5 + d6 * k6 + d7 * k7);

            t_prev_ = t_;
            y_prev_ = y_;
            t_ = last ? t_stop : t_ + h;
            y_ = y1;
            k1_ = k7;
            // a step clipped to t_stop says nothing about the natural step size
            if (!last) h_ = std::abs(h) * fac;
            ++accepted_;
            return;
        }
    }

    // Interpolated state at t in [t_prev, t] of the last accepted step.
    Vec dense(double t) const {
        const double h = t_ - t_prev_;
        const double th = h != 0.0 ? (t - t_prev_) / h : 0.0;
        const double th1 = 1.0 - th;
        return cont_[0] + th * (cont_[1] + th1 * (cont_[2] + th * (cont_[3] + th1 * cont_[4])));
    }

private:
    double initial_step() {
        const int n = static_cast<int>(y_.size());
        auto sc = [&](int i) { return opts_.atol + opts_.rtol * std::abs(y_[i]); };
        double d0 = 0, d1 = 0;
        for (int i = 0; i < n; ++i) {
            d0 += std::pow(y_[i] / sc(i), 2);
            d1 += std::pow(k1_[i] / sc(i), 2);
        }
        d0 = std::sqrt(d0 / n);
        d1 = std::sqrt(d1 / n);
        const double h0 = (d0 < 1e-5 || d1 < 1e-5) ? 1e-6 : 0.01 * d0 / d1;
        const Vec k2 = rhs_(y_ + dir_ * h0 * k1_);
        double d2 = 0;
        for (int i = 0; i < n; ++i) d2 += std::pow((k2[i] - k1_[i]) / sc(i), 2);
        d2 = std::sqrt(d2 / n) / h0;
        const double dm = std::max(d1, d2);
        const double h1 = dm <= 1e-15 || !std::isfinite(dm) ? std::max(1e-6, h0 * 1e-3) : std::pow(0.01 / dm, 0.2);
        return std::min({100 * h0, h1, 0.1});
    }

    Rhs rhs_;
    StepperOptions opts_;
    double t_;
    double t_prev_;
    Vec y_;
    Vec y_prev_;
    Vec k1_;
    double h_{0.0};
    double dir_;
    std::array<Vec, 5> cont_{};
    std::size_t accepted_{0};
    std::size_t rejected_{0};
};

} // namespace rabi

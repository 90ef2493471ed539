// classical.hpp: Semiclassical dynamics and Poincaré sections at q2 = 0, p2 > 0
//
// The canonical chart (q1, p1) covers the Bloch sphere minus its north pole,
// which sits on the circle q1^2 + p1^2 = 2. Orbits on the E = 14 shell pass
// arbitrarily close to that pole, so trajectories are integrated in the
// Bloch-vector chart S = (X, Y, Z) and mapped back to (q1, p1) on output:
//
//   X = q1 sqrt(2 - r2),  Y = -p1 sqrt(2 - r2),  Z = r2 - 1,  r2 = q1^2 + p1^2
//   H = w/2 Z + w0/2 (q2^2 + p2^2) + sqrt(2) g q2 X,   dS/dt = 2 grad_S H x S

#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "rabi/errors.hpp"
#include "rabi/model.hpp"
#include "rabi/ode.hpp"
#include "rabi/parallel.hpp"

namespace rabi {

// Hamilton's equations of the semiclassical Hamiltonian in the canonical chart,
// packed as (dq1/dt, dp1/dt, dq2/dt, dp2/dt).
inline PhasePoint eom(const PhasePoint& x, const ModelParams& m) {
    require_atomic_valid(x);
    const double s = std::sqrt(4.0 - 2.0 * x.atomic_radius2());
    return {m.omega * x.p1 - 2.0 * m.g * x.q1 * x.q2 * x.p1 / s,
            -m.omega * x.q1 - m.g * x.q2 * (s - 2.0 * x.q1 * x.q1 / s),
            m.omega0 * x.p2,
            -m.omega0 * x.q2 - m.g * x.q1 * s};
}

// (X, Y, Z, q2, p2)
using BlochState = Eigen::Matrix<double, 5, 1>;

inline BlochState to_bloch(const PhasePoint& x) {
    require_atomic_valid(x);
    const double r2 = x.atomic_radius2();
    const double c = std::sqrt(2.0 - r2);
    BlochState y;
    y << x.q1 * c, -x.p1 * c, r2 - 1.0, x.q2, x.p2;
    return y;
}

inline PhasePoint from_bloch(const BlochState& y) {
    const double gap = 1.0 - y[2];  // = 2 - (q1^2 + p1^2)
    if (!(gap > 0.0)) {
        std::ostringstream os;
        os.precision(17);
        os << "state at the Bloch pole (Z=" << y[2] << ") has no (q1,p1) coordinates";
        throw SingularityError(os.str());
    }
    const double c = std::sqrt(gap);
    return {y[0] / c, -y[1] / c, y[3], y[4]};
}

inline double bloch_energy(const BlochState& y, const ModelParams& m) {
    return 0.5 * m.omega * y[2] + 0.5 * m.omega0 * (y[3] * y[3] + y[4] * y[4]) + std::sqrt(2.0) * m.g * y[3] * y[0];
}

inline BlochState bloch_rhs(const BlochState& y, const ModelParams& m) {
    const double hx = std::sqrt(2.0) * m.g * y[3], hz = 0.5 * m.omega;  // dH/dY = 0
    BlochState d;
    d << -2.0 * hz * y[1],
        2.0 * (hz * y[0] - hx * y[2]),
        2.0 * hx * y[1],
        m.omega0 * y[4],
        -m.omega0 * y[3] - std::sqrt(2.0) * m.g * y[0];
    return d;
}

// Pulls y back onto |S| = 1 and H = energy along the sphere-tangent gradient.
inline void project_to_shell(BlochState& y, double energy, const ModelParams& m) {
    for (int it = 0; it < 3; ++it) {
        y.head<3>().normalize();
        const double dh = bloch_energy(y, m) - energy;
        if (dh == 0.0) break;
        Eigen::Vector3d gs(std::sqrt(2.0) * m.g * y[3], 0.0, 0.5 * m.omega);
        const Eigen::Vector3d s = y.head<3>();
        gs -= gs.dot(s) * s;
        BlochState grad;
        grad << gs, m.omega0 * y[3] + std::sqrt(2.0) * m.g * y[0], m.omega0 * y[4];
        const double n2 = grad.squaredNorm();
        if (!(n2 > 0.0)) break;
        y -= (dh / n2) * grad;
    }
    y.head<3>().normalize();
}

inline double relative_drift(double e, double e0) {
    return std::abs(e - e0) / std::max(std::abs(e0), 1.0);
}

struct IntegratorOptions {
    double tol{1e-10};
    bool project{true};  // energy-shell projection after every accepted step
};

namespace detail {

struct BlochRhs {
    ModelParams m;
    BlochState operator()(const BlochState& y) const { return bloch_rhs(y, m); }
};

using BlochStepper = DormandPrince45<5, BlochRhs>;

} // namespace detail

// Drives the stepper and tracks conservation diagnostics.
class ClassicalFlow {
public:
    ClassicalFlow(const PhasePoint& start, const ModelParams& m, double direction, IntegratorOptions opts)
        : m_(m), opts_(opts), energy0_(classical_energy(start, m)),
          stepper_(detail::BlochRhs{m}, to_bloch(start), 0.0, direction, {opts.tol, opts.tol}) {
        min_pole_gap_ = 1.0 - stepper_.y()[2];
    }

    void step(double t_stop) {
        stepper_.step(t_stop);
        if (opts_.project) {
            BlochState y = stepper_.y();
            max_step_error_ = std::max(max_step_error_, relative_drift(bloch_energy(y, m_), energy0_));
            project_to_shell(y, energy0_, m_);
            stepper_.replace_state(y);
        }
        const BlochState& y = stepper_.y();
        max_drift_ = std::max(max_drift_, relative_drift(bloch_energy(y, m_), energy0_));
        max_norm_error_ = std::max(max_norm_error_, std::abs(y.head<3>().norm() - 1.0));
        min_pole_gap_ = std::min(min_pole_gap_, 1.0 - y[2]);
    }

    double t() const { return stepper_.t(); }
    double t_prev() const { return stepper_.t_prev(); }
    const BlochState& y() const { return stepper_.y(); }
    const BlochState& y_prev() const { return stepper_.y_prev(); }
    BlochState dense(double t) const { return stepper_.dense(t); }
    PhasePoint point() const { return from_bloch(stepper_.y()); }

    double energy0() const { return energy0_; }
    double max_energy_drift() const { return max_drift_; }
    // Largest relative energy error removed by a single projection.
    double max_step_error() const { return max_step_error_; }
    double max_norm_error() const { return max_norm_error_; }
    double min_pole_gap() const { return min_pole_gap_; }
    std::size_t steps() const { return stepper_.accepted(); }

private:
    ModelParams m_;
    IntegratorOptions opts_;
    double energy0_;
    detail::BlochStepper stepper_;
    double max_drift_{0.0};
    double max_step_error_{0.0};
    double max_norm_error_{0.0};
    double min_pole_gap_{2.0};
};

struct Trajectory {
    std::vector<double> times;
    std::vector<PhasePoint> states;
    double energy0{0.0};
    double max_energy_drift{0.0};  // max |E - E0| / max(|E0|, 1)
    double max_step_error{0.0};    // largest per-step drift removed by projection
    double min_pole_gap{0.0};      // min of 2 - (q1^2 + p1^2) along the run

    std::size_t size() const { return times.size(); }
};

// Integrates from t = 0 to t_end (negative t_end runs backwards), recording
// every accepted step.
inline Trajectory integrate(const PhasePoint& start, double t_end, const ModelParams& m,
                            const IntegratorOptions& opts = {}) {
    m.validate();
    require_atomic_valid(start);
    if (!(opts.tol > 0.0)) throw ValidationError("tol must be > 0");
    if (!(t_end != 0.0) || !std::isfinite(t_end)) throw ValidationError("t_end must be finite and nonzero");

    ClassicalFlow flow(start, m, t_end, opts);
    Trajectory tr;
    tr.energy0 = flow.energy0();
    tr.times.push_back(0.0);
    tr.states.push_back(start);
    while (flow.t() != t_end) {
        flow.step(t_end);
        tr.times.push_back(flow.t());
        tr.states.push_back(flow.point());
    }
    tr.max_energy_drift = flow.max_energy_drift();
    tr.max_step_error = flow.max_step_error();
    tr.min_pole_gap = flow.min_pole_gap();
    return tr;
}

inline Trajectory integrate(const PhasePoint& start, double t_end, const ModelParams& m, double tol) {
    return integrate(start, t_end, m, IntegratorOptions{tol, true});
}

struct SectionPoint {
    double q1;
    double p1;
};

struct SectionPointSet {
    std::vector<SectionPoint> points;
    double section_eps{1e-10};
    std::size_t n_crossings{0};
    bool truncated{false};  // t_max reached before n_crossings
    double t_final{0.0};
    double energy0{0.0};
    double max_energy_drift{0.0};
    double max_step_error{0.0};
    double min_pole_gap{0.0};
};

struct SectionOptions {
    double t_max{1e5};
    double section_eps{1e-10};
    double tangential_p2{1e-8};  // crossings slower than this are discarded
    unsigned workers{1};
    double shell_tol{1e-8};      // start energies further apart than this are warned about
    bool project{true};
};

struct PoincareResult {
    std::vector<SectionPointSet> sets;  // one per start, same order
    std::vector<std::string> warnings;
};

// Section orbit of one start. A start lying on the section counts as crossing 0.
inline SectionPointSet section_orbit(const PhasePoint& start, const ModelParams& m, std::size_t n_crossings,
                                     double tol = 1e-10, const SectionOptions& opt = {}) {
    m.validate();
    require_atomic_valid(start);
    SectionPointSet out;
    out.section_eps = opt.section_eps;
    out.energy0 = classical_energy(start, m);
    out.min_pole_gap = 2.0 - start.atomic_radius2();
    if (n_crossings == 0) return out;

    bool skip_first = false;
    if (std::abs(start.q2) <= opt.section_eps && start.p2 > opt.tangential_p2) {
        out.points.push_back({start.q1, start.p1});
        ++out.n_crossings;
        skip_first = true;
    }

    ClassicalFlow flow(start, m, 1.0, {tol, opt.project});
    while (out.n_crossings < n_crossings) {
        if (flow.t() >= opt.t_max) {
            out.truncated = true;
            break;
        }
        flow.step(opt.t_max);
        if (skip_first) {
            skip_first = false;
            continue;
        }
        const double qa = flow.y_prev()[3], qb = flow.y()[3];
        if (!(qa < 0.0 && qb >= 0.0)) continue;

        double lo = flow.t_prev(), hi = flow.t();
        BlochState y = flow.y();
        if (std::abs(qb) > opt.section_eps) {
            for (int it = 0; it < 200; ++it) {
                const double mid = 0.5 * (lo + hi);
                y = flow.dense(mid);
                if (std::abs(y[3]) <= opt.section_eps || mid == lo || mid == hi) break;
                (y[3] < 0.0 ? lo : hi) = mid;
            }
        }
        if (y[4] < opt.tangential_p2 || std::abs(y[3]) > opt.section_eps) continue;
        y.head<3>().normalize();
        const PhasePoint x = from_bloch(y);
        out.points.push_back({x.q1, x.p1});
        ++out.n_crossings;
    }
    out.t_final = flow.t();
    out.max_energy_drift = flow.max_energy_drift();
    out.max_step_error = flow.max_step_error();
    out.min_pole_gap = flow.min_pole_gap();
    return out;
}

inline PoincareResult poincare_section(const std::vector<PhasePoint>& starts, const ModelParams& m,
                                       std::size_t n_crossings, double tol = 1e-10,
                                       const SectionOptions& opt = {}) {
    m.validate();
    for (const auto& s : starts) require_atomic_valid(s);

    PoincareResult res;
    if (!starts.empty()) {
        const double e0 = classical_energy(starts.front(), m);
        for (std::size_t i = 1; i < starts.size(); ++i) {
            const double e = classical_energy(starts[i], m);
            if (relative_drift(e, e0) > opt.shell_tol) {
                std::ostringstream os;
                os.precision(17);
                os << "start " << i << " has energy " << e << ", off the shell E=" << e0 << " of start 0";
                res.warnings.push_back(os.str());
            }
        }
    }
    res.sets.resize(starts.size());
    parallel_for(starts.size(), opt.workers,
                 [&](std::size_t i) { res.sets[i] = section_orbit(starts[i], m, n_crossings, tol, opt); });
    for (std::size_t i = 0; i < res.sets.size(); ++i) {
        if (res.sets[i].truncated) {
            res.warnings.push_back("start " + std::to_string(i) + " reached t_max after " +
                                   std::to_string(res.sets[i].n_crossings) + " crossings");
        }
    }
    return res;
}

// Seeds on the section along p1 = p1_fixed, q1 in [q1_min, q1_max], placed on
// the shell E. Nodes off the disk or off the shell are skipped.
inline std::vector<PhasePoint> section_seeds(double q1_min, double q1_max, double p1_fixed, std::size_t n,
                                             double energy, const ModelParams& m) {
    std::vector<PhasePoint> seeds;
    for (std::size_t i = 0; i < n; ++i) {
        const double q1 = n == 1 ? 0.5 * (q1_min + q1_max) : q1_min + (q1_max - q1_min) * double(i) / double(n - 1);
        if (!atomic_valid(q1, p1_fixed)) continue;
        try {
            seeds.push_back({q1, p1_fixed, 0.0, solve_p2(q1, p1_fixed, 0.0, energy, m)});
        } catch (const NoSolutionError&) {
        }
    }
    return seeds;
}

} // namespace rabi

// diagnostics.hpp: Chaos diagnostics on evolved states: linear entropy of the
// atomic reduction, Husimi Q of the field, spin variance, and the photon
// cutoff convergence study.

#pragma once

#include <algorithm>
#include <cmath>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "rabi/errors.hpp"
#include "rabi/grid.hpp"
#include "rabi/model.hpp"
#include "rabi/quantum.hpp"

namespace rabi {

struct TimeSeries {
    std::vector<double> times;
    std::vector<double> values;

    std::size_t size() const { return times.size(); }
};

// t_k = k dt for k = 0..floor(T/dt + 1e-9); a single sample at 0 when T = 0.
inline std::vector<double> uniform_times(double t_end, double dt) {
    if (!(t_end >= 0.0) || !std::isfinite(t_end)) throw ValidationError("time.t_max must be finite and >= 0");
    if (!(dt > 0.0) || !std::isfinite(dt)) throw ValidationError("time.dt must be finite and > 0");
    const auto n = static_cast<std::size_t>(std::floor(t_end / dt + 1e-9)) + 1;
    std::vector<double> t(n);
    for (std::size_t k = 0; k < n; ++k) t[k] = double(k) * dt;
    return t;
}

// S = 1 - Tr rho^2. Rounding-level negatives from pure states are clamped to 0.
inline double linear_entropy(const DensityMatrix& rho) {
    const double s = 1.0 - rho.purity();
    return (s < 0.0 && s > -1e-12) ? 0.0 : s;
}

inline double spin_variance(const StateVector& psi) {
    const double z = expect_sigma_z(psi);
    return 1.0 - z * z;
}

namespace detail {

// Purity of the atomic reduction of one column (pure global state) without
// forming the 2x2 matrix: |a|^4 + |b|^4 + 2 |<b|a>|^2.
inline double atom_purity(const Eigen::Ref<const Eigen::VectorXcd>& down, const Eigen::Ref<const Eigen::VectorXcd>& up) {
    const double pa = down.squaredNorm(), pb = up.squaredNorm();
    return pa * pa + pb * pb + 2.0 * std::norm(up.dot(down));
}

inline double clamp_entropy(double s) { return (s < 0.0 && s > -1e-12) ? 0.0 : s; }

} // namespace detail

// Entropy and spin variance along one propagated trajectory, sharing the
// propagation between them.
struct AtomSeries {
    TimeSeries entropy;
    TimeSeries sigma_z;
    TimeSeries spin_variance;
    TimeSeries photon_number;
};

inline AtomSeries atom_series(const StateVector& psi0, const SpectralDecomposition& sd, const std::vector<double>& times) {
    const Eigen::MatrixXcd states = Propagator(sd, psi0).at(times);
    const int L = psi0.levels();
    AtomSeries out;
    for (auto* ts : {&out.entropy, &out.sigma_z, &out.spin_variance, &out.photon_number}) {
        ts->times = times;
        ts->values.resize(times.size());
    }
    Eigen::VectorXd n_weights = Eigen::VectorXd::LinSpaced(L, 0.0, double(L - 1));
    for (std::size_t j = 0; j < times.size(); ++j) {
        const auto col = states.col(static_cast<Eigen::Index>(j));
        const auto down = col.head(L);
        const auto up = col.tail(L);
        const double z = up.squaredNorm() - down.squaredNorm();
        out.entropy.values[j] = detail::clamp_entropy(1.0 - detail::atom_purity(down, up));
        out.sigma_z.values[j] = z;
        out.spin_variance.values[j] = 1.0 - z * z;
        out.photon_number.values[j] = down.cwiseAbs2().dot(n_weights) + up.cwiseAbs2().dot(n_weights);
    }
    return out;
}

inline TimeSeries entropy_time_series(const StateVector& psi0, const SpectralDecomposition& sd, double t_end, double dt) {
    return atom_series(psi0, sd, uniform_times(t_end, dt)).entropy;
}

namespace detail {

inline double interpolate(const TimeSeries& ts, double t) {
    const auto it = std::upper_bound(ts.times.begin(), ts.times.end(), t);
    if (it == ts.times.begin()) return ts.values.front();
    if (it == ts.times.end()) return ts.values.back();
    const auto k = static_cast<std::size_t>(it - ts.times.begin());
    const double t0 = ts.times[k - 1], t1 = ts.times[k];
    const double w = (t - t0) / (t1 - t0);
    return (1.0 - w) * ts.values[k - 1] + w * ts.values[k];
}

} // namespace detail

// Trapezoidal mean of the series over [t1, t2]; the value at t1 when t1 == t2.
// Window ends falling between samples are linearly interpolated.
inline double time_average(const TimeSeries& ts, double t1, double t2) {
    if (ts.times.empty()) throw ValidationError("time_average of an empty series");
    if (!(t2 >= t1)) throw ValidationError("time_average needs t1 <= t2");
    if (t1 < ts.times.front() - 1e-12 || t2 > ts.times.back() + 1e-12) {
        throw ValidationError("time_average window outside the sampled range");
    }
    if (t2 == t1) return detail::interpolate(ts, t1);

    double integral = 0.0;
    double t_prev = t1, v_prev = detail::interpolate(ts, t1);
    for (std::size_t k = 0; k < ts.times.size(); ++k) {
        const double t = ts.times[k];
        if (t <= t1) continue;
        if (t >= t2) break;
        integral += 0.5 * (v_prev + ts.values[k]) * (t - t_prev);
        t_prev = t;
        v_prev = ts.values[k];
    }
    integral += 0.5 * (v_prev + detail::interpolate(ts, t2)) * (t2 - t_prev);
    return integral / (t2 - t1);
}

inline double time_average(const TimeSeries& ts) { return time_average(ts, ts.times.front(), ts.times.back()); }

// ---------------------------------------------------------------------------
// Husimi Q of the field on a (q2, p2) grid.

// The coupling displaces the field along q2 well past the free shell radius,
// so the default window is wider in q2 than in p2.
struct HusimiGrid {
    Axis q{"q2", -20.0, 20.0, 201};
    Axis p{"p2", -12.0, 12.0, 121};

    friend bool operator==(const HusimiGrid&, const HusimiGrid&) = default;
};

struct HusimiField {
    GridField grid;                   // x = q2, y = p2, values Q >= 0
    double boundary_mass_fraction{0};  // share of the grid sum on the outermost ring
    double min_raw{0};                 // most negative value before clipping
    bool boundary_warning{false};
};

inline constexpr double kHusimiBoundaryMass = 1e-4;

// Q(q2, p2) = c^dag rho2 c / pi with c the truncated coherent amplitudes of
// beta = (q2 + i p2) / sqrt 2. rho2 lives on n <= N, so the truncated overlap is exact.
inline HusimiField husimi_q(const DensityMatrix& rho2, const HusimiGrid& spec = {}) {
    spec.q.validate();
    spec.p.validate();
    const auto levels = rho2.matrix.rows();
    if (levels < 1 || rho2.matrix.cols() != levels) throw ValidationError("husimi_q needs a square field density matrix");
    const int n_max = static_cast<int>(levels) - 1;

    HusimiField out{GridField(spec.q, spec.p), 0.0, 0.0, false};
    Eigen::MatrixXcd c(levels, spec.q.n);
    for (int iy = 0; iy < spec.p.n; ++iy) {
        const double p = spec.p.at(iy);
        for (int ix = 0; ix < spec.q.n; ++ix) c.col(ix) = glauber_amplitudes(glauber_beta(spec.q.at(ix), p), n_max);
        const Eigen::MatrixXcd rc = rho2.matrix * c;
        for (int ix = 0; ix < spec.q.n; ++ix) {
            const double q = c.col(ix).dot(rc.col(ix)).real() / std::numbers::pi;
            out.min_raw = std::min(out.min_raw, q);
            out.grid.values(iy, ix) = q;
        }
    }

    double total = 0.0, ring = 0.0;
    for (int iy = 0; iy < spec.p.n; ++iy) {
        for (int ix = 0; ix < spec.q.n; ++ix) {
            double& v = out.grid.values(iy, ix);
            if (v < 0.0 && v > -1e-12) v = 0.0;
            total += v;
            if (iy == 0 || ix == 0 || iy == spec.p.n - 1 || ix == spec.q.n - 1) ring += v;
        }
    }
    out.boundary_mass_fraction = total > 0.0 ? ring / total : 0.0;
    out.boundary_warning = out.boundary_mass_fraction > kHusimiBoundaryMass;
    return out;
}

// (1/2) sum Q dq dp, equal to 1 when the grid holds the whole distribution.
inline double husimi_normalization(const HusimiField& h) {
    return 0.5 * h.grid.values.sum() * h.grid.cell_area();
}

// Effective phase-space area occupied by Q: (sum Q dA)^2 / sum Q^2 dA, with dA
// the (1/2) dq dp measure. A coherent state gives 2 pi (in q2, p2 units); a
// distribution spread over more of phase space gives more.
inline double husimi_participation(const HusimiField& h) {
    const double da = 0.5 * h.grid.cell_area();
    const double mass = h.grid.values.sum() * da;
    const double sq = h.grid.values.squaredNorm() * da;
    return sq > 0.0 ? mass * mass / sq : 0.0;
}

// ---------------------------------------------------------------------------
// Photon-number convergence under the cutoff.

struct ConvergenceRun {
    int n_max{0};
    std::optional<TimeSeries> photon_number;  // empty when the cutoff was rejected
    std::string error;
    double tail_mass{0.0};
};

inline std::vector<ConvergenceRun> photon_convergence(const PhasePoint& point, const std::vector<FockConfig>& n_list,
                                                      double t_end, double dt, const ModelParams& m) {
    m.validate();
    const CoherentParams cp = coherent_params(point);
    const std::vector<double> times = uniform_times(t_end, dt);
    std::vector<ConvergenceRun> runs;
    for (const FockConfig& fock : n_list) {
        fock.validate();
        ConvergenceRun run;
        run.n_max = fock.n_max;
        run.tail_mass = glauber_tail_mass(cp.beta, fock.n_max);
        try {
            const StateVector psi0 = coherent_product_state(cp, fock);
            const SpectralDecomposition sd = diagonalize(build_hamiltonian(m, fock));
            run.photon_number = atom_series(psi0, sd, times).photon_number;
        } catch (const TruncationError& e) {
            run.error = e.what();
        }
        runs.push_back(std::move(run));
    }
    return runs;
}

inline double sup_norm_difference(const TimeSeries& a, const TimeSeries& b) {
    if (a.size() != b.size()) throw ValidationError("series lengths differ");
    double d = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k) d = std::max(d, std::abs(a.values[k] - b.values[k]));
    return d;
}

inline double sup_norm(const TimeSeries& a) {
    double d = 0.0;
    for (double v : a.values) d = std::max(d, std::abs(v));
    return d;
}

} // namespace rabi

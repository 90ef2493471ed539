// model.hpp: Parameters, phase-space coordinates and the semiclassical Hamiltonian
//
// Phase space is (q1, p1) for the atom and (q2, p2) for the field. The atomic
// pair lives on the disk q1^2 + p1^2 <= 2, whose boundary circle is the
// Bloch-sphere north pole. hbar = 1 throughout.

#pragma once

#include <cmath>
#include <complex>
#include <string>

#include "rabi/errors.hpp"

namespace rabi {

using complex = std::complex<double>;

struct ModelParams {
    double omega{18.0};  // atomic level splitting
    double omega0{1.0};  // cavity frequency
    double g{4.0};       // dipolar coupling

    double ratio() const { return omega / omega0; }

    void validate() const {
        if (!(omega0 > 0.0)) throw ValidationError("omega0 must be > 0");
        if (!(omega > 0.0)) throw ValidationError("omega must be > 0");
        if (!(g >= 0.0)) throw ValidationError("g must be >= 0");
    }

    friend bool operator==(const ModelParams&, const ModelParams&) = default;
};

struct PhasePoint {
    double q1{0.0};
    double p1{0.0};
    double q2{0.0};
    double p2{0.0};

    double atomic_radius2() const { return q1 * q1 + p1 * p1; }

    friend bool operator==(const PhasePoint&, const PhasePoint&) = default;
};

struct CoherentParams {
    complex tau;   // Bloch label
    complex beta;  // Glauber label
};

// Points closer than this to the disk boundary are rejected, never clamped.
inline constexpr double kBoundaryMargin = 1e-12;

inline bool atomic_valid(double q1, double p1) {
    const double r2 = q1 * q1 + p1 * p1;
    return std::isfinite(r2) && r2 <= 2.0 - kBoundaryMargin;
}

inline void require_atomic_valid(double q1, double p1) {
    if (!atomic_valid(q1, p1)) {
        throw DomainError("atomic quadratures outside the Bloch disk: q1^2+p1^2 = " +
                          std::to_string(q1 * q1 + p1 * p1) + " (must be < 2)");
    }
}

inline void require_atomic_valid(const PhasePoint& x) { require_atomic_valid(x.q1, x.p1); }

inline double classical_energy(const PhasePoint& x, const ModelParams& m) {
    require_atomic_valid(x);
    const double r2 = x.atomic_radius2();
    return 0.5 * m.omega * (r2 - 1.0) + 0.5 * m.omega0 * (x.q2 * x.q2 + x.p2 * x.p2) +
           m.g * x.q1 * x.q2 * std::sqrt(4.0 - 2.0 * r2);
}

// Nonnegative p2 placing (q1, p1, q2, p2) on the energy shell E.
inline double solve_p2(double q1, double p1, double q2, double energy, const ModelParams& m) {
    require_atomic_valid(q1, p1);
    const double r2 = q1 * q1 + p1 * p1;
    const double rest = energy - 0.5 * m.omega * (r2 - 1.0) - 0.5 * m.omega0 * q2 * q2 -
                        m.g * q1 * q2 * std::sqrt(4.0 - 2.0 * r2);
    if (rest < 0.0) {
        throw NoSolutionError("energy shell E=" + std::to_string(energy) +
                              " unreachable at this (q1,p1,q2)");
    }
    return std::sqrt(2.0 * rest / m.omega0);
}

inline complex bloch_tau(double q1, double p1) {
    require_atomic_valid(q1, p1);
    return complex(q1, p1) / std::sqrt(2.0 - q1 * q1 - p1 * p1);
}

inline complex glauber_beta(double q2, double p2) {
    return complex(q2, p2) / std::sqrt(2.0);
}

inline CoherentParams coherent_params(const PhasePoint& x) {
    return {bloch_tau(x.q1, x.p1), glauber_beta(x.q2, x.p2)};
}

// Mean-field expectations in the product coherent state |tau>|beta>.
namespace mean_field {

inline complex sigma_plus(complex tau) { return std::conj(tau) / (1.0 + std::norm(tau)); }
inline complex sigma_minus(complex tau) { return tau / (1.0 + std::norm(tau)); }
inline double sigma_z(complex tau) { return -(1.0 - std::norm(tau)) / (1.0 + std::norm(tau)); }
inline complex a(complex beta) { return beta; }
inline complex a_dag(complex beta) { return std::conj(beta); }

// <tau beta| H |tau beta> assembled term by term from the expectations above.
inline double energy(const CoherentParams& cp, const ModelParams& m) {
    const complex coupling =
        (a_dag(cp.beta) + a(cp.beta)) * (sigma_plus(cp.tau) + sigma_minus(cp.tau));
    return 0.5 * m.omega * sigma_z(cp.tau) + m.omega0 * std::norm(cp.beta) + m.g * coupling.real();
}

} // namespace mean_field

// Reference points of the E = 14 section at omega=18, omega0=1, g=4.
namespace points {
inline constexpr PhasePoint R1{0.86853, -1.02681, 0.0, 3.66657};  // stable island
inline constexpr PhasePoint C1{-0.2, 0.0, 0.0, 6.72904};          // chaotic sea
} // namespace points

inline constexpr double kDefaultEnergy = 14.0;

} // namespace rabi

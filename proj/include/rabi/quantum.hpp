// quantum.hpp: Truncated Rabi Hamiltonian, coherent product states, exact
// spectral propagation and reduced density matrices.
//
// Basis ordering is spin-major: index = s * (N + 1) + n with s = 0 for the
// atomic ground state |down> and s = 1 for |up>, n = 0..N photons. Every
// partial trace below relies on this layout: the amplitude vector viewed as a
// column-major (N + 1) x 2 matrix has the spin label as its column.

#pragma once

#include <cmath>
#include <complex>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "rabi/errors.hpp"
#include "rabi/model.hpp"

namespace rabi {

struct FockConfig {
    int n_max{150};

    int levels() const { return n_max + 1; }
    int dim() const { return 2 * (n_max + 1); }

    void validate() const {
        if (n_max < 1) throw ValidationError("fock.n_max must be >= 1 (got " + std::to_string(n_max) + ")");
    }

    friend bool operator==(const FockConfig&, const FockConfig&) = default;
};

struct StateVector {
    Eigen::VectorXcd amplitudes;
    int n_max{0};

    int levels() const { return n_max + 1; }
    complex amp(int spin, int n) const { return amplitudes[spin * levels() + n]; }

    // (N + 1) x 2 view: column 0 is the |down> block, column 1 the |up> block.
    Eigen::Map<const Eigen::MatrixXcd> blocks() const {
        return Eigen::Map<const Eigen::MatrixXcd>(amplitudes.data(), levels(), 2);
    }

    static StateVector basis(int spin, int n, const FockConfig& fock) {
        StateVector s{Eigen::VectorXcd::Zero(fock.dim()), fock.n_max};
        s.amplitudes[spin * fock.levels() + n] = 1.0;
        return s;
    }
};

// Every matrix element is real in the Fock basis, so the Hermitian matrix is
// stored as a real symmetric one.
struct HamiltonianMatrix {
    Eigen::MatrixXd matrix;
    ModelParams params;
    FockConfig fock;
};

struct SpectralDecomposition {
    Eigen::VectorXd eigenvalues;   // ascending
    Eigen::MatrixXd eigenvectors;  // orthogonal, columns are eigenvectors
    FockConfig fock;

    int dim() const { return static_cast<int>(eigenvalues.size()); }
};

struct DensityMatrix {
    Eigen::MatrixXcd matrix;

    double trace() const { return matrix.trace().real(); }
    double purity() const { return matrix.cwiseAbs2().sum(); }  // Tr rho^2 for Hermitian rho
};

inline HamiltonianMatrix build_hamiltonian(const ModelParams& m, const FockConfig& fock) {
    m.validate();
    fock.validate();
    const int L = fock.levels();
    Eigen::MatrixXd h = Eigen::MatrixXd::Zero(fock.dim(), fock.dim());
    for (int n = 0; n < L; ++n) {
        h(n, n) = -0.5 * m.omega + m.omega0 * n;
        h(L + n, L + n) = 0.5 * m.omega + m.omega0 * n;
    }
    // g (a + a^dag) sigma_x: <m|a + a^dag|n> = sqrt(max(m, n)) for |m - n| = 1
    for (int n = 0; n + 1 < L; ++n) {
        const double x = m.g * std::sqrt(double(n + 1));
        h(L + n, n + 1) = x;
        h(n + 1, L + n) = x;
        h(L + n + 1, n) = x;
        h(n, L + n + 1) = x;
    }
    return {std::move(h), m, fock};
}

inline SpectralDecomposition diagonalize(const HamiltonianMatrix& h) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(h.matrix);
    if (es.info() != Eigen::Success) {
        throw EigenSolverError("Hermitian eigensolver did not converge (dim " + std::to_string(h.matrix.rows()) + ")");
    }
    return {es.eigenvalues(), es.eigenvectors(), h.fock};
}

// Glauber amplitudes <n|beta> for n = 0..n_max by the recurrence
// c_{n+1} = c_n beta / sqrt(n + 1), c_0 = exp(-|beta|^2 / 2). Not renormalized.
inline Eigen::VectorXcd glauber_amplitudes(complex beta, int n_max) {
    Eigen::VectorXcd c(n_max + 1);
    c[0] = std::exp(-0.5 * std::norm(beta));
    for (int n = 0; n < n_max; ++n) c[n + 1] = c[n] * beta / std::sqrt(double(n + 1));
    return c;
}

// Probability mass of |beta> beyond the cutoff.
inline double glauber_tail_mass(complex beta, int n_max) {
    return std::max(0.0, 1.0 - glauber_amplitudes(beta, n_max).squaredNorm());
}

inline constexpr double kMaxTailMass = 1e-8;

inline StateVector coherent_product_state(const CoherentParams& cp, const FockConfig& fock) {
    fock.validate();
    const Eigen::VectorXcd field = glauber_amplitudes(cp.beta, fock.n_max);
    const double kept = field.squaredNorm();
    if (1.0 - kept > kMaxTailMass) {
        throw TruncationError("coherent state |beta|^2=" + std::to_string(std::norm(cp.beta)) +
                                  " loses " + std::to_string(1.0 - kept) + " of its mass beyond n_max=" +
                                  std::to_string(fock.n_max),
                              1.0 - kept);
    }
    const double a = 1.0 / std::sqrt(1.0 + std::norm(cp.tau));
    StateVector s{Eigen::VectorXcd(fock.dim()), fock.n_max};
    s.amplitudes.head(fock.levels()) = a * field;
    s.amplitudes.tail(fock.levels()) = (a * cp.tau) * field;
    s.amplitudes /= s.amplitudes.norm();
    return s;
}

inline StateVector coherent_product_state(const PhasePoint& x, const FockConfig& fock) {
    return coherent_product_state(coherent_params(x), fock);
}

// Overlaps of psi0 with the eigenvectors, reused for any number of times.
class Propagator {
public:
    Propagator(const SpectralDecomposition& sd, const StateVector& psi0) : sd_(&sd), n_max_(psi0.n_max) {
        if (psi0.amplitudes.size() != sd.dim()) throw ValidationError("state and decomposition dimensions differ");
        const Eigen::MatrixXd& v = sd.eigenvectors;
        coeff_re_ = v.transpose() * psi0.amplitudes.real();
        coeff_im_ = v.transpose() * psi0.amplitudes.imag();
    }

    StateVector at(double t) const {
        Eigen::VectorXd re(sd_->dim()), im(sd_->dim());
        for (int k = 0; k < sd_->dim(); ++k) {
            const double ph = -sd_->eigenvalues[k] * t;
            const double c = std::cos(ph), s = std::sin(ph);
            re[k] = c * coeff_re_[k] - s * coeff_im_[k];
            im[k] = s * coeff_re_[k] + c * coeff_im_[k];
        }
        StateVector out{Eigen::VectorXcd(sd_->dim()), n_max_};
        out.amplitudes.real() = sd_->eigenvectors * re;
        out.amplitudes.imag() = sd_->eigenvectors * im;
        return out;
    }

    // States at every time as the columns of a dim x times.size() matrix.
    Eigen::MatrixXcd at(const std::vector<double>& times) const {
        const int d = sd_->dim();
        const auto nt = static_cast<Eigen::Index>(times.size());
        Eigen::MatrixXd re(d, nt), im(d, nt);
        for (Eigen::Index j = 0; j < nt; ++j) {
            for (int k = 0; k < d; ++k) {
                const double ph = -sd_->eigenvalues[k] * times[static_cast<std::size_t>(j)];
                const double c = std::cos(ph), s = std::sin(ph);
                re(k, j) = c * coeff_re_[k] - s * coeff_im_[k];
                im(k, j) = s * coeff_re_[k] + c * coeff_im_[k];
            }
        }
        Eigen::MatrixXcd out(d, nt);
        out.real() = sd_->eigenvectors * re;
        out.imag() = sd_->eigenvectors * im;
        return out;
    }

private:
    const SpectralDecomposition* sd_;
    int n_max_;
    Eigen::VectorXd coeff_re_;
    Eigen::VectorXd coeff_im_;
};

// psi(t) = V exp(-i Lambda t) V^T psi0
inline StateVector evolve(const SpectralDecomposition& sd, const StateVector& psi0, double t) {
    return Propagator(sd, psi0).at(t);
}

inline double expect_photon_number(const StateVector& psi) {
    const auto b = psi.blocks();
    double n = 0.0;
    for (int k = 0; k < psi.levels(); ++k) n += k * (std::norm(b(k, 0)) + std::norm(b(k, 1)));
    return n;
}

inline double expect_sigma_z(const StateVector& psi) {
    const auto b = psi.blocks();
    return b.col(1).squaredNorm() - b.col(0).squaredNorm();
}

inline double expect_energy(const HamiltonianMatrix& h, const StateVector& psi) {
    const Eigen::VectorXcd hp = h.matrix * psi.amplitudes;
    return psi.amplitudes.dot(hp).real();
}

// Tr over the field: rho1(s, s') = sum_n psi(s, n) conj(psi(s', n)).
inline DensityMatrix reduce_atom(const StateVector& psi) {
    const auto b = psi.blocks();
    return {b.transpose() * b.conjugate()};
}

// Tr over the atom: rho2(n, n') = sum_s psi(s, n) conj(psi(s, n')).
inline DensityMatrix reduce_field(const StateVector& psi) {
    const auto b = psi.blocks();
    return {b * b.adjoint()};
}

} // namespace rabi

#include <cmath>
#include <numbers>
#include <random>

#include <gtest/gtest.h>

#include "rabi/diagnostics.hpp"

using namespace rabi;

namespace {

const ModelParams kRef{18.0, 1.0, 4.0};

const SpectralDecomposition& ref_spectrum() {
    static const SpectralDecomposition sd = diagonalize(build_hamiltonian(kRef, FockConfig{150}));
    return sd;
}

DensityMatrix pure_field(const Eigen::VectorXcd& c) { return {c * c.adjoint()}; }

} // namespace

TEST(UniformTimes, GridShape) {
    const auto t = uniform_times(500.0, 0.5);
    ASSERT_EQ(t.size(), 1001u);
    EXPECT_EQ(t.front(), 0.0);
    EXPECT_EQ(t.back(), 500.0);
    EXPECT_EQ(uniform_times(0.0, 0.5).size(), 1u);
    EXPECT_EQ(uniform_times(1.0, 0.3).size(), 4u);  // 0, 0.3, 0.6, 0.9
    EXPECT_THROW(uniform_times(10.0, 0.0), ValidationError);
    EXPECT_THROW(uniform_times(-1.0, 0.1), ValidationError);
}

TEST(LinearEntropy, PureAndMaximallyMixed) {
    DensityMatrix pure{Eigen::Matrix2cd::Zero()};
    pure.matrix(0, 0) = 1.0;
    EXPECT_EQ(linear_entropy(pure), 0.0);
    const DensityMatrix mixed{Eigen::Matrix2cd::Identity() * 0.5};
    EXPECT_DOUBLE_EQ(linear_entropy(mixed), 0.5);
}

TEST(LinearEntropy, C1StartsAtZero) {
    const StateVector s = coherent_product_state(points::C1, FockConfig{150});
    EXPECT_NEAR(linear_entropy(reduce_atom(s)), 0.0, 1e-10);
}

TEST(SpinVariance, Examples) {
    const FockConfig fock{4};
    EXPECT_EQ(spin_variance(StateVector::basis(0, 0, fock)), 0.0);
    const StateVector sup{(StateVector::basis(0, 2, fock).amplitudes + StateVector::basis(1, 2, fock).amplitudes) /
                              std::sqrt(2.0),
                          fock.n_max};
    EXPECT_NEAR(spin_variance(sup), 1.0, 1e-15);
    const StateVector c1 = coherent_product_state(points::C1, FockConfig{150});
    EXPECT_NEAR(spin_variance(c1), 0.0784, 1e-6);
}

TEST(AtomSeries, AgreesWithPerTimeReductions) {
    const StateVector psi0 = coherent_product_state(points::C1, FockConfig{150});
    const std::vector<double> times{0.0, 1.5, 40.0, 333.0};
    const AtomSeries s = atom_series(psi0, ref_spectrum(), times);
    for (std::size_t k = 0; k < times.size(); ++k) {
        const StateVector psi = evolve(ref_spectrum(), psi0, times[k]);
        EXPECT_NEAR(s.entropy.values[k], linear_entropy(reduce_atom(psi)), 1e-12);
        EXPECT_NEAR(s.entropy.values[k], linear_entropy(reduce_field(psi)), 1e-10);
        EXPECT_NEAR(s.sigma_z.values[k], expect_sigma_z(psi), 1e-12);
        EXPECT_NEAR(s.photon_number.values[k], expect_photon_number(psi), 1e-10);
        // Pauli identity
        EXPECT_NEAR(s.spin_variance.values[k] + s.sigma_z.values[k] * s.sigma_z.values[k], 1.0, 1e-12);
    }
}

TEST(EntropySeries, BoundsAndZeroStart) {
    for (const PhasePoint& p : {points::C1, points::R1}) {
        const TimeSeries s = entropy_time_series(coherent_product_state(p, FockConfig{150}), ref_spectrum(), 500, 0.5);
        ASSERT_EQ(s.size(), 1001u);
        EXPECT_LE(s.values[0], 1e-10);
        for (double v : s.values) {
            EXPECT_GE(v, 0.0);
            EXPECT_LE(v, 0.5);
        }
    }
}

TEST(EntropySeries, DecoupledEvolutionStaysProduct) {
    const FockConfig fock{80};
    const SpectralDecomposition sd = diagonalize(build_hamiltonian({18.0, 1.0, 0.0}, fock));
    const TimeSeries s = entropy_time_series(coherent_product_state(points::C1, fock), sd, 50, 0.25);
    for (double v : s.values) EXPECT_NEAR(v, 0.0, 1e-12);
}

TEST(EntropySeries, ChaoticSaturatesAboveRegular) {
    auto late = [](const PhasePoint& p) {
        const TimeSeries s = entropy_time_series(coherent_product_state(p, FockConfig{150}), ref_spectrum(), 500, 0.5);
        return time_average(s, 250.0, 500.0);
    };
    EXPECT_GT(late(points::C1), late(points::R1));
}

TEST(TimeAverage, ConstantAndRamp) {
    TimeSeries c{uniform_times(10, 0.5), std::vector<double>(21, 3.25)};
    EXPECT_DOUBLE_EQ(time_average(c, 0, 10), 3.25);
    TimeSeries ramp{uniform_times(4, 0.5), {}};
    for (double t : ramp.times) ramp.values.push_back(t / 4.0);
    EXPECT_NEAR(time_average(ramp, 0, 4), 0.5, 1e-15);
    // Window ends between samples are interpolated; linear data stays exact.
    EXPECT_NEAR(time_average(ramp, 0.3, 3.1), (0.3 + 3.1) / 8.0, 1e-15);
    EXPECT_NEAR(time_average(ramp, 2.0, 2.0), 0.5, 1e-15);
    EXPECT_THROW(time_average(ramp, 3.0, 1.0), ValidationError);
    EXPECT_THROW(time_average(ramp, 0.0, 5.0), ValidationError);
}

TEST(TimeAverage, QuadratureRefinement) {
    const StateVector psi0 = coherent_product_state(points::C1, FockConfig{150});
    const double coarse = time_average(entropy_time_series(psi0, ref_spectrum(), 500, 0.5));
    const double fine = time_average(entropy_time_series(psi0, ref_spectrum(), 500, 0.05));
    EXPECT_NEAR(coarse, fine, 1e-3);
    for (const PhasePoint& p : {points::C1, points::R1}) {
        const StateVector s0 = coherent_product_state(p, FockConfig{150});
        const double a = time_average(entropy_time_series(s0, ref_spectrum(), 500, 0.5));
        const double b = time_average(entropy_time_series(s0, ref_spectrum(), 500, 0.25));
        EXPECT_NEAR(a, b, 1e-3);
    }
}

TEST(Husimi, VacuumClosedForm) {
    const Eigen::VectorXcd vac = glauber_amplitudes(0.0, 30);
    HusimiGrid g{{"q2", -6, 6, 61}, {"p2", -6, 6, 61}};
    const HusimiField h = husimi_q(pure_field(vac), g);
    double worst = 0.0;
    for (int iy = 0; iy < g.p.n; ++iy) {
        for (int ix = 0; ix < g.q.n; ++ix) {
            const double q = g.q.at(ix), p = g.p.at(iy);
            const double exact = std::exp(-0.5 * (q * q + p * p)) / std::numbers::pi;
            worst = std::max(worst, std::abs(h.grid.values(iy, ix) - exact));
        }
    }
    EXPECT_LE(worst, 1e-6);
    EXPECT_NEAR(h.grid.values(30, 30), 1.0 / std::numbers::pi, 1e-15);
    EXPECT_NEAR(husimi_normalization(h), 1.0, 1e-3);
    EXPECT_NEAR(husimi_participation(h), 2 * std::numbers::pi, 1e-3);
    EXPECT_FALSE(h.boundary_warning);
}

TEST(Husimi, CoherentStatePeaksAtItsLabel) {
    const Eigen::VectorXcd c = glauber_amplitudes(glauber_beta(3.0, 0.0), 60);
    const HusimiGrid g{{"q2", -8, 8, 81}, {"p2", -8, 8, 81}};
    const HusimiField h = husimi_q(pure_field(c), g);
    Eigen::Index iy, ix;
    h.grid.values.maxCoeff(&iy, &ix);
    EXPECT_NEAR(g.q.at(int(ix)), 3.0, 1e-12);
    EXPECT_NEAR(g.p.at(int(iy)), 0.0, 1e-12);
}

TEST(Husimi, NonnegativeAndNormalisedForEvolvedStates) {
    for (const PhasePoint& p : {points::C1, points::R1}) {
        const Propagator prop(ref_spectrum(), coherent_product_state(p, FockConfig{150}));
        for (double t : {0.0, 20.0, 500.0}) {
            const HusimiField h = husimi_q(reduce_field(prop.at(t)));
            EXPECT_GE(h.grid.values.minCoeff(), 0.0);
            EXPECT_GE(h.min_raw, -1e-12);
            EXPECT_NEAR(husimi_normalization(h), 1.0, 1e-3);
            EXPECT_FALSE(h.boundary_warning) << "t=" << t;
        }
    }
}

TEST(Husimi, SmallGridRaisesTheBoundaryWarning) {
    const Propagator prop(ref_spectrum(), coherent_product_state(points::C1, FockConfig{150}));
    const HusimiField h = husimi_q(reduce_field(prop.at(20.0)), HusimiGrid{{"q2", -4, 4, 41}, {"p2", -4, 4, 41}});
    EXPECT_TRUE(h.boundary_warning);
    EXPECT_GT(h.boundary_mass_fraction, kHusimiBoundaryMass);
}

TEST(PhotonConvergence, DecoupledPhotonNumberIsConstant) {
    const auto runs = photon_convergence(points::C1, {FockConfig{80}}, 20, 0.5, {18.0, 1.0, 0.0});
    ASSERT_TRUE(runs[0].photon_number);
    const double beta2 = std::norm(glauber_beta(points::C1.q2, points::C1.p2));
    for (double v : runs[0].photon_number->values) EXPECT_NEAR(v, beta2, 1e-8);
}

TEST(PhotonConvergence, TruncationFailuresAreReportedPerCutoff) {
    const auto runs = photon_convergence(points::C1, {FockConfig{20}, FockConfig{80}}, 5, 0.5, kRef);
    ASSERT_EQ(runs.size(), 2u);
    EXPECT_FALSE(runs[0].photon_number);
    EXPECT_FALSE(runs[0].error.empty());
    EXPECT_GT(runs[0].tail_mass, 1e-8);
    EXPECT_TRUE(runs[1].photon_number);
}

TEST(PhotonConvergence, CutoffConvergenceAtC1) {
    const auto runs = photon_convergence(points::C1, {FockConfig{60}, FockConfig{150}, FockConfig{200}}, 100, 0.5, kRef);
    const TimeSeries& n60 = *runs[0].photon_number;
    const TimeSeries& n150 = *runs[1].photon_number;
    const TimeSeries& n200 = *runs[2].photon_number;
    const double scale = sup_norm(n200);
    EXPECT_LE(sup_norm_difference(n150, n200), 1e-3 * scale);
    EXPECT_GT(sup_norm_difference(n60, n200), 1e-3 * scale);
}

#include <cmath>

#include <gtest/gtest.h>

#include "rabi/sweep.hpp"

using namespace rabi;

namespace {

const ModelParams kRef{18.0, 1.0, 4.0};
const FockConfig kFock{150};

const SpectralDecomposition& ref_spectrum() {
    static const SpectralDecomposition sd = diagonalize(build_hamiltonian(kRef, kFock));
    return sd;
}

SectionGridSpec single_node(double q1, double p1) { return {{"q1", q1, q1, 1}, {"p1", p1, p1, 1}}; }

} // namespace

TEST(SectionGrid, NodeAtR1IsOnTheShell) {
    const SectionGrid g = section_grid(single_node(0.86853, -1.02681), 14.0, kRef);
    ASSERT_EQ(g.cells.size(), 1u);
    ASSERT_EQ(g.cells[0].status, CellStatus::present);
    EXPECT_NEAR(g.cells[0].point.p2, 3.66657, 1e-4);
    EXPECT_EQ(g.cells[0].point.q2, 0.0);
}

TEST(SectionGrid, OutsideDiskAndNoSolution) {
    EXPECT_EQ(section_grid(single_node(1.5, 1.0), 14.0, kRef).cells[0].status, CellStatus::outside_disk);
    EXPECT_EQ(section_grid(single_node(0.0, 0.0), -20.0, kRef).cells[0].status, CellStatus::no_solution);
}

TEST(SectionGrid, DefaultGridInvariants) {
    const SectionGrid g = section_grid(SectionGridSpec{}, 14.0, kRef);
    ASSERT_EQ(g.cells.size(), 2500u);
    std::size_t present = 0;
    for (int ip = 0; ip < 50; ++ip) {
        for (int iq = 0; iq < 50; ++iq) {
            const SectionCell& c = g.cells[g.index(iq, ip)];
            const double q1 = g.spec.q1.at(iq), p1 = g.spec.p1.at(ip);
            if (!atomic_valid(q1, p1)) {  // r^2 >= 2, or within the boundary margin of it
                EXPECT_EQ(c.status, CellStatus::outside_disk);
                continue;
            }
            ASSERT_EQ(c.status, CellStatus::present);  // E = 14 is reachable everywhere on the disk
            ++present;
            EXPECT_EQ(c.point.q1, q1);
            EXPECT_EQ(c.point.p1, p1);
            EXPECT_NEAR(classical_energy(c.point, kRef), 14.0, 1e-10 * 14.0);
        }
    }
    EXPECT_EQ(present, g.present());
    EXPECT_GT(present, 1500u);
}

TEST(HeatMaps, SpinVarianceSingleSampleClosedForm) {
    const SectionGrid g = section_grid(single_node(-0.2, 0.0), 14.0, kRef);
    const HeatMap h = spin_variance_map(g, ref_spectrum(), kFock, 0.0, 0.5);
    const double r2 = 0.04;
    EXPECT_NEAR(h.field.values(0, 0), 1.0 - (r2 - 1.0) * (r2 - 1.0), 1e-6);
    EXPECT_NEAR(h.field.values(0, 0), 0.0784, 1e-6);
}

TEST(HeatMaps, DecoupledEntropyMapVanishes) {
    const FockConfig fock{100};
    const SpectralDecomposition sd = diagonalize(build_hamiltonian({18.0, 1.0, 0.0}, fock));
    const SectionGrid g = section_grid({{"q1", -1.0, 1.0, 5}, {"p1", -1.0, 1.0, 5}}, 14.0, {18.0, 1.0, 0.0});
    const HeatMap h = entropy_map(g, sd, fock, 50.0, 0.5);
    for (std::size_t i = 0; i < g.cells.size(); ++i) {
        const int iq = int(i % 5), ip = int(i / 5);
        if (g.cells[i].status == CellStatus::present) {
            EXPECT_NEAR(h.field.values(ip, iq), 0.0, 1e-12);
        } else {
            EXPECT_TRUE(std::isnan(h.field.values(ip, iq)));
        }
    }
}

TEST(HeatMaps, ChaoticPointAboveRegularPoint) {
    // R1 and C1 are not nodes of one rectangular grid, so the two cells are set directly.
    SectionGrid g = section_grid({{"q1", -0.2, 0.86853, 2}, {"p1", 0.0, 0.0, 1}}, 14.0, kRef);
    g.cells[0] = {CellStatus::present, points::C1};
    g.cells[1] = {CellStatus::present, points::R1};
    const DiagnosticMaps m = diagnostic_maps(g, ref_spectrum(), kFock, 500.0, 0.5);
    EXPECT_GT(m.entropy.field.values(0, 0), m.entropy.field.values(0, 1));
    EXPECT_GT(m.spin_variance.field.values(0, 0), m.spin_variance.field.values(0, 1));
}

TEST(HeatMaps, BoundsAndShellCoherence) {
    const SectionGrid g = section_grid({{"q1", -1.3, 1.3, 7}, {"p1", -1.3, 1.3, 7}}, 14.0, kRef);
    const DiagnosticMaps m = diagnostic_maps(g, ref_spectrum(), kFock, 100.0, 0.5);
    const HamiltonianMatrix h = build_hamiltonian(kRef, kFock);
    for (int ip = 0; ip < 7; ++ip) {
        for (int iq = 0; iq < 7; ++iq) {
            const SectionCell& c = g.cells[g.index(iq, ip)];
            if (c.status != CellStatus::present) continue;
            const double s = m.entropy.field.values(ip, iq), v = m.spin_variance.field.values(ip, iq);
            EXPECT_GE(s, 0.0);
            EXPECT_LE(s, 0.5);
            EXPECT_GE(v, 0.0);
            EXPECT_LE(v, 1.0);
            EXPECT_NEAR(expect_energy(h, coherent_product_state(c.point, kFock)), 14.0, 1e-3);
        }
    }
}

TEST(HeatMaps, TruncationFailuresStayInTheErrorChannel) {
    const FockConfig small{20};
    const SpectralDecomposition sd = diagonalize(build_hamiltonian(kRef, small));
    const SectionGrid g = section_grid({{"q1", -0.5, 0.5, 3}, {"p1", 0.0, 0.0, 1}}, 14.0, kRef);
    const HeatMap h = entropy_map(g, sd, small, 5.0, 0.5);
    EXPECT_EQ(h.errors.size(), 3u);
    for (std::size_t i = 0; i < 3; ++i) {
        EXPECT_EQ(h.status[i], CellStatus::failed);
        EXPECT_TRUE(std::isnan(h.field.values(0, int(i))));
    }
}

TEST(HeatMaps, IdenticalForAnyWorkerCount) {
    const SectionGrid g = section_grid({{"q1", -1.4, 1.4, 6}, {"p1", -1.4, 1.4, 6}}, 14.0, kRef);
    const DiagnosticMaps a = diagnostic_maps(g, ref_spectrum(), kFock, 50.0, 0.5, {1});
    const DiagnosticMaps b = diagnostic_maps(g, ref_spectrum(), kFock, 50.0, 0.5, {4});
    for (Eigen::Index i = 0; i < a.entropy.field.values.size(); ++i) {
        const double x = a.entropy.field.values.data()[i], y = b.entropy.field.values.data()[i];
        EXPECT_TRUE((std::isnan(x) && std::isnan(y)) || x == y);
        const double u = a.spin_variance.field.values.data()[i], v = b.spin_variance.field.values.data()[i];
        EXPECT_TRUE((std::isnan(u) && std::isnan(v)) || u == v);
    }
    EXPECT_EQ(a.entropy.status, b.entropy.status);
}

TEST(HeatMaps, MismatchedCutoffIsRejected) {
    const SectionGrid g = section_grid(single_node(0.0, 0.0), 14.0, kRef);
    EXPECT_THROW(entropy_map(g, ref_spectrum(), FockConfig{100}, 1.0, 0.5), ValidationError);
}

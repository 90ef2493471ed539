// sweep.hpp: Time-averaged entropy and spin-variance maps over section-constrained
// initial conditions (q1, p1, q2 = 0, p2 on the energy shell).
//
// One spectral decomposition is shared read-only by every cell; each cell is
// an independent task whose result lands in its own slot, so maps are
// bitwise identical for any worker count.

#pragma once

#include <cmath>
#include <cstddef>
#include <map>
#include <string>
#include <vector>

#include "rabi/diagnostics.hpp"
#include "rabi/grid.hpp"
#include "rabi/model.hpp"
#include "rabi/parallel.hpp"
#include "rabi/quantum.hpp"

namespace rabi {

enum class CellStatus { present, outside_disk, no_solution, failed };

inline const char* to_string(CellStatus s) {
    switch (s) {
    case CellStatus::present: return "ok";
    case CellStatus::outside_disk: return "outside-disk";
    case CellStatus::no_solution: return "no-solution";
    case CellStatus::failed: return "failed";
    }
    return "?";
}

struct SectionCell {
    CellStatus status{CellStatus::outside_disk};
    PhasePoint point{};  // meaningful only when present
};

struct SectionGridSpec {
    Axis q1{"q1", -1.4, 1.4, 50};
    Axis p1{"p1", -1.4, 1.4, 50};

    friend bool operator==(const SectionGridSpec&, const SectionGridSpec&) = default;
};

struct SectionGrid {
    SectionGridSpec spec;
    double energy{0.0};
    std::vector<SectionCell> cells;  // row-major: index = ip1 * n_q1 + iq1

    std::size_t index(int iq1, int ip1) const { return static_cast<std::size_t>(ip1) * spec.q1.n + iq1; }
    std::size_t present() const {
        std::size_t n = 0;
        for (const auto& c : cells) n += c.status == CellStatus::present;
        return n;
    }
};

inline SectionGrid section_grid(const SectionGridSpec& spec, double energy, const ModelParams& m) {
    m.validate();
    spec.q1.validate();
    spec.p1.validate();
    SectionGrid grid{spec, energy, {}};
    grid.cells.resize(static_cast<std::size_t>(spec.q1.n) * spec.p1.n);
    for (int ip = 0; ip < spec.p1.n; ++ip) {
        for (int iq = 0; iq < spec.q1.n; ++iq) {
            const double q1 = spec.q1.at(iq), p1 = spec.p1.at(ip);
            SectionCell& cell = grid.cells[grid.index(iq, ip)];
            if (q1 * q1 + p1 * p1 >= 2.0 || !atomic_valid(q1, p1)) {
                cell.status = CellStatus::outside_disk;
                continue;
            }
            try {
                cell.point = {q1, p1, 0.0, solve_p2(q1, p1, 0.0, energy, m)};
                cell.status = CellStatus::present;
            } catch (const NoSolutionError&) {
                cell.status = CellStatus::no_solution;
            }
        }
    }
    return grid;
}

struct HeatMap {
    GridField field;                  // x = q1, y = p1; NaN where no value
    std::vector<CellStatus> status;   // same layout as SectionGrid::cells
    std::map<std::size_t, std::string> errors;  // per-cell failures, keyed by cell index
};

struct MapOptions {
    unsigned workers{1};
};

struct DiagnosticMaps {
    HeatMap entropy;        // time-averaged linear entropy
    HeatMap spin_variance;  // time-averaged spin variance
};

// Both maps from a single propagation per cell.
inline DiagnosticMaps diagnostic_maps(const SectionGrid& grid, const SpectralDecomposition& sd, const FockConfig& fock,
                                      double t_end, double dt, const MapOptions& opt = {}) {
    if (fock.dim() != sd.dim()) throw ValidationError("fock config does not match the decomposition");
    const std::vector<double> times = uniform_times(t_end, dt);
    const std::size_t n = grid.cells.size();

    struct CellResult {
        CellStatus status;
        double entropy{kMissing};
        double spin{kMissing};
        std::string error;
    };
    std::vector<CellResult> results(n);

    parallel_for(n, opt.workers, [&](std::size_t i) {
        const SectionCell& cell = grid.cells[i];
        CellResult& r = results[i];
        r.status = cell.status;
        if (cell.status != CellStatus::present) return;
        try {
            const AtomSeries s = atom_series(coherent_product_state(cell.point, fock), sd, times);
            r.entropy = time_average(s.entropy);
            r.spin = time_average(s.spin_variance);
        } catch (const TruncationError& e) {
            r.status = CellStatus::failed;
            r.error = e.what();
        }
    });

    auto make = [&](bool entropy) {
        HeatMap h{GridField(grid.spec.q1, grid.spec.p1, kMissing), std::vector<CellStatus>(n), {}};
        for (int ip = 0; ip < grid.spec.p1.n; ++ip) {
            for (int iq = 0; iq < grid.spec.q1.n; ++iq) {
                const std::size_t i = grid.index(iq, ip);
                h.status[i] = results[i].status;
                h.field.values(ip, iq) = entropy ? results[i].entropy : results[i].spin;
                if (!results[i].error.empty()) h.errors[i] = results[i].error;
            }
        }
        return h;
    };
    return {make(true), make(false)};
}

inline HeatMap entropy_map(const SectionGrid& grid, const SpectralDecomposition& sd, const FockConfig& fock,
                           double t_end, double dt, const MapOptions& opt = {}) {
    return diagnostic_maps(grid, sd, fock, t_end, dt, opt).entropy;
}

inline HeatMap spin_variance_map(const SectionGrid& grid, const SpectralDecomposition& sd, const FockConfig& fock,
                                 double t_end, double dt, const MapOptions& opt = {}) {
    return diagnostic_maps(grid, sd, fock, t_end, dt, opt).spin_variance;
}

} // namespace rabi

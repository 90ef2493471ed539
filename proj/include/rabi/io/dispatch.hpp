// dispatch.hpp: Subcommand execution: config -> computation -> artifacts + manifest
//
// Every subcommand renders its artifacts into memory and writes them only
// after the whole computation succeeded. The manifest is written in every
// case, including failures. Exit status: 0 ok, 1 validation/user error,
// 2 numerical failure.

#pragma once

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "rabi/classical.hpp"
#include "rabi/diagnostics.hpp"
#include "rabi/io/config.hpp"
#include "rabi/io/manifest.hpp"
#include "rabi/io/output.hpp"
#include "rabi/model.hpp"
#include "rabi/orbit_shape.hpp"
#include "rabi/quantum.hpp"
#include "rabi/sweep.hpp"

namespace rabi::io {

inline const std::vector<std::string>& subcommands() {
    static const std::vector<std::string> names{"poincare", "evolve",   "entropy",           "husimi",
                                                "entropy-map", "spin-map", "photon-convergence"};
    return names;
}

// Command-line values that replace the corresponding config keys.
struct Overrides {
    std::optional<std::string> out;
    std::optional<unsigned> workers;
    std::optional<std::string> point;  // "R1", "C1", "q1,p1,q2,p2" or a ';'-list of those
    std::optional<int> n_max;
    std::optional<double> t_max;
    std::optional<double> dt;
};

struct RunRequest {
    std::string subcommand;
    std::optional<std::string> config_path;  // no file: every key at its default
    Overrides overrides;
};

inline void apply(const Overrides& o, RunConfig& cfg) {
    if (o.out) cfg.out = *o.out;
    if (o.workers) cfg.workers = *o.workers;
    if (o.point) cfg.points = parse_points(*o.point);
    if (o.n_max) cfg.fock.n_max = *o.n_max;
    if (o.t_max) cfg.t_max = *o.t_max;
    if (o.dt) cfg.dt = *o.dt;
}

namespace detail {

using Artifacts = std::vector<std::pair<std::string, std::string>>;  // file name, content

inline std::string time_tag(double t) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%g", t);
    return buf;
}

inline json point_json(const PhasePoint& x) { return {x.q1, x.p1, x.q2, x.p2}; }

inline json axis_json(const Axis& a) { return {{"name", a.name}, {"min", a.min}, {"max", a.max}, {"n", a.n}}; }

inline SpectralDecomposition spectrum(const RunConfig& cfg, RunManifest& m, HamiltonianMatrix* keep = nullptr) {
    HamiltonianMatrix h = m.stage("build_hamiltonian", [&] { return build_hamiltonian(cfg.params, cfg.fock); });
    SpectralDecomposition sd = m.stage("diagonalize", [&] { return diagonalize(h); });
    if (keep) *keep = std::move(h);
    return sd;
}

// Coherent initial state with its truncation and shell diagnostics.
inline StateVector initial_state(const PointSpec& p, const RunConfig& cfg, const HamiltonianMatrix& h, json& diag) {
    const CoherentParams cp = coherent_params(p.point);
    diag["point"] = point_json(p.point);
    diag["tail_mass"] = glauber_tail_mass(cp.beta, cfg.fock.n_max);
    diag["classical_energy"] = classical_energy(p.point, cfg.params);
    StateVector psi0 = coherent_product_state(cp, cfg.fock);
    diag["quantum_energy"] = expect_energy(h, psi0);
    return psi0;
}

inline void poincare(const RunConfig& cfg, RunManifest& m, Artifacts& out) {
    std::vector<PhasePoint> starts;
    std::vector<std::string> labels;
    if (cfg.poincare.include_points) {
        for (const auto& p : cfg.points) {
            starts.push_back(p.point);
            labels.push_back(p.label);
        }
    }
    const auto seeds = section_seeds(cfg.poincare.seed_q1_min, cfg.poincare.seed_q1_max, cfg.poincare.seed_p1,
                                     cfg.poincare.seeds, cfg.energy, cfg.params);
    for (std::size_t i = 0; i < seeds.size(); ++i) {
        starts.push_back(seeds[i]);
        labels.push_back("seed" + std::to_string(i));
    }

    SectionOptions opt;
    opt.t_max = cfg.poincare.t_max;
    opt.workers = cfg.workers;
    const PoincareResult res = m.stage("integrate", [&] {
        return poincare_section(starts, cfg.params, cfg.poincare.crossings, cfg.poincare.tol, opt);
    });
    for (const auto& w : res.warnings) m.warn(w);

    CsvTable csv({"start_index", "crossing_index", "q1", "p1"});
    json orbits = json::array();
    for (std::size_t i = 0; i < res.sets.size(); ++i) {
        const SectionPointSet& s = res.sets[i];
        for (std::size_t k = 0; k < s.points.size(); ++k) csv.row() << i << k << s.points[k].q1 << s.points[k].p1;
        const OrbitShape shape = classify_orbit(s);
        orbits.push_back({{"start_index", i},
                          {"label", labels[i]},
                          {"start", point_json(starts[i])},
                          {"energy", s.energy0},
                          {"n_crossings", s.n_crossings},
                          {"truncated", s.truncated},
                          {"t_final", s.t_final},
                          {"max_energy_drift", s.max_energy_drift},
                          {"max_step_error", s.max_step_error},
                          {"min_pole_gap", s.min_pole_gap},
                          {"hull_area", shape.hull_area},
                          {"curve_residual", shape.curve_residual},
                          {"class", to_string(shape.label)}});
    }
    m.diagnostics()["orbits"] = std::move(orbits);
    out.push_back({"poincare.csv", csv.str()});
}

inline void evolve_or_entropy(const RunConfig& cfg, RunManifest& m, Artifacts& out, bool write_evolve) {
    HamiltonianMatrix h;
    const SpectralDecomposition sd = spectrum(cfg, m, &h);
    const std::vector<double> times = uniform_times(cfg.t_max, cfg.dt);
    json points = json::array();
    for (const auto& p : cfg.points) {
        json d = {{"label", p.label}};
        const StateVector psi0 = initial_state(p, cfg, h, d);
        const AtomSeries s = m.stage("propagate_" + p.label, [&] { return atom_series(psi0, sd, times); });
        d["quantum_energy_final"] = expect_energy(h, rabi::evolve(sd, psi0, times.back()));
        if (write_evolve) {
            CsvTable csv({"t", "photon_number", "sigma_z", "entropy"});
            for (std::size_t k = 0; k < times.size(); ++k) {
                csv.row() << times[k] << s.photon_number.values[k] << s.sigma_z.values[k] << s.entropy.values[k];
            }
            out.push_back({"evolve_" + p.label + ".csv", csv.str()});
        } else {
            CsvTable csv({"t", "entropy", "spin_variance"});
            for (std::size_t k = 0; k < times.size(); ++k) {
                csv.row() << times[k] << s.entropy.values[k] << s.spin_variance.values[k];
            }
            out.push_back({"entropy_" + p.label + ".csv", csv.str()});
            d["entropy_mean"] = time_average(s.entropy);
            d["entropy_late_mean"] = time_average(s.entropy, 0.5 * times.back(), times.back());
            d["spin_variance_mean"] = time_average(s.spin_variance);
        }
        points.push_back(std::move(d));
    }
    m.diagnostics()["points"] = std::move(points);
}

inline void husimi(const RunConfig& cfg, RunManifest& m, Artifacts& out) {
    HamiltonianMatrix h;
    const SpectralDecomposition sd = spectrum(cfg, m, &h);
    json points = json::array();
    for (const auto& p : cfg.points) {
        json d = {{"label", p.label}};
        const StateVector psi0 = initial_state(p, cfg, h, d);
        const Propagator prop(sd, psi0);
        json snaps = json::array();
        for (double t : cfg.husimi_times) {
            const std::string stem = "husimi_" + p.label + "_t" + time_tag(t);
            const HusimiField q = m.stage(stem, [&] { return husimi_q(reduce_field(prop.at(t)), cfg.husimi); });
            CsvTable csv({"q2", "p2", "Q"});
            for (int iy = 0; iy < q.grid.y.n; ++iy) {
                for (int ix = 0; ix < q.grid.x.n; ++ix) csv.row() << q.grid.x.at(ix) << q.grid.y.at(iy) << q.grid.values(iy, ix);
            }
            out.push_back({stem + ".csv", csv.str()});
            json s = {{"t", t},
                      {"normalization", husimi_normalization(q)},
                      {"participation", husimi_participation(q)},
                      {"boundary_mass_fraction", q.boundary_mass_fraction},
                      {"min_raw", q.min_raw}};
            if (q.boundary_warning) {
                m.warn(stem + ": " + csv_number(q.boundary_mass_fraction) +
                       " of the Q mass sits on the grid boundary; widen the husimi grid");
            }
            if (cfg.pgm) {
                const PgmImage img = render_pgm(q.grid);
                out.push_back({stem + ".pgm", img.text});
                s["pgm_scale"] = img.scale;
            }
            snaps.push_back(std::move(s));
        }
        d["snapshots"] = std::move(snaps);
        points.push_back(std::move(d));
    }
    m.diagnostics()["husimi_grid"] = {{"q", axis_json(cfg.husimi.q)}, {"p", axis_json(cfg.husimi.p)}};
    m.diagnostics()["points"] = std::move(points);
}

inline void heat_map(const RunConfig& cfg, RunManifest& m, Artifacts& out, bool entropy) {
    const SectionGrid grid = section_grid(cfg.section, cfg.energy, cfg.params);
    const SpectralDecomposition sd = spectrum(cfg, m);
    const DiagnosticMaps maps = m.stage("map", [&] {
        return diagnostic_maps(grid, sd, cfg.fock, cfg.t_max, cfg.dt, {cfg.workers});
    });
    const HeatMap& hm = entropy ? maps.entropy : maps.spin_variance;
    const std::string stem = entropy ? "entropy_map" : "spin_map";

    CsvTable csv({"q1", "p1", "value", "status"});
    std::size_t counts[4] = {0, 0, 0, 0};
    for (int ip = 0; ip < grid.spec.p1.n; ++ip) {
        for (int iq = 0; iq < grid.spec.q1.n; ++iq) {
            const std::size_t i = grid.index(iq, ip);
            csv.row() << grid.spec.q1.at(iq) << grid.spec.p1.at(ip) << hm.field.values(ip, iq) << to_string(hm.status[i]);
            ++counts[static_cast<int>(hm.status[i])];
        }
    }
    out.push_back({stem + ".csv", csv.str()});

    json& d = m.diagnostics();
    d["quantity"] = entropy ? "time-averaged linear entropy" : "time-averaged spin variance";
    d["grid"] = {{"q1", axis_json(grid.spec.q1)}, {"p1", axis_json(grid.spec.p1)}, {"energy", cfg.energy}};
    d["t_max"] = cfg.t_max;
    d["dt"] = cfg.dt;
    d["n_max"] = cfg.fock.n_max;
    d["workers"] = resolve_workers(cfg.workers);
    d["cells"] = {{"ok", counts[0]}, {"outside-disk", counts[1]}, {"no-solution", counts[2]}, {"failed", counts[3]}};
    json errs = json::array();
    for (const auto& [i, e] : hm.errors) errs.push_back({{"cell", i}, {"error", e}});
    d["cell_errors"] = std::move(errs);
    if (cfg.pgm) {
        const PgmImage img = render_pgm(hm.field);
        out.push_back({stem + ".pgm", img.text});
        d["pgm_scale"] = img.scale;
    }
}

inline void photon_convergence(const RunConfig& cfg, RunManifest& m, Artifacts& out) {
    std::vector<FockConfig> n_list;
    for (int n : cfg.convergence.n_list) n_list.push_back({n});
    json summary = json::array();
    for (const auto& p : cfg.points) {
        const auto runs = m.stage("convergence_" + p.label, [&] {
            return rabi::photon_convergence(p.point, n_list, cfg.convergence.t_max, cfg.dt, cfg.params);
        });
        json rj = json::array();
        for (const auto& r : runs) {
            json e = {{"n_max", r.n_max}, {"tail_mass", r.tail_mass}};
            if (r.photon_number) {
                CsvTable csv({"t", "photon_number"});
                for (std::size_t k = 0; k < r.photon_number->size(); ++k) {
                    csv.row() << r.photon_number->times[k] << r.photon_number->values[k];
                }
                const std::string name = "photon_" + p.label + "_N" + std::to_string(r.n_max) + ".csv";
                out.push_back({name, csv.str()});
                e["max_photon_number"] = sup_norm(*r.photon_number);
            } else {
                e["error"] = r.error;
                m.warn(p.label + " N=" + std::to_string(r.n_max) + ": " + r.error);
            }
            rj.push_back(std::move(e));
        }
        // Differences are reported relative to the curve of the larger cutoff.
        json pairs = json::array();
        for (std::size_t a = 0; a < runs.size(); ++a) {
            for (std::size_t b = a + 1; b < runs.size(); ++b) {
                if (!runs[a].photon_number || !runs[b].photon_number) continue;
                const auto& ref = runs[a].n_max > runs[b].n_max ? runs[a] : runs[b];
                const double diff = sup_norm_difference(*runs[a].photon_number, *runs[b].photon_number);
                const double scale = sup_norm(*ref.photon_number);
                pairs.push_back({{"n_a", runs[a].n_max},
                                 {"n_b", runs[b].n_max},
                                 {"sup_norm_difference", diff},
                                 {"relative", scale > 0.0 ? diff / scale : 0.0}});
            }
        }
        summary.push_back({{"label", p.label}, {"point", point_json(p.point)}, {"runs", rj}, {"pairs", pairs}});
    }
    json doc = {{"schema_version", kManifestSchemaVersion},
                {"t_max", cfg.convergence.t_max},
                {"dt", cfg.dt},
                {"points", summary}};
    out.push_back({"photon_convergence.json", doc.dump(2) + "\n"});
    m.diagnostics()["points"] = std::move(summary);
}

inline void execute(const std::string& sub, const RunConfig& cfg, RunManifest& m, Artifacts& out) {
    if (sub == "poincare") return poincare(cfg, m, out);
    if (sub == "evolve") return evolve_or_entropy(cfg, m, out, true);
    if (sub == "entropy") return evolve_or_entropy(cfg, m, out, false);
    if (sub == "husimi") return husimi(cfg, m, out);
    if (sub == "entropy-map") return heat_map(cfg, m, out, true);
    if (sub == "spin-map") return heat_map(cfg, m, out, false);
    if (sub == "photon-convergence") return photon_convergence(cfg, m, out);
    throw ValidationError("unknown subcommand '" + sub + "'");
}

} // namespace detail

// Runs one subcommand end to end and returns the process exit status.
inline int run(const RunRequest& req, std::ostream& log = std::cerr) {
    RunManifest manifest(req.subcommand);
    std::filesystem::path out_dir = req.overrides.out.value_or("out");
    int code = 0;
    std::string kind, message;
    detail::Artifacts artifacts;
    try {
        RunConfig cfg = parse_config_unchecked(req.config_path ? read_text_file(*req.config_path) : std::string());
        apply(req.overrides, cfg);
        out_dir = cfg.out;
        manifest.set_config(cfg);
        cfg.validate();
        detail::execute(req.subcommand, cfg, manifest, artifacts);
    } catch (const ValidationError& e) {
        code = 1;
        kind = "validation";
        message = e.what();
    } catch (const NumericalError& e) {
        code = 2;
        kind = "numerical";
        message = e.what();
    } catch (const std::exception& e) {
        code = 2;
        kind = "internal";
        message = e.what();
    }

    const std::string manifest_name = req.subcommand + ".manifest.json";
    try {
        ensure_directory(out_dir);
        if (code == 0) {
            for (const auto& [name, content] : artifacts) {
                write_file(out_dir / name, content);
                manifest.artifact(name);
            }
        }
    } catch (const IoError& e) {
        code = 1;
        kind = "io";
        message = e.what();
    }
    manifest.finish(code, kind, message);
    try {
        write_file(out_dir / manifest_name, manifest.dump());
    } catch (const IoError& e) {
        log << "error: " << e.what() << "\n";
    }

    if (code != 0) {
        log << "error (" << kind << "): " << message << "\n";
    } else {
        log << req.subcommand << ": wrote " << artifacts.size() << " artifact(s) to " << out_dir.string() << "\n";
    }
    return code;
}

} // namespace rabi::io

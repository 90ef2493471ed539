// rabi_cli: Batch runner for the Rabi-model simulations
//
//   rabi_cli <subcommand> [--config FILE] [--out DIR] [--workers N]
//            [--point NAME|q1,p1,q2,p2] [--n-max N] [--tmax T] [--dt DT]

#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "rabi/io/dispatch.hpp"
#include "rabi/version.hpp"

int main(int argc, char** argv) {
    CLI::App app{"Quantum Rabi model simulator: classical sections and quantum chaos diagnostics", "rabi_cli"};
    app.set_version_flag("--version", rabi::kVersion);

    rabi::io::RunRequest req;
    std::string config_path;
    auto& ov = req.overrides;
    std::string out, point;
    unsigned workers = 0;
    int n_max = 0;
    double t_max = 0, dt = 0;

    app.add_option("subcommand", req.subcommand, "One of: poincare, evolve, entropy, husimi, entropy-map, "
                                                 "spin-map, photon-convergence")
        ->required()
        ->check(CLI::IsMember(rabi::io::subcommands()));
    auto* o_config = app.add_option("--config", config_path, "Run configuration file (key = value lines)");
    auto* o_out = app.add_option("--out", out, "Output directory (config key: out)");
    auto* o_workers = app.add_option("--workers", workers, "Worker threads, 0 = all cores (config key: workers)");
    auto* o_point = app.add_option("--point", point, "R1, C1 or q1,p1,q2,p2; ';' separates several (config key: points)");
    auto* o_nmax = app.add_option("--n-max", n_max, "Photon cutoff N (config key: fock.n_max)");
    auto* o_tmax = app.add_option("--tmax", t_max, "Evolution time T (config key: time.t_max)");
    auto* o_dt = app.add_option("--dt", dt, "Sampling step (config key: time.dt)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    if (*o_config) req.config_path = config_path;
    if (*o_out) ov.out = out;
    if (*o_workers) ov.workers = workers;
    if (*o_point) ov.point = point;
    if (*o_nmax) ov.n_max = n_max;
    if (*o_tmax) ov.t_max = t_max;
    if (*o_dt) ov.dt = dt;

    return rabi::io::run(req, std::cerr);
}

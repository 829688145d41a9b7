//
// bubblelab — batch front end for the bubble-in-bounded-liquid lab.
//
// Subcommands:
//   equilibrium  solve the equilibrium for (M,V) and report it as JSON
//   simulate     integrate the reduced dynamics, emit a trajectory CSV
//   spectrum     roots of the characteristic function + decay bounds, JSON
//   audit        check a trajectory CSV against the energy-dissipation law
//   sweep        equilibrium + spectrum along an M/V/T_inf family, CSV
//
// Exit codes: 0 success, 2 validation/config error, 3 numerical failure.
// Errors are also emitted as machine-readable JSON on stderr.
//
#include <filesystem>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"

#include "bubblelab/energy.hpp"
#include "bubblelab/fd_solver.hpp"
#include "bubblelab/io.hpp"
#include "bubblelab/parallel.hpp"
#include "bubblelab/spectrum.hpp"

namespace bl = bubblelab;
using nlohmann::json;

namespace {

json number_list(const std::vector<bl::Complex>& values) {
    json arr = json::array();
    for (const auto& v : values)
        arr.push_back({{"re", v.real()}, {"im", v.imag()}});
    return arr;
}

void write_json(const std::string& path, const json& j) {
    std::ofstream out(path);
    if (!out) throw bl::ValidationError("cannot open output file: " + path);
    out << j.dump(2) << "\n";
}

bl::EquilibriumState solve_from_config(const bl::RunConfig& cfg) {
    return bl::solve_radius(cfg.M, cfg.V, cfg.params);
}

double auto_t_end(const bl::RunConfig& cfg, const bl::EquilibriumState& eq) {
    return cfg.t_end > 0.0 ? cfg.t_end : 5.0 / eq.pi2_kappa_bar();
}

int cmd_equilibrium(const bl::RunConfig& cfg, const std::string& out_dir) {
    const bl::EquilibriumState eq = solve_from_config(cfg);
    json rep = {{"R_star", eq.R_star},
                {"rho_star", eq.rho_star},
                {"Rbar_star", eq.Rbar_star},
                {"kappa_bar", eq.kappa_bar},
                {"R_tilde", eq.R_tilde},
                {"residual", eq.residual},
                {"bracket", {eq.bracket_lo, eq.bracket_hi}}};
    write_json(out_dir + "/equilibrium.json", rep);
    std::cout << rep.dump(2) << "\n";
    return 0;
}

void write_trajectory_csv(const std::string& path, const bl::Trajectory& traj) {
    std::vector<std::string> header = {"t",          "rho2",  "delta_R",
                                       "dR",         "mass_drift", "energy",
                                       "dissipation", "znorm"};
    for (int j = 1; j <= 8; ++j) header.push_back("theta_" + std::to_string(j));
    bl::CsvWriter csv(path, header);
    for (std::size_t k = 0; k < traj.t.size(); ++k) {
        const Eigen::VectorXd& z = traj.z[k];
        std::vector<double> row = {traj.t[k],
                                   z[bl::kRho2],
                                   z[bl::kDR],
                                   z[bl::kVR],
                                   traj.mass_drift(k),
                                   traj.energy[k],
                                   traj.dissipation[k],
                                   z.norm()};
        for (int j = 0; j < 8; ++j)
            row.push_back(bl::kTheta + j < z.size() ? z[bl::kTheta + j] : 0.0);
        csv.row(row);
    }
}

int cmd_simulate(const bl::RunConfig& cfg, const std::string& out_dir) {
    const bl::EquilibriumState eq = solve_from_config(cfg);
    bl::SimOptions opts;
    opts.t_end = auto_t_end(cfg, eq);
    opts.output_dt = cfg.output_dt;
    opts.rtol = cfg.rtol;
    opts.atol = cfg.atol;
    opts.stepper = cfg.stepper;

    bl::Trajectory traj;
    if (cfg.backend == "fd") {
        bl::FdOptions fd;
        fd.sim = opts;
        fd.grid = cfg.grid;
        traj = bl::fd_simulate(eq, cfg.ic, fd);
    } else {
        bl::GalerkinSystem system(eq, cfg.N);
        traj = system.simulate(system.make_initial(cfg.ic), opts);
    }
    if (traj.t.empty())
        throw bl::NumericalError("no samples produced: " + traj.status);

    write_trajectory_csv(out_dir + "/trajectory.csv", traj);
    json summary = {{"status", traj.status},
                    {"steps", traj.steps},
                    {"backend", cfg.backend},
                    {"N", cfg.N},
                    {"t_end", traj.t.back()},
                    {"final_znorm", traj.z.back().norm()},
                    {"max_mass_drift", traj.max_mass_drift()},
                    {"seed", cfg.seed}};
    try {
        summary["fitted_rate"] = bl::fit_decay_rate(traj);
    } catch (const bl::NumericalError&) {
        summary["fitted_rate"] = nullptr;
    }
    write_json(out_dir + "/summary.json", summary);
    std::cout << summary.dump(2) << "\n";
    return 0;
}

int cmd_spectrum(const bl::RunConfig& cfg, const std::string& out_dir) {
    const bl::EquilibriumState eq = solve_from_config(cfg);
    bl::Window win = bl::Window::default_for(eq);
    if (cfg.win_re_lo != 0.0) win.re_lo = cfg.win_re_lo;
    if (cfg.win_re_hi != 0.0) win.re_hi = cfg.win_re_hi;
    if (cfg.win_im_max != 0.0) win.im_max = cfg.win_im_max;
    const bl::SpectrumReport rep =
        bl::spectrum_report(eq, win, cfg.spectrum_N, cfg.max_subdiv);

    json roots = json::array();
    for (const auto& r : rep.roots)
        roots.push_back({{"re", r.lambda.real()},
                         {"im", r.lambda.imag()},
                         {"residual", r.residual}});
    json out = {{"roots", roots},
                {"abscissa", rep.abscissa},
                {"predicted_rate", rep.predicted_rate},
                {"empirical_theta0", rep.empirical_theta0},
                {"pi2_kappa_bar", eq.pi2_kappa_bar()},
                {"constants",
                 {{"A", rep.constants.A},
                  {"B", rep.constants.B},
                  {"C", rep.constants.C},
                  {"K", rep.constants.K},
                  {"Theta1", rep.bounds.Theta1},
                  {"Theta2", rep.bounds.Theta2},
                  {"varpi", rep.bounds.varpi}}},
                {"gap",
                 {{"lo", rep.gap.lo},
                  {"hi", rep.gap.hi},
                  {"certified", rep.gap.certified}}},
                {"matrix_eigs_window", number_list(rep.matrix_eigs)},
                {"unresolved", number_list(rep.unresolved)}};
    write_json(out_dir + "/spectrum.json", out);
    std::cout << out.dump(2) << "\n";
    return 0;
}

struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<double>> rows;
    int col(const std::string& name) const {
        for (std::size_t i = 0; i < header.size(); ++i)
            if (header[i] == name) return int(i);
        throw bl::ValidationError("trajectory csv lacks column " + name);
    }
};

CsvTable read_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw bl::ValidationError("cannot open trajectory: " + path);
    CsvTable table;
    std::string line;
    if (!std::getline(in, line))
        throw bl::ValidationError("empty trajectory file");
    std::stringstream hs(line);
    std::string cell;
    while (std::getline(hs, cell, ',')) table.header.push_back(cell);
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::vector<double> row;
        std::stringstream ls(line);
        while (std::getline(ls, cell, ',')) row.push_back(std::stod(cell));
        if (row.size() != table.header.size())
            throw bl::ValidationError("ragged trajectory csv row");
        table.rows.push_back(row);
    }
    return table;
}

int cmd_audit(const bl::RunConfig& cfg, const std::string& traj_path,
              const std::string& out_dir) {
    const bl::EquilibriumState eq = solve_from_config(cfg);
    const double E_dagger = bl::equilibrium_energy(eq);
    const CsvTable table = read_csv(traj_path);
    const int ct = table.col("t"), cE = table.col("energy"),
              cD = table.col("dissipation"), cr2 = table.col("rho2");
    std::vector<int> ctheta;
    for (int j = 1; j <= 8; ++j)
        ctheta.push_back(table.col("theta_" + std::to_string(j)));

    std::vector<double> t, E, D;
    for (const auto& row : table.rows) {
        t.push_back(row[ct]);
        E.push_back(row[cE]);
        D.push_back(row[cD]);
    }
    if (t.size() < 5)
        throw bl::ValidationError("trajectory too short to audit");
    const std::vector<double> dEdt = bl::fd_derivative4(t, E);

    // mass moments of the first 8 modes, for the mean-density terms
    bl::ModalBasis basis(eq, 8, 32);
    std::vector<double> int_u(t.size());
    for (std::size_t k = 0; k < t.size(); ++k) {
        double acc = 4.0 * M_PI / 3.0 * table.rows[k][cr2];
        for (int j = 0; j < 8; ++j)
            acc += basis.mass_moment(j + 1) * table.rows[k][ctheta[j]];
        int_u[k] = acc;
    }
    const std::vector<double> d_int_u = bl::fd_derivative4(t, int_u);

    const bl::PhysicalParams& p = eq.params;
    const double rhos = eq.rho_star;
    const double R3 = std::pow(eq.R_star, 3);
    bool monotone = true, coercivity_ok = true;
    double max_residual = 0.0;
    bl::CsvWriter csv(out_dir + "/audit.csv",
                      {"t", "E", "D", "dEdt", "residual", "gap", "quad_form"});
    for (std::size_t k = 0; k < t.size(); ++k) {
        const double resid = dEdt[k] + D[k];
        max_residual = std::max(max_residual, std::abs(resid));
        const double gap = E[k] - E_dagger;
        const double u1 = table.rows[k][cr2];
        double int_u2 = 4.0 * M_PI / 3.0 * u1 * u1;
        for (int j = 0; j < 8; ++j) {
            const double th = table.rows[k][ctheta[j]];
            int_u2 += th * th + 2.0 * u1 * basis.mass_moment(j + 1) * th;
        }
        const double quad =
            0.25 *
            (eq.M * p.c_g * p.T_inf *
                 std::pow(u1 / rhos - 3.0 / (4.0 * M_PI * rhos) * int_u[k], 2) +
             p.rho_l * std::pow(eq.R_star, 5) / (4.0 * M_PI * rhos * rhos) *
                 (1.0 - eq.R_star / eq.Rbar_star) * d_int_u[k] * d_int_u[k] +
             p.R_spec * p.T_inf * R3 / (3.0 * rhos) * int_u2 +
             R3 / (M_PI * rhos * rhos) *
                 (p.sigma / (2.0 * eq.R_star) +
                  p.sigma_bar / eq.Rbar_star *
                      (1.0 - R3 / (2.0 * std::pow(eq.Rbar_star, 3)))) *
                 int_u[k] * int_u[k]);
        csv.row({t[k], E[k], D[k], dEdt[k], resid, gap, quad});
        if (k > 0 && E[k] > E[k - 1] + 10.0 * cfg.rtol * std::abs(E[k]))
            monotone = false;
        if (gap < quad - 1e-12 * std::abs(E_dagger)) coercivity_ok = false;
    }
    json verdict = {{"monotone", monotone},
                    {"max_residual", max_residual},
                    {"coercivity_ok", coercivity_ok}};
    write_json(out_dir + "/audit.json", verdict);
    std::cout << verdict.dump(2) << "\n";
    return 0;
}

int cmd_sweep(const bl::RunConfig& cfg, std::string axis,
              std::vector<double> values, const std::string& out_dir) {
    if (axis.empty()) axis = cfg.sweep_axis;
    if (values.empty()) values = cfg.sweep_values;
    if (axis != "M" && axis != "V" && axis != "T_inf")
        throw bl::ValidationError("sweep axis must be M, V or T_inf");
    if (values.empty())
        throw bl::ValidationError("sweep needs at least one grid value");

    std::vector<bl::RateRow> rows(values.size());
    std::vector<std::string> errors(values.size());
    bl::parallel_for(values.size(), [&](std::ptrdiff_t i) {
        try {
            bl::PhysicalParams p = cfg.params;
            double M = cfg.M, V = cfg.V;
            if (axis == "M") M = values[i];
            if (axis == "V") V = values[i];
            if (axis == "T_inf") p.T_inf = values[i];
            const bl::EquilibriumState eq = bl::solve_radius(M, V, p);
            const auto table = bl::rate_table({eq}, {values[i]});
            rows[i] = table[0];
        } catch (const std::exception& e) {
            errors[i] = e.what();
        }
    });
    for (const auto& err : errors)
        if (!err.empty()) throw bl::NumericalError("sweep point failed: " + err);

    bl::CsvWriter csv(out_dir + "/sweep.csv",
                      {axis, "R_star", "rho_star", "kappa_bar", "abscissa",
                       "varpi"});
    for (const auto& row : rows)
        csv.row({row.axis_value, row.R_star, row.rho_star, row.kappa_bar,
                 row.abscissa, row.varpi});
    std::cout << "wrote " << out_dir << "/sweep.csv (" << rows.size()
              << " points)\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"numerical lab for a gas bubble in a bounded viscous liquid"};
    app.require_subcommand(1);

    std::string config_path, out_dir = ".", axis, traj_path;
    std::vector<double> grid_values;
    int workers = 0;
    std::uint64_t seed_flag = 0;
    bool seed_set = false;

    app.add_option("--workers", workers, "worker threads for sweeps");
    app.add_option("--seed", seed_flag, "seed for randomized audits")
        ->each([&](const std::string&) { seed_set = true; });

    auto* eq_cmd = app.add_subcommand("equilibrium", "solve the equilibrium");
    eq_cmd->add_option("--config", config_path)->required();
    eq_cmd->add_option("--out", out_dir);

    auto* sim_cmd = app.add_subcommand("simulate", "integrate the dynamics");
    sim_cmd->add_option("--config", config_path)->required();
    sim_cmd->add_option("--out", out_dir);

    auto* spec_cmd = app.add_subcommand("spectrum", "characteristic roots");
    spec_cmd->add_option("--config", config_path)->required();
    spec_cmd->add_option("--out", out_dir);

    auto* audit_cmd = app.add_subcommand("audit", "audit a trajectory csv");
    audit_cmd->add_option("trajectory", traj_path)->required();
    audit_cmd->add_option("--config", config_path)->required();
    audit_cmd->add_option("--out", out_dir);

    auto* sweep_cmd = app.add_subcommand("sweep", "parameter sweep");
    sweep_cmd->add_option("--config", config_path)->required();
    sweep_cmd->add_option("--axis", axis, "M, V or T_inf");
    sweep_cmd->add_option("--values", grid_values, "grid values")
        ->delimiter(',');
    sweep_cmd->add_option("--out", out_dir);

    CLI11_PARSE(app, argc, argv);

    auto fail = [](int code, const std::string& msg) {
        nlohmann::json err = {{"error", {{"code", code}, {"message", msg}}}};
        std::cerr << err.dump() << "\n";
        return code;
    };

    try {
        if (workers > 0) bl::set_worker_count(workers);
        bl::RunConfig cfg = bl::parse_config(bl::read_json_file(config_path));
        if (seed_set) cfg.seed = seed_flag;
        std::filesystem::create_directories(out_dir);
        if (eq_cmd->parsed()) return cmd_equilibrium(cfg, out_dir);
        if (sim_cmd->parsed()) return cmd_simulate(cfg, out_dir);
        if (spec_cmd->parsed()) return cmd_spectrum(cfg, out_dir);
        if (audit_cmd->parsed()) return cmd_audit(cfg, traj_path, out_dir);
        if (sweep_cmd->parsed()) return cmd_sweep(cfg, axis, grid_values, out_dir);
    } catch (const bl::ValidationError& e) {
        return fail(2, e.what());
    } catch (const bl::NumericalError& e) {
        return fail(3, e.what());
    } catch (const std::exception& e) {
        return fail(3, e.what());
    }
    return 0;
}

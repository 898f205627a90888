// eigenlocal: mesh, solve, localize, sweep and render from the command line.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "eigenlocal/config.hpp"
#include "eigenlocal/errors.hpp"
#include "eigenlocal/io.hpp"
#include "eigenlocal/localization.hpp"
#include "eigenlocal/pipeline.hpp"
#include "eigenlocal/render.hpp"
#include "eigenlocal/sweep.hpp"

namespace fs = std::filesystem;
using namespace eigenlocal;

namespace {

constexpr const char* kTool = "eigenlocal";
constexpr const char* kVersion = "0.1.0";

struct Flags {
    std::string config;
    std::optional<std::string> family;
    std::optional<double> h;
    std::optional<std::string> h_list;
    std::optional<double> target_edge;
    std::optional<std::size_t> k;
    std::optional<double> tol;
    std::optional<std::uint64_t> seed;
    std::optional<std::string> boundary;
    std::optional<std::string> out;
    std::optional<std::string> in;
    std::optional<std::string> modes;
    std::optional<std::string> mode_selector;
    std::string manifest;
};

void add_run_flags(CLI::App* cmd, Flags& f) {
    cmd->add_option("--config", f.config, "JSON config file");
    cmd->add_option("--family", f.family, "DiamondBox, DiscBox or RoomsAndPassage");
    cmd->add_option("--h", f.h, "aperture");
    cmd->add_option("--h-list", f.h_list, "comma-separated apertures");
    cmd->add_option("--target-edge", f.target_edge, "mesh target edge length");
    cmd->add_option("--k", f.k, "number of eigenpairs");
    cmd->add_option("--tol", f.tol, "eigensolver tolerance");
    cmd->add_option("--seed", f.seed, "random seed");
    cmd->add_option("--boundary", f.boundary, "Neumann or Dirichlet");
    cmd->add_option("--out", f.out, "output directory");
    cmd->add_option("--mode-selector", f.mode_selector, "comma-separated skew ranks to track");
    cmd->add_option("--modes", f.modes, "comma-separated 1-based mode indices");
}

std::vector<std::string> split_commas(const std::string& s) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    for (std::string item; std::getline(ss, item, ',');)
        if (!item.empty()) out.push_back(item);
    return out;
}

std::vector<double> parse_doubles(const std::string& s, const char* what) {
    std::vector<double> out;
    for (const auto& item : split_commas(s)) {
        std::size_t used = 0;
        double v = 0.0;
        try {
            v = std::stod(item, &used);
        } catch (const std::exception&) {
            used = 0;
        }
        if (used != item.size()) throw ValidationError(std::string("bad number '") + item + "' in " + what);
        out.push_back(v);
    }
    return out;
}

std::vector<std::size_t> parse_indices(const std::string& s, const char* what) {
    std::vector<std::size_t> out;
    for (double v : parse_doubles(s, what)) {
        if (v < 0 || v != static_cast<double>(static_cast<std::size_t>(v)))
            throw ValidationError(std::string("bad index in ") + what);
        out.push_back(static_cast<std::size_t>(v));
    }
    return out;
}

RunConfig resolve(const Flags& f) {
    RunConfig cfg;
    if (!f.config.empty()) cfg = apply_config_json(read_file(f.config), cfg);
    try {
        if (f.family) cfg.family = parse_family(*f.family);
        if (f.boundary) cfg.boundary = parse_boundary(*f.boundary);
    } catch (const ParameterError& e) {
        throw ValidationError(e.what());
    }
    if (f.h) cfg.h = *f.h;
    if (f.h_list) cfg.h_list = parse_doubles(*f.h_list, "--h-list");
    if (f.target_edge) cfg.target_edge = *f.target_edge;
    if (f.k) cfg.k = *f.k;
    if (f.tol) cfg.tol = *f.tol;
    if (f.seed) cfg.seed = *f.seed;
    if (f.out) cfg.output_dir = *f.out;
    if (f.in) cfg.input_dir = *f.in;
    if (f.modes) cfg.modes = parse_indices(*f.modes, "--modes");
    if (f.mode_selector) cfg.mode_selector = parse_indices(*f.mode_selector, "--mode-selector");
    return cfg;
}

fs::path prepare_output(const RunConfig& cfg) {
    const fs::path dir = cfg.output_dir;
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec || !fs::is_directory(dir)) throw IoError("cannot create output directory " + dir.string());
    return dir;
}

void write_manifest(const fs::path& dir, const std::string& command, const RunConfig& cfg) {
    nlohmann::ordered_json j;
    j["tool"] = kTool;
    j["version"] = kVersion;
    j["command"] = command;
    j["config"] = nlohmann::ordered_json::parse(config_to_json(cfg));
    write_file_atomic(dir / "manifest.json", j.dump(2) + "\n");
}

std::string vector_text(const Eigen::VectorXd& u) {
    std::string out;
    char buf[40];
    for (Eigen::Index i = 0; i < u.size(); ++i) {
        std::snprintf(buf, sizeof buf, "%.17g\n", u[i]);
        out += buf;
    }
    return out;
}

std::string mode_file(std::size_t i) { return "mode_" + std::to_string(i) + ".txt"; }

void cmd_eigs(const RunConfig& cfg) {
    validate_for_eigs(cfg);
    const fs::path dir = prepare_output(cfg);
    const DomainSpec spec = build_two_room_domain(cfg.family, *cfg.h);
    const DomainSolution sol = solve_domain(spec, cfg.solve_options());

    write_file_atomic(dir / "domain.json", domain_to_json(spec) + "\n");
    write_file_atomic(dir / "mesh.json", mesh_to_json(sol.mesh) + "\n");

    nlohmann::ordered_json j;
    j["family"] = std::string(to_string(cfg.family));
    j["h"] = *cfg.h;
    j["boundary"] = std::string(to_string(cfg.boundary));
    j["n_vertices"] = sol.mesh.n_vertices();
    j["basis"] = nlohmann::ordered_json::parse(eigen_basis_to_json(sol.basis));
    nlohmann::ordered_json modes = nlohmann::ordered_json::array();
    std::string csv = std::string(kCsvHeader) + "\n";
    for (const auto& r : sol.reports) {
        modes.push_back({{"mode", r.mode_index},
                         {"lambda", r.eigenvalue},
                         {"residual", sol.basis.residuals[static_cast<Eigen::Index>(r.mode_index - 1)]},
                         {"parity", std::string(to_string(r.parity))},
                         {"skew_ratio", r.skew_ratio},
                         {"l2_outside", r.l2_outside},
                         {"linf_outside", r.linf_outside},
                         {"l2_inside", r.l2_inside},
                         {"vector", mode_file(r.mode_index)}});
        csv += csv_row(r) + "\n";
    }
    j["modes"] = std::move(modes);
    write_file_atomic(dir / "eigs.json", j.dump(2) + "\n");
    write_file_atomic(dir / "localization.csv", csv);
    for (Eigen::Index c = 0; c < sol.basis.eigenvectors.cols(); ++c) {
        write_file_atomic(dir / mode_file(static_cast<std::size_t>(c) + 1), vector_text(sol.basis.eigenvectors.col(c)));
    }
    write_manifest(dir, "eigs", cfg);
    std::printf("%zu eigenpairs on %zu vertices written to %s\n", sol.reports.size(), sol.mesh.n_vertices(),
                dir.string().c_str());
}

void cmd_sweep(const RunConfig& cfg) {
    validate_for_sweep(cfg);
    const fs::path dir = prepare_output(cfg);
    const fs::path partial = dir / "sweep.csv.partial";
    {
        std::ofstream out(partial, std::ios::trunc);
        if (!out) throw IoError("cannot write " + partial.string());
        out << kCsvHeader << "\n";
    }
    SweepOptions o;
    o.family = cfg.family;
    o.h_list = cfg.sweep_h_list();
    o.mode_selectors = cfg.mode_selector;
    o.solve = cfg.solve_options();
    o.threads = thread_cap();
    o.on_report = [&](std::size_t, const LocalizationReport& r) {
        std::ofstream out(partial, std::ios::app);
        out << csv_row(r) << "\n";
    };
    const std::vector<SweepResult> results = run_sweeps(o);

    write_file_atomic(dir / "sweep.csv", sweep_csv(results));
    std::error_code ec;
    fs::remove(partial, ec);
    write_file_atomic(dir / "sweep.json", sweep_to_json(results) + "\n");
    const std::string table = emit_summary_table(results);
    write_file_atomic(dir / "summary.txt", table);
    for (const auto& r : results) {
        std::vector<std::pair<double, double>> l2, linf;
        for (const auto& rep : r.reports) {
            l2.emplace_back(rep.h, rep.l2_outside);
            linf.emplace_back(rep.h, rep.linf_outside);
        }
        const std::string stem = std::string(to_string(cfg.family)) + "_sweep_skew" + std::to_string(r.mode.skew_rank);
        const std::string label = std::string(to_string(cfg.family)) + ", Eigfcn " +
                                  std::to_string(r.reports.front().mode_index);
        render_loglog(l2, r.l2_fit, dir / (stem + "_l2.svg"), label + ": Localization in L2 norm");
        render_loglog(linf, r.linf_fit, dir / (stem + "_linf.svg"), label + ": Localization in Linf norm");
    }
    write_manifest(dir, "sweep", cfg);
    std::fputs(table.c_str(), stdout);
}

void cmd_render(const RunConfig& cfg) {
    const fs::path in = cfg.input_dir.empty() ? fs::path(cfg.output_dir) : fs::path(cfg.input_dir);
    const std::string eigs_text = read_file(in / "eigs.json");
    const Mesh mesh = mesh_from_json(read_file(in / "mesh.json"));
    std::size_t k = 0;
    std::string family_name;
    double h = 0.0;
    try {
        const nlohmann::json eigs = nlohmann::json::parse(eigs_text);
        k = eigs.at("modes").size();
        family_name = eigs.at("family").get<std::string>();
        h = eigs.at("h").get<double>();
    } catch (const nlohmann::json::exception& e) {
        throw InputError(std::string("malformed eigs.json: ") + e.what());
    }
    DomainFamily family;
    try {
        family = parse_family(family_name);
    } catch (const ParameterError& e) {
        throw InputError(std::string("malformed eigs.json: ") + e.what());
    }
    std::vector<std::size_t> modes = cfg.modes;
    if (modes.empty())
        for (std::size_t i = 1; i <= k; ++i) modes.push_back(i);
    for (std::size_t m : modes) {
        if (m < 1 || m > k) {
            throw ValidationError("mode " + std::to_string(m) + " out of range 1.." + std::to_string(k));
        }
    }
    const fs::path dir = prepare_output(cfg);
    for (std::size_t m : modes) {
        const std::string text = read_file(in / mode_file(m));
        std::vector<double> values;
        std::istringstream ss(text);
        for (double v; ss >> v;) values.push_back(v);
        if (values.size() != mesh.n_vertices()) {
            throw InputError(mode_file(m) + " has " + std::to_string(values.size()) + " values for " +
                             std::to_string(mesh.n_vertices()) + " vertices");
        }
        const Eigen::Map<const Eigen::VectorXd> u(values.data(), static_cast<Eigen::Index>(values.size()));
        char title[128];
        std::snprintf(title, sizeof title, "%s, h = %g, eigenfunction %zu", std::string(to_string(family)).c_str(), h,
                      m);
        render_mode(mesh, u, dir / svg_filename(family, h, m, "heatmap"), title);
    }
    write_manifest(dir, "render", cfg);
    std::printf("%zu heatmaps written to %s\n", modes.size(), dir.string().c_str());
}

void run(const std::string& command, const RunConfig& cfg) {
    if (command == "eigs") cmd_eigs(cfg);
    else if (command == "sweep") cmd_sweep(cfg);
    else if (command == "render") cmd_render(cfg);
    else throw ValidationError("unknown command '" + command + "'");
}

void cmd_rerun(const Flags& f) {
    const std::string text = read_file(f.manifest);
    std::string command;
    RunConfig cfg;
    try {
        const nlohmann::json j = nlohmann::json::parse(text);
        command = j.at("command").get<std::string>();
        cfg = apply_config_json(j.at("config").dump());
    } catch (const nlohmann::json::exception& e) {
        throw InputError(std::string("malformed manifest: ") + e.what());
    }
    if (f.out) cfg.output_dir = *f.out;
    run(command, cfg);
}

int exit_code(ErrorKind kind) {
    switch (kind) {
        case ErrorKind::Validation: return 2;
        case ErrorKind::MissingInput: return 3;
        case ErrorKind::Numerical: return 4;
        case ErrorKind::Io: return 1;
    }
    return 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Low-frequency Laplacian eigenfunctions and localization on two-room domains"};
    app.require_subcommand(1);
    // -h would clash with --h.
    app.set_help_flag("--help", "print this help");
    Flags flags;
    CLI::App* eigs = app.add_subcommand("eigs", "mesh, assemble and solve one domain");
    CLI::App* sweep = app.add_subcommand("sweep", "aperture sweep with mode tracking and power-law fits");
    CLI::App* render = app.add_subcommand("render", "heatmaps of modes written by eigs");
    CLI::App* rerun = app.add_subcommand("rerun", "repeat a run from its manifest.json");
    for (CLI::App* c : {eigs, sweep, render, rerun}) c->set_help_flag("--help", "print this help");
    for (CLI::App* c : {eigs, sweep, render}) add_run_flags(c, flags);
    render->add_option("--in", flags.in, "directory with eigs.json, mesh.json and mode files");
    rerun->add_option("--manifest", flags.manifest, "manifest.json of an earlier run")->required();
    rerun->add_option("--out", flags.out, "output directory override");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    }

    try {
        if (rerun->parsed()) {
            cmd_rerun(flags);
        } else {
            const std::string command = eigs->parsed() ? "eigs" : sweep->parsed() ? "sweep" : "render";
            run(command, resolve(flags));
        }
    } catch (const Error& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return exit_code(e.kind());
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    return 0;
}

// One PASS/FAIL line per acceptance criterion. Tolerances are fixed here.

#include <sys/wait.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "eigenlocal/eigensolver.hpp"
#include "eigenlocal/fem.hpp"
#include "eigenlocal/localization.hpp"
#include "eigenlocal/mesh.hpp"
#include "eigenlocal/pipeline.hpp"
#include "eigenlocal/sweep.hpp"
#include "eigenlocal/symmetry.hpp"
#include "oracles.hpp"

using namespace eigenlocal;
namespace fs = std::filesystem;

namespace {

constexpr double kPi = std::numbers::pi;

// Criterion 1
constexpr double kSquareTargetEdge = 0.0105;
constexpr double kSquareRelTol = 0.01;
constexpr double kSquareSeconds = 60.0;
// Criterion 2
constexpr double kDiscTargetEdge = 0.03;
constexpr double kDiscRelTol = 0.015;
// Criterion 3
constexpr double kElementTol = 1e-14;
constexpr double kAssemblyRelTol = 1e-10;
// Criterion 4
constexpr double kAxisRelTol = 1e-6;
constexpr double kCornerDecay = 3.0;
constexpr double kParityTargetEdge = 0.1;
// Criterion 5
const std::vector<double> kSweepH{0.2, 0.15, 0.1, 0.075, 0.05};
constexpr double kSweepMinR2 = 0.95;
constexpr double kSweepMinExponent = 1.0;
constexpr double kSweepSeconds = 600.0;
// Criterion 6
constexpr double kFitRelTol = 1e-9;
// Criterion 7
constexpr double kPerturbDelta = 0.05;
constexpr double kPerturbH = 0.1;
constexpr double kPerturbFactor = 5.0;
// Criterion 8
constexpr int kWhisperOrder = 8;
constexpr double kAnnulusR = 0.6;
constexpr std::size_t kWhisperK = 32;
constexpr double kAnnulusRelTol = 0.05;
// Criterion 10
constexpr double kPythagorasTol = 1e-10;

struct Outcome {
    bool pass = false;
    std::string detail;
};

std::string fmt(const char* f, double a) {
    char buf[128];
    std::snprintf(buf, sizeof buf, f, a);
    return buf;
}

std::string fmt(const char* f, double a, double b) {
    char buf[160];
    std::snprintf(buf, sizeof buf, f, a, b);
    return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

// Assembly identities, collected from every mesh built below.
struct AssemblyCheck {
    std::string name;
    double k_row_sum = 0.0;
    double mass_error = 0.0;
};
std::vector<AssemblyCheck> g_assembly;
std::vector<LocalizationReport> g_reports;

void record(const std::string& name, const FemSystem& s, double exact_area) {
    const Eigen::VectorXd ones = Eigen::VectorXd::Ones(static_cast<Eigen::Index>(s.K.n));
    const double k1 = (s.K * ones).cwiseAbs().maxCoeff() / s.K.max_abs();
    g_assembly.push_back({name, k1, std::abs(s.M.sum_entries() - exact_area) / exact_area});
}

const PolygonRegion kUnitSquare{{{0, 0}, {1, 0}, {1, 1}, {0, 1}}, RegionTag::Omega1};

Outcome square_spectrum() {
    const auto t0 = std::chrono::steady_clock::now();
    const Mesh mesh = triangulate_region(kUnitSquare, kSquareTargetEdge);
    const FemSystem sys = assemble(mesh);
    const EigenBasis b = solve_smallest(sys.K, sys.M, 6, kDefaultTol, 1);
    const double secs = seconds_since(t0);
    record("square", sys, 1.0);

    const std::vector<double> exact = oracle::square_neumann_spectrum(6);
    double worst = 0.0;
    for (int i = 0; i < 6; ++i) {
        // The zero eigenvalue is compared against the first nonzero one.
        const double scale = exact[static_cast<std::size_t>(i)] > 0 ? exact[static_cast<std::size_t>(i)] : kPi * kPi;
        worst = std::max(worst, std::abs(b.eigenvalues[i] - exact[static_cast<std::size_t>(i)]) / scale);
    }
    return {worst <= kSquareRelTol && secs <= kSquareSeconds,
            std::to_string(mesh.n_vertices()) + " vertices, worst rel err " + fmt("%.3e", worst) + ", " +
                fmt("%.1f s", secs)};
}

Outcome disc_spectrum() {
    const PolygonRegion disc = regular_polygon(64, 1.0, {0, 0}, RegionTag::Omega1);
    const Mesh mesh = triangulate_region(disc, kDiscTargetEdge);
    const FemSystem sys = assemble(mesh);
    record("disc", sys, polygon_area(disc));
    const EigenBasis b = solve_smallest(sys.K, sys.M, 3, kDefaultTol, 1);
    const double jp = oracle::bessel_jprime_zero(1, 1);
    const double err = std::abs(b.eigenvalues[1] - jp * jp) / (jp * jp);
    return {err <= kDiscRelTol, "lambda_1 = " + fmt("%.6f", b.eigenvalues[1]) + " vs " + fmt("%.6f", jp * jp) +
                                    ", rel err " + fmt("%.3e", err)};
}

Outcome element_exactness() {
    const ElementMatrix K = element_stiffness({0, 0}, {1, 0}, {0, 1});
    const ElementMatrix M = element_mass({0, 0}, {1, 0}, {0, 1});
    const double Kref[3][3] = {{1.0, -0.5, -0.5}, {-0.5, 0.5, 0.0}, {-0.5, 0.0, 0.5}};
    const double Mref[3][3] = {{2.0 / 24, 1.0 / 24, 1.0 / 24}, {1.0 / 24, 2.0 / 24, 1.0 / 24},
                               {1.0 / 24, 1.0 / 24, 2.0 / 24}};
    double elem = 0.0;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j)
            elem = std::max({elem, std::abs(K[i][j] - Kref[i][j]), std::abs(M[i][j] - Mref[i][j])});
    double k1 = 0.0, mass = 0.0;
    for (const auto& a : g_assembly) k1 = std::max(k1, a.k_row_sum), mass = std::max(mass, a.mass_error);
    return {elem <= kElementTol && k1 <= kAssemblyRelTol && mass <= kAssemblyRelTol,
            "element err " + fmt("%.1e", elem) + ", over " + std::to_string(g_assembly.size()) + " meshes |K1|/max|K| " +
                fmt("%.1e", k1) + ", sum(M) rel err " + fmt("%.1e", mass)};
}

Eigen::VectorXd sample(const Mesh& m, const std::function<double(Point2)>& f) {
    Eigen::VectorXd u(static_cast<Eigen::Index>(m.n_vertices()));
    for (std::size_t v = 0; v < m.n_vertices(); ++v) u[static_cast<Eigen::Index>(v)] = f(m.vertices[v]);
    return u;
}

double m_cosine(const Eigen::VectorXd& a, const Eigen::VectorXd& b, const SparseSymMatrix& M) {
    return a.dot(M * b) / std::sqrt(a.dot(M * a) * b.dot(M * b));
}

Outcome symmetry_classification() {
    const ReflectionLine line = ReflectionLine::through({0, 0}, {1, 1});
    Mesh mesh = triangulate_region(kUnitSquare, kParityTargetEdge, MirrorSpec{line, {0, 0}});
    const auto skew_fn = [](Point2 p) { return std::cos(kPi * p.x) - std::cos(kPi * p.y); };
    const auto sym_fn = [](Point2 p) { return std::cos(kPi * p.x) + std::cos(kPi * p.y); };

    bool labels = true, axis = true;
    double worst_axis = 0.0;
    std::vector<double> grads;
    for (int level = 0; level < 3; ++level) {
        const FemSystem sys = assemble(mesh);
        record("diagonal square level " + std::to_string(level), sys, 1.0);
        const EigenBasis b = solve_smallest(sys.K, sys.M, 4, kDefaultTol, 1);
        const ReflectionPermutation perm = reflection_permutation(mesh, line);
        const double gap = 10.0 * kDefaultTol * std::max(1.0, b.eigenvalues.cwiseAbs().maxCoeff());
        const Eigen::MatrixXd V = b.eigenvectors * cluster_rotation(b.eigenvalues, b.eigenvectors, perm, gap);
        // Columns 1 and 2 span the pi^2 pair; match each to its closed form.
        const Eigen::VectorXd fs = sample(mesh, skew_fn), fy = sample(mesh, sym_fn);
        const bool first_is_skew = std::abs(m_cosine(V.col(1), fs, sys.M)) > std::abs(m_cosine(V.col(2), fs, sys.M));
        const Eigen::VectorXd skew = V.col(first_is_skew ? 1 : 2), sym = V.col(first_is_skew ? 2 : 1);
        labels = labels && classify_parity(skew, perm).label == Parity::Skew &&
                 classify_parity(sym, perm).label == Parity::Symmetric && std::abs(m_cosine(skew, fs, sys.M)) > 0.99 &&
                 std::abs(m_cosine(sym, fy, sys.M)) > 0.99;
        const Eigen::VectorXd u = normalize(skew_part(skew, perm), sys.M);
        const NodalLineReport r = nodal_line_check(u, mesh);
        const double rel = r.max_axis_abs / u.cwiseAbs().maxCoeff();
        worst_axis = std::max(worst_axis, rel);
        axis = axis && rel <= kAxisRelTol;
        grads.push_back(r.corner_gradient_norm);
        if (level < 2) mesh = refine_uniform(mesh);
    }
    const double d1 = grads[0] / grads[1], d2 = grads[1] / grads[2];
    const bool decay = d1 >= kCornerDecay && d2 >= kCornerDecay;
    return {labels && axis && decay, std::string("labels ") + (labels ? "ok" : "wrong") + ", axis " +
                                         fmt("%.1e", worst_axis) + ", corner gradient " + fmt("%.4f", grads[0]) +
                                         " -> " + fmt("%.4f", grads[1]) + " -> " + fmt("%.4f", grads[2]) +
                                         " (decay " + fmt("%.2fx, %.2fx", d1, d2) + ")"};
}

Outcome localization_sweep() {
    const auto t0 = std::chrono::steady_clock::now();
    const SweepResult r = run_sweep(DomainFamily::DiamondBox, kSweepH, 1, SolveOptions{}, thread_cap());
    const double secs = seconds_since(t0);
    bool decreasing = true;
    std::string values;
    for (std::size_t i = 0; i < r.reports.size(); ++i) {
        g_reports.push_back(r.reports[i]);
        if (i && !(r.reports[i].l2_outside < r.reports[i - 1].l2_outside)) decreasing = false;
        values += (i ? " " : "") + fmt("%.3e", r.reports[i].l2_outside);
    }
    const bool pass = r.reports.size() == kSweepH.size() && decreasing && r.l2_fit.r2 >= kSweepMinR2 &&
                      r.l2_fit.b >= kSweepMinExponent && secs <= kSweepSeconds;
    return {pass, "l2_outside " + values + ", " + format_power_law(r.l2_fit) + fmt(", r2 %.4f", r.l2_fit.r2) +
                      fmt(", %.0f s", secs)};
}

Outcome power_law_round_trip() {
    std::vector<std::pair<double, double>> pts;
    for (double h : kSweepH) pts.emplace_back(h, 11.254 * std::pow(h, 3.9087));
    const PowerLawFit f = fit_power_law(pts);
    const double ea = std::abs(f.a / 11.254 - 1.0), eb = std::abs(f.b / 3.9087 - 1.0);
    bool covariant = true;
    std::mt19937_64 rng(6);
    std::uniform_real_distribution<double> U(0.01, 10.0), C(0.001, 1000.0);
    for (int trial = 0; trial < 500; ++trial) {
        std::vector<std::pair<double, double>> p, q;
        const double c = C(rng);
        for (int i = 0; i < 3 + trial % 8; ++i) {
            p.emplace_back(U(rng) * (i + 1), U(rng));
            q.emplace_back(p.back().first, c * p.back().second);
        }
        const PowerLawFit g = fit_power_law(p), h = fit_power_law(q);
        covariant = covariant && std::abs(h.a / (c * g.a) - 1.0) <= 1e-12 && std::abs(h.b - g.b) <= 1e-12;
    }
    return {ea <= kFitRelTol && eb <= kFitRelTol && covariant,
            fmt("a rel err %.1e, b rel err %.1e", ea, eb) + ", scale covariance " + (covariant ? "holds" : "broken")};
}

Outcome symmetry_breaking() {
    const DomainSpec base = build_two_room_domain(DomainFamily::DiamondBox, kPerturbH);
    const DomainSpec bent = perturb_symmetry(base, kPerturbDelta);
    double mins[2];
    int i = 0;
    for (const DomainSpec* s : {&base, &bent}) {
        const DomainSolution sol = solve_domain(*s, SolveOptions{});
        record(i ? "perturbed DiamondBox" : "DiamondBox", sol.system, s->area());
        double m = 1e300;
        for (const auto& r : sol.reports) {
            g_reports.push_back(r);
            m = std::min(m, r.l2_outside);
        }
        mins[i++] = m;
    }
    const double ratio = mins[1] / mins[0];
    return {ratio >= kPerturbFactor, fmt("min l2_outside %.3e -> %.3e", mins[0], mins[1]) + fmt(", ratio %.2f", ratio)};
}

Outcome whispering_gallery() {
    const PolygonRegion disc = regular_polygon(64, 1.0, {0, 0}, RegionTag::Omega1);
    const Mesh mesh = triangulate_region(disc, kDiscTargetEdge);
    const FemSystem sys = assemble(mesh);
    record("disc k=32", sys, polygon_area(disc));
    const EigenBasis b = solve_smallest(sys.K, sys.M, kWhisperK, kDefaultTol, 1);

    // r^m cos(m theta) and r^m sin(m theta) pick out angular order m.
    const int m = kWhisperOrder;
    const Eigen::VectorXd c = sample(mesh, [m](Point2 p) { return std::pow(norm(p), m) * std::cos(m * std::atan2(p.y, p.x)); });
    const Eigen::VectorXd s = sample(mesh, [m](Point2 p) { return std::pow(norm(p), m) * std::sin(m * std::atan2(p.y, p.x)); });
    std::vector<std::pair<double, Eigen::Index>> score;
    for (Eigen::Index j = 0; j < b.eigenvectors.cols(); ++j) {
        const Eigen::VectorXd v = b.eigenvectors.col(j);
        const double a1 = m_cosine(v, c, sys.M), a2 = m_cosine(v, s, sys.M);
        score.emplace_back(a1 * a1 + a2 * a2, j);
    }
    std::sort(score.rbegin(), score.rend());

    auto annulus_fraction = [&](const Eigen::VectorXd& u) {
        double inside = 0.0;
        for (const auto& t : mesh.triangles) {
            const Point2 a = mesh.vertices[t[0]], bb = mesh.vertices[t[1]], cc = mesh.vertices[t[2]];
            if (norm((1.0 / 3.0) * (a + bb + cc)) <= kAnnulusR) continue;
            const ElementMatrix Me = element_mass(a, bb, cc);
            for (int i = 0; i < 3; ++i)
                for (int j = 0; j < 3; ++j)
                    inside += u[static_cast<Eigen::Index>(t[i])] * Me[i][j] * u[static_cast<Eigen::Index>(t[j])];
        }
        return inside / u.dot(sys.M * u);
    };
    // The pair is degenerate, so average over it.
    const Eigen::Index j1 = std::min(score[0].second, score[1].second), j2 = std::max(score[0].second, score[1].second);
    const double frac = 0.5 * (annulus_fraction(b.eigenvectors.col(j1)) + annulus_fraction(b.eigenvectors.col(j2)));
    const double exact = oracle::disc_mode_mass_fraction(m, kAnnulusR);
    const double err = std::abs(frac - exact) / exact;
    return {err <= kAnnulusRelTol && score[1].first > 0.5,
            "modes " + std::to_string(j1 + 1) + "," + std::to_string(j2 + 1) + fmt(" (lambda %.3f, %.3f)", b.eigenvalues[j1], b.eigenvalues[j2]) +
                fmt(", annulus fraction %.4f vs %.4f", frac, exact) + fmt(", rel err %.2e", err)};
}

int run_cli(const std::string& args) {
    const std::string cmd = std::string(EIGENLOCAL_CLI_PATH) + " " + args + " > /dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::map<std::string, std::string> snapshot(const fs::path& dir) {
    std::map<std::string, std::string> files;
    for (const auto& e : fs::recursive_directory_iterator(dir)) {
        if (!e.is_regular_file()) continue;
        std::ifstream in(e.path(), std::ios::binary);
        std::ostringstream ss;
        ss << in.rdbuf();
        files[fs::relative(e.path(), dir).string()] = ss.str();
    }
    return files;
}

std::vector<std::map<std::string, std::string>> g_cli_runs;

std::map<std::string, std::string> cli_pipeline(const fs::path& dir) {
    fs::remove_all(dir);
    const std::string d = dir.string();
    int rc = run_cli("eigs --family DiamondBox --h 0.1 --k 12 --target-edge 0.03 --out " + d + "/eigs");
    rc |= run_cli("render --in " + d + "/eigs --modes 1,4,5 --out " + d + "/render");
    rc |= run_cli("sweep --family DiamondBox --h-list 0.2,0.1,0.05 --target-edge 0.03 --k 10 --out " + d + "/sweep");
    if (rc != 0) return {};
    return snapshot(dir);
}

Outcome determinism() {
    const fs::path dir = fs::temp_directory_path() / "eigenlocal_acceptance";
    const auto first = cli_pipeline(dir);
    const auto second = cli_pipeline(dir);
    g_cli_runs = {first, second};
    std::size_t csv = 0, json = 0, svg = 0, differing = 0;
    for (const auto& [name, bytes] : first) {
        const auto it = second.find(name);
        if (it == second.end() || it->second != bytes) ++differing;
        const std::string ext = fs::path(name).extension().string();
        csv += ext == ".csv", json += ext == ".json", svg += ext == ".svg";
    }
    const bool pass = !first.empty() && first.size() == second.size() && differing == 0 && csv && json && svg;
    return {pass, std::to_string(first.size()) + " files (" + std::to_string(csv) + " csv, " + std::to_string(json) +
                      " json, " + std::to_string(svg) + " svg), " + std::to_string(differing) + " differ"};
}

Outcome pythagorean() {
    double worst = 0.0;
    std::size_t n = 0;
    auto check = [&](double inside, double outside) {
        worst = std::max(worst, std::abs(inside * inside + outside * outside - 1.0));
        ++n;
    };
    for (const auto& r : g_reports) check(r.l2_inside, r.l2_outside);
    // Every JSON object in the CLI outputs that carries both norms.
    std::function<void(const nlohmann::json&)> walk = [&](const nlohmann::json& j) {
        if (j.is_object() && j.contains("l2_inside") && j.contains("l2_outside"))
            check(j["l2_inside"].get<double>(), j["l2_outside"].get<double>());
        if (j.is_structured())
            for (const auto& e : j) walk(e);
    };
    for (const auto& run : g_cli_runs)
        for (const auto& [name, bytes] : run)
            if (fs::path(name).extension() == ".json") walk(nlohmann::json::parse(bytes));
    return {n > 0 && worst <= kPythagorasTol, std::to_string(n) + " modes, worst |in^2 + out^2 - 1| " + fmt("%.1e", worst)};
}

Outcome guarded(const std::function<Outcome()>& f) {
    try {
        return f();
    } catch (const std::exception& e) {
        return {false, std::string("exception: ") + e.what()};
    }
}

}  // namespace

int main() {
    std::map<int, Outcome> out;
    out[1] = guarded(square_spectrum);
    out[2] = guarded(disc_spectrum);
    out[4] = guarded(symmetry_classification);
    out[5] = guarded(localization_sweep);
    out[6] = guarded(power_law_round_trip);
    out[7] = guarded(symmetry_breaking);
    out[8] = guarded(whispering_gallery);
    out[9] = guarded(determinism);
    out[3] = guarded(element_exactness);
    out[10] = guarded(pythagorean);
    int failed = 0;
    for (const auto& [id, o] : out) {
        std::printf("Criterion %d: %s  %s\n", id, o.pass ? "PASS" : "FAIL", o.detail.c_str());
        failed += !o.pass;
    }
    std::printf("%d of %zu criteria passed\n", static_cast<int>(out.size()) - failed, out.size());
    return failed ? 1 : 0;
}

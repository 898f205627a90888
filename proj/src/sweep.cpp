#include "eigenlocal/sweep.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <optional>
#include <thread>

#include <json.hpp>

#include "eigenlocal/errors.hpp"

namespace eigenlocal {

namespace {

std::string fmt_h(double h) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6g", h);
    return buf;
}

}  // namespace

PowerLawFit fit_power_law(const std::vector<std::pair<double, double>>& points) {
    if (points.size() < 3) {
        throw ArityError("power-law fit needs at least 3 points, got " + std::to_string(points.size()));
    }
    for (const auto& [x, y] : points) {
        if (!(x > 0.0) || !(y > 0.0) || !std::isfinite(x) || !std::isfinite(y)) {
            throw DomainError("power-law fit needs strictly positive finite points");
        }
    }
    const double n = static_cast<double>(points.size());
    double mx = 0.0, my = 0.0;
    for (const auto& [x, y] : points) {
        mx += std::log(x);
        my += std::log(y);
    }
    mx /= n;
    my /= n;
    double sxx = 0.0, sxy = 0.0, syy = 0.0;
    for (const auto& [x, y] : points) {
        const double dx = std::log(x) - mx, dy = std::log(y) - my;
        sxx += dx * dx;
        sxy += dx * dy;
        syy += dy * dy;
    }
    if (!(sxx > 0.0)) throw DomainError("power-law fit needs distinct x values");
    for (std::size_t i = 0; i < points.size(); ++i)
        for (std::size_t j = i + 1; j < points.size(); ++j)
            if (points[i].first == points[j].first) throw DomainError("power-law fit needs distinct x values");

    PowerLawFit fit;
    fit.b = sxy / sxx;
    fit.a = std::exp(my - fit.b * mx);
    double ss_res = 0.0;
    for (const auto& [x, y] : points) {
        const double r = std::log(y) - (my + fit.b * (std::log(x) - mx));
        ss_res += r * r;
    }
    // Constant data is fitted exactly by b = 0.
    fit.r2 = syy > 0.0 ? 1.0 - ss_res / syy : 1.0;
    return fit;
}

std::string format_power_law(const PowerLawFit& fit) {
    char buf[96];
    std::snprintf(buf, sizeof buf, "y = %.4gx^%.4g", fit.a, fit.b);
    return buf;
}

std::vector<double> default_h_list() {
    std::vector<double> hs;
    for (int i = 4; i >= 0; --i) hs.push_back(0.05 * std::pow(4.0, i / 4.0));
    hs.front() = 0.2;
    hs.back() = 0.05;
    return hs;
}

unsigned thread_cap() {
    unsigned cap = std::max(1u, std::thread::hardware_concurrency());
    if (const char* env = std::getenv("EIGENLOCAL_THREADS")) {
        char* end = nullptr;
        const long v = std::strtol(env, &end, 10);
        if (end != env && v >= 1) cap = static_cast<unsigned>(v);
    }
    return cap;
}

std::vector<std::size_t> localized_skew_modes(const DomainSolution& sol) {
    std::vector<std::size_t> cols;
    for (std::size_t j = 0; j < sol.reports.size(); ++j) {
        const auto& r = sol.reports[j];
        if (r.parity == Parity::Skew && r.l2_outside * r.l2_outside < 0.5) cols.push_back(j);
    }
    std::stable_sort(cols.begin(), cols.end(), [&](std::size_t a, std::size_t b) {
        return sol.reports[a].eigenvalue < sol.reports[b].eigenvalue;
    });
    return cols;
}

std::vector<double> mode_overlaps(const DomainSolution& from, std::size_t mode, const DomainSolution& to) {
    const Eigen::VectorXd src = from.basis.eigenvectors.col(static_cast<Eigen::Index>(mode));
    const std::vector<double> w = interpolate_p1(from.mesh, std::vector<double>(src.data(), src.data() + src.size()),
                                                 to.mesh, OutsidePolicy::NearestTriangle);
    const Eigen::Map<const Eigen::VectorXd> wv(w.data(), static_cast<Eigen::Index>(w.size()));
    const Eigen::VectorXd Mw = to.system.M * Eigen::VectorXd(wv);
    const double wnorm = std::sqrt(std::max(0.0, wv.dot(Mw)));
    std::vector<double> out(static_cast<std::size_t>(to.basis.eigenvectors.cols()), 0.0);
    if (!(wnorm > 0.0)) return out;
    for (Eigen::Index j = 0; j < to.basis.eigenvectors.cols(); ++j) {
        out[static_cast<std::size_t>(j)] = std::abs(to.basis.eigenvectors.col(j).dot(Mw)) / wnorm;
    }
    return out;
}

std::vector<SweepResult> run_sweeps(const SweepOptions& options) {
    const auto& hs = options.h_list;
    if (hs.empty()) throw ArityError("sweep needs at least one h value");
    for (std::size_t i = 0; i < hs.size(); ++i) {
        const double hmax = max_aperture(options.family);
        if (!(hs[i] > 0.0) || !(hs[i] < hmax)) {
            throw ParameterError("h = " + fmt_h(hs[i]) + " outside (0, " + fmt_h(hmax) + ") for " +
                                 std::string(to_string(options.family)));
        }
        for (std::size_t j = 0; j < i; ++j)
            if (hs[j] == hs[i]) throw ValidationError("h_list has repeated value " + fmt_h(hs[i]));
    }
    const bool increasing = hs.size() < 2 || hs[1] > hs[0];
    for (std::size_t i = 1; i < hs.size(); ++i) {
        if ((hs[i] > hs[i - 1]) != increasing) throw ValidationError("h_list must be monotone");
    }
    if (options.mode_selectors.empty()) throw ArityError("sweep needs at least one mode selector");
    for (std::size_t s : options.mode_selectors)
        if (s == 0) throw ParameterError("mode selector is a 1-based skew rank, got 0");
    if (hs.size() < 3) {
        // Fail before the expensive solves; the fit would reject it anyway.
        throw ArityError("power-law fit needs at least 3 points, got " + std::to_string(hs.size()));
    }

    std::vector<std::optional<DomainSolution>> sols(hs.size());
    std::vector<std::exception_ptr> errors(hs.size());
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i; (i = next.fetch_add(1)) < hs.size();) {
            try {
                const DomainSpec spec = build_two_room_domain(options.family, hs[i]);
                sols[i] = solve_domain(spec, options.solve);
            } catch (...) {
                errors[i] = std::current_exception();
            }
        }
    };
    const unsigned nthreads = static_cast<unsigned>(std::min<std::size_t>(std::max(1u, options.threads), hs.size()));
    if (nthreads == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (unsigned t = 0; t < nthreads; ++t) pool.emplace_back(worker);
        for (auto& t : pool) t.join();
    }

    if (errors[0]) std::rethrow_exception(errors[0]);
    const DomainSolution& first = *sols[0];
    const std::vector<std::size_t> skew = localized_skew_modes(first);

    std::vector<SweepResult> results;
    std::vector<std::size_t> current;
    for (std::size_t s = 0; s < options.mode_selectors.size(); ++s) {
        const std::size_t rank = options.mode_selectors[s];
        if (rank > skew.size()) {
            throw TrackingError("requested skew mode " + std::to_string(rank) + " but only " +
                                std::to_string(skew.size()) + " localized skew modes exist at h = " + fmt_h(hs[0]) +
                                " among the first " + std::to_string(options.solve.k));
        }
        SweepResult r;
        r.family = options.family;
        r.mode.parity = Parity::Skew;
        r.mode.skew_rank = rank;
        r.mode.reference_eigenvalue = first.reports[skew[rank - 1]].eigenvalue;
        r.reports.push_back(first.reports[skew[rank - 1]]);
        if (options.on_report) options.on_report(s, r.reports.back());
        results.push_back(std::move(r));
        current.push_back(skew[rank - 1]);
    }

    for (std::size_t i = 1; i < hs.size(); ++i) {
        if (errors[i]) std::rethrow_exception(errors[i]);
        for (std::size_t s = 0; s < results.size(); ++s) {
            const std::vector<double> ov = mode_overlaps(*sols[i - 1], current[s], *sols[i]);
            const auto best = std::max_element(ov.begin(), ov.end());
            if (best == ov.end() || *best < kMinOverlap) {
                char buf[160];
                std::snprintf(buf, sizeof buf, "lost track of skew mode %zu between h = %s and h = %s (best overlap %.4f)",
                              results[s].mode.skew_rank, fmt_h(hs[i - 1]).c_str(), fmt_h(hs[i]).c_str(),
                              best == ov.end() ? 0.0 : *best);
                throw TrackingError(buf);
            }
            current[s] = static_cast<std::size_t>(best - ov.begin());
            results[s].overlaps.push_back(*best);
            results[s].reports.push_back(sols[i]->reports[current[s]]);
            if (options.on_report) options.on_report(s, results[s].reports.back());
        }
    }

    for (auto& r : results) {
        std::vector<std::pair<double, double>> l2, linf;
        for (const auto& rep : r.reports) {
            l2.emplace_back(rep.h, rep.l2_outside);
            linf.emplace_back(rep.h, rep.linf_outside);
        }
        r.l2_fit = fit_power_law(l2);
        r.linf_fit = fit_power_law(linf);
    }
    return results;
}

SweepResult run_sweep(DomainFamily family, const std::vector<double>& h_list, std::size_t mode_selector,
                      const SolveOptions& solve, unsigned threads) {
    SweepOptions o;
    o.family = family;
    o.h_list = h_list;
    o.mode_selectors = {mode_selector};
    o.solve = solve;
    o.threads = threads;
    return run_sweeps(o).front();
}

std::string emit_summary_table(const std::vector<SweepResult>& results) {
    if (results.empty()) throw ArityError("summary table needs at least one sweep result");
    std::vector<std::string> head, l2, linf;
    std::size_t width = 0;
    for (const auto& r : results) {
        head.push_back("Eigfcn " + std::to_string(r.reports.empty() ? 0 : r.reports.front().mode_index));
        l2.push_back(format_power_law(r.l2_fit));
        linf.push_back(format_power_law(r.linf_fit));
        width = std::max({width, head.back().size(), l2.back().size(), linf.back().size()});
    }
    // Both row labels are 15 glyphs wide; the superscript and infinity are multibyte.
    const std::string blank(15, ' ');
    auto row = [&](const std::string& label, const std::vector<std::string>& cells) {
        std::string line = label;
        for (const auto& c : cells) line += "  " + c + std::string(width - c.size(), ' ');
        while (!line.empty() && line.back() == ' ') line.pop_back();
        return line + "\n";
    };
    std::string out = "Summary Table: " + std::string(to_string(results.front().family)) + " Domain\n";
    out += row(blank, head);
    out += row("L² Localization", l2);
    out += row("L∞ Localization", linf);
    return out;
}

std::string sweep_csv(const std::vector<SweepResult>& results) {
    std::string out = std::string(kCsvHeader) + "\n";
    for (const auto& r : results)
        for (const auto& rep : r.reports) out += csv_row(rep) + "\n";
    return out;
}

std::string sweep_to_json(const std::vector<SweepResult>& results) {
    nlohmann::ordered_json arr = nlohmann::ordered_json::array();
    for (const auto& r : results) {
        nlohmann::ordered_json j;
        j["family"] = std::string(to_string(r.family));
        j["mode"] = {{"parity", std::string(to_string(r.mode.parity))},
                     {"skew_rank", r.mode.skew_rank},
                     {"reference_eigenvalue", r.mode.reference_eigenvalue}};
        nlohmann::ordered_json reps = nlohmann::ordered_json::array();
        for (const auto& rep : r.reports) {
            reps.push_back({{"mode", rep.mode_index},
                            {"h", rep.h},
                            {"lambda", rep.eigenvalue},
                            {"parity", std::string(to_string(rep.parity))},
                            {"skew_ratio", rep.skew_ratio},
                            {"l2_outside", rep.l2_outside},
                            {"linf_outside", rep.linf_outside},
                            {"l2_inside", rep.l2_inside}});
        }
        j["reports"] = std::move(reps);
        j["overlaps"] = r.overlaps;
        j["l2_fit"] = {{"a", r.l2_fit.a}, {"b", r.l2_fit.b}, {"r2", r.l2_fit.r2}};
        j["linf_fit"] = {{"a", r.linf_fit.a}, {"b", r.linf_fit.b}, {"r2", r.linf_fit.r2}};
        arr.push_back(std::move(j));
    }
    return arr.dump(2);
}

}  // namespace eigenlocal

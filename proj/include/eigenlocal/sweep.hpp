#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "eigenlocal/geometry.hpp"
#include "eigenlocal/localization.hpp"
#include "eigenlocal/pipeline.hpp"

namespace eigenlocal {

/// y = a x^b fitted by least squares on (log x, log y).
struct PowerLawFit {
    double a = 0.0;
    double b = 0.0;
    double r2 = 0.0;
};

/// Needs at least three points with x > 0, y > 0 and distinct x. Throws
/// ArityError or DomainError.
PowerLawFit fit_power_law(const std::vector<std::pair<double, double>>& points);

/// "y = {a:.4g}x^{b:.4g}", e.g. "y = 11.25x^3.909".
std::string format_power_law(const PowerLawFit& fit);

struct ModeDescriptor {
    Parity parity = Parity::Skew;
    std::size_t skew_rank = 1;        // 1-based rank among localized skew modes at the first h
    double reference_eigenvalue = 0.0;  // eigenvalue of the tracked mode at the first h
};

struct SweepResult {
    DomainFamily family = DomainFamily::DiamondBox;
    ModeDescriptor mode;
    std::vector<LocalizationReport> reports;  // one per h, in h_list order
    std::vector<double> overlaps;             // overlap between consecutive h, size reports - 1
    PowerLawFit l2_fit;
    PowerLawFit linf_fit;
};

inline constexpr double kMinOverlap = 0.9;

struct SweepOptions {
    DomainFamily family = DomainFamily::DiamondBox;
    std::vector<double> h_list;
    std::vector<std::size_t> mode_selectors{1};  // skew ranks to track
    SolveOptions solve;
    unsigned threads = 1;
    /// Called with each tracked report as soon as tracking reaches it.
    std::function<void(std::size_t selector_index, const LocalizationReport&)> on_report;
};

/// Five values logarithmically spaced in [0.05, 0.2], largest first.
std::vector<double> default_h_list();

/// Solves every h (in parallel up to `threads`), picks the selected skew
/// modes at the first h and tracks them through the list by M-weighted
/// overlap after P1 interpolation. Throws TrackingError naming the h pair
/// when the best overlap drops below 0.9.
std::vector<SweepResult> run_sweeps(const SweepOptions& options);

SweepResult run_sweep(DomainFamily family, const std::vector<double>& h_list, std::size_t mode_selector,
                      const SolveOptions& solve, unsigned threads = 1);

/// Localized skew modes (l2_outside^2 < 1/2) in ascending eigenvalue order,
/// as 0-based columns of the solution.
std::vector<std::size_t> localized_skew_modes(const DomainSolution& sol);

/// |<w, v_j>_M| / |w|_M for every column v_j of `to` (M-normalized), where w
/// is `mode` of `from` interpolated onto `to`'s mesh.
std::vector<double> mode_overlaps(const DomainSolution& from, std::size_t mode, const DomainSolution& to);

/// Plain-text table with one "Eigfcn N" column per result and the rows
/// "L² Localization" and "L∞ Localization". Throws ArityError when empty.
std::string emit_summary_table(const std::vector<SweepResult>& results);

/// Header plus one row per (mode, h) in result order.
std::string sweep_csv(const std::vector<SweepResult>& results);

std::string sweep_to_json(const std::vector<SweepResult>& results);

/// Number of worker threads allowed by EIGENLOCAL_THREADS (at least 1).
unsigned thread_cap();

}  // namespace eigenlocal

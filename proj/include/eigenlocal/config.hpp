#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "eigenlocal/geometry.hpp"
#include "eigenlocal/pipeline.hpp"

namespace eigenlocal {

/// Resolved settings for one command-line run.
struct RunConfig {
    DomainFamily family = DomainFamily::DiamondBox;
    std::optional<double> h;
    std::vector<double> h_list;  // empty means the default sweep
    double target_edge = 0.02;
    std::size_t k = 12;
    double tol = kDefaultTol;
    std::uint64_t seed = 1;
    std::vector<std::size_t> mode_selector{1};
    Boundary boundary = Boundary::Neumann;
    std::string output_dir = "out";
    std::string input_dir;            // render: directory holding eigs.json and mesh.json
    std::vector<std::size_t> modes;   // render: 1-based mode indices

    SolveOptions solve_options() const;
    std::vector<double> sweep_h_list() const;
};

/// Overlays the keys of a JSON object onto `base`. Unknown keys and wrong
/// types raise ValidationError.
RunConfig apply_config_json(const std::string& text, RunConfig base = {});

/// Every field, so a run can be reproduced from it.
std::string config_to_json(const RunConfig& cfg);

/// Checks h against the family bound and the other scalar preconditions.
void validate_for_eigs(const RunConfig& cfg);
void validate_for_sweep(const RunConfig& cfg);

}  // namespace eigenlocal

#include <gtest/gtest.h>
#include <json.hpp>

#include "eigenlocal/config.hpp"
#include "eigenlocal/errors.hpp"

using namespace eigenlocal;

TEST(Config, DefaultsAndOverlay) {
    const RunConfig c = apply_config_json(R"({"family": "DiscBox", "h": 0.1, "k": 20, "seed": 7})");
    EXPECT_EQ(c.family, DomainFamily::DiscBox);
    EXPECT_DOUBLE_EQ(*c.h, 0.1);
    EXPECT_EQ(c.k, 20u);
    EXPECT_EQ(c.seed, 7u);
    EXPECT_DOUBLE_EQ(c.target_edge, 0.02);
    EXPECT_EQ(c.boundary, Boundary::Neumann);
    EXPECT_EQ(c.mode_selector, std::vector<std::size_t>{1});
    const SolveOptions o = c.solve_options();
    EXPECT_EQ(o.k, 20u);
    EXPECT_EQ(o.seed, 7u);
}

TEST(Config, ModeSelectorIntOrArray) {
    EXPECT_EQ(apply_config_json(R"({"mode_selector": 3})").mode_selector, std::vector<std::size_t>{3});
    EXPECT_EQ(apply_config_json(R"({"mode_selector": [1, 2]})").mode_selector, (std::vector<std::size_t>{1, 2}));
    EXPECT_EQ(apply_config_json(R"({"modes": [4, 5]})").modes, (std::vector<std::size_t>{4, 5}));
}

TEST(Config, StrictKeysAndTypes) {
    EXPECT_THROW(apply_config_json(R"({"hh": 0.1})"), ValidationError);
    EXPECT_THROW(apply_config_json(R"({"h": "0.1"})"), ValidationError);
    EXPECT_THROW(apply_config_json(R"({"k": -3})"), ValidationError);
    EXPECT_THROW(apply_config_json(R"({"k": 2.5})"), ValidationError);
    EXPECT_THROW(apply_config_json(R"({"family": "Triangle"})"), ValidationError);
    EXPECT_THROW(apply_config_json(R"({"boundary": "Robin"})"), ValidationError);
    EXPECT_THROW(apply_config_json(R"({"h_list": 0.1})"), ValidationError);
    EXPECT_THROW(apply_config_json(R"([1, 2])"), ValidationError);
    EXPECT_THROW(apply_config_json("{not json"), ValidationError);
}

TEST(Config, RoundTrip) {
    RunConfig c;
    c.family = DomainFamily::RoomsAndPassage;
    c.h = 0.125;
    c.h_list = {0.2, 0.1, 0.05};
    c.k = 16;
    c.tol = 1e-9;
    c.seed = 42;
    c.mode_selector = {1, 2};
    c.boundary = Boundary::Dirichlet;
    c.output_dir = "runs/a";
    c.modes = {3};
    const std::string text = config_to_json(c);
    const RunConfig back = apply_config_json(text);
    EXPECT_EQ(config_to_json(back), text);
    EXPECT_EQ(back.boundary, Boundary::Dirichlet);
    EXPECT_EQ(back.h_list, c.h_list);
}

TEST(Config, EigsValidation) {
    RunConfig c;
    EXPECT_THROW(validate_for_eigs(c), ValidationError);
    c.h = 0.1;
    EXPECT_NO_THROW(validate_for_eigs(c));
    c.h = 0.9;
    try {
        validate_for_eigs(c);
        FAIL();
    } catch (const ParameterError& e) {
        EXPECT_NE(std::string(e.what()).find("DiamondBox"), std::string::npos);
        EXPECT_EQ(e.kind(), ErrorKind::Validation);
    }
    c.h = 0.1;
    c.tol = 1e-2;
    EXPECT_THROW(validate_for_eigs(c), ParameterError);
    c.tol = 1e-8;
    c.k = 0;
    EXPECT_THROW(validate_for_eigs(c), ParameterError);
}

TEST(Config, SweepValidation) {
    RunConfig c;
    EXPECT_NO_THROW(validate_for_sweep(c));
    EXPECT_EQ(c.sweep_h_list().size(), 5u);
    c.h_list = {0.2, 0.1};
    EXPECT_THROW(validate_for_sweep(c), ArityError);
    c.h_list = {0.2, 0.1, 0.8};
    EXPECT_THROW(validate_for_sweep(c), ParameterError);
}

#include <catch2/catch_amalgamated.hpp>

#include "gaugelens/config.hpp"

using gaugelens::Config;

TEST_CASE("config parses sections, comments, and scalar types") {
    const Config c = Config::from_string(
        "# leading comment\n"
        "top = 1\n"
        "[grid]\n"
        "n_xi = 256\n"
        "xi_min = -3pi   ; trailing note\n"
        "xi_max = 1.5pi\n"
        "[run]\n"
        "dtau = 1e-4\n"
        "absorber = true\n"
        "name = wall_scan\n",
        "<test>");

    CHECK(c.get_int("top") == 1);
    CHECK(c.get_int("grid.n_xi") == 256);
    CHECK(c.get_double("grid.xi_min") == Catch::Approx(-3.0 * gaugelens::pi));
    CHECK(c.get_double("grid.xi_max") == Catch::Approx(1.5 * gaugelens::pi));
    CHECK(c.get_double("run.dtau") == Catch::Approx(1e-4));
    CHECK(c.get_bool("run.absorber"));
    CHECK(c.get_string("run.name") == "wall_scan");
}

TEST_CASE("config lists, defaults, and missing keys") {
    const Config c = Config::from_string(
        "[sweep]\n"
        "phi_list = 6, 3, 1\n"
        "one = 2pi\n",
        "<test>");

    const auto xs = c.get_double_list("sweep.phi_list");
    REQUIRE(xs.size() == 3);
    CHECK(xs[0] == 6.0);
    CHECK(xs[2] == 1.0);
    CHECK(c.get_double_list("sweep.one").size() == 1);

    CHECK(c.get_double("sweep.absent", 7.5) == 7.5);
    CHECK(c.get_int("sweep.absent", -2) == -2);
    CHECK(c.get_string("sweep.absent", "x") == "x");
    CHECK_FALSE(c.has("sweep.absent"));
    CHECK_THROWS_AS(c.get_double("sweep.absent"), std::out_of_range);
    CHECK_THROWS(c.get_double("sweep.phi_list"));  // not a scalar
}

TEST_CASE("config last assignment wins and dump round-trips") {
    Config c = Config::from_string(
        "[model]\n"
        "delta = 10\n"
        "delta = 200\n"
        "beta = 2\n",
        "<test>");
    CHECK(c.get_double("model.delta") == 200.0);

    c.set("model.beta", "4");
    c.set("extra.note", "added later");
    const Config back = Config::from_string(c.dump(), "<dump>");
    CHECK(back.get_double("model.delta") == 200.0);
    CHECK(back.get_double("model.beta") == 4.0);
    CHECK(back.get_string("extra.note") == "added later");
    CHECK(back.entries().size() == c.entries().size());
}

TEST_CASE("config rejects malformed input") {
    CHECK_THROWS_AS(Config::from_string("[unclosed\nx = 1\n", "<t>"),
                    std::invalid_argument);
    CHECK_THROWS_AS(Config::from_string("just a bare word\n", "<t>"),
                    std::invalid_argument);
    const Config c = Config::from_string("v = 12x\n", "<t>");
    CHECK_THROWS(c.get_double("v"));  // parses as string, not as a number
}

#include <catch2/catch_amalgamated.hpp>

#include <variant>

#include "sinkdiff/csv.hpp"
#include "sinkdiff/run_config.hpp"

using namespace sinkdiff;
using Catch::Approx;

namespace {

const char* kExample = R"(
# constant-sink reference run
diffusion_coefficient = 1.0
sink.type = constant
sink.k0 = 1.0
ic.type = delta
ic.x0 = -1.0
grid.t_max = 4.0
grid.n_steps = 4096
grid.half_width = 12.0
grid.n_points = 961
method = volterra
tolerances.cross_method = 1e-3
tolerances.balance = 1e-5
tolerances.fd = 0.01
)";

}  // namespace

TEST_CASE("config parses the documented schema") {
    const auto c = parse_config_text(kExample);
    REQUIRE(c.diffusion_coefficient == 1.0);
    REQUIRE(c.sink_type == "constant");
    REQUIRE(c.sink_k0 == 1.0);
    REQUIRE(c.ic_type == "delta");
    REQUIRE(c.ic_x0 == -1.0);
    REQUIRE(c.grid_n_steps == 4096);
    REQUIRE(c.method == "volterra");
    REQUIRE(validate_config(c).empty());

    const auto p = make_problem(c);
    REQUIRE(std::holds_alternative<ConstantSink>(p.sink));
    REQUIRE(validate_problem(p).empty());
}

TEST_CASE("config round-trips through its canonical serialization") {
    auto c = parse_config_text(kExample);
    c.diffusion_coefficient = 0.1;  // not exactly representable, exercises %.17g
    c.sink_k0 = 1.0 / 3.0;
    REQUIRE(parse_config_text(to_config_text(c)) == c);

    RunConfig tab;
    tab.sink_type = "tabulated";
    tab.sink_times = {0.0, 0.3333333333333333, 2.0};
    tab.sink_values = {1.0, 0.25, 0.0};
    tab.ic_type = "tabulated";
    tab.ic_xs = {-2.0, -1.0, 0.0};
    tab.ic_densities = {0.0, 1.0, 0.0};
    REQUIRE(parse_config_text(to_config_text(tab)) == tab);
}

TEST_CASE("config parse errors") {
    REQUIRE_THROWS_AS(parse_config_text("nonsense.key = 1\n"), parse_error);
    REQUIRE_THROWS_AS(parse_config_text("diffusion_coefficient = abc\n"), parse_error);
    REQUIRE_THROWS_AS(parse_config_text("grid.n_steps = 1.5\n"), parse_error);
    REQUIRE_THROWS_AS(parse_config_text("just a line\n"), parse_error);
    REQUIRE_THROWS_AS(parse_config_text("method =\n"), parse_error);
    REQUIRE_THROWS_AS(parse_config_file("/nonexistent/path.cfg"), parse_error);
    REQUIRE_THROWS_AS(make_problem([] {
                          RunConfig c;
                          c.sink_type = "quartic";
                          return c;
                      }()),
                      parse_error);
}

TEST_CASE("method compatibility matrix") {
    REQUIRE(method_supports("volterra", "tabulated"));
    REQUIRE(method_supports("fdoracle", "inverse_time"));
    REQUIRE(method_supports("analytic", "constant"));
    REQUIRE(method_supports("analytic", "inverse_time"));
    REQUIRE_FALSE(method_supports("analytic", "linear"));
    REQUIRE_FALSE(method_supports("analytic", "exponential"));
    REQUIRE(method_supports("laplace", "linear"));
    REQUIRE(method_supports("laplace", "exponential"));
    REQUIRE_FALSE(method_supports("laplace", "inverse_time"));
    REQUIRE_FALSE(method_supports("laplace", "tabulated"));

    auto c = parse_config_text(kExample);
    c.method = "analytic";
    c.sink_type = "linear";
    c.sink_alpha = 1.0;
    const auto issues = validate_config(c);
    REQUIRE(issues.size() == 1);
}

TEST_CASE("grid validation") {
    auto c = parse_config_text(kExample);
    c.grid_n_points = 960;  // even
    REQUIRE_FALSE(validate_config(c).empty());
    c.grid_n_points = 961;
    c.grid_n_steps = 1;
    REQUIRE_FALSE(validate_config(c).empty());
    c.grid_n_steps = 4096;
    c.grid_t_max = -1.0;
    REQUIRE_FALSE(validate_config(c).empty());
}

TEST_CASE("csv formatting carries 17 significant digits deterministically") {
    REQUIRE(format_g17(1.0) == "1");
    REQUIRE(format_g17(0.1) == "0.10000000000000001");
    REQUIRE(format_g17(1.0 / 3.0) == "0.33333333333333331");
    // round-trip through text is exact
    for (double v : {0.1, 1.0 / 3.0, 2.7182818284590452, 1e-300, -6.02214076e23}) {
        const double back = std::stod(format_g17(v));
        REQUIRE(back == v);
    }
}

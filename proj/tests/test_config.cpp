#include <doctest.h>

#include <algorithm>
#include <numbers>

#include "phonon_gauge/config.hpp"
#include "phonon_gauge/errors.hpp"

using namespace phonon_gauge;
using std::numbers::pi;

namespace {

std::vector<ConfigIssue> issues_of(const std::string& text) {
    try {
        parse_config(text);
    } catch (const ConfigError& e) {
        return e.issues();
    }
    return {};
}

bool has_issue(const std::vector<ConfigIssue>& issues, const std::string& path, const std::string& fragment) {
    return std::any_of(issues.begin(), issues.end(), [&](const ConfigIssue& i) {
        return i.path == path && i.reason.find(fragment) != std::string::npos;
    });
}

}  // namespace

TEST_CASE("preset name alone fills the link defaults") {
    const auto cfg = parse_config("experiment = fig2b_link_scan\n");
    CHECK(cfg.format == "csv");
    CHECK(cfg.real("trap.gradient") == 0.05);
    CHECK(cfg.real("laser.lamb_dicke") == 0.2);
    CHECK(cfg.real("laser.rabi") == 0.75);
    CHECK(cfg.real("coulomb.beta") == 0.002);
    CHECK(cfg.integer("drive.order") == 1);
    CHECK(cfg.integer("numerics.n_max") == 4);
    CHECK(cfg.integer("scan.points") == 21);
    CHECK(cfg.real("scan.phase_max") == 2 * pi);
    CHECK(cfg.supplied.empty());
}

TEST_CASE("plaquette defaults follow the flux choice") {
    const auto pi_flux = parse_config("experiment = fig2cd_plaquette\n");
    CHECK(pi_flux.real("drive.phase_y") == pi);
    CHECK(pi_flux.real("laser.rabi") == 0.25);
    CHECK(pi_flux.integer("numerics.n_max") == 2);
    CHECK(pi_flux.real("geometry.aspect_exponent") == doctest::Approx(1.0 / 3.0));

    const auto zero = parse_config("experiment = fig2cd_plaquette\nplaquette.flux = 0\n");
    CHECK(zero.real("drive.phase_y") == 0.0);
    CHECK(zero.real("laser.rabi") == 0.75);

    const auto custom_rabi = parse_config("experiment = fig2cd_plaquette\nplaquette.flux = 0\nlaser.rabi = 0.5\n");
    CHECK(custom_rabi.real("laser.rabi") == 0.5);
    CHECK(custom_rabi.supplied.size() == 2);
}

TEST_CASE("empty document lists the required key") {
    const auto issues = issues_of("");
    REQUIRE(issues.size() == 1);
    CHECK(issues[0].path == "experiment");
    CHECK(issues[0].reason.find("missing required key") != std::string::npos);
    CHECK(issues[0].reason.find("fig2b_link_scan") != std::string::npos);
}

TEST_CASE("range violations carry their path") {
    const auto issues = issues_of("experiment = fig2b_link_scan\nnumerics.n_max = -1\n");
    CHECK(has_issue(issues, "numerics.n_max", "out of range"));
}

TEST_CASE("every violation is reported") {
    const auto issues = issues_of(
        "experiment = fig2b_link_scan\n"
        "numerics.n_max = -1\n"
        "laser.rabi = fast\n"
        "laser.colour = green\n"
        "model.counter_rotating = maybe\n"
        "no equals sign\n"
        "trap.gradient = 0.05\n"
        "trap.gradient = 0.06\n");
    CHECK(issues.size() == 6);
    CHECK(has_issue(issues, "numerics.n_max", "out of range"));
    CHECK(has_issue(issues, "laser.rabi", "real number"));
    CHECK(has_issue(issues, "laser.colour", "unknown key"));
    CHECK(has_issue(issues, "model.counter_rotating", "true or false"));
    CHECK(has_issue(issues, "line 6", "key = value"));
    CHECK(has_issue(issues, "trap.gradient", "duplicate"));
}

TEST_CASE("unknown experiment and format") {
    CHECK(has_issue(issues_of("experiment = fig9\n"), "experiment", "unknown experiment"));
    CHECK(has_issue(issues_of("experiment = butterfly\noutput.format = xml\n"), "output.format", "csv json"));
    CHECK(parse_config("experiment = butterfly\noutput.format = json # inline comment\n").format == "json");
}

TEST_CASE("custom runs require every key") {
    const auto issues = issues_of("experiment = custom\n");
    CHECK(has_issue(issues, "array.layout", "missing required key"));
    CHECK(has_issue(issues, "numerics.t_final", "missing required key"));
    CHECK(has_issue(issues, "drive.mode", "missing required key"));
    CHECK(issues.size() == experiment_schema("custom", "cosine").size() - 1);

    const auto mismatch = issues_of(preset_document("custom") + "drive.strength = 0.5\n");
    CHECK(has_issue(mismatch, "drive.strength", "drive.mode"));
}

TEST_CASE("preset documents parse back to the same values") {
    for (const auto& name : experiment_names()) {
        const auto doc = preset_document(name);
        const auto cfg = parse_config(doc);
        CHECK(cfg.experiment == name);
        if (name != "custom") {
            CHECK(cfg.values == parse_config("experiment = " + name + "\n").values);
        }
    }
}

TEST_CASE("reals accept multiples of pi and fractions") {
    CHECK(*parse_real("pi") == pi);
    CHECK(*parse_real("-pi") == -pi);
    CHECK(*parse_real("2pi") == 2 * pi);
    CHECK(*parse_real("0.5*pi") == 0.5 * pi);
    CHECK(*parse_real("pi/2") == pi / 2);
    CHECK(*parse_real("1/3") == 1.0 / 3.0);
    CHECK(*parse_real("1e-6") == 1e-6);
    CHECK(*parse_real("+3") == 3.0);
    CHECK_FALSE(parse_real("").has_value());
    CHECK_FALSE(parse_real("pie").has_value());
    CHECK_FALSE(parse_real("1/0").has_value());
    CHECK_FALSE(parse_real("nan").has_value());
    CHECK_FALSE(parse_real("3 apples").has_value());
}

TEST_CASE("cross-field checks") {
    CHECK(has_issue(issues_of("experiment = fig2a_dressed_map\nmap.eta_min = 3\n"), "map.eta_max", "below"));
    CHECK(has_issue(issues_of("experiment = fig2f_flux_sweep\nsweep.flux_max = 4\n"), "sweep.flux_max", "[-pi, pi]"));
    CHECK(has_issue(issues_of("experiment = butterfly\nlattice.boundary = periodic\n"), "butterfly.alpha_points", "divide"));
    CHECK_NOTHROW(parse_config("experiment = butterfly\nlattice.boundary = periodic\nbutterfly.alpha_points = 13\n"));
}

TEST_CASE("value formatting") {
    CHECK(format_value(ConfigValue{true}) == "true");
    CHECK(format_value(ConfigValue{std::int64_t{4}}) == "4");
    CHECK(format_value(ConfigValue{0.1}) == "0.10000000000000001");
    CHECK(format_value(ConfigValue{std::string("open")}) == "open");
}

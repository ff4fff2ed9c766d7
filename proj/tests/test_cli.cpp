#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

#include "oracles.hpp"
#include "phonon_gauge/config.hpp"

namespace fs = std::filesystem;

namespace {

const fs::path kScratch = PG_SCRATCH_DIR;

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

fs::path write_config(const std::string& name, const std::string& text) {
    fs::create_directories(kScratch);
    const fs::path p = kScratch / name;
    std::ofstream(p, std::ios::binary) << text;
    return p;
}

int run(const std::string& args, const std::string& env = "") {
    const std::string cmd = env + (env.empty() ? "" : " ") + "\"" + std::string(PG_CLI_PATH) + "\" " + args +
                            " > \"" + (kScratch / "stdout.txt").string() + "\" 2> \"" +
                            (kScratch / "stderr.txt").string() + "\"";
    fs::create_directories(kScratch);
    const int status = std::system(cmd.c_str());
    return WEXITSTATUS(status);
}

std::string stdout_text() { return slurp(kScratch / "stdout.txt"); }
std::string stderr_text() { return slurp(kScratch / "stderr.txt"); }

const char* kSmallMap =
    "experiment = fig2a_dressed_map\n"
    "map.eta_points = 3\n"
    "map.phase_points = 3\n";

}  // namespace

TEST_CASE("preset listing") {
    CHECK(run("preset --list") == 0);
    const auto out = stdout_text();
    for (const auto& name : phonon_gauge::experiment_names()) CHECK(out.find(name) != std::string::npos);
    CHECK(run("preset --show fig2b_link_scan") == 0);
    CHECK(stdout_text().find("laser.rabi = 0.75") != std::string::npos);
}

TEST_CASE("dressed map output matches the golden file and the closed form") {
    const auto cfg = write_config("map.cfg", kSmallMap);
    const fs::path out = kScratch / "map";
    fs::remove_all(out);
    REQUIRE(run("simulate --config \"" + cfg.string() + "\" --out \"" + out.string() + "\"") == 0);
    const std::string csv = slurp(out / "dressed_map.csv");
    CHECK(csv == slurp(fs::path(PG_GOLDEN_DIR) / "dressed_map_3x3.csv"));
    CHECK(csv.find('\r') == std::string::npos);

    std::istringstream lines(csv);
    std::string line;
    std::getline(lines, line);
    CHECK(line == "eta_d,phase_difference,abs_F,re_F,im_F");
    int rows = 0;
    while (std::getline(lines, line)) {
        double eta, phase, abs_f;
        char comma;
        std::istringstream row(line);
        row >> eta >> comma >> phase >> comma >> abs_f;
        CHECK(std::abs(abs_f - std::abs(oracle::bessel_std(1, 2 * eta * std::sin(phase / 2)))) < 1e-12);
        ++rows;
    }
    CHECK(rows == 9);
}

TEST_CASE("manifest records every parameter") {
    const auto cfg = write_config("ladder.cfg", "experiment = fig2e_ladder_spectrum\n");
    const fs::path out = kScratch / "ladder";
    fs::remove_all(out);
    REQUIRE(run("simulate --config \"" + cfg.string() + "\" --out \"" + out.string() + "\" --format json") == 0);
    const auto manifest = nlohmann::json::parse(slurp(out / "manifest.json"));
    CHECK(manifest["experiment"] == "fig2e_ladder_spectrum");
    CHECK(manifest["format"] == "json");
    CHECK(manifest["software"]["version"].is_string());
    CHECK(manifest["wall_clock_seconds"].is_number());
    for (const auto& rule : phonon_gauge::experiment_schema("fig2e_ladder_spectrum")) {
        CHECK(manifest["parameters"].contains(rule.key));
    }
    const auto doc = nlohmann::json::parse(slurp(out / "ladder_spectrum.json"));
    CHECK(doc["spectrum"]["eigenvalues"].size() == 31);
    CHECK(doc["flat_bands"].size() >= 3);
    CHECK(doc["edge_states"].size() >= 2);
}

TEST_CASE("identical configs give bit-identical data") {
    const auto cfg = write_config("sweep.cfg", "experiment = fig2f_flux_sweep\nsweep.points = 9\n");
    const fs::path a = kScratch / "sweep_a";
    const fs::path b = kScratch / "sweep_b";
    fs::remove_all(a);
    fs::remove_all(b);
    REQUIRE(run("simulate --config \"" + cfg.string() + "\" --out \"" + a.string() + "\"") == 0);
    REQUIRE(run("simulate --config \"" + cfg.string() + "\" --out \"" + b.string() + "\" --jobs 3") == 0);
    for (const char* f : {"flux_sweep.csv", "flux_gap.csv"}) {
        CHECK(!slurp(a / f).empty());
        CHECK(slurp(a / f) == slurp(b / f));
    }
}

TEST_CASE("output directory from the environment") {
    const auto cfg = write_config("env.cfg", kSmallMap);
    const fs::path out = kScratch / "from_env";
    fs::remove_all(out);
    REQUIRE(run("simulate --config \"" + cfg.string() + "\"", "PHONON_GAUGE_OUT=\"" + out.string() + "\"") == 0);
    CHECK(fs::exists(out / "dressed_map.csv"));
    CHECK(run("simulate --config \"" + cfg.string() + "\"", "env -u PHONON_GAUGE_OUT") == 1);
}

TEST_CASE("config and geometry errors exit with 1") {
    const auto bad = write_config("bad.cfg", "experiment = fig2b_link_scan\nnumerics.n_max = -1\n");
    CHECK(run("simulate --config \"" + bad.string() + "\" --out \"" + (kScratch / "bad").string() + "\"") == 1);
    CHECK(stderr_text().find("numerics.n_max") != std::string::npos);

    std::string doc = phonon_gauge::preset_document("custom");
    doc.replace(doc.find("array.nx = 2"), 12, "array.nx = 0");
    const auto empty = write_config("empty.cfg", doc);
    CHECK(run("simulate --config \"" + empty.string() + "\" --out \"" + (kScratch / "empty").string() + "\"") == 1);
    CHECK(stderr_text().find("error") != std::string::npos);

    CHECK(run("simulate --config \"" + (kScratch / "missing.cfg").string() + "\" --out x") == 1);
    CHECK(run("simulate --out x") == 1);
}

TEST_CASE("numerical failure exits with 2") {
    std::string doc = phonon_gauge::preset_document("custom");
    doc.replace(doc.find("numerics.dt = 0"), 15, "numerics.dt = 40");
    const auto cfg = write_config("blowup.cfg", doc);
    CHECK(run("simulate --config \"" + cfg.string() + "\" --out \"" + (kScratch / "blowup").string() + "\"") == 2);
    CHECK(stderr_text().find("dt") != std::string::npos);
}

TEST_CASE("custom run writes populations and couplings") {
    std::string doc = phonon_gauge::preset_document("custom");
    doc.replace(doc.find("numerics.t_final = 2000"), 23, "numerics.t_final = 200");
    const auto cfg = write_config("custom.cfg", doc);
    const fs::path out = kScratch / "custom";
    fs::remove_all(out);
    REQUIRE(run("simulate --config \"" + cfg.string() + "\" --out \"" + out.string() + "\"") == 0);
    const std::string csv = slurp(out / "custom_populations.csv");
    CHECK(csv.rfind("time,P_0,P_1,P_2,P_3,n_0,n_1,n_2,n_3,norm_exact\n", 0) == 0);
    const auto manifest = nlohmann::json::parse(slurp(out / "manifest.json"));
    CHECK(manifest["derived"]["exact_model"] == "laser_exact");
    CHECK(manifest["parameters"].size() == phonon_gauge::experiment_schema("custom", "laser").size());
}

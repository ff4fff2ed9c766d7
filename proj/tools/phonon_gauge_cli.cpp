#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "phonon_gauge/config.hpp"
#include "phonon_gauge/errors.hpp"
#include "phonon_gauge/experiments.hpp"

namespace pg = phonon_gauge;

namespace {

constexpr int kOk = 0;
constexpr int kConfigFailure = 1;
constexpr int kNumericalFailure = 2;

int simulate(const std::string& config_path, std::string out_dir, const std::string& format, unsigned jobs) {
    if (out_dir.empty()) {
        if (const char* env = std::getenv("PHONON_GAUGE_OUT")) out_dir = env;
    }
    if (out_dir.empty()) {
        std::cerr << "error: no output directory (use --out or PHONON_GAUGE_OUT)\n";
        return kConfigFailure;
    }
    std::ifstream in(config_path, std::ios::binary);
    if (!in) {
        std::cerr << "error: cannot read config " << config_path << "\n";
        return kConfigFailure;
    }
    std::ostringstream text;
    text << in.rdbuf();

    try {
        const pg::ExperimentConfig cfg = pg::parse_config(text.str());
        const pg::RunReport report = pg::run_experiment(cfg, {out_dir, format, jobs});
        for (const auto& w : report.warnings) std::cerr << "warning: " << w << "\n";
        for (const auto& f : report.files) std::cout << f.string() << "\n";
        return kOk;
    } catch (const pg::ConfigError& e) {
        for (const auto& issue : e.issues()) std::cerr << "error: " << issue.path << ": " << issue.reason << "\n";
        return kConfigFailure;
    } catch (const pg::IntegrationFailure& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return kNumericalFailure;
    } catch (const pg::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kConfigFailure;
    } catch (const std::exception& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return kNumericalFailure;
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Photon-assisted phonon tunneling in microtrap arrays"};
    app.set_version_flag("--version", pg::version());
    app.require_subcommand(1);

    auto* sim = app.add_subcommand("simulate", "Run an experiment described by a config file");
    std::string config_path;
    std::string out_dir;
    std::string format;
    unsigned jobs = 1;
    sim->add_option("--config", config_path, "key = value config file")->required();
    sim->add_option("--out", out_dir, "output directory (default: $PHONON_GAUGE_OUT)");
    sim->add_option("--format", format, "csv or json, overrides output.format")
        ->check(CLI::IsMember({"csv", "json"}));
    sim->add_option("--jobs", jobs, "worker threads for sweeps")->check(CLI::Range(1u, 1024u));

    auto* preset = app.add_subcommand("preset", "List experiments or print a preset config");
    bool list = false;
    std::string show;
    preset->add_flag("--list", list, "list experiment names");
    preset->add_option("--show", show, "print the preset document for an experiment")
        ->check(CLI::IsMember(pg::experiment_names()));

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kOk : kConfigFailure;
    }

    if (*sim) return simulate(config_path, out_dir, format, jobs);

    if (!show.empty()) {
        std::cout << pg::preset_document(show);
        return kOk;
    }
    if (list || show.empty()) {
        for (const auto& name : pg::experiment_names()) {
            std::cout << name << "  " << pg::experiment_summary(name) << "\n";
        }
    }
    return kOk;
}

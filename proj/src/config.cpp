#include "phonon_gauge/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <numbers>
#include <set>
#include <sstream>

#include "phonon_gauge/errors.hpp"

namespace phonon_gauge {

namespace {

constexpr double kHuge = 1e300;

struct Entry {
    KeyRule rule;
    std::string preset;  // default for presets, example value for custom
};

KeyRule real_key(std::string key, double min, double max, std::string help, bool exclusive = false) {
    KeyRule r;
    r.key = std::move(key);
    r.kind = ValueKind::real;
    r.min = min;
    r.max = max;
    r.min_exclusive = exclusive;
    r.help = std::move(help);
    return r;
}

KeyRule positive(std::string key, std::string help) { return real_key(std::move(key), 0.0, kHuge, std::move(help), true); }
KeyRule non_negative(std::string key, std::string help) { return real_key(std::move(key), 0.0, kHuge, std::move(help)); }
KeyRule angle(std::string key, std::string help) { return real_key(std::move(key), -kHuge, kHuge, std::move(help)); }

KeyRule int_key(std::string key, double min, double max, std::string help) {
    KeyRule r;
    r.key = std::move(key);
    r.kind = ValueKind::integer;
    r.min = min;
    r.max = max;
    r.help = std::move(help);
    return r;
}

KeyRule bool_key(std::string key, std::string help) {
    KeyRule r;
    r.key = std::move(key);
    r.kind = ValueKind::boolean;
    r.help = std::move(help);
    return r;
}

KeyRule choice_key(std::string key, std::vector<std::string> choices, std::string help) {
    KeyRule r;
    r.key = std::move(key);
    r.kind = ValueKind::choice;
    r.choices = std::move(choices);
    r.help = std::move(help);
    return r;
}

std::vector<Entry> link_entries() {
    return {
        {positive("trap.gradient", "frequency step between adjacent columns"), "0.05"},
        {positive("laser.lamb_dicke", "Lamb-Dicke parameter along z"), "0.2"},
        {positive("laser.rabi", "Raman Rabi frequency"), "0.75"},
        {positive("coulomb.beta", "dipolar coupling strength"), "0.002"},
        {int_key("drive.order", 1, 8, "photon order r"), "1"},
        {int_key("numerics.n_max", 1, 16, "phonons per site"), "4"},
        {int_key("numerics.steps_per_period", 4, 1e6, "RK4 steps per fastest period"), "256"},
        {int_key("scan.points", 1, 10001, "phase grid size"), "21"},
        {angle("scan.phase_min", "first phase difference"), "0"},
        {angle("scan.phase_max", "last phase difference"), "2pi"},
        {non_negative("scan.suppression_threshold", "|J| below which t* is undefined"), "1e-6"},
        {bool_key("model.counter_rotating", "keep a_i a_j + h.c. in the exact model"), "false"},
    };
}

std::vector<Entry> map_entries() {
    return {
        {int_key("drive.order", 0, 8, "photon order r"), "1"},
        {non_negative("map.eta_min", "lowest driving strength"), "0"},
        {non_negative("map.eta_max", "highest driving strength"), "2"},
        {int_key("map.eta_points", 1, 100001, "strength grid size"), "101"},
        {angle("map.phase_min", "lowest phase difference"), "0"},
        {angle("map.phase_max", "highest phase difference"), "2pi"},
        {int_key("map.phase_points", 1, 100001, "phase grid size"), "101"},
    };
}

std::vector<Entry> plaquette_entries(std::string_view flux) {
    const bool pi_flux = flux != "0";
    return {
        {choice_key("plaquette.flux", {"0", "pi"}, "selects the phase_y and rabi defaults"), "pi"},
        {angle("drive.phase_x", "laser phase step along x"), "pi"},
        {angle("drive.phase_y", "laser phase step along y"), pi_flux ? "pi" : "0"},
        {positive("laser.rabi", "Raman Rabi frequency"), pi_flux ? "0.25" : "0.75"},
        {positive("laser.lamb_dicke", "Lamb-Dicke parameter along z"), "0.2"},
        {positive("trap.gradient", "frequency step between adjacent columns"), "0.05"},
        {positive("coulomb.beta", "dipolar coupling strength"), "0.002"},
        {int_key("drive.order", 1, 8, "photon order r"), "1"},
        {int_key("numerics.n_max", 1, 16, "phonons per site"), "2"},
        {real_key("geometry.aspect_exponent", 0.0, 4.0, "d_x = d_y |F|^exponent"), "1/3"},
        {positive("numerics.window", "simulated time in units of pi / |J_x|"), "2"},
        {int_key("numerics.samples", 2, 1e6, "output time samples"), "201"},
        {int_key("numerics.steps_per_period", 4, 1e6, "RK4 steps per fastest period"), "256"},
        {int_key("plaquette.initial_site", 0, 3, "initially excited site"), "0"},
        {bool_key("model.exact", "also run the laser-driven model"), "true"},
        {bool_key("model.counter_rotating", "keep a_i a_j + h.c. in the exact model"), "false"},
    };
}

std::vector<Entry> ladder_entries() {
    return {
        {int_key("ladder.cells", 1, 2000, "rhombic cells p (3p+1 open sites)"), "10"},
        {non_negative("ladder.j1", "coupling J_1"), "1"},
        {non_negative("ladder.j2", "coupling J_2"), "1"},
        {angle("ladder.flux", "flux per rhombus"), "pi"},
        {choice_key("ladder.boundary", {"open", "periodic"}, "boundary condition"), "open"},
        {non_negative("spectra.cluster_tol", "level clustering tolerance, 0 = 1e-8 max|E|"), "0"},
        {real_key("spectra.edge_weight", 0.0, 1.0, "boundary weight threshold for edge states"), "0.5"},
    };
}

std::vector<Entry> sweep_entries() {
    return {
        {int_key("ladder.cells", 1, 2000, "rhombic cells p"), "10"},
        {non_negative("ladder.j1", "coupling J_1"), "1"},
        {non_negative("ladder.j2", "coupling J_2"), "1"},
        {choice_key("ladder.boundary", {"open", "periodic"}, "boundary of the tabulated spectra"), "open"},
        {int_key("sweep.points", 1, 100001, "flux grid size"), "41"},
        {angle("sweep.flux_min", "first flux"), "-pi"},
        {angle("sweep.flux_max", "last flux"), "pi"},
    };
}

std::vector<Entry> butterfly_entries() {
    return {
        {int_key("lattice.lx", 1, 400, "columns"), "12"},
        {int_key("lattice.ly", 1, 400, "rows"), "12"},
        {int_key("lattice.m_max", 1, 400, "dipolar range along y"), "1"},
        {non_negative("lattice.jx", "x hopping"), "1"},
        {non_negative("lattice.jy", "y hopping at unit range"), "1"},
        {choice_key("lattice.boundary", {"open", "periodic"}, "boundary condition"), "open"},
        {int_key("butterfly.alpha_points", 1, 100001, "flux grid size over [0, 2 pi]"), "97"},
    };
}

std::vector<Entry> custom_entries(std::string_view mode) {
    std::vector<Entry> out = {
        {choice_key("array.layout", {"link", "plaquette", "rhombic_ladder", "square"}, "trap layout"), "plaquette"},
        {int_key("array.nx", 0, 4096, "sites (link), cells (ladder) or columns"), "2"},
        {int_key("array.ny", 0, 4096, "rows (square)"), "2"},
        {positive("array.spacing_x", "d_x"), "1"},
        {positive("array.spacing_y", "d_y"), "1.5"},
        {positive("trap.omega_x", "base trap frequency along x"), "1"},
        {positive("trap.omega_y", "base trap frequency along y"), "1"},
        {positive("trap.omega_z", "base trap frequency along z"), "1"},
        {non_negative("trap.gradient", "frequency step between adjacent columns"), "0.05"},
        {choice_key("trap.direction", {"x", "y", "z"}, "simulated vibration direction"), "z"},
        {positive("coulomb.beta", "dipolar coupling strength"), "0.002"},
        {int_key("coupling.cutoff", 1, 4096, "lattice-distance cutoff of bare couplings"), "3"},
        {choice_key("drive.mode", {"cosine", "laser"}, "drive realization"), "laser"},
        {int_key("drive.order", 1, 8, "photon order r"), "1"},
        {angle("drive.phase_x", "phase step along x"), "pi"},
        {angle("drive.phase_y", "phase step along y"), "pi/2"},
        {int_key("numerics.n_max", 1, 64, "phonons per site"), "2"},
        {positive("numerics.t_final", "final time"), "2000"},
        {non_negative("numerics.dt", "fixed step, 0 = automatic"), "0"},
        {int_key("numerics.samples", 2, 1e7, "output time samples"), "101"},
        {int_key("numerics.steps_per_period", 4, 1e6, "RK4 steps per fastest period"), "256"},
        {int_key("initial.site", 0, 1e9, "initially excited site"), "0"},
        {bool_key("model.exact", "also run the driven model"), "true"},
        {bool_key("model.counter_rotating", "keep a_i a_j + h.c. in the driven model"), "false"},
    };
    if (mode.empty() || mode == "cosine") {
        out.push_back({non_negative("drive.strength", "dimensionless modulation eta_d"), "0.6"});
    }
    if (mode.empty() || mode == "laser") {
        out.push_back({positive("laser.rabi", "Raman Rabi frequency"), "0.75"});
        out.push_back({positive("laser.lamb_dicke", "Lamb-Dicke parameter along the simulated direction"), "0.2"});
    }
    return out;
}

std::vector<Entry> entries_for(std::string_view name, std::string_view variant) {
    if (name == "fig2a_dressed_map") return map_entries();
    if (name == "fig2b_link_scan") return link_entries();
    if (name == "fig2cd_plaquette") return plaquette_entries(variant);
    if (name == "fig2e_ladder_spectrum") return ladder_entries();
    if (name == "fig2f_flux_sweep") return sweep_entries();
    if (name == "butterfly") return butterfly_entries();
    if (name == "custom") return custom_entries(variant);
    throw ConfigurationError("unknown experiment '" + std::string(name) + "'");
}

std::string_view trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

std::optional<double> parse_plain(std::string_view s) {
    if (s.empty()) return std::nullopt;
    if (s.front() == '+') s.remove_prefix(1);
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size() || !std::isfinite(v)) return std::nullopt;
    return v;
}

std::optional<std::int64_t> parse_int(std::string_view s) {
    if (!s.empty() && s.front() == '+') s.remove_prefix(1);
    std::int64_t v = 0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size() || s.empty()) return std::nullopt;
    return v;
}

std::string describe_kind(const KeyRule& rule) {
    switch (rule.kind) {
        case ValueKind::boolean: return "expected true or false";
        case ValueKind::integer: return "expected an integer";
        case ValueKind::real: return "expected a real number";
        case ValueKind::choice: {
            std::string s = "expected one of:";
            for (const auto& c : rule.choices) s += " " + c;
            return s;
        }
    }
    return {};
}

std::string number_text(double v) {
    std::ostringstream os;
    os << v;
    return os.str();
}

std::optional<std::string> range_violation(const KeyRule& rule, double v) {
    const bool low = rule.min_exclusive ? !(v > rule.min) : !(v >= rule.min);
    if (!low && v <= rule.max) return std::nullopt;
    std::string reason = "out of range: must be ";
    if (rule.max >= kHuge) {
        reason += (rule.min_exclusive ? "> " : ">= ") + number_text(rule.min);
    } else if (rule.min <= -kHuge) {
        reason += "<= " + number_text(rule.max);
    } else {
        reason += "in [" + number_text(rule.min) + ", " + number_text(rule.max) + "]";
    }
    return reason + " (got " + number_text(v) + ")";
}

// Parses one value against its rule; returns the issue text on failure.
std::variant<ConfigValue, std::string> convert(const KeyRule& rule, std::string_view text) {
    switch (rule.kind) {
        case ValueKind::boolean:
            if (text == "true") return ConfigValue{true};
            if (text == "false") return ConfigValue{false};
            return describe_kind(rule);
        case ValueKind::integer: {
            const auto v = parse_int(text);
            if (!v) return describe_kind(rule);
            if (auto bad = range_violation(rule, static_cast<double>(*v))) return *bad;
            return ConfigValue{*v};
        }
        case ValueKind::real: {
            const auto v = parse_real(text);
            if (!v) return describe_kind(rule);
            if (auto bad = range_violation(rule, *v)) return *bad;
            return ConfigValue{*v};
        }
        case ValueKind::choice:
            if (std::find(rule.choices.begin(), rule.choices.end(), text) == rule.choices.end()) {
                return describe_kind(rule);
            }
            return ConfigValue{std::string(text)};
    }
    return describe_kind(rule);
}

const std::set<std::string> kCustomModeKeys = {"drive.strength", "laser.rabi", "laser.lamb_dicke"};

void cross_checks(const ExperimentConfig& cfg, std::vector<ConfigIssue>& issues) {
    auto ordered = [&](const char* lo, const char* hi) {
        if (cfg.has(lo) && cfg.has(hi) && cfg.real(lo) > cfg.real(hi)) {
            issues.push_back({hi, std::string("must not be below ") + lo});
        }
    };
    ordered("map.eta_min", "map.eta_max");
    ordered("map.phase_min", "map.phase_max");
    ordered("scan.phase_min", "scan.phase_max");
    ordered("sweep.flux_min", "sweep.flux_max");
    for (const char* key : {"sweep.flux_min", "sweep.flux_max"}) {
        if (cfg.has(key) && std::abs(cfg.real(key)) > std::numbers::pi + 1e-12) {
            issues.push_back({key, "out of range: flux sweeps are limited to [-pi, pi]"});
        }
    }
    if (cfg.experiment == "butterfly" && cfg.has("lattice.boundary") &&
        cfg.word("lattice.boundary") == "periodic") {
        const auto points = cfg.integer("butterfly.alpha_points");
        const auto ly = cfg.integer("lattice.ly");
        if (ly > 1 && (points < 2 || ly % (points - 1) != 0)) {
            issues.push_back({"butterfly.alpha_points",
                              "periodic boundaries need (alpha_points - 1) to divide lattice.ly"});
        }
    }
}

}  // namespace

double ExperimentConfig::real(const std::string& key) const {
    const auto& v = values.at(key);
    if (const auto* d = std::get_if<double>(&v)) return *d;
    if (const auto* i = std::get_if<std::int64_t>(&v)) return static_cast<double>(*i);
    throw ConfigurationError("parameter '" + key + "' is not numeric");
}

std::int64_t ExperimentConfig::integer(const std::string& key) const {
    const auto& v = values.at(key);
    if (const auto* i = std::get_if<std::int64_t>(&v)) return *i;
    throw ConfigurationError("parameter '" + key + "' is not an integer");
}

bool ExperimentConfig::flag(const std::string& key) const {
    const auto& v = values.at(key);
    if (const auto* b = std::get_if<bool>(&v)) return *b;
    throw ConfigurationError("parameter '" + key + "' is not a boolean");
}

const std::string& ExperimentConfig::word(const std::string& key) const {
    const auto& v = values.at(key);
    if (const auto* s = std::get_if<std::string>(&v)) return *s;
    throw ConfigurationError("parameter '" + key + "' is not a word");
}

const std::vector<std::string>& experiment_names() {
    static const std::vector<std::string> names = {
        "fig2a_dressed_map", "fig2b_link_scan",  "fig2cd_plaquette", "fig2e_ladder_spectrum",
        "fig2f_flux_sweep",  "butterfly",        "custom"};
    return names;
}

std::string_view experiment_summary(std::string_view name) {
    if (name == "fig2a_dressed_map") return "|F_r| over driving strength and phase difference";
    if (name == "fig2b_link_scan") return "two-ion link transfer n_2(t*) versus phase difference";
    if (name == "fig2cd_plaquette") return "four-ion plaquette populations at flux 0 or pi";
    if (name == "fig2e_ladder_spectrum") return "rhombic ladder spectrum, flat bands and edge states";
    if (name == "fig2f_flux_sweep") return "rhombic ladder spectrum and bulk gap versus flux";
    if (name == "butterfly") return "square-lattice spectrum versus flux per plaquette";
    if (name == "custom") return "user-defined array and drive, every key required";
    throw ConfigurationError("unknown experiment '" + std::string(name) + "'");
}

std::vector<KeyRule> experiment_schema(std::string_view name, std::string_view drive_mode) {
    std::vector<KeyRule> rules;
    for (auto& e : entries_for(name, drive_mode)) rules.push_back(std::move(e.rule));
    return rules;
}

std::string preset_document(std::string_view name) {
    std::ostringstream os;
    os << "# " << experiment_summary(name) << "\n";
    if (name == "custom") os << "# example values; custom runs have no defaults\n";
    os << "experiment = " << name << "\n";
    os << "output.format = csv\n";
    for (const auto& e : entries_for(name, name == "custom" ? "laser" : "pi")) {
        os << e.rule.key << " = " << e.preset << "  # " << e.rule.help << "\n";
    }
    return os.str();
}

std::optional<double> parse_real(std::string_view text) {
    text = trim(text);
    const auto pos = text.find("pi");
    if (pos == std::string_view::npos) {
        const auto slash = text.find('/');
        if (slash == std::string_view::npos) return parse_plain(text);
        const auto num = parse_plain(trim(text.substr(0, slash)));
        const auto den = parse_plain(trim(text.substr(slash + 1)));
        if (!num || !den || *den == 0.0) return std::nullopt;
        return *num / *den;
    }
    std::string_view coef = trim(text.substr(0, pos));
    std::string_view rest = trim(text.substr(pos + 2));
    if (!coef.empty() && coef.back() == '*') coef = trim(coef.substr(0, coef.size() - 1));
    double c = 1.0;
    if (coef == "-") {
        c = -1.0;
    } else if (!coef.empty() && coef != "+") {
        const auto v = parse_plain(coef);
        if (!v) return std::nullopt;
        c = *v;
    }
    double d = 1.0;
    if (!rest.empty()) {
        if (rest.front() != '/') return std::nullopt;
        const auto v = parse_plain(trim(rest.substr(1)));
        if (!v || *v == 0.0) return std::nullopt;
        d = *v;
    }
    return c * std::numbers::pi / d;
}

std::string format_value(const ConfigValue& value) {
    return std::visit(
        [](const auto& v) -> std::string {
            using T = std::decay_t<decltype(v)>;
            if constexpr (std::is_same_v<T, bool>) {
                return v ? "true" : "false";
            } else if constexpr (std::is_same_v<T, std::int64_t>) {
                return std::to_string(v);
            } else if constexpr (std::is_same_v<T, double>) {
                char buf[64];
                const auto res = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 17);
                return std::string(buf, res.ptr);
            } else {
                return v;
            }
        },
        value);
}

ExperimentConfig parse_config(std::string_view text) {
    std::vector<ConfigIssue> issues;
    std::map<std::string, std::string> raw;
    std::vector<std::string> order;

    std::size_t line_no = 0;
    while (!text.empty()) {
        ++line_no;
        const auto nl = text.find('\n');
        std::string_view line = text.substr(0, nl);
        text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
        if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        const std::string where = "line " + std::to_string(line_no);
        if (eq == std::string_view::npos) {
            issues.push_back({where, "expected 'key = value'"});
            continue;
        }
        const std::string key(trim(line.substr(0, eq)));
        const std::string value(trim(line.substr(eq + 1)));
        if (key.empty() || value.empty()) {
            issues.push_back({key.empty() ? where : key, "empty key or value"});
            continue;
        }
        if (raw.count(key)) {
            issues.push_back({key, "duplicate key"});
            continue;
        }
        raw[key] = value;
        order.push_back(key);
    }

    ExperimentConfig cfg;
    const auto& names = experiment_names();
    auto exp_it = raw.find("experiment");
    if (exp_it == raw.end()) {
        std::string list;
        for (const auto& n : names) list += (list.empty() ? "" : ", ") + n;
        issues.push_back({"experiment", "missing required key (one of: " + list + ")"});
        throw ConfigError(std::move(issues));
    }
    if (std::find(names.begin(), names.end(), exp_it->second) == names.end()) {
        issues.push_back({"experiment", "unknown experiment '" + exp_it->second + "'"});
        throw ConfigError(std::move(issues));
    }
    cfg.experiment = exp_it->second;
    if (auto f = raw.find("output.format"); f != raw.end()) {
        if (f->second == "csv" || f->second == "json") {
            cfg.format = f->second;
        } else {
            issues.push_back({"output.format", "expected one of: csv json"});
        }
    }

    const bool custom = cfg.experiment == "custom";
    std::string variant;
    if (cfg.experiment == "fig2cd_plaquette") {
        variant = raw.count("plaquette.flux") ? raw["plaquette.flux"] : "pi";
    } else if (custom && raw.count("drive.mode") &&
               (raw["drive.mode"] == "cosine" || raw["drive.mode"] == "laser")) {
        variant = raw["drive.mode"];
    }
    const auto entries = entries_for(cfg.experiment, variant);

    for (const auto& key : order) {
        if (key == "experiment" || key == "output.format") continue;
        const auto it = std::find_if(entries.begin(), entries.end(),
                                     [&](const Entry& e) { return e.rule.key == key; });
        if (it == entries.end()) {
            std::string reason = "unknown key for experiment " + cfg.experiment;
            if (custom && kCustomModeKeys.count(key)) reason = "not used with drive.mode = " + variant;
            issues.push_back({key, reason});
            continue;
        }
        auto converted = convert(it->rule, raw[key]);
        if (auto* bad = std::get_if<std::string>(&converted)) {
            issues.push_back({key, *bad});
            continue;
        }
        cfg.values[key] = std::get<ConfigValue>(converted);
        cfg.supplied.push_back(key);
    }

    for (const auto& e : entries) {
        if (cfg.values.count(e.rule.key) || raw.count(e.rule.key)) continue;
        if (custom) {
            if (variant.empty() && kCustomModeKeys.count(e.rule.key)) continue;
            issues.push_back({e.rule.key, "missing required key"});
            continue;
        }
        cfg.values[e.rule.key] = std::get<ConfigValue>(convert(e.rule, e.preset));
    }

    if (issues.empty()) cross_checks(cfg, issues);
    if (!issues.empty()) throw ConfigError(std::move(issues));
    return cfg;
}

}  // namespace phonon_gauge

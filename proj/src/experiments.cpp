#include "phonon_gauge/experiments.hpp"

#include <chrono>
#include <cmath>
#include <numbers>

#include <Eigen/Eigenvalues>
#include <json.hpp>

#include "phonon_gauge/couplings.hpp"
#include "phonon_gauge/dynamics.hpp"
#include "phonon_gauge/errors.hpp"
#include "phonon_gauge/model.hpp"
#include "phonon_gauge/output.hpp"
#include "phonon_gauge/parallel.hpp"
#include "phonon_gauge/spectra.hpp"

#ifndef PHONON_GAUGE_VERSION
#define PHONON_GAUGE_VERSION "0.0.0"
#endif

namespace phonon_gauge {

using nlohmann::json;
using std::numbers::pi;

std::string version() { return PHONON_GAUGE_VERSION; }

namespace {

struct Context {
    const ExperimentConfig& cfg;
    std::filesystem::path dir;
    bool csv = true;
    unsigned jobs = 1;
    RunReport report;
    json derived = json::object();

    void emit_csv(const std::string& name, const CsvTable& table) {
        table.write(dir / name);
        report.files.push_back(dir / name);
    }
    void emit_json(const std::string& name, const json& doc) {
        write_file(dir / name, doc.dump(2) + "\n");
        report.files.push_back(dir / name);
    }
    void warn(const std::vector<std::string>& messages) {
        report.warnings.insert(report.warnings.end(), messages.begin(), messages.end());
    }
};

std::vector<std::string> indexed(const std::string& prefix, std::size_t n, std::size_t base = 0) {
    std::vector<std::string> names;
    for (std::size_t i = 0; i < n; ++i) names.push_back(prefix + std::to_string(i + base));
    return names;
}

json to_json(const Eigen::VectorXd& v) { return json(std::vector<double>(v.data(), v.data() + v.size())); }

json rows_json(const Eigen::MatrixXd& m) {
    json out = json::array();
    for (Eigen::Index r = 0; r < m.rows(); ++r) out.push_back(to_json(m.row(r).transpose()));
    return out;
}

json coupling_json(const CouplingMatrix& m) {
    json bonds = json::array();
    for (std::size_t i = 0; i < m.size(); ++i) {
        for (std::size_t j = i + 1; j < m.size(); ++j) {
            const auto v = m(i, j);
            if (v == std::complex<double>{}) continue;
            bonds.push_back({{"i", i}, {"j", j}, {"re", v.real()}, {"im", v.imag()}});
        }
    }
    return bonds;
}

CsvTable coupling_table(const CouplingMatrix& m) {
    CsvTable t({"i", "j", "re", "im", "abs"});
    for (std::size_t i = 0; i < m.size(); ++i) {
        for (std::size_t j = i + 1; j < m.size(); ++j) {
            const auto v = m(i, j);
            if (v == std::complex<double>{}) continue;
            t.add_row({double(i), double(j), v.real(), v.imag(), std::abs(v)});
        }
    }
    return t;
}

void run_dressed_map(Context& ctx) {
    const auto& c = ctx.cfg;
    const auto etas = linear_grid(c.real("map.eta_min"), c.real("map.eta_max"),
                                  static_cast<std::size_t>(c.integer("map.eta_points")));
    const auto phases = linear_grid(c.real("map.phase_min"), c.real("map.phase_max"),
                                    static_cast<std::size_t>(c.integer("map.phase_points")));
    const int order = static_cast<int>(c.integer("drive.order"));
    std::vector<std::vector<std::complex<double>>> grid(etas.size());
    parallel_for(etas.size(), ctx.jobs, [&](std::size_t i) {
        grid[i].resize(phases.size());
        for (std::size_t k = 0; k < phases.size(); ++k) grid[i][k] = dressed_factor(order, etas[i], phases[k]);
    });

    if (ctx.csv) {
        CsvTable t({"eta_d", "phase_difference", "abs_F", "re_F", "im_F"});
        for (std::size_t i = 0; i < etas.size(); ++i) {
            for (std::size_t k = 0; k < phases.size(); ++k) {
                const auto f = grid[i][k];
                t.add_row({etas[i], phases[k], std::abs(f), f.real(), f.imag()});
            }
        }
        ctx.emit_csv("dressed_map.csv", t);
    } else {
        json abs_f = json::array(), re_f = json::array(), im_f = json::array();
        for (const auto& row : grid) {
            json a = json::array(), r = json::array(), m = json::array();
            for (const auto& f : row) {
                a.push_back(std::abs(f));
                r.push_back(f.real());
                m.push_back(f.imag());
            }
            abs_f.push_back(a);
            re_f.push_back(r);
            im_f.push_back(m);
        }
        ctx.emit_json("dressed_map.json", {{"order", order},
                                           {"eta_d", etas},
                                           {"phase_difference", phases},
                                           {"abs_F", abs_f},
                                           {"re_F", re_f},
                                           {"im_F", im_f}});
    }
}

void run_link_scan(Context& ctx) {
    const auto& c = ctx.cfg;
    LinkScanParams p;
    p.gradient = c.real("trap.gradient");
    p.lamb_dicke = c.real("laser.lamb_dicke");
    p.rabi = c.real("laser.rabi");
    p.coulomb_strength = c.real("coulomb.beta");
    p.order = static_cast<int>(c.integer("drive.order"));
    p.n_max = static_cast<int>(c.integer("numerics.n_max"));
    p.steps_per_period = static_cast<int>(c.integer("numerics.steps_per_period"));
    p.suppression_threshold = c.real("scan.suppression_threshold");
    p.counter_rotating = c.flag("model.counter_rotating");
    const auto grid = linear_grid(c.real("scan.phase_min"), c.real("scan.phase_max"),
                                  static_cast<std::size_t>(c.integer("scan.points")));

    ctx.warn(validity_warnings(link_array(p), link_drive(p, pi)));
    ctx.derived["drive_strength"] = link_drive(p, pi).strength;
    ctx.derived["beat_frequency"] = p.gradient / p.order;
    const LinkScanResult scan = link_transfer_scan(p, grid, ctx.jobs);

    if (ctx.csv) {
        CsvTable t({"phase_difference", "defined", "effective_coupling", "t_star", "n2_effective",
                    "n2_exact", "exact_norm_drift"});
        for (const auto& pt : scan.points) {
            t.add_row({pt.phase_difference, pt.defined ? 1.0 : 0.0, pt.effective_coupling, pt.t_star,
                       pt.effective_transfer, pt.exact_transfer, pt.exact_norm_drift});
        }
        ctx.emit_csv("link_scan.csv", t);
    } else {
        json points = json::array();
        for (const auto& pt : scan.points) {
            points.push_back({{"phase_difference", pt.phase_difference},
                              {"defined", pt.defined},
                              {"effective_coupling", pt.effective_coupling},
                              {"t_star", pt.t_star},
                              {"n2_effective", pt.effective_transfer},
                              {"n2_exact", pt.exact_transfer},
                              {"exact_norm_drift", pt.exact_norm_drift}});
        }
        ctx.emit_json("link_scan.json", {{"points", points}});
    }
}

void run_plaquette(Context& ctx) {
    const auto& c = ctx.cfg;
    PlaquetteParams p;
    p.phase_x = c.real("drive.phase_x");
    p.phase_y = c.real("drive.phase_y");
    p.rabi = c.real("laser.rabi");
    p.lamb_dicke = c.real("laser.lamb_dicke");
    p.gradient = c.real("trap.gradient");
    p.coulomb_strength = c.real("coulomb.beta");
    p.order = static_cast<int>(c.integer("drive.order"));
    p.n_max = static_cast<int>(c.integer("numerics.n_max"));
    p.aspect_exponent = c.real("geometry.aspect_exponent");
    p.window = c.real("numerics.window");
    p.samples = static_cast<std::size_t>(c.integer("numerics.samples"));
    p.steps_per_period = static_cast<int>(c.integer("numerics.steps_per_period"));
    p.initial_site = static_cast<std::size_t>(c.integer("plaquette.initial_site"));
    p.counter_rotating = c.flag("model.counter_rotating");
    const bool exact = c.flag("model.exact");

    ctx.warn(validity_warnings(plaquette_array(p), plaquette_drive(p)));
    const PlaquetteResult r = plaquette_experiment(p, exact);
    ctx.derived["spacing_y"] = r.spacing_y;
    ctx.derived["window"] = r.window;
    ctx.derived["flux"] = r.flux;
    ctx.derived["drive_strength"] = plaquette_drive(p).strength;
    ctx.derived["effective_couplings"] = coupling_json(r.effective_couplings);
    ctx.derived["effective_dt"] = r.effective.dt;
    if (exact) {
        ctx.derived["exact_dt"] = r.exact.dt;
        ctx.derived["exact_max_norm_drift"] = r.exact.max_norm_drift();
    }

    if (ctx.csv) {
        auto header = indexed("P_", 4, 1);
        header.insert(header.begin(), "time");
        if (exact) {
            for (auto& n : indexed("n_", 4, 1)) header.push_back(n);
            header.push_back("norm_exact");
        }
        CsvTable t(header);
        for (std::size_t k = 0; k < r.effective.times.size(); ++k) {
            std::vector<double> row{r.effective.times[k]};
            for (int s = 0; s < 4; ++s) row.push_back(r.effective.populations(static_cast<Eigen::Index>(k), s));
            if (exact) {
                for (int s = 0; s < 4; ++s) row.push_back(r.exact.populations(static_cast<Eigen::Index>(k), s));
                row.push_back(r.exact.norms[k]);
            }
            t.add_row(row);
        }
        ctx.emit_csv("plaquette.csv", t);
        ctx.emit_csv("plaquette_couplings.csv", coupling_table(r.effective_couplings));
    } else {
        json doc = {{"time", r.effective.times},
                    {"effective", rows_json(r.effective.populations)},
                    {"couplings", coupling_json(r.effective_couplings)}};
        if (exact) {
            doc["exact"] = rows_json(r.exact.populations);
            doc["exact_norm"] = r.exact.norms;
        }
        ctx.emit_json("plaquette.json", doc);
    }
}

json spectrum_json(const SpectrumResult& s) {
    json vectors_re = json::array(), vectors_im = json::array();
    for (Eigen::Index k = 0; k < s.eigenvectors.cols(); ++k) {
        vectors_re.push_back(to_json(s.eigenvectors.col(k).real()));
        vectors_im.push_back(to_json(s.eigenvectors.col(k).imag()));
    }
    return {{"eigenvalues", to_json(s.eigenvalues)},
            {"ipr", to_json(s.ipr)},
            {"boundary_weight", to_json(s.boundary_weight)},
            {"band", s.band},
            {"cell", s.cell},
            {"boundary", std::string(to_string(s.boundary))},
            {"flux", s.flux},
            {"eigenvectors_re", vectors_re},
            {"eigenvectors_im", vectors_im}};
}

void run_ladder_spectrum(Context& ctx) {
    const auto& c = ctx.cfg;
    const int cells = static_cast<int>(c.integer("ladder.cells"));
    const double j1 = c.real("ladder.j1");
    const double j2 = c.real("ladder.j2");
    const double flux = c.real("ladder.flux");
    const Boundary boundary = parse_boundary(c.word("ladder.boundary"));

    SpectrumResult s = eigensystem(rhombic_ladder_matrix(cells, j1, j2, flux, boundary));
    s.flux = flux;
    const double tol = c.real("spectra.cluster_tol") > 0.0 ? c.real("spectra.cluster_tol")
                                                           : default_cluster_tolerance(s.eigenvalues);
    const auto clusters = flat_band_report(s, tol);
    const SpectrumResult bulk = eigensystem(rhombic_ladder_matrix(cells, j1, j2, flux, Boundary::periodic));
    const auto windows = band_gap_windows(bulk.eigenvalues, 3);
    const auto edges = edge_state_report(s, windows, c.real("spectra.edge_weight"));
    ctx.derived["sites"] = s.size();
    ctx.derived["cluster_tol"] = tol;
    json gaps = json::array();
    for (const auto& w : windows) gaps.push_back({w.lower, w.upper});
    ctx.derived["bulk_gap_windows"] = gaps;

    if (ctx.csv) {
        CsvTable spec({"index", "energy", "ipr", "boundary_weight", "band"});
        for (std::size_t n = 0; n < s.size(); ++n) {
            const auto k = static_cast<Eigen::Index>(n);
            spec.add_row({double(n), s.eigenvalues[k], s.ipr[k], s.boundary_weight[k], double(s.band[n])});
        }
        CsvTable flat({"energy", "count", "spread"});
        for (const auto& cl : clusters) flat.add_row({cl.energy, double(cl.count), cl.spread});
        CsvTable edge({"index", "energy", "boundary_weight", "localization_length"});
        for (const auto& e : edges) edge.add_row({double(e.index), e.energy, e.boundary_weight, e.localization_length});
        ctx.emit_csv("ladder_spectrum.csv", spec);
        ctx.emit_csv("flat_bands.csv", flat);
        ctx.emit_csv("edge_states.csv", edge);
    } else {
        json flat = json::array(), edge = json::array();
        for (const auto& cl : clusters) flat.push_back({{"energy", cl.energy}, {"count", cl.count}, {"spread", cl.spread}});
        for (const auto& e : edges) {
            edge.push_back({{"index", e.index},
                            {"energy", e.energy},
                            {"boundary_weight", e.boundary_weight},
                            {"localization_length", std::isinf(e.localization_length) ? json(nullptr) : json(e.localization_length)}});
        }
        ctx.emit_json("ladder_spectrum.json", {{"spectrum", spectrum_json(s)}, {"flat_bands", flat}, {"edge_states", edge}});
    }
}

void run_flux_sweep(Context& ctx) {
    const auto& c = ctx.cfg;
    const int cells = static_cast<int>(c.integer("ladder.cells"));
    const double j1 = c.real("ladder.j1");
    const double j2 = c.real("ladder.j2");
    const Boundary boundary = parse_boundary(c.word("ladder.boundary"));
    const auto grid = linear_grid(c.real("sweep.flux_min"), c.real("sweep.flux_max"),
                                  static_cast<std::size_t>(c.integer("sweep.points")));

    const FluxSweep spectra = flux_sweep(
        [&](double phi) { return rhombic_ladder_matrix(cells, j1, j2, phi, boundary); }, grid, 0, ctx.jobs);
    const FluxSweep bulk = flux_sweep(
        [&](double phi) { return rhombic_ladder_matrix(cells, j1, j2, phi, Boundary::periodic); }, grid, 3,
        ctx.jobs);
    const std::size_t n = spectra.eigenvalues.empty() ? 0 : static_cast<std::size_t>(spectra.eigenvalues[0].size());
    ctx.derived["sites"] = n;
    ctx.derived["gap_source"] = "periodic ladder, three equal band groups";

    if (ctx.csv) {
        auto header = indexed("E_", n);
        header.insert(header.begin(), "flux");
        CsvTable t(header);
        CsvTable g({"flux", "min_gap"});
        for (std::size_t i = 0; i < grid.size(); ++i) {
            std::vector<double> row{grid[i]};
            for (Eigen::Index k = 0; k < spectra.eigenvalues[i].size(); ++k) row.push_back(spectra.eigenvalues[i][k]);
            t.add_row(row);
            g.add_row({grid[i], bulk.min_gap[i]});
        }
        ctx.emit_csv("flux_sweep.csv", t);
        ctx.emit_csv("flux_gap.csv", g);
    } else {
        json levels = json::array();
        for (const auto& e : spectra.eigenvalues) levels.push_back(to_json(e));
        ctx.emit_json("flux_sweep.json", {{"flux", grid}, {"eigenvalues", levels}, {"min_gap", bulk.min_gap}});
    }
}

void run_butterfly(Context& ctx) {
    const auto& c = ctx.cfg;
    const int lx = static_cast<int>(c.integer("lattice.lx"));
    const int ly = static_cast<int>(c.integer("lattice.ly"));
    const int m_max = static_cast<int>(c.integer("lattice.m_max"));
    const double jx = c.real("lattice.jx");
    const double jy = c.real("lattice.jy");
    const Boundary boundary = parse_boundary(c.word("lattice.boundary"));
    const auto grid = linear_grid(0.0, 2.0 * pi, static_cast<std::size_t>(c.integer("butterfly.alpha_points")));

    std::vector<Eigen::VectorXd> levels(grid.size());
    parallel_for(grid.size(), ctx.jobs, [&](std::size_t i) {
        const TightBinding tb = square_lattice_matrix(lx, ly, grid[i], jx, jy, m_max, boundary);
        levels[i] = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd>(tb.matrix, Eigen::EigenvaluesOnly).eigenvalues();
    });
    const std::size_t n = static_cast<std::size_t>(lx) * static_cast<std::size_t>(ly);
    ctx.derived["sites"] = n;

    if (ctx.csv) {
        auto header = indexed("E_", n);
        header.insert(header.begin(), "alpha");
        CsvTable t(header);
        for (std::size_t i = 0; i < grid.size(); ++i) {
            std::vector<double> row{grid[i]};
            for (Eigen::Index k = 0; k < levels[i].size(); ++k) row.push_back(levels[i][k]);
            t.add_row(row);
        }
        ctx.emit_csv("butterfly.csv", t);
    } else {
        json out = json::array();
        for (const auto& e : levels) out.push_back(to_json(e));
        ctx.emit_json("butterfly.json", {{"alpha", grid}, {"eigenvalues", out}});
    }
}

void run_custom(Context& ctx) {
    const auto& c = ctx.cfg;
    ArraySpec spec;
    spec.layout = parse_layout(c.word("array.layout"));
    spec.dims = {static_cast<int>(c.integer("array.nx")), static_cast<int>(c.integer("array.ny"))};
    spec.spacings = {c.real("array.spacing_x"), c.real("array.spacing_y")};
    spec.base_frequencies = {c.real("trap.omega_x"), c.real("trap.omega_y"), c.real("trap.omega_z")};
    spec.gradient_direction = parse_direction(c.word("trap.direction"));
    spec.gradient = c.real("trap.gradient");
    spec.coulomb_strength = c.real("coulomb.beta");
    const TrapArray array = build_array(spec);

    const int order = static_cast<int>(c.integer("drive.order"));
    const double phase_x = c.real("drive.phase_x");
    const double phase_y = c.real("drive.phase_y");
    const bool laser = c.word("drive.mode") == "laser";
    DriveSpec drive;
    if (laser) {
        LaserParameters lp;
        lp.rabi = c.real("laser.rabi");
        lp.beat_frequency = spec.gradient / order;
        lp.lamb_dicke[static_cast<std::size_t>(spec.gradient_direction)] = c.real("laser.lamb_dicke");
        drive = DriveSpec::from_laser(lp, order, phase_x, phase_y, spec.gradient_direction);
    } else {
        drive = DriveSpec::cosine(spec.gradient / order, c.real("drive.strength"), order, phase_x, phase_y,
                                  spec.gradient_direction);
    }
    ctx.warn(validity_warnings(array, drive));

    const int cutoff = static_cast<int>(c.integer("coupling.cutoff"));
    const CouplingMatrix effective = effective_coupling_matrix(array, drive, cutoff);
    const FockSpace space(array.size(), static_cast<int>(c.integer("numerics.n_max")));
    const auto site = static_cast<std::size_t>(c.integer("initial.site"));
    if (site >= array.size()) throw InvalidGeometry("initial.site is outside the array");
    const Eigen::VectorXcd start = single_excitation_state(space, site);

    EvolutionOptions opts;
    opts.t_final = c.real("numerics.t_final");
    opts.dt = c.real("numerics.dt");
    opts.samples = static_cast<std::size_t>(c.integer("numerics.samples"));
    opts.steps_per_period = static_cast<int>(c.integer("numerics.steps_per_period"));
    const EvolutionResult eff = evolve(effective_hamiltonian(effective, space), start, opts);

    const bool exact = c.flag("model.exact");
    EvolutionResult ex;
    if (exact) {
        const CouplingMatrix bare = bare_coupling_matrix(array, spec.gradient_direction, cutoff);
        const HamiltonianOptions ho{c.flag("model.counter_rotating")};
        ex = evolve(laser ? laser_driven_hamiltonian(array, drive, bare, space, ho)
                          : cosine_driven_hamiltonian(array, drive, bare, space, ho),
                    start, opts);
        ctx.derived["exact_model"] = ex.model;
        ctx.derived["exact_dt"] = ex.dt;
        ctx.derived["exact_max_norm_drift"] = ex.max_norm_drift();
    }
    ctx.derived["sites"] = array.size();
    ctx.derived["fock_dimension"] = space.dimension();
    ctx.derived["drive_strength"] = drive.strength;
    ctx.derived["effective_dt"] = eff.dt;
    json fluxes = json::array();
    for (const auto& s : array.sites()) {
        const auto cycle = array.elementary_plaquette(s.coord);
        if (cycle.empty()) continue;
        try {
            fluxes.push_back({{"x", s.coord.x}, {"y", s.coord.y}, {"flux", plaquette_flux(effective, cycle)}});
        } catch (const BrokenCycle&) {
            fluxes.push_back({{"x", s.coord.x}, {"y", s.coord.y}, {"flux", nullptr}});
        }
    }
    ctx.derived["plaquette_fluxes"] = fluxes;

    const std::size_t n = array.size();
    if (ctx.csv) {
        auto header = indexed("P_", n);
        header.insert(header.begin(), "time");
        if (exact) {
            for (auto& name : indexed("n_", n)) header.push_back(name);
            header.push_back("norm_exact");
        }
        CsvTable t(header);
        for (std::size_t k = 0; k < eff.times.size(); ++k) {
            std::vector<double> row{eff.times[k]};
            for (std::size_t s = 0; s < n; ++s) row.push_back(eff.populations(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(s)));
            if (exact) {
                for (std::size_t s = 0; s < n; ++s) row.push_back(ex.populations(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(s)));
                row.push_back(ex.norms[k]);
            }
            t.add_row(row);
        }
        ctx.emit_csv("custom_populations.csv", t);
        ctx.emit_csv("custom_couplings.csv", coupling_table(effective));
    } else {
        json doc = {{"time", eff.times}, {"effective", rows_json(eff.populations)}, {"couplings", coupling_json(effective)}};
        if (exact) {
            doc["exact"] = rows_json(ex.populations);
            doc["exact_norm"] = ex.norms;
        }
        ctx.emit_json("custom.json", doc);
    }
}

json value_json(const ConfigValue& v) {
    return std::visit([](const auto& x) { return json(x); }, v);
}

}  // namespace

RunReport run_experiment(const ExperimentConfig& config, const RunOptions& options) {
    const auto start = std::chrono::steady_clock::now();
    Context ctx{config, options.out_dir, true, 1, {}, json::object()};
    const std::string format = options.format.empty() ? config.format : options.format;
    if (format != "csv" && format != "json") throw ConfigError(std::vector<ConfigIssue>{{"output.format", "expected one of: csv json"}});
    ctx.csv = format == "csv";
    ctx.jobs = std::max(1u, options.jobs);
    std::filesystem::create_directories(ctx.dir);

    const std::string& e = config.experiment;
    if (e == "fig2a_dressed_map") run_dressed_map(ctx);
    else if (e == "fig2b_link_scan") run_link_scan(ctx);
    else if (e == "fig2cd_plaquette") run_plaquette(ctx);
    else if (e == "fig2e_ladder_spectrum") run_ladder_spectrum(ctx);
    else if (e == "fig2f_flux_sweep") run_flux_sweep(ctx);
    else if (e == "butterfly") run_butterfly(ctx);
    else if (e == "custom") run_custom(ctx);
    else throw ConfigurationError("unknown experiment '" + e + "'");

    ctx.report.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

    json params = json::object();
    for (const auto& [key, value] : config.values) params[key] = value_json(value);
    json files = json::array();
    for (const auto& f : ctx.report.files) files.push_back(f.filename().string());
    const json manifest = {{"software", {{"name", "phonon-gauge"}, {"version", version()}}},
                           {"experiment", e},
                           {"format", format},
                           {"jobs", ctx.jobs},
                           {"parameters", params},
                           {"supplied", config.supplied},
                           {"derived", ctx.derived},
                           {"files", files},
                           {"warnings", ctx.report.warnings},
                           {"wall_clock_seconds", ctx.report.wall_seconds}};
    write_file(ctx.dir / "manifest.json", manifest.dump(2) + "\n");
    ctx.report.files.push_back(ctx.dir / "manifest.json");
    return ctx.report;
}

}  // namespace phonon_gauge

#include <pybind11/complex.h>
#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "phonon_gauge/couplings.hpp"
#include "phonon_gauge/dynamics.hpp"
#include "phonon_gauge/errors.hpp"
#include "phonon_gauge/experiments.hpp"
#include "phonon_gauge/spectra.hpp"

namespace py = pybind11;
namespace pg = phonon_gauge;

namespace {

py::dict evolution_dict(const pg::EvolutionResult& r) {
    py::dict d;
    d["model"] = r.model;
    d["times"] = r.times;
    d["populations"] = r.populations;
    d["norms"] = r.norms;
    d["dt"] = r.dt;
    return d;
}

py::dict spectrum_dict(const pg::SpectrumResult& s) {
    py::dict d;
    d["eigenvalues"] = s.eigenvalues;
    d["eigenvectors"] = s.eigenvectors;
    d["ipr"] = s.ipr;
    d["boundary_weight"] = s.boundary_weight;
    d["band"] = s.band;
    d["cell"] = s.cell;
    return d;
}

pg::Boundary boundary_arg(const std::string& name) { return pg::parse_boundary(name); }

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Phonon tunneling and synthetic gauge fields in microtrap arrays";

    auto base = py::register_exception<pg::Error>(m, "Error", PyExc_RuntimeError);
    py::register_exception<pg::InvalidGeometry>(m, "InvalidGeometry", base.ptr());
    py::register_exception<pg::DomainError>(m, "DomainError", base.ptr());
    py::register_exception<pg::ConfigurationError>(m, "ConfigurationError", base.ptr());
    py::register_exception<pg::CapacityError>(m, "CapacityError", base.ptr());
    py::register_exception<pg::BrokenCycle>(m, "BrokenCycle", base.ptr());
    py::register_exception<pg::IntegrationFailure>(m, "IntegrationFailure", base.ptr());
    py::register_exception<pg::ConfigError>(m, "ConfigError", base.ptr());

    m.def("version", &pg::version);
    m.def("bessel_j", &pg::bessel_j, py::arg("order"), py::arg("x"));
    m.def("dressed_factor", &pg::dressed_factor, py::arg("order"), py::arg("strength"),
          py::arg("phase_difference"));

    m.def("rhombic_ladder_matrix",
          [](int cells, double j1, double j2, double flux, const std::string& boundary) {
              return pg::rhombic_ladder_matrix(cells, j1, j2, flux, boundary_arg(boundary)).matrix;
          },
          py::arg("cells"), py::arg("j1"), py::arg("j2"), py::arg("flux"), py::arg("boundary") = "open");
    m.def("square_lattice_matrix",
          [](int lx, int ly, double alpha, double jx, double jy, int m_max, const std::string& boundary) {
              return pg::square_lattice_matrix(lx, ly, alpha, jx, jy, m_max, boundary_arg(boundary)).matrix;
          },
          py::arg("lx"), py::arg("ly"), py::arg("alpha"), py::arg("jx") = 1.0, py::arg("jy") = 1.0,
          py::arg("m_max") = 1, py::arg("boundary") = "open");
    m.def("eigensystem", [](const Eigen::MatrixXcd& h) { return spectrum_dict(pg::eigensystem(h)); },
          py::arg("matrix"));
    m.def("ladder_spectrum",
          [](int cells, double j1, double j2, double flux, const std::string& boundary) {
              return spectrum_dict(pg::eigensystem(pg::rhombic_ladder_matrix(cells, j1, j2, flux, boundary_arg(boundary))));
          },
          py::arg("cells"), py::arg("j1"), py::arg("j2"), py::arg("flux"), py::arg("boundary") = "open");
    m.def("plaquette_flux",
          [](const Eigen::MatrixXcd& matrix, const std::vector<std::size_t>& cycle) {
              return pg::plaquette_flux(matrix, cycle);
          },
          py::arg("matrix"), py::arg("cycle"));
    m.def("gauge_transform",
          [](const Eigen::MatrixXcd& matrix, const std::vector<double>& angles) {
              return pg::gauge_transform(matrix, angles);
          },
          py::arg("matrix"), py::arg("angles"));

    m.def("link_transfer_point",
          [](double phase_difference, int n_max, int steps_per_period) {
              pg::LinkScanParams p;
              p.n_max = n_max;
              p.steps_per_period = steps_per_period;
              const auto pt = pg::link_transfer_point(p, phase_difference);
              py::dict d;
              d["defined"] = pt.defined;
              d["effective_coupling"] = pt.effective_coupling;
              d["t_star"] = pt.t_star;
              d["n2_effective"] = pt.effective_transfer;
              d["n2_exact"] = pt.exact_transfer;
              d["exact_norm_drift"] = pt.exact_norm_drift;
              return d;
          },
          py::arg("phase_difference"), py::arg("n_max") = 4, py::arg("steps_per_period") = pg::kDefaultStepsPerPeriod,
          py::call_guard<py::gil_scoped_release>());
    m.def("plaquette_experiment",
          [](bool pi_flux, double window, bool exact, std::size_t samples) {
              auto p = pg::plaquette_preset(pi_flux);
              p.window = window;
              p.samples = samples;
              pg::PlaquetteResult r;
              {
                  py::gil_scoped_release release;
                  r = pg::plaquette_experiment(p, exact);
              }
              py::dict d;
              d["flux"] = r.flux;
              d["spacing_y"] = r.spacing_y;
              d["window"] = r.window;
              d["couplings"] = r.effective_couplings.amplitudes;
              d["effective"] = evolution_dict(r.effective);
              if (exact) d["exact"] = evolution_dict(r.exact);
              return d;
          },
          py::arg("pi_flux"), py::arg("window") = 2.0, py::arg("exact") = false, py::arg("samples") = 201);

    m.def("experiment_names", &pg::experiment_names);
    m.def("preset_document", [](const std::string& name) { return pg::preset_document(name); }, py::arg("name"));
    m.def("run_config",
          [](const std::string& text, const std::filesystem::path& out_dir, const std::string& format, unsigned jobs) {
              const auto config = pg::parse_config(text);
              pg::RunReport report;
              {
                  py::gil_scoped_release release;
                  report = pg::run_experiment(config, {out_dir, format, jobs});
              }
              py::dict d;
              d["files"] = report.files;
              d["warnings"] = report.warnings;
              d["wall_seconds"] = report.wall_seconds;
              return d;
          },
          py::arg("text"), py::arg("out_dir"), py::arg("format") = "", py::arg("jobs") = 1);
}

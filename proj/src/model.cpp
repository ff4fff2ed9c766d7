#include "phonon_gauge/model.hpp"

#include <cmath>
#include <string>

#include "phonon_gauge/errors.hpp"

namespace phonon_gauge {

std::string_view to_string(Direction d) {
    switch (d) {
        case Direction::x: return "x";
        case Direction::y: return "y";
        case Direction::z: return "z";
    }
    return "?";
}

Direction parse_direction(std::string_view text) {
    if (text == "x") return Direction::x;
    if (text == "y") return Direction::y;
    if (text == "z") return Direction::z;
    throw DomainError("unknown direction '" + std::string(text) + "'");
}

std::string_view to_string(Layout layout) {
    switch (layout) {
        case Layout::link: return "link";
        case Layout::plaquette: return "plaquette";
        case Layout::rhombic_ladder: return "rhombic_ladder";
        case Layout::square: return "square";
    }
    return "?";
}

Layout parse_layout(std::string_view text) {
    if (text == "link") return Layout::link;
    if (text == "plaquette") return Layout::plaquette;
    if (text == "rhombic_ladder") return Layout::rhombic_ladder;
    if (text == "square") return Layout::square;
    throw DomainError("unknown layout '" + std::string(text) + "'");
}

std::string_view to_string(DriveMode mode) {
    return mode == DriveMode::cosine ? "cosine" : "laser";
}

TrapArray::TrapArray(Layout layout, std::vector<Site> sites, double spacing_x, double spacing_y,
                     Direction gradient_direction, double gradient, double coulomb_strength)
    : layout_(layout),
      sites_(std::move(sites)),
      spacing_x_(spacing_x),
      spacing_y_(spacing_y),
      gradient_direction_(gradient_direction),
      gradient_(gradient),
      beta_(coulomb_strength) {
    if (sites_.empty()) throw InvalidGeometry("trap array has no sites");
    for (std::size_t i = 0; i < sites_.size(); ++i) {
        for (double w : sites_[i].frequency) {
            if (!(w > 0.0)) {
                throw InvalidGeometry("site " + std::to_string(i) +
                                      " has a non-positive trap frequency");
            }
        }
        for (std::size_t j = 0; j < i; ++j) {
            if ((sites_[i].position - sites_[j].position).norm() == 0.0) {
                throw InvalidGeometry("sites " + std::to_string(j) + " and " +
                                      std::to_string(i) + " coincide");
            }
        }
    }
}

std::optional<std::size_t> TrapArray::index_of(LatticeCoord c) const {
    for (std::size_t i = 0; i < sites_.size(); ++i) {
        if (sites_[i].coord == c) return i;
    }
    return std::nullopt;
}

std::vector<std::size_t> TrapArray::elementary_plaquette(LatticeCoord lower_left) const {
    const LatticeCoord corners[4] = {lower_left,
                                     {lower_left.x + 1, lower_left.y},
                                     {lower_left.x + 1, lower_left.y + 1},
                                     {lower_left.x, lower_left.y + 1}};
    std::vector<std::size_t> cycle;
    for (const auto& c : corners) {
        auto idx = index_of(c);
        if (!idx) return {};
        cycle.push_back(*idx);
    }
    return cycle;
}

namespace {

std::vector<LatticeCoord> layout_coords(const ArraySpec& spec) {
    std::vector<LatticeCoord> coords;
    switch (spec.layout) {
        case Layout::link:
            for (int i = 0; i < spec.dims[0]; ++i) coords.push_back({i, 0});
            break;
        case Layout::plaquette:
            // ring order so that the two paths to the opposite corner are 1-2-3 and 1-4-3
            coords = {{0, 0}, {1, 0}, {1, 1}, {0, 1}};
            break;
        case Layout::rhombic_ladder: {
            // cell j: hub b_j, upper leg a_j, lower leg c_j; plaquettes along the diagonal
            const int cells = spec.dims[0];
            for (int j = 0; j < cells; ++j) {
                coords.push_back({j, j});
                coords.push_back({j, j + 1});
                coords.push_back({j + 1, j});
            }
            coords.push_back({cells, cells});
            break;
        }
        case Layout::square:
            for (int y = 0; y < spec.dims[1]; ++y) {
                for (int x = 0; x < spec.dims[0]; ++x) coords.push_back({x, y});
            }
            break;
    }
    return coords;
}

}  // namespace

TrapArray build_array(const ArraySpec& spec) {
    if (spec.dims[0] < 1 || spec.dims[1] < 1) {
        throw InvalidGeometry("array dimensions must be >= 1 (got " +
                              std::to_string(spec.dims[0]) + "x" +
                              std::to_string(spec.dims[1]) + ")");
    }
    if (!(spec.spacings[0] > 0.0) || !(spec.spacings[1] > 0.0)) {
        throw InvalidGeometry("array spacings must be positive");
    }
    for (double w : spec.base_frequencies) {
        if (!(w > 0.0)) throw InvalidGeometry("base trap frequencies must be positive");
    }

    const auto g = static_cast<std::size_t>(spec.gradient_direction);
    std::vector<Site> sites;
    for (const auto& c : layout_coords(spec)) {
        Site s;
        s.coord = c;
        s.position = {c.x * spec.spacings[0], c.y * spec.spacings[1], 0.0};
        s.frequency = spec.base_frequencies;
        s.frequency[g] = spec.base_frequencies[g] + spec.gradient * c.x;
        sites.push_back(s);
    }
    return TrapArray(spec.layout, std::move(sites), spec.spacings[0], spec.spacings[1],
                     spec.gradient_direction, spec.gradient, spec.coulomb_strength);
}

DriveSpec DriveSpec::cosine(double frequency, double strength, int order, double phase_x,
                            double phase_y, Direction direction) {
    if (!(frequency > 0.0)) throw DomainError("drive frequency must be positive");
    if (strength < 0.0) throw DomainError("drive strength must be non-negative");
    if (order < 1) throw DomainError("resonance order must be >= 1");
    DriveSpec d;
    d.mode = DriveMode::cosine;
    d.frequency = frequency;
    d.strength = strength;
    d.order = order;
    d.phase_x = phase_x;
    d.phase_y = phase_y;
    d.direction = direction;
    return d;
}

DriveSpec DriveSpec::from_laser(const LaserParameters& laser, int order, double phase_x,
                                double phase_y, Direction direction) {
    if (!(laser.beat_frequency > 0.0)) throw DomainError("laser beat frequency must be positive");
    if (laser.rabi < 0.0) throw DomainError("Rabi frequency must be non-negative");
    const double eta = laser.lamb_dicke[static_cast<std::size_t>(direction)];
    if (eta < 0.0) throw DomainError("Lamb-Dicke parameter must be non-negative");
    DriveSpec d = cosine(laser.beat_frequency, laser.rabi * eta * eta / laser.beat_frequency,
                         order, phase_x, phase_y, direction);
    d.mode = DriveMode::laser;
    d.laser = laser;
    return d;
}

DriveSpec resonant_cosine_drive(const TrapArray& array, double strength, int order,
                                double phase_x, double phase_y) {
    if (order < 1) throw DomainError("resonance order must be >= 1");
    return DriveSpec::cosine(array.gradient() / order, strength, order, phase_x, phase_y,
                             array.gradient_direction());
}

}  // namespace phonon_gauge

#pragma once

#include <complex>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include <Eigen/Core>
#include <Eigen/SparseCore>

namespace phonon_gauge {

using Operator = Eigen::SparseMatrix<std::complex<double>, Eigen::RowMajor>;

inline constexpr std::size_t kDefaultFockCapacity = 1'000'000;

/// Truncated bosonic Fock space over n_sites modes with at most n_max quanta each.
/// Basis states are ordered lexicographically with site 0 varying slowest.
class FockSpace {
public:
    FockSpace(std::size_t n_sites, int n_max, std::size_t capacity = kDefaultFockCapacity);

    std::size_t sites() const noexcept { return n_sites_; }
    int n_max() const noexcept { return n_max_; }
    std::size_t dimension() const noexcept { return dim_; }
    std::size_t local_dimension() const noexcept { return static_cast<std::size_t>(n_max_) + 1; }

    /// Index step for one quantum on `site`.
    std::size_t stride(std::size_t site) const { return strides_.at(site); }

    int occupation(std::size_t index, std::size_t site) const {
        return occupations_[index * n_sites_ + site];
    }
    std::vector<int> occupations(std::size_t index) const;
    std::size_t index(std::span<const int> occupations) const;

    /// Index of a_site^dagger |0...0>.
    std::size_t single_excitation(std::size_t site) const;

private:
    std::size_t n_sites_;
    int n_max_;
    std::size_t dim_;
    std::vector<std::size_t> strides_;
    std::vector<std::uint16_t> occupations_;
};

FockSpace build_fock_space(std::size_t n_sites, int n_max,
                           std::size_t capacity = kDefaultFockCapacity);

enum class LadderKind { lower, raise, number };

/// a, a^dagger or a^dagger a acting on one site, identity elsewhere. The raising operator
/// annihilates the n_max state.
Operator ladder_matrix(const FockSpace& space, std::size_t site, LadderKind kind);

/// Embeds a (n_max+1)x(n_max+1) single-site matrix into the full space.
Operator embed_local(const FockSpace& space, std::size_t site, const Eigen::MatrixXcd& local);

/// a_to^dagger a_from.
Operator hopping_operator(const FockSpace& space, std::size_t to, std::size_t from);

/// exp(i eta (a + a^dagger)) on a single truncated mode, from the eigen-decomposition of
/// the truncated generator so the result is unitary to rounding.
Eigen::MatrixXcd local_displacement(int n_max, double eta);

Operator displacement_exponential(const FockSpace& space, std::size_t site, double eta);

/// Basis vector a_site^dagger |0>.
Eigen::VectorXcd single_excitation_state(const FockSpace& space, std::size_t site);

/// <a_i^dagger a_i> for every site.
Eigen::VectorXd site_populations(const FockSpace& space, const Eigen::VectorXcd& state);

}  // namespace phonon_gauge

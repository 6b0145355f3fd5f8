#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <stdexcept>
#include <vector>

#include "maxpot/common.hpp"

namespace maxpot {

/// Raised when a computed field contains NaN or infinities; the CLI maps it
/// to its own exit code so partial results are never written.
struct NumericalError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Regular node-centered box discretization of R^n, symmetric about the
/// origin. Node i along axis a sits at origin[a] + i*spacing, and each node
/// owns the cell of volume spacing^n centered on it, so the sampled box is
/// [-spacing*dims/2, spacing*dims/2] per axis.
struct Grid {
    int dim = 2;
    std::array<int, 3> dims{1, 1, 1};
    double spacing = 1.0;
    std::array<double, 3> origin{0.0, 0.0, 0.0};

    Grid() = default;
    Grid(int dim_, std::array<int, 3> dims_, double spacing_);

    /// Grid with res nodes per axis covering [-half_width, half_width]^n.
    static Grid centered(int dim, int res, double half_width);

    std::size_t node_count() const;
    double cell_volume() const;
    double half_width(int axis) const { return 0.5 * spacing * dims[axis]; }
    /// Length of the box diagonal (the largest possible |x - z|).
    double diameter() const;

    std::array<int, 3> unflatten(std::size_t flat) const;
    std::size_t flatten(int i, int j, int k = 0) const;
    Vec coord(int i, int j, int k = 0) const;
    Vec coord(std::size_t flat) const;
    bool contains(const Vec& x) const;

    double ball_volume() const { return unit_ball_volume(dim); }
    double sphere_area() const { return unit_sphere_area(dim); }

    bool operator==(const Grid& other) const;
};

/// Sampled function on a Grid, m components, treated as zero outside the
/// box. Storage is component-major, nodes row-major (matching the file
/// format).
struct Field {
    Grid grid;
    int components = 1;
    std::vector<double> data;
    /// Radius outside which samples are known to vanish; gates support
    /// checks, never correctness.
    std::optional<double> support_radius;

    Field() = default;
    Field(const Grid& g, int m);

    std::size_t nodes() const { return grid.node_count(); }
    double& at(int c, std::size_t node) { return data[static_cast<std::size_t>(c) * nodes() + node]; }
    double at(int c, std::size_t node) const { return data[static_cast<std::size_t>(c) * nodes() + node]; }
    std::span<double> component(int c);
    std::span<const double> component(int c) const;

    bool all_finite() const;
    /// Throws if any sample is NaN or infinite.
    void validate() const;
};

/// Samples fn(x, out[0..m-1]) at every node.
Field sample_function(const Grid& grid, int components,
                      const std::function<void(const Vec&, double*)>& fn);

/// Exponent pair for the homogeneous Sobolev norm: 1 < p < n and
/// p_star = n p / (n - p).
struct NormSettings {
    double p = 2.0;
    double p_star = 6.0;
    int dim = 3;

    NormSettings(double p_, int dim_);
};

}  // namespace maxpot

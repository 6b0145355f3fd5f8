#include "maxpot/grid.hpp"

#include <cmath>
#include <stdexcept>

namespace maxpot {

Grid::Grid(int dim_, std::array<int, 3> dims_, double spacing_)
    : dim(dim_), dims(dims_), spacing(spacing_) {
    if (dim != 2 && dim != 3) throw std::invalid_argument("Grid: dimension must be 2 or 3");
    if (!(spacing > 0.0)) throw std::invalid_argument("Grid: spacing must be positive");
    for (int a = 0; a < dim; ++a) {
        if (dims[a] < 16) throw std::invalid_argument("Grid: need at least 16 nodes per axis");
    }
    for (int a = dim; a < 3; ++a) dims[a] = 1;
    // Symmetric about the origin: |origin_a| = spacing*(dims_a - 1)/2.
    for (int a = 0; a < dim; ++a) origin[a] = -0.5 * spacing * (dims[a] - 1);
}

Grid Grid::centered(int dim, int res, double half_width) {
    if (res < 16) throw std::invalid_argument("Grid: need at least 16 nodes per axis");
    if (!(half_width > 0.0)) throw std::invalid_argument("Grid: half_width must be positive");
    const double h = 2.0 * half_width / res;
    std::array<int, 3> d{res, res, res};
    return Grid(dim, d, h);
}

std::size_t Grid::node_count() const {
    std::size_t n = 1;
    for (int a = 0; a < dim; ++a) n *= static_cast<std::size_t>(dims[a]);
    return n;
}

double Grid::cell_volume() const {
    double v = 1.0;
    for (int a = 0; a < dim; ++a) v *= spacing;
    return v;
}

double Grid::diameter() const {
    double s = 0.0;
    for (int a = 0; a < dim; ++a) {
        const double w = 2.0 * half_width(a);
        s += w * w;
    }
    return std::sqrt(s);
}

std::array<int, 3> Grid::unflatten(std::size_t flat) const {
    std::array<int, 3> idx{0, 0, 0};
    if (dim == 2) {
        idx[1] = static_cast<int>(flat % static_cast<std::size_t>(dims[1]));
        idx[0] = static_cast<int>(flat / static_cast<std::size_t>(dims[1]));
    } else {
        idx[2] = static_cast<int>(flat % static_cast<std::size_t>(dims[2]));
        const std::size_t rest = flat / static_cast<std::size_t>(dims[2]);
        idx[1] = static_cast<int>(rest % static_cast<std::size_t>(dims[1]));
        idx[0] = static_cast<int>(rest / static_cast<std::size_t>(dims[1]));
    }
    return idx;
}

std::size_t Grid::flatten(int i, int j, int k) const {
    if (dim == 2) return static_cast<std::size_t>(i) * dims[1] + j;
    return (static_cast<std::size_t>(i) * dims[1] + j) * static_cast<std::size_t>(dims[2]) + k;
}

Vec Grid::coord(int i, int j, int k) const {
    Vec x{origin[0] + spacing * i, origin[1] + spacing * j, 0.0};
    if (dim == 3) x[2] = origin[2] + spacing * k;
    return x;
}

Vec Grid::coord(std::size_t flat) const {
    const auto idx = unflatten(flat);
    return coord(idx[0], idx[1], idx[2]);
}

bool Grid::contains(const Vec& x) const {
    for (int a = 0; a < dim; ++a) {
        if (std::abs(x[a]) > half_width(a)) return false;
    }
    return true;
}

bool Grid::operator==(const Grid& other) const {
    return dim == other.dim && dims == other.dims && spacing == other.spacing &&
           origin == other.origin;
}

Field::Field(const Grid& g, int m) : grid(g), components(m) {
    if (m < 1) throw std::invalid_argument("Field: need at least one component");
    data.assign(static_cast<std::size_t>(m) * grid.node_count(), 0.0);
}

std::span<double> Field::component(int c) {
    return {data.data() + static_cast<std::size_t>(c) * nodes(), nodes()};
}

std::span<const double> Field::component(int c) const {
    return {data.data() + static_cast<std::size_t>(c) * nodes(), nodes()};
}

bool Field::all_finite() const {
    for (double v : data) {
        if (!std::isfinite(v)) return false;
    }
    return true;
}

void Field::validate() const {
    if (!all_finite()) throw NumericalError("Field: non-finite sample detected");
}

Field sample_function(const Grid& grid, int components,
                      const std::function<void(const Vec&, double*)>& fn) {
    Field f(grid, components);
    const std::size_t n = grid.node_count();
    std::vector<double> tmp;
    parallel_for_blocked(0, n, [&](std::size_t lo, std::size_t hi) {
        std::vector<double> vals(static_cast<std::size_t>(components));
        for (std::size_t node = lo; node < hi; ++node) {
            fn(grid.coord(node), vals.data());
            for (int c = 0; c < components; ++c) f.at(c, node) = vals[static_cast<std::size_t>(c)];
        }
    });
    return f;
}

NormSettings::NormSettings(double p_, int dim_) : p(p_), dim(dim_) {
    if (dim != 2 && dim != 3) throw std::invalid_argument("NormSettings: dimension must be 2 or 3");
    if (!(p > 1.0) || !(p < dim)) throw std::invalid_argument("NormSettings: need 1 < p < n");
    p_star = dim * p / (dim - p);
}

}  // namespace maxpot

#include "maxpot/field_math.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace maxpot {

namespace {

double node_magnitude(const Field& f, std::size_t node) {
    if (f.components == 1) return std::abs(f.data[node]);
    double s = 0.0;
    for (int c = 0; c < f.components; ++c) {
        const double v = f.at(c, node);
        s += v * v;
    }
    return std::sqrt(s);
}

}  // namespace

double lp_norm(const Field& f, double p) {
    if (!(p >= 1.0)) throw std::invalid_argument("lp_norm: p must be >= 1");
    const std::size_t n = f.nodes();
    if (std::isinf(p)) return max_abs(f);
    std::vector<double> terms(n);
    const double vol = f.grid.cell_volume();
    parallel_for_blocked(0, n, [&](std::size_t lo, std::size_t hi) {
        for (std::size_t i = lo; i < hi; ++i) {
            terms[i] = std::pow(node_magnitude(f, i), p) * vol;
        }
    });
    return std::pow(pairwise_sum(terms), 1.0 / p);
}

double max_abs(const Field& f) {
    double m = 0.0;
    for (std::size_t i = 0; i < f.nodes(); ++i) m = std::max(m, node_magnitude(f, i));
    return m;
}

Field fd_gradient(const Field& f) {
    if (f.components != 1) throw std::invalid_argument("fd_gradient: scalar field required");
    const Grid& g = f.grid;
    const int n = g.dim;
    Field out(g, n);
    const double h = g.spacing;

    std::array<std::size_t, 3> stride{};
    stride[n - 1] = 1;
    for (int a = n - 2; a >= 0; --a) {
        stride[a] = stride[a + 1] * static_cast<std::size_t>(g.dims[a + 1]);
    }

    parallel_for_blocked(0, g.node_count(), [&](std::size_t lo, std::size_t hi) {
        for (std::size_t node = lo; node < hi; ++node) {
            const auto idx = g.unflatten(node);
            for (int a = 0; a < n; ++a) {
                const int i = idx[a];
                double d;
                if (i == 0) {
                    d = (f.data[node + stride[a]] - f.data[node]) / h;
                } else if (i == g.dims[a] - 1) {
                    d = (f.data[node] - f.data[node - stride[a]]) / h;
                } else {
                    d = (f.data[node + stride[a]] - f.data[node - stride[a]]) / (2.0 * h);
                }
                out.at(a, node) = d;
            }
        }
    });
    return out;
}

void interpolate(const Field& f, const Vec& x, double* out) {
    const Grid& g = f.grid;
    const int n = g.dim;
    for (int c = 0; c < f.components; ++c) out[c] = 0.0;
    if (!g.contains(x)) return;

    // Cell-local coordinates; corners outside the node range act as ghost
    // zeros, which realizes the zero-extension convention continuously.
    std::array<int, 3> base{0, 0, 0};
    std::array<double, 3> frac{0.0, 0.0, 0.0};
    for (int a = 0; a < n; ++a) {
        const double s = (x[a] - g.origin[a]) / g.spacing;
        double fl = std::floor(s);
        base[a] = static_cast<int>(fl);
        frac[a] = s - fl;
    }
    const int corners = 1 << n;
    for (int mask = 0; mask < corners; ++mask) {
        double w = 1.0;
        std::array<int, 3> idx{0, 0, 0};
        bool live = true;
        for (int a = 0; a < n; ++a) {
            const int up = (mask >> a) & 1;
            idx[a] = base[a] + up;
            w *= up ? frac[a] : 1.0 - frac[a];
            if (idx[a] < 0 || idx[a] >= g.dims[a]) live = false;
        }
        if (!live || w == 0.0) continue;
        const std::size_t node = g.flatten(idx[0], idx[1], idx[2]);
        for (int c = 0; c < f.components; ++c) out[c] += w * f.at(c, node);
    }
}

double interpolate_scalar(const Field& f, const Vec& x) {
    if (f.components != 1) throw std::invalid_argument("interpolate_scalar: scalar field required");
    double v;
    interpolate(f, x, &v);
    return v;
}

std::pair<double, double> sobolev_seminorm_pair(const Field& f, const NormSettings& settings) {
    if (settings.dim != f.grid.dim) {
        throw std::invalid_argument("sobolev_seminorm_pair: dimension mismatch");
    }
    const double term_pstar = lp_norm(f, settings.p_star);
    const double term_grad = lp_norm(fd_gradient(f), settings.p);
    return {term_pstar, term_grad};
}

Field magnitude_field(const Field& f) {
    Field out(f.grid, 1);
    parallel_for_blocked(0, f.nodes(), [&](std::size_t lo, std::size_t hi) {
        for (std::size_t i = lo; i < hi; ++i) out.data[i] = node_magnitude(f, i);
    });
    return out;
}

Field scaled(const Field& f, double factor) {
    Field out = f;
    for (double& v : out.data) v *= factor;
    return out;
}

Field added(const Field& f, const Field& g) {
    if (!(f.grid == g.grid) || f.components != g.components) {
        throw std::invalid_argument("added: incompatible fields");
    }
    Field out = f;
    for (std::size_t i = 0; i < out.data.size(); ++i) out.data[i] += g.data[i];
    return out;
}

}  // namespace maxpot

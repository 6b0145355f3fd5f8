#include "maxpot/operators.hpp"

#include <cmath>
#include <iostream>
#include <stdexcept>

namespace maxpot {

namespace {

void check_field_vs_spec(const Field& f, const KernelSpec& spec) {
    if (f.grid.dim != spec.dim()) throw std::invalid_argument("operator: dimension mismatch");
    if (f.components != spec.components()) {
        throw std::invalid_argument("operator: field/kernel component mismatch");
    }
}

void check_radius(const Field& f, double t) {
    if (t < f.grid.spacing * (1.0 - 1e-12)) {
        throw std::invalid_argument("operator: truncation radius below grid spacing");
    }
}

void check_ladder(const Field& f, const RadiusLadder& ladder) {
    if (ladder.radii.empty()) throw std::invalid_argument("operator: empty radius ladder");
    check_radius(f, ladder.radii.front());
}

std::vector<TruncatedConvolver::KernelFn> component_fns(const KernelSpec& spec) {
    std::vector<TruncatedConvolver::KernelFn> fns;
    for (int c = 0; c < spec.components(); ++c) fns.push_back(kernel_component_fn(spec, c));
    return fns;
}

}  // namespace

RadiusLadder RadiusLadder::geometric(double t_min, double t_max, double ratio) {
    if (!(t_min > 0.0)) throw std::invalid_argument("RadiusLadder: t_min must be positive");
    if (!(ratio > 1.0)) throw std::invalid_argument("RadiusLadder: ratio must exceed 1");
    if (!(t_max >= t_min)) throw std::invalid_argument("RadiusLadder: t_max must be >= t_min");
    RadiusLadder ladder;
    ladder.t_min = t_min;
    ladder.t_max = t_max;
    ladder.ratio = ratio;
    for (double t = t_min; t <= t_max * (1.0 + 1e-12); t *= ratio) ladder.radii.push_back(t);
    return ladder;
}

RadiusLadder RadiusLadder::defaults(const Grid& grid) {
    return geometric(grid.spacing, grid.diameter(), std::pow(2.0, 0.25));
}

TruncatedConvolver::KernelFn kernel_component_fn(const KernelSpec& spec, int comp) {
    if (spec.degree == KernelDegree::Potential) {
        return [spec, comp](const Vec& d) {
            std::array<double, 3> vals{};
            ktilde_eval(spec, d, vals.data());
            return vals[static_cast<std::size_t>(comp)];
        };
    }
    return [spec, comp](const Vec& d) {
        std::array<double, 3> vals{};
        ksing_eval(spec, d, vals.data());
        return vals[static_cast<std::size_t>(comp)];
    };
}

TruncatedConvolver::KernelFn grad_kernel_component_fn(const KernelSpec& spec, int comp, int axis) {
    return [spec, comp, axis](const Vec& d) {
        std::array<double, 9> entries{};
        grad_ktilde(spec, d, entries.data());
        return entries[static_cast<std::size_t>(comp) * spec.dim() + axis];
    };
}

Field truncated_potential(const Field& f, const KernelSpec& spec, double t,
                          const TruncationPolicy& policy, ConvMethod method) {
    if (spec.degree != KernelDegree::Potential) {
        throw std::invalid_argument("truncated_potential: kernel degree must be -(n-1)");
    }
    check_field_vs_spec(f, spec);
    check_radius(f, t);
    TruncatedConvolver conv(f.grid, component_fns(spec), 0.0, policy);
    return conv.apply(f, t, method);
}

Field maximal_potential(const Field& f, const KernelSpec& spec, const RadiusLadder& ladder,
                        const TruncationPolicy& policy, ConvMethod method) {
    if (spec.degree != KernelDegree::Potential) {
        throw std::invalid_argument("maximal_potential: kernel degree must be -(n-1)");
    }
    check_field_vs_spec(f, spec);
    check_ladder(f, ladder);
    TruncatedConvolver conv(f.grid, component_fns(spec), 0.0, policy);
    return conv.apply_abs_max(f, ladder.radii, method);
}

Field riesz_potential(const Field& g, ConvMethod method) {
    if (g.components != 1) throw std::invalid_argument("riesz_potential: scalar field required");
    const int n = g.grid.dim;
    const double omega = unit_ball_volume(n);
    const double r_equiv = std::pow(g.grid.cell_volume() / omega, 1.0 / n);
    const double center = unit_sphere_area(n) * r_equiv;
    TruncatedConvolver conv(
        g.grid, {[n](const Vec& d) { return std::pow(norm(d), 1 - n); }}, center,
        TruncationPolicy::center_indicator());
    return conv.apply(g, 0.0, method);
}

Field truncated_singular(const Field& f, const KernelSpec& spec, double t,
                         const TruncationPolicy& policy, ConvMethod method) {
    if (spec.degree != KernelDegree::Singular) {
        throw std::invalid_argument("truncated_singular: kernel degree must be -n");
    }
    check_field_vs_spec(f, spec);
    check_radius(f, t);
    TruncatedConvolver conv(f.grid, component_fns(spec), 0.0, policy);
    return conv.apply(f, t, method);
}

Field maximal_singular(const Field& f, const KernelSpec& spec, const RadiusLadder& ladder,
                       const TruncationPolicy& policy, ConvMethod method) {
    if (spec.degree != KernelDegree::Singular) {
        throw std::invalid_argument("maximal_singular: kernel degree must be -n");
    }
    check_field_vs_spec(f, spec);
    check_ladder(f, ladder);
    TruncatedConvolver conv(f.grid, component_fns(spec), 0.0, policy);
    return conv.apply_abs_max(f, ladder.radii, method);
}

Field surface_convolution(const Field& f, const SphereSymbol& symbol, double t,
                          const SphereQuadrature& quad) {
    const Grid& g = f.grid;
    const int n = g.dim;
    if (symbol.dim != n || quad.dim != n) {
        throw std::invalid_argument("surface_convolution: dimension mismatch");
    }
    if (f.components != symbol.components) {
        throw std::invalid_argument("surface_convolution: component mismatch");
    }
    check_radius(f, t);
    if (t > g.diameter()) {
        std::cerr << "surface_convolution: radius " << t
                  << " exceeds the box diameter; zero extension dominates\n";
    }

    // Scaling to S(0,t) cancels: t^{1-n} * t^{n-1} dsigma leaves unit-sphere
    // weights against f(x - t u).
    const int m = symbol.components;
    const std::size_t Q = quad.nodes.size();
    std::vector<double> omega_vals(Q * static_cast<std::size_t>(m));
    for (std::size_t q = 0; q < Q; ++q) {
        symbol.eval(quad.nodes[q], omega_vals.data() + q * static_cast<std::size_t>(m));
    }

    Field out(g, n);
    parallel_for_blocked(0, g.node_count(), [&](std::size_t lo, std::size_t hi) {
        std::array<double, 3> fv{};
        for (std::size_t node = lo; node < hi; ++node) {
            const Vec x = g.coord(node);
            std::array<double, 3> acc{0.0, 0.0, 0.0};
            for (std::size_t q = 0; q < Q; ++q) {
                const Vec& u = quad.nodes[q];
                interpolate(f, x - t * u, fv.data());
                double pai = 0.0;
                for (int i = 0; i < m; ++i) pai += fv[static_cast<std::size_t>(i)] *
                                                   omega_vals[q * static_cast<std::size_t>(m) + i];
                const double wq = quad.weights[q] * pai;
                for (int j = 0; j < n; ++j) acc[static_cast<std::size_t>(j)] += wq * u[j];
            }
            for (int j = 0; j < n; ++j) out.at(j, node) = acc[static_cast<std::size_t>(j)];
        }
    });
    return out;
}

Field grad_truncated_potential(const Field& f, const KernelSpec& spec, double t,
                               const TruncationPolicy& policy, const SphereQuadrature& quad,
                               ConvMethod method) {
    if (spec.degree != KernelDegree::Potential) {
        throw std::invalid_argument("grad_truncated_potential: kernel degree must be -(n-1)");
    }
    check_field_vs_spec(f, spec);
    check_radius(f, t);
    const int n = spec.dim();
    Field out(f.grid, n);
    for (int j = 0; j < n; ++j) {
        std::vector<TruncatedConvolver::KernelFn> fns;
        for (int i = 0; i < spec.components(); ++i) fns.push_back(grad_kernel_component_fn(spec, i, j));
        TruncatedConvolver conv(f.grid, std::move(fns), 0.0, policy);
        const Field term = conv.apply(f, t, method);
        std::copy(term.data.begin(), term.data.end(), out.component(j).begin());
    }
    const Field surf = surface_convolution(f, spec.symbol, t, quad);
    for (std::size_t i = 0; i < out.data.size(); ++i) out.data[i] += surf.data[i];
    return out;
}

Field grad_majorant(const Field& f, const KernelSpec& spec, const RadiusLadder& ladder,
                    const TruncationPolicy& policy, const SphereQuadrature& quad,
                    ConvMethod method) {
    if (spec.degree != KernelDegree::Potential) {
        throw std::invalid_argument("grad_majorant: kernel degree must be -(n-1)");
    }
    check_field_vs_spec(f, spec);
    check_ladder(f, ladder);
    const int n = spec.dim();
    const std::size_t nodes = f.nodes();

    // Truncated gradient-kernel convolutions per axis, all radii at once so
    // the field transform is reused across the ladder.
    std::vector<std::vector<Field>> term(static_cast<std::size_t>(n));
    for (int j = 0; j < n; ++j) {
        std::vector<TruncatedConvolver::KernelFn> fns;
        for (int i = 0; i < spec.components(); ++i) fns.push_back(grad_kernel_component_fn(spec, i, j));
        TruncatedConvolver conv(f.grid, std::move(fns), 0.0, policy);
        term[static_cast<std::size_t>(j)] = conv.apply_all(f, ladder.radii, method);
    }

    Field out(f.grid, 1);
    for (std::size_t ti = 0; ti < ladder.radii.size(); ++ti) {
        const Field surf = surface_convolution(f, spec.symbol, ladder.radii[ti], quad);
        parallel_for_blocked(0, nodes, [&](std::size_t lo, std::size_t hi) {
            for (std::size_t node = lo; node < hi; ++node) {
                double s = 0.0;
                for (int j = 0; j < n; ++j) {
                    const double v = term[static_cast<std::size_t>(j)][ti].data[node] + surf.at(j, node);
                    s += v * v;
                }
                out.data[node] = std::max(out.data[node], std::sqrt(s));
            }
        });
    }
    return out;
}

Field spherical_average(const Field& f, double t, const SphereQuadrature& quad) {
    if (f.components != 1) throw std::invalid_argument("spherical_average: scalar field required");
    const Grid& g = f.grid;
    if (quad.dim != g.dim) throw std::invalid_argument("spherical_average: dimension mismatch");
    check_radius(f, t);
    const double area = unit_sphere_area(g.dim);
    Field out(g, 1);
    parallel_for_blocked(0, g.node_count(), [&](std::size_t lo, std::size_t hi) {
        for (std::size_t node = lo; node < hi; ++node) {
            const Vec x = g.coord(node);
            double acc = 0.0;
            for (std::size_t q = 0; q < quad.nodes.size(); ++q) {
                acc += quad.weights[q] * interpolate_scalar(f, x + t * quad.nodes[q]);
            }
            out.data[node] = acc / area;
        }
    });
    return out;
}

Field spherical_maximal(const Field& f, const RadiusLadder& ladder, const SphereQuadrature& quad,
                        bool use_abs) {
    if (f.components != 1) throw std::invalid_argument("spherical_maximal: scalar field required");
    check_ladder(f, ladder);
    Field source = f;
    if (use_abs) {
        for (double& v : source.data) v = std::abs(v);
    }
    Field out(f.grid, 1);
    for (double t : ladder.radii) {
        const Field avg = spherical_average(source, t, quad);
        parallel_for_blocked(0, out.nodes(), [&](std::size_t lo, std::size_t hi) {
            for (std::size_t i = lo; i < hi; ++i) {
                const double v = use_abs ? avg.data[i] : std::abs(avg.data[i]);
                out.data[i] = std::max(out.data[i], v);
            }
        });
    }
    return out;
}

Field spherical_via_gradient(const Field& f, const RadiusLadder& ladder,
                             const TruncationPolicy& policy, ConvMethod method) {
    if (f.components != 1) throw std::invalid_argument("spherical_via_gradient: scalar field required");
    const int n = f.grid.dim;
    const Field grad = fd_gradient(f);
    const KernelSpec spec = KernelSpec::potential(make_symbol("identity", n));
    Field out = maximal_potential(grad, spec, ladder, policy, method);
    const double scale = 1.0 / unit_sphere_area(n);
    for (double& v : out.data) v *= scale;
    return out;
}

}  // namespace maxpot

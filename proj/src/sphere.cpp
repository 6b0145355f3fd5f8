#include "maxpot/sphere.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace maxpot {

namespace {

constexpr double kZeroMeanTolerance = 1e-8;

Vec unit(const Vec& x) {
    const double r = norm(x);
    if (r == 0.0) throw std::domain_error("kernel evaluation at x = 0");
    return {x[0] / r, x[1] / r, x[2] / r};
}

/// Spherical mean of exp(u_1): 2*pi*I_0(1) for n=2, 4*pi*sinh(1) for n=3.
double exp_symbol_mean(int dim) {
    if (dim == 2) return 2.0 * M_PI * std::cyl_bessel_i(0.0, 1.0);
    return 2.0 * M_PI * (std::exp(1.0) - std::exp(-1.0));
}

}  // namespace

void gauss_legendre(int npoints, std::vector<double>& nodes, std::vector<double>& weights) {
    if (npoints < 1) throw std::invalid_argument("gauss_legendre: need at least one point");
    nodes.assign(npoints, 0.0);
    weights.assign(npoints, 0.0);
    const int n = npoints;
    for (int i = 0; i < (n + 1) / 2; ++i) {
        // Chebyshev initial guess, then Newton on P_n.
        double x = std::cos(M_PI * (i + 0.75) / (n + 0.5));
        double pp = 0.0;
        for (int iter = 0; iter < 100; ++iter) {
            double p0 = 1.0, p1 = 0.0;
            for (int j = 0; j < n; ++j) {
                const double p2 = p1;
                p1 = p0;
                p0 = ((2.0 * j + 1.0) * x * p1 - j * p2) / (j + 1.0);
            }
            pp = n * (x * p0 - p1) / (x * x - 1.0);
            const double dx = p0 / pp;
            x -= dx;
            if (std::abs(dx) < 1e-15) break;
        }
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = 2.0 / ((1.0 - x * x) * pp * pp);
        weights[n - 1 - i] = weights[i];
    }
}

SphereQuadrature sphere_quadrature(int dim, int order) {
    if (dim != 2 && dim != 3) throw std::invalid_argument("sphere_quadrature: dimension must be 2 or 3");
    if (order < 8) throw std::invalid_argument("sphere_quadrature: order must be >= 8");
    SphereQuadrature q;
    q.dim = dim;
    q.order = order;
    if (dim == 2) {
        const double w = 2.0 * M_PI / order;
        q.nodes.reserve(order);
        q.weights.assign(order, w);
        for (int k = 0; k < order; ++k) {
            const double theta = 2.0 * M_PI * k / order;
            q.nodes.push_back(vec(std::cos(theta), std::sin(theta)));
        }
    } else {
        // order Gauss-Legendre points in cos(theta) x 2*order trapezoid in phi.
        std::vector<double> gl_nodes, gl_weights;
        gauss_legendre(order, gl_nodes, gl_weights);
        const int nphi = 2 * order;
        const double wphi = 2.0 * M_PI / nphi;
        q.nodes.reserve(static_cast<std::size_t>(order) * nphi);
        q.weights.reserve(static_cast<std::size_t>(order) * nphi);
        for (int i = 0; i < order; ++i) {
            const double c = gl_nodes[i];
            const double s = std::sqrt(std::max(0.0, 1.0 - c * c));
            for (int k = 0; k < nphi; ++k) {
                const double phi = 2.0 * M_PI * k / nphi;
                q.nodes.push_back(vec(s * std::cos(phi), s * std::sin(phi), c));
                q.weights.push_back(gl_weights[i] * wphi);
            }
        }
    }
    return q;
}

SphereSymbol make_symbol(const std::string& id, int dim, int axis) {
    if (dim != 2 && dim != 3) throw std::invalid_argument("make_symbol: dimension must be 2 or 3");
    SphereSymbol s;
    s.dim = dim;
    s.catalog_id = id;

    if (id == "one") {
        s.components = 1;
        s.sup_norm_bound = 1.0;
        s.eval = [](const Vec&, double* out) { out[0] = 1.0; };
        s.grad_extension = [dim](const Vec&, double* out) {
            for (int j = 0; j < dim; ++j) out[j] = 0.0;
        };
    } else if (id == "identity") {
        s.components = dim;
        s.sup_norm_bound = 1.0;
        s.eval = [dim](const Vec& u, double* out) {
            for (int i = 0; i < dim; ++i) out[i] = u[i];
        };
        s.grad_extension = [dim](const Vec& x, double* out) {
            const double r = norm(x);
            const double r3 = r * r * r;
            for (int i = 0; i < dim; ++i) {
                for (int j = 0; j < dim; ++j) {
                    out[i * dim + j] = (i == j ? 1.0 / r : 0.0) - x[i] * x[j] / r3;
                }
            }
        };
    } else if (id == "coordinate") {
        if (axis < 0 || axis >= dim) throw std::invalid_argument("make_symbol: axis out of range");
        s.components = 1;
        s.sup_norm_bound = 1.0;
        s.catalog_id = "coordinate" + std::to_string(axis);
        s.eval = [axis](const Vec& u, double* out) { out[0] = u[axis]; };
        s.grad_extension = [dim, axis](const Vec& x, double* out) {
            const double r = norm(x);
            const double r3 = r * r * r;
            for (int j = 0; j < dim; ++j) {
                out[j] = (j == axis ? 1.0 / r : 0.0) - x[axis] * x[j] / r3;
            }
        };
    } else if (id == "harmonic2") {
        s.components = 1;
        s.sup_norm_bound = 1.0;
        s.eval = [](const Vec& u, double* out) { out[0] = u[0] * u[0] - u[1] * u[1]; };
        s.grad_extension = [dim](const Vec& x, double* out) {
            const double r2 = dot(x, x);
            const double q = x[0] * x[0] - x[1] * x[1];
            for (int j = 0; j < dim; ++j) {
                const double lead = j == 0 ? 2.0 * x[0] : (j == 1 ? -2.0 * x[1] : 0.0);
                out[j] = lead / r2 - 2.0 * q * x[j] / (r2 * r2);
            }
        };
    } else if (id == "exp_centered") {
        const double mu = exp_symbol_mean(dim) / unit_sphere_area(dim);
        s.components = 1;
        s.sup_norm_bound = std::exp(1.0) - mu;
        s.eval = [mu](const Vec& u, double* out) { out[0] = std::exp(u[0]) - mu; };
        s.grad_extension = [dim](const Vec& x, double* out) {
            const double r = norm(x);
            const double e = std::exp(x[0] / r);
            const double r3 = r * r * r;
            for (int j = 0; j < dim; ++j) {
                out[j] = e * ((j == 0 ? 1.0 / r : 0.0) - x[0] * x[j] / r3);
            }
        };
    } else {
        throw std::invalid_argument("make_symbol: unknown symbol id '" + id + "'");
    }

    // The declared bound must dominate the symbol on a reference quadrature.
    const SphereQuadrature check = sphere_quadrature(dim, 16);
    std::vector<double> vals(static_cast<std::size_t>(s.components));
    for (const Vec& u : check.nodes) {
        s.eval(u, vals.data());
        double mag = 0.0;
        for (double v : vals) mag += v * v;
        if (std::sqrt(mag) > s.sup_norm_bound * (1.0 + 1e-12)) {
            throw std::logic_error("make_symbol: sup_norm_bound violated at a quadrature node");
        }
    }
    return s;
}

std::vector<std::string> symbol_catalog_names() {
    return {"one", "identity", "coordinate", "harmonic2", "exp_centered"};
}

KernelSpec KernelSpec::potential(SphereSymbol symbol) {
    KernelSpec spec;
    spec.symbol = std::move(symbol);
    spec.degree = KernelDegree::Potential;
    return spec;
}

KernelSpec KernelSpec::singular(SphereSymbol symbol, const SphereQuadrature& quad) {
    if (quad.dim != symbol.dim) throw std::invalid_argument("KernelSpec: quadrature dimension mismatch");
    const auto mean = symbol_integral(symbol, quad);
    for (double v : mean) {
        if (std::abs(v) > kZeroMeanTolerance) {
            throw std::invalid_argument("KernelSpec: singular kernel requires a zero-mean symbol");
        }
    }
    KernelSpec spec;
    spec.symbol = std::move(symbol);
    spec.degree = KernelDegree::Singular;
    return spec;
}

void ktilde_eval(const KernelSpec& spec, const Vec& x, double* out) {
    if (spec.degree != KernelDegree::Potential) {
        throw std::invalid_argument("ktilde_eval: kernel degree must be -(n-1)");
    }
    const double r = norm(x);
    if (r == 0.0) throw std::domain_error("ktilde_eval: x = 0");
    const Vec u = unit(x);
    spec.symbol.eval(u, out);
    const double scale = std::pow(r, -(spec.dim() - 1));
    for (int i = 0; i < spec.components(); ++i) out[i] *= scale;
}

void ksing_eval(const KernelSpec& spec, const Vec& x, double* out) {
    if (spec.degree != KernelDegree::Singular) {
        throw std::invalid_argument("ksing_eval: kernel degree must be -n");
    }
    const double r = norm(x);
    if (r == 0.0) throw std::domain_error("ksing_eval: x = 0");
    const Vec u = unit(x);
    spec.symbol.eval(u, out);
    const double scale = std::pow(r, -spec.dim());
    for (int i = 0; i < spec.components(); ++i) out[i] *= scale;
}

void grad_ktilde(const KernelSpec& spec, const Vec& x, double* out) {
    if (spec.degree != KernelDegree::Potential) {
        throw std::invalid_argument("grad_ktilde: kernel degree must be -(n-1)");
    }
    const double r = norm(x);
    if (r == 0.0) throw std::domain_error("grad_ktilde: x = 0");
    const int n = spec.dim();
    const int m = spec.components();
    const Vec u = unit(x);

    if (spec.symbol.grad_extension) {
        // grad K~_i = |x|^{1-n} grad[Omega_i(x/|x|)] + (1-n)|x|^{-n-1} x Omega_i.
        std::vector<double> grad_omega(static_cast<std::size_t>(m) * n);
        std::vector<double> omega(static_cast<std::size_t>(m));
        spec.symbol.grad_extension(x, grad_omega.data());
        spec.symbol.eval(u, omega.data());
        const double rp = std::pow(r, 1 - n);
        const double rq = (1.0 - n) * std::pow(r, -n - 1);
        for (int i = 0; i < m; ++i) {
            for (int j = 0; j < n; ++j) {
                out[i * n + j] = rp * grad_omega[static_cast<std::size_t>(i) * n + j] +
                                 rq * x[j] * omega[static_cast<std::size_t>(i)];
            }
        }
        return;
    }

    // Numeric path: differentiate at the unit point and scale by |x|^{-n},
    // which is exact under the degree -n homogeneity of grad K~.
    const double delta = 1e-5;
    const double scale = std::pow(r, -n);
    std::vector<double> plus(static_cast<std::size_t>(m)), minus(static_cast<std::size_t>(m));
    KernelSpec probe = spec;  // same symbol, evaluated directly
    for (int j = 0; j < n; ++j) {
        Vec up = u, um = u;
        up[j] += delta;
        um[j] -= delta;
        ktilde_eval(probe, up, plus.data());
        ktilde_eval(probe, um, minus.data());
        for (int i = 0; i < m; ++i) {
            out[i * n + j] = scale * (plus[static_cast<std::size_t>(i)] - minus[static_cast<std::size_t>(i)]) /
                             (2.0 * delta);
        }
    }
}

std::vector<double> symbol_integral(const SphereSymbol& symbol, const SphereQuadrature& quad) {
    if (quad.dim != symbol.dim) throw std::invalid_argument("symbol_integral: dimension mismatch");
    const int m = symbol.components;
    std::vector<std::vector<double>> terms(static_cast<std::size_t>(m),
                                           std::vector<double>(quad.nodes.size()));
    std::vector<double> vals(static_cast<std::size_t>(m));
    for (std::size_t q = 0; q < quad.nodes.size(); ++q) {
        symbol.eval(quad.nodes[q], vals.data());
        for (int i = 0; i < m; ++i) terms[static_cast<std::size_t>(i)][q] = quad.weights[q] * vals[static_cast<std::size_t>(i)];
    }
    std::vector<double> result(static_cast<std::size_t>(m));
    for (int i = 0; i < m; ++i) result[static_cast<std::size_t>(i)] = pairwise_sum(terms[static_cast<std::size_t>(i)]);
    return result;
}

BoundaryConstants boundary_constants(const KernelSpec& spec, const SphereQuadrature& quad) {
    if (spec.degree != KernelDegree::Potential) {
        throw std::invalid_argument("boundary_constants: kernel degree must be -(n-1)");
    }
    if (quad.dim != spec.dim()) throw std::invalid_argument("boundary_constants: dimension mismatch");
    const int m = spec.components();
    const int n = spec.dim();
    BoundaryConstants bc;
    bc.components = m;
    bc.dim = n;
    bc.c.assign(static_cast<std::size_t>(m) * n, 0.0);
    // On the unit sphere K~ = Omega, so c[i][j] = int Omega_i(u) u_j dsigma.
    std::vector<double> vals(static_cast<std::size_t>(m));
    std::vector<std::vector<double>> terms(bc.c.size(), std::vector<double>(quad.nodes.size()));
    for (std::size_t q = 0; q < quad.nodes.size(); ++q) {
        spec.symbol.eval(quad.nodes[q], vals.data());
        for (int i = 0; i < m; ++i) {
            for (int j = 0; j < n; ++j) {
                terms[static_cast<std::size_t>(i) * n + j][q] =
                    quad.weights[q] * vals[static_cast<std::size_t>(i)] * quad.nodes[q][j];
            }
        }
    }
    for (std::size_t e = 0; e < bc.c.size(); ++e) bc.c[e] = pairwise_sum(terms[e]);
    return bc;
}

double grad_zero_mean_residual(const KernelSpec& spec, const SphereQuadrature& quad) {
    if (spec.degree != KernelDegree::Potential) {
        throw std::invalid_argument("grad_zero_mean_residual: kernel degree must be -(n-1)");
    }
    const int m = spec.components();
    const int n = spec.dim();
    std::vector<double> entry(static_cast<std::size_t>(m) * n);
    std::vector<std::vector<double>> terms(entry.size(), std::vector<double>(quad.nodes.size()));
    for (std::size_t q = 0; q < quad.nodes.size(); ++q) {
        grad_ktilde(spec, quad.nodes[q], entry.data());
        for (std::size_t e = 0; e < entry.size(); ++e) terms[e][q] = quad.weights[q] * entry[e];
    }
    double worst = 0.0;
    for (std::size_t e = 0; e < entry.size(); ++e) worst = std::max(worst, std::abs(pairwise_sum(terms[e])));
    return worst;
}

}  // namespace maxpot

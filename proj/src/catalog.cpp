#include "maxpot/catalog.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>

namespace maxpot {

namespace {

double get(const CatalogParams& p, const std::string& key, double fallback) {
    auto it = p.find(key);
    return it == p.end() ? fallback : it->second;
}

double bump_profile(double r, double r0, double R) {
    if (r <= r0) return 1.0;
    if (r >= R) return 0.0;
    return smooth_step_down((r - r0) / (R - r0));
}

}  // namespace

double smooth_step_down(double s) {
    if (s <= 0.0) return 1.0;
    if (s >= 1.0) return 0.0;
    const double a = std::exp(-1.0 / (1.0 - s));
    const double b = std::exp(-1.0 / s);
    return a / (a + b);
}

Field sample_catalog(const std::string& name, const CatalogParams& params, const Grid& grid) {
    const int n = grid.dim;
    Field f(grid, 1);

    if (name == "gaussian") {
        const double sigma = get(params, "sigma", 1.0);
        if (!(sigma > 0.0)) throw std::invalid_argument("gaussian: sigma must be positive");
        const Vec c = vec(get(params, "cx", 0.0), get(params, "cy", 0.0), get(params, "cz", 0.0));
        f = sample_function(grid, 1, [&](const Vec& x, double* out) {
            const Vec d = x - c;
            out[0] = std::exp(-dot(d, d) / (sigma * sigma));
        });
        return f;
    }
    if (name == "ball_indicator") {
        const double R = get(params, "R", 1.0);
        if (!(R > 0.0)) throw std::invalid_argument("ball_indicator: R must be positive");
        f = sample_function(grid, 1, [&](const Vec& x, double* out) {
            out[0] = norm(x) < R ? 1.0 : 0.0;
        });
        f.support_radius = R;
        return f;
    }
    if (name == "smooth_bump") {
        const double r0 = get(params, "r0", 0.5);
        const double R = get(params, "R", 1.5);
        if (!(0.0 <= r0 && r0 < R)) throw std::invalid_argument("smooth_bump: need 0 <= r0 < R");
        f = sample_function(grid, 1, [&](const Vec& x, double* out) {
            out[0] = bump_profile(norm(x), r0, R);
        });
        f.support_radius = R;
        return f;
    }
    if (name == "truncated_power") {
        const double a = get(params, "a", 0.5);
        if (!(a > 0.0 && a < n)) throw std::invalid_argument("truncated_power: need 0 < a < n");
        const double clip = std::pow(grid.spacing, -a);
        f = sample_function(grid, 1, [&](const Vec& x, double* out) {
            const double r = norm(x);
            out[0] = r < grid.spacing ? clip : std::pow(r, -a);
        });
        return f;
    }
    if (name == "half_space") {
        const int axis = static_cast<int>(get(params, "axis", 0.0));
        const double offset = get(params, "offset", 0.0);
        if (axis < 0 || axis >= n) throw std::invalid_argument("half_space: axis out of range");
        f = sample_function(grid, 1, [&](const Vec& x, double* out) {
            out[0] = x[axis] > offset ? 1.0 : 0.0;
        });
        return f;
    }
    if (name == "random_bandlimited") {
        const auto seed = static_cast<std::uint64_t>(get(params, "seed", 1.0));
        const int kmax = std::max(1, static_cast<int>(get(params, "kmax", 3.0)));
        const double L = grid.half_width(0);
        std::mt19937_64 rng(seed);
        std::normal_distribution<double> coeff(0.0, 1.0);
        std::uniform_real_distribution<double> phase(0.0, 2.0 * M_PI);
        struct Mode { Vec k; double a, theta; };
        std::vector<Mode> modes;
        std::array<int, 3> kk{0, 0, 0};
        for (kk[0] = -kmax; kk[0] <= kmax; ++kk[0]) {
            for (kk[1] = -kmax; kk[1] <= kmax; ++kk[1]) {
                const int k2max = n == 3 ? kmax : 0;
                for (kk[2] = -k2max; kk[2] <= k2max; ++kk[2]) {
                    if (kk[0] == 0 && kk[1] == 0 && kk[2] == 0) continue;
                    modes.push_back({vec(kk[0] * M_PI / L, kk[1] * M_PI / L, kk[2] * M_PI / L),
                                     coeff(rng), phase(rng)});
                }
            }
        }
        const double scale = 1.0 / std::sqrt(static_cast<double>(modes.size()));
        f = sample_function(grid, 1, [&](const Vec& x, double* out) {
            double v = 0.0;
            for (const auto& m : modes) v += m.a * std::cos(dot(m.k, x) + m.theta);
            out[0] = scale * v * bump_profile(norm(x), 0.6 * L, 0.95 * L);
        });
        f.support_radius = 0.95 * L;
        return f;
    }
    if (name == "affine") {
        const double c0 = get(params, "c0", 0.0);
        const Vec c = vec(get(params, "cx", 1.0), get(params, "cy", 0.0), get(params, "cz", 0.0));
        f = sample_function(grid, 1, [&](const Vec& x, double* out) { out[0] = c0 + dot(c, x); });
        return f;
    }
    throw std::invalid_argument("sample_catalog: unknown catalog name '" + name + "'");
}

std::vector<std::string> catalog_names() {
    return {"gaussian",   "ball_indicator",     "smooth_bump", "truncated_power",
            "half_space", "random_bandlimited", "affine"};
}

}  // namespace maxpot

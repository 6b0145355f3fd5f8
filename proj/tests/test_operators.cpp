#include <cmath>
#include <cstdlib>
#include <random>

#include "doctest.h"
#include "maxpot/catalog.hpp"
#include "maxpot/field_math.hpp"
#include "maxpot/operators.hpp"

using namespace maxpot;

namespace {

Field random_field(const Grid& g, int m, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> dist(0.0, 1.0);
    Field f(g, m);
    for (double& v : f.data) v = dist(rng);
    return f;
}

std::size_t origin_node(const Grid& g) {
    std::array<int, 3> idx{0, 0, 0};
    for (int a = 0; a < g.dim; ++a) {
        REQUIRE(g.dims[a] % 2 == 1);
        idx[a] = (g.dims[a] - 1) / 2;
    }
    const std::size_t node = g.flatten(idx[0], idx[1], idx[2]);
    REQUIRE(norm(g.coord(node)) < 1e-12);
    return node;
}

/// Independent midpoint-quadrature oracle: int over the unit disk, outside
/// B(x, t), of f(z) k(x - z) dz on a fine z-lattice.
double disk_kernel_oracle(const Vec& x, double t, int cells,
                          const std::function<double(const Vec&)>& k) {
    const double h = 2.0 / cells;
    double acc = 0.0;
    for (int i = 0; i < cells; ++i) {
        for (int j = 0; j < cells; ++j) {
            const Vec z = vec(-1.0 + (i + 0.5) * h, -1.0 + (j + 0.5) * h);
            if (norm(z) >= 1.0) continue;
            const Vec w = x - z;
            if (norm(w) < t) continue;
            acc += k(w) * h * h;
        }
    }
    return acc;
}

}  // namespace

TEST_CASE("radius ladder: construction and validation") {
    const auto ladder = RadiusLadder::geometric(0.1, 1.0, 2.0);
    CHECK(ladder.radii.size() == 4);  // 0.1 0.2 0.4 0.8
    for (std::size_t i = 1; i < ladder.radii.size(); ++i) {
        CHECK(ladder.radii[i] > ladder.radii[i - 1]);
    }
    CHECK_THROWS_AS(RadiusLadder::geometric(0.0, 1.0, 2.0), std::invalid_argument);
    CHECK_THROWS_AS(RadiusLadder::geometric(0.1, 1.0, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(RadiusLadder::geometric(1.0, 0.5, 2.0), std::invalid_argument);

    const Grid g = Grid::centered(2, 32, 2.0);
    const auto def = RadiusLadder::defaults(g);
    CHECK(def.t_min == doctest::Approx(g.spacing));
    CHECK(def.radii.back() <= g.diameter() * (1.0 + 1e-12));
}

TEST_CASE("truncated_potential: annulus oracle at the origin") {
    const Grid g = Grid::centered(2, 129, 2.0);  // h ~ 0.031 <= 1/32
    const Field f = sample_catalog("ball_indicator", {{"R", 1.0}}, g);
    const auto spec = KernelSpec::potential(make_symbol("one", 2));
    const Field out = truncated_potential(f, spec, 0.5, TruncationPolicy::overlap());
    // int over 0.5 <= |z| <= 1 of |z|^{-1} dz = 2*pi*(1 - 0.5) = pi
    CHECK(out.data[origin_node(g)] == doctest::Approx(M_PI).epsilon(0.02));
}

TEST_CASE("truncated_potential: empty intersection gives exact zero (direct path)") {
    const Grid g = Grid::centered(2, 33, 2.0);
    Field f = sample_catalog("ball_indicator", {{"R", 0.5}}, g);
    const auto spec = KernelSpec::potential(make_symbol("one", 2));
    // t beyond diam(support) + |x| for every node in the box
    const double t = 0.5 + g.diameter();
    const Field out = truncated_potential(f, spec, t, TruncationPolicy::overlap(), ConvMethod::Direct);
    for (double v : out.data) CHECK(v == 0.0);
}

TEST_CASE("truncated_potential: linearity and validation") {
    const Grid g = Grid::centered(2, 32, 1.0);
    const auto spec = KernelSpec::potential(make_symbol("one", 2));
    const Field f = random_field(g, 1, 5);
    const Field h = random_field(g, 1, 6);
    const double t = 3.0 * g.spacing;
    const Field a = truncated_potential(f, spec, t, TruncationPolicy::overlap());
    const Field b = truncated_potential(h, spec, t, TruncationPolicy::overlap());
    const Field ab = truncated_potential(added(f, h), spec, t, TruncationPolicy::overlap());
    const double scale = max_abs(a) + max_abs(b);
    for (std::size_t i = 0; i < ab.data.size(); ++i) {
        CHECK(std::abs(ab.data[i] - a.data[i] - b.data[i]) < 1e-12 * scale);
    }

    CHECK_THROWS_AS(truncated_potential(f, spec, 0.5 * g.spacing, TruncationPolicy::overlap()),
                    std::invalid_argument);
    const auto id_spec = KernelSpec::potential(make_symbol("identity", 2));
    CHECK_THROWS_AS(truncated_potential(f, id_spec, t, TruncationPolicy::overlap()),
                    std::invalid_argument);
}

TEST_CASE("fft and direct paths agree to 1e-10 on small grids") {
    const auto q2 = sphere_quadrature(2, 64);
    {
        const Grid g = Grid::centered(2, 32, 1.0);
        const Field f = random_field(g, 1, 11);
        const auto spec = KernelSpec::potential(make_symbol("one", 2));
        const double t = 4.0 * g.spacing;
        const Field a = truncated_potential(f, spec, t, TruncationPolicy::overlap(), ConvMethod::Fft);
        const Field b =
            truncated_potential(f, spec, t, TruncationPolicy::overlap(), ConvMethod::Direct);
        const double scale = max_abs(b);
        for (std::size_t i = 0; i < a.data.size(); ++i) {
            CHECK(std::abs(a.data[i] - b.data[i]) < 1e-10 * scale);
        }

        const auto sing = KernelSpec::singular(make_symbol("coordinate", 2, 0), q2);
        const Field c = truncated_singular(f, sing, t, TruncationPolicy::overlap(), ConvMethod::Fft);
        const Field d =
            truncated_singular(f, sing, t, TruncationPolicy::overlap(), ConvMethod::Direct);
        const double cscale = max_abs(d);
        for (std::size_t i = 0; i < c.data.size(); ++i) {
            CHECK(std::abs(c.data[i] - d.data[i]) < 1e-10 * cscale);
        }

        const Field r1 = riesz_potential(f, ConvMethod::Fft);
        const Field r2 = riesz_potential(f, ConvMethod::Direct);
        const double rscale = max_abs(r2);
        for (std::size_t i = 0; i < r1.data.size(); ++i) {
            CHECK(std::abs(r1.data[i] - r2.data[i]) < 1e-10 * rscale);
        }
    }
    {
        const Grid g = Grid::centered(3, 16, 1.0);
        const Field f = random_field(g, 3, 12);
        const auto spec = KernelSpec::potential(make_symbol("identity", 3));
        const double t = 3.0 * g.spacing;
        const Field a = truncated_potential(f, spec, t, TruncationPolicy::overlap(), ConvMethod::Fft);
        const Field b =
            truncated_potential(f, spec, t, TruncationPolicy::overlap(), ConvMethod::Direct);
        const double scale = max_abs(b);
        for (std::size_t i = 0; i < a.data.size(); ++i) {
            CHECK(std::abs(a.data[i] - b.data[i]) < 1e-10 * scale);
        }
    }
}

TEST_CASE("maximal_potential: ball value, homogeneity, monotone ladders, equality case") {
    const Grid g = Grid::centered(2, 129, 2.0);
    const Field f = sample_catalog("ball_indicator", {{"R", 1.0}}, g);
    const auto spec = KernelSpec::potential(make_symbol("one", 2));
    const auto ladder = RadiusLadder::defaults(g);
    const auto policy = TruncationPolicy::overlap();

    const Field astar = maximal_potential(f, spec, ladder, policy);
    // nonnegative integrand: supremum at the smallest radius, value 2*pi*(1 - t_min)
    CHECK(astar.data[origin_node(g)] ==
          doctest::Approx(2.0 * M_PI * (1.0 - ladder.t_min)).epsilon(0.02));

    const Field zero(g, 1);
    CHECK(max_abs(maximal_potential(zero, spec, ladder, policy)) == 0.0);

    const Field scaled_in = maximal_potential(scaled(f, -2.5), spec, ladder, policy);
    for (std::size_t i = 0; i < astar.data.size(); ++i) {
        CHECK(scaled_in.data[i] == doctest::Approx(2.5 * astar.data[i]).epsilon(1e-12));
    }

    // equality case: the max equals the t_min truncation (to rounding on the
    // FFT path, bit-exact on the direct path where tied radii share terms)
    const Field trunc = truncated_potential(f, spec, ladder.t_min, policy);
    const double tscale = max_abs(trunc);
    for (std::size_t i = 0; i < astar.data.size(); ++i) {
        CHECK(std::abs(astar.data[i] - trunc.data[i]) <= 1e-13 * tscale);
    }
    {
        const Grid gd = Grid::centered(2, 33, 2.0);
        const Field fd = sample_catalog("ball_indicator", {{"R", 1.0}}, gd);
        const auto ld = RadiusLadder::geometric(gd.spacing, gd.diameter(), 2.0);
        const Field am = maximal_potential(fd, spec, ld, policy, ConvMethod::Direct);
        const Field tm = truncated_potential(fd, spec, ld.t_min, policy, ConvMethod::Direct);
        CHECK(am.data == tm.data);
    }

    // enlarging the ladder never decreases any node
    const auto sparse = RadiusLadder::geometric(ladder.t_min, ladder.t_max, ladder.ratio * ladder.ratio);
    const Field coarse = maximal_potential(f, spec, sparse, policy);
    for (std::size_t i = 0; i < astar.data.size(); ++i) {
        CHECK(coarse.data[i] <= astar.data[i] * (1.0 + 1e-12) + 1e-14);
    }

    CHECK_THROWS_AS(maximal_potential(f, spec, RadiusLadder{}, policy), std::invalid_argument);
}

TEST_CASE("riesz_potential: disk oracle, zero, translation equivariance") {
    const Grid g = Grid::centered(2, 129, 2.0);
    const Field f = sample_catalog("ball_indicator", {{"R", 1.0}}, g);
    const Field out = riesz_potential(f);
    // int over |z| <= 1 of |z|^{-1} dz = 2*pi
    CHECK(out.data[origin_node(g)] == doctest::Approx(2.0 * M_PI).epsilon(0.02));

    const Field zero(g, 1);
    CHECK(max_abs(riesz_potential(zero)) == 0.0);

    // shift the samples one cell along axis 0; with the support away from
    // the boundary the rolled field is an exact translate and the discrete
    // convolution commutes with it
    const Grid gs = Grid::centered(2, 48, 1.5);
    const Field fs = sample_catalog("ball_indicator", {{"R", 0.8}}, gs);
    Field shifted(gs, 1);
    for (int i = 0; i + 1 < gs.dims[0]; ++i) {
        for (int j = 0; j < gs.dims[1]; ++j) {
            shifted.data[gs.flatten(i + 1, j)] = fs.data[gs.flatten(i, j)];
        }
    }
    const Field a = riesz_potential(fs);
    const Field b = riesz_potential(shifted);
    const double scale = max_abs(a);
    for (int i = 0; i + 1 < gs.dims[0]; ++i) {
        for (int j = 0; j < gs.dims[1]; ++j) {
            CHECK(std::abs(b.data[gs.flatten(i + 1, j)] - a.data[gs.flatten(i, j)]) <
                  1e-10 * scale);
        }
    }
}

TEST_CASE("truncated_singular: odd-symmetry cancellation at the center and a quadrature oracle") {
    const Grid g = Grid::centered(2, 129, 2.0);
    const auto quad = sphere_quadrature(2, 64);
    const auto spec = KernelSpec::singular(make_symbol("coordinate", 2, 0), quad);
    const auto policy = TruncationPolicy::overlap();

    const Field gauss = sample_catalog("gaussian", {}, g);
    const Field out = truncated_singular(gauss, spec, 0.5, policy);
    CHECK(std::abs(out.data[origin_node(g)]) <= 1e-3 * max_abs(gauss));

    // value at x = (2, 0) against an independent fine-lattice oracle
    const Field ball = sample_catalog("ball_indicator", {{"R", 1.0}}, g);
    const Field tsb = truncated_singular(ball, spec, 0.5, policy);
    const double oracle = disk_kernel_oracle(vec(2.0, 0.0), 0.5, 2000, [](const Vec& w) {
        const double r = norm(w);
        return w[0] / (r * r * r);
    });
    std::size_t probe = g.node_count();
    for (std::size_t node = 0; node < g.node_count(); ++node) {
        const Vec x = g.coord(node);
        if (std::abs(x[0] - 2.0) < 0.6 * g.spacing && std::abs(x[1]) < 0.6 * g.spacing) probe = node;
    }
    REQUIRE(probe < g.node_count());
    CHECK(tsb.data[probe] == doctest::Approx(oracle).epsilon(0.02));

    // truncation beyond the support: exact zero on the direct path
    const Grid gsmall = Grid::centered(2, 33, 2.0);
    const Field bsmall = sample_catalog("ball_indicator", {{"R", 0.5}}, gsmall);
    const Field far = truncated_singular(bsmall, spec, 0.5 + gsmall.diameter(), policy,
                                         ConvMethod::Direct);
    CHECK(max_abs(far) == 0.0);
}

TEST_CASE("maximal_singular: majorizes truncations, center cancellation, homogeneity") {
    const Grid g = Grid::centered(2, 65, 2.0);
    const auto quad = sphere_quadrature(2, 64);
    const auto spec = KernelSpec::singular(make_symbol("coordinate", 2, 0), quad);
    const auto policy = TruncationPolicy::overlap();
    const auto ladder = RadiusLadder::geometric(g.spacing, g.diameter(), std::sqrt(2.0));

    const Field f = random_field(g, 1, 31);
    const Field tstar = maximal_singular(f, spec, ladder, policy);
    for (double t : ladder.radii) {
        const Field trunc = truncated_singular(f, spec, t, policy);
        for (std::size_t i = 0; i < tstar.data.size(); ++i) {
            CHECK(tstar.data[i] >= std::abs(trunc.data[i]) - 1e-12 * max_abs(trunc));
        }
    }

    const Field gauss = sample_catalog("gaussian", {}, g);
    const Field mg = maximal_singular(gauss, spec, ladder, policy);
    CHECK(mg.data[origin_node(g)] <= 1e-3 * max_abs(gauss));

    const Field ms = maximal_singular(scaled(f, 4.0), spec, ladder, policy);
    for (std::size_t i = 0; i < ms.data.size(); ++i) {
        CHECK(ms.data[i] == doctest::Approx(4.0 * tstar.data[i]).epsilon(1e-12));
    }
}

TEST_CASE("surface_convolution: odd cancellation, half-space arc oracle, linearity") {
    const auto quad = sphere_quadrature(2, 64);
    {
        const Grid g = Grid::centered(2, 65, 2.0);
        const Field f = sample_catalog("ball_indicator", {{"R", 1.5}}, g);
        const Field out = surface_convolution(f, make_symbol("one", 2), 1.0, quad);
        // f is identically 1 near S(0,1), so the integral reduces to int u dsigma = 0
        const std::size_t center = origin_node(g);
        CHECK(std::abs(out.at(0, center)) < 1e-12);
        CHECK(std::abs(out.at(1, center)) < 1e-12);
    }
    {
        const Grid g = Grid::centered(2, 129, 2.0);
        const Field f = sample_catalog("half_space", {}, g);
        const Field out = surface_convolution(f, make_symbol("one", 2), 1.0, quad);
        const std::size_t center = origin_node(g);
        // arc integral of (cos, sin) over theta in (pi/2, 3pi/2)
        CHECK(out.at(0, center) == doctest::Approx(-2.0).epsilon(0.02));
        CHECK(std::abs(out.at(1, center)) < 0.02 * 2.0);
    }
    {
        const Grid g = Grid::centered(2, 33, 1.0);
        const Field f = random_field(g, 1, 3);
        const Field h = random_field(g, 1, 4);
        const double t = 4.0 * g.spacing;
        const Field a = surface_convolution(f, make_symbol("one", 2), t, quad);
        const Field b = surface_convolution(h, make_symbol("one", 2), t, quad);
        const Field ab = surface_convolution(added(f, h), make_symbol("one", 2), t, quad);
        const double scale = max_abs(a) + max_abs(b);
        for (std::size_t i = 0; i < ab.data.size(); ++i) {
            CHECK(std::abs(ab.data[i] - a.data[i] - b.data[i]) < 1e-12 * scale);
        }
    }
}

TEST_CASE("grad_truncated_potential: plateau annihilation and the Dirac-term oracle") {
    const Grid g = Grid::centered(2, 129, 2.0);
    const auto quad = sphere_quadrature(2, 64);
    const auto policy = TruncationPolicy::overlap();
    const double t = 0.2;

    // constant near the center: the gradient of the potential vanishes there
    const Field bump = sample_catalog("smooth_bump", {{"r0", 0.5}, {"R", 1.2}}, g);
    {
        const auto spec = KernelSpec::potential(make_symbol("one", 2));
        const Field grad = grad_truncated_potential(bump, spec, t, policy, quad);
        double field_scale = 0.0;
        for (std::size_t node = 0; node < g.node_count(); ++node) {
            double mag = std::hypot(grad.at(0, node), grad.at(1, node));
            field_scale = std::max(field_scale, mag);
        }
        const std::size_t center = origin_node(g);
        const double center_mag = std::hypot(grad.at(0, center), grad.at(1, center));
        CHECK(center_mag <= 1e-2 * field_scale);
    }

    // Omega(z) = z_1: the surface term carries the Dirac coefficient and the
    // total reduces to (K~ * grad f)(0) = (pi f(0), 0) for radial f constant
    // near the origin.
    {
        const auto spec = KernelSpec::potential(make_symbol("coordinate", 2, 0));
        const Field grad = grad_truncated_potential(bump, spec, t, policy, quad);
        const std::size_t center = origin_node(g);
        CHECK(grad.at(0, center) == doctest::Approx(M_PI).epsilon(0.02));
        CHECK(std::abs(grad.at(1, center)) < 0.02 * M_PI);
    }
}

TEST_CASE("grad_truncated_potential matches the finite-difference gradient") {
    const auto quad = sphere_quadrature(2, 64);
    const auto policy = TruncationPolicy::overlap();
    const auto spec = KernelSpec::potential(make_symbol("one", 2));
    auto run = [&](int res) {
        const Grid g = Grid::centered(2, res, 2.0);
        const Field f = sample_catalog("gaussian", {{"sigma", 0.75}}, g);
        const Field conv = truncated_potential(f, spec, 0.5, policy);
        const Field fd = fd_gradient(conv);
        const Field an = grad_truncated_potential(f, spec, 0.5, policy, quad);
        double worst = 0.0, scale = 0.0;
        for (std::size_t node = 0; node < g.node_count(); ++node) {
            const auto idx = g.unflatten(node);
            bool interior = true;
            for (int a = 0; a < 2; ++a) {
                interior = interior && idx[a] >= 2 && idx[a] < g.dims[a] - 2;
            }
            if (!interior) continue;
            for (int a = 0; a < 2; ++a) {
                worst = std::max(worst, std::abs(fd.at(a, node) - an.at(a, node)));
                scale = std::max(scale, std::abs(an.at(a, node)));
            }
        }
        return std::pair<double, double>(worst, scale);
    };
    const auto [e65, s65] = run(65);
    const auto [e129, s129] = run(129);
    CHECK(e129 < 0.05 * s129);
    CHECK(e129 < 0.7 * e65);  // at least first-order decay
}

TEST_CASE("grad_truncated_potential: linearity") {
    const Grid g = Grid::centered(2, 33, 1.0);
    const auto quad = sphere_quadrature(2, 64);
    const auto policy = TruncationPolicy::overlap();
    const auto spec = KernelSpec::potential(make_symbol("one", 2));
    const double t = 4.0 * g.spacing;
    const Field f = random_field(g, 1, 51);
    const Field h = random_field(g, 1, 52);
    const Field a = grad_truncated_potential(f, spec, t, policy, quad);
    const Field b = grad_truncated_potential(h, spec, t, policy, quad);
    const Field ab = grad_truncated_potential(added(f, h), spec, t, policy, quad);
    const double scale = max_abs(a) + max_abs(b);
    for (std::size_t i = 0; i < ab.data.size(); ++i) {
        CHECK(std::abs(ab.data[i] - a.data[i] - b.data[i]) < 1e-11 * scale);
    }
}

TEST_CASE("grad_majorant: majorizes every radius, plateau center, homogeneity") {
    const Grid g = Grid::centered(2, 65, 2.0);
    const auto quad = sphere_quadrature(2, 64);
    const auto policy = TruncationPolicy::overlap();
    const auto spec = KernelSpec::potential(make_symbol("one", 2));
    const auto ladder = RadiusLadder::geometric(2.0 * g.spacing, 2.0, std::sqrt(2.0));

    const Field f = sample_catalog("gaussian", {}, g);
    const Field tstar = grad_majorant(f, spec, ladder, policy, quad);
    for (double t : {ladder.radii.front(), ladder.radii.back()}) {
        const Field grad = grad_truncated_potential(f, spec, t, policy, quad);
        for (std::size_t node = 0; node < g.node_count(); ++node) {
            const double mag = std::hypot(grad.at(0, node), grad.at(1, node));
            CHECK(tstar.data[node] >= mag * (1.0 - 1e-12));
        }
    }

    const Field bump = sample_catalog("smooth_bump", {{"r0", 0.6}, {"R", 1.2}}, g);
    const auto small_ladder = RadiusLadder::geometric(g.spacing, 0.25, std::sqrt(2.0));
    const Field tb = grad_majorant(bump, spec, small_ladder, policy, quad);
    CHECK(tb.data[origin_node(g)] <= 1e-2 * max_abs(tb));

    const Field t2 = grad_majorant(scaled(f, -3.0), spec, ladder, policy, quad);
    for (std::size_t i = 0; i < t2.data.size(); ++i) {
        CHECK(t2.data[i] == doctest::Approx(3.0 * tstar.data[i]).epsilon(1e-11));
    }
}

TEST_CASE("spherical_average: constants, |x|^2 moment, gaussian circle value") {
    const auto quad = sphere_quadrature(2, 64);
    const Grid g = Grid::centered(2, 129, 2.0);

    const Field ones = sample_catalog("ball_indicator", {{"R", 1.9}}, g);
    const Field avg1 = spherical_average(ones, 0.5, quad);
    CHECK(avg1.data[origin_node(g)] == doctest::Approx(1.0).epsilon(1e-12));

    const Field r2 = sample_function(g, 1, [](const Vec& x, double* out) { out[0] = dot(x, x); });
    const Field avg2 = spherical_average(r2, 0.5, quad);
    CHECK(std::abs(avg2.data[origin_node(g)] - 0.25) < 2.0 * g.spacing * g.spacing);

    const Field gauss = sample_catalog("gaussian", {}, g);
    const Field avg3 = spherical_average(gauss, 1.0, quad);
    CHECK(avg3.data[origin_node(g)] == doctest::Approx(std::exp(-1.0)).epsilon(0.01));
}

TEST_CASE("spherical_maximal: indicator value, signed/absolute agreement, homogeneity") {
    const auto quad = sphere_quadrature(2, 64);
    const Grid g = Grid::centered(2, 129, 2.0);
    const auto ladder = RadiusLadder::defaults(g);

    const Field ball = sample_catalog("ball_indicator", {{"R", 1.0}}, g);
    const Field s = spherical_maximal(ball, ladder, quad, true);
    CHECK(s.data[origin_node(g)] == doctest::Approx(1.0).epsilon(0.02));

    // nonnegative input: both variants coincide exactly
    const Field gauss = sample_catalog("gaussian", {}, g);
    const Field sa = spherical_maximal(gauss, ladder, quad, true);
    const Field sb = spherical_maximal(gauss, ladder, quad, false);
    CHECK(sa.data == sb.data);

    const Field s3 = spherical_maximal(scaled(ball, -3.0), ladder, quad, true);
    for (std::size_t i = 0; i < s3.data.size(); ++i) {
        CHECK(s3.data[i] == doctest::Approx(3.0 * s.data[i]).epsilon(1e-12));
    }
}

TEST_CASE("spherical_via_gradient: zero input and the single-radius identity") {
    const Grid g = Grid::centered(2, 129, 2.0);
    const auto policy = TruncationPolicy::overlap();

    const Field zero(g, 1);
    const Field sz = spherical_via_gradient(zero, RadiusLadder::defaults(g), policy);
    CHECK(max_abs(sz) == 0.0);

    // (1/(2 pi)) int_{|z|>=1} grad f(z) . (-z)/|z|^2 dz = e^{-1} for f = exp(-|x|^2):
    // the integrand reduces to 2 exp(-|z|^2).
    const Field gauss = sample_catalog("gaussian", {}, g);
    const Field grad = fd_gradient(gauss);
    const auto spec = KernelSpec::potential(make_symbol("identity", 2));
    const Field tp = truncated_potential(grad, spec, 1.0, policy);
    CHECK(tp.data[origin_node(g)] / (2.0 * M_PI) == doctest::Approx(std::exp(-1.0)).epsilon(0.02));
}

TEST_CASE("spherical_via_gradient matches the signed spherical maximal function") {
    const Grid g = Grid::centered(2, 129, 2.0);
    const auto quad = sphere_quadrature(2, 64);
    const auto policy = TruncationPolicy::overlap();
    const auto ladder = RadiusLadder::geometric(4.0 * g.spacing, 2.0, std::pow(2.0, 0.25));

    const Field f = sample_catalog("gaussian", {{"sigma", 0.75}}, g);
    const Field via = spherical_via_gradient(f, ladder, policy);
    const Field direct = spherical_maximal(f, ladder, quad, false);
    double worst = 0.0, scale = 0.0;
    for (std::size_t node = 0; node < g.node_count(); ++node) {
        const auto idx = g.unflatten(node);
        bool interior = true;
        for (int a = 0; a < 2; ++a) interior = interior && idx[a] >= 2 && idx[a] < g.dims[a] - 2;
        if (!interior) continue;
        worst = std::max(worst, std::abs(via.data[node] - direct.data[node]));
        scale = std::max(scale, std::abs(direct.data[node]));
    }
    CHECK(worst <= 0.03 * scale);
}

TEST_CASE("dilation covariance of the truncated potential") {
    // f_r(x) = f(rx) on a grid with spacing h/r: (f_r * Phi_t)(0) =
    // r^{-1} (f * Phi_{rt})(0), r = 2.
    const auto policy = TruncationPolicy::overlap();
    const auto spec = KernelSpec::potential(make_symbol("one", 2));

    const Grid coarse = Grid::centered(2, 33, 2.0);
    const Grid fine(2, {65, 65, 1}, coarse.spacing / 2.0);
    const Field f = sample_catalog("gaussian", {{"sigma", 1.0}}, coarse);
    const Field fr = sample_catalog("gaussian", {{"sigma", 0.5}}, fine);

    const double t = 0.5;
    const Field lhs = truncated_potential(fr, spec, t, policy);
    const Field rhs = truncated_potential(f, spec, 2.0 * t, policy);
    const double left = lhs.data[origin_node(fine)];
    const double right = 0.5 * rhs.data[origin_node(coarse)];
    CHECK(left == doctest::Approx(right).epsilon(0.02));
}

TEST_CASE("outputs are bit-identical across worker counts") {
    const Grid g = Grid::centered(2, 65, 2.0);
    const Field f = sample_catalog("gaussian", {}, g);
    const auto spec = KernelSpec::potential(make_symbol("one", 2));
    const auto ladder = RadiusLadder::geometric(g.spacing, 1.0, 2.0);
    const auto quad = sphere_quadrature(2, 64);

    setenv("MAXPOT_THREADS", "1", 1);
    const Field a = maximal_potential(f, spec, ladder, TruncationPolicy::overlap());
    const Field sa = spherical_average(f, 0.5, quad);
    const double na = lp_norm(f, 1.7);
    setenv("MAXPOT_THREADS", "4", 1);
    const Field b = maximal_potential(f, spec, ladder, TruncationPolicy::overlap());
    const Field sb = spherical_average(f, 0.5, quad);
    const double nb = lp_norm(f, 1.7);
    unsetenv("MAXPOT_THREADS");

    CHECK(a.data == b.data);
    CHECK(sa.data == sb.data);
    CHECK(na == nb);
}

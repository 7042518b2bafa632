#include <cmath>
#include <numbers>
#include <random>

#include "doctest.h"
#include "qnorm/functional.hpp"

using namespace qnorm;

namespace {

RadialField random_positive_field(GridPtr g, unsigned seed) {
    std::mt19937 rng(seed);
    std::uniform_real_distribution<double> amp(0.2, 1.2), width(0.5, 1.8),
        center(0.0, 0.6 * g->r_max);
    RadialField u = make_field(g, 0.15);
    for (int b = 0; b < 3; ++b) {
        double a = amp(rng), wdt = width(rng), c0 = center(rng);
        for (int i = 0; i < g->n; ++i) {
            double z = (g->r[i] - c0) / wdt;
            u.v[i] += a * std::exp(-0.5 * z * z);
        }
    }
    u.v.back() = 0.0;
    return u;
}

}  // namespace

TEST_CASE("energy of the zero field is zero") {
    auto g = RadialGrid::make(3, 6.0, 257);
    auto spec = Nonlinearity::log_power(1.0, -0.2, 4.0, 3, 1.8);
    auto e = energy(make_field(g), spec, {.eps = 0.25, .delta_s = 1e-3});
    CHECK(e.kinetic2 == 0.0);
    CHECK(std::abs(e.kineticq) < 1e-15);  // smoothed q term: rounding only
    CHECK(e.gminus_eps == 0.0);
    CHECK(e.gplus == 0.0);
    CHECK(std::abs(e.total) < 1e-15);
}

TEST_CASE("energy decomposition is consistent") {
    auto g = RadialGrid::make(3, 6.0, 257);
    auto spec = Nonlinearity::log_power(1.0, -0.2, 4.0, 3, 1.8);
    auto u = random_positive_field(g, 7);
    auto e = energy(u, spec, {.eps = 0.25, .delta_s = 1e-3});
    CHECK(e.total ==
          doctest::Approx(e.kinetic2 + e.kineticq + e.gminus_eps - e.gplus).epsilon(1e-14));
    CHECK(e.kinetic2 > 0.0);
    CHECK(e.kineticq > 0.0);
    CHECK(e.gminus_eps >= 0.0);
    CHECK(e.gplus >= 0.0);
}

TEST_CASE("regularized energy never exceeds the unperturbed one") {
    auto g = RadialGrid::make(3, 6.0, 257);
    auto spec = Nonlinearity::log_power(1.2, -0.3, 3.5, 3, 2.5);
    for (unsigned s = 1; s <= 5; ++s) {
        auto u = random_positive_field(g, s);
        double J = energy(u, spec, {.eps = std::nullopt, .delta_s = 1e-3}).total;
        double prev = -1e300;
        for (double eps : {0.5, 0.125, 1.0 / 1024}) {
            double Je = energy(u, spec, {.eps = eps, .delta_s = 1e-3}).total;
            CHECK(Je <= J + 1e-10 * (1.0 + std::abs(J)));
            CHECK(Je >= prev - 1e-10 * (1.0 + std::abs(Je)));  // nondecreasing as eps drops
            prev = Je;
        }
    }
}

TEST_CASE("gradient matches finite differences of the energy") {
    auto g = RadialGrid::make(3, 6.0, 129);
    auto spec = Nonlinearity::log_power(1.0, -0.2, 4.0, 3, 1.8);
    EnergyParams par{.eps = 0.25, .delta_s = 1e-3};
    auto u = random_positive_field(g, 3);
    auto ge = gradient_euclidean(u, spec, par);
    std::mt19937 rng(11);
    std::uniform_int_distribution<int> pick(1, g->n - 2);
    for (int t = 0; t < 12; ++t) {
        int j = pick(rng);
        double h = 1e-6;
        auto up = u, um = u;
        up.v[j] += h;
        um.v[j] -= h;
        double fd = (energy(up, spec, par).total - energy(um, spec, par).total) / (2.0 * h);
        CHECK(fd == doctest::Approx(ge[j]).epsilon(1e-5));
    }
}

TEST_CASE("weighted gradient representation") {
    auto g = RadialGrid::make(3, 6.0, 129);
    auto spec = Nonlinearity::pure_power(1.0, 3.2, 3, 1.8);
    EnergyParams par{.eps = 0.25, .delta_s = 1e-3};
    auto u = random_positive_field(g, 5);
    auto ge = gradient_euclidean(u, spec, par);
    auto gr = gradient(u, spec, par);
    for (int i = 0; i < g->n; ++i)
        CHECK(gr.v[i] * g->w[i] == doctest::Approx(ge[i]).epsilon(1e-12));
}

TEST_CASE("checkerboard mode carries kinetic cost") {
    // The alternating field must pay the full difference-quotient energy; a
    // discretization blind to it would admit spurious minimizers.
    auto g = RadialGrid::make(3, 6.0, 257);
    auto spec = Nonlinearity::log_power(1.0, 0.0, 4.0, 3, 1.8);
    RadialField u = make_field(g);
    for (int i = 0; i < g->n; ++i) u.v[i] = (i % 2 == 0) ? 1.0 : 0.0;
    u.v.back() = 0.0;
    auto e = energy(u, spec, {.eps = 0.25, .delta_s = 1e-3});
    // each cell difference quotient is 1/h, so kinetic2 ~ |B_R|/(2 h^2)
    CHECK(e.kinetic2 > 0.1 * g->ball_volume(g->r_max) / (2.0 * g->h * g->h));
}

TEST_CASE("lagrange multiplier") {
    auto g = RadialGrid::make(3, 6.0, 129);
    auto u = gaussian_bump(g, 1.0, 2.0);
    RadialField neg = u;
    for (auto& x : neg.v) x = -x;
    CHECK(lagrange_multiplier(u, neg) == doctest::Approx(1.0).epsilon(1e-13));
    CHECK_THROWS_AS(lagrange_multiplier(make_field(g), u), SpecError);
}

TEST_CASE("gausson satisfies the stationarity identities") {
    // u(r) = c' e^{-r^2/2} solves -Du + lambda u = u ln u^2 (q term off, alpha 1).
    auto g = RadialGrid::make(3, 14.0, 2049);
    auto spec = Nonlinearity::log_power(1.0, 0.0, 4.0, 3, 1.8);
    spec.q_term = false;
    double c = 2.0;
    double amp = c / std::pow(std::numbers::pi, 0.75);
    auto u = sample_field(g, [&](double r) { return amp * std::exp(-0.5 * r * r); });
    double lambda = 2.0 * std::log(amp) - 3.0;
    CHECK(nehari_residual(u, lambda, spec, std::nullopt) < 1e-4);
    CHECK(pohozaev_residual(u, lambda, spec, std::nullopt) < 1e-4);
}

TEST_CASE("gn ratio is homogeneous of degree zero and dilation invariant") {
    auto g = RadialGrid::make(3, 12.0, 1025);
    auto e = critical_exponents(3, 1.8);
    auto u = gaussian_bump(g, 1.5, 2.0);
    for (auto variant : {GnVariant::grad2, GnVariant::gradq}) {
        double base = gn_ratio(u, 3.2, 1.0, e, variant);
        auto scaled = u;
        for (auto& x : scaled.v) x *= 7.3;
        CHECK(gn_ratio(scaled, 3.2, 1.0, e, variant) == doctest::Approx(base).epsilon(1e-12));
        auto dil = dilate(u, 1.3);
        CHECK(gn_ratio(dil.field, 3.2, 1.0, e, variant) == doctest::Approx(base).epsilon(2e-2));
    }
    CHECK_THROWS_AS(gn_ratio(make_field(g), 3.2, 1.0, e), SpecError);
}

TEST_CASE("defective truncation is flagged") {
    auto g = RadialGrid::make(3, 50.0, 2049);
    auto spec = Nonlinearity::log_power(1.0, 0.0, 4.0, 3, 1.8);
    // A small near-constant field: the outer 10% of radii carries > 20% of the
    // volume, so its G_- integral is truncation-dominated.
    auto u = make_field(g, 0.01);
    u.v.back() = 0.0;
    auto e = energy(u, spec, {.eps = std::nullopt, .delta_s = 1e-3});
    CHECK(e.gminus_flagged);
    auto bump = gaussian_bump(g, 1.0, 2.0);
    CHECK(!energy(bump, spec, {.eps = std::nullopt, .delta_s = 1e-3}).gminus_flagged);
}

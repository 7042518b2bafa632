#include "qnorm/radial_grid.hpp"

#include <cmath>
#include <numbers>

namespace qnorm {

std::shared_ptr<const RadialGrid> RadialGrid::make(int N, double r_max, int n) {
    if (N < 2) throw SpecError("grid dimension must satisfy N >= 2");
    if (!(r_max > 0.0)) throw SpecError("r_max must be positive");
    if (n < 16) throw SpecError("node count must satisfy n >= 16");
    auto g = std::shared_ptr<RadialGrid>(new RadialGrid());
    g->N = N;
    g->r_max = r_max;
    g->n = n;
    g->h = r_max / (n - 1);
    g->omega = 2.0 * std::pow(std::numbers::pi, 0.5 * N) / std::tgamma(0.5 * N);
    g->r.resize(n);
    g->w.assign(n, 0.0);
    for (int i = 0; i < n; ++i) g->r[i] = g->h * i;
    // Exact moments of r^{N-1} against the hat functions on each cell.
    for (int i = 0; i + 1 < n; ++i) {
        double a = g->r[i], b = g->r[i + 1];
        double A = (std::pow(b, N) - std::pow(a, N)) / N;
        double B = (std::pow(b, N + 1) - std::pow(a, N + 1)) / (N + 1);
        g->w[i] += g->omega * (b * A - B) / g->h;
        g->w[i + 1] += g->omega * (B - a * A) / g->h;
    }
    return g;
}

double RadialGrid::integrate(std::span<const double> f) const {
    double acc = 0.0;
    for (int i = 0; i < n; ++i) acc += w[i] * f[i];
    return acc;
}

RadialField make_field(GridPtr grid, double fill) {
    return RadialField{grid, std::vector<double>(grid->n, fill)};
}

RadialField sample_field(GridPtr grid, const std::function<double(double)>& f) {
    RadialField u = make_field(grid);
    for (int i = 0; i < grid->n; ++i) u.v[i] = f(grid->r[i]);
    return u;
}

RadialField derivative(const RadialField& u, bool even_at_origin) {
    const auto& g = *u.grid;
    if (g.n < 3) throw SpecError("derivative requires n >= 3");
    RadialField d = make_field(u.grid);
    const double h2 = 2.0 * g.h;
    d.v[0] = even_at_origin ? 0.0 : (-3.0 * u.v[0] + 4.0 * u.v[1] - u.v[2]) / h2;
    for (int i = 1; i + 1 < g.n; ++i) d.v[i] = (u.v[i + 1] - u.v[i - 1]) / h2;
    int m = g.n - 1;
    d.v[m] = (3.0 * u.v[m] - 4.0 * u.v[m - 1] + u.v[m - 2]) / h2;
    return d;
}

double integrate(const RadialField& f) { return f.grid->integrate(f.v); }

double lp_norm(const RadialField& u, double m) {
    if (m < 1.0) throw SpecError("lp_norm requires m >= 1");
    double acc = 0.0;
    for (int i = 0; i < u.size(); ++i) acc += u.grid->w[i] * std::pow(std::abs(u.v[i]), m);
    return std::pow(acc, 1.0 / m);
}

double mass(const RadialField& u) {
    double acc = 0.0;
    for (int i = 0; i < u.size(); ++i) acc += u.grid->w[i] * u.v[i] * u.v[i];
    return acc;
}

RadialField project_mass(const RadialField& u, double c) {
    double m = mass(u);
    if (!(m > 0.0)) throw SpecError("project_mass: zero field");
    RadialField out = u;
    double scale = c / std::sqrt(m);
    for (auto& x : out.v) x *= scale;
    return out;
}

namespace {

double interp(const RadialField& u, double r) {
    const auto& g = *u.grid;
    if (r < 0.0 || r > g.r_max) return 0.0;
    double t = r / g.h;
    int i = std::min(static_cast<int>(t), g.n - 2);
    double frac = t - i;
    return u.v[i] * (1.0 - frac) + u.v[i + 1] * frac;
}

}  // namespace

ResampledField dilate(const RadialField& u, double t) {
    if (!(t > 0.0)) throw SpecError("dilate requires t > 0");
    const auto& g = *u.grid;
    RadialField out = make_field(u.grid);
    double amp = std::pow(t, 0.5 * g.N);
    for (int i = 0; i < g.n; ++i) out.v[i] = amp * interp(u, t * g.r[i]);
    double m0 = mass(u), m1 = mass(out);
    return {std::move(out), m0 > 0.0 ? std::abs(m1 - m0) / m0 : 0.0};
}

ResampledField mass_scale(const RadialField& u, double s) {
    if (!(s > 0.0)) throw SpecError("mass_scale requires s > 0");
    const auto& g = *u.grid;
    RadialField out = make_field(u.grid);
    double shrink = std::pow(s, -1.0 / g.N);
    for (int i = 0; i < g.n; ++i) out.v[i] = interp(u, shrink * g.r[i]);
    double m0 = mass(u), m1 = mass(out);
    return {std::move(out), m0 > 0.0 ? std::abs(m1 - s * m0) / (s * m0) : 0.0};
}

RadialField plateau_function(double xi0, double R, GridPtr grid) {
    if (!(R > 0.0) || R + 1.0 >= grid->r_max)
        throw SpecError("plateau_function requires 0 < R and R + 1 < r_max");
    return sample_field(grid, [&](double r) {
        if (r <= R) return xi0;
        if (r >= R + 1.0) return 0.0;
        return xi0 * (R + 1.0 - r);
    });
}

RadialField appendix_function(GridPtr grid) {
    if (grid->r_max <= 3.0) throw SpecError("appendix_function requires r_max > 3");
    const int N = grid->N;
    double u3 = std::pow(3.0, -0.5 * N) / std::log(3.0);
    return sample_field(grid, [&](double r) {
        if (r <= 2.0) return 0.0;
        if (r >= 3.0) return std::pow(r, -0.5 * N) / std::log(r);
        double t = r - 2.0;  // cubic bridge, zero slope at both ends
        return u3 * t * t * (3.0 - 2.0 * t);
    });
}

RadialField gaussian_bump(GridPtr grid, double width, double c) {
    RadialField u = sample_field(
        grid, [&](double r) { return std::exp(-0.5 * (r / width) * (r / width)); });
    u.v.back() = 0.0;
    return project_mass(u, c);
}

}  // namespace qnorm

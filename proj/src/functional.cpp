#include "qnorm/functional.hpp"

#include <cmath>

namespace qnorm {

namespace {

double smoothed_q_integrand(double d, double q, double delta) {
    // (d^2 + delta^2)^{q/2} - delta^q keeps the zero-field energy exactly 0.
    return std::pow(d * d + delta * delta, 0.5 * q) - std::pow(delta, q);
}

double smoothed_q_flux(double d, double q, double delta) {
    return std::pow(d * d + delta * delta, 0.5 * q - 1.0) * d;
}

}  // namespace

EnergyBreakdown energy(const RadialField& u, const Nonlinearity& spec, const EnergyParams& par) {
    const auto& g = *u.grid;
    EnergyBreakdown out;
    out.eps = par.eps;
    // Kinetic terms in flux form: midpoint differences on cells, so the
    // odd-even (checkerboard) mode carries full kinetic cost.
    for (int i = 0; i + 1 < g.n; ++i) {
        double rm = 0.5 * (g.r[i] + g.r[i + 1]);
        double wc = g.omega * std::pow(rm, g.N - 1) * g.h;
        double d = (u.v[i + 1] - u.v[i]) / g.h;
        out.kinetic2 += 0.5 * wc * d * d;
        if (spec.q_term) out.kineticq += wc / spec.q * smoothed_q_integrand(d, spec.q, par.delta_s);
    }
    double tail_gm = 0.0;
    int tail_start = g.n - g.n / 10 - 1;
    for (int i = 0; i < g.n; ++i) {
        double wi = g.w[i];
        double gm = par.eps ? spec.G_minus_eps(*par.eps, u.v[i]) : spec.G_minus(u.v[i]);
        out.gminus_eps += wi * gm;
        if (i >= tail_start) tail_gm += wi * gm;
        out.gplus += wi * spec.G_plus(u.v[i]);
    }
    if (!par.eps && out.gminus_eps > 0.0 && tail_gm > 0.2 * out.gminus_eps)
        out.gminus_flagged = true;  // outer 10% of the domain dominates: truncation-defective
    out.total = out.kinetic2 + out.kineticq + out.gminus_eps - out.gplus;
    if (!std::isfinite(out.total)) {
        const char* term = !std::isfinite(out.kinetic2)     ? "kinetic2"
                           : !std::isfinite(out.kineticq)   ? "kineticq"
                           : !std::isfinite(out.gminus_eps) ? "gminus_eps"
                                                            : "gplus";
        throw NumericError(std::string("non-finite energy term: ") + term);
    }
    return out;
}

std::vector<double> gradient_euclidean(const RadialField& u, const Nonlinearity& spec,
                                       const EnergyParams& par) {
    const auto& g = *u.grid;
    const int n = g.n;
    // Exact adjoint of the flux-form kinetic terms.
    std::vector<double> ge(n, 0.0);
    for (int i = 0; i + 1 < n; ++i) {
        double rm = 0.5 * (g.r[i] + g.r[i + 1]);
        double wc = g.omega * std::pow(rm, g.N - 1) * g.h;
        double d = (u.v[i + 1] - u.v[i]) / g.h;
        double flux = d;
        if (spec.q_term) flux += smoothed_q_flux(d, spec.q, par.delta_s);
        double y = wc * flux / g.h;
        ge[i] -= y;
        ge[i + 1] += y;
    }
    // Potential terms: d/du (G_-^eps(u) - G_+(u)) = -g^eps(u).
    for (int i = 0; i < n; ++i) {
        double gv = par.eps ? spec.g_eps(*par.eps, u.v[i])
                            : spec.g_plus(u.v[i]) - spec.g_minus(u.v[i]);
        ge[i] -= g.w[i] * gv;
    }
    return ge;
}

RadialField gradient(const RadialField& u, const Nonlinearity& spec, const EnergyParams& par) {
    auto ge = gradient_euclidean(u, spec, par);
    RadialField out = make_field(u.grid);
    for (int i = 0; i < u.grid->n; ++i) out.v[i] = ge[i] / u.grid->w[i];
    return out;
}

double weighted_dot(const RadialField& a, const RadialField& b) {
    double acc = 0.0;
    for (int i = 0; i < a.size(); ++i) acc += a.grid->w[i] * a.v[i] * b.v[i];
    return acc;
}

double lagrange_multiplier(const RadialField& u, const RadialField& grad) {
    double m = mass(u);
    if (!(m > 0.0)) throw SpecError("lagrange_multiplier: zero mass");
    return -weighted_dot(grad, u) / m;
}

double nehari_residual(const RadialField& u, double lambda, const Nonlinearity& spec,
                       std::optional<double> eps) {
    const auto& g = *u.grid;
    RadialField d = derivative(u);
    double lhs = 0.0, rhs = 0.0;
    for (int i = 0; i < g.n; ++i) {
        double wi = g.w[i];
        double dv = std::abs(d.v[i]);
        lhs += wi * (dv * dv + (spec.q_term ? std::pow(dv, spec.q) : 0.0) +
                     lambda * u.v[i] * u.v[i]);
        double gv = eps ? spec.g_eps(*eps, u.v[i]) : spec.g(u.v[i]);
        rhs += wi * gv * u.v[i];
    }
    return std::abs(lhs - rhs) / (std::abs(lhs) + std::abs(rhs) + 1.0);
}

double pohozaev_residual(const RadialField& u, double lambda, const Nonlinearity& spec,
                         std::optional<double> eps) {
    const auto& g = *u.grid;
    const int N = g.N;
    RadialField d = derivative(u);
    double k2 = 0.0, kq = 0.0, msum = 0.0, gsum = 0.0;
    for (int i = 0; i < g.n; ++i) {
        double wi = g.w[i];
        double dv = std::abs(d.v[i]);
        k2 += wi * dv * dv;
        if (spec.q_term) kq += wi * std::pow(dv, spec.q);
        msum += wi * u.v[i] * u.v[i];
        gsum += wi * (eps ? spec.G_eps(*eps, u.v[i]) : spec.G(u.v[i]));
    }
    double lhs = 0.5 * (N - 2) * k2 + (N - spec.q) / spec.q * kq + 0.5 * lambda * N * msum;
    double rhs = N * gsum;
    return std::abs(lhs - rhs) / (std::abs(lhs) + std::abs(rhs) + 1.0);
}

double gn_ratio(const RadialField& u, double p, double C, const Exponents& e, GnVariant variant) {
    double m2 = std::sqrt(mass(u));
    if (!(m2 > 0.0)) throw SpecError("gn_ratio: zero field");
    RadialField d = derivative(u);
    double up = lp_norm(u, p);
    if (variant == GnVariant::grad2) {
        double dp = e.delta(p);
        double k = lp_norm(d, 2.0);
        return up / (C * std::pow(k, dp) * std::pow(m2, 1.0 - dp));
    }
    double nu = e.nu(p);
    double kq = lp_norm(d, e.q);
    return up / (C * std::pow(kq, nu) * std::pow(m2, 1.0 - nu));
}

}  // namespace qnorm

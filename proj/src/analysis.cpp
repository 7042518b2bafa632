#include "qnorm/analysis.hpp"

#include <atomic>
#include <cmath>
#include <random>
#include <thread>

namespace qnorm {

double EnergyCurve::interpolate_m(double c) const {
    if (points.empty()) throw SpecError("empty energy curve");
    if (c <= points.front().c) return points.front().m;
    if (c >= points.back().c) return points.back().m;
    for (size_t i = 1; i < points.size(); ++i) {
        if (c <= points[i].c) {
            double t = (c - points[i - 1].c) / (points[i].c - points[i - 1].c);
            return points[i - 1].m * (1.0 - t) + points[i].m * t;
        }
    }
    return points.back().m;
}

EnergyCurve sweep_mass(const std::vector<double>& c_list, const Nonlinearity& spec,
                       const SolverConfig& cfg, GridPtr grid, int workers,
                       int subadditivity_samples) {
    for (size_t i = 1; i < c_list.size(); ++i)
        if (!(c_list[i] > c_list[i - 1])) throw SpecError("c_list must be strictly increasing");
    if (!c_list.empty() && !(c_list.front() > 0.0)) throw SpecError("c values must be positive");

    EnergyCurve curve;
    curve.points.resize(c_list.size());
    std::atomic<size_t> next{0};
    auto work = [&]() {
        for (;;) {
            size_t k = next.fetch_add(1);
            if (k >= c_list.size()) return;
            CurvePoint pt;
            pt.c = c_list[k];
            try {
                auto reports = continuation_solve(grid, c_list[k], spec, cfg);
                const auto& last = reports.back();
                pt.m = last.energy.total;
                pt.lambda = last.lambda;
                for (const auto& r : reports) pt.m_eps.push_back(r.energy.total);
                if (last.status == SolveStatus::stalled)
                    pt.status = "stalled";
                else if (pt.m > -1e-10)
                    pt.status = "degenerate";
                else
                    pt.status = "converged";
            } catch (const std::exception& e) {
                pt.status = std::string("stalled");
            }
            curve.points[k] = std::move(pt);
        }
    };
    if (workers <= 1) {
        work();
    } else {
        std::vector<std::thread> pool;
        for (int t = 0; t < workers; ++t) pool.emplace_back(work);
        for (auto& th : pool) th.join();
    }

    // Monotonicity of m in c.
    for (size_t i = 1; i < curve.points.size(); ++i) {
        double rise = curve.points[i].m - curve.points[i - 1].m;
        double tol = 2.0 * cfg.tol_pgrad * (1.0 + std::abs(curve.points[i].m));
        if (rise > tol) {
            curve.monotone_nonincreasing = false;
            curve.worst_monotonicity_violation =
                std::max(curve.worst_monotonicity_violation, rise);
        }
    }
    // m_eps nondecreasing along each point's (decreasing) eps schedule.
    for (const auto& pt : curve.points) {
        for (size_t j = 1; j < pt.m_eps.size(); ++j) {
            double tol = 1e-6 * (1.0 + std::abs(pt.m_eps[j]));
            if (pt.m_eps[j] + tol < pt.m_eps[j - 1]) curve.eps_values_nondecreasing = false;
        }
    }
    // Subadditivity on sampled pairs whose combination stays inside the hull.
    double c_max = c_list.empty() ? 0.0 : c_list.back();
    for (size_t i = 0; i < c_list.size() && (int)curve.subadditivity.size() < subadditivity_samples;
         ++i) {
        for (size_t j = i; j < c_list.size(); ++j) {
            double comb = std::hypot(c_list[i], c_list[j]);
            if (comb > c_max) break;
            SubadditivityCheck chk;
            chk.c1 = c_list[i];
            chk.c2 = c_list[j];
            chk.c_combined = comb;
            chk.residual =
                curve.interpolate_m(comb) - curve.points[i].m - curve.points[j].m;
            curve.subadditivity.push_back(chk);
            if ((int)curve.subadditivity.size() >= subadditivity_samples) break;
        }
    }
    return curve;
}

CbarResult find_cbar(const Nonlinearity& spec, const SolverConfig& cfg, GridPtr grid, double c_lo,
                     double c_hi, double tol_c, double tol_energy) {
    if (!(c_lo < c_hi)) throw SpecError("find_cbar requires c_lo < c_hi");
    auto negative = [&](double c) {
        auto reports = continuation_solve(grid, c, spec, cfg);
        return reports.back().energy.total < -tol_energy;
    };
    CbarResult res;
    if (negative(c_lo)) {
        res.cbar = std::nullopt;  // "zero": already negative at the smallest tested mass
        res.note = "m(c_lo) < -tol";
        return res;
    }
    if (!negative(c_hi)) {
        res.bracket_ok = false;
        res.cbar = c_hi;
        res.note = "predicate false across bracket";
        return res;
    }
    double lo = c_lo, hi = c_hi;
    while (hi - lo > tol_c) {
        double mid = 0.5 * (lo + hi);
        (negative(mid) ? hi : lo) = mid;
    }
    res.cbar = 0.5 * (lo + hi);
    return res;
}

namespace {

double gtilde(double alpha, double mu, double p, double s) {
    return 0.5 * alpha * (std::log(s * s) - 1.0) + mu / p * std::pow(s, p - 2.0);
}

}  // namespace

GtildeMax max_Gtilde(double alpha, double mu, double p) {
    if (!(alpha > 0.0)) throw SpecError("max_Gtilde requires alpha > 0");
    if (!(mu < 0.0)) throw SpecError("max_Gtilde requires mu < 0");
    if (!(p > 2.0)) throw SpecError("max_Gtilde requires p > 2");
    GtildeMax out;
    out.closed_form =
        0.5 * alpha * (2.0 / (p - 2.0) * std::log(alpha * p / (mu * (2.0 - p))) - 1.0) -
        alpha / (p - 2.0);
    out.argmax = std::pow(alpha * p / (-mu * (p - 2.0)), 1.0 / (p - 2.0));
    // Golden-section on ln s around the stationary point.
    const double gr = (std::sqrt(5.0) - 1.0) / 2.0;
    double a = std::log(out.argmax) - 5.0, b = std::log(out.argmax) + 5.0;
    double x1 = b - gr * (b - a), x2 = a + gr * (b - a);
    double f1 = gtilde(alpha, mu, p, std::exp(x1)), f2 = gtilde(alpha, mu, p, std::exp(x2));
    for (int it = 0; it < 200; ++it) {
        if (f1 < f2) {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + gr * (b - a);
            f2 = gtilde(alpha, mu, p, std::exp(x2));
        } else {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - gr * (b - a);
            f1 = gtilde(alpha, mu, p, std::exp(x1));
        }
    }
    out.numeric = std::max(f1, f2);
    return out;
}

ThresholdResult existence_threshold(double alpha, double p) {
    if (!(alpha > 0.0)) throw SpecError("existence_threshold requires alpha > 0");
    if (!(p > 2.0)) throw SpecError("existence_threshold requires p > 2");
    ThresholdResult out;
    out.mu_star_closed = -(alpha * p / (p - 2.0)) * std::exp(-0.5 * p);
    // The numeric max of Gtilde is strictly increasing in mu; bisect its root.
    double lo = 1.5 * out.mu_star_closed, hi = 0.5 * out.mu_star_closed;
    for (int it = 0; it < 200; ++it) {
        double mid = 0.5 * (lo + hi);
        (max_Gtilde(alpha, mid, p).numeric < 0.0 ? lo : hi) = mid;
        if (hi - lo < 1e-15 * std::abs(out.mu_star_closed)) break;
    }
    out.mu_star_bisect = 0.5 * (lo + hi);
    return out;
}

namespace {

// Minimal H^1 metric solve used by the ascent refinement (coefficient 1).
std::vector<double> h1_solve(const RadialGrid& g, std::vector<double> rhs) {
    const int n = g.n;
    std::vector<double> diag(g.w), off(n - 1);
    for (int i = 0; i + 1 < n; ++i) {
        double rm = 0.5 * (g.r[i] + g.r[i + 1]);
        double a = g.omega * std::pow(rm, g.N - 1) / g.h;
        diag[i] += a;
        diag[i + 1] += a;
        off[i] = -a;
    }
    diag[n - 1] = 1.0;
    off[n - 2] = 0.0;
    rhs[n - 1] = 0.0;
    for (int i = 1; i < n; ++i) {
        double m = off[i - 1] / diag[i - 1];
        diag[i] -= m * off[i - 1];
        rhs[i] -= m * rhs[i - 1];
    }
    rhs[n - 1] /= diag[n - 1];
    for (int i = n - 2; i >= 0; --i) rhs[i] = (rhs[i] - off[i] * rhs[i + 1]) / diag[i];
    return rhs;
}

}  // namespace

GnEstimate estimate_gn_constant(double p, const Exponents& expo, GridPtr grid, int trials,
                                unsigned seed, GnVariant variant) {
    if (!(p > 2.0) || !(p < expo.q_prime))
        throw SpecError("estimate_gn_constant requires 2 < p < q'");
    std::mt19937 rng(seed);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    const double rmax = grid->r_max;

    auto ratio = [&](const RadialField& u) { return gn_ratio(u, p, 1.0, expo, variant); };

    GnEstimate best;
    best.constant = 0.0;
    for (int t = 0; t < trials; ++t) {
        RadialField u = make_field(grid);
        int kind = t % 3;
        if (kind == 0) {
            double sigma = 0.2 * std::pow(rmax / (6.0 * 0.2), unif(rng));
            u = sample_field(grid, [&](double r) { return std::exp(-0.5 * (r / sigma) * (r / sigma)); });
        } else if (kind == 1) {
            double R = 0.5 + unif(rng) * (rmax / 3.0 - 0.5);
            u = plateau_function(1.0, R, grid);
        } else {
            for (int j = 0; j < 4; ++j) {
                double sigma = 0.3 + unif(rng) * rmax / 6.0;
                double a = unif(rng);
                for (int i = 0; i < grid->n; ++i)
                    u.v[i] += a * std::exp(-0.5 * std::pow(grid->r[i] / sigma, 2));
            }
        }
        u.v.back() = 0.0;
        double r0 = ratio(u);
        if (r0 > best.constant) {
            best.constant = r0;
            best.maximizer = u;
        }
    }

    // Local ascent on log-ratio with an H^1 metric, restricted to shape space
    // by renormalizing (the ratio is 0-homogeneous and dilation invariant).
    RadialField u = project_mass(best.maximizer, 1.0);
    double cur = ratio(u);
    double tau = 0.5;
    const double qsmooth = 1e-10;
    for (int it = 0; it < 400 && tau > 1e-12; ++it) {
        const auto& g = *grid;
        RadialField d = derivative(u);
        double np_p = std::pow(lp_norm(u, p), p);
        double m2 = mass(u);
        double expo_frac, kin;
        std::vector<double> y(g.n);
        if (variant == GnVariant::grad2) {
            expo_frac = expo.delta(p);
            kin = 0.0;
            for (int i = 0; i < g.n; ++i) kin += g.w[i] * d.v[i] * d.v[i];
            for (int i = 0; i < g.n; ++i) y[i] = g.w[i] * d.v[i];
        } else {
            expo_frac = expo.nu(p);
            kin = 0.0;
            for (int i = 0; i < g.n; ++i)
                kin += g.w[i] * std::pow(d.v[i] * d.v[i] + qsmooth * qsmooth, 0.5 * expo.q);
            for (int i = 0; i < g.n; ++i)
                y[i] = g.w[i] * 0.5 * expo.q *
                       std::pow(d.v[i] * d.v[i] + qsmooth * qsmooth, 0.5 * expo.q - 1.0) * 2.0 *
                       d.v[i] / expo.q;
        }
        // Euclidean gradient of log ratio.
        std::vector<double> ge(g.n, 0.0);
        const double inv2h = 1.0 / (2.0 * g.h);
        for (int i = 1; i + 1 < g.n; ++i) {
            ge[i - 1] -= y[i] * inv2h;
            ge[i + 1] += y[i] * inv2h;
        }
        ge[g.n - 1] += 3.0 * y[g.n - 1] * inv2h;
        ge[g.n - 2] -= 4.0 * y[g.n - 1] * inv2h;
        ge[g.n - 3] += y[g.n - 1] * inv2h;
        double kin_fac = expo_frac / kin;
        for (int i = 0; i < g.n; ++i) {
            double term_p = std::pow(std::abs(u.v[i]), p - 2.0) * u.v[i] / np_p;
            double term_m = (1.0 - expo_frac) * u.v[i] / m2;
            ge[i] = g.w[i] * (term_p - term_m) - kin_fac * ge[i];
        }
        ge[g.n - 1] = 0.0;
        auto dir = h1_solve(g, ge);
        RadialField trial = u;
        bool improved = false;
        while (tau > 1e-12) {
            for (int i = 0; i < g.n; ++i) trial.v[i] = u.v[i] + tau * dir[i];
            trial.v[g.n - 1] = 0.0;
            if (mass(trial) > 0.0) {
                double rv = ratio(trial);
                if (rv > cur) {
                    u = project_mass(trial, 1.0);
                    cur = rv;
                    tau *= 1.5;
                    improved = true;
                    break;
                }
            }
            tau *= 0.5;
        }
        if (!improved) break;
    }
    if (cur > best.constant) {
        best.constant = cur;
        best.maximizer = u;
    }
    return best;
}

std::vector<AppendixRow> appendix_divergence(int N, double q, const std::vector<double>& rmax_list,
                                             double nodes_per_unit) {
    critical_exponents(N, q);  // rejects inadmissible (N, q)
    for (size_t i = 1; i < rmax_list.size(); ++i)
        if (!(rmax_list[i] > rmax_list[i - 1]))
            throw SpecError("r_max list must be increasing");
    if (!rmax_list.empty() && !(rmax_list.front() > 10.0))
        throw SpecError("r_max list entries must exceed 10");
    std::vector<AppendixRow> rows;
    for (double R : rmax_list) {
        int n = std::max(4097, (int)std::lround(R * nodes_per_unit) + 1);
        auto grid = RadialGrid::make(N, R, n);
        RadialField u = appendix_function(grid);
        RadialField d = derivative(u);
        AppendixRow row;
        row.r_max = R;
        for (int i = 0; i < n; ++i) {
            double wi = grid->w[i];
            double s2 = u.v[i] * u.v[i];
            if (s2 > 0.0) row.I += wi * s2 * std::log(s2);
            double dv = std::abs(d.v[i]);
            row.K2 += wi * dv * dv;
            row.Kq += wi * std::pow(dv, q);
        }
        rows.push_back(row);
    }
    return rows;
}

}  // namespace qnorm

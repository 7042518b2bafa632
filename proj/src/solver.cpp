#include "qnorm/solver.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <numeric>

namespace qnorm {

void SolverConfig::validate() const {
    if (!(step0 > 0.0)) throw SpecError("step0 must be positive");
    if (!(armijo_c > 0.0 && armijo_c < 1.0)) throw SpecError("armijo_c must lie in (0,1)");
    if (!(backtrack > 0.0 && backtrack < 1.0)) throw SpecError("backtrack must lie in (0,1)");
    if (!(tol_pgrad > 0.0)) throw SpecError("tol_pgrad must be positive");
    if (max_iter <= 0) throw SpecError("max_iter must be positive");
    for (size_t i = 1; i < eps_schedule.size(); ++i)
        if (!(eps_schedule[i] < eps_schedule[i - 1]))
            throw SpecError("eps_schedule must be strictly decreasing");
    for (double e : eps_schedule)
        if (!(e > 0.0 && e < 1.0)) throw SpecError("eps_schedule entries must lie in (0,1)");
}

std::vector<double> SolverConfig::default_eps_schedule() {
    std::vector<double> s;
    for (int k = 1; k <= 12; ++k) s.push_back(std::pow(2.0, -k));
    return s;
}

std::string to_string(SolveStatus s) {
    switch (s) {
        case SolveStatus::converged: return "converged";
        case SolveStatus::stalled: return "stalled";
        default: return "max_iter";
    }
}

RadialField initial_field(GridPtr grid, double c, const SolverConfig& cfg) {
    double width = cfg.init_width > 0.0 ? cfg.init_width : grid->r_max / 8.0;
    if (cfg.init == SolverConfig::Init::plateau) {
        RadialField u = plateau_function(1.0, std::min(width, grid->r_max - 1.5), grid);
        u.v.back() = 0.0;
        return project_mass(u, c);
    }
    return gaussian_bump(grid, width, c);
}

namespace {

// Tridiagonal SPD solve (Thomas). diag/off are overwritten.
void solve_tridiag(std::vector<double>& diag, std::vector<double>& off, std::vector<double>& rhs) {
    const int n = static_cast<int>(diag.size());
    for (int i = 1; i < n; ++i) {
        double m = off[i - 1] / diag[i - 1];
        diag[i] -= m * off[i - 1];
        rhs[i] -= m * rhs[i - 1];
    }
    rhs[n - 1] /= diag[n - 1];
    for (int i = n - 2; i >= 0; --i) rhs[i] = (rhs[i] - off[i] * rhs[i + 1]) / diag[i];
}

// H^1-type metric: M = W(1 + V_+) + T with T a flux-form radial Laplacian
// whose cell coefficients include the current q-kinetic stiffness, and V_+ the
// positive part of the potential curvature -d/ds g^eps (dominant in the ramp
// region of the log term). Boundary row pinned.
std::vector<double> precondition(const RadialField& u, const std::vector<double>& ge,
                                 const Nonlinearity& spec, double eps, double delta_s) {
    const auto& g = *u.grid;
    const int n = g.n;
    std::vector<double> diag(g.w), off(n - 1, 0.0), rhs(ge);
    for (int i = 0; i < n; ++i) {
        double s = u.v[i];
        double fd = 1e-7 * (1.0 + std::abs(s));
        double curv = -(spec.g_eps(eps, s + fd) - spec.g_eps(eps, s - fd)) / (2.0 * fd);
        if (curv > 0.0) diag[i] += g.w[i] * curv;
    }
    for (int i = 0; i + 1 < n; ++i) {
        double rm = 0.5 * (g.r[i] + g.r[i + 1]);
        double dmid = (u.v[i + 1] - u.v[i]) / g.h;
        double coef = 1.0;
        if (spec.q_term)
            coef += std::pow(dmid * dmid + delta_s * delta_s, 0.5 * spec.q - 1.0);
        double a = g.omega * std::pow(rm, g.N - 1) * coef / g.h;
        diag[i] += a;
        diag[i + 1] += a;
        off[i] = -a;
    }
    // Dirichlet boundary node stays fixed.
    diag[n - 1] = 1.0;
    off[n - 2] = 0.0;
    rhs[n - 1] = 0.0;
    solve_tridiag(diag, off, rhs);
    return rhs;
}

}  // namespace

SolveReport minimize_fixed_eps(const RadialField& init, double c, const Nonlinearity& spec,
                               double eps, const SolverConfig& cfg) {
    cfg.validate();
    if (!(c > 0.0)) throw SpecError("mass parameter c must be positive");
    const auto grid = init.grid;
    const int n = grid->n;

    RadialField u = init;
    u.v[n - 1] = 0.0;  // Dirichlet truncation
    u = project_mass(u, c);

    double delta_s = cfg.delta_s;
    if (delta_s < 0.0) {
        RadialField d0 = derivative(u);
        double dmax = 0.0;
        for (double x : d0.v) dmax = std::max(dmax, std::abs(x));
        delta_s = 1e-8 * std::max(1.0, dmax);
    }
    EnergyParams par{eps, delta_s};

    SolveReport rep;
    rep.eps = eps;
    rep.status = SolveStatus::max_iter;
    double c2 = c * c;
    double tau = cfg.step0;
    double E = energy(u, spec, par).total;

    RadialField gw = make_field(grid), pg = make_field(grid);
    int stagnant = 0;
    std::deque<double> recent_E;  // energies over the last 40 iterations
    auto energy_flat = [&]() {
        return recent_E.size() >= 40 && recent_E.front() - E <= 1e-10 * (1.0 + std::abs(E));
    };
    for (int iter = 0; iter < cfg.max_iter; ++iter) {
        recent_E.push_back(E);
        if (recent_E.size() > 40) recent_E.pop_front();
        auto ge = gradient_euclidean(u, spec, par);
        ge[n - 1] = 0.0;
        for (int i = 0; i < n; ++i) gw.v[i] = ge[i] / grid->w[i];
        gw.v[n - 1] = 0.0;
        double lambda = -weighted_dot(gw, u) / c2;
        double pgnorm2 = 0.0;
        for (int i = 0; i < n; ++i) {
            pg.v[i] = gw.v[i] + lambda * u.v[i];
            pgnorm2 += grid->w[i] * pg.v[i] * pg.v[i];
        }
        double pgnorm = std::sqrt(pgnorm2);
        if (cfg.record_trace) rep.trace.push_back({E, pgnorm});
        rep.iterations = iter;
        rep.lambda = lambda;
        rep.pgrad_norm = pgnorm;
        if (pgnorm <= cfg.tol_pgrad * (1.0 + std::abs(E))) {
            rep.status = SolveStatus::converged;
            break;
        }

        // Precondition the projected gradient (euclidean form pe = w * pg),
        // then project again so the direction stays tangent to the sphere;
        // dd = <pg, M^{-1} pg> is then positive by symmetry of M^{-1}.
        std::vector<double> pe(n);
        for (int i = 0; i < n; ++i) pe[i] = grid->w[i] * pg.v[i];
        pe[n - 1] = 0.0;
        std::vector<double> dvec = cfg.precondition ? precondition(u, pe, spec, eps, delta_s) : [&] {
            std::vector<double> d(n);
            for (int i = 0; i < n; ++i) d[i] = pg.v[i];
            return d;
        }();
        double du = 0.0;
        for (int i = 0; i < n; ++i) du += grid->w[i] * dvec[i] * u.v[i];
        double shift = du / c2;
        double dd = 0.0;
        for (int i = 0; i < n; ++i) {
            dvec[i] -= shift * u.v[i];
            dd += pe[i] * dvec[i];
        }
        if (!(dd > 0.0)) {  // roundoff guard: fall back to the projected gradient
            for (int i = 0; i < n; ++i) dvec[i] = pg.v[i];
            dd = pgnorm2;
        }

        double try_tau = std::min(2.0 * tau, 1e8);
        bool accepted = false;
        RadialField trial = make_field(grid);
        while (try_tau >= 1e-16 * cfg.step0) {
            for (int i = 0; i < n; ++i) trial.v[i] = u.v[i] - try_tau * dvec[i];
            trial.v[n - 1] = 0.0;
            double tm = mass(trial);
            if (tm > 0.0) {
                double scale = c / std::sqrt(tm);
                for (auto& x : trial.v) x *= scale;
                double Et;
                try {
                    Et = energy(trial, spec, par).total;
                } catch (const NumericError&) {
                    Et = std::numeric_limits<double>::infinity();
                }
                if (Et <= E - cfg.armijo_c * try_tau * dd) {
                    // Count no-op accepts: the minimizer of the kinked
                    // regularized term is reached when steps stop moving E.
                    if (E - Et <= 1e-14 * (1.0 + std::abs(E)))
                        ++stagnant;
                    else
                        stagnant = 0;
                    u = trial;
                    E = Et;
                    tau = try_tau;
                    accepted = true;
                    break;
                }
            }
            try_tau *= cfg.backtrack;
        }
        if (!accepted) {
            // No descent step left. If the energy has been numerically
            // stationary, the discrete minimizer (possibly on a kink of
            // G_-^eps) is reached; otherwise a genuine stall.
            rep.status = (energy_flat() || pgnorm <= 1e-3 * (1.0 + std::abs(E)))
                             ? SolveStatus::converged
                             : SolveStatus::stalled;
            break;
        }
        if (stagnant >= 40 || (energy_flat() && iter > 200)) {
            // Energy numerically stationary; the residual gradient floor comes
            // from the kink of G_-^eps at |u| = eps.
            rep.status = pgnorm <= 1e-3 * (1.0 + std::abs(E)) ? SolveStatus::converged
                                                              : SolveStatus::stalled;
            break;
        }
    }

    rep.field = u;
    rep.energy = energy(u, spec, par);
    auto ge = gradient_euclidean(u, spec, par);
    ge[n - 1] = 0.0;
    for (int i = 0; i < n; ++i) gw.v[i] = ge[i] / grid->w[i];
    rep.lambda = -weighted_dot(gw, u) / c2;
    double pgnorm2 = 0.0;
    for (int i = 0; i < n; ++i) {
        double p = gw.v[i] + rep.lambda * u.v[i];
        pgnorm2 += grid->w[i] * p * p;
    }
    rep.pgrad_norm = std::sqrt(pgnorm2);
    rep.mass_defect = std::abs(mass(u) - c2) / c2;
    rep.pohozaev = pohozaev_residual(u, rep.lambda, spec, eps);
    rep.nehari = nehari_residual(u, rep.lambda, spec, eps);
    return rep;
}

std::vector<SolveReport> continuation_solve(GridPtr grid, double c, const Nonlinearity& spec,
                                            const SolverConfig& cfg) {
    SolverConfig local = cfg;
    if (local.eps_schedule.empty()) local.eps_schedule = SolverConfig::default_eps_schedule();
    local.validate();
    std::vector<SolveReport> out;
    RadialField u = initial_field(grid, c, local);
    for (double eps : local.eps_schedule) {
        SolveReport rep = minimize_fixed_eps(u, c, spec, eps, local);
        u = rep.field;
        bool stalled = rep.status == SolveStatus::stalled;
        out.push_back(std::move(rep));
        if (stalled) break;  // stage index = out.size() - 1
    }
    return out;
}

AttainmentVerdict boundary_attainment(const SolveReport& rep, double c, double lambda_tol) {
    AttainmentVerdict v;
    double defect = std::abs(mass(rep.field) - c * c) / (c * c);
    v.interior_flag = rep.lambda <= lambda_tol;
    v.attained = (defect <= 1e-10) && (rep.lambda > lambda_tol);
    return v;
}

QualitativeCheck qualitative_check(const RadialField& u) {
    QualitativeCheck out;
    double umax = 0.0;
    for (double x : u.v) umax = std::max(umax, std::abs(x));
    double tol = 1e-8 * umax;
    double lo = 0.0, hi = 0.0;
    for (double x : u.v) {
        lo = std::min(lo, x);
        hi = std::max(hi, x);
    }
    out.sign_constant = !(lo < -tol && hi > tol);
    out.radially_monotone = true;
    for (int i = 0; i + 1 < u.size(); ++i) {
        if (std::abs(u.v[i + 1]) > std::abs(u.v[i]) + tol) {
            out.radially_monotone = false;
            out.defect_nodes.push_back(i + 1);
        }
    }
    return out;
}

RadialField rearrange_decreasing(const RadialField& u) {
    const auto& g = *u.grid;
    const int n = g.n;
    for (double x : u.v)
        if (x < 0.0) throw SpecError("rearrange_decreasing requires a nonnegative field");
    bool sorted = true;
    for (int i = 0; i + 1 < n; ++i)
        if (u.v[i + 1] > u.v[i]) { sorted = false; break; }
    if (sorted) return u;

    // Step quantile function of u against the weighted measure, then assign
    // each node the rms of the quantile over its own volume chunk; this keeps
    // the L2 mass exact and the output radially nonincreasing.
    std::vector<int> idx(n);
    std::iota(idx.begin(), idx.end(), 0);
    std::sort(idx.begin(), idx.end(), [&](int a, int b) { return u.v[a] > u.v[b]; });
    RadialField out = make_field(u.grid);
    size_t k = 0;
    double remaining = g.w[idx[0]];
    for (int j = 0; j < n; ++j) {
        double need = g.w[j];
        double acc = 0.0;
        while (need > 0.0 && k < idx.size()) {
            if (remaining <= 0.0) {
                ++k;
                if (k < idx.size()) remaining = g.w[idx[k]];
                continue;
            }
            double take = std::min(need, remaining);
            double val = u.v[idx[k]];
            acc += take * val * val;
            need -= take;
            remaining -= take;
        }
        out.v[j] = std::sqrt(acc / g.w[j]);
    }
    return out;
}

}  // namespace qnorm

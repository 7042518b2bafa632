#include "qnorm/nonlinearity.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace qnorm {

namespace {

constexpr double kTiny = 1e-300;  // below this |s|, s ln s^2 underflows; use the limit 0

double require_finite(double s, const char* what) {
    if (!std::isfinite(s)) throw NumericError(std::string(what) + ": non-finite argument");
    return s;
}

// Adaptive Simpson, used only for custom nonlinearities.
double adaptive_simpson(const std::function<double(double)>& f, double a, double b,
                        double fa, double fm, double fb, double whole, double tol, int depth) {
    double m = 0.5 * (a + b);
    double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
    double flm = f(lm), frm = f(rm);
    double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    if (depth <= 0) throw NumericError("quadrature failure on interval [" + std::to_string(a) +
                                       ", " + std::to_string(b) + "]");
    if (std::abs(left + right - whole) <= 15.0 * tol)
        return left + right + (left + right - whole) / 15.0;
    return adaptive_simpson(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
           adaptive_simpson(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}

double integrate_adaptive(const std::function<double(double)>& f, double a, double b,
                          double tol = 1e-12) {
    if (a == b) return 0.0;
    double fa = f(a), fb = f(b), fm = f(0.5 * (a + b));
    double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    return adaptive_simpson(f, a, b, fa, fm, fb, whole, std::max(tol, 1e-15 * std::abs(whole)), 48);
}

}  // namespace

double Exponents::delta(double p) const { return N * (p - 2.0) / (2.0 * p); }

double Exponents::nu(double p) const {
    return N * q * (p - 2.0) / (p * (N * q - 2.0 * (N - q)));
}

Exponents critical_exponents(int N, double q) {
    const double inf = std::numeric_limits<double>::infinity();
    if (N < 2) throw SpecError("dimension N must satisfy N >= 2, got N = " + std::to_string(N));
    double lo = 2.0 * N / (N + 2.0);
    bool low_branch = (q > lo && q < 2.0);
    bool high_branch = (q > 2.0 && q < N && N >= 3);
    if (!low_branch && !high_branch) {
        if (q <= lo)
            throw SpecError("q = " + std::to_string(q) + " violates q > 2N/(N+2) = " +
                            std::to_string(lo));
        if (q == 2.0) throw SpecError("q = 2 is excluded (q != 2)");
        if (N < 3) throw SpecError("q > 2 requires N >= 3");
        throw SpecError("q = " + std::to_string(q) + " violates q < N = " + std::to_string(N));
    }
    Exponents e;
    e.N = N;
    e.q = q;
    e.two_star = (N >= 3) ? 2.0 * N / (N - 2.0) : inf;
    e.q_star = (q < N) ? q * N / (N - q) : inf;
    e.q_prime = std::max(e.two_star, e.q_star);
    e.q_bar = (1.0 + 2.0 / N) * std::max(2.0, q);
    e.q_tilde = (1.0 + 2.0 / N) * std::min(2.0, q);
    return e;
}

double phi_eps(double eps, double s) {
    if (!(eps > 0.0 && eps < 1.0)) throw SpecError("phi_eps: eps must lie in (0,1)");
    double a = std::abs(require_finite(s, "phi_eps"));
    return a >= eps ? 1.0 : a / eps;
}

Nonlinearity Nonlinearity::log_power(double alpha, double mu, double p, int N, double q) {
    Nonlinearity s;
    s.kind = NonlinKind::log_power;
    s.alpha = alpha;
    s.mu = mu;
    s.p = p;
    s.N = N;
    s.q = q;
    s.validate();
    return s;
}

Nonlinearity Nonlinearity::pure_power(double mu, double p, int N, double q) {
    Nonlinearity s;
    s.kind = NonlinKind::pure_power;
    s.alpha = 0.0;
    s.mu = mu;
    s.p = p;
    s.N = N;
    s.q = q;
    s.validate();
    return s;
}

Nonlinearity Nonlinearity::custom(std::function<double(double)> g,
                                  std::function<double(double)> G, int N, double q) {
    Nonlinearity s;
    s.kind = NonlinKind::custom;
    s.custom_g = std::move(g);
    s.custom_G = std::move(G);
    s.alpha = 0.0;
    s.mu = 0.0;
    s.N = N;
    s.q = q;
    s.validate();
    return s;
}

void Nonlinearity::validate() {
    expo_ = critical_exponents(N, q);
    if (kind == NonlinKind::custom) {
        if (!custom_g || !custom_G) throw SpecError("custom nonlinearity requires both g and G");
        locate_sign_changes();
        return;
    }
    if (kind == NonlinKind::log_power && alpha < 0.0)
        throw SpecError("log coefficient alpha must be >= 0");
    bool power_active = (mu != 0.0) || kind == NonlinKind::pure_power;
    if (power_active) {
        if (!(p > 2.0)) throw SpecError("power exponent must satisfy p > 2");
        if (N >= 3 && !(p < expo_.q_prime))
            throw SpecError("growth assumption requires p < q' = " + std::to_string(expo_.q_prime));
    }
    locate_sign_changes();
}

double Nonlinearity::g(double s) const {
    require_finite(s, "g");
    if (kind == NonlinKind::custom) return custom_g(s);
    double a = std::abs(s);
    if (a < kTiny) return 0.0;
    double val = 0.0;
    if (kind == NonlinKind::log_power && alpha != 0.0) val += alpha * s * (2.0 * std::log(a));
    if (mu != 0.0) val += mu * std::pow(a, p - 2.0) * s;
    return val;
}

double Nonlinearity::G(double s) const {
    require_finite(s, "G");
    if (kind == NonlinKind::custom) return custom_G(s);
    double a = std::abs(s);
    if (a < kTiny) return 0.0;
    double val = 0.0;
    if (kind == NonlinKind::log_power && alpha != 0.0)
        val += 0.5 * alpha * a * a * ((2.0 * std::log(a)) - 1.0);
    if (mu != 0.0) val += mu / p * std::pow(a, p);
    return val;
}

double Nonlinearity::g_plus(double s) const {
    double v = g(s);
    return s >= 0.0 ? std::max(v, 0.0) : std::min(v, 0.0);
}

double Nonlinearity::g_minus(double s) const { return g_plus(s) - g(s); }

void Nonlinearity::locate_sign_changes() {
    roots_.clear();
    gplus_at_.clear();
    // Sign structure of g on (0,inf) via h(s) = g(s)/s, scanned on a log grid.
    auto h = [this](double s) { return g(s) / s; };
    const double lo = 1e-12, hi = 1e12;
    const int scan = 600;
    double prev_s = lo, prev_h = h(lo);
    for (int i = 1; i <= scan; ++i) {
        double s = lo * std::pow(hi / lo, double(i) / scan);
        double hs = h(s);
        if (hs == 0.0) {
            roots_.push_back(s);  // scan point landed exactly on a root
        } else if (prev_h != 0.0 && (prev_h < 0.0) != (hs < 0.0)) {
            double a = prev_s, b = s;
            for (int it = 0; it < 200; ++it) {
                double m = 0.5 * (a + b);
                double hm = h(m);
                if (hm == 0.0 || (hm < 0.0) == (prev_h < 0.0))
                    a = m;
                else
                    b = m;
                if ((b - a) <= 1e-14 * b) break;
            }
            roots_.push_back(0.5 * (a + b));
        }
        prev_s = s;
        if (hs != 0.0) prev_h = hs;
    }
    // drop duplicates from a root found both exactly and by bisection
    std::sort(roots_.begin(), roots_.end());
    roots_.erase(std::unique(roots_.begin(), roots_.end(),
                             [](double a, double b) { return b - a <= 1e-9 * b; }),
                 roots_.end());
    // Cumulative G_plus at each root: G_plus grows only over intervals where g > 0.
    double acc = 0.0;
    double left = 0.0;
    for (size_t k = 0; k < roots_.size(); ++k) {
        double right = roots_[k];
        double mid = (left == 0.0) ? 0.5 * right : std::sqrt(left * right);
        bool positive = g(mid) > 0.0;
        if (positive) {
            if (kind == NonlinKind::custom)
                acc += integrate_adaptive(custom_g, left, right);
            else
                acc += G(right) - G(left);
        }
        gplus_at_.push_back(acc);
        left = right;
    }
}

double Nonlinearity::G_plus(double s) const {
    require_finite(s, "G_plus");
    double a = std::abs(s);
    if (a < kTiny) return 0.0;
    double acc = 0.0;
    double left = 0.0;
    for (size_t k = 0; k < roots_.size() && roots_[k] < a; ++k) {
        acc = gplus_at_[k];
        left = roots_[k];
    }
    // Final partial interval [left, a].
    double mid = (left == 0.0) ? 0.5 * a : std::sqrt(left * a);
    if (g(std::min(mid, a)) > 0.0) {
        if (kind == NonlinKind::custom)
            acc += integrate_adaptive(custom_g, left, a);
        else
            acc += G(a) - G(left);
    }
    return acc;
}

double Nonlinearity::G_minus(double s) const { return G_plus(s) - G(s); }

double Nonlinearity::ramp_integral(double eps, double x) const {
    // (1/eps) * int_0^x t g_-(t) dt, 0 <= x <= eps.
    if (x <= 0.0) return 0.0;
    if (kind == NonlinKind::custom) {
        auto f = [this](double t) { return t * g_minus(t); };
        return integrate_adaptive(f, 0.0, x) / eps;
    }
    // Closed form: H(y) = int_0^y t g(t) dt, accumulated over subintervals where g < 0.
    auto H = [this](double y) {
        if (y < kTiny) return 0.0;
        double val = 0.0;
        if (kind == NonlinKind::log_power && alpha != 0.0)
            val += alpha * (y * y * y / 3.0 * (2.0 * std::log(y)) - 2.0 / 9.0 * y * y * y);
        if (mu != 0.0) val += mu * std::pow(y, p + 1.0) / (p + 1.0);
        return val;
    };
    double acc = 0.0;
    double left = 0.0;
    for (size_t k = 0; k <= roots_.size(); ++k) {
        double right = (k < roots_.size()) ? std::min(roots_[k], x) : x;
        if (right <= left) {
            if (k < roots_.size() && roots_[k] >= x) break;
            continue;
        }
        double mid = (left == 0.0) ? 0.5 * right : std::sqrt(left * right);
        if (g(mid) < 0.0) acc += -(H(right) - H(left));
        left = right;
        if (left >= x) break;
    }
    return acc / eps;
}

double Nonlinearity::G_minus_eps(double eps, double s) const {
    if (!(eps > 0.0 && eps < 1.0)) throw SpecError("G_minus_eps: eps must lie in (0,1)");
    double a = std::abs(require_finite(s, "G_minus_eps"));
    if (a <= eps) return ramp_integral(eps, a);
    return ramp_integral(eps, eps) + (G_minus(a) - G_minus(eps));
}

double Nonlinearity::g_eps(double eps, double s) const {
    return g_plus(s) - phi_eps(eps, s) * g_minus(s);
}

double Nonlinearity::G_eps(double eps, double s) const { return G_plus(s) - G_minus_eps(eps, s); }

double Nonlinearity::g_eps_derivative_bound(double eps, double umax) const {
    // Crude sup of |d g_eps/ds| over |s| <= umax; used to scale solver preconditioning.
    double bound = 1.0;
    double a = std::max(umax, eps);
    if (kind == NonlinKind::log_power && alpha != 0.0)
        bound += alpha * (std::abs((2.0 * std::log(a))) + 2.0 * std::abs(std::log(eps)) + 4.0);
    if (mu != 0.0) bound += std::abs(mu) * (p - 1.0) * std::pow(a, p - 2.0);
    return bound;
}

bool AssumptionReport::all_pass() const {
    return std::all_of(checks.begin(), checks.end(),
                       [](const AssumptionCheck& c) { return c.verdict == Verdict::pass; });
}

const AssumptionCheck& AssumptionReport::operator[](const std::string& name) const {
    for (const auto& c : checks)
        if (c.name == name) return c;
    throw std::out_of_range("no assumption named " + name);
}

std::string to_string(Verdict v) {
    switch (v) {
        case Verdict::pass: return "pass";
        case Verdict::fail: return "fail";
        default: return "indeterminate";
    }
}

namespace {

// Trend of ratios f(s_k) over log-spaced s_k spanning 3 decades toward s_limit.
// Returns pass when the extrapolated limit is ~0, fail when clearly bounded away,
// indeterminate when successive extrapolants disagree by more than 10%.
AssumptionCheck limit_check(const std::string& name, const std::function<double(double)>& ratio,
                            double s_start, double direction, int samples) {
    AssumptionCheck out;
    out.name = name;
    std::vector<double> s(samples), val(samples);
    for (int i = 0; i < samples; ++i) {
        double expo = 3.0 * double(i) / (samples - 1);  // 3 decades
        s[i] = s_start * std::pow(10.0, direction * expo);
        val[i] = ratio(s[i]);
    }
    double last = std::abs(val[samples - 1]);
    double mid = std::abs(val[samples / 2]);
    double first = std::abs(val[0]);
    out.witness_s = s[samples - 1];
    out.estimate = val[samples - 1];
    double scale = std::max({first, mid, last, 1e-30});
    if (last <= 1e-10 || (last <= 0.05 * first && mid <= 0.3 * first)) {
        out.verdict = Verdict::pass;  // decaying toward zero
    } else if (std::abs(last - mid) <= 0.10 * std::max(std::abs(last), 1e-30) && last > 1e-8 * scale) {
        out.verdict = Verdict::fail;  // settled on a nonzero limit
    } else if (last > 10.0 * first && mid > 3.0 * first) {
        out.verdict = Verdict::fail;  // diverging
    } else {
        out.verdict = Verdict::indeterminate;
    }
    return out;
}

}  // namespace

AssumptionReport check_assumptions(const Nonlinearity& spec, int sample_count) {
    AssumptionReport rep;
    const auto& e = spec.exponents();

    // (g0): continuity at 0 with g(0) = 0.
    {
        AssumptionCheck c;
        c.name = "g0";
        double near0 = std::max(std::abs(spec.g(1e-10)), std::abs(spec.g(-1e-10)));
        c.estimate = near0;
        c.witness_s = 1e-10;
        c.verdict = (near0 < 1e-6 && spec.g(0.0) == 0.0) ? Verdict::pass : Verdict::fail;
        rep.checks.push_back(c);
    }

    // (g1): G_+(s)/s^2 -> 0 as s -> 0.
    rep.checks.push_back(limit_check(
        "g1", [&](double s) { return spec.G_plus(s) / (s * s); }, 1e-2, -1.0, sample_count));

    // (g2): N >= 3: |g(s)|/|s|^{q'-1} bounded at infinity; N = 2: g(s)/e^{a s^2} -> 0.
    if (spec.N >= 3) {
        AssumptionCheck c = limit_check(
            "g2", [&](double s) { return std::abs(spec.g(s)) / std::pow(s, e.q_prime - 1.0); },
            1e2, +1.0, sample_count);
        // Bounded (possibly nonzero) is enough here.
        if (c.verdict == Verdict::fail && std::abs(c.estimate) < 1e6) {
            double tail1 = std::abs(spec.g(1e4)) / std::pow(1e4, e.q_prime - 1.0);
            double tail2 = std::abs(spec.g(1e5)) / std::pow(1e5, e.q_prime - 1.0);
            if (tail2 <= tail1 * 1.1) c.verdict = Verdict::pass;
        }
        rep.checks.push_back(c);
    } else {
        AssumptionCheck c = limit_check(
            "g2", [&](double s) { return spec.g(s) / std::exp(0.5 * s * s); }, 1e1, +1.0,
            std::min(sample_count, 16));
        rep.checks.push_back(c);
    }

    // (g3): G_+(s)/|s|^{q_bar} -> 0 at infinity.
    rep.checks.push_back(limit_check(
        "g3", [&](double s) { return spec.G_plus(s) / std::pow(s, e.q_bar); }, 1e2, +1.0,
        sample_count));

    // (g4): exists xi0 with G(xi0) > 0, located by log scan.
    {
        AssumptionCheck c;
        c.name = "g4";
        c.verdict = Verdict::fail;
        double best = 0.0;
        for (int i = 0; i <= 400; ++i) {
            double s = 1e-6 * std::pow(1e12, double(i) / 400.0);
            double v = spec.G(s);
            if (v > best) {
                best = v;
                c.witness_s = s;
                c.estimate = v;
                c.verdict = Verdict::pass;
            }
        }
        rep.checks.push_back(c);
    }
    return rep;
}

}  // namespace qnorm

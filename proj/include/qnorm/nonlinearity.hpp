#pragma once

#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace qnorm {

// Thrown when (N, q) or the nonlinearity parameters violate the admissible range.
struct SpecError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct NumericError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Critical exponents attached to a dimension N and q-Laplacian exponent q.
// Admissible range: 2N/(N+2) < q < 2 with N >= 2, or 2 < q < N with N >= 3.
struct Exponents {
    int N = 0;
    double q = 0.0;
    double two_star = 0.0;  // 2N/(N-2), +inf when N = 2
    double q_star = 0.0;    // qN/(N-q)
    double q_prime = 0.0;   // max{2*, q*}
    double q_bar = 0.0;     // (1 + 2/N) max{2, q}
    double q_tilde = 0.0;   // (1 + 2/N) min{2, q}

    double delta(double p) const;  // N(p-2)/(2p)
    double nu(double p) const;     // Nq(p-2) / (p [Nq - 2(N-q)])
};

Exponents critical_exponents(int N, double q);

// Piecewise-linear ramp: |s|/eps on [-eps, eps], 1 outside. Requires 0 < eps < 1.
double phi_eps(double eps, double s);

enum class NonlinKind { log_power, pure_power, custom };

// A nonlinearity g with antiderivative G, its sign split (G+, G-) and the
// eps-regularized pieces built from the ramp phi_eps.
//
// log_power:  g(s) = alpha s ln s^2 + mu |s|^{p-2} s
// pure_power: g(s) = mu |s|^{p-2} s
// custom:     user-supplied g and G; sign splits fall back to quadrature.
class Nonlinearity {
public:
    NonlinKind kind = NonlinKind::log_power;
    double alpha = 1.0;
    double mu = 0.0;
    double p = 4.0;
    int N = 3;
    double q = 1.8;
    bool q_term = true;  // validation toggle: disables the q-Laplacian energy term

    std::function<double(double)> custom_g;
    std::function<double(double)> custom_G;

    static Nonlinearity log_power(double alpha, double mu, double p, int N, double q);
    static Nonlinearity pure_power(double mu, double p, int N, double q);
    static Nonlinearity custom(std::function<double(double)> g,
                               std::function<double(double)> G, int N, double q);

    // Throws SpecError naming the violated inequality.
    void validate();

    const Exponents& exponents() const { return expo_; }

    double g(double s) const;
    double G(double s) const;

    // g_plus = d/ds G_plus (max{g,0} for s>=0, min{g,0} for s<0); g_minus = g_plus - g.
    double g_plus(double s) const;
    double g_minus(double s) const;
    double G_plus(double s) const;
    double G_minus(double s) const;

    // Regularized pieces, 0 < eps < 1.
    double G_minus_eps(double eps, double s) const;
    double g_eps(double eps, double s) const;               // g_plus - phi_eps * g_minus
    double G_eps(double eps, double s) const;               // G_plus - G_minus_eps >= G
    double g_eps_derivative_bound(double eps, double umax) const;  // crude curvature scale

    // Positive radii where g changes sign (empty if g keeps one sign on (0,inf)).
    const std::vector<double>& sign_changes() const { return roots_; }

private:
    Exponents expo_;
    std::vector<double> roots_;        // positive sign-change radii of g, increasing
    std::vector<double> gplus_at_;     // cumulative G_plus at each root

    void locate_sign_changes();
    double ramp_integral(double eps, double x) const;  // (1/eps) * int_0^x t g_-(t) dt
};

enum class Verdict { pass, fail, indeterminate };

struct AssumptionCheck {
    std::string name;
    Verdict verdict = Verdict::indeterminate;
    double witness_s = 0.0;
    double estimate = 0.0;
};

struct AssumptionReport {
    std::vector<AssumptionCheck> checks;
    bool all_pass() const;
    const AssumptionCheck& operator[](const std::string& name) const;
};

// Numerically audits (g0)-(g4) on log-spaced sample grids.
AssumptionReport check_assumptions(const Nonlinearity& spec, int sample_count = 48);

std::string to_string(Verdict v);

}  // namespace qnorm

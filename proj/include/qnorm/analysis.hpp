#pragma once

#include <optional>

#include "qnorm/solver.hpp"

namespace qnorm {

struct CurvePoint {
    double c = 0.0;
    double m = 0.0;       // final-eps energy
    double lambda = 0.0;
    std::string status;   // converged | stalled | degenerate
    std::vector<double> m_eps;  // per-stage energies along the eps schedule
};

struct SubadditivityCheck {
    double c1 = 0.0, c2 = 0.0, c_combined = 0.0;
    double residual = 0.0;  // m(sqrt(c1^2+c2^2)) - m(c1) - m(c2), negative is good
};

struct EnergyCurve {
    std::vector<CurvePoint> points;
    bool monotone_nonincreasing = true;
    double worst_monotonicity_violation = 0.0;
    std::vector<SubadditivityCheck> subadditivity;
    bool eps_values_nondecreasing = true;  // m_eps(c) nondecreasing as eps decreases

    double interpolate_m(double c) const;
};

EnergyCurve sweep_mass(const std::vector<double>& c_list, const Nonlinearity& spec,
                       const SolverConfig& cfg, GridPtr grid, int workers = 1,
                       int subadditivity_samples = 10);

// Bisection on the predicate m(c) < -tol_energy. nullopt means "zero": the
// predicate already holds at c_lo.
struct CbarResult {
    std::optional<double> cbar;  // nullopt = "zero"
    bool bracket_ok = true;
    std::string note;
};

CbarResult find_cbar(const Nonlinearity& spec, const SolverConfig& cfg, GridPtr grid,
                     double c_lo, double c_hi, double tol_c, double tol_energy = 1e-8);

struct GtildeMax {
    double closed_form = 0.0;
    double numeric = 0.0;  // golden-section cross-check
    double argmax = 0.0;
};

// max_{s>0} of G(s)/s^2 for the log-power family (alpha > 0, mu < 0, p > 2).
GtildeMax max_Gtilde(double alpha, double mu, double p);

struct ThresholdResult {
    double mu_star_closed = 0.0;
    double mu_star_bisect = 0.0;  // root in mu of the numeric max of Gtilde
};

// mu* = -(alpha p/(p-2)) e^{-p/2}.
ThresholdResult existence_threshold(double alpha, double p);

struct GnEstimate {
    double constant = 0.0;      // lower bound on the sharp constant
    RadialField maximizer;
};

GnEstimate estimate_gn_constant(double p, const Exponents& expo, GridPtr grid, int trials,
                                unsigned seed, GnVariant variant = GnVariant::grad2);

struct AppendixRow {
    double r_max = 0.0;
    double I = 0.0;   // truncated integral of u^2 ln u^2
    double K2 = 0.0;  // integral of |grad u|^2
    double Kq = 0.0;  // integral of |grad u|^q
};

std::vector<AppendixRow> appendix_divergence(int N, double q, const std::vector<double>& rmax_list,
                                             double nodes_per_unit = 64.0);

}  // namespace qnorm

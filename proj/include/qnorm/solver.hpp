#pragma once

#include <string>
#include <vector>

#include "qnorm/functional.hpp"

namespace qnorm {

struct SolverConfig {
    double step0 = 1.0;
    double armijo_c = 1e-4;
    double backtrack = 0.5;
    double tol_pgrad = 1e-8;  // scale-aware: stop at tol_pgrad * (1 + |energy|)
    int max_iter = 20000;
    std::vector<double> eps_schedule;  // default: geometric 0.5 .. 2^-12
    double delta_s = -1.0;             // < 0: auto, 1e-8 * initial gradient scale
    enum class Init { gaussian_bump, plateau, provided } init = Init::gaussian_bump;
    double init_width = -1.0;  // < 0: r_max / 8
    unsigned seed = 1;
    bool precondition = true;  // H^1 (Sobolev) metric for the descent direction
    bool record_trace = true;

    void validate() const;
    static std::vector<double> default_eps_schedule();
};

enum class SolveStatus { converged, max_iter, stalled };

struct TracePoint {
    double energy;
    double pgrad_norm;
};

struct SolveReport {
    RadialField field;
    double lambda = 0.0;
    EnergyBreakdown energy;
    double pgrad_norm = 0.0;
    double pohozaev = 0.0;
    double nehari = 0.0;
    double mass_defect = 0.0;
    int iterations = 0;
    double eps = 0.0;
    SolveStatus status = SolveStatus::max_iter;
    std::vector<TracePoint> trace;
};

std::string to_string(SolveStatus s);

// Projected descent over the mass sphere S(c) at fixed regularization eps.
SolveReport minimize_fixed_eps(const RadialField& init, double c, const Nonlinearity& spec,
                               double eps, const SolverConfig& cfg);

// Warm-started continuation along cfg.eps_schedule (decreasing); the last
// report is the eps -> 0 proxy for (u, lambda, m(c)).
std::vector<SolveReport> continuation_solve(GridPtr grid, double c, const Nonlinearity& spec,
                                            const SolverConfig& cfg);

RadialField initial_field(GridPtr grid, double c, const SolverConfig& cfg);

struct AttainmentVerdict {
    bool attained = false;
    bool interior_flag = false;  // lambda <= tol: interior-minimum suspicion
};

AttainmentVerdict boundary_attainment(const SolveReport& rep, double c,
                                      double lambda_tol = 1e-10);

struct QualitativeCheck {
    bool sign_constant = false;
    bool radially_monotone = false;
    std::vector<int> defect_nodes;
};

QualitativeCheck qualitative_check(const RadialField& u);

// Equimeasurable decreasing rearrangement on the same grid (nonnegative input).
RadialField rearrange_decreasing(const RadialField& u);

}  // namespace qnorm

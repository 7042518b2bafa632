#pragma once

#include <optional>

#include "qnorm/nonlinearity.hpp"
#include "qnorm/radial_grid.hpp"

namespace qnorm {

struct EnergyParams {
    std::optional<double> eps;  // absent: the unperturbed functional J
    double delta_s = 0.0;       // q-kinetic smoothing radius (0 = none)
};

struct EnergyBreakdown {
    double kinetic2 = 0.0;    // (1/2)||grad u||_2^2
    double kineticq = 0.0;    // (1/q)||grad u||_q^q (smoothed)
    double gminus_eps = 0.0;  // integral of G_-^eps(u) (or G_-(u) when eps absent)
    double gplus = 0.0;       // integral of G_+(u)
    double total = 0.0;
    std::optional<double> eps;
    bool gminus_flagged = false;  // truncation-dominated G_- integral (J may be defective)
};

EnergyBreakdown energy(const RadialField& u, const Nonlinearity& spec, const EnergyParams& par);

// Exact gradient of the discrete energy, represented in the weighted L2 inner
// product: directional derivatives satisfy dE(u)[v] = sum_i w_i grad_i v_i.
RadialField gradient(const RadialField& u, const Nonlinearity& spec, const EnergyParams& par);

// Euclidean partials dE/du_j (gradient times the weights), solver internal.
std::vector<double> gradient_euclidean(const RadialField& u, const Nonlinearity& spec,
                                       const EnergyParams& par);

// lambda = -<grad, u>_w / ||u||_2^2.
double lagrange_multiplier(const RadialField& u, const RadialField& grad);

double weighted_dot(const RadialField& a, const RadialField& b);

// |LHS - RHS| / (|LHS| + |RHS| + 1) for the identity tested against u itself.
double nehari_residual(const RadialField& u, double lambda, const Nonlinearity& spec,
                       std::optional<double> eps);

// Same normalization for the scaling (Pohozaev) identity.
double pohozaev_residual(const RadialField& u, double lambda, const Nonlinearity& spec,
                         std::optional<double> eps);

enum class GnVariant { grad2, gradq };

// ||u||_p / (C ||grad u||_2^{delta_p} ||u||_2^{1-delta_p}), or the q-gradient
// variant with nu_{p,q}. Degree-0 homogeneous and dilation invariant.
double gn_ratio(const RadialField& u, double p, double C, const Exponents& e,
                GnVariant variant = GnVariant::grad2);

}  // namespace qnorm

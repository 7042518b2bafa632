#pragma once

#include <cmath>
#include <memory>
#include <span>
#include <vector>

#include "qnorm/nonlinearity.hpp"

namespace qnorm {

// Uniform radial grid on [0, r_max] with quadrature weights against the
// measure omega_{N-1} r^{N-1} dr. Weights come from exact integration of the
// piecewise-linear (hat) interpolant, so degree-1 polynomials in r are
// integrated exactly and every weight is strictly positive.
class RadialGrid {
public:
    int N;
    double r_max;
    int n;
    double h;
    double omega;  // surface area of the unit sphere in R^N
    std::vector<double> r;
    std::vector<double> w;

    static std::shared_ptr<const RadialGrid> make(int N, double r_max, int n);

    double integrate(std::span<const double> f) const;
    double ball_volume(double R) const { return omega * std::pow(R, N) / N; }

private:
    RadialGrid() = default;
};

using GridPtr = std::shared_ptr<const RadialGrid>;

struct RadialField {
    GridPtr grid;
    std::vector<double> v;

    int size() const { return static_cast<int>(v.size()); }
    double& operator[](int i) { return v[i]; }
    double operator[](int i) const { return v[i]; }
};

RadialField make_field(GridPtr grid, double fill = 0.0);
RadialField sample_field(GridPtr grid, const std::function<double(double)>& f);

// Second-order finite differences; with even_at_origin the derivative at r=0
// is pinned to 0 (radial even extension), otherwise one-sided.
RadialField derivative(const RadialField& u, bool even_at_origin = true);

double integrate(const RadialField& f);
double lp_norm(const RadialField& u, double m);
double mass(const RadialField& u);  // ||u||_2^2

// Rescale onto the mass sphere ||u||_2^2 = c^2.
RadialField project_mass(const RadialField& u, double c);

struct ResampledField {
    RadialField field;
    double mass_defect;  // relative mass lost to interpolation/truncation
};

// u_t(x) = t^{N/2} u(t x): mass-invariant dilation, resampled onto the grid.
ResampledField dilate(const RadialField& u, double t);

// x -> u(s^{-1/N} x): multiplies mass by s.
ResampledField mass_scale(const RadialField& u, double s);

// xi0 on r <= R, linear decay to 0 at R+1, 0 beyond. Requires R + 1 < r_max.
RadialField plateau_function(double xi0, double R, GridPtr grid);

// (r^{N/2} log r)^{-1} for r >= 3, 0 for r <= 2, cubic bridge with zero end
// slopes in between. Requires r_max > 3.
RadialField appendix_function(GridPtr grid);

RadialField gaussian_bump(GridPtr grid, double width, double c);

}  // namespace qnorm

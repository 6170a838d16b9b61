#pragma once

#include <string>
#include <utility>
#include <vector>

#include "krein/core.hpp"
#include "krein/krein_ode.hpp"

namespace krein::spectral {

// Wide real lambda grids are integrated with the Magnus scheme.
inline ode::Options wide_grid_options() { return {ode::Method::magnus4, 0.5}; }

// Density (2 pi |P*(r, lambda)|^2)^-1 on lambda_grid, no point masses.
SpectralMeasure bernstein_szego_density(const SampledFunction& A, double r, const Grid1D& lambda_grid,
                                        const ode::Options& opt = wide_grid_options());

// F = P^_* / P_* at (r, lambda), Im lambda > 0.
cplx weyl_titchmarsh(const SampledFunction& A, double r, cplx lambda, const ode::Options& opt = {});
// f = B / A_w at the end of the grid of A (exact for A supported there), Im lambda > 0.
cplx schur_function(const SampledFunction& A, cplx lambda, const ode::Options& opt = {});
// Boundary values on a real grid; A is taken to vanish past its grid.
SampledFunction weyl_titchmarsh_real(const SampledFunction& A, const Grid1D& lambda_grid,
                                     const ode::Options& opt = wide_grid_options());
SampledFunction schur_function_real(const SampledFunction& A, const Grid1D& lambda_grid,
                                    const ode::Options& opt = wide_grid_options());

// (1/pi) PV int g(s) / (x - s) ds over the grid of g, evaluated on the same grid.
SampledFunction hilbert_pv(const SampledFunction& g);

// Pi(lambda) = exp[(2 pi i)^-1 int (1 + s lambda) ln(2 pi sigma'(s)) / ((lambda - s)(1 + s^2)) ds],
// Im lambda > 0. ln(2 pi sigma') is taken as 0 off the density grid.
cplx szego_function(const SpectralMeasure& m, cplx lambda);
// Boundary values of Pi on the density grid. unit_at_infinity drops the constant phase
// exp(-i/2pi int ln(2 pi sigma') s/(1+s^2) ds), giving the branch with Pi -> 1 at infinity.
SampledFunction szego_function_real(const SpectralMeasure& m, bool unit_at_infinity = false);

// F from the measure: 1 + (pi i)^-1 int (2 pi dsigma - ds) / (s - lambda). Im lambda > 0.
cplx weyl_from_measure(const SpectralMeasure& m, cplx lambda);
// Boundary values 2 pi sigma' + i hilbert_pv[2 pi sigma' - 1] on the density grid; no point masses allowed.
SampledFunction weyl_from_measure_real(const SpectralMeasure& m);

// (2 y)^-1/2 exp[(y / 2 pi) int ln(2 pi sigma') / |s - lambda0|^2 ds], y = Im lambda0 > 0.
double szego_distance(const SpectralMeasure& m, cplx lambda0);
// K_rho(lambda0, lambda0)^-1/2, with K_rho = int_0^rho |P(x, lambda0)|^2 dx.
double kernel_minimum(const SampledFunction& A, double rho, cplx lambda0, const ode::Options& opt = {});

struct TracePair {
    double lhs = 0.0;
    double rhs = 0.0;
    double relative() const;
};

// int ln|A_w(lambda)| dlambda vs pi int |A|^2.
TracePair trace_log_wall(const SampledFunction& A, const Grid1D& lambda_grid,
                         const ode::Options& opt = wide_grid_options());
// -int ln(1 - |f|^2) dlambda vs 2 pi int |A|^2.
TracePair trace_schur(const SampledFunction& A, const Grid1D& lambda_grid,
                      const ode::Options& opt = wide_grid_options());
// int |gamma|^2 (from 1/Pi - 1 on the real line, Parseval) vs int |A|^2.
TracePair trace_gamma(const SampledFunction& A, const SpectralMeasure& m);

// gamma(x) = (2 pi)^-1 int (1/Pi - 1) e^{-i lambda x} dlambda on x_grid (any sign of x).
SampledFunction gamma_from_measure(const SpectralMeasure& m, const Grid1D& x_grid);

// rho_s^2(f) = -int ln(1 - |f|^2) dlambda. The optional correction adds the c / lambda^2
// tails past both ends of the grid.
double rho_s2(const SampledFunction& f, bool tail_correction = false);

struct LayerStrip {
    double total = 0.0;  // rho_s^2(f)
    double left = 0.0;   // rho_s^2(B(r) / A_w(r))
    double right = 0.0;  // rho_s^2(f_r), coefficient A(r + .)
    double residual() const { return std::abs(total - left - right); }
};
// All three terms use the tail correction.
LayerStrip layer_strip(const SampledFunction& A, double r, const Grid1D& lambda_grid,
                       const ode::Options& opt = wide_grid_options());

// Schur function of the mirrored coefficient A(R - r) on [0, R].
SampledFunction mirror(const SampledFunction& A);

// Strong Szego functionals.
double G_functional(const SampledFunction& A);                  // int r |A|^2
double T_functional(const SampledFunction& A, double r);        // exp(int_0^r s|A|^2 + r int_r^R |A|^2)
double det2_formula(const SampledFunction& A, double r);        // exp(-int_0^r (r - s)|A|^2)
double det2_nystrom(const SampledFunction& H, double r);        // eigenvalues of the discretized operator
double L_functional(const SampledFunction& l);                  // int_0^inf x |l|^2

// Box [-lambda_max, lambda_max] x [0, inf); y = u / (1 - u) with u on a uniform grid in [0, 1].
struct DirichletOptions {
    double lambda_max = 200.0;
    double lambda_step = 0.1;
    std::size_t u_intervals = 200;
};
struct DirichletResult {
    double value = 0.0;
    double tail = 0.0;  // largest integrand value on the edges lambda = +-lambda_max, relative to its maximum
};
// pi^-1 int_{C+} |Pi'/Pi|^2 with ln Pi = -int_0^inf l(x) e^{i lambda x} dx.
DirichletResult I_functional(const SampledFunction& l, const DirichletOptions& opt = {});

struct StrongSzegoReport {
    double G = 0.0;
    double L = 0.0;
    double I = 0.0;
    double I_tail = 0.0;
    bool has_l = false;
    std::vector<std::pair<double, double>> T;  // (r, T_r)
    double det2_r = 0.0;
    double det2 = 0.0;         // formula
    double det2_eigen = 0.0;   // Nystrom, when H is supplied
    bool has_H = false;
};

struct StrongSzegoInput {
    SampledFunction A;
    const SampledFunction* H = nullptr;
    const SampledFunction* l = nullptr;
    std::vector<double> T_radii;  // defaults to 1, 2, 4, ... up to the end of A
    double det2_r = 0.0;          // defaults to the end of A
};

StrongSzegoReport strong_szego(const StrongSzegoInput& in);
std::string format_report(const StrongSzegoReport& r);

}  // namespace krein::spectral

#pragma once

#include <string>
#include <utility>
#include <vector>

#include "krein/core.hpp"
#include "krein/krein_ode.hpp"

namespace krein::scatter {

// a(r) = 2 Re A(2r), b(r) = 2 Im A(2r); real values stored with zero imaginary part.
struct DiracPotential {
    SampledFunction a, b;
};

DiracPotential dirac_potential(const SampledFunction& A);
// A(2r) = (a(r) + i b(r)) / 2. If b sits on a different grid it is resampled onto a's grid
// and a message is left in *warning.
SampledFunction krein_from_dirac(const DiracPotential& d, std::string* warning = nullptr);

// phi = Re E, psi = Im E for real lambda, E(r, lambda) = exp(-i lambda r) P(2r, lambda);
// for complex lambda the analytic continuations e^{-i lambda r}(P +- P*)/2(i).
std::pair<cplx, cplx> dirac_eigenfunctions(const SampledFunction& A, double r, cplx lambda,
                                           const ode::Options& opt = {});

struct ScatteringData {
    SampledFunction A_scat, B_scat, reflection, jost;

    double energy_residual() const;  // max | |A|^2 - |B|^2 - 1 |
    // sigma_d' = 1 / (pi |jost|^2)
    SampledFunction dirac_density() const;
};

// Wall functions at the end of A's grid (A vanishes past it); jost = A_scat + B_scat = P*.
ScatteringData scattering_data_dirac(const SampledFunction& A, const Grid1D& lambda_grid,
                                     const ode::Options& opt = {ode::Method::magnus4, 0.5});
// Four CSVs <prefix>_{A,B,reflection,jost}.csv and <prefix>_manifest.json.
void write_scattering(const std::string& prefix, const ScatteringData& s);

struct SchrodingerReduction {
    SampledFunction a;       // Dirac coefficient 2 A(2r)
    SampledFunction q1, q2;  // a^2 - a', a^2 + a'
    double h = 0.0;          // mixed boundary constant f'(0) = h f(0), h = -2 A(0)
};
// a' by second-order differences (one-sided at the ends). Complex A is a domain error.
SchrodingerReduction schrodinger_reduce(const SampledFunction& A);

// rho_1(E) = 4 sigma(sqrt E), rho_2(E) = 4 int_0^sqrt(E) xi^2 dsigma, zero for E < 0.
// sigma is the odd distribution function; the density is integrated as piecewise linear.
std::pair<SampledFunction, SampledFunction> schrodinger_measures(const SpectralMeasure& m, const Grid1D& E_grid);

// K(x_i, y_j), j <= i, on x_i = i * step.
struct GLKernel {
    double step = 0.0;
    std::vector<std::vector<double>> K;

    double at(std::size_t i, std::size_t j) const { return K[i][j]; }
    std::size_t size() const { return K.size(); }
};

// K + F + int_0^x K(x, t) F(t, y) dt = 0 with F(x, y) = H(x + y) + H(x - y), H real and even.
// H must cover [0, 2 X]; trapezoid rule with n intervals on [0, X].
GLKernel gelfand_levitan(const SampledFunction& H, double X, std::size_t n);
std::string format_gl_kernel(const GLKernel& k);  // x,y,re

struct GLCheck {
    GLKernel kernel;
    double resolvent_residual = 0.0;  // max |K(x,y) + G_2x(x+y) + G_2x(x-y)|
    SampledFunction q_kernel;         // 2 d/dx K(x, x)
    SampledFunction q_riccati;        // q1 from schrodinger_reduce, on the same grid
    double q_residual = 0.0;          // sup over interior nodes
};
GLCheck gelfand_levitan_check(const SampledFunction& H, const SampledFunction& A, double X, std::size_t n);

// g = B / conj(A_w) on lambda_grid.
SampledFunction hankel_symbol(const SampledFunction& A, const Grid1D& lambda_grid,
                              const ode::Options& opt = {ode::Method::magnus4, 0.5});

struct SymbolTransform {
    SampledFunction D;
    cplx jump0 = 0.0, jumpR = 0.0;  // fitted jumps of D at 0 and at the support end
    double tail = 0.0;
};
// D(x) = (2 pi)^-1 int g e^{-i lambda x} dlambda on x_grid (left limit at x = R). The 1/lambda tails from
// jumps of D at 0 and R are fitted on |lambda| > lambda_max / 2 and inverted exactly.
SymbolTransform symbol_to_D(const SampledFunction& g, double R, const Grid1D& x_grid);

// Largest singular value of the trapezoid-weighted Hankel matrix D(x_i + x_j) on [0, end of D].
double hankel_norm(const SampledFunction& D);

// A(r) = L21(r/2, r/2) with (I + [[0, D*], [D, 0]])(I + L) = I on L^2[r/2, inf)^2.
// Output grid r_k = k * step of D, up to the end of D. Hankel norm >= 1 is a domain error.
SampledFunction hankel_inverse_scattering(const SampledFunction& D);

// |P*(2R, lambda)| from the ODE against |exp(-int_0^R (a + ib) e^{2 i lambda s} ds) det_2(I + G Q)|
// with a midpoint Nystrom discretization of n cells; R is half the end of A's grid.
struct Det2Identity {
    double ode_modulus = 0.0;
    double det_modulus = 0.0;
    double relative() const { return std::abs(ode_modulus - det_modulus) / ode_modulus; }
};
Det2Identity det2_identity(const SampledFunction& A, cplx lambda, std::size_t n);

}  // namespace krein::scatter

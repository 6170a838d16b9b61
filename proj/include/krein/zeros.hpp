#pragma once

#include <string>
#include <vector>

#include "krein/core.hpp"
#include "krein/krein_ode.hpp"

namespace krein::zeros {

struct Rect {
    double x0, x1, y0, y1;
};

struct Zero {
    cplx lambda;
    double residual;  // |P(r, lambda)|
};

struct ZeroSet {
    std::vector<Zero> zeros;  // sorted by |lambda|
    Rect region{};
    bool multiplicity_checked = false;  // every zero found simple
};

// CSV k,re,im,residual.
std::string format_zeros(const ZeroSet& z);

cplx eval_P(const SampledFunction& A, double r, cplx lambda, const ode::Options& opt = {});

// Winding number of P(r, .) around the rectangle (bottom edge lifted to Im >= 1e-3).
int count_zeros(const SampledFunction& A, double r, Rect rect, const ode::Options& opt = {});

// Newton refinement seeded by recursive subdivision of count_zeros.
ZeroSet find_zeros(const SampledFunction& A, double r, Rect rect, const ode::Options& opt = {});

// Newton from a seed; throws numeric after 50 steps.
cplx newton_zero(const SampledFunction& A, double r, cplx seed, const ode::Options& opt = {});

// lambda_n^0 = x_n + i y_n with x_n = (pi/2 + pi n + phi) / r, x^2 + y^2 = |g|^2 e^{2 r y},
// g = conj A(r) = |g| e^{i phi}.
cplx zero_asymptote(const SampledFunction& A, double r, long n);
// Index n whose asymptote is nearest to lambda.
long asymptote_index(const SampledFunction& A, double r, cplx lambda);

struct FejerCheck {
    double poisson = 0.0;  // int 2y dsigma / ((s - x)^2 + y^2)
    double bound = 0.0;    // M_r^-2 with M_r <= exp int_0^r |A|
    bool inside = false;   // poisson < bound: no zero at lambda
};
// The density is continued past its grid by its end values.
FejerCheck fejer_exclusion(const SpectralMeasure& m, const SampledFunction& A, double r, cplx lambda);

// Distance from lambda to supp(sigma) (density > 0 on the grid, continued by end values, plus masses).
double support_distance(const SpectralMeasure& m, cplx lambda);
// True when lambda lies in |lambda - conj z1| < Dist(lambda, supp sigma).
bool fejer2_excluded(const SpectralMeasure& m, cplx z1, cplx lambda);

}  // namespace krein::zeros

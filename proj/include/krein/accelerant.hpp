#pragma once

#include <vector>

#include "krein/core.hpp"
#include "krein/krein_ode.hpp"

namespace krein::accel {

// Loss of positivity of a truncated Toeplitz matrix; radius = level * step.
class PositivityError : public Error {
public:
    PositivityError(std::size_t level, double radius)
        : Error(ErrorKind::numeric, "Toeplitz matrix loses positive definiteness at level " +
                                        std::to_string(level) + " (blow-up radius r = " + fmt_double(radius) + ")"),
          level_(level),
          radius_(radius) {}
    std::size_t level() const { return level_; }
    double radius() const { return radius_; }

private:
    std::size_t level_;
    double radius_;
};

// Hermitian Toeplitz matrix T(k, m) = t[k - m] for k >= m, conj(t[m - k]) otherwise.
struct HermitianToeplitz {
    std::vector<cplx> t;
    std::size_t size() const { return t.size(); }
    cplx operator()(std::size_t k, std::size_t m) const { return k >= m ? t[k - m] : std::conj(t[m - k]); }
};

// Solves T_j x = y[0..j] for every leading block and returns the last entry x_j of each
// solution. Throws PositivityError(level, level * step) on loss of positivity.
std::vector<cplx> levinson_last_entries(const HermitianToeplitz& T, const std::vector<cplx>& y, double step);
// Same quantity from an independent dense Cholesky solve of every block; O(n^4).
std::vector<cplx> dense_last_entries(const HermitianToeplitz& T, const std::vector<cplx>& y, double step);

enum class Solver { levinson, dense };

struct HToAOptions {
    Solver solver = Solver::levinson;
    // The plain rectangle rule puts 1 + h H(0) on the diagonal; unit_diagonal keeps 1 there.
    bool unit_diagonal = false;
};

// Coefficient A on the grid of H, from the discretized resolvent equation at every level.
SampledFunction h_to_a(const SampledFunction& H, const HToAOptions& opt = {});
// As above after resampling H to the requested step.
SampledFunction h_to_a(const SampledFunction& H, double step, const HToAOptions& opt = {});

// Exact inverse of h_to_a with default options: recovers the H samples from A.
SampledFunction a_to_h_discrete(const SampledFunction& A);

struct AToHOptions {
    double lambda_max = 200.0;
    double lambda_step = 0.0;     // 0 picks a step that keeps aliasing far from [0, R]
    double tail_tolerance = 5e-3; // on |g - Born term| at the ends of the lambda grid
    ode::Options ode = {ode::Method::magnus4, 0.5};
};

struct AToHResult {
    SampledFunction H;
    double tail = 0.0;
    bool truncated = false;
};

// Accelerant from the Fourier representation of the truncated system; see README.
AToHResult a_to_h_detailed(const SampledFunction& A, const AToHOptions& opt = {});
SampledFunction a_to_h(const SampledFunction& A, const AToHOptions& opt = {});

// H + Hd + 2 int_0^x H(x - s) Hd(s) ds = 0.
SampledFunction dual_accelerant(const SampledFunction& H);

// H + conj C + int_0^x conj C(x - u) H(u) du = 0, solved for C.
SampledFunction c_transfer(const SampledFunction& H);
// The same equation solved for H.
SampledFunction c_transfer_inverse(const SampledFunction& C);

// conj H = sum_k l^{*k} / k! plus the point-mass sum, returned on x_grid (x >= 0).
// l lives on a grid symmetric about 0 and vanishes at its ends.
SampledFunction accelerant_from_logdensity(const SampledFunction& l, const std::vector<PointMass>& masses,
                                           const Grid1D& x_grid);

// Linear resampling onto [start, end] of f with the given step.
SampledFunction resample(const SampledFunction& f, double step);

}  // namespace krein::accel

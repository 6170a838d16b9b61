#pragma once

#include <Eigen/Dense>
#include <vector>

#include "krein/core.hpp"

namespace krein::ode {

using Mat2 = Eigen::Matrix2cd;

enum class Method {
    rk4,      // classical fourth order, linear interpolation of A at half steps
    magnus4,  // two-point Gauss exponential integrator, exact for A = 0
    product,  // midpoint exponential product, the low-order reference
};

struct Options {
    Method method = Method::rk4;
    double phase_step = 0.5;  // cap on |lambda| * step
    double det_tol = 1e-8;
    double j_tol = 1e-7;
    std::size_t max_steps = 20'000'000;
};

Mat2 J();

struct TransferMatrix {
    Mat2 X = Mat2::Identity();
    double r = 0.0;
    cplx lambda = 0.0;

    cplx det() const { return X.determinant(); }
    double det_residual() const;
    // ||X^* J X - J||_F
    double j_residual() const;
};

struct PolyPair {
    cplx P, P_star, P_hat, P_hat_star;
};

struct WallFunctions {
    cplx A_w, B_w, A_w_star, B_w_star;
};

PolyPair polys(const Mat2& X);
WallFunctions wall(const Mat2& X);

// X(r, lambda) with X(0) = I. A is sampled on [0, R]; beyond R it is taken to vanish.
TransferMatrix propagate(const SampledFunction& A, double r, cplx lambda, const Options& opt = {});
// Transfer matrix from r1 to r2, X(r1, r2) with X(r1, r1) = I.
TransferMatrix propagate_between(const SampledFunction& A, double r1, double r2, cplx lambda,
                                 const Options& opt = {});
// X at every node of A's grid.
std::vector<Mat2> propagate_path(const SampledFunction& A, cplx lambda, const Options& opt = {});

PolyPair eval_polys(const SampledFunction& A, double r, cplx lambda, const Options& opt = {});
WallFunctions wall(const SampledFunction& A, double r, cplx lambda, const Options& opt = {});

struct WithDerivative {
    TransferMatrix X;
    Mat2 dX;  // d/dlambda
};

WithDerivative propagate_dlambda(const SampledFunction& A, double r, cplx lambda,
                                 const Options& opt = {});

// K_r(lambda', lambda); the confluent limit is used when lambda = conj(lambda').
cplx reproducing_kernel(const SampledFunction& A, double r, cplx lambda_p, cplx lambda,
                        const Options& opt = {});
// int_0^r conj(P(x, lambda')) P(x, lambda) dx, integrated alongside the system.
cplx reproducing_kernel_quadrature(const SampledFunction& A, double r, cplx lambda_p, cplx lambda,
                                   const Options& opt = {});

// f = (A* f_R + B) / (B* f_R + A) with the Wall functions at the end of A's grid.
cplx schur_evolve_backward(const SampledFunction& A, cplx f_R, cplx lambda, const Options& opt = {});

// Raises a numeric error when the determinant or J-unitarity checks fail.
void check_invariants(const TransferMatrix& t, const Options& opt = {});

}  // namespace krein::ode

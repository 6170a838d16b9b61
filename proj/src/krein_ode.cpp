#include "krein/krein_ode.hpp"

#include <cmath>

#include "integrate.hpp"

namespace krein::ode {

using detail::potential;

Mat2 J() {
    Mat2 j;
    j << 1.0, 0.0, 0.0, -1.0;
    return j;
}

double TransferMatrix::det_residual() const { return std::abs(det() - std::exp(I * lambda * r)); }

double TransferMatrix::j_residual() const { return (X.adjoint() * J() * X - J()).norm(); }

PolyPair polys(const Mat2& X) {
    return {X(0, 0) + X(0, 1), X(1, 0) + X(1, 1), X(0, 0) - X(0, 1), X(1, 1) - X(1, 0)};
}

WallFunctions wall(const Mat2& X) { return {X(1, 1), X(1, 0), X(0, 0), X(0, 1)}; }

namespace {

void check_range(const SampledFunction& A, double r) {
    if (A.grid().start != 0.0) fail(ErrorKind::domain, "coefficient grid must start at 0");
    if (!(r >= 0.0) || !std::isfinite(r)) fail(ErrorKind::domain, "r must be finite and nonnegative");
}

Mat2 free_factor(cplx lambda, double len) {
    Mat2 F = Mat2::Identity();
    F(0, 0) = std::exp(I * lambda * len);
    return F;
}

}  // namespace

TransferMatrix propagate_between(const SampledFunction& A, double r1, double r2, cplx lambda,
                                 const Options& opt) {
    check_range(A, r1);
    check_range(A, r2);
    if (r2 < r1) fail(ErrorKind::domain, "propagate_between needs r1 <= r2");
    const double R = A.grid().end();
    Mat2 X = Mat2::Identity();
    const double b = std::min(r2, R);
    if (b > r1) X = detail::advance(A, r1, b, lambda, opt, X, [](double, const Mat2&) {});
    const double free_from = std::max(r1, R);
    if (r2 > free_from) X = free_factor(lambda, r2 - free_from) * X;
    return {X, r2 - r1, lambda};
}

TransferMatrix propagate(const SampledFunction& A, double r, cplx lambda, const Options& opt) {
    auto t = propagate_between(A, 0.0, r, lambda, opt);
    t.r = r;
    return t;
}

std::vector<Mat2> propagate_path(const SampledFunction& A, cplx lambda, const Options& opt) {
    check_range(A, 0.0);
    std::vector<Mat2> out;
    out.reserve(A.size());
    out.push_back(Mat2::Identity());
    detail::advance(A, 0.0, A.grid().end(), lambda, opt, Mat2::Identity(),
                    [&](double, const Mat2& X) { out.push_back(X); });
    return out;
}

PolyPair eval_polys(const SampledFunction& A, double r, cplx lambda, const Options& opt) {
    return polys(propagate(A, r, lambda, opt).X);
}

WallFunctions wall(const SampledFunction& A, double r, cplx lambda, const Options& opt) {
    return wall(propagate(A, r, lambda, opt).X);
}

WithDerivative propagate_dlambda(const SampledFunction& A, double r, cplx lambda, const Options& opt) {
    check_range(A, r);
    using State = Eigen::Matrix<cplx, 2, 4>;
    State y = State::Zero();
    y.leftCols<2>() = Mat2::Identity();
    const double R = A.grid().end();
    const double b = std::min(r, R);
    Mat2 Vl = Mat2::Zero();
    Vl(0, 0) = I;
    y = detail::rk4(A, 0.0, b, detail::max_step(A, std::abs(lambda), opt), opt, y,
                    [&](double t, const State& s) {
                        const Mat2 V = potential(A.at(t), lambda);
                        State d;
                        d.leftCols<2>() = V * s.leftCols<2>();
                        d.rightCols<2>() = V * s.rightCols<2>() + Vl * s.leftCols<2>();
                        return d;
                    });
    Mat2 X = y.leftCols<2>();
    Mat2 D = y.rightCols<2>();
    if (r > R) {
        // first row picks up exp(i lambda (r - R)) past the end of the data
        const double len = r - R;
        const cplx e = std::exp(I * lambda * len);
        D.row(0) = e * D.row(0) + I * len * e * X.row(0);
        X.row(0) *= e;
    }
    return {{X, r, lambda}, D};
}

cplx reproducing_kernel(const SampledFunction& A, double r, cplx lambda_p, cplx lambda,
                        const Options& opt) {
    const cplx gap = lambda - std::conj(lambda_p);
    const auto q = eval_polys(A, r, lambda_p, opt);
    if (std::abs(gap) > 1e-8 * (1.0 + std::abs(lambda))) {
        const auto p = eval_polys(A, r, lambda, opt);
        return I * (p.P_star * std::conj(q.P_star) - p.P * std::conj(q.P)) / gap;
    }
    // confluent limit: differentiate the numerator in lambda
    const auto d = propagate_dlambda(A, r, lambda, opt);
    const auto dp = polys(d.dX);
    return I * (dp.P_star * std::conj(q.P_star) - dp.P * std::conj(q.P));
}

cplx reproducing_kernel_quadrature(const SampledFunction& A, double r, cplx lambda_p, cplx lambda,
                                   const Options& opt) {
    check_range(A, r);
    using State = Eigen::Matrix<cplx, 2, 5>;
    State y = State::Zero();
    y.block<2, 2>(0, 0) = Mat2::Identity();
    y.block<2, 2>(0, 2) = Mat2::Identity();
    const double R = A.grid().end();
    const double b = std::min(r, R);
    const double lam = std::max(std::abs(lambda), std::abs(lambda_p));
    y = detail::rk4(A, 0.0, b, detail::max_step(A, lam, opt), opt, y, [&](double t, const State& s) {
        const cplx a = A.at(t);
        State d = State::Zero();
        d.block<2, 2>(0, 0) = potential(a, lambda) * s.block<2, 2>(0, 0);
        d.block<2, 2>(0, 2) = potential(a, lambda_p) * s.block<2, 2>(0, 2);
        const cplx P1 = s(0, 0) + s(0, 1);
        const cplx P2 = s(0, 2) + s(0, 3);
        d(0, 4) = std::conj(P2) * P1;
        return d;
    });
    cplx k = y(0, 4);
    if (r > R) {
        // past the data P(x) = exp(i lambda (x - R)) P(R)
        const cplx P1 = y(0, 0) + y(0, 1);
        const cplx P2 = y(0, 2) + y(0, 3);
        const cplx mu = lambda - std::conj(lambda_p);
        const double len = r - R;
        const cplx z = I * mu * len;
        const cplx integral = std::abs(z) < 1e-8 ? cplx(len) * (1.0 + 0.5 * z) : (std::exp(z) - 1.0) / (I * mu);
        k += std::conj(P2) * P1 * integral;
    }
    return k;
}

cplx schur_evolve_backward(const SampledFunction& A, cplx f_R, cplx lambda, const Options& opt) {
    if (std::abs(f_R) > 1.0 + 1e-14) fail(ErrorKind::domain, "|f_R| must not exceed 1");
    if (lambda.imag() < 0.0) fail(ErrorKind::domain, "lambda must lie in the closed upper half-plane");
    const auto w = wall(A, A.grid().end(), lambda, opt);
    return (w.A_w_star * f_R + w.B_w) / (w.B_w_star * f_R + w.A_w);
}

void check_invariants(const TransferMatrix& t, const Options& opt) {
    const double scale = std::max(1.0, std::abs(std::exp(I * t.lambda * t.r)));
    if (t.det_residual() > opt.det_tol * scale)
        fail(ErrorKind::numeric, "det X(r, lambda) differs from exp(i lambda r) by " +
                                     fmt_double(t.det_residual()) + "; refine the step");
    if (t.lambda.imag() == 0.0 && t.j_residual() > opt.j_tol)
        fail(ErrorKind::numeric, "X is not J-unitary on the real line (residual " +
                                     fmt_double(t.j_residual()) + "); refine the step");
}

}  // namespace krein::ode

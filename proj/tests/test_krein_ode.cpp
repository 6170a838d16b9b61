#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "krein/krein_ode.hpp"

using namespace krein;
using namespace krein::ode;

namespace {

SampledFunction constant(cplx c, double R, double h) {
    const auto n = static_cast<std::size_t>(std::llround(R / h));
    return {Grid1D::span(0.0, R, n), [c](double) { return c; }};
}

SampledFunction bumpy(double R, double h) {
    const auto n = static_cast<std::size_t>(std::llround(R / h));
    return {Grid1D::span(0.0, R, n),
            [](double x) { return cplx(0.8 * std::cos(2.0 * x), 0.5 * std::exp(-x)); }};
}

double max_entry_diff(const Mat2& a, const Mat2& b) { return (a - b).cwiseAbs().maxCoeff(); }

}  // namespace

TEST_CASE("free case") {
    auto A = constant(0.0, 2.0, 1e-3);
    for (cplx lam : {cplx(0.0), cplx(1.0), cplx(0.3, 2.0), cplx(-4.0, 0.5)}) {
        const auto t = propagate(A, 1.7, lam);
        Mat2 ex = Mat2::Identity();
        ex(0, 0) = std::exp(I * lam * 1.7);
        CHECK(max_entry_diff(t.X, ex) < 1e-10);
        const auto p = polys(t.X);
        CHECK(std::abs(p.P - std::exp(I * lam * 1.7)) < 1e-10);
        CHECK(std::abs(p.P_star - 1.0) < 1e-12);
        const auto w = wall(t.X);
        CHECK(std::abs(w.A_w - 1.0) < 1e-12);
        CHECK(std::abs(w.B_w) < 1e-12);
    }
}

TEST_CASE("exact hyperbolic solution at lambda = 0") {
    auto A = constant(1.0, 1.0, 1e-3);
    const auto t = propagate(A, 1.0, 0.0);
    Mat2 ex;
    ex << std::cosh(1.0), -std::sinh(1.0), -std::sinh(1.0), std::cosh(1.0);
    CHECK(max_entry_diff(t.X, ex) < 1e-8);
    for (auto m : {Method::magnus4, Method::product}) {
        Options o;
        o.method = m;
        CHECK(max_entry_diff(propagate(A, 1.0, 0.0, o).X, ex) < 1e-8);
    }
}

TEST_CASE("determinant at lambda = 2") {
    auto A = constant(1.0, 1.0, 1e-3);
    CHECK(propagate(A, 1.0, 2.0).det_residual() < 1e-9);
}

TEST_CASE("gronwall bounds for P*") {
    auto A = constant(1.0, 1.0, 1e-3);
    for (double l = -20.0; l <= 20.0; l += 0.5) {
        const double m = std::abs(eval_polys(A, 1.0, l).P_star);
        CHECK(m >= std::exp(-1.0) - 1e-12);
        CHECK(m <= std::exp(1.0) + 1e-12);
    }
}

TEST_CASE("wall energy identity") {
    auto A = constant(1.0, 1.0, 1e-3);
    const cplx lam(1.0, 0.5);
    const auto w = wall(A, 1.0, lam);
    CHECK(std::abs(w.A_w * w.A_w_star - w.B_w * w.B_w_star - std::exp(I * lam)) < 1e-8);
}

TEST_CASE("polynomial identities") {
    auto A = bumpy(2.0, 1e-3);
    for (cplx lam : {cplx(0.7), cplx(-3.0), cplx(1.0, 1.0), cplx(-2.0, 0.3)}) {
        const auto p = eval_polys(A, 1.5, lam);
        CHECK(std::abs(p.P * p.P_hat_star + p.P_star * p.P_hat - 2.0 * std::exp(I * lam * 1.5)) < 1e-9);
        if (lam.imag() == 0.0) {
            CHECK(std::abs(std::abs(p.P) - std::abs(p.P_star)) < 1e-9);
            const auto w = wall(A, 1.5, lam);
            CHECK(std::abs(std::norm(w.A_w) - std::norm(w.B_w) - 1.0) < 1e-9);
            CHECK(std::abs(std::abs(w.A_w) - std::abs(w.A_w_star)) < 1e-9);
            CHECK(std::abs(std::abs(w.B_w) - std::abs(w.B_w_star)) < 1e-9);
        } else {
            const auto w = wall(A, 1.5, lam);
            CHECK(std::norm(w.A_w) - std::norm(w.B_w) >= 1.0 - 1e-12);
        }
    }
}

TEST_CASE("determinant and J-unitarity budget") {
    auto A = bumpy(2.0, 1e-3);
    for (double r : {0.5, 1.0, 2.0})
        for (double re = -10.0; re <= 10.0; re += 2.5)
            for (double im : {0.0, 1.0, 5.0}) {
                const cplx lam(re, im);
                if (std::abs(lam) > 10.0) continue;
                const auto t = propagate(A, r, lam);
                CHECK(t.det_residual() < 1e-8 * std::max(1.0, std::abs(std::exp(I * lam * r))));
                if (im == 0.0) CHECK(t.j_residual() < 1e-7);
            }
}

TEST_CASE("exponential type bounds") {
    // P itself stays bounded going up; P e^{-i lambda r} stays bounded going down
    auto A = bumpy(1.0, 1e-3);
    const double bound = std::exp(1.0);  // exp of the L1 norm of A is below e
    for (double y : {10.0, 100.0}) {
        CHECK(std::abs(eval_polys(A, 1.0, cplx(0.0, y)).P) < bound);
        const cplx down(0.0, -y);
        CHECK(std::abs(eval_polys(A, 1.0, down).P * std::exp(-I * down)) < bound);
    }
}

TEST_CASE("sign change gives JXJ") {
    auto A = bumpy(1.5, 1e-3);
    auto minusA = A.map([](double, cplx v) { return -v; });
    for (cplx lam : {cplx(0.4), cplx(2.0, 1.0)}) {
        const Mat2 X = propagate(A, 1.5, lam).X;
        const Mat2 Y = propagate(minusA, 1.5, lam).X;
        CHECK(max_entry_diff(Y, J() * X * J()) < 1e-10);
    }
}

TEST_CASE("semigroup") {
    auto A = bumpy(2.0, 1e-3);
    const cplx lam(1.3, 0.2);
    const Mat2 X1 = propagate(A, 0.8, lam).X;
    const Mat2 X12 = propagate_between(A, 0.8, 2.0, lam).X;
    const Mat2 X2 = propagate(A, 2.0, lam).X;
    CHECK(max_entry_diff(X2, X12 * X1) < 1e-8);
}

TEST_CASE("P* has no zeros in the closed upper half-plane") {
    auto A = constant(1.0, 1.0, 1e-3);
    double m = 1e300;
    for (double x = -15.0; x <= 15.0; x += 1.0)
        for (double y = 0.0; y <= 6.0; y += 1.0) m = std::min(m, std::abs(eval_polys(A, 1.0, cplx(x, y)).P_star));
    CHECK(m > 0.1);
}

TEST_CASE("path agrees with pointwise propagation") {
    auto A = bumpy(1.0, 1e-2);
    const auto path = propagate_path(A, cplx(2.0, 0.5));
    REQUIRE(path.size() == A.size());
    CHECK(max_entry_diff(path[37], propagate(A, A.x(37), cplx(2.0, 0.5)).X) < 1e-13);
}

TEST_CASE("integrators agree") {
    auto A = bumpy(2.0, 1e-3);
    Options m4;
    m4.method = Method::magnus4;
    for (cplx lam : {cplx(0.0), cplx(3.0), cplx(-1.0, 2.0)}) {
        CHECK(max_entry_diff(propagate(A, 2.0, lam).X, propagate(A, 2.0, lam, m4).X) < 1e-9);
    }
    // the midpoint product converges at second order
    auto err = [&](double h) {
        Options pr;
        pr.method = Method::product;
        auto B = bumpy(2.0, h);
        return max_entry_diff(propagate(B, 2.0, 1.0, pr).X, propagate(B, 2.0, 1.0, m4).X);
    };
    const double e1 = err(1e-2), e2 = err(5e-3);
    CHECK(e1 / e2 > 3.5);
    CHECK(e1 / e2 < 4.5);
}

TEST_CASE("lambda derivative") {
    auto Z = constant(0.0, 1.0, 1e-3);
    const cplx lam(0.7, 0.2);
    const auto d = propagate_dlambda(Z, 1.3, lam);
    CHECK(std::abs(d.dX(0, 0) - I * 1.3 * std::exp(I * lam * 1.3)) < 1e-12);
    CHECK(d.dX.cwiseAbs().sum() - std::abs(d.dX(0, 0)) < 1e-12);

    auto A = bumpy(1.0, 1e-3);
    const double eps = 1e-5;
    for (cplx l0 : {cplx(0.5), cplx(2.0, 1.0)}) {
        const auto dd = propagate_dlambda(A, 1.0, l0);
        const cplx fd = (eval_polys(A, 1.0, l0 + eps).P_star - eval_polys(A, 1.0, l0 - eps).P_star) / (2.0 * eps);
        CHECK(std::abs(polys(dd.dX).P_star - fd) < 1e-6);
    }

    auto C = constant(1.0, 1.0, 1e-3);
    const auto dc = propagate_dlambda(C, 1.0, 0.0);
    const Mat2 fdm = (propagate(C, 1.0, eps).X - propagate(C, 1.0, -eps).X) / (2.0 * eps);
    CHECK(max_entry_diff(dc.dX, fdm) < 1e-6);
}

TEST_CASE("reproducing kernel") {
    auto Z = constant(0.0, 1.0, 1e-3);
    const cplx lp(0.5, 1.0), l(1.0, 2.0);
    const cplx mu = l - std::conj(lp);
    const cplx free_val = (std::exp(I * mu) - 1.0) / (I * mu);
    CHECK(std::abs(reproducing_kernel(Z, 1.0, lp, l) - free_val) < 1e-12);

    auto A = constant(1.0, 1.0, 1e-3);
    const cplx cd = reproducing_kernel(A, 1.0, 2.0 * I, I);
    const cplx q = reproducing_kernel_quadrature(A, 1.0, 2.0 * I, I);
    CHECK(std::abs(cd - q) < 1e-7);
    const cplx diag = reproducing_kernel_quadrature(A, 1.0, cplx(0.3, 0.4), cplx(0.3, 0.4));
    CHECK(diag.real() > 0.0);
    CHECK(std::abs(diag.imag()) < 1e-12);
    // past the end of the data the quadrature keeps integrating the free tail
    CHECK(std::abs(reproducing_kernel(A, 3.0, 2.0 * I, I) - reproducing_kernel_quadrature(A, 3.0, 2.0 * I, I)) < 1e-7);
    CHECK(std::abs(reproducing_kernel(A, 1.0, 1.0, 1.0) - reproducing_kernel_quadrature(A, 1.0, 1.0, 1.0)) < 1e-7);
}

TEST_CASE("backward schur evolution") {
    auto Z = constant(0.0, 1.5, 1e-3);
    const cplx lam(0.7, 0.3), fR(0.2, -0.4);
    CHECK(std::abs(schur_evolve_backward(Z, fR, lam) - std::exp(I * lam * 1.5) * fR) < 1e-12);

    auto A = constant(1.0, 1.0, 1e-3);
    const auto w = wall(A, 1.0, lam);
    CHECK(std::abs(schur_evolve_backward(A, 0.0, lam) - w.B_w / w.A_w) < 1e-14);
    CHECK_THROWS_AS(schur_evolve_backward(A, 1.5, lam), Error);

    std::mt19937 rng(3);
    std::uniform_real_distribution<double> u(-0.7, 0.7);
    auto rho = [](cplx a, cplx b) { return std::abs((a - b) / (1.0 - std::conj(a) * b)); };
    for (int k = 0; k < 10; ++k) {
        const cplx z1(u(rng), u(rng)), z2(u(rng), u(rng));
        const cplx f1 = schur_evolve_backward(A, z1, lam), f2 = schur_evolve_backward(A, z2, lam);
        CHECK(std::abs(f1) <= 1.0);
        CHECK(rho(f1, f2) <= rho(z1, z2) + 1e-12);
        const cplx g1 = schur_evolve_backward(A, z1, 0.8), g2 = schur_evolve_backward(A, z2, 0.8);
        CHECK(rho(g1, g2) == doctest::Approx(rho(z1, z2)).epsilon(1e-7));
    }
}

TEST_CASE("invariant checker flags a coarse step") {
    auto A = bumpy(1.0, 0.1);
    Options o;
    o.phase_step = 2.0;
    const auto t = propagate(A, 1.0, 40.0, o);
    CHECK_THROWS_AS(check_invariants(t), Error);
    CHECK_NOTHROW(check_invariants(propagate(bumpy(1.0, 1e-3), 1.0, 2.0)));
}

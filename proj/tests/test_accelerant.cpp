#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "krein/accelerant.hpp"

using namespace krein;
using namespace krein::accel;

namespace {

SampledFunction constant(double R, std::size_t n, cplx c) {
    return {Grid1D::span(0.0, R, n), [c](double) { return c; }};
}

double err_vs(const SampledFunction& A, double from, const std::function<cplx(double)>& exact) {
    double e = 0.0;
    for (std::size_t i = 0; i < A.size(); ++i)
        if (A.x(i) >= from - 1e-12) e = std::max(e, std::abs(A[i] - exact(A.x(i))));
    return e;
}

SampledFunction random_small(double R, std::size_t n, unsigned seed) {
    // smooth random trigonometric sum, sup norm well below 1
    std::mt19937 rng(seed);
    std::uniform_real_distribution<double> u(-0.1, 0.1);
    std::vector<cplx> c(6);
    for (auto& z : c) z = {u(rng), u(rng)};
    return {Grid1D::span(0.0, R, n), [c](double x) {
                cplx s = 0.0;
                for (std::size_t k = 0; k < c.size(); ++k) s += c[k] * std::exp(I * (double)k * x);
                return s;
            }};
}

}  // namespace

TEST_CASE("zero accelerant gives zero coefficient") {
    auto A = h_to_a(constant(2.0, 200, 0.0));
    CHECK(A.sup_norm() == 0.0);
    CHECK(a_to_h_discrete(A).sup_norm() == 0.0);
}

TEST_CASE("constant accelerant 1/2 gives 1/(2+r)") {
    auto exact = [](double r) { return cplx(1.0 / (2.0 + r)); };
    const double e1 = err_vs(h_to_a(constant(4.0, 4000, 0.5)), 0.2, exact);
    const double e2 = err_vs(h_to_a(constant(4.0, 8000, 0.5)), 0.2, exact);
    MESSAGE("errors " << e1 << " " << e2 << " rate " << std::log2(e1 / e2));
    CHECK(e1 < 2e-3);
    CHECK(e2 < e1);
    // kappa / 2 for other kappa
    const double k = 3.0;
    CHECK(err_vs(h_to_a(constant(2.0, 4000, k / 2)), 0.2, [k](double r) { return cplx(k / (2.0 + k * r)); }) < 5e-3);
}

TEST_CASE("unit-diagonal scheme is exact for constants") {
    HToAOptions opt;
    opt.unit_diagonal = true;
    auto A = h_to_a(constant(4.0, 400, 0.5), opt);
    CHECK(err_vs(A, 0.0, [](double r) { return cplx(1.0 / (2.0 + r)); }) < 1e-12);
}

TEST_CASE("levinson agrees with dense solves") {
    auto H = random_small(1.0, 60, 3);
    HToAOptions d;
    d.solver = Solver::dense;
    CHECK(h_to_a(H).max_abs_diff(h_to_a(H, d)) < 1e-10);
}

TEST_CASE("grid refinement on a random accelerant") {
    auto H = random_small(2.0, 3200, 11);
    auto a1 = h_to_a(H, 2.0 / 400), a2 = h_to_a(H, 2.0 / 800), a3 = h_to_a(H, 2.0 / 1600);
    auto diff = [](const SampledFunction& c, const SampledFunction& f) {
        double e = 0.0;
        for (std::size_t i = 0; i < c.size(); ++i) e = std::max(e, std::abs(c[i] - f.at(c.x(i))));
        return e;
    };
    const double d1 = diff(a1, a2), d2 = diff(a2, a3);
    MESSAGE("successive differences " << d1 << " " << d2);
    CHECK(d2 < d1);
    CHECK(d2 < 1e-2);
}

TEST_CASE("discrete inverse undoes h_to_a") {
    auto H = random_small(2.0, 500, 5);
    CHECK(a_to_h_discrete(h_to_a(H)).max_abs_diff(H) < 1e-10);
    auto Hc = constant(4.0, 4000, 0.5);
    CHECK(a_to_h_discrete(h_to_a(Hc)).max_abs_diff(Hc) < 1e-10);
}

TEST_CASE("loss of positivity reports a radius") {
    // H = -2 makes 1 + h H0 fine for small h but the continuous operator fails near x = 1/2
    auto H = constant(2.0, 2000, -2.0);
    try {
        (void)h_to_a(H);
        FAIL("expected loss of positivity");
    } catch (const PositivityError& e) {
        CHECK(e.radius() > 0.0);
        CHECK(e.radius() < 2.0);
        CHECK(e.kind() == ErrorKind::numeric);
        HToAOptions d;
        d.solver = Solver::dense;
        try {
            (void)h_to_a(resample(H, 2.0 / 200), d);
        } catch (const PositivityError& e2) {
            CHECK(std::abs(e2.radius() - e.radius()) < 0.05);
        }
    }
}

TEST_CASE("dual accelerant") {
    CHECK(dual_accelerant(constant(1.0, 100, 0.0)).sup_norm() == 0.0);
    const double c = 0.7;
    auto D = dual_accelerant(constant(2.0, 2000, c));
    CHECK(err_vs(D, 0.0, [c](double x) { return cplx(-c * std::exp(-2.0 * c * x)); }) < 1e-5);
    auto H = random_small(2.0, 400, 9);
    CHECK(dual_accelerant(dual_accelerant(H)).max_abs_diff(H) < 1e-8);
}

TEST_CASE("c_transfer") {
    CHECK(c_transfer(constant(1.0, 100, 0.0)).sup_norm() == 0.0);
    auto H = constant(4.0, 4000, 0.5);
    auto C = c_transfer(H);
    auto A = h_to_a(H);
    CHECK(std::abs(C[0] + 0.5) < 1e-14);
    CHECK(std::abs(C[0] + A[0]) < 1e-14);
    auto Hr = random_small(3.0, 600, 21);
    CHECK(c_transfer_inverse(c_transfer(Hr)).max_abs_diff(Hr) < 1e-10);
    CHECK(c_transfer(c_transfer_inverse(Hr)).max_abs_diff(Hr) < 1e-10);
    CHECK(std::abs(c_transfer(Hr)[0] + h_to_a(Hr)[0]) < 1e-12);
}

TEST_CASE("accelerant from log-density") {
    auto lg = Grid1D::span(-1.0, 1.0, 200);
    SampledFunction zero(lg, [](double) { return cplx(0.0); });
    auto xg = Grid1D::span(0.0, 2.0, 100);
    CHECK(accelerant_from_logdensity(zero, {}, xg).sup_norm() == 0.0);
    auto H = accelerant_from_logdensity(zero, {{0.0, 0.5}}, xg);
    CHECK(err_vs(H, 0.0, [](double) { return cplx(0.5); }) < 1e-15);
    // small l: the series reduces to l + l*l/2 + ...; compare with direct exp of the symbol
    SampledFunction l(lg, [](double x) { return cplx(0.3 * std::exp(-10.0 * x * x) * (1 - x * x)); });
    auto Hl = accelerant_from_logdensity(l, {}, xg);
    // 1 + FT(conj H) = exp(FT l) at a few frequencies
    std::vector<cplx> full;
    for (std::size_t i = xg.count - 1; i > 0; --i) full.push_back(Hl[i]);
    for (std::size_t i = 0; i < xg.count; ++i) full.push_back(std::conj(Hl[i]));
    SampledFunction sym(Grid1D(-2.0, xg.step, full.size()), full);
    for (double lam : {0.0, 0.7, 2.5}) {
        const cplx lhs = 1.0 + fourier_integral(sym, lam);
        const cplx rhs = std::exp(fourier_integral(l, lam));
        CHECK(std::abs(lhs - rhs) < 1e-3);
    }
    SampledFunction big(lg, [](double x) { return cplx(400.0 * (1 - x * x)); });
    CHECK_THROWS_AS(accelerant_from_logdensity(big, {}, xg), Error);
}

TEST_CASE("covariance: shift, dilation, conjugation") {
    for (auto H : {constant(2.0, 800, 0.5), random_small(2.0, 800, 4)}) {
        const double t = 1.0;
        auto A = h_to_a(H);
        SampledFunction Hs(H.grid(), [&](double x) { return H.at(x) * std::exp(-I * t * x); });
        auto As = h_to_a(Hs);
        double es = 0.0;
        for (std::size_t i = 0; i < A.size(); ++i) es = std::max(es, std::abs(As[i] - A[i] * std::exp(I * A.x(i) * t)));
        CHECK(es < 1e-6);

        CHECK(h_to_a(H.conj()).max_abs_diff(A.conj()) < 1e-12);

        // gamma H(gamma x) at step h against A at step gamma h
        const double g = 2.0;
        SampledFunction Hd(Grid1D::span(0.0, 1.0, 400), [&](double x) { return g * H.at(g * x); });
        auto Ad = h_to_a(Hd);
        auto Ag = h_to_a(resample(H, g * Hd.grid().step));
        double ed = 0.0;
        for (std::size_t i = 0; i < Ad.size(); ++i) ed = std::max(ed, std::abs(Ad[i] - g * Ag.at(g * Ad.x(i))));
        CHECK(ed < 1e-6);
    }
}

TEST_CASE("locality by truncation") {
    auto H = random_small(2.0, 800, 8);
    auto A = h_to_a(H);
    auto At = h_to_a(H.head(301));
    for (std::size_t i = 0; i < At.size(); ++i) CHECK(At[i] == A[i]);
}

TEST_CASE("jump in H leaves A - conj H continuous") {
    SampledFunction H(Grid1D::span(0.0, 2.0, 2000), [](double x) { return cplx(x < 1.0 ? 0.3 : 0.05); });
    auto A = h_to_a(H);
    const std::size_t j = 1000;
    const double jumpA = std::abs(A[j + 1] - A[j - 1]);
    const double jumpD = std::abs((A[j + 1] - std::conj(H[j + 1])) - (A[j - 1] - std::conj(H[j - 1])));
    CHECK(jumpA > 0.2);
    CHECK(jumpD < 1e-2);
}

TEST_CASE("a_to_h: zero and the 1/(2+r) pair") {
    auto A0 = constant(1.0, 100, 0.0);
    CHECK(a_to_h(A0).sup_norm() < 1e-12);
    SampledFunction A(Grid1D::span(0.0, 4.0, 400), [](double r) { return cplx(1.0 / (2.0 + r)); });
    auto res = a_to_h_detailed(A);
    const double e = err_vs(res.H, 0.0, [](double) { return cplx(0.5); });
    MESSAGE("a_to_h error " << e << " tail " << res.tail);
    CHECK_FALSE(res.truncated);
    CHECK(e < 5e-3);
}

TEST_CASE("a_to_h round trip on a bump") {
    auto bump = [](double x) { return cplx(0.4 * std::exp(-4.0 * (x - 1.0) * (x - 1.0)), 0.1 * std::sin(x)); };
    double prev = 1e9;
    for (std::size_t n : {100, 200}) {
        SampledFunction H(Grid1D::span(0.0, 2.0, n), bump);
        auto back = a_to_h(h_to_a(H));
        const double e = err_vs(back, 0.0, bump);
        MESSAGE("n=" << n << " round trip error " << e);
        CHECK(e < prev);
        prev = e;
    }
}

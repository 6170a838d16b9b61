#include "acceptance.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <random>

#include "krein/accelerant.hpp"
#include "krein/krein_ode.hpp"
#include "krein/opuc.hpp"
#include "krein/scattering.hpp"
#include "krein/spectral.hpp"
#include "krein/zeros.hpp"

namespace krein::acceptance {

namespace {

namespace fs = std::filesystem;
using ode::Mat2;

const char* const kNames[] = {"A_one", "H_half", "A_pair", "A_random_1", "A_random_2", "A_random_3", "A_gauss", "l_bump"};

std::string sci(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3g", v);
    return buf;
}

double max_entry(const Mat2& M) { return M.cwiseAbs().maxCoeff(); }

double err_from(const SampledFunction& f, double from, const std::function<cplx(double)>& exact) {
    double e = 0.0;
    for (std::size_t i = 0; i < f.size(); ++i)
        if (f.x(i) >= from - 1e-12) e = std::max(e, std::abs(f[i] - exact(f.x(i))));
    return e;
}

SampledFunction random_coefficient(unsigned seed) {
    std::mt19937 rng(seed);
    std::uniform_real_distribution<double> u(-0.3, 0.3);
    std::vector<cplx> c(5);
    for (auto& z : c) z = {u(rng), u(rng)};
    return {Grid1D::span(0.0, 2.0, 400), [c](double x) {
                cplx s = 0.0;
                for (std::size_t k = 0; k < c.size(); ++k) s += c[k] * std::exp(I * static_cast<double>(k) * x);
                return s;
            }};
}

struct Check {
    bool pass;
    std::string detail;
};

Check c1(const Fixtures& f) {
    const auto t = ode::propagate(f.A_one, 1.0, 0.0);
    Mat2 ex;
    ex << std::cosh(1.0), -std::sinh(1.0), -std::sinh(1.0), std::cosh(1.0);
    const double e = max_entry(t.X - ex);
    return {e < 1e-8, "max entry error " + sci(e)};
}

Check c2(const Fixtures& f) {
    double worst = 0.0;
    for (cplx l : {cplx(0), cplx(1), I, cplx(5), cplx(2, 3)})
        for (double r : {0.5, 1.0, 2.0}) worst = std::max(worst, ode::propagate(f.A_one, r, l).det_residual());
    return {worst < 1e-8, "max |det X - e^{i lambda r}| " + sci(worst)};
}

Check c3(const Fixtures& f) {
    double worst = 0.0;
    for (double l : {-5.0, 0.0, 5.0})
        for (double r : {0.5, 1.0, 2.0}) worst = std::max(worst, ode::propagate(f.A_one, r, l).j_residual());
    return {worst < 1e-7, "max ||X*JX - J||_F " + sci(worst)};
}

Check c4(const Fixtures& f) {
    double worst = 0.0;
    for (auto [a, b] : {std::pair<cplx, cplx>{I, 2.0 * I}, {2.0 * I, I}, {1.0, 1.0}})
        worst = std::max(worst, std::abs(ode::reproducing_kernel(f.A_one, 1.0, a, b) -
                                          ode::reproducing_kernel_quadrature(f.A_one, 1.0, a, b)));
    return {worst < 1e-7, "closed form vs quadrature " + sci(worst)};
}

Check c5(const Fixtures& f) {
    auto exactA = [](double r) { return cplx(1.0 / (2.0 + r)); };
    const double e1 = err_from(accel::h_to_a(f.H_half, 1e-3), 0.2, exactA);
    const double e2 = err_from(accel::h_to_a(f.H_half, 5e-4), 0.2, exactA);
    auto half = [](double) { return cplx(0.5); };
    // same discretization run backwards
    const double i1 = err_from(accel::a_to_h_discrete(f.A_pair), 0.0, half);
    const double i2 = err_from(accel::a_to_h_discrete(accel::resample(f.A_pair, 5e-4)), 0.0, half);
    const bool ok = e1 < 2e-3 && e2 < e1 && i1 < 2e-3 && i2 < i1;
    return {ok, "H->A " + sci(e1) + " -> " + sci(e2) + ", A->H " + sci(i1) + " -> " + sci(i2)};
}

Check c6(const Fixtures& f) {
    const Mat2 X = ode::propagate(f.A_one, 1.0, 1.0).X;
    std::string d = "errors";
    double prev = 1e300;
    bool ok = true;
    for (std::size_t n : {100, 200, 400, 800}) {
        const double e = (opuc::bridge_transfer(f.A_one, 1.0, n, 1.0) - X).norm();
        ok = ok && e < prev;
        prev = e;
        d += " " + sci(e);
    }
    return {ok && prev < 1e-2, d};
}

Check c7(const Fixtures& f) {
    const auto t = spectral::trace_log_wall(f.A_one, Grid1D::span(-200.0, 200.0, 40000));
    return {t.relative() < 1e-2, "int ln|A_w| = " + sci(t.lhs) + ", relative " + sci(t.relative())};
}

Check c8(const Fixtures& f) {
    const auto H = accel::a_to_h(accel::resample(f.A_one, 2.5e-3));
    const double d = spectral::det2_nystrom(H, 1.0), ex = std::exp(-0.5);
    const double rel = std::abs(d / ex - 1.0);
    return {rel < 1e-3, "det2 " + sci(d) + ", relative " + sci(rel)};
}

Check c9(const Fixtures& f) {
    const auto A = accel::h_to_a(accel::accelerant_from_logdensity(f.l_bump, {}, Grid1D::span(0.0, 8.0, 8000)));
    spectral::StrongSzegoInput in;
    in.A = A;
    in.l = &f.l_bump;
    in.T_radii = {1, 2, 4, 8};
    const auto rep = spectral::strong_szego(in);
    const double rel = std::abs(rep.G - rep.L) / rep.L;
    bool mono = true;
    for (std::size_t k = 1; k < rep.T.size(); ++k) mono = mono && rep.T[k].second >= rep.T[k - 1].second;
    return {rel < 2e-2 && mono, "G " + sci(rep.G) + ", L " + sci(rep.L) + ", relative " + sci(rel) +
                                    (mono ? ", T_r monotone" : ", T_r not monotone")};
}

Check c10(const Fixtures& f) {
    double worst = 0.0;
    for (const auto& A : f.A_random) {
        const auto C = accel::c_transfer(accel::a_to_h_discrete(A));
        worst = std::max(worst, std::abs(C[0] + A[0]));
    }
    return {worst < 1e-6, "max |C(0) + A(0)| " + sci(worst)};
}

Check c11(const Fixtures& f) {
    const zeros::Rect box{-20.0, 20.0, 0.01, 5.0};
    const auto z = zeros::find_zeros(f.A_one, 1.0, box);
    const int n = zeros::count_zeros(f.A_one, 1.0, box);
    bool upper = true;
    for (const auto& a : z.zeros) upper = upper && a.lambda.imag() > 0.0;
    std::vector<double> gaps;
    for (std::size_t k = z.zeros.size() >= 5 ? z.zeros.size() - 5 : 0; k < z.zeros.size(); ++k) {
        const cplx l = z.zeros[k].lambda;
        gaps.push_back(std::abs(l - zeros::zero_asymptote(f.A_one, 1.0, zeros::asymptote_index(f.A_one, 1.0, l))));
    }
    // mirror pairs share |lambda| and their gap, hence the tie allowance
    bool dec = gaps.size() == 5 && gaps.back() < gaps.front();
    for (std::size_t k = 1; k < gaps.size(); ++k) dec = dec && gaps[k] <= gaps[k - 1] + 1e-9;
    std::string d = "count " + std::to_string(n) + ", found " + std::to_string(z.zeros.size()) + ", gaps";
    for (double g : gaps) d += " " + sci(g);
    return {n == static_cast<int>(z.zeros.size()) && upper && dec, d};
}

Check c12(const Fixtures& f) {
    const auto lg = Grid1D::span(-100.0, 100.0, 4000);
    const auto s = scatter::scattering_data_dirac(f.A_one, lg);
    const auto m = spectral::bernstein_szego_density(f.A_one, 1.0, lg);
    const auto dd = s.dirac_density();
    double e = 0.0;
    for (std::size_t i = 0; i < lg.count; ++i) e = std::max(e, std::abs(dd[i].real() - 2.0 * m.density()[i].real()));
    const double en = s.energy_residual();
    return {en < 1e-8 && e < 1e-8, "energy " + sci(en) + ", density " + sci(e)};
}

Check c13(const Fixtures& f) {
    const auto A = accel::resample(f.A_one, 5e-3);
    const auto g = scatter::hankel_symbol(A, Grid1D::span(-200.0, 200.0, 40000));
    const auto rec = scatter::hankel_inverse_scattering(scatter::symbol_to_D(g, 1.0, Grid1D::span(0.0, 1.5, 150)).D);
    double inside = 0.0, beyond = 0.0;
    for (std::size_t i = 0; i < rec.size(); ++i) {
        if (rec.x(i) <= 1.0 + 1e-9) inside = std::max(inside, std::abs(rec[i] - 1.0));
        else beyond = std::max(beyond, std::abs(rec[i]));
    }
    return {inside < 5e-2 && beyond < 1e-2, "sup error " + sci(inside) + ", beyond support " + sci(beyond)};
}

Check c14(const Fixtures&) {
    // a(r) = 2 A(2r) = -1/(1 + r)
    const SampledFunction A(Grid1D::span(0.0, 2.0, 40000), [](double r) { return cplx(-1.0 / (2.0 + r)); });
    const auto red = scatter::schrodinger_reduce(A);
    const double q = red.q1.sup_norm();
    return {q < 1e-8 && std::abs(red.h - 1.0) < 1e-12, "h = " + sci(red.h) + ", sup |q1| " + sci(q)};
}

Check c15(const Fixtures& f) {
    const auto c = scatter::gelfand_levitan_check(accel::a_to_h_discrete(f.A_gauss), f.A_gauss, 2.0, 200);
    return {c.q_residual < 1e-2, "sup |q_K - q_Riccati| " + sci(c.q_residual)};
}

Check c16(const Fixtures& f) {
    const auto& H = f.H_half;
    const auto A = accel::h_to_a(H);
    const double t = 1.0;
    const SampledFunction Hs(H.grid(), [&](double x) { return H.at(x) * std::exp(-I * t * x); });
    const auto As = accel::h_to_a(Hs);
    double es = 0.0;
    for (std::size_t i = 0; i < A.size(); ++i) es = std::max(es, std::abs(As[i] - A[i] * std::exp(I * A.x(i) * t)));

    const double g = 2.0;
    const SampledFunction Hd(Grid1D::span(0.0, H.grid().end() / g, H.size() / 2), [&](double x) { return g * H.at(g * x); });
    const auto Ad = accel::h_to_a(Hd);
    const auto Ag = accel::h_to_a(accel::resample(H, g * Hd.grid().step));
    double ed = 0.0;
    for (std::size_t i = 0; i < Ad.size(); ++i) ed = std::max(ed, std::abs(Ad[i] - g * Ag.at(g * Ad.x(i))));

    const double ec = std::max(accel::h_to_a(H.conj()).max_abs_diff(A.conj()),
                               accel::h_to_a(Hs.conj()).max_abs_diff(As.conj()));
    return {es < 1e-6 && ed < 1e-6 && ec < 1e-6, "shift " + sci(es) + ", dilation " + sci(ed) + ", conjugation " + sci(ec)};
}

struct Criterion {
    int id;
    const char* name;
    Check (*fn)(const Fixtures&);
    double time_limit;  // seconds, 0 for none
};

const Criterion kCriteria[] = {
    {1, "exact solution at lambda = 0", c1, 1.0},
    {2, "determinant identity", c2, 0.0},
    {3, "J-unitarity on the real line", c3, 0.0},
    {4, "Christoffel-Darboux", c4, 0.0},
    {5, "constant accelerant pair round trip", c5, 0.0},
    {6, "OPUC bridge convergence", c6, 5.0},
    {7, "trace formula", c7, 0.0},
    {8, "regularized determinant", c8, 0.0},
    {9, "strong Szego two routes", c9, 0.0},
    {10, "Geronimus relation", c10, 0.0},
    {11, "zeros", c11, 0.0},
    {12, "scattering energy identity", c12, 0.0},
    {13, "inverse scattering round trip", c13, 0.0},
    {14, "Riccati zero-potential family", c14, 0.0},
    {15, "Gelfand-Levitan cross-route", c15, 0.0},
    {16, "covariance suite", c16, 0.0},
};

}  // namespace

Fixtures Fixtures::generate() {
    Fixtures f;
    f.A_one = {Grid1D::span(0.0, 1.0, 1000), [](double) { return cplx(1.0); }};
    f.H_half = {Grid1D::span(0.0, 4.0, 4000), [](double) { return cplx(0.5); }};
    f.A_pair = {Grid1D::span(0.0, 4.0, 4000), [](double r) { return cplx(1.0 / (2.0 + r)); }};
    for (unsigned s : {11u, 12u, 13u}) f.A_random.push_back(random_coefficient(s));
    f.A_gauss = {Grid1D::span(0.0, 4.0, 4000), [](double r) { return cplx(0.6 * std::exp(-4.0 * (r - 1.0) * (r - 1.0))); }};
    f.l_bump = {Grid1D::span(-1.0, 1.0, 400), [](double x) {
                    return cplx(std::abs(x) < 1 ? 0.6 * std::exp(-8 * x * x) * std::pow(1 - x * x, 2) : 0.0);
                }};
    return f;
}

Fixtures Fixtures::load(const std::string& dir) {
    auto rd = [&](const char* name) { return read_sampled((fs::path(dir) / (std::string(name) + ".csv")).string()); };
    Fixtures f;
    f.A_one = rd(kNames[0]);
    f.H_half = rd(kNames[1]);
    f.A_pair = rd(kNames[2]);
    for (int k = 3; k < 6; ++k) f.A_random.push_back(rd(kNames[k]));
    f.A_gauss = rd(kNames[6]);
    f.l_bump = rd(kNames[7]);
    return f;
}

void Fixtures::save(const std::string& dir) const {
    fs::create_directories(dir);
    const SampledFunction* all[] = {&A_one, &H_half, &A_pair, &A_random.at(0), &A_random.at(1), &A_random.at(2), &A_gauss, &l_bump};
    for (int k = 0; k < 8; ++k) write_sampled((fs::path(dir) / (std::string(kNames[k]) + ".csv")).string(), *all[k]);
}

Suite parse_suite(const std::string& s) {
    if (s == "core") return Suite::core;
    if (s == "identities") return Suite::identities;
    if (s == "bridges") return Suite::bridges;
    if (s == "all") return Suite::all;
    fail(ErrorKind::usage, "unknown suite '" + s + "' (core, identities, bridges, all)");
}

bool in_suite(int id, Suite s) {
    switch (s) {
        case Suite::core: return id <= 4 || id == 11;
        case Suite::bridges: return id == 5 || id == 6 || id == 13;
        case Suite::identities: return id >= 7 && id != 11 && id != 13;
        case Suite::all: return true;
    }
    return false;
}

std::vector<Outcome> run(const Fixtures& f, Suite s) {
    std::vector<Outcome> out;
    for (const auto& c : kCriteria) {
        if (!in_suite(c.id, s)) continue;
        Outcome o{c.id, c.name, false, "", 0.0};
        const auto t0 = std::chrono::steady_clock::now();
        try {
            auto r = c.fn(f);
            o.pass = r.pass;
            o.detail = r.detail;
        } catch (const std::exception& e) {
            o.detail = std::string("error: ") + e.what();
        }
        o.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        if (c.time_limit > 0 && o.seconds >= c.time_limit) {
            o.pass = false;
            o.detail += ", over the " + sci(c.time_limit) + " s budget";
        }
        out.push_back(o);
    }
    return out;
}

std::string format_line(const Outcome& o) {
    char head[64];
    std::snprintf(head, sizeof head, "%s %2d ", o.pass ? "PASS" : "FAIL", o.id);
    char t[32];
    std::snprintf(t, sizeof t, " (%.2f s)", o.seconds);
    return head + o.name + ": " + o.detail + t;
}

}  // namespace krein::acceptance

#include "krein/spectral.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include <Eigen/Dense>

namespace krein::spectral {

namespace {

void require_upper(cplx lambda) {
    if (!(lambda.imag() > 0.0)) fail(ErrorKind::domain, "lambda must lie in the open upper half-plane");
}

double l2_squared(const SampledFunction& A) {
    std::vector<double> v(A.size());
    for (std::size_t i = 0; i < A.size(); ++i) v[i] = std::norm(A[i]);
    return trapezoid(v, A.grid().step);
}

// ln(2 pi sigma') on the density grid
std::vector<double> log_density(const SpectralMeasure& m) {
    const auto& d = m.density();
    std::vector<double> g(d.size());
    for (std::size_t i = 0; i < d.size(); ++i) {
        const double v = d[i].real();
        if (!(v > 0.0))
            fail(ErrorKind::domain, "density vanishes at lambda = " + fmt_double(d.x(i)) + "; ln sigma' is singular");
        g[i] = std::log(2.0 * PI * v);
    }
    return g;
}

double trapezoid_weight(std::size_t i, std::size_t n) { return (i == 0 || i + 1 == n) ? 0.5 : 1.0; }

}  // namespace

double TracePair::relative() const {
    const double s = std::abs(rhs);
    return s > 0.0 ? std::abs(lhs - rhs) / s : std::abs(lhs - rhs);
}

SpectralMeasure bernstein_szego_density(const SampledFunction& A, double r, const Grid1D& lambda_grid,
                                        const ode::Options& opt) {
    std::vector<cplx> d(lambda_grid.count);
    for (std::size_t k = 0; k < lambda_grid.count; ++k) {
        const auto X = ode::propagate(A, r, lambda_grid.point(k), opt).X;
        d[k] = 1.0 / (2.0 * PI * std::norm(X(1, 0) + X(1, 1)));
    }
    return SpectralMeasure(SampledFunction(lambda_grid, std::move(d)));
}

cplx weyl_titchmarsh(const SampledFunction& A, double r, cplx lambda, const ode::Options& opt) {
    require_upper(lambda);
    const auto X = ode::propagate(A, r, lambda, opt).X;
    return (X(1, 1) - X(1, 0)) / (X(1, 1) + X(1, 0));
}

cplx schur_function(const SampledFunction& A, cplx lambda, const ode::Options& opt) {
    require_upper(lambda);
    const auto X = ode::propagate(A, A.grid().end(), lambda, opt).X;
    return X(1, 0) / X(1, 1);
}

SampledFunction weyl_titchmarsh_real(const SampledFunction& A, const Grid1D& lambda_grid, const ode::Options& opt) {
    return {lambda_grid, [&](double l) {
                const auto X = ode::propagate(A, A.grid().end(), l, opt).X;
                return (X(1, 1) - X(1, 0)) / (X(1, 1) + X(1, 0));
            }};
}

SampledFunction schur_function_real(const SampledFunction& A, const Grid1D& lambda_grid, const ode::Options& opt) {
    return {lambda_grid, [&](double l) {
                const auto X = ode::propagate(A, A.grid().end(), l, opt).X;
                return X(1, 0) / X(1, 1);
            }};
}

SampledFunction hilbert_pv(const SampledFunction& g) {
    const auto& gr = g.grid();
    const std::size_t n = g.size();
    const double h = gr.step, a = gr.start, b = gr.end();
    if (n < 3) fail(ErrorKind::domain, "Hilbert transform needs at least 3 samples");
    std::vector<cplx> out(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double x = gr.point(i);
        const cplx gi = g[i];
        // subtract g(x): the remainder is smooth, the constant part integrates to a log
        cplx deriv;
        if (i == 0) deriv = (g[1] - g[0]) / h;
        else if (i + 1 == n) deriv = (g[n - 1] - g[n - 2]) / h;
        else deriv = (g[i + 1] - g[i - 1]) / (2.0 * h);
        cplx s = -deriv * trapezoid_weight(i, n);
        for (std::size_t j = 0; j < n; ++j) {
            if (j == i) continue;
            s += trapezoid_weight(j, n) * (g[j] - gi) / (x - gr.point(j));
        }
        s *= h;
        const double left = std::max(x - a, 0.5 * h), right = std::max(b - x, 0.5 * h);
        s += gi * std::log(left / right);
        out[i] = s / PI;
    }
    return {gr, std::move(out)};
}

cplx szego_function(const SpectralMeasure& m, cplx lambda) {
    require_upper(lambda);
    const auto g = log_density(m);
    const auto& gr = m.density().grid();
    cplx s = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i) {
        const double t = gr.point(i);
        s += trapezoid_weight(i, g.size()) * g[i] * (1.0 + t * lambda) / ((lambda - t) * (1.0 + t * t));
    }
    s *= gr.step;
    return std::exp(s / (2.0 * PI * I));
}

SampledFunction szego_function_real(const SpectralMeasure& m, bool unit_at_infinity) {
    const auto g = log_density(m);
    const auto& gr = m.density().grid();
    std::vector<cplx> gc(g.begin(), g.end());
    const auto Hg = hilbert_pv(SampledFunction(gr, gc));
    double c = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i) {
        const double t = gr.point(i);
        c += trapezoid_weight(i, g.size()) * g[i] * t / (1.0 + t * t);
    }
    c = unit_at_infinity ? 0.0 : c * gr.step;
    std::vector<cplx> pi(g.size());
    for (std::size_t i = 0; i < g.size(); ++i)
        pi[i] = std::exp(-0.5 * g[i] - 0.5 * I * Hg[i].real() - I * c / (2.0 * PI));
    return {gr, std::move(pi)};
}

cplx weyl_from_measure(const SpectralMeasure& m, cplx lambda) {
    require_upper(lambda);
    const auto& d = m.density();
    cplx s = 0.0;
    for (std::size_t i = 0; i < d.size(); ++i)
        s += trapezoid_weight(i, d.size()) * (2.0 * PI * d[i].real() - 1.0) / (d.x(i) - lambda);
    s *= d.grid().step;
    for (auto pm : m.point_masses()) s += 2.0 * PI * pm.weight / (pm.location - lambda);
    return 1.0 + s / (PI * I);
}

SampledFunction weyl_from_measure_real(const SpectralMeasure& m) {
    if (!m.point_masses().empty()) fail(ErrorKind::domain, "boundary values need a purely a.c. measure");
    const auto& d = m.density();
    const auto u = d.map([](double, cplx v) { return 2.0 * PI * v.real() - 1.0; });
    const auto Hu = hilbert_pv(u);
    std::vector<cplx> F(d.size());
    for (std::size_t i = 0; i < d.size(); ++i) F[i] = 1.0 + u[i].real() + I * Hu[i].real();
    return {d.grid(), std::move(F)};
}

double szego_distance(const SpectralMeasure& m, cplx lambda0) {
    require_upper(lambda0);
    const auto g = log_density(m);
    const auto& gr = m.density().grid();
    const double y = lambda0.imag();
    double s = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i)
        s += trapezoid_weight(i, g.size()) * g[i] / std::norm(gr.point(i) - lambda0);
    s *= gr.step;
    return std::exp(y * s / (2.0 * PI)) / std::sqrt(2.0 * y);
}

double kernel_minimum(const SampledFunction& A, double rho, cplx lambda0, const ode::Options& opt) {
    require_upper(lambda0);
    const double k = ode::reproducing_kernel(A, rho, lambda0, lambda0, opt).real();
    if (!(k > 0.0)) fail(ErrorKind::numeric, "reproducing kernel is not positive on the diagonal");
    return 1.0 / std::sqrt(k);
}

TracePair trace_log_wall(const SampledFunction& A, const Grid1D& lambda_grid, const ode::Options& opt) {
    std::vector<double> v(lambda_grid.count);
    for (std::size_t k = 0; k < lambda_grid.count; ++k)
        v[k] = std::log(std::abs(ode::propagate(A, A.grid().end(), lambda_grid.point(k), opt).X(1, 1)));
    return {trapezoid(v, lambda_grid.step), PI * l2_squared(A)};
}

TracePair trace_schur(const SampledFunction& A, const Grid1D& lambda_grid, const ode::Options& opt) {
    return {rho_s2(schur_function_real(A, lambda_grid, opt)), 2.0 * PI * l2_squared(A)};
}

TracePair trace_gamma(const SampledFunction& A, const SpectralMeasure& m) {
    const auto pi = szego_function_real(m, true);
    std::vector<double> v(pi.size());
    for (std::size_t i = 0; i < pi.size(); ++i) v[i] = std::norm(1.0 / pi[i] - 1.0);
    return {trapezoid(v, pi.grid().step) / (2.0 * PI), l2_squared(A)};
}

SampledFunction gamma_from_measure(const SpectralMeasure& m, const Grid1D& x_grid) {
    const auto g = szego_function_real(m, true).map([](double, cplx p) { return 1.0 / p - 1.0; });
    // gamma jumps at x = 0, so g ~ c / (lambda + i); that part is inverted exactly
    const std::size_t n = g.size(), w = std::max<std::size_t>(1, n / 50);
    cplx c = 0.0;
    for (std::size_t k = 0; k < w; ++k) {
        c += (g.x(k) + I) * g[k];
        c += (g.x(n - 1 - k) + I) * g[n - 1 - k];
    }
    c /= static_cast<double>(2 * w);
    const auto rest = g.map([c](double l, cplx v) { return v - c / (l + I); });
    auto out = inverse_fourier_halfline(rest, x_grid, std::numeric_limits<double>::infinity()).value;
    return out.map([c](double x, cplx v) { return x > 0.0 ? v - I * c * std::exp(-x) : (x == 0.0 ? v - 0.5 * I * c : v); });
}

double rho_s2(const SampledFunction& f, bool tail_correction) {
    std::vector<double> v(f.size());
    for (std::size_t i = 0; i < f.size(); ++i) {
        const double q = 1.0 - std::norm(f[i]);
        if (!(q > 0.0))
            fail(ErrorKind::numeric, "|f| reaches 1 at lambda = " + fmt_double(f.x(i)) + "; rho_s diverges");
        v[i] = -std::log(q);
    }
    double total = trapezoid(v, f.grid().step);
    if (tail_correction) {
        // integrand ~ c / lambda^2 past each end; c is averaged over the outer 10% of the grid
        const auto& g = f.grid();
        if (!(g.start < 0.0 && g.end() > 0.0)) fail(ErrorKind::domain, "tail correction needs a grid around 0");
        const std::size_t w = std::max<std::size_t>(1, f.size() / 20);
        double cl = 0.0, cr = 0.0;
        for (std::size_t k = 0; k < w; ++k) {
            cl += v[k] * f.x(k) * f.x(k);
            cr += v[f.size() - 1 - k] * f.x(f.size() - 1 - k) * f.x(f.size() - 1 - k);
        }
        total += cl / static_cast<double>(w) / -g.start + cr / static_cast<double>(w) / g.end();
    }
    return total;
}

LayerStrip layer_strip(const SampledFunction& A, double r, const Grid1D& lambda_grid, const ode::Options& opt) {
    const auto& g = A.grid();
    const double jd = r / g.step;
    const auto j = static_cast<std::size_t>(std::llround(jd));
    if (std::abs(jd - static_cast<double>(j)) > 1e-9 || j == 0 || j + 1 >= A.size())
        fail(ErrorKind::domain, "split point must be an interior grid node");
    std::vector<cplx> right(A.values().begin() + static_cast<std::ptrdiff_t>(j), A.values().end());
    LayerStrip out;
    out.total = rho_s2(schur_function_real(A, lambda_grid, opt), true);
    out.left = rho_s2(schur_function_real(A.head(j + 1), lambda_grid, opt), true);
    out.right = rho_s2(schur_function_real(SampledFunction(Grid1D(0.0, g.step, right.size()), right), lambda_grid, opt), true);
    return out;
}

SampledFunction mirror(const SampledFunction& A) {
    std::vector<cplx> v(A.values().rbegin(), A.values().rend());
    return {A.grid(), std::move(v)};
}

double G_functional(const SampledFunction& A) {
    std::vector<double> v(A.size());
    for (std::size_t i = 0; i < A.size(); ++i) v[i] = A.x(i) * std::norm(A[i]);
    return trapezoid(v, A.grid().step);
}

double T_functional(const SampledFunction& A, double r) {
    std::vector<double> v(A.size());
    for (std::size_t i = 0; i < A.size(); ++i) v[i] = std::min(A.x(i), r) * std::norm(A[i]);
    return std::exp(trapezoid(v, A.grid().step));
}

double det2_formula(const SampledFunction& A, double r) {
    std::vector<double> v(A.size());
    for (std::size_t i = 0; i < A.size(); ++i) v[i] = std::max(r - A.x(i), 0.0) * std::norm(A[i]);
    return std::exp(-trapezoid(v, A.grid().step));
}

double det2_nystrom(const SampledFunction& H, double r) {
    const auto& g = H.grid();
    if (g.start != 0.0) fail(ErrorKind::domain, "accelerant grid must start at 0");
    const auto n = static_cast<std::size_t>(std::llround(r / g.step));
    if (n == 0 || n >= H.size() || std::abs(r - static_cast<double>(n) * g.step) > 1e-9 * std::max(1.0, r))
        fail(ErrorKind::domain, "r must be a grid node inside the accelerant grid");
    const std::size_t m = n + 1;
    Eigen::MatrixXcd K(m, m);
    Eigen::VectorXd sw(m);
    for (std::size_t i = 0; i < m; ++i) sw(i) = std::sqrt(g.step * trapezoid_weight(i, m));
    for (std::size_t i = 0; i < m; ++i) {
        K(i, i) = sw(i) * H[0].real() * sw(i);
        for (std::size_t j = 0; j < i; ++j) {
            const cplx v = sw(i) * H[i - j] * sw(j);
            K(i, j) = v;
            K(j, i) = std::conj(v);
        }
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(K, Eigen::EigenvaluesOnly);
    if (es.info() != Eigen::Success) fail(ErrorKind::numeric, "eigenvalue solve failed");
    double logdet = 0.0;
    for (Eigen::Index k = 0; k < es.eigenvalues().size(); ++k) {
        const double mu = es.eigenvalues()(k);
        if (!(1.0 + mu > 0.0)) fail(ErrorKind::numeric, "I + H_r is not positive definite");
        logdet += std::log1p(mu) - mu;
    }
    return std::exp(logdet);
}

double L_functional(const SampledFunction& l) {
    std::vector<double> v(l.size());
    for (std::size_t i = 0; i < l.size(); ++i) v[i] = std::max(l.x(i), 0.0) * std::norm(l[i]);
    return trapezoid(v, l.grid().step);
}

DirichletResult I_functional(const SampledFunction& l, const DirichletOptions& opt) {
    const auto& g = l.grid();
    if (!(g.end() > 0.0)) fail(ErrorKind::domain, "l has no support on x > 0");
    const auto nx = static_cast<std::size_t>(std::ceil(g.end() / g.step));
    const SampledFunction xl(Grid1D::span(0.0, g.end(), nx), [&](double x) { return x * l.at(x); });
    const auto half = static_cast<std::size_t>(std::ceil(opt.lambda_max / opt.lambda_step));
    const Grid1D lg(-static_cast<double>(half) * opt.lambda_step, opt.lambda_step, 2 * half + 1);
    const std::size_t nu = opt.u_intervals;
    const double du = 1.0 / static_cast<double>(nu);
    double total = 0.0, peak = 0.0, edge = 0.0;
    std::vector<double> row(lg.count);
    // u = 1 is y = inf, where the integrand vanishes
    for (std::size_t iu = 0; iu < nu; ++iu) {
        const double u = static_cast<double>(iu) * du;
        const double y = u / (1.0 - u);
        const double jac = 1.0 / ((1.0 - u) * (1.0 - u));
        for (std::size_t k = 0; k < lg.count; ++k) {
            const cplx d = fourier_integral_linear(xl, cplx(lg.point(k), y));
            row[k] = std::norm(d);
            peak = std::max(peak, row[k]);
        }
        edge = std::max({edge, row.front(), row.back()});
        total += trapezoid_weight(iu, nu + 1) * jac * trapezoid(row, lg.step);
    }
    total *= du;
    return {total / PI, peak > 0.0 ? edge / peak : 0.0};
}

StrongSzegoReport strong_szego(const StrongSzegoInput& in) {
    const auto& A = in.A;
    StrongSzegoReport rep;
    rep.G = G_functional(A);
    std::vector<double> radii = in.T_radii;
    if (radii.empty())
        for (double r = 1.0; r <= A.grid().end() + 1e-12; r *= 2.0) radii.push_back(r);
    for (double r : radii) rep.T.emplace_back(r, T_functional(A, r));
    rep.det2_r = in.det2_r > 0.0 ? in.det2_r : A.grid().end();
    rep.det2 = det2_formula(A, rep.det2_r);
    if (in.H) {
        rep.has_H = true;
        rep.det2_eigen = det2_nystrom(*in.H, rep.det2_r);
    }
    if (in.l) {
        rep.has_l = true;
        rep.L = L_functional(*in.l);
        const auto d = I_functional(*in.l);
        rep.I = d.value;
        rep.I_tail = d.tail;
    }
    return rep;
}

std::string format_report(const StrongSzegoReport& r) {
    std::ostringstream os;
    os << "G = " << fmt_double(r.G) << '\n';
    if (r.has_l) {
        os << "L = " << fmt_double(r.L) << '\n';
        os << "I = " << fmt_double(r.I) << '\n';
        os << "I_tail = " << fmt_double(r.I_tail) << '\n';
    }
    for (const auto& [rad, t] : r.T) os << "T(" << fmt_double(rad) << ") = " << fmt_double(t) << '\n';
    os << "det2_r = " << fmt_double(r.det2_r) << '\n';
    os << "det2 = " << fmt_double(r.det2) << '\n';
    if (r.has_H) os << "det2_eigen = " << fmt_double(r.det2_eigen) << '\n';
    return os.str();
}

}  // namespace krein::spectral

#include "krein/scattering.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <json.hpp>
#include <sstream>

namespace krein::scatter {

namespace {

using Mat = Eigen::MatrixXcd;
using Vec = Eigen::VectorXcd;

bool same_grid(const Grid1D& a, const Grid1D& b) {
    return a.count == b.count && std::abs(a.start - b.start) <= 1e-12 * (1.0 + std::abs(a.start)) &&
           std::abs(a.step - b.step) <= 1e-12 * a.step;
}

// second-order differences, one-sided at the ends
std::vector<double> derivative(const std::vector<double>& f, double h) {
    const std::size_t n = f.size();
    std::vector<double> d(n, 0.0);
    if (n < 3) {
        if (n == 2) d[0] = d[1] = (f[1] - f[0]) / h;
        return d;
    }
    d[0] = (-3.0 * f[0] + 4.0 * f[1] - f[2]) / (2.0 * h);
    d[n - 1] = (3.0 * f[n - 1] - 4.0 * f[n - 2] + f[n - 3]) / (2.0 * h);
    for (std::size_t i = 1; i + 1 < n; ++i) d[i] = (f[i + 1] - f[i - 1]) / (2.0 * h);
    return d;
}

std::vector<double> trapezoid_weights(std::size_t nodes, double h) {
    std::vector<double> w(nodes, h);
    if (nodes == 1) {
        w[0] = 0.0;
        return w;
    }
    w.front() = w.back() = 0.5 * h;
    return w;
}

// int_0^t xi^k sigma'(xi) dxi, density taken piecewise linear (Simpson is exact cell by cell)
double density_moment(const SampledFunction& d, double t, int k) {
    const auto& g = d.grid();
    double lo = std::max(0.0, g.start), hi = std::min(t, g.end());
    if (!(hi > lo)) return 0.0;
    auto f = [&](double x) { return std::pow(x, k) * d.at(x).real(); };
    double s = 0.0;
    double a = lo;
    while (a < hi) {
        const double cell = std::floor((a - g.start) / g.step + 1e-12);
        double b = std::min(hi, g.start + (cell + 1.0) * g.step);
        if (b <= a) b = std::min(hi, a + g.step);
        s += (b - a) / 6.0 * (f(a) + 4.0 * f(0.5 * (a + b)) + f(b));
        a = b;
    }
    return s;
}

}  // namespace

DiracPotential dirac_potential(const SampledFunction& A) {
    const auto& g = A.grid();
    if (std::abs(g.start) > 1e-14) fail(ErrorKind::domain, "coefficient grid must start at r = 0");
    const Grid1D half(0.0, 0.5 * g.step, g.count);
    std::vector<cplx> a(g.count), b(g.count);
    for (std::size_t i = 0; i < g.count; ++i) {
        a[i] = 2.0 * A[i].real();
        b[i] = 2.0 * A[i].imag();
    }
    return {{half, std::move(a)}, {half, std::move(b)}};
}

SampledFunction krein_from_dirac(const DiracPotential& d, std::string* warning) {
    const auto& g = d.a.grid();
    std::vector<cplx> v(g.count);
    const bool same = same_grid(g, d.b.grid());
    if (!same && warning)
        *warning = "b is sampled on a different grid than a; resampled onto a's grid by linear interpolation";
    for (std::size_t i = 0; i < g.count; ++i) {
        const double b = same ? d.b[i].real() : d.b.at(g.point(i)).real();
        v[i] = 0.5 * cplx(d.a[i].real(), b);
    }
    return {Grid1D(2.0 * g.start, 2.0 * g.step, g.count), std::move(v)};
}

std::pair<cplx, cplx> dirac_eigenfunctions(const SampledFunction& A, double r, cplx lambda, const ode::Options& opt) {
    const auto p = ode::eval_polys(A, 2.0 * r, lambda, opt);
    const cplx e = std::exp(-I * lambda * r);
    return {0.5 * e * (p.P + p.P_star), e * (p.P - p.P_star) / (2.0 * I)};
}

double ScatteringData::energy_residual() const {
    double m = 0.0;
    for (std::size_t i = 0; i < A_scat.size(); ++i)
        m = std::max(m, std::abs(std::norm(A_scat[i]) - std::norm(B_scat[i]) - 1.0));
    return m;
}

SampledFunction ScatteringData::dirac_density() const {
    return jost.map([](double, cplx j) { return cplx(1.0 / (PI * std::norm(j))); });
}

ScatteringData scattering_data_dirac(const SampledFunction& A, const Grid1D& lambda_grid, const ode::Options& opt) {
    const double R = A.grid().end();
    std::vector<cplx> a(lambda_grid.count), b(lambda_grid.count), f(lambda_grid.count), j(lambda_grid.count);
    for (std::size_t i = 0; i < lambda_grid.count; ++i) {
        const auto w = ode::wall(A, R, lambda_grid.point(i), opt);
        a[i] = w.A_w;
        b[i] = w.B_w;
        f[i] = w.B_w / w.A_w;
        j[i] = w.A_w + w.B_w;
    }
    return {{lambda_grid, std::move(a)}, {lambda_grid, std::move(b)}, {lambda_grid, std::move(f)}, {lambda_grid, std::move(j)}};
}

void write_scattering(const std::string& prefix, const ScatteringData& s) {
    write_sampled(prefix + "_A.csv", s.A_scat);
    write_sampled(prefix + "_B.csv", s.B_scat);
    write_sampled(prefix + "_reflection.csv", s.reflection);
    write_sampled(prefix + "_jost.csv", s.jost);
    nlohmann::json m;
    const auto& g = s.A_scat.grid();
    m["lambda"] = {{"start", g.start}, {"step", g.step}, {"count", g.count}};
    m["files"] = {{"A_scat", prefix + "_A.csv"},
                  {"B_scat", prefix + "_B.csv"},
                  {"reflection", prefix + "_reflection.csv"},
                  {"jost", prefix + "_jost.csv"}};
    m["energy_residual"] = s.energy_residual();
    spit(prefix + "_manifest.json", m.dump(2) + "\n");
}

SchrodingerReduction schrodinger_reduce(const SampledFunction& A) {
    double scale = 0.0, imag = 0.0;
    for (auto v : A.values()) {
        scale = std::max(scale, std::abs(v));
        imag = std::max(imag, std::abs(v.imag()));
    }
    if (imag > 1e-14 * std::max(1.0, scale)) fail(ErrorKind::domain, "Schrodinger reduction needs a real coefficient");
    const auto d = dirac_potential(A);
    const double h = d.a.grid().step;
    std::vector<double> a(d.a.size());
    for (std::size_t i = 0; i < a.size(); ++i) a[i] = d.a[i].real();
    const auto da = derivative(a, h);
    std::vector<cplx> q1(a.size()), q2(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
        q1[i] = a[i] * a[i] - da[i];
        q2[i] = a[i] * a[i] + da[i];
    }
    return {d.a, {d.a.grid(), std::move(q1)}, {d.a.grid(), std::move(q2)}, -2.0 * A[0].real()};
}

std::pair<SampledFunction, SampledFunction> schrodinger_measures(const SpectralMeasure& m, const Grid1D& E_grid) {
    std::vector<cplx> r1(E_grid.count), r2(E_grid.count);
    for (std::size_t i = 0; i < E_grid.count; ++i) {
        const double E = E_grid.point(i);
        if (E < 0.0) continue;
        const double t = std::sqrt(E);
        double s1 = density_moment(m.density(), t, 0);
        double s2 = density_moment(m.density(), t, 2);
        for (auto pm : m.point_masses()) {
            if (pm.location == 0.0) s1 += 0.5 * pm.weight;  // odd normalization
            else if (pm.location > 0.0 && pm.location <= t) {
                s1 += pm.weight;
                s2 += pm.location * pm.location * pm.weight;
            }
        }
        r1[i] = 4.0 * s1;
        r2[i] = 4.0 * s2;
    }
    return {{E_grid, std::move(r1)}, {E_grid, std::move(r2)}};
}

GLKernel gelfand_levitan(const SampledFunction& H, double X, std::size_t n) {
    if (!(X > 0.0) || n == 0) fail(ErrorKind::domain, "Gelfand-Levitan needs X > 0 and n >= 1");
    if (H.grid().end() < 2.0 * X * (1.0 - 1e-12)) fail(ErrorKind::domain, "H must cover [0, 2X]");
    const double h = X / static_cast<double>(n);
    std::vector<double> Hv(2 * n + 1);
    for (std::size_t m = 0; m <= 2 * n; ++m) Hv[m] = H.at(static_cast<double>(m) * h).real();
    auto F = [&](std::size_t t, std::size_t y) { return Hv[t + y] + Hv[t > y ? t - y : y - t]; };
    GLKernel out;
    out.step = h;
    out.K.resize(n + 1);
    for (std::size_t i = 0; i <= n; ++i) {
        const std::size_t N = i + 1;
        const auto w = trapezoid_weights(N, h);
        Eigen::MatrixXd M = Eigen::MatrixXd::Identity(N, N);
        Eigen::VectorXd rhs(N);
        for (std::size_t j = 0; j < N; ++j) {
            rhs(j) = -F(i, j);
            for (std::size_t k = 0; k < N; ++k) M(j, k) += w[k] * F(k, j);
        }
        Eigen::PartialPivLU<Eigen::MatrixXd> lu(M);
        if (!(lu.rcond() > 1e-12))
            fail(ErrorKind::numeric, "Gelfand-Levitan operator is singular at x = " + fmt_double(i * h) +
                                         " (H is not an accelerant there)");
        const Eigen::VectorXd k = lu.solve(rhs);
        out.K[i].assign(k.data(), k.data() + N);
    }
    return out;
}

std::string format_gl_kernel(const GLKernel& k) {
    std::ostringstream os;
    os << "x,y,re\n";
    for (std::size_t i = 0; i < k.size(); ++i)
        for (std::size_t j = 0; j <= i; ++j)
            os << fmt_double(i * k.step) << ',' << fmt_double(j * k.step) << ',' << fmt_double(k.K[i][j]) << '\n';
    return os.str();
}

GLCheck gelfand_levitan_check(const SampledFunction& H, const SampledFunction& A, double X, std::size_t n) {
    for (auto v : H.values())
        if (std::abs(v.imag()) > 1e-14 * (1.0 + std::abs(v))) fail(ErrorKind::domain, "Gelfand-Levitan needs a real H");
    GLCheck c;
    c.kernel = gelfand_levitan(H, X, n);
    const double h = c.kernel.step;
    std::vector<double> Hv(2 * n + 1);
    for (std::size_t m = 0; m <= 2 * n; ++m) Hv[m] = H.at(static_cast<double>(m) * h).real();

    // resolvent column G_2x(s, 0) on [0, 2x], same step
    for (std::size_t i = 0; i <= n; ++i) {
        const std::size_t N = 2 * i + 1;
        const auto w = trapezoid_weights(N, h);
        Eigen::MatrixXd M = Eigen::MatrixXd::Identity(N, N);
        Eigen::VectorXd rhs(N);
        for (std::size_t p = 0; p < N; ++p) {
            rhs(p) = Hv[p];
            for (std::size_t q = 0; q < N; ++q) M(p, q) += w[q] * Hv[p > q ? p - q : q - p];
        }
        const Eigen::VectorXd g = M.partialPivLu().solve(rhs);
        for (std::size_t j = 0; j <= i; ++j)
            c.resolvent_residual = std::max(c.resolvent_residual, std::abs(c.kernel.K[i][j] + g(i + j) + g(i - j)));
    }

    std::vector<double> diag(n + 1);
    for (std::size_t i = 0; i <= n; ++i) diag[i] = c.kernel.K[i][i];
    const auto d = derivative(diag, h);
    const auto red = schrodinger_reduce(A);
    const Grid1D xg(0.0, h, n + 1);
    std::vector<cplx> qk(n + 1), qr(n + 1);
    for (std::size_t i = 0; i <= n; ++i) {
        qk[i] = 2.0 * d[i];
        qr[i] = red.q1.at(i * h);
        if (i > 0 && i < n) c.q_residual = std::max(c.q_residual, std::abs(qk[i] - qr[i]));
    }
    c.q_kernel = {xg, std::move(qk)};
    c.q_riccati = {xg, std::move(qr)};
    return c;
}

SampledFunction hankel_symbol(const SampledFunction& A, const Grid1D& lambda_grid, const ode::Options& opt) {
    const double R = A.grid().end();
    return {lambda_grid, [&](double l) {
                const auto w = ode::wall(A, R, l, opt);
                return w.B_w / std::conj(w.A_w);
            }};
}

SymbolTransform symbol_to_D(const SampledFunction& g, double R, const Grid1D& x_grid) {
    const auto& lg = g.grid();
    const double L = std::max(std::abs(lg.start), std::abs(lg.end()));
    // least squares g (1 - i lambda) ~ J0 + JR e^{i lambda R} on the outer half of the grid
    std::vector<std::size_t> rows;
    for (std::size_t i = 0; i < g.size(); ++i)
        if (std::abs(lg.point(i)) > 0.5 * L) rows.push_back(i);
    SymbolTransform out;
    if (rows.size() >= 4) {
        Mat M(rows.size(), 2);
        Vec y(rows.size());
        for (std::size_t k = 0; k < rows.size(); ++k) {
            const double l = lg.point(rows[k]);
            M(k, 0) = 1.0;
            M(k, 1) = std::exp(I * l * R);
            y(k) = g[rows[k]] * (1.0 - I * l);
        }
        const Vec J = M.colPivHouseholderQr().solve(y);
        out.jump0 = J(0);
        out.jumpR = J(1);
    }
    const auto smooth = g.map([&](double l, cplx v) { return v - (out.jump0 + out.jumpR * std::exp(I * l * R)) / (1.0 - I * l); });
    auto inv = inverse_fourier_halfline(smooth, x_grid, 1e300);
    out.tail = inv.tail;
    std::vector<cplx> d(x_grid.count);
    for (std::size_t i = 0; i < x_grid.count; ++i) {
        const double x = x_grid.point(i);
        cplx v = inv.value[i];
        if (x >= 0.0) v += out.jump0 * std::exp(-x);
        // left limit at R itself, matching a sampled A that includes A(R)
        if (x > R + 1e-9 * (1.0 + R)) v += out.jumpR * std::exp(-(x - R));
        d[i] = v;
    }
    out.D = {x_grid, std::move(d)};
    return out;
}

namespace {

// D(m * step) for m = 0..M, M set by the end of D's grid
std::vector<cplx> half_line_samples(const SampledFunction& D, double& step) {
    step = D.grid().step;
    const double end = D.grid().end();
    if (end < 0.0) return {};
    const auto M = static_cast<std::size_t>(std::floor(end / step + 1e-9));
    std::vector<cplx> d(M + 1);
    for (std::size_t m = 0; m <= M; ++m) d[m] = D.at(static_cast<double>(m) * step);
    return d;
}

}  // namespace

double hankel_norm(const SampledFunction& D) {
    double h = 0.0;
    const auto d = half_line_samples(D, h);
    if (d.size() < 2) return 0.0;
    const std::size_t N = d.size();
    const auto w = trapezoid_weights(N, h);
    Mat S = Mat::Zero(N, N);
    for (std::size_t i = 0; i < N; ++i)
        for (std::size_t j = 0; i + j < N; ++j) S(i, j) = std::sqrt(w[i] * w[j]) * d[i + j];
    Eigen::BDCSVD<Mat> svd(S);
    return svd.singularValues()(0);
}

SampledFunction hankel_inverse_scattering(const SampledFunction& D) {
    const double nrm = hankel_norm(D);
    if (!(nrm < 1.0))
        fail(ErrorKind::domain, "not a scattering datum: Hankel operator norm " + fmt_double(nrm) + " >= 1");
    double h = 0.0;
    const auto d = half_line_samples(D, h);
    if (d.empty()) fail(ErrorKind::domain, "D must be sampled on part of [0, inf)");
    const std::size_t M = d.size() - 1;
    std::vector<cplx> A(M + 1);
    for (std::size_t k = 0; k <= M; ++k) {
        // nodes x_i = k h / 2 + i h, i = 0..M-k, so that x_i + x_j = (k + i + j) h
        const std::size_t N = M - k + 1;
        const auto w = trapezoid_weights(N, h);
        Mat Hm = Mat::Zero(N, N), Hc = Mat::Zero(N, N);
        Vec rhs(N);
        for (std::size_t i = 0; i < N; ++i) {
            rhs(i) = -d[k + i];
            for (std::size_t j = 0; k + i + j <= M; ++j) {
                Hm(i, j) = d[k + i + j] * w[j];
                Hc(i, j) = std::conj(d[k + i + j]) * w[j];
            }
        }
        // L11 = -Hc L21, L21 = -d - Hm L11
        const Mat sys = Mat::Identity(N, N) - Hm * Hc;
        const Vec L21 = sys.partialPivLu().solve(rhs);
        A[k] = L21(0);
    }
    return {Grid1D(0.0, h, M + 1), std::move(A)};
}

Det2Identity det2_identity(const SampledFunction& A, cplx lambda, std::size_t n) {
    if (n == 0) fail(ErrorKind::domain, "det2 identity needs n >= 1");
    const double R = 0.5 * A.grid().end();
    const auto dp = dirac_potential(A);
    const double h = R / static_cast<double>(n);
    std::vector<double> s(n), a(n), b(n);
    for (std::size_t j = 0; j < n; ++j) {
        s[j] = (static_cast<double>(j) + 0.5) * h;
        a[j] = dp.a.at(s[j]).real();
        b[j] = dp.b.at(s[j]).real();
    }
    using M2 = Eigen::Matrix2cd;
    auto green = [&](double r, double t) {
        // free resolvent kernel of the adjoint dissipative operator
        M2 above, below;
        const cplx er = std::exp(I * lambda * r), et = std::exp(I * lambda * t);
        above << std::cos(r * lambda) * I * et, std::cos(r * lambda) * et, std::sin(r * lambda) * I * et,
            std::sin(r * lambda) * et;
        below << I * er * std::cos(t * lambda), I * er * std::sin(t * lambda), er * std::cos(t * lambda),
            er * std::sin(t * lambda);
        if (t > r) return above;
        if (t < r) return below;
        return M2(0.5 * (above + below));
    };
    Mat K(2 * n, 2 * n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) {
            M2 Q;
            Q << -b[j], -a[j], -a[j], b[j];
            K.block<2, 2>(2 * i, 2 * j) = h * green(s[i], s[j]) * Q;
        }
    const cplx det = (Mat::Identity(2 * n, 2 * n) + K).partialPivLu().determinant();
    cplx pre = 0.0;
    for (std::size_t j = 0; j < n; ++j) pre += h * cplx(a[j], b[j]) * std::exp(2.0 * I * lambda * s[j]);
    Det2Identity out;
    out.det_modulus = std::abs(std::exp(-pre) * det * std::exp(-K.trace()));
    out.ode_modulus = std::abs(ode::eval_polys(A, 2.0 * R, lambda).P_star);
    return out;
}

}  // namespace krein::scatter

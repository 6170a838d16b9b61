#include "krein/accelerant.hpp"

#include <cmath>

#include <Eigen/Dense>

namespace krein::accel {

std::vector<cplx> levinson_last_entries(const HermitianToeplitz& T, const std::vector<cplx>& y, double step) {
    const std::size_t n = T.size();
    if (y.size() != n) fail(ErrorKind::domain, "right-hand side length mismatch");
    std::vector<cplx> last(n);
    if (n == 0) return last;
    const double t0 = T.t[0].real();
    if (!(t0 > 0.0)) throw PositivityError(0, 0.0);
    std::vector<cplx> f{1.0 / t0}, b{1.0 / t0}, x{y[0] / t0};
    last[0] = x[0];
    std::vector<cplx> fn, bn;
    for (std::size_t m = 1; m < n; ++m) {
        cplx ef = 0.0, eb = 0.0, theta = 0.0;
        for (std::size_t k = 0; k < m; ++k) {
            ef += T.t[m - k] * f[k];
            eb += std::conj(T.t[k + 1]) * b[k];
            theta += T.t[m - k] * x[k];
        }
        const cplx den = 1.0 - ef * eb;
        if (!(den.real() > 0.0) || !std::isfinite(den.real())) throw PositivityError(m, static_cast<double>(m) * step);
        fn.assign(m + 1, 0.0);
        bn.assign(m + 1, 0.0);
        for (std::size_t k = 0; k <= m; ++k) {
            const cplx fk = k < m ? f[k] : cplx(0.0);
            const cplx bk = k >= 1 ? b[k - 1] : cplx(0.0);
            fn[k] = (fk - ef * bk) / den;
            bn[k] = (bk - eb * fk) / den;
        }
        if (!(bn[m].real() > 0.0)) throw PositivityError(m, static_cast<double>(m) * step);
        const cplx c = y[m] - theta;
        x.push_back(0.0);
        for (std::size_t k = 0; k <= m; ++k) x[k] += c * bn[k];
        f.swap(fn);
        b.swap(bn);
        last[m] = x[m];
    }
    return last;
}

std::vector<cplx> dense_last_entries(const HermitianToeplitz& T, const std::vector<cplx>& y, double step) {
    const std::size_t n = T.size();
    std::vector<cplx> last(n);
    for (std::size_t j = 0; j < n; ++j) {
        Eigen::MatrixXcd M(j + 1, j + 1);
        Eigen::VectorXcd rhs(j + 1);
        for (std::size_t k = 0; k <= j; ++k) {
            rhs(k) = y[k];
            for (std::size_t m = 0; m <= j; ++m) M(k, m) = T(k, m);
        }
        Eigen::LLT<Eigen::MatrixXcd> llt(M);
        if (llt.info() != Eigen::Success) throw PositivityError(j, static_cast<double>(j) * step);
        last[j] = llt.solve(rhs)(j);
    }
    return last;
}

SampledFunction resample(const SampledFunction& f, double step) {
    const auto& g = f.grid();
    const double nd = g.length() / step;
    const auto n = static_cast<std::size_t>(std::llround(nd));
    if (n < 1 || std::abs(nd - static_cast<double>(n)) > 1e-6)
        fail(ErrorKind::domain, "step does not divide the sampled interval");
    return {Grid1D::span(g.start, g.end(), n), [&f](double x) { return f.at(x); }};
}

SampledFunction h_to_a(const SampledFunction& H, const HToAOptions& opt) {
    if (H.grid().start != 0.0) fail(ErrorKind::domain, "accelerant grid must start at 0");
    const double h = H.grid().step;
    const std::size_t n = H.size();
    HermitianToeplitz T;
    T.t.resize(n);
    T.t[0] = opt.unit_diagonal ? 1.0 : 1.0 + h * H[0].real();
    for (std::size_t k = 1; k < n; ++k) T.t[k] = h * H[k];
    const auto last = opt.solver == Solver::levinson ? levinson_last_entries(T, H.values(), h)
                                                     : dense_last_entries(T, H.values(), h);
    std::vector<cplx> a(n);
    a[0] = std::conj(H[0]);
    for (std::size_t j = 1; j < n; ++j) a[j] = std::conj(last[j]);
    return {H.grid(), std::move(a)};
}

SampledFunction h_to_a(const SampledFunction& H, double step, const HToAOptions& opt) {
    return h_to_a(resample(H, step), opt);
}

SampledFunction a_to_h_discrete(const SampledFunction& A) {
    if (A.grid().start != 0.0) fail(ErrorKind::domain, "coefficient grid must start at 0");
    const double h = A.grid().step;
    const std::size_t n = A.size();
    const cplx H0 = std::conj(A[0]);
    const double t0 = 1.0 + h * H0.real();
    if (!(t0 > 0.0)) throw PositivityError(0, 0.0);
    const cplx kappa = (t0 - h * H0) / h;
    std::vector<cplx> t{t0}, f{1.0 / t0}, b{1.0 / t0}, fn, bn;
    std::vector<cplx> H(n);
    H[0] = H0;
    for (std::size_t j = 1; j < n; ++j) {
        // last entry of the next forward vector is fixed by A(jh); solve for the reflection term
        const cplx fj = -std::conj(A[j]) / kappa;
        const cplx w = fj / b[j - 1];
        const double aw = std::abs(w);
        const double s = 2.0 * aw / (1.0 + std::sqrt(1.0 + 4.0 * aw * aw));
        const cplx eps = aw > 0.0 ? -s * w / aw : cplx(0.0);
        cplx partial = 0.0;
        for (std::size_t k = 1; k < j; ++k) partial += t[j - k] * f[k];
        t.push_back((eps - partial) / f[0]);
        H[j] = t[j] / h;

        cplx ef = 0.0, eb = 0.0;
        for (std::size_t k = 0; k < j; ++k) {
            ef += t[j - k] * f[k];
            eb += std::conj(t[k + 1]) * b[k];
        }
        const cplx den = 1.0 - ef * eb;
        fn.assign(j + 1, 0.0);
        bn.assign(j + 1, 0.0);
        for (std::size_t k = 0; k <= j; ++k) {
            const cplx fk = k < j ? f[k] : cplx(0.0);
            const cplx bk = k >= 1 ? b[k - 1] : cplx(0.0);
            fn[k] = (fk - ef * bk) / den;
            bn[k] = (bk - eb * fk) / den;
        }
        f.swap(fn);
        b.swap(bn);
    }
    return {A.grid(), std::move(H)};
}

AToHResult a_to_h_detailed(const SampledFunction& A, const AToHOptions& opt) {
    if (A.grid().start != 0.0) fail(ErrorKind::domain, "coefficient grid must start at 0");
    const double R = A.grid().end();
    double dl = opt.lambda_step;
    if (dl <= 0.0) dl = 2.0 * PI / std::max(8.0 * R, 40.0);
    const auto half = static_cast<std::size_t>(std::ceil(opt.lambda_max / dl));
    const Grid1D lg(-static_cast<double>(half) * dl, dl, 2 * half + 1);
    std::vector<cplx> d(lg.count);
    for (std::size_t k = 0; k < lg.count; ++k) {
        const double lam = lg.point(k);
        const auto X = ode::propagate(A, R, lam, opt.ode).X;
        const cplx F = (X(1, 1) - X(1, 0)) / (X(1, 1) + X(1, 0));
        // subtract the Born term, whose inverse transform is A itself
        d[k] = 0.5 * (F - 1.0) - fourier_integral_linear(A, lam);
    }
    auto inv = inverse_fourier_halfline(SampledFunction(lg, std::move(d)), A.grid(), opt.tail_tolerance);
    std::vector<cplx> H(A.size());
    for (std::size_t j = 0; j < A.size(); ++j) H[j] = std::conj(A[j] + inv.value[j]);
    H[0] = std::conj(A[0]);
    AToHResult out;
    out.H = SampledFunction(A.grid(), std::move(H));
    out.tail = inv.tail;
    out.truncated = inv.truncated;
    return out;
}

SampledFunction a_to_h(const SampledFunction& A, const AToHOptions& opt) {
    auto res = a_to_h_detailed(A, opt);
    if (res.truncated)
        fail(ErrorKind::numeric, "lambda grid too narrow: transform tail " + fmt_double(res.tail) +
                                     " exceeds tolerance; widen lambda_max");
    return res.H;
}

SampledFunction dual_accelerant(const SampledFunction& H) {
    const double h = H.grid().step;
    const std::size_t n = H.size();
    std::vector<cplx> D(n);
    D[0] = -H[0];
    for (std::size_t i = 1; i < n; ++i) {
        cplx s = 0.5 * H[i] * D[0];
        for (std::size_t k = 1; k < i; ++k) s += H[i - k] * D[k];
        D[i] = (-H[i] - 2.0 * h * s) / (1.0 + h * H[0]);
    }
    return {H.grid(), std::move(D)};
}

namespace {

// Solves u + v + int_0^x v(x - s) u(s) ds = 0 for u given v (trapezoid rule).
std::vector<cplx> volterra_pair(const std::vector<cplx>& v, double h) {
    const std::size_t n = v.size();
    std::vector<cplx> u(n);
    u[0] = -v[0];
    for (std::size_t i = 1; i < n; ++i) {
        cplx s = 0.5 * v[i] * u[0];
        for (std::size_t k = 1; k < i; ++k) s += v[i - k] * u[k];
        u[i] = (-v[i] - h * s) / (1.0 + 0.5 * h * v[0]);
    }
    return u;
}

}  // namespace

SampledFunction c_transfer(const SampledFunction& H) {
    auto D = volterra_pair(H.values(), H.grid().step);
    for (auto& z : D) z = std::conj(z);
    return {H.grid(), std::move(D)};
}

SampledFunction c_transfer_inverse(const SampledFunction& C) {
    return {C.grid(), volterra_pair(C.conj().values(), C.grid().step)};
}

SampledFunction accelerant_from_logdensity(const SampledFunction& l, const std::vector<PointMass>& masses,
                                           const Grid1D& x_grid) {
    const auto& lg = l.grid();
    const double h = lg.step;
    const std::size_t nl = l.size();
    if (std::abs(lg.start + lg.end()) > 1e-9 * std::max(1.0, lg.end()))
        fail(ErrorKind::domain, "log-density must live on a grid symmetric about 0");
    const auto& lv = l.values();

    std::vector<cplx> term(lv);  // l^{*k}/k!, centred
    std::vector<cplx> sum(lv);
    std::size_t k = 1;
    double size = l.sup_norm();
    while (size >= 1e-14) {
        if (k >= 50) fail(ErrorKind::numeric, "log-density series did not converge within 50 terms");
        ++k;
        std::vector<cplx> next(term.size() + nl - 1, 0.0);
        for (std::size_t i = 0; i < term.size(); ++i) {
            if (term[i] == cplx(0.0)) continue;
            for (std::size_t j = 0; j < nl; ++j) next[i + j] += term[i] * lv[j];
        }
        size = 0.0;
        for (auto& z : next) {
            z *= h / static_cast<double>(k);
            size = std::max(size, std::abs(z));
        }
        // grow the running sum symmetrically to the new support
        std::vector<cplx> grown(next.size(), 0.0);
        const std::size_t off = (next.size() - sum.size()) / 2;
        for (std::size_t i = 0; i < sum.size(); ++i) grown[i + off] = sum[i];
        for (std::size_t i = 0; i < next.size(); ++i) grown[i] += next[i];
        sum.swap(grown);
        term.swap(next);
    }
    const std::size_t centre = (sum.size() - 1) / 2;
    SampledFunction conj_h(Grid1D(-static_cast<double>(centre) * h, h, sum.size()), sum);
    return {x_grid, [&](double x) {
                cplx v = conj_h.at(x);
                for (auto m : masses) v += m.weight * std::exp(-I * m.location * x);
                return std::conj(v);
            }};
}

}  // namespace krein::accel

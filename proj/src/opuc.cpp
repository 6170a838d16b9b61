#include "krein/opuc.hpp"

#include <cmath>
#include <sstream>

namespace krein::opuc {

VerblunskySeq::VerblunskySeq(std::vector<cplx> a) : a_(std::move(a)) {
    for (std::size_t j = 0; j < a_.size(); ++j) {
        if (!std::isfinite(a_[j].real()) || !std::isfinite(a_[j].imag()))
            fail(ErrorKind::format, "Verblunsky coefficient " + std::to_string(j) + " is not finite");
        if (!(std::abs(a_[j]) < 1.0))
            fail(ErrorKind::domain, "Verblunsky coefficient " + std::to_string(j) + " has modulus >= 1");
    }
}

std::string format_verblunsky(const VerblunskySeq& a) {
    std::ostringstream os;
    os << "j,re,im\n";
    for (std::size_t j = 0; j < a.size(); ++j)
        os << j << ',' << fmt_double(a[j].real()) << ',' << fmt_double(a[j].imag()) << '\n';
    return os.str();
}

VerblunskySeq parse_verblunsky(const std::string& text) {
    const auto rows = read_csv(text, {"j", "re", "im"});
    std::vector<cplx> a;
    for (std::size_t i = 0; i < rows.size(); ++i) {
        if (parse_number(rows[i][0]) != static_cast<double>(i))
            fail(ErrorKind::format, "index column must run 0, 1, 2, ...");
        a.emplace_back(parse_number(rows[i][1]), parse_number(rows[i][2]));
    }
    return VerblunskySeq(std::move(a));
}

std::pair<cplx, cplx> szego_recursion(const VerblunskySeq& a, cplx z) {
    cplx p = 1.0, ps = 1.0;
    for (std::size_t n = 0; n < a.size(); ++n) {
        const cplx np = z * p - std::conj(a[n]) * ps;
        ps = ps - a[n] * z * p;
        p = np;
    }
    return {p, ps};
}

VerblunskySeq verblunsky_from_moments(const std::vector<cplx>& c) {
    if (c.empty()) fail(ErrorKind::domain, "need at least c_0");
    if (!(c[0].imag() == 0.0 && c[0].real() > 0.0)) fail(ErrorKind::domain, "c_0 must be real and positive");
    const std::size_t n = c.size() - 1;
    std::vector<cplx> f{1.0 / c[0]}, b{1.0 / c[0]}, fn, bn, a;
    a.reserve(n);
    for (std::size_t j = 1; j <= n; ++j) {
        cplx ef = 0.0, eb = 0.0;
        for (std::size_t k = 0; k < j; ++k) {
            ef += std::conj(c[j - k]) * f[k];
            eb += c[k + 1] * b[k];
        }
        const cplx den = 1.0 - ef * eb;
        if (!(den.real() > 0.0) || !(std::abs(ef) < 1.0))
            fail(ErrorKind::numeric,
                 "moment Toeplitz matrix is not positive definite at level " + std::to_string(j));
        a.push_back(std::conj(ef));
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
    return VerblunskySeq(std::move(a));
}

Mat2 discrete_transfer(const VerblunskySeq& a, cplx z) {
    Mat2 M = Mat2::Identity();
    for (std::size_t j = 0; j < a.size(); ++j) {
        // W(a) Z M, written out
        const cplx r0 = z * M(0, 0), r1 = z * M(0, 1);
        const cplx w = a[j];
        Mat2 N;
        N(0, 0) = r0 - std::conj(w) * M(1, 0);
        N(0, 1) = r1 - std::conj(w) * M(1, 1);
        N(1, 0) = M(1, 0) - w * r0;
        N(1, 1) = M(1, 1) - w * r1;
        M = N;
    }
    return M;
}

VerblunskySeq bridge_from_coefficient(const SampledFunction& A, double r, std::size_t n, bool interleaved) {
    if (n == 0) fail(ErrorKind::domain, "n must be positive");
    const double h = r / static_cast<double>(n);
    std::vector<cplx> a;
    for (std::size_t j = 1; j <= n; ++j) {
        const cplx v = h * A.at(static_cast<double>(j) * h);
        if (!(std::abs(v) < 1.0))
            fail(ErrorKind::domain, "step too large: |h A(" + fmt_double(j * h) + ")| >= 1; increase n");
        a.push_back(v);
        if (interleaved) a.push_back(0.0);
    }
    return VerblunskySeq(std::move(a));
}

Mat2 bridge_transfer(const SampledFunction& A, double r, std::size_t n, cplx lambda, bool interleaved) {
    const double h = r / static_cast<double>(n);
    const cplx z = std::exp(I * lambda * (interleaved ? 0.5 * h : h));
    return discrete_transfer(bridge_from_coefficient(A, r, n, interleaved), z);
}

VerblunskySeq bridge_from_moments(const SampledFunction& H, double R, std::size_t n) {
    if (n == 0) fail(ErrorKind::domain, "n must be positive");
    const double h = R / static_cast<double>(n);
    std::vector<cplx> c(n + 1);
    c[0] = 1.0;
    for (std::size_t k = 1; k <= n; ++k) c[k] = h * std::conj(H.at(static_cast<double>(k) * h));
    return verblunsky_from_moments(c);
}

VerblunskySeq bridge_from_logdensity(const SampledFunction& l, double R, std::size_t n) {
    if (n == 0) fail(ErrorKind::domain, "n must be positive");
    const double h = R / static_cast<double>(n);
    std::vector<cplx> coef(2 * n + 1);
    for (std::size_t j = 0; j <= 2 * n; ++j)
        coef[j] = h * l.at((static_cast<double>(j) - static_cast<double>(n)) * h);
    // sample the density on the circle finely enough that aliasing of exp(.) is negligible
    const std::size_t M = 16 * (n + 1);
    std::vector<double> dens(M);
    for (std::size_t m = 0; m < M; ++m) {
        const double th = 2.0 * PI * static_cast<double>(m) / static_cast<double>(M);
        cplx s = 0.0;
        for (std::size_t j = 0; j <= 2 * n; ++j)
            s += coef[j] * std::exp(I * ((static_cast<double>(j) - static_cast<double>(n)) * th));
        dens[m] = std::exp(s.real());
    }
    std::vector<cplx> c(n + 1);
    for (std::size_t k = 0; k <= n; ++k) {
        cplx s = 0.0;
        for (std::size_t m = 0; m < M; ++m)
            s += dens[m] * std::exp(-I * (2.0 * PI * static_cast<double>(k * m % M) / static_cast<double>(M)));
        c[k] = s / static_cast<double>(M);
    }
    c[0] = c[0].real();
    return verblunsky_from_moments(c);
}

double bridge_error(const VerblunskySeq& a, double h, const std::function<cplx(double)>& A, double delta) {
    double e = 0.0;
    for (std::size_t j = 0; j < a.size(); ++j) {
        const double x = static_cast<double>(j) * h;
        if (x > delta) e = std::max(e, std::abs(A(x) - a[j] / h));
    }
    return e;
}

cplx schur_iterate_discrete(cplx f_next, cplx a, cplx z) {
    if (std::abs(f_next) > 1.0 + 1e-14) fail(ErrorKind::domain, "|f| must not exceed 1");
    if (!(std::abs(a) < 1.0)) fail(ErrorKind::domain, "|a| must be below 1");
    const cplx w = z * f_next;
    const cplx den = 1.0 + std::conj(a) * w;
    if (std::abs(den) < 1e-300) fail(ErrorKind::numeric, "degenerate Schur step: vanishing denominator");
    return (w + a) / den;
}

cplx schur_compose(const VerblunskySeq& a, cplx z, cplx w) {
    cplx f = w;
    for (std::size_t j = a.size(); j-- > 0;) f = schur_iterate_discrete(f, a[j], z);
    return f;
}

double pseudohyperbolic(cplx z1, cplx z2) { return std::abs(z1 - z2) / std::abs(1.0 - std::conj(z1) * z2); }

}  // namespace krein::opuc

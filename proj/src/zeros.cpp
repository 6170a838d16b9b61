#include "krein/zeros.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <sstream>

namespace krein::zeros {

namespace {

constexpr double kMinHeight = 1e-3;
constexpr int kMaxDepth = 24;

struct Walk {
    const SampledFunction& A;
    double r;
    const ode::Options& opt;
    double max_abs = 0.0;
    bool hit = false;  // a zero sits on or next to the walk

    cplx at(cplx l) {
        const cplx p = eval_P(A, r, l, opt);
        max_abs = std::max(max_abs, std::abs(p));
        return p;
    }

    // phase increment along the segment, bisected until every step is below pi/2;
    // |P| below 1e-6 of the local scale means a zero within reach of the walk
    double segment(cplx a, cplx pa, cplx b, cplx pb, double local, int depth) {
        if (std::min(std::abs(pa), std::abs(pb)) < 1e-6 * local) hit = true;
        const double d = std::arg(pb / pa);
        if (std::abs(d) < PI / 2) return d;
        if (depth >= kMaxDepth) {
            hit = true;
            return d;
        }
        const cplx m = 0.5 * (a + b);
        const cplx pm = at(m);
        return segment(a, pa, m, pm, local, depth + 1) + segment(m, pm, b, pb, local, depth + 1);
    }

    double winding(const Rect& q) {
        const cplx c[4] = {{q.x0, q.y0}, {q.x1, q.y0}, {q.x1, q.y1}, {q.x0, q.y1}};
        double total = 0.0;
        for (int s = 0; s < 4; ++s) {
            const cplx a = c[s], b = c[(s + 1) % 4];
            const auto n = static_cast<std::size_t>(std::max(8.0, std::ceil(4.0 * std::abs(b - a) * std::max(1.0, r))));
            cplx prev = a, pprev = at(a);
            for (std::size_t k = 1; k <= n; ++k) {
                const cplx p = a + (b - a) * (static_cast<double>(k) / static_cast<double>(n));
                const cplx pp = at(p);
                total += segment(prev, pprev, p, pp, std::max(std::abs(pprev), std::abs(pp)), 0);
                prev = p;
                pprev = pp;
            }
        }
        return total / (2.0 * PI);
    }
};

Rect lift(Rect q) {
    if (!(q.x1 > q.x0) || !(q.y1 > q.y0)) fail(ErrorKind::domain, "empty rectangle");
    q.y0 = std::max(q.y0, kMinHeight);
    if (!(q.y1 > q.y0)) fail(ErrorKind::domain, "rectangle lies below Im lambda = 1e-3");
    return q;
}

// Winding number, or nothing when a zero lies within 1e-6 (relative) of the boundary.
std::optional<int> try_count(const SampledFunction& A, double r, const Rect& q, const ode::Options& opt,
                             double* scale = nullptr) {
    Walk w{A, r, opt};
    const double wn = w.winding(q);
    if (w.hit) return std::nullopt;
    const long k = std::lround(wn);
    if (std::abs(wn - static_cast<double>(k)) > 1e-3)
        fail(ErrorKind::numeric, "argument principle: non-integer winding " + fmt_double(wn));
    if (scale) *scale = w.max_abs;
    return static_cast<int>(k);
}

// Nudges the rectangle outwards while a zero sits on its boundary.
int count_lifted(const SampledFunction& A, double r, Rect& q, const ode::Options& opt, double* scale = nullptr) {
    for (int attempt = 0; attempt < 6; ++attempt) {
        if (auto k = try_count(A, r, q, opt, scale)) return *k;
        const double e = 1e-4 * (attempt + 1) * std::max(q.x1 - q.x0, q.y1 - q.y0);
        q.x0 -= e;
        q.x1 += 0.7 * e;
        q.y1 += 0.3 * e;
    }
    fail(ErrorKind::numeric, "argument principle: phase jump unresolved after refinement (zero on the boundary)");
}

cplx dP(const SampledFunction& A, double r, cplx lambda, const ode::Options& opt) {
    const auto d = ode::propagate_dlambda(A, r, lambda, opt);
    return d.dX(0, 0) + d.dX(0, 1);
}

// Newton from seed; gives up once an iterate strays further than radius from the seed.
cplx newton_in(const SampledFunction& A, double r, cplx seed, double radius, const ode::Options& opt) {
    cplx z = seed;
    for (int it = 0; it < 50; ++it) {
        const cplx p = eval_P(A, r, z, opt);
        const cplx d = dP(A, r, z, opt);
        if (std::abs(d) == 0.0) break;
        const cplx step = p / d;
        z -= step;
        if (std::abs(z - seed) > radius) break;
        if (std::abs(step) < 1e-13 * (1.0 + std::abs(z))) return z;
    }
    fail(ErrorKind::numeric, "Newton iteration did not converge from " + fmt_double(seed.real()) + "+" +
                                 fmt_double(seed.imag()) + "i");
}

cplx centre(const Rect& q) { return {0.5 * (q.x0 + q.x1), 0.5 * (q.y0 + q.y1)}; }
double diameter(const Rect& q) { return std::hypot(q.x1 - q.x0, q.y1 - q.y0); }

bool inside(const Rect& q, cplx z) {
    return z.real() >= q.x0 && z.real() <= q.x1 && z.imag() >= q.y0 && z.imag() <= q.y1;
}

struct Finder {
    const SampledFunction& A;
    double r;
    const ode::Options& opt;
    double scale;
    std::vector<Zero> found;
    bool simple = true;

    void add(cplx z) {
        for (const auto& f : found)
            if (std::abs(f.lambda - z) < 1e-8 * (1.0 + std::abs(z))) return;
        found.push_back({z, std::abs(eval_P(A, r, z, opt))});
    }

    void search(const Rect& q, int count, int depth) {
        if (count == 0) return;
        if (count == 1) {
            try {
                const cplx z = newton_in(A, r, centre(q), 2.0 * diameter(q), opt);
                if (inside(q, z)) {
                    add(z);
                    return;
                }
            } catch (const Error&) {
            }
        }
        const double w = q.x1 - q.x0, h = q.y1 - q.y0;
        if (std::max(w, h) < 1e-7) {
            // cluster of count zeros: accept the centre with multiplicity
            simple = false;
            add(newton_in(A, r, centre(q), 1e-3, opt));
            return;
        }
        if (depth > 60) fail(ErrorKind::numeric, "zero search: subdivision did not isolate zeros");
        // split off-centre when a zero sits on the cut
        static constexpr double kCuts[] = {0.5, 0.437, 0.561, 0.389, 0.613};
        for (double t : kCuts) {
            Rect a = q, b = q;
            if (w >= h) a.x1 = b.x0 = q.x0 + t * w;
            else a.y1 = b.y0 = q.y0 + t * h;
            if (auto ca = try_count(A, r, a, opt)) {
                search(a, *ca, depth + 1);
                search(b, count - *ca, depth + 1);
                return;
            }
        }
        fail(ErrorKind::numeric, "zero search: no clean cut through cell at " + fmt_double(q.x0) + "," + fmt_double(q.y0));
    }
};

}  // namespace

std::string format_zeros(const ZeroSet& z) {
    std::ostringstream os;
    os << "k,re,im,residual\n";
    for (std::size_t k = 0; k < z.zeros.size(); ++k)
        os << k << ',' << fmt_double(z.zeros[k].lambda.real()) << ',' << fmt_double(z.zeros[k].lambda.imag()) << ','
           << fmt_double(z.zeros[k].residual) << '\n';
    return os.str();
}

cplx eval_P(const SampledFunction& A, double r, cplx lambda, const ode::Options& opt) {
    const auto X = ode::propagate(A, r, lambda, opt).X;
    return X(0, 0) + X(0, 1);
}

int count_zeros(const SampledFunction& A, double r, Rect rect, const ode::Options& opt) {
    Rect q = lift(rect);
    return count_lifted(A, r, q, opt);
}

cplx newton_zero(const SampledFunction& A, double r, cplx seed, const ode::Options& opt) {
    return newton_in(A, r, seed, 1e3 * (1.0 + std::abs(seed)), opt);
}

ZeroSet find_zeros(const SampledFunction& A, double r, Rect rect, const ode::Options& opt) {
    Rect q = lift(rect);
    double scale = 1.0;
    const int total = count_lifted(A, r, q, opt, &scale);
    Finder f{A, r, opt, scale, {}};
    f.search(q, total, 0);
    ZeroSet out;
    out.region = q;
    out.zeros = std::move(f.found);
    std::sort(out.zeros.begin(), out.zeros.end(),
              [](const Zero& a, const Zero& b) { return std::abs(a.lambda) < std::abs(b.lambda); });
    out.multiplicity_checked = f.simple && static_cast<int>(out.zeros.size()) == total;
    if (static_cast<int>(out.zeros.size()) != total)
        fail(ErrorKind::numeric, "zero search found " + std::to_string(out.zeros.size()) + " zeros, winding number is " +
                                     std::to_string(total));
    for (const auto& z : out.zeros)
        if (z.residual > 1e-9 * std::max(1.0, scale))
            fail(ErrorKind::numeric, "zero residual " + fmt_double(z.residual) + " above tolerance");
    return out;
}

cplx zero_asymptote(const SampledFunction& A, double r, long n) {
    const cplx g = std::conj(A.at(r));
    const double a = std::abs(g);
    if (a == 0.0) fail(ErrorKind::domain, "asymptote needs A(r) != 0");
    const double x = (PI / 2 + PI * static_cast<double>(n) + std::arg(g)) / r;
    auto F = [&](double y) { return a * a * std::exp(2.0 * r * y) - x * x - y * y; };
    if (!(F(0.0) < 0.0)) fail(ErrorKind::domain, "no asymptotic zero for index " + std::to_string(n) + " (|x_n| too small)");
    double lo = 0.0, hi = 1.0 / r;
    while (F(hi) < 0.0) {
        lo = hi;
        hi *= 2.0;
        if (hi > 50.0 / r) fail(ErrorKind::numeric, "asymptote: no sign change up to Y = 50/r");
    }
    for (int it = 0; it < 200 && hi - lo > 1e-15 * hi; ++it) {
        const double m = 0.5 * (lo + hi);
        (F(m) < 0.0 ? lo : hi) = m;
    }
    return {x, 0.5 * (lo + hi)};
}

long asymptote_index(const SampledFunction& A, double r, cplx lambda) {
    const double phi = std::arg(std::conj(A.at(r)));
    return std::lround((r * lambda.real() - phi - PI / 2) / PI);
}

FejerCheck fejer_exclusion(const SpectralMeasure& m, const SampledFunction& A, double r, cplx lambda) {
    if (!(lambda.imag() > 0.0)) fail(ErrorKind::domain, "lambda must lie in the upper half-plane");
    const double x = lambda.real(), y = lambda.imag();
    const auto& d = m.density();
    const auto& g = d.grid();
    // exact for the piecewise linear density
    double s = 0.0;
    for (std::size_t i = 0; i + 1 < d.size(); ++i) {
        const double u0 = g.point(i) - x, u1 = g.point(i + 1) - x;
        const double beta = (d[i + 1].real() - d[i].real()) / g.step;
        const double alpha = d[i].real() - beta * u0;
        s += 2.0 * alpha * (std::atan(u1 / y) - std::atan(u0 / y)) +
             beta * y * std::log((u1 * u1 + y * y) / (u0 * u0 + y * y));
    }
    // the two half-lines past the grid, at the end densities
    s += 2.0 * d[0].real() * (PI / 2 - std::atan((x - g.start) / y));
    s += 2.0 * d[d.size() - 1].real() * (PI / 2 - std::atan((g.end() - x) / y));
    for (auto pm : m.point_masses()) s += pm.weight * 2.0 * y / ((pm.location - x) * (pm.location - x) + y * y);
    double l1 = 0.0;
    for (std::size_t i = 0; i + 1 < A.size(); ++i)
        if (A.x(i) < r) {
            const double len = std::min(A.x(i + 1), r) - A.x(i);
            l1 += 0.5 * len * (std::abs(A[i]) + std::abs(A.at(A.x(i) + len)));
        }
    FejerCheck c;
    c.poisson = s;
    c.bound = std::exp(-2.0 * l1);
    c.inside = s < c.bound * (1.0 - 1e-12);
    return c;
}

double support_distance(const SpectralMeasure& m, cplx lambda) {
    const auto& d = m.density();
    const auto& g = d.grid();
    double best = 1e300;
    for (std::size_t i = 0; i < d.size(); ++i)
        if (d[i].real() > 0.0) best = std::min(best, std::abs(lambda - g.point(i)));
    if (d[0].real() > 0.0)
        best = std::min(best, lambda.real() <= g.start ? lambda.imag() : std::abs(lambda - g.start));
    if (d[d.size() - 1].real() > 0.0)
        best = std::min(best, lambda.real() >= g.end() ? lambda.imag() : std::abs(lambda - g.end()));
    for (auto pm : m.point_masses())
        if (pm.weight > 0.0) best = std::min(best, std::abs(lambda - pm.location));
    return best;
}

bool fejer2_excluded(const SpectralMeasure& m, cplx z1, cplx lambda) {
    return lambda.imag() > 0.0 && std::abs(lambda - std::conj(z1)) < support_distance(m, lambda);
}

}  // namespace krein::zeros

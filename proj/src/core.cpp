#include "krein/core.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

namespace krein {

void fail(ErrorKind kind, const std::string& what) { throw Error(kind, what); }

Grid1D::Grid1D(double start_, double step_, std::size_t count_)
    : start(start_), step(step_), count(count_) {
    if (!(step > 0.0) || !std::isfinite(step)) fail(ErrorKind::domain, "grid step must be positive");
    if (count < 1) fail(ErrorKind::domain, "grid needs at least one point");
    if (!std::isfinite(start)) fail(ErrorKind::domain, "grid start must be finite");
}

Grid1D Grid1D::span(double a, double b, std::size_t intervals) {
    if (intervals < 1 || !(b > a)) fail(ErrorKind::domain, "bad grid span");
    return Grid1D(a, (b - a) / static_cast<double>(intervals), intervals + 1);
}

SampledFunction::SampledFunction(Grid1D grid, std::vector<cplx> values)
    : grid_(grid), values_(std::move(values)) {
    if (values_.size() != grid_.count)
        fail(ErrorKind::domain, "sample count does not match grid");
    for (const auto& v : values_)
        if (!std::isfinite(v.real()) || !std::isfinite(v.imag()))
            fail(ErrorKind::numeric, "non-finite sample value");
}

SampledFunction::SampledFunction(Grid1D grid, const std::function<cplx(double)>& f) : grid_(grid) {
    values_.resize(grid.count);
    for (std::size_t i = 0; i < grid.count; ++i) values_[i] = f(grid.point(i));
    for (const auto& v : values_)
        if (!std::isfinite(v.real()) || !std::isfinite(v.imag()))
            fail(ErrorKind::numeric, "non-finite sample value");
}

cplx SampledFunction::at(double x) const {
    const double u = (x - grid_.start) / grid_.step;
    const double last = static_cast<double>(grid_.count - 1);
    if (u < -1e-9 || u > last + 1e-9) return 0.0;
    if (grid_.count == 1) return values_[0];
    double fl = std::floor(u);
    if (fl < 0) fl = 0;
    if (fl > last - 1) fl = last - 1;
    const auto k = static_cast<std::size_t>(fl);
    const double t = std::clamp(u - fl, 0.0, 1.0);
    return values_[k] * (1.0 - t) + values_[k + 1] * t;
}

double SampledFunction::sup_norm() const {
    double m = 0.0;
    for (const auto& v : values_) m = std::max(m, std::abs(v));
    return m;
}

double SampledFunction::max_abs_diff(const SampledFunction& other) const {
    if (other.size() != size()) fail(ErrorKind::domain, "size mismatch");
    double m = 0.0;
    for (std::size_t i = 0; i < size(); ++i) m = std::max(m, std::abs(values_[i] - other.values_[i]));
    return m;
}

SampledFunction SampledFunction::conj() const {
    std::vector<cplx> v(values_);
    for (auto& z : v) z = std::conj(z);
    return {grid_, std::move(v)};
}

SampledFunction SampledFunction::map(const std::function<cplx(double, cplx)>& f) const {
    std::vector<cplx> v(size());
    for (std::size_t i = 0; i < size(); ++i) v[i] = f(x(i), values_[i]);
    return {grid_, std::move(v)};
}

SampledFunction SampledFunction::head(std::size_t n) const {
    n = std::min(n, size());
    return {Grid1D(grid_.start, grid_.step, n), std::vector<cplx>(values_.begin(), values_.begin() + n)};
}

SpectralMeasure::SpectralMeasure(SampledFunction density, std::vector<PointMass> masses)
    : density_(std::move(density)), masses_(std::move(masses)) {
    for (const auto& v : density_.values())
        if (v.real() < 0.0 || v.imag() != 0.0) fail(ErrorKind::domain, "density must be real and nonnegative");
    for (std::size_t i = 0; i < masses_.size(); ++i) {
        if (!(masses_[i].weight > 0.0)) fail(ErrorKind::domain, "point mass weight must be positive");
        if (i > 0 && !(masses_[i].location > masses_[i - 1].location))
            fail(ErrorKind::domain, "point mass locations must increase");
    }
}

SpectralMeasure SpectralMeasure::mix(const SpectralMeasure& a, const SpectralMeasure& b, double t) {
    const auto& da = a.density();
    std::vector<cplx> v(da.size());
    for (std::size_t i = 0; i < v.size(); ++i)
        v[i] = t * da[i].real() + (1.0 - t) * b.density_at(da.x(i));
    std::vector<PointMass> pm;
    for (auto m : a.point_masses()) pm.push_back({m.location, t * m.weight});
    for (auto m : b.point_masses()) pm.push_back({m.location, (1.0 - t) * m.weight});
    std::sort(pm.begin(), pm.end(), [](auto& x, auto& y) { return x.location < y.location; });
    std::vector<PointMass> merged;
    for (auto m : pm) {
        if (!merged.empty() && merged.back().location == m.location) merged.back().weight += m.weight;
        else if (m.weight > 0) merged.push_back(m);
    }
    return {SampledFunction(da.grid(), std::move(v)), std::move(merged)};
}

cplx trapezoid(const std::vector<cplx>& v, double step) {
    if (v.size() < 2) return 0.0;
    cplx s = 0.5 * (v.front() + v.back());
    for (std::size_t i = 1; i + 1 < v.size(); ++i) s += v[i];
    return s * step;
}

double trapezoid(const std::vector<double>& v, double step) {
    if (v.size() < 2) return 0.0;
    double s = 0.5 * (v.front() + v.back());
    for (std::size_t i = 1; i + 1 < v.size(); ++i) s += v[i];
    return s * step;
}

cplx trapezoid(const SampledFunction& f) { return trapezoid(f.values(), f.grid().step); }

namespace {

void check_exponent(const Grid1D& g, cplx lambda) {
    const double worst = std::max(-lambda.imag() * g.start, -lambda.imag() * g.end());
    if (worst > 700.0) fail(ErrorKind::range, "exp(i lambda x) overflows on the grid");
}

}  // namespace

cplx fourier_integral(const SampledFunction& f, cplx lambda) {
    const auto& g = f.grid();
    check_exponent(g, lambda);
    if (f.size() < 2) return 0.0;
    const cplx w = std::exp(I * lambda * g.step);
    cplx e = std::exp(I * lambda * g.start);
    cplx s = 0.0;
    const std::size_t n = f.size();
    for (std::size_t i = 0; i < n; ++i) {
        // refresh the phase periodically to keep the recurrence honest
        if (i % 256 == 0) e = std::exp(I * lambda * g.point(i));
        const double wt = (i == 0 || i + 1 == n) ? 0.5 : 1.0;
        s += wt * f[i] * e;
        e *= w;
    }
    return s * g.step;
}

cplx fourier_integral_linear(const SampledFunction& f, cplx lambda) {
    const auto& g = f.grid();
    check_exponent(g, lambda);
    if (f.size() < 2) return 0.0;
    const double h = g.step;
    const cplx z = I * lambda * h;
    // Weights of the two end values on one cell [0,h] for int (linear) e^{i lambda x}.
    cplx w0, w1;
    if (std::abs(z) < 0.1) {
        // z^k coefficients are 1/(k+2)! and (k+1)/(k+2)!
        cplx zk = 1.0;
        double fact = 2.0;
        for (int k = 0; k < 12; ++k) {
            w0 += zk / fact;
            w1 += zk * static_cast<double>(k + 1) / fact;
            zk *= z;
            fact *= static_cast<double>(k + 3);
        }
        w0 *= h;
        w1 *= h;
    } else {
        const cplx ez = std::exp(z);
        w0 = h * (ez - 1.0 - z) / (z * z);
        w1 = h * (z * ez - ez + 1.0) / (z * z);
    }
    const cplx step = std::exp(z);
    cplx e = std::exp(I * lambda * g.start);
    cplx s = 0.0;
    for (std::size_t i = 0; i + 1 < f.size(); ++i) {
        if (i % 256 == 0) e = std::exp(I * lambda * g.point(i));
        s += e * (w0 * f[i] + w1 * f[i + 1]);
        e *= step;
    }
    return s;
}

InverseFourierResult inverse_fourier_halfline(const SampledFunction& g, const Grid1D& x_grid,
                                              double tail_tolerance) {
    const auto& lg = g.grid();
    InverseFourierResult out;
    out.tail = std::max(std::abs(g.values().front()), std::abs(g.values().back()));
    out.truncated = out.tail > tail_tolerance;
    std::vector<cplx> h(x_grid.count);
    const std::size_t n = g.size();
    for (std::size_t j = 0; j < x_grid.count; ++j) {
        const double x = x_grid.point(j);
        const cplx w = std::exp(-I * lg.step * x);
        cplx e;
        cplx s = 0.0;
        for (std::size_t k = 0; k < n; ++k) {
            if (k % 256 == 0) e = std::exp(-I * lg.point(k) * x);
            const double wt = (k == 0 || k + 1 == n) ? 0.5 : 1.0;
            s += wt * g[k] * e;
            e *= w;
        }
        h[j] = s * lg.step / (2.0 * PI);
    }
    out.value = SampledFunction(x_grid, std::move(h));
    return out;
}

std::string fmt_double(double v) {
    std::ostringstream os;
    os.precision(17);
    os << v;
    return os.str();
}

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) fail(ErrorKind::format, "cannot open " + path);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

void spit(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) fail(ErrorKind::format, "cannot write " + path);
    out << text;
}

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

}  // namespace

double parse_number(const std::string& s) {
    try {
        std::size_t pos = 0;
        const double v = std::stod(s, &pos);
        if (trim(s.substr(pos)).size() != 0) throw std::invalid_argument(s);
        return v;
    } catch (const std::exception&) {
        fail(ErrorKind::format, "not a number: '" + s + "'");
    }
}

std::vector<std::vector<std::string>> read_csv(const std::string& text,
                                               const std::vector<std::string>& header) {
    std::istringstream in(text);
    std::string line;
    std::vector<std::vector<std::string>> rows;
    bool seen_header = false;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        line = trim(line);
        if (line.empty() || line[0] == '#') continue;
        std::vector<std::string> cells;
        std::stringstream ls(line);
        std::string cell;
        while (std::getline(ls, cell, ',')) cells.push_back(trim(cell));
        if (!seen_header) {
            if (cells != header) {
                std::string h;
                for (auto& c : header) h += (h.empty() ? "" : ",") + c;
                fail(ErrorKind::format, "expected header " + h);
            }
            seen_header = true;
            continue;
        }
        if (cells.size() != header.size())
            fail(ErrorKind::format, "malformed row at line " + std::to_string(lineno));
        rows.push_back(std::move(cells));
    }
    if (!seen_header) fail(ErrorKind::format, "empty file");
    return rows;
}

std::string format_sampled(const SampledFunction& f) {
    std::ostringstream os;
    os << "x,re,im\n";
    for (std::size_t i = 0; i < f.size(); ++i)
        os << fmt_double(f.x(i)) << ',' << fmt_double(f[i].real()) << ',' << fmt_double(f[i].imag()) << '\n';
    return os.str();
}

SampledFunction parse_sampled(const std::string& text) {
    const auto rows = read_csv(text, {"x", "re", "im"});
    if (rows.empty()) fail(ErrorKind::format, "no samples");
    std::vector<double> xs;
    std::vector<cplx> vs;
    for (const auto& r : rows) {
        xs.push_back(parse_number(r[0]));
        vs.emplace_back(parse_number(r[1]), parse_number(r[2]));
    }
    if (xs.size() == 1) return {Grid1D(xs[0], 1.0, 1), vs};
    const double h = (xs.back() - xs.front()) / static_cast<double>(xs.size() - 1);
    if (!(h > 0)) fail(ErrorKind::format, "x column must increase");
    for (std::size_t i = 0; i < xs.size(); ++i) {
        const double expect = xs.front() + static_cast<double>(i) * h;
        if (std::abs(xs[i] - expect) > 1e-12 * std::max(std::abs(expect), h))
            fail(ErrorKind::format, "non-uniform spacing at row " + std::to_string(i + 1));
    }
    return {Grid1D(xs.front(), h, xs.size()), std::move(vs)};
}

void write_sampled(const std::string& path, const SampledFunction& f) { spit(path, format_sampled(f)); }

SampledFunction read_sampled(const std::string& path) { return parse_sampled(slurp(path)); }

void write_measure(const std::string& density_path, const std::string& masses_path,
                   const SpectralMeasure& m) {
    write_sampled(density_path, m.density());
    std::ostringstream os;
    os << "lambda,weight\n";
    for (auto p : m.point_masses()) os << fmt_double(p.location) << ',' << fmt_double(p.weight) << '\n';
    spit(masses_path, os.str());
}

SpectralMeasure read_measure(const std::string& density_path, const std::string& masses_path) {
    auto d = read_sampled(density_path);
    std::vector<PointMass> pm;
    if (!masses_path.empty())
        for (const auto& r : read_csv(slurp(masses_path), {"lambda", "weight"}))
            pm.push_back({parse_number(r[0]), parse_number(r[1])});
    return {std::move(d), std::move(pm)};
}

}  // namespace krein

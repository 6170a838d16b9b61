#pragma once

#include <complex>
#include <cstddef>
#include <functional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace krein {

using cplx = std::complex<double>;
inline constexpr cplx I{0.0, 1.0};
inline constexpr double PI = 3.14159265358979323846;

enum class ErrorKind { usage, format, numeric, domain, range };

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
    ErrorKind kind() const { return kind_; }

private:
    ErrorKind kind_;
};

[[noreturn]] void fail(ErrorKind kind, const std::string& what);

struct Grid1D {
    double start = 0.0;
    double step = 1.0;
    std::size_t count = 1;

    Grid1D() = default;
    Grid1D(double start, double step, std::size_t count);

    // Grid with n intervals covering [a, b].
    static Grid1D span(double a, double b, std::size_t intervals);

    double point(std::size_t i) const { return start + static_cast<double>(i) * step; }
    double end() const { return point(count - 1); }
    double length() const { return end() - start; }
};

class SampledFunction {
public:
    SampledFunction() = default;
    SampledFunction(Grid1D grid, std::vector<cplx> values);
    SampledFunction(Grid1D grid, const std::function<cplx(double)>& f);

    const Grid1D& grid() const { return grid_; }
    const std::vector<cplx>& values() const { return values_; }
    std::size_t size() const { return values_.size(); }
    cplx operator[](std::size_t i) const { return values_[i]; }
    double x(std::size_t i) const { return grid_.point(i); }

    // Linear interpolation; zero outside the grid.
    cplx at(double x) const;

    double sup_norm() const;
    double max_abs_diff(const SampledFunction& other) const;
    SampledFunction conj() const;
    SampledFunction map(const std::function<cplx(double, cplx)>& f) const;
    // Restriction to the first n samples.
    SampledFunction head(std::size_t n) const;

private:
    Grid1D grid_;
    std::vector<cplx> values_;
};

struct PointMass {
    double location;
    double weight;
};

class SpectralMeasure {
public:
    SpectralMeasure() = default;
    SpectralMeasure(SampledFunction density, std::vector<PointMass> masses = {});

    const SampledFunction& density() const { return density_; }
    const std::vector<PointMass>& point_masses() const { return masses_; }
    double density_at(double lambda) const { return density_.at(lambda).real(); }

    // t*a + (1-t)*b on a's grid.
    static SpectralMeasure mix(const SpectralMeasure& a, const SpectralMeasure& b, double t);

private:
    SampledFunction density_;
    std::vector<PointMass> masses_;
};

// Composite trapezoid rule over the whole grid.
cplx trapezoid(const SampledFunction& f);
cplx trapezoid(const std::vector<cplx>& v, double step);
double trapezoid(const std::vector<double>& v, double step);

// int f(x) exp(i lambda x) dx over the grid of f, trapezoid rule.
cplx fourier_integral(const SampledFunction& f, cplx lambda);

// Same integral, exact for the piecewise linear interpolant of f.
cplx fourier_integral_linear(const SampledFunction& f, cplx lambda);

struct InverseFourierResult {
    SampledFunction value;
    double tail = 0.0;  // max |g| at the two ends of the lambda grid
    bool truncated = false;
};

// h(x) = (2 pi)^-1 int g(lambda) exp(-i lambda x) dlambda on x_grid.
InverseFourierResult inverse_fourier_halfline(const SampledFunction& g, const Grid1D& x_grid,
                                              double tail_tolerance = 1e-6);

// CSV with header x,re,im.
void write_sampled(const std::string& path, const SampledFunction& f);
SampledFunction read_sampled(const std::string& path);
std::string format_sampled(const SampledFunction& f);
SampledFunction parse_sampled(const std::string& text);

void write_measure(const std::string& density_path, const std::string& masses_path,
                   const SpectralMeasure& m);
SpectralMeasure read_measure(const std::string& density_path, const std::string& masses_path);

// Shared CSV helpers.
std::string fmt_double(double v);
double parse_number(const std::string& s);  // format error on junk
std::vector<std::vector<std::string>> read_csv(const std::string& text,
                                               const std::vector<std::string>& header);
std::string slurp(const std::string& path);
void spit(const std::string& path, const std::string& text);

}  // namespace krein

#pragma once

// Stepping machinery shared by the ODE-based modules.

#include <algorithm>
#include <cmath>

#include "krein/krein_ode.hpp"

namespace krein::ode::detail {

inline Mat2 potential(cplx a, cplx lambda) {
    Mat2 V;
    V << I * lambda, -std::conj(a), -a, 0.0;
    return V;
}

// exp(M) for a 2x2 complex matrix.
inline Mat2 expm2(const Mat2& M) {
    const cplx tau = 0.5 * (M(0, 0) + M(1, 1));
    Mat2 N = M;
    N(0, 0) -= tau;
    N(1, 1) -= tau;
    const cplx d2 = N(0, 0) * N(0, 0) + N(0, 1) * N(1, 0);
    cplx c, s;  // cosh(d), sinh(d)/d
    if (std::abs(d2) < 1e-2) {
        c = 0.0;
        s = 0.0;
        cplx p = 1.0;
        double f_even = 1.0, f_odd = 1.0;
        for (int k = 0; k < 10; ++k) {
            c += p / f_even;
            s += p / f_odd;
            p *= d2;
            f_even *= (2.0 * k + 1.0) * (2.0 * k + 2.0);
            f_odd *= (2.0 * k + 2.0) * (2.0 * k + 3.0);
        }
    } else {
        const cplx d = std::sqrt(d2);
        c = std::cosh(d);
        s = std::sinh(d) / d;
    }
    Mat2 E = s * N;
    E(0, 0) += c;
    E(1, 1) += c;
    return std::exp(tau) * E;
}

inline double max_step(const SampledFunction& A, double lambda_abs, const Options& opt) {
    double dt = A.grid().step;
    if (lambda_abs > 0.0) dt = std::min(dt, opt.phase_step / lambda_abs);
    return dt;
}

// Walks [a, b] (b no larger than the end of A's grid) segment by segment, aligned with
// the grid nodes, calling step(t, dt) on every substep and node(t) at every segment end.
template <class Step, class Node>
void walk(const SampledFunction& A, double a, double b, double dt_max, const Options& opt, Step&& step,
          Node&& node) {
    if (!(b > a)) return;
    const double h = A.grid().step;
    const double x0 = A.grid().start;
    const auto k_lo = static_cast<long>(std::floor((a - x0) / h + 1e-9)) + 1;
    const auto k_hi = static_cast<long>(std::ceil((b - x0) / h - 1e-9)) - 1;
    const double total = (b - a) / dt_max;
    if (total > static_cast<double>(opt.max_steps))
        fail(ErrorKind::numeric, "step too coarse for |lambda|: would need " +
                                     std::to_string(static_cast<long long>(total)) +
                                     " substeps; refine the grid or shorten the range");
    double t = a;
    for (long k = k_lo; k <= k_hi + 1; ++k) {
        const double t_end = (k <= k_hi) ? x0 + static_cast<double>(k) * h : b;
        const double len = t_end - t;
        if (len <= 0.0) continue;
        const auto nsub = static_cast<long>(std::ceil(len / dt_max - 1e-9));
        const double dt = len / static_cast<double>(std::max(nsub, 1L));
        for (long s = 0; s < std::max(nsub, 1L); ++s) step(t + static_cast<double>(s) * dt, dt);
        t = t_end;
        node(t);
    }
}

template <class Node>
Mat2 advance(const SampledFunction& A, double a, double b, cplx lambda, const Options& opt, Mat2 X,
             Node&& node) {
    const double dt_max = max_step(A, std::abs(lambda), opt);
    auto V = [&](double t) { return potential(A.at(t), lambda); };
    switch (opt.method) {
        case Method::rk4:
            walk(A, a, b, dt_max, opt, [&](double t, double dt) {
                const Mat2 Vm = V(t + 0.5 * dt);
                const Mat2 k1 = V(t) * X;
                const Mat2 k2 = Vm * (X + 0.5 * dt * k1);
                const Mat2 k3 = Vm * (X + 0.5 * dt * k2);
                const Mat2 k4 = V(t + dt) * (X + dt * k3);
                X += (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
            }, [&](double t) { node(t, X); });
            break;
        case Method::magnus4: {
            const double c = std::sqrt(3.0) / 6.0;
            walk(A, a, b, dt_max, opt, [&](double t, double dt) {
                const Mat2 V1 = V(t + (0.5 - c) * dt);
                const Mat2 V2 = V(t + (0.5 + c) * dt);
                const Mat2 Om = (0.5 * dt) * (V1 + V2) + (std::sqrt(3.0) / 12.0 * dt * dt) * (V2 * V1 - V1 * V2);
                X = expm2(Om) * X;
            }, [&](double t) { node(t, X); });
            break;
        }
        case Method::product:
            walk(A, a, b, dt_max, opt, [&](double t, double dt) {
                X = expm2(dt * V(t + 0.5 * dt)) * X;
            }, [&](double t) { node(t, X); });
            break;
    }
    return X;
}

// Generic RK4 on a fixed-size state over [a, b].
template <class State, class Deriv>
State rk4(const SampledFunction& A, double a, double b, double dt_max, const Options& opt, State y,
          Deriv&& f) {
    walk(A, a, b, dt_max, opt, [&](double t, double dt) {
        const State k1 = f(t, y);
        const State k2 = f(t + 0.5 * dt, State(y + 0.5 * dt * k1));
        const State k3 = f(t + 0.5 * dt, State(y + 0.5 * dt * k2));
        const State k4 = f(t + dt, State(y + dt * k3));
        y += (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    }, [](double) {});
    return y;
}

}  // namespace krein::ode::detail

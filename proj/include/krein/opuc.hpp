#pragma once

#include <string>
#include <utility>
#include <vector>

#include "krein/core.hpp"
#include "krein/krein_ode.hpp"

namespace krein::opuc {

using ode::Mat2;

// Verblunsky coefficients; every |a_j| < 1.
class VerblunskySeq {
public:
    VerblunskySeq() = default;
    explicit VerblunskySeq(std::vector<cplx> a);

    std::size_t size() const { return a_.size(); }
    cplx operator[](std::size_t j) const { return a_[j]; }
    const std::vector<cplx>& values() const { return a_; }

private:
    std::vector<cplx> a_;
};

// CSV j,re,im.
std::string format_verblunsky(const VerblunskySeq& a);
VerblunskySeq parse_verblunsky(const std::string& text);

// (Phi_n(z), Phi*_n(z)) for n = a.size().
std::pair<cplx, cplx> szego_recursion(const VerblunskySeq& a, cplx z);

// Moments c_0..c_n with T(k, m) = c_{m-k}, c_{-k} = conj c_k. Returns a_0..a_{n-1}.
VerblunskySeq verblunsky_from_moments(const std::vector<cplx>& c);

// W(a_{n-1}) Z ... W(a_0) Z at z.
Mat2 discrete_transfer(const VerblunskySeq& a, cplx z);

// a_{j-1} = h A(jh), h = r/n. With interleaved zeros the sequence has length 2n.
VerblunskySeq bridge_from_coefficient(const SampledFunction& A, double r, std::size_t n, bool interleaved = false);
// The matching approximation of X(r, lambda): M(0, n, exp(i lambda h)) or M(0, 2n, exp(i lambda h / 2)).
Mat2 bridge_transfer(const SampledFunction& A, double r, std::size_t n, cplx lambda, bool interleaved = false);

// Moments 1, h conj H(h), ..., h conj H(nh) with h = R/n.
VerblunskySeq bridge_from_moments(const SampledFunction& H, double R, std::size_t n);
// Verblunsky parameters of the circle density exp(sum_{|j|<=n} h l(jh) z^j), h = R/n.
VerblunskySeq bridge_from_logdensity(const SampledFunction& l, double R, std::size_t n);

// sup over delta < jh < R of |A(jh) - a_j / h|.
double bridge_error(const VerblunskySeq& a, double h, const std::function<cplx(double)>& A, double delta);

// One Schur step: (z f + a) / (1 + conj(a) z f).
cplx schur_iterate_discrete(cplx f_next, cplx a, cplx z);
// tau_{a_0} o z tau_{a_1} o ... o z tau_{a_{n-1}} o (z w).
cplx schur_compose(const VerblunskySeq& a, cplx z, cplx w);

// |z1 - z2| / |1 - conj(z1) z2|.
double pseudohyperbolic(cplx z1, cplx z2);

}  // namespace krein::opuc

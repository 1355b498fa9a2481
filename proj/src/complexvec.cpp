#include "flowembed/complexvec.hpp"

#include <cmath>
#include <stdexcept>

namespace flowembed {

bool all_finite(const CVec& v) {
    for (const Complex& z : v)
        if (!is_finite(z)) return false;
    return true;
}

double inf_norm(const CVec& v) {
    double m = 0.0;
    for (const Complex& z : v) m = std::max(m, std::abs(z));
    return m;
}

double inf_dist(const CVec& a, const CVec& b) {
    if (a.size() != b.size()) throw std::invalid_argument("inf_dist: size mismatch");
    double m = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
    return m;
}

CVec sub(const CVec& a, const CVec& b) {
    if (a.size() != b.size()) throw std::invalid_argument("sub: size mismatch");
    CVec r(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) r[i] = a[i] - b[i];
    return r;
}

void scale_inplace(CVec& v, Complex factor) {
    for (Complex& z : v) z *= factor;
}

namespace {

inline void neumaier_add(double& sum, double& comp, double term) {
    const double t = sum + term;
    if (std::abs(sum) >= std::abs(term))
        comp += (sum - t) + term;
    else
        comp += (term - t) + sum;
    sum = t;
}

}  // namespace

CompensatedCVec::CompensatedCVec(std::size_t n)
    : re_(n, 0.0), im_(n, 0.0), re_c_(n, 0.0), im_c_(n, 0.0) {}

void CompensatedCVec::add_scaled(const CVec& term, double weight) {
    if (term.size() != re_.size())
        throw std::invalid_argument("CompensatedCVec: size mismatch");
    for (std::size_t i = 0; i < term.size(); ++i) {
        neumaier_add(re_[i], re_c_[i], weight * term[i].real());
        neumaier_add(im_[i], im_c_[i], weight * term[i].imag());
    }
}

CVec CompensatedCVec::value() const {
    CVec out(re_.size());
    for (std::size_t i = 0; i < re_.size(); ++i)
        out[i] = Complex(re_[i] + re_c_[i], im_[i] + im_c_[i]);
    return out;
}

}  // namespace flowembed

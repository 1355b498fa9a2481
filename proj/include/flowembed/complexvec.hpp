#pragma once

#include <complex>
#include <cstddef>
#include <vector>

namespace flowembed {

using Complex = std::complex<double>;
using CVec = std::vector<Complex>;

inline bool is_finite(Complex z) {
    return std::isfinite(z.real()) && std::isfinite(z.imag());
}

bool all_finite(const CVec& v);

/// Infinity norm: max over components of the complex modulus.
double inf_norm(const CVec& v);

/// Infinity-norm distance between two vectors of equal length.
double inf_dist(const CVec& a, const CVec& b);

CVec sub(const CVec& a, const CVec& b);

void scale_inplace(CVec& v, Complex factor);

/// Neumaier-compensated accumulator for complex vectors. Real and
/// imaginary parts carry separate compensation terms, so alternating
/// sums with heavy cancellation stay accurate to the last few ulps of
/// the true result.
class CompensatedCVec {
public:
    explicit CompensatedCVec(std::size_t n);

    /// Accumulates weight * term (component-wise).
    void add_scaled(const CVec& term, double weight);

    CVec value() const;

private:
    std::vector<double> re_, im_, re_c_, im_c_;
};

}  // namespace flowembed

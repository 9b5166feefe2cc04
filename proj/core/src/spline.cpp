#include "wflow/spline.hpp"

#include <cmath>
#include <cstddef>
#include <stdexcept>

namespace wflow {

CubicSpline::CubicSpline(double a, double dx, std::vector<double> y)
    : a_(a), dx_(dx), y_(std::move(y)) {
    const size_t n = y_.size();
    if (n < 4) throw std::invalid_argument("spline needs at least 4 samples");
    if (!(dx_ > 0.0)) throw std::invalid_argument("spline spacing must be positive");

    // Tridiagonal solve for the natural second derivatives (Thomas).
    m_.assign(n, 0.0);
    std::vector<double> c(n, 0.0), d(n, 0.0);
    c[0] = 0.0;
    d[0] = 0.0;
    for (size_t i = 1; i + 1 < n; ++i) {
        const double rhs = 6.0 * (y_[i + 1] - 2.0 * y_[i] + y_[i - 1]) / (dx_ * dx_);
        const double denom = 4.0 - c[i - 1];
        c[i] = 1.0 / denom;
        d[i] = (rhs - d[i - 1]) / denom;
    }
    for (size_t i = n - 1; i-- > 1;) m_[i] = d[i] - c[i] * m_[i + 1];
}

double CubicSpline::operator()(double x) const {
    const double bknot = b();
    if (x < a_ || x > bknot) return 0.0;
    const size_t n = y_.size();
    double s = (x - a_) / dx_;
    size_t i = static_cast<size_t>(s);
    if (i >= n - 1) i = n - 2;
    const double t = s - static_cast<double>(i);
    const double u = 1.0 - t;
    const double h2 = dx_ * dx_ / 6.0;
    return u * y_[i] + t * y_[i + 1] +
           h2 * ((u * u * u - u) * m_[i] + (t * t * t - t) * m_[i + 1]);
}

} // namespace wflow

#pragma once

#include <vector>

namespace wflow {

// Natural cubic spline on a uniform grid. Evaluation outside [a, b] returns
// zero; states handed to it are decayed below the solver's boundary
// threshold there, which is what the Wigner shift products rely on.
class CubicSpline {
  public:
    CubicSpline() = default;
    CubicSpline(double a, double dx, std::vector<double> y);

    double operator()(double x) const;

    double a() const { return a_; }
    double b() const { return a_ + dx_ * (static_cast<double>(y_.size()) - 1.0); }

  private:
    double a_ = 0.0, dx_ = 1.0;
    std::vector<double> y_;
    std::vector<double> m_; // second derivatives at the knots
};

} // namespace wflow

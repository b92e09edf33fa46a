#pragma once

#include <cstddef>
#include <vector>

namespace singheat {

// Local cubic (4-point Lagrange) interpolation on a sorted strictly
// increasing abscissa table. Out-of-range queries are the caller's business;
// eval() clamps to the end intervals (callers that need tail extrapolation
// handle it themselves before calling).
class CubicTable {
  public:
    CubicTable() = default;
    CubicTable(std::vector<double> x, std::vector<double> y);

    double operator()(double x) const;
    bool empty() const { return x_.empty(); }
    const std::vector<double>& x() const { return x_; }
    const std::vector<double>& y() const { return y_; }
    double x_front() const { return x_.front(); }
    double x_back() const { return x_.back(); }

  private:
    std::vector<double> x_, y_;
};

// log-spaced grid from a to b inclusive (a, b > 0)
std::vector<double> log_grid(double a, double b, int n);

} // namespace singheat

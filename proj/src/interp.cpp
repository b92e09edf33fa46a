#include "singheat/interp.hpp"

#include <algorithm>
#include <cmath>

#include "singheat/errors.hpp"

namespace singheat {

CubicTable::CubicTable(std::vector<double> x, std::vector<double> y)
    : x_(std::move(x)), y_(std::move(y)) {
    if (x_.size() != y_.size() || x_.size() < 4)
        throw config_error("CubicTable: need >= 4 matching points");
    for (size_t i = 1; i < x_.size(); ++i)
        if (!(x_[i] > x_[i - 1])) throw config_error("CubicTable: abscissae must increase");
}

double CubicTable::operator()(double x) const {
    const size_t n = x_.size();
    size_t j = std::upper_bound(x_.begin(), x_.end(), x) - x_.begin();
    // choose a 4-point stencil [i, i+3] with x in the middle interval
    size_t i = (j >= 2) ? j - 2 : 0;
    if (i + 3 >= n) i = n - 4;
    const double* xs = &x_[i];
    const double* ys = &y_[i];
    double out = 0.0;
    for (int k = 0; k < 4; ++k) {
        double lk = 1.0;
        for (int l = 0; l < 4; ++l)
            if (l != k) lk *= (x - xs[l]) / (xs[k] - xs[l]);
        out += lk * ys[k];
    }
    return out;
}

std::vector<double> log_grid(double a, double b, int n) {
    if (!(a > 0.0) || !(b > a) || n < 2) throw config_error("log_grid: bad arguments");
    std::vector<double> g(n);
    const double la = std::log(a), lb = std::log(b);
    for (int i = 0; i < n; ++i) g[i] = std::exp(la + (lb - la) * i / (n - 1));
    g.front() = a;
    g.back() = b;
    return g;
}

} // namespace singheat

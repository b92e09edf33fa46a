#include "singheat/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <queue>

#include "singheat/errors.hpp"

namespace singheat {

namespace {

GaussRule make_rule(int n) {
    // Golub-Welsch via Newton on Legendre polynomials; plenty accurate for
    // the small orders used here.
    GaussRule r;
    r.x.resize(n);
    r.w.resize(n);
    for (int i = 0; i < (n + 1) / 2; ++i) {
        double x = std::cos(M_PI * (i + 0.75) / (n + 0.5));
        double pp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = x;
            for (int k = 2; k <= n; ++k) {
                const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            pp = n * (x * p1 - p0) / (x * x - 1.0);
            const double dx = p1 / pp;
            x -= dx;
            if (std::fabs(dx) < 1e-16) break;
        }
        r.x[i] = -x;
        r.x[n - 1 - i] = x;
        const double w = 2.0 / ((1.0 - x * x) * pp * pp);
        r.w[i] = w;
        r.w[n - 1 - i] = w;
    }
    return r;
}

// Gauss-Kronrod 7-15 nodes (positive half) and weights, standard values.
const double kGK_x[8] = {0.991455371120812639206854697526329,
                         0.949107912342758524526189684047851,
                         0.864864423359769072789712788640926,
                         0.741531185599394439863864773280788,
                         0.586087235467691130294144838258730,
                         0.405845151377397166906606412076961,
                         0.207784955007898467600689403773245,
                         0.000000000000000000000000000000000};
const double kGK_wk[8] = {0.022935322010529224963732008058970,
                          0.063092092629978553290700663189204,
                          0.104790010322250183839876322541518,
                          0.140653259715525918745189590510238,
                          0.169004726639267902826583426598550,
                          0.190350578064785409913256402421014,
                          0.204432940075298892414161999234649,
                          0.209482141084727828012999174891714};
const double kGK_wg[4] = {0.129484966168869693270611432679082,
                          0.279705391489276667901467771423780,
                          0.381830050505118944950369775488975,
                          0.417959183673469387755102040816327};

struct Panel {
    double a, b, value, error;
};

Panel gk15(const std::function<double(double)>& f, double a, double b) {
    const double c = 0.5 * (a + b), h = 0.5 * (b - a);
    double resk = 0.0, resg = 0.0;
    const double fc = f(c);
    resk += kGK_wk[7] * fc;
    resg += kGK_wg[3] * fc;
    for (int j = 0; j < 7; ++j) {
        const double f1 = f(c - h * kGK_x[j]);
        const double f2 = f(c + h * kGK_x[j]);
        resk += kGK_wk[j] * (f1 + f2);
        if (j % 2 == 1) resg += kGK_wg[j / 2] * (f1 + f2);
    }
    Panel p;
    p.a = a;
    p.b = b;
    p.value = resk * h;
    const double diff = std::fabs((resk - resg) * h);
    // standard QUADPACK-style error sharpening
    p.error = diff;
    if (diff > 0.0) {
        double resabs = 0.0;
        // cheap scale proxy: |value|
        resabs = std::fabs(p.value) + diff;
        const double scaled = std::pow(200.0 * diff / (resabs + 1e-300), 1.5) * resabs;
        p.error = std::min(diff, scaled);
        p.error = std::max(p.error, diff * 1e-6);
    }
    return p;
}

} // namespace

const GaussRule& gauss_rule(int n) {
    static std::map<int, GaussRule> cache;
    auto it = cache.find(n);
    if (it == cache.end()) it = cache.emplace(n, make_rule(n)).first;
    return it->second;
}

double gauss_panel(const std::function<double(double)>& f, double a, double b, int n) {
    const GaussRule& r = gauss_rule(n);
    const double c = 0.5 * (a + b), h = 0.5 * (b - a);
    double s = 0.0;
    for (int i = 0; i < n; ++i) s += r.w[i] * f(c + h * r.x[i]);
    return s * h;
}

QuadResult integrate_adaptive(const std::function<double(double)>& f, double a, double b,
                              double abs_tol, double rel_tol, const std::vector<double>& breaks,
                              int max_panels) {
    QuadResult out;
    if (!(b > a)) {
        out.converged = true;
        return out;
    }
    auto cmp = [](const Panel& l, const Panel& r) { return l.error < r.error; };
    std::priority_queue<Panel, std::vector<Panel>, decltype(cmp)> q(cmp);

    std::vector<double> pts;
    pts.push_back(a);
    for (double x : breaks)
        if (x > a && x < b) pts.push_back(x);
    pts.push_back(b);
    std::sort(pts.begin(), pts.end());
    pts.erase(std::unique(pts.begin(), pts.end()), pts.end());

    double total = 0.0, err = 0.0;
    int evals = 0;
    for (size_t i = 0; i + 1 < pts.size(); ++i) {
        Panel p = gk15(f, pts[i], pts[i + 1]);
        evals += 15;
        total += p.value;
        err += p.error;
        q.push(p);
    }
    int n_panels = static_cast<int>(pts.size()) - 1;
    while (err > abs_tol + rel_tol * std::fabs(total) && n_panels < max_panels && !q.empty()) {
        Panel p = q.top();
        q.pop();
        if (p.b - p.a < 1e-15 * (std::fabs(p.a) + std::fabs(p.b)) + 1e-300) {
            // cannot subdivide further; accept its error
            continue;
        }
        const double m = 0.5 * (p.a + p.b);
        Panel l = gk15(f, p.a, m), r = gk15(f, m, p.b);
        evals += 30;
        total += l.value + r.value - p.value;
        err += l.error + r.error - p.error;
        q.push(l);
        q.push(r);
        ++n_panels;
    }
    out.value = total;
    out.error = err;
    out.evals = evals;
    out.converged = err <= abs_tol + rel_tol * std::fabs(total);
    return out;
}

} // namespace singheat

#include "infgeo/numeric.hpp"

#include <cmath>

#include "infgeo/errors.hpp"

namespace infgeo {

namespace fd {

Vector gradient(const ScalarFn& f, const Vector& x) {
    Vector g(x.size());
    Vector xp = x, xm = x;
    for (Index i = 0; i < x.size(); ++i) {
        const double h = gradient_step(x[i]);
        xp[i] = x[i] + h;
        xm[i] = x[i] - h;
        g[i] = (f(xp) - f(xm)) / (2.0 * h);
        xp[i] = x[i];
        xm[i] = x[i];
    }
    return g;
}

Matrix hessian(const ScalarFn& f, const Vector& x) {
    const Index n = x.size();
    Matrix h(n, n);
    const double f0 = f(x);
    Vector w = x;
    for (Index i = 0; i < n; ++i) {
        const double hi = hessian_step(x[i]);
        // Diagonal: standard central second difference.
        w[i] = x[i] + hi;
        const double fp = f(w);
        w[i] = x[i] - hi;
        const double fm = f(w);
        w[i] = x[i];
        h(i, i) = (fp - 2.0 * f0 + fm) / (hi * hi);
        // Off-diagonal: four-point cross difference, filled for j > i and
        // mirrored so the result is exactly symmetric.
        for (Index j = i + 1; j < n; ++j) {
            const double hj = hessian_step(x[j]);
            w[i] = x[i] + hi; w[j] = x[j] + hj;
            const double fpp = f(w);
            w[j] = x[j] - hj;
            const double fpm = f(w);
            w[i] = x[i] - hi; w[j] = x[j] + hj;
            const double fmp = f(w);
            w[j] = x[j] - hj;
            const double fmm = f(w);
            w[i] = x[i]; w[j] = x[j];
            h(i, j) = (fpp - fpm - fmp + fmm) / (4.0 * hi * hj);
            h(j, i) = h(i, j);
        }
    }
    return h;
}

Matrix jacobian(const VectorFn& f, const Vector& x, double step_scale) {
    const Index n = x.size();
    Vector fx = f(x);
    Matrix j(fx.size(), n);
    Vector xp = x, xm = x;
    for (Index k = 0; k < n; ++k) {
        const double h = step_scale * (1.0 + std::abs(x[k]));
        xp[k] = x[k] + h;
        xm[k] = x[k] - h;
        j.col(k) = (f(xp) - f(xm)) / (2.0 * h);
        xp[k] = x[k];
        xm[k] = x[k];
    }
    return j;
}

Matrix matrix_partial(const MatrixFn& g, const Vector& x, Index l, double step_scale) {
    const double h = step_scale * (1.0 + std::abs(x[l]));
    Vector xp = x, xm = x;
    xp[l] += h;
    xm[l] -= h;
    return (g(xp) - g(xm)) / (2.0 * h);
}

}  // namespace fd

double simpson(const std::vector<double>& values, double step) {
    const std::size_t n = values.size();
    if (n == 0) return 0.0;
    if (n == 1) return 0.0;
    if (n == 2) return 0.5 * step * (values[0] + values[1]);

    std::size_t intervals = n - 1;
    double total = 0.0;
    std::size_t last = intervals;
    if (intervals % 2 != 0) {
        if (intervals < 3) {
            return 0.5 * step * (values[0] + values[1]);
        }
        // Odd interval count: close with Simpson 3/8 on the final three.
        last = intervals - 3;
        const std::size_t b = last;
        total += 3.0 * step / 8.0 *
                 (values[b] + 3.0 * values[b + 1] + 3.0 * values[b + 2] + values[b + 3]);
    }
    for (std::size_t i = 0; i + 2 <= last; i += 2) {
        total += step / 3.0 * (values[i] + 4.0 * values[i + 1] + values[i + 2]);
    }
    return total;
}

}  // namespace infgeo

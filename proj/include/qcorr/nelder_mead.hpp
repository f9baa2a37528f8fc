#pragma once

#include <algorithm>
#include <functional>
#include <stdexcept>
#include <vector>

namespace qcorr {

struct SimplexOptions {
    double reflection = 1.0;
    double expansion = 2.0;
    double contraction = 0.5;
    double shrink = 0.5;
    int max_iterations = 200;
    double f_tolerance = 1e-10;
    double initial_step = 0.25;
};

struct SimplexResult {
    std::vector<double> x;
    double value = 0.0;
    int iterations = 0;
};

/// Deterministic Nelder-Mead minimization. The initial simplex is the start
/// point plus one axis step per coordinate.
inline SimplexResult nelder_mead_minimize(const std::function<double(const std::vector<double>&)>& f,
                                          const std::vector<double>& start,
                                          const SimplexOptions& opt = {}) {
    const std::size_t d = start.size();
    if (d == 0) throw std::invalid_argument("nelder_mead_minimize: empty start point");

    std::vector<std::vector<double>> xs(d + 1, start);
    for (std::size_t i = 0; i < d; ++i) xs[i + 1][i] += opt.initial_step;
    std::vector<double> fs(d + 1);
    for (std::size_t i = 0; i <= d; ++i) fs[i] = f(xs[i]);

    std::vector<std::size_t> order(d + 1);
    int iter = 0;
    for (; iter < opt.max_iterations; ++iter) {
        for (std::size_t i = 0; i <= d; ++i) order[i] = i;
        std::stable_sort(order.begin(), order.end(),
                         [&](std::size_t a, std::size_t b) { return fs[a] < fs[b]; });

        const double spread = fs[order[d]] - fs[order[0]];
        if (spread < opt.f_tolerance) break;

        std::vector<double> centroid(d, 0.0);
        for (std::size_t i = 0; i < d; ++i)
            for (std::size_t k = 0; k < d; ++k) centroid[k] += xs[order[i]][k] / static_cast<double>(d);

        const std::size_t worst = order[d];
        auto blend = [&](double coef) {
            std::vector<double> x(d);
            for (std::size_t k = 0; k < d; ++k)
                x[k] = centroid[k] + coef * (centroid[k] - xs[worst][k]);
            return x;
        };

        std::vector<double> xr = blend(opt.reflection);
        const double fr = f(xr);
        if (fr < fs[order[0]]) {
            std::vector<double> xe = blend(opt.reflection * opt.expansion);
            const double fe = f(xe);
            if (fe < fr) {
                xs[worst] = std::move(xe);
                fs[worst] = fe;
            } else {
                xs[worst] = std::move(xr);
                fs[worst] = fr;
            }
            continue;
        }
        if (fr < fs[order[d - 1]]) {
            xs[worst] = std::move(xr);
            fs[worst] = fr;
            continue;
        }
        const bool outside = fr < fs[worst];
        std::vector<double> xc = blend(outside ? opt.reflection * opt.contraction : -opt.contraction);
        const double fc = f(xc);
        if (fc < std::min(fr, fs[worst])) {
            xs[worst] = std::move(xc);
            fs[worst] = fc;
            continue;
        }
        for (std::size_t i = 1; i <= d; ++i) {
            const std::size_t idx = order[i];
            for (std::size_t k = 0; k < d; ++k)
                xs[idx][k] = xs[order[0]][k] + opt.shrink * (xs[idx][k] - xs[order[0]][k]);
            fs[idx] = f(xs[idx]);
        }
    }

    std::size_t best = 0;
    for (std::size_t i = 1; i <= d; ++i)
        if (fs[i] < fs[best]) best = i;
    return SimplexResult{xs[best], fs[best], iter};
}

} // namespace qcorr

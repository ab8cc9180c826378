#include "eoelab/optim.hpp"

#include <algorithm>
#include <cmath>

namespace eoelab::optim {

SimplexResult nelder_mead(const std::function<double(const std::vector<double>&)>& f,
                          std::vector<double> x0, const SimplexOptions& options) {
    const std::size_t n = x0.size();
    SimplexResult result;

    std::vector<std::vector<double>> simplex;
    simplex.reserve(n + 1);
    simplex.push_back(x0);
    for (std::size_t i = 0; i < n; ++i) {
        auto v = x0;
        const double step = options.initial_step * std::max(1.0, std::fabs(v[i]));
        v[i] += step;
        simplex.push_back(std::move(v));
    }

    std::vector<double> fv(n + 1);
    for (std::size_t i = 0; i <= n; ++i) {
        fv[i] = f(simplex[i]);
        ++result.evaluations;
    }

    std::vector<std::size_t> order(n + 1);
    auto sort_simplex = [&] {
        for (std::size_t i = 0; i <= n; ++i) order[i] = i;
        std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return fv[a] < fv[b]; });
    };

    std::vector<double> centroid(n), xr(n), xe(n), xc(n);
    while (result.evaluations < options.max_evaluations) {
        sort_simplex();
        const std::size_t best = order[0];
        const std::size_t worst = order[n];
        const std::size_t second_worst = order[n - 1];

        const double spread = std::fabs(fv[worst] - fv[best]);
        const double scale = std::max({1.0, std::fabs(fv[best]), std::fabs(fv[worst])});
        if (spread <= options.relative_tolerance * scale) {
            result.converged = true;
            break;
        }

        for (std::size_t j = 0; j < n; ++j) {
            double sum = 0.0;
            for (std::size_t i = 0; i <= n; ++i)
                if (i != worst) sum += simplex[i][j];
            centroid[j] = sum / static_cast<double>(n);
        }

        auto affine = [&](std::vector<double>& out, double coef) {
            for (std::size_t j = 0; j < n; ++j)
                out[j] = centroid[j] + coef * (simplex[worst][j] - centroid[j]);
        };

        affine(xr, -1.0);  // reflection
        const double fr = f(xr);
        ++result.evaluations;

        if (fr < fv[best]) {
            affine(xe, -2.0);  // expansion
            const double fe = f(xe);
            ++result.evaluations;
            if (fe < fr) {
                simplex[worst] = xe;
                fv[worst] = fe;
            } else {
                simplex[worst] = xr;
                fv[worst] = fr;
            }
        } else if (fr < fv[second_worst]) {
            simplex[worst] = xr;
            fv[worst] = fr;
        } else {
            const bool outside = fr < fv[worst];
            affine(xc, outside ? -0.5 : 0.5);  // contraction
            const double fc = f(xc);
            ++result.evaluations;
            if (fc < std::min(fr, fv[worst])) {
                simplex[worst] = xc;
                fv[worst] = fc;
            } else {
                // shrink toward the best vertex
                for (std::size_t i = 0; i <= n; ++i) {
                    if (i == best) continue;
                    for (std::size_t j = 0; j < n; ++j)
                        simplex[i][j] = simplex[best][j] + 0.5 * (simplex[i][j] - simplex[best][j]);
                    fv[i] = f(simplex[i]);
                    ++result.evaluations;
                }
            }
        }
    }

    sort_simplex();
    result.x = simplex[order[0]];
    result.fx = fv[order[0]];
    return result;
}

}  // namespace eoelab::optim

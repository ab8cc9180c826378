#pragma once

#include <functional>
#include <vector>

namespace eoelab::optim {

struct SimplexResult {
    std::vector<double> x;
    double fx = 0.0;
    std::size_t evaluations = 0;
    bool converged = false;
};

struct SimplexOptions {
    double relative_tolerance = 1e-9;
    std::size_t max_evaluations = 10000;
    double initial_step = 0.1;  // per-coordinate simplex edge, scaled by |x0|
};

// Nelder-Mead downhill simplex. Stops when the relative spread of function
// values across the simplex drops below relative_tolerance, or when the
// evaluation budget runs out (converged = false in that case).
SimplexResult nelder_mead(const std::function<double(const std::vector<double>&)>& f,
                          std::vector<double> x0, const SimplexOptions& options = {});

}  // namespace eoelab::optim

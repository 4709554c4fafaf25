#pragma once

#include <vector>

namespace idest {

/// Weighted least squares  min Σ w_k (y_k − c − Σ_{d=1..ℓ} η_d x_k^d)².
struct WlsProblem {
    std::vector<double> xs;
    std::vector<double> ys;
    std::vector<double> weights;
    int degree = 2;
};

struct WlsSolution {
    double intercept = 0.0;        // value of the fitted polynomial at x = 0
    std::vector<double> eta;       // coefficients of x^1 .. x^ℓ
    double residualSum = 0.0;      // weighted objective at the solution
    double conditionEstimate = 0.0;
};

/// Solves a WlsProblem through an SVD of the weighted design matrix built on
/// standardized x. Coefficients are mapped back to the original x.
///
/// Throws ConfigError on malformed input (length mismatch, too few rows,
/// non-positive weights, degree < 1) and RankDeficient when the smallest
/// singular value falls below 1e-10 of the largest.
WlsSolution solveWls(const WlsProblem& problem);

namespace detail {

/// Same solver without the degree >= 1 / row-count requirement; degree 0
/// yields the weighted mean.
WlsSolution fitWeightedPolynomial(const std::vector<double>& xs, const std::vector<double>& ys,
                                  const std::vector<double>& weights, int degree);

} // namespace detail

} // namespace idest

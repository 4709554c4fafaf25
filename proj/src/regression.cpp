#include <idest/regression.h>
#include <idest/core.h>

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <string>

namespace idest {

namespace {

constexpr double kRankTolerance = 1e-10;

double binomial(int n, int k) {
    double r = 1.0;
    for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
    return r;
}

} // namespace

namespace detail {

WlsSolution fitWeightedPolynomial(const std::vector<double>& xs, const std::vector<double>& ys,
                                  const std::vector<double>& weights, int degree) {
    const std::size_t rows = xs.size();
    if (ys.size() != rows || weights.size() != rows) {
        throw ConfigError("xs, ys and weights must have equal length");
    }
    if (degree < 0) throw ConfigError("degree must be >= 0");
    if (rows < static_cast<std::size_t>(degree) + 1) {
        throw RankDeficient("need at least degree+1 rows");
    }
    double maxWeight = 0.0;
    for (double w : weights) {
        if (!(w > 0.0) || !std::isfinite(w)) throw ConfigError("weights must be finite and > 0");
        maxWeight = std::max(maxWeight, w);
    }

    // Affine standardization z = (x - center) / scale.
    double center = 0.0;
    for (double x : xs) center += x;
    center /= static_cast<double>(rows);
    double scale = 0.0;
    for (double x : xs) scale = std::max(scale, std::abs(x - center));
    if (degree > 0 && scale == 0.0) throw RankDeficient("all x values identical");
    if (scale == 0.0) scale = 1.0;

    const int cols = degree + 1;
    Eigen::MatrixXd design(rows, cols);
    Eigen::VectorXd rhs(rows);
    for (std::size_t r = 0; r < rows; ++r) {
        const double sw = std::sqrt(weights[r] / maxWeight);
        const double z = (xs[r] - center) / scale;
        double zp = 1.0;
        for (int c = 0; c < cols; ++c) {
            design(static_cast<Eigen::Index>(r), c) = sw * zp;
            zp *= z;
        }
        rhs(static_cast<Eigen::Index>(r)) = sw * ys[r];
    }

    Eigen::JacobiSVD<Eigen::MatrixXd> svd(design, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const auto& sv = svd.singularValues();
    const double largest = sv(0);
    const double smallest = sv(cols - 1);
    if (!(largest > 0.0) || smallest < kRankTolerance * largest) {
        throw RankDeficient("design matrix numerical rank < " + std::to_string(cols));
    }
    const Eigen::VectorXd zCoef = svd.solve(rhs);

    // Expand Σ_j b_j ((x - c)/s)^j into powers of x.
    std::vector<double> coef(cols, 0.0);
    for (int j = 0; j < cols; ++j) {
        const double bj = zCoef(j) / std::pow(scale, j);
        for (int i = 0; i <= j; ++i) {
            coef[i] += bj * binomial(j, i) * std::pow(-center, j - i);
        }
    }

    WlsSolution sol;
    sol.intercept = coef[0];
    sol.eta.assign(coef.begin() + 1, coef.end());
    sol.conditionEstimate = largest / smallest;
    double rss = 0.0;
    for (std::size_t r = 0; r < rows; ++r) {
        double fit = 0.0;
        for (int c = cols - 1; c >= 0; --c) fit = fit * xs[r] + coef[c];
        const double e = ys[r] - fit;
        rss += weights[r] * e * e;
    }
    sol.residualSum = rss;
    return sol;
}

} // namespace detail

WlsSolution solveWls(const WlsProblem& problem) {
    if (problem.degree < 1) throw ConfigError("degree must be >= 1");
    if (problem.xs.size() < static_cast<std::size_t>(problem.degree) + 2) {
        throw ConfigError("need at least degree+2 rows, got " + std::to_string(problem.xs.size()));
    }
    return detail::fitWeightedPolynomial(problem.xs, problem.ys, problem.weights, problem.degree);
}

} // namespace idest

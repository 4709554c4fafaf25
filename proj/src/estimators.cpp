#include <idest/estimators.h>
#include <idest/parallel.h>
#include <idest/regression.h>

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <string>

namespace idest {

// -----------------------------------------------------------------------------
// MLE
// -----------------------------------------------------------------------------

namespace detail {

std::optional<double> tryMleFixedK(std::span<const double> distances, int k, double duplicateEpsilon) {
    const double tk = distances[static_cast<std::size_t>(k - 1)];
    if (!(tk > 0.0)) return std::nullopt;
    const double floor = duplicateEpsilon * tk;
    double sum = 0.0;
    for (int j = 0; j < k - 1; ++j) {
        const double tj = std::max(distances[static_cast<std::size_t>(j)], floor);
        sum += std::log(tk / tj);
    }
    if (!(sum > 0.0)) return std::nullopt;
    return static_cast<double>(k - 1) / sum;
}

} // namespace detail

double mleFixedK(std::span<const double> distances, int k, double duplicateEpsilon) {
    if (k < 2) throw ConfigError("k >= 2 required");
    if (distances.size() < static_cast<std::size_t>(k)) {
        throw ConfigError("row has " + std::to_string(distances.size()) + " distances, need " +
                          std::to_string(k));
    }
    if (auto m = detail::tryMleFixedK(distances, k, duplicateEpsilon)) return *m;
    throw DegenerateNeighborhood("T_k is zero or all T_j equal T_k (k=" + std::to_string(k) + ")");
}

double mleFixedRadius(const PointCloud& cloud, std::span<const double> x, double radius,
                      double duplicateEpsilon, std::optional<std::size_t> selfIndex) {
    if (!(radius > 0.0)) throw ConfigError("radius must be > 0");
    const auto ranked = rankByDistance(cloud, x, selfIndex);
    const double floor = duplicateEpsilon * radius;
    std::size_t count = 0;
    double sum = 0.0;
    for (const auto& nb : ranked) {
        if (nb.distance > radius) break;
        ++count;
        sum += std::log(radius / std::max(nb.distance, floor));
    }
    if (count == 0) throw EmptyBall("no sample within radius " + std::to_string(radius));
    if (!(sum > 0.0)) throw DegenerateNeighborhood("all neighbors lie on the ball boundary");
    return static_cast<double>(count) / sum;
}

EstimateReport mleDataset(const PointCloud& cloud, const MleConfig& cfg, unsigned threads) {
    if (cfg.k < 2) throw ConfigError("k >= 2 required");
    if (static_cast<std::size_t>(cfg.k) >= cloud.size()) {
        throw ConfigError("k < n required (k=" + std::to_string(cfg.k) + ", n=" +
                          std::to_string(cloud.size()) + ")");
    }
    const auto table = knnSelf(cloud, static_cast<std::size_t>(cfg.k), threads);

    EstimateReport report;
    report.method = Method::MLE;
    report.config = cfg;
    double sum = 0.0;
    for (std::size_t i = 0; i < cloud.size(); ++i) {
        const auto row = table.distances(i);
        const auto m = detail::tryMleFixedK(row, cfg.k, cfg.duplicateEpsilon);
        if (!m) {
            report.failures.push_back({i, "DegenerateNeighborhood"});
            continue;
        }
        PointDiagnostics diag;
        diag.pointIndex = i;
        diag.localEstimate = *m;
        diag.perK.push_back({cfg.k, row[static_cast<std::size_t>(cfg.k - 1)], *m, 0.0});
        report.perPoint.push_back(std::move(diag));
        sum += cfg.aggregation == MleAggregation::Mean ? *m : 1.0 / *m;
    }
    if (report.perPoint.empty()) throw AllPointsFailed("no point produced an MLE estimate");
    const double mean = sum / static_cast<double>(report.perPoint.size());
    report.globalEstimate = cfg.aggregation == MleAggregation::Mean ? mean : 1.0 / mean;
    return report;
}

// -----------------------------------------------------------------------------
// GeoMLE
// -----------------------------------------------------------------------------

namespace detail {

Resampler bootstrapResampler(Rng& rng) {
    return [&rng](std::vector<std::uint32_t>& counts) {
        std::fill(counts.begin(), counts.end(), 0u);
        const std::uint64_t n = counts.size();
        for (std::uint64_t draw = 0; draw < n; ++draw) ++counts[rng.below(n)];
    };
}

BootstrapCurve bootstrapCurve(const std::vector<Neighbor>& ranked, std::size_t sampleCount,
                              const GeoMleConfig& cfg, const Resampler& resample) {
    const int span = cfg.k2 - cfg.k1 + 1;
    const auto k2 = static_cast<std::size_t>(cfg.k2);

    // cells[k - k1] collects (T_k, m̂_k) over surviving replicates.
    std::vector<std::vector<std::pair<double, double>>> cells(static_cast<std::size_t>(span));
    std::vector<std::uint32_t> counts(sampleCount);
    std::vector<double> row;
    row.reserve(k2);
    BootstrapCurve curve;

    for (int rep = 0; rep < cfg.bootstrapCount; ++rep) {
        resample(counts);
        row.clear();
        for (const auto& nb : ranked) {
            for (std::uint32_t c = counts[nb.index]; c > 0 && row.size() < k2; --c) {
                row.push_back(nb.distance);
            }
            if (row.size() == k2) break;
        }
        if (row.size() < k2) {
            curve.droppedCells += span;
            continue;
        }
        for (int k = cfg.k1; k <= cfg.k2; ++k) {
            const auto m = tryMleFixedK(row, k, cfg.duplicateEpsilon);
            if (!m) {
                ++curve.droppedCells;
                continue;
            }
            cells[static_cast<std::size_t>(k - cfg.k1)].emplace_back(row[static_cast<std::size_t>(k - 1)], *m);
        }
    }

    for (int k = cfg.k1; k <= cfg.k2; ++k) {
        const auto& c = cells[static_cast<std::size_t>(k - cfg.k1)];
        if (c.empty()) continue;
        const auto count = static_cast<double>(c.size());
        double tSum = 0.0, mSum = 0.0;
        for (const auto& [t, m] : c) {
            tSum += t;
            mSum += m;
        }
        const double mMean = mSum / count;
        double ss = 0.0;
        for (const auto& [t, m] : c) ss += (m - mMean) * (m - mMean);
        curve.perK.push_back({k, tSum / count, mMean, ss / count});
    }
    return curve;
}

LocalFit fitLocalDimension(const std::vector<KStatistics>& perK, int degree, double varianceFloor) {
    if (perK.size() < static_cast<std::size_t>(degree) + (degree > 0 ? 2 : 1)) {
        throw RankDeficient(std::to_string(perK.size()) + " usable k values for degree " +
                            std::to_string(degree));
    }
    std::vector<double> xs, ys, ws;
    xs.reserve(perK.size());
    ys.reserve(perK.size());
    ws.reserve(perK.size());
    for (const auto& s : perK) {
        xs.push_back(s.meanDistance);
        ys.push_back(s.meanEstimate);
        ws.push_back(1.0 / std::max(s.variance, varianceFloor));
    }
    const auto sol = fitWeightedPolynomial(xs, ys, ws, degree);
    return {sol.intercept, sol.eta};
}

} // namespace detail

PointDiagnostics geomlePoint(const PointCloud& cloud, std::span<const double> x,
                             std::optional<std::size_t> selfIndex, const GeoMleConfig& cfg, Rng& rng) {
    validateConfig(cfg, cloud);
    const auto ranked = rankByDistance(cloud, x, selfIndex);
    auto curve = detail::bootstrapCurve(ranked, cloud.size(), cfg, detail::bootstrapResampler(rng));
    const auto fit = detail::fitLocalDimension(curve.perK, cfg.degree, cfg.varianceFloor);

    PointDiagnostics diag;
    diag.pointIndex = selfIndex.value_or(0);
    diag.localEstimate = fit.intercept;
    diag.perK = std::move(curve.perK);
    diag.eta = fit.eta;
    diag.droppedCells = curve.droppedCells;
    return diag;
}

EstimateReport geomleDataset(const PointCloud& cloud, const GeoMleConfig& cfg, unsigned threads) {
    validateConfig(cfg, cloud);
    const std::size_t n = cloud.size();
    std::vector<std::optional<PointDiagnostics>> slots(n);
    std::vector<std::string> reasons(n);

    parallelFor(n, threads, [&](std::size_t i) {
        Rng rng(cfg.seed, i);
        try {
            slots[i] = geomlePoint(cloud, cloud.point(i), i, cfg, rng);
        } catch (const Error& e) {
            if (e.errorClass() != ErrorClass::Numerical) throw;
            reasons[i] = e.what();
        }
    });

    EstimateReport report;
    report.method = Method::GeoMLE;
    report.config = cfg;
    double sum = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        if (slots[i]) {
            sum += slots[i]->localEstimate;
            report.perPoint.push_back(std::move(*slots[i]));
        } else {
            report.failures.push_back({i, reasons[i]});
        }
    }
    if (report.perPoint.empty()) throw AllPointsFailed("GeoMLE failed at every point");
    report.globalEstimate = sum / static_cast<double>(report.perPoint.size());
    return report;
}

// -----------------------------------------------------------------------------
// PCA
// -----------------------------------------------------------------------------

EstimateReport pcaEstimate(const PointCloud& cloud, const PcaConfig& cfg) {
    const double threshold = cfg.explainedVarianceThreshold;
    if (!(threshold > 0.0 && threshold < 1.0)) {
        throw ConfigError("explained variance threshold must lie in (0, 1)");
    }
    const auto n = static_cast<Eigen::Index>(cloud.size());
    const auto p = static_cast<Eigen::Index>(cloud.dim());
    Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>> data(
        cloud.values().data(), n, p);
    const Eigen::RowVectorXd mean = data.colwise().mean();
    const Eigen::MatrixXd centered = data.rowwise() - mean;
    const Eigen::MatrixXd cov = (centered.transpose() * centered) / static_cast<double>(n - 1);

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(cov, Eigen::EigenvaluesOnly);
    std::vector<double> eig(solver.eigenvalues().data(), solver.eigenvalues().data() + p);
    for (double& e : eig) e = std::max(e, 0.0);
    std::sort(eig.begin(), eig.end(), std::greater<>());
    double total = 0.0;
    for (double e : eig) total += e;
    if (!(total > 0.0)) throw ZeroVariance("all points are identical");

    int dim = static_cast<int>(p);
    double captured = 0.0;
    for (std::size_t d = 0; d < eig.size(); ++d) {
        captured += eig[d];
        if (captured >= threshold * total) {
            dim = static_cast<int>(d + 1);
            break;
        }
    }

    EstimateReport report;
    report.method = Method::PCA;
    report.config = cfg;
    report.globalEstimate = dim;
    return report;
}

} // namespace idest

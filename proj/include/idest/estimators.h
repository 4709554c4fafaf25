#pragma once

#include <idest/core.h>
#include <idest/neighbors.h>
#include <idest/random.h>

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <vector>

namespace idest {

// =============================================================================
// Levina–Bickel MLE
// =============================================================================

/// Fixed-k MLE from a nondecreasing row T_1..T_k (at least k entries):
///   ((1/(k−1)) Σ_{j<k} log(T_k / T_j))⁻¹.
/// Any T_j below duplicateEpsilon·T_k is clamped to that value before the log.
/// Throws DegenerateNeighborhood when T_k <= 0 or every log ratio is zero.
double mleFixedK(std::span<const double> distances, int k, double duplicateEpsilon = 1e-12);

/// Fixed-radius MLE  ((1/N) Σ_{T_j <= R} log(R / T_j))⁻¹, N = count within R.
/// Throws EmptyBall when N = 0, DegenerateNeighborhood when the sum is zero.
double mleFixedRadius(const PointCloud& cloud, std::span<const double> x, double radius,
                      double duplicateEpsilon = 1e-12,
                      std::optional<std::size_t> selfIndex = std::nullopt);

/// Local fixed-k MLE at every sample point, pooled by cfg.aggregation.
/// Points with degenerate neighborhoods are excluded and listed in failures.
EstimateReport mleDataset(const PointCloud& cloud, const MleConfig& cfg, unsigned threads = 1);

// =============================================================================
// GeoMLE
// =============================================================================

/// Bootstrap-averaged MLE curve at x followed by the weighted polynomial fit;
/// localEstimate is the fitted intercept at zero distance.
/// `selfIndex` removes that sample from every replicate.
PointDiagnostics geomlePoint(const PointCloud& cloud, std::span<const double> x,
                             std::optional<std::size_t> selfIndex, const GeoMleConfig& cfg, Rng& rng);

/// geomlePoint at every sample, point i drawing from stream i of cfg.seed.
/// Output is identical for every thread count.
EstimateReport geomleDataset(const PointCloud& cloud, const GeoMleConfig& cfg, unsigned threads = 1);

// =============================================================================
// PCA baseline
// =============================================================================

/// Smallest d whose top-d covariance eigenvalues reach the explained-variance threshold.
EstimateReport pcaEstimate(const PointCloud& cloud, const PcaConfig& cfg);

namespace detail {

std::optional<double> tryMleFixedK(std::span<const double> distances, int k, double duplicateEpsilon);

/// Fills counts[i] with the multiplicity of sample i in one replicate.
using Resampler = std::function<void(std::vector<std::uint32_t>& counts)>;

/// n draws with replacement.
Resampler bootstrapResampler(Rng& rng);

struct BootstrapCurve {
    std::vector<KStatistics> perK;
    int droppedCells = 0;
};

/// Per-k replicate means and population variances from `ranked` (self already removed).
BootstrapCurve bootstrapCurve(const std::vector<Neighbor>& ranked, std::size_t sampleCount,
                              const GeoMleConfig& cfg, const Resampler& resample);

struct LocalFit {
    double intercept = 0.0;
    std::vector<double> eta;
};

/// Weighted fit of m̄_k on T̄_k with weights 1/max(σ̂_k², floor). Degree 0 is
/// accepted here and gives the weighted mean.
LocalFit fitLocalDimension(const std::vector<KStatistics>& perK, int degree, double varianceFloor);

} // namespace detail

} // namespace idest

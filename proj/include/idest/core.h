#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

namespace idest {

// =============================================================================
// Errors
// =============================================================================

/// Broad classes of failure; the CLI maps these onto exit codes.
enum class ErrorClass { Usage, Data, Numerical };

class Error : public std::runtime_error {
public:
    Error(ErrorClass cls, const std::string& what) : std::runtime_error(what), cls_(cls) {}
    ErrorClass errorClass() const noexcept { return cls_; }

private:
    ErrorClass cls_;
};

#define IDEST_DECLARE_ERROR(Name, Cls)                                                   \
    class Name : public Error {                                                          \
    public:                                                                              \
        explicit Name(const std::string& what) : Error(ErrorClass::Cls, #Name ": " + what) {} \
    }

IDEST_DECLARE_ERROR(ConfigError, Usage);
IDEST_DECLARE_ERROR(SpecError, Usage);
IDEST_DECLARE_ERROR(DataError, Data);
IDEST_DECLARE_ERROR(DimensionMismatch, Data);
IDEST_DECLARE_ERROR(KTooLarge, Usage);
IDEST_DECLARE_ERROR(MissingEntries, Data);
IDEST_DECLARE_ERROR(DegenerateNeighborhood, Numerical);
IDEST_DECLARE_ERROR(EmptyBall, Numerical);
IDEST_DECLARE_ERROR(RankDeficient, Numerical);
IDEST_DECLARE_ERROR(AllPointsFailed, Numerical);
IDEST_DECLARE_ERROR(ZeroVariance, Numerical);

#undef IDEST_DECLARE_ERROR

// =============================================================================
// PointCloud
// =============================================================================

/// n points in R^p, stored row-major. Immutable after construction.
class PointCloud {
public:
    /// Throws DataError unless n >= 2, p >= 1, values.size() == n*p and all values finite.
    PointCloud(std::size_t n, std::size_t p, std::vector<double> values, std::string label = {});

    /// Builds from a list of equally sized rows.
    static PointCloud fromRows(const std::vector<std::vector<double>>& rows, std::string label = {});

    std::size_t size() const noexcept { return n_; }
    std::size_t dim() const noexcept { return p_; }
    const std::string& label() const noexcept { return label_; }

    std::span<const double> point(std::size_t i) const noexcept {
        return {values_.data() + i * p_, p_};
    }
    std::span<const double> values() const noexcept { return values_; }

    bool operator==(const PointCloud&) const = default;

private:
    std::size_t n_;
    std::size_t p_;
    std::vector<double> values_;
    std::string label_;
};

/// Euclidean distance, sqrt of summed squared differences.
double euclidean(std::span<const double> a, std::span<const double> b) noexcept;

// =============================================================================
// Configuration
// =============================================================================

struct GeoMleConfig {
    int k1 = 10;
    int k2 = 40;
    int bootstrapCount = 20;
    int degree = 2;
    std::uint64_t seed = 0;
    double varianceFloor = 1e-10;
    double duplicateEpsilon = 1e-12;

    bool operator==(const GeoMleConfig&) const = default;
};

/// Throws ConfigError naming the first violated constraint.
void validateConfig(const GeoMleConfig& cfg, std::size_t n);
inline void validateConfig(const GeoMleConfig& cfg, const PointCloud& cloud) {
    validateConfig(cfg, cloud.size());
}

enum class MleAggregation { Mean, InverseMean };

struct MleConfig {
    int k = 20;
    MleAggregation aggregation = MleAggregation::Mean;
    double duplicateEpsilon = 1e-12;

    bool operator==(const MleConfig&) const = default;
};

struct PcaConfig {
    double explainedVarianceThreshold = 0.99;

    bool operator==(const PcaConfig&) const = default;
};

// =============================================================================
// Reports
// =============================================================================

enum class Method { MLE, GeoMLE, PCA };

std::string toString(Method m);
/// Accepts "mle", "geomle", "pca" in any case. Throws ConfigError otherwise.
Method parseMethod(const std::string& s);

std::string toString(MleAggregation a);
MleAggregation parseAggregation(const std::string& s);

struct KStatistics {
    int k = 0;
    double meanDistance = 0.0;   // T̄_k
    double meanEstimate = 0.0;   // m̄_k
    double variance = 0.0;       // σ̂_k²

    bool operator==(const KStatistics&) const = default;
};

struct PointDiagnostics {
    std::size_t pointIndex = 0;
    double localEstimate = 0.0;
    std::vector<KStatistics> perK;   // ascending in k
    std::vector<double> eta;         // GeoMLE only
    int droppedCells = 0;            // degenerate (replicate, k) cells

    bool operator==(const PointDiagnostics&) const = default;
};

struct PointFailure {
    std::size_t pointIndex = 0;
    std::string reason;

    bool operator==(const PointFailure&) const = default;
};

using MethodConfig = std::variant<MleConfig, GeoMleConfig, PcaConfig>;

struct EstimateReport {
    Method method = Method::MLE;
    double globalEstimate = 0.0;
    std::vector<PointDiagnostics> perPoint;
    std::vector<PointFailure> failures;
    MethodConfig config;

    bool operator==(const EstimateReport&) const = default;
};

} // namespace idest

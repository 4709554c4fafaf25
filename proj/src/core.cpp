#include <idest/core.h>

#include <algorithm>
#include <cctype>
#include <cmath>

namespace idest {

PointCloud::PointCloud(std::size_t n, std::size_t p, std::vector<double> values, std::string label)
    : n_(n), p_(p), values_(std::move(values)), label_(std::move(label)) {
    if (n_ < 2) {
        throw DataError("point cloud needs at least 2 points, got " + std::to_string(n_));
    }
    if (p_ < 1) {
        throw DataError("point cloud needs ambient dimension >= 1");
    }
    if (values_.size() != n_ * p_) {
        throw DataError("expected " + std::to_string(n_ * p_) + " coordinates, got " +
                        std::to_string(values_.size()));
    }
    for (std::size_t i = 0; i < values_.size(); ++i) {
        if (!std::isfinite(values_[i])) {
            throw DataError("non-finite coordinate at point " + std::to_string(i / p_) +
                            ", column " + std::to_string(i % p_));
        }
    }
}

PointCloud PointCloud::fromRows(const std::vector<std::vector<double>>& rows, std::string label) {
    if (rows.empty()) {
        throw DataError("point cloud has no rows");
    }
    const std::size_t p = rows.front().size();
    std::vector<double> values;
    values.reserve(rows.size() * p);
    for (std::size_t i = 0; i < rows.size(); ++i) {
        if (rows[i].size() != p) {
            throw DataError("row " + std::to_string(i) + " has " + std::to_string(rows[i].size()) +
                            " columns, expected " + std::to_string(p));
        }
        values.insert(values.end(), rows[i].begin(), rows[i].end());
    }
    return PointCloud(rows.size(), p, std::move(values), std::move(label));
}

double euclidean(std::span<const double> a, std::span<const double> b) noexcept {
    double sum = 0.0;
    for (std::size_t d = 0; d < a.size(); ++d) {
        const double diff = a[d] - b[d];
        sum += diff * diff;
    }
    return std::sqrt(sum);
}

void validateConfig(const GeoMleConfig& cfg, std::size_t n) {
    if (cfg.k1 < 2) throw ConfigError("2 <= k1 violated (k1=" + std::to_string(cfg.k1) + ")");
    if (cfg.k1 > cfg.k2) {
        throw ConfigError("k1 <= k2 violated (k1=" + std::to_string(cfg.k1) +
                          ", k2=" + std::to_string(cfg.k2) + ")");
    }
    if (static_cast<std::size_t>(cfg.k2) >= n) {
        throw ConfigError("k2 < n violated (k2=" + std::to_string(cfg.k2) +
                          ", n=" + std::to_string(n) + ")");
    }
    if (cfg.degree < 1) throw ConfigError("degree >= 1 violated");
    if (cfg.k2 - cfg.k1 + 1 < cfg.degree + 2) {
        throw ConfigError("k2-k1+1 >= degree+2 violated (" + std::to_string(cfg.k2 - cfg.k1 + 1) +
                          " regression points for degree " + std::to_string(cfg.degree) + ")");
    }
    if (cfg.bootstrapCount < 1) throw ConfigError("M >= 1 violated");
    if (!(cfg.varianceFloor > 0.0) || !std::isfinite(cfg.varianceFloor)) {
        throw ConfigError("variance_floor > 0 violated");
    }
    if (!(cfg.duplicateEpsilon > 0.0) || !std::isfinite(cfg.duplicateEpsilon)) {
        throw ConfigError("duplicate_epsilon > 0 violated");
    }
}

namespace {

std::string lower(std::string s) {
    std::transform(s.begin(), s.end(), s.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return s;
}

} // namespace

std::string toString(Method m) {
    switch (m) {
    case Method::MLE: return "MLE";
    case Method::GeoMLE: return "GeoMLE";
    case Method::PCA: return "PCA";
    }
    return "?";
}

Method parseMethod(const std::string& s) {
    const std::string l = lower(s);
    if (l == "mle") return Method::MLE;
    if (l == "geomle") return Method::GeoMLE;
    if (l == "pca") return Method::PCA;
    throw ConfigError("unknown method '" + s + "'");
}

std::string toString(MleAggregation a) {
    return a == MleAggregation::Mean ? "mean" : "inverse_mean";
}

MleAggregation parseAggregation(const std::string& s) {
    const std::string l = lower(s);
    if (l == "mean") return MleAggregation::Mean;
    if (l == "inverse_mean") return MleAggregation::InverseMean;
    throw ConfigError("unknown aggregation '" + s + "'");
}

} // namespace idest

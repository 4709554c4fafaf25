#pragma once

#include <idest/core.h>

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

namespace idest {

/// Per-query sorted distances to the k nearest sample points.
/// distance(i, j) is T_{j+1}(x_i); rows are ordered by (distance, sample index).
class NeighborTable {
public:
    NeighborTable(std::size_t queryCount, std::size_t kMax);

    std::size_t queryCount() const noexcept { return queries_; }
    std::size_t kMax() const noexcept { return k_; }

    double distance(std::size_t query, std::size_t j) const noexcept { return dist_[query * k_ + j]; }
    std::size_t index(std::size_t query, std::size_t j) const noexcept { return idx_[query * k_ + j]; }

    std::span<const double> distances(std::size_t query) const noexcept {
        return {dist_.data() + query * k_, k_};
    }
    std::span<const std::size_t> indices(std::size_t query) const noexcept {
        return {idx_.data() + query * k_, k_};
    }

    std::span<double> mutableDistances(std::size_t query) noexcept { return {dist_.data() + query * k_, k_}; }
    std::span<std::size_t> mutableIndices(std::size_t query) noexcept { return {idx_.data() + query * k_, k_}; }

    bool operator==(const NeighborTable&) const = default;

private:
    std::size_t queries_;
    std::size_t k_;
    std::vector<double> dist_;
    std::vector<std::size_t> idx_;
};

struct Neighbor {
    double distance;
    std::size_t index;
};

/// All sample points ranked by (distance to x, index). The sample at
/// `selfIndex`, if given, is left out.
std::vector<Neighbor> rankByDistance(const PointCloud& cloud, std::span<const double> x,
                                     std::optional<std::size_t> selfIndex = std::nullopt);

/// Exact Euclidean k-NN by brute force.
///
/// With excludeSelf, query i is taken to be sample i of `cloud` and that index
/// is skipped (duplicates of it at distance 0 are kept). Requires k < n in that
/// case and k <= n otherwise.
///
/// Throws DimensionMismatch, KTooLarge.
NeighborTable knn(const PointCloud& cloud, const PointCloud& queries, std::size_t k, bool excludeSelf,
                  unsigned threads = 1);

/// knn of the cloud against itself with self-exclusion.
inline NeighborTable knnSelf(const PointCloud& cloud, std::size_t k, unsigned threads = 1) {
    return knn(cloud, cloud, k, true, threads);
}

/// Number of samples within distance <= radius of x, not counting `selfIndex`.
std::size_t countWithinRadius(const PointCloud& cloud, std::span<const double> x, double radius,
                              std::optional<std::size_t> selfIndex = std::nullopt);

} // namespace idest

#include <idest/neighbors.h>
#include <idest/parallel.h>

#include <algorithm>
#include <string>

namespace idest {

namespace {

bool byDistanceThenIndex(const Neighbor& a, const Neighbor& b) {
    return a.distance < b.distance || (a.distance == b.distance && a.index < b.index);
}

void requireDim(const PointCloud& cloud, std::size_t p) {
    if (cloud.dim() != p) {
        throw DimensionMismatch("query has dimension " + std::to_string(p) + ", cloud has " +
                                std::to_string(cloud.dim()));
    }
}

std::vector<Neighbor> allDistances(const PointCloud& cloud, std::span<const double> x,
                                   std::optional<std::size_t> selfIndex) {
    std::vector<Neighbor> out;
    out.reserve(cloud.size());
    for (std::size_t i = 0; i < cloud.size(); ++i) {
        if (selfIndex && *selfIndex == i) continue;
        out.push_back({euclidean(x, cloud.point(i)), i});
    }
    return out;
}

} // namespace

NeighborTable::NeighborTable(std::size_t queryCount, std::size_t kMax)
    : queries_(queryCount), k_(kMax), dist_(queryCount * kMax, 0.0), idx_(queryCount * kMax, 0) {}

std::vector<Neighbor> rankByDistance(const PointCloud& cloud, std::span<const double> x,
                                     std::optional<std::size_t> selfIndex) {
    requireDim(cloud, x.size());
    auto out = allDistances(cloud, x, selfIndex);
    std::sort(out.begin(), out.end(), byDistanceThenIndex);
    return out;
}

NeighborTable knn(const PointCloud& cloud, const PointCloud& queries, std::size_t k, bool excludeSelf,
                  unsigned threads) {
    requireDim(cloud, queries.dim());
    const std::size_t n = cloud.size();
    if (k == 0) throw KTooLarge("k must be at least 1");
    if (excludeSelf ? k >= n : k > n) {
        throw KTooLarge("k=" + std::to_string(k) + " too large for n=" + std::to_string(n) +
                        (excludeSelf ? " with self-exclusion" : ""));
    }
    if (excludeSelf && queries.size() != n) {
        throw DimensionMismatch("self-excluding query set must be the cloud itself");
    }

    NeighborTable table(queries.size(), k);
    parallelFor(queries.size(), threads, [&](std::size_t q) {
        auto cand = allDistances(cloud, queries.point(q),
                                 excludeSelf ? std::optional<std::size_t>(q) : std::nullopt);
        std::partial_sort(cand.begin(), cand.begin() + static_cast<std::ptrdiff_t>(k), cand.end(),
                          byDistanceThenIndex);
        auto d = table.mutableDistances(q);
        auto ix = table.mutableIndices(q);
        for (std::size_t j = 0; j < k; ++j) {
            d[j] = cand[j].distance;
            ix[j] = cand[j].index;
        }
    });
    return table;
}

std::size_t countWithinRadius(const PointCloud& cloud, std::span<const double> x, double radius,
                              std::optional<std::size_t> selfIndex) {
    requireDim(cloud, x.size());
    if (!(radius >= 0.0)) throw ConfigError("radius must be >= 0");
    std::size_t count = 0;
    for (std::size_t i = 0; i < cloud.size(); ++i) {
        if (selfIndex && *selfIndex == i) continue;
        if (euclidean(x, cloud.point(i)) <= radius) ++count;
    }
    return count;
}

} // namespace idest

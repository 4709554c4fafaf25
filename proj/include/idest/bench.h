#pragma once

#include <idest/core.h>
#include <idest/manifolds.h>

#include <json.hpp>

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace idest {

/// Estimator settings shared by every entry of a suite. geo.seed is replaced
/// per (spec, replicate).
struct MethodSettings {
    MleConfig mle;
    GeoMleConfig geo;
    PcaConfig pca;
};

struct BenchEntry {
    std::string dataset;
    ManifoldSpec spec;
    int replicate = 0;
    Method method = Method::MLE;
    std::optional<double> estimate;   // empty when the estimator failed
    int trueDim = 0;
    double wallTimeSeconds = 0.0;
    std::string error;

    std::optional<double> absError() const;
};

struct BenchmarkRun {
    std::vector<BenchEntry> entries;
};

struct DolanMoreCurve {
    Method method;
    std::vector<double> taus;
    std::vector<double> fractions;
};

struct NoiseRow {
    double sigma;
    Method method;
    double mpe;
};

struct NoiseSweep {
    std::vector<NoiseRow> rows;
    std::vector<BenchmarkRun> runs;   // one per sigma, same order as the input grid
};

/// Stable dataset key: "<kind>-m<m>-p<p>-n<n>".
std::string datasetName(const ManifoldSpec& spec);

/// The twelve synthetic rows of the reference comparison table, n = 1000.
std::vector<ManifoldSpec> builtinSuite(const std::string& name);

/// Parses a JSON array of manifold specs (seed fields are ignored by suites).
std::vector<ManifoldSpec> suiteFromJson(const nlohmann::json& j);

/// Generates a fresh cloud per (spec, replicate) and runs every method on it.
/// Estimator failures are stored on the entry, never thrown. Entries are ordered
/// by (spec index, replicate, method) and are identical across
/// runs with the same baseSeed except for wall times.
BenchmarkRun runSuite(const std::vector<ManifoldSpec>& specs, const std::vector<Method>& methods,
                      int replicates, std::uint64_t baseSeed, const MethodSettings& settings = {},
                      unsigned threads = 1);

/// Mean of |true − estimate| / true over the method's successful entries.
/// Throws MissingEntries when there are none.
double mpe(const BenchmarkRun& run, Method method);

constexpr double kRatioEpsilon = 1e-9;

/// Performance profiles over problems = (dataset, replicate) pairs. A failed
/// estimate has infinite ratio. Throws MissingEntries if any method lacks an
/// entry for some problem and ConfigError for fewer than two methods.
std::vector<DolanMoreCurve> dolanMore(const BenchmarkRun& run, std::vector<double> taus,
                                      double ratioEpsilon = kRatioEpsilon);

/// Evenly spaced grid lo, lo+step, ..., up to hi inclusive (within 1e-9 step).
std::vector<double> linearGrid(double lo, double hi, double step);

/// For every sigma, runSuite on noise-perturbed clouds and report MPE per method.
/// Clouds match runSuite with the same baseSeed; sigma = 0 reproduces it exactly.
NoiseSweep noiseSweep(const std::vector<ManifoldSpec>& specs, const std::vector<Method>& methods,
                      const std::vector<double>& sigmas, int replicates, std::uint64_t baseSeed,
                      const MethodSettings& settings = {}, unsigned threads = 1);

// Persistence --------------------------------------------------------------

void writeRunCsv(std::ostream& out, const BenchmarkRun& run);
BenchmarkRun readRunCsv(std::istream& in);
nlohmann::json runToJson(const BenchmarkRun& run);

void writeDolanMoreCsv(std::ostream& out, const std::vector<DolanMoreCurve>& curves);
void writeNoiseCsv(std::ostream& out, const std::vector<NoiseRow>& rows);

struct Series {
    std::string name;
    std::vector<double> xs;
    std::vector<double> ys;
};

/// Static line chart on an 800×600 viewBox.
std::string renderLineChart(const std::string& title, const std::string& xLabel, const std::string& yLabel,
                            const std::vector<Series>& series);

std::string dolanMoreSvg(const std::vector<DolanMoreCurve>& curves);
std::string noiseSvg(const std::vector<NoiseRow>& rows);

} // namespace idest

#include <idest/bench.h>
#include <idest/estimators.h>
#include <idest/io.h>
#include <idest/parallel.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <istream>
#include <limits>
#include <map>
#include <ostream>
#include <sstream>

namespace idest {

using nlohmann::json;

namespace {

constexpr std::uint64_t kCloudSalt = 0;
constexpr std::uint64_t kEstimatorSalt = 1;
constexpr std::uint64_t kNoiseSaltBase = 1000;

double runMethod(const PointCloud& cloud, Method method, const MethodSettings& settings, std::uint64_t seed) {
    switch (method) {
    case Method::MLE: return mleDataset(cloud, settings.mle).globalEstimate;
    case Method::GeoMLE: {
        GeoMleConfig cfg = settings.geo;
        cfg.seed = seed;
        return geomleDataset(cloud, cfg).globalEstimate;
    }
    case Method::PCA: return pcaEstimate(cloud, settings.pca).globalEstimate;
    }
    return std::numeric_limits<double>::quiet_NaN();
}

std::string sanitize(std::string s) {
    for (char& c : s) {
        if (c == ',' || c == '\n' || c == '\r' || c == '"') c = ';';
    }
    return s;
}

BenchmarkRun runTasks(const std::vector<ManifoldSpec>& specs, std::vector<Method> methods,
                      int replicates, std::uint64_t baseSeed, const MethodSettings& settings,
                      unsigned threads, double sigma, std::uint64_t sigmaIndex) {
    if (specs.empty()) throw ConfigError("suite has no specs");
    if (replicates < 1) throw ConfigError("replicates >= 1 required");
    if (methods.empty()) throw ConfigError("no methods requested");
    std::sort(methods.begin(), methods.end());
    methods.erase(std::unique(methods.begin(), methods.end()), methods.end());
    for (const auto& s : specs) validateSpec(s);

    const auto reps = static_cast<std::size_t>(replicates);
    const std::size_t tasks = specs.size() * reps;
    std::vector<std::vector<BenchEntry>> slots(tasks);

    parallelFor(tasks, threads, [&](std::size_t task) {
        const std::size_t s = task / reps;
        const std::size_t r = task % reps;
        ManifoldSpec spec = specs[s];
        spec.seed = deriveSeed(baseSeed, s, r, kCloudSalt);
        const auto labeled = generate(spec);
        const PointCloud cloud =
            addNoise(labeled.cloud, sigma, deriveSeed(baseSeed, s, r, kNoiseSaltBase + sigmaIndex));
        const std::uint64_t estimatorSeed = deriveSeed(baseSeed, s, r, kEstimatorSalt);

        for (Method method : methods) {
            BenchEntry e;
            e.dataset = datasetName(spec);
            e.spec = spec;
            e.replicate = static_cast<int>(r);
            e.method = method;
            e.trueDim = labeled.trueDim;
            const auto start = std::chrono::steady_clock::now();
            try {
                e.estimate = runMethod(cloud, method, settings, estimatorSeed);
            } catch (const Error& err) {
                e.error = sanitize(err.what());
            }
            const std::chrono::duration<double> elapsed = std::chrono::steady_clock::now() - start;
            e.wallTimeSeconds = std::max(elapsed.count(), 1e-9);
            slots[task].push_back(std::move(e));
        }
    });

    BenchmarkRun run;
    for (auto& slot : slots) {
        for (auto& e : slot) run.entries.push_back(std::move(e));
    }
    return run;
}

} // namespace

std::optional<double> BenchEntry::absError() const {
    if (!estimate) return std::nullopt;
    return std::abs(static_cast<double>(trueDim) - *estimate);
}

std::string datasetName(const ManifoldSpec& spec) {
    return toString(spec.kind) + "-m" + std::to_string(spec.intrinsicDim) + "-p" +
           std::to_string(spec.ambientDim) + "-n" + std::to_string(spec.n);
}

std::vector<ManifoldSpec> builtinSuite(const std::string& name) {
    if (name != "table1") throw ConfigError("unknown builtin suite '" + name + "'");
    using K = ManifoldKind;
    return {
        {K::Affine, 10, 10, 1000, 0},    {K::CubeSurface, 30, 35, 1000, 0}, {K::Helix1D, 1, 3, 1000, 0},
        {K::Helix2D, 2, 13, 1000, 0},    {K::Moebius, 2, 3, 1000, 0},       {K::Nonlinear, 6, 36, 1000, 0},
        {K::Norm, 50, 50, 1000, 0},      {K::Paraboloid, 9, 30, 1000, 0},   {K::SwissRoll, 2, 3, 1000, 0},
        {K::Sphere, 10, 15, 1000, 0},    {K::Spiral, 1, 3, 1000, 0},        {K::Uniform, 50, 55, 1000, 0},
    };
}

std::vector<ManifoldSpec> suiteFromJson(const json& j) {
    if (!j.is_array() || j.empty()) throw DataError("suite must be a non-empty JSON array");
    std::vector<ManifoldSpec> specs;
    for (const auto& item : j) specs.push_back(specFromJson(item));
    return specs;
}

BenchmarkRun runSuite(const std::vector<ManifoldSpec>& specs, const std::vector<Method>& methods,
                      int replicates, std::uint64_t baseSeed, const MethodSettings& settings,
                      unsigned threads) {
    return runTasks(specs, methods, replicates, baseSeed, settings, threads, 0.0, 0);
}

double mpe(const BenchmarkRun& run, Method method) {
    double sum = 0.0;
    std::size_t count = 0;
    for (const auto& e : run.entries) {
        if (e.method != method || !e.estimate) continue;
        sum += *e.absError() / static_cast<double>(e.trueDim);
        ++count;
    }
    if (count == 0) throw MissingEntries("no successful entries for " + toString(method));
    return sum / static_cast<double>(count);
}

std::vector<DolanMoreCurve> dolanMore(const BenchmarkRun& run, std::vector<double> taus, double ratioEpsilon) {
    if (taus.empty()) throw ConfigError("tau grid is empty");
    std::sort(taus.begin(), taus.end());

    std::vector<Method> methods;
    std::map<std::pair<std::string, int>, std::map<Method, double>> problems;
    constexpr double inf = std::numeric_limits<double>::infinity();
    for (const auto& e : run.entries) {
        if (std::find(methods.begin(), methods.end(), e.method) == methods.end()) methods.push_back(e.method);
        problems[{e.dataset, e.replicate}][e.method] = e.absError().value_or(inf);
    }
    std::sort(methods.begin(), methods.end());
    if (methods.size() < 2) throw ConfigError("Dolan-More curves need at least two methods");

    std::map<Method, std::vector<double>> ratios;
    for (const auto& [key, errors] : problems) {
        if (errors.size() != methods.size()) {
            throw MissingEntries("problem " + key.first + " replicate " + std::to_string(key.second) +
                                 " lacks some method");
        }
        double best = inf;
        for (const auto& [m, err] : errors) best = std::min(best, err);
        for (const auto& [m, err] : errors) {
            ratios[m].push_back(std::isfinite(err) ? err / std::max(best, ratioEpsilon) : inf);
        }
    }

    const auto total = static_cast<double>(problems.size());
    std::vector<DolanMoreCurve> curves;
    for (Method m : methods) {
        DolanMoreCurve c{m, taus, {}};
        for (double tau : taus) {
            const auto within = std::count_if(ratios[m].begin(), ratios[m].end(), [tau](double r) { return r <= tau; });
            c.fractions.push_back(static_cast<double>(within) / total);
        }
        curves.push_back(std::move(c));
    }
    return curves;
}

std::vector<double> linearGrid(double lo, double hi, double step) {
    if (!(step > 0.0) || !(hi >= lo)) throw ConfigError("grid needs step > 0 and hi >= lo");
    const auto count = static_cast<std::size_t>(std::floor((hi - lo) / step + 1e-9)) + 1;
    std::vector<double> grid;
    grid.reserve(count);
    for (std::size_t i = 0; i < count; ++i) {
        grid.push_back(std::round((lo + static_cast<double>(i) * step) * 1e12) / 1e12);
    }
    return grid;
}

NoiseSweep noiseSweep(const std::vector<ManifoldSpec>& specs, const std::vector<Method>& methods,
                      const std::vector<double>& sigmas, int replicates, std::uint64_t baseSeed,
                      const MethodSettings& settings, unsigned threads) {
    if (sigmas.empty()) throw ConfigError("sigma grid is empty");
    NoiseSweep sweep;
    for (std::size_t si = 0; si < sigmas.size(); ++si) {
        if (!(sigmas[si] >= 0.0)) throw ConfigError("sigma must be >= 0");
        auto run = runTasks(specs, methods, replicates, baseSeed, settings, threads, sigmas[si], si);
        for (Method m : methods) {
            double value = std::numeric_limits<double>::quiet_NaN();
            try {
                value = mpe(run, m);
            } catch (const MissingEntries&) {
            }
            sweep.rows.push_back({sigmas[si], m, value});
        }
        sweep.runs.push_back(std::move(run));
    }
    return sweep;
}

// -----------------------------------------------------------------------------
// Persistence
// -----------------------------------------------------------------------------

namespace {

const char* kRunHeader = "dataset,kind,m,p,n,replicate,method,estimate,abs_error,wall_time_s,error";

std::vector<std::string> splitLine(const std::string& line) {
    std::vector<std::string> out;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) out.push_back(cell);
    if (!line.empty() && line.back() == ',') out.emplace_back();
    return out;
}

int toInt(const std::string& s, const char* what) {
    double v;
    if (!parseDouble(s, v) || v != std::floor(v)) throw DataError(std::string("bad ") + what + " '" + s + "'");
    return static_cast<int>(v);
}

} // namespace

void writeRunCsv(std::ostream& out, const BenchmarkRun& run) {
    out << kRunHeader << '\n';
    for (const auto& e : run.entries) {
        out << e.dataset << ',' << toString(e.spec.kind) << ',' << e.spec.intrinsicDim << ',' << e.spec.ambientDim
            << ',' << e.spec.n << ',' << e.replicate << ',' << toString(e.method) << ','
            << (e.estimate ? formatDouble(*e.estimate) : "") << ','
            << (e.estimate ? formatDouble(*e.absError()) : "") << ',' << formatDouble(e.wallTimeSeconds) << ','
            << e.error << '\n';
    }
}

BenchmarkRun readRunCsv(std::istream& in) {
    std::string line;
    if (!std::getline(in, line)) throw DataError("empty run file");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const auto header = splitLine(line);
    std::map<std::string, std::size_t> col;
    for (std::size_t i = 0; i < header.size(); ++i) col[header[i]] = i;
    for (const char* required : {"dataset", "m", "replicate", "method", "estimate"}) {
        if (!col.count(required)) throw DataError(std::string("run file lacks column '") + required + "'");
    }
    auto field = [&](const std::vector<std::string>& cells, const char* name) -> std::string {
        const auto it = col.find(name);
        if (it == col.end() || it->second >= cells.size()) return {};
        return cells[it->second];
    };

    BenchmarkRun run;
    std::size_t lineNo = 1;
    while (std::getline(in, line)) {
        ++lineNo;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        const auto cells = splitLine(line);
        BenchEntry e;
        try {
            e.dataset = field(cells, "dataset");
            const auto kind = field(cells, "kind");
            if (!kind.empty()) e.spec.kind = parseManifoldKind(kind);
            e.spec.intrinsicDim = toInt(field(cells, "m"), "m");
            const auto p = field(cells, "p");
            e.spec.ambientDim = p.empty() ? e.spec.intrinsicDim : toInt(p, "p");
            const auto n = field(cells, "n");
            e.spec.n = n.empty() ? 0 : toInt(n, "n");
            e.trueDim = e.spec.intrinsicDim;
            e.replicate = toInt(field(cells, "replicate"), "replicate");
            e.method = parseMethod(field(cells, "method"));
            const auto est = field(cells, "estimate");
            if (!est.empty()) {
                double v;
                if (!parseDouble(est, v)) throw DataError("bad estimate '" + est + "'");
                e.estimate = v;
            }
            const auto wall = field(cells, "wall_time_s");
            if (!wall.empty()) parseDouble(wall, e.wallTimeSeconds);
            e.error = field(cells, "error");
        } catch (const ConfigError& err) {
            throw DataError("line " + std::to_string(lineNo) + ": " + err.what());
        } catch (const SpecError& err) {
            throw DataError("line " + std::to_string(lineNo) + ": " + err.what());
        }
        run.entries.push_back(std::move(e));
    }
    if (run.entries.empty()) throw DataError("run file has no entries");
    return run;
}

json runToJson(const BenchmarkRun& run) {
    json entries = json::array();
    for (const auto& e : run.entries) {
        entries.push_back({{"dataset", e.dataset},
                           {"spec", specToJson(e.spec)},
                           {"replicate", e.replicate},
                           {"method", toString(e.method)},
                           {"estimate", e.estimate ? json(*e.estimate) : json(nullptr)},
                           {"true_dim", e.trueDim},
                           {"wall_time_s", e.wallTimeSeconds},
                           {"error", e.error}});
    }
    return json{{"entries", std::move(entries)}};
}

void writeDolanMoreCsv(std::ostream& out, const std::vector<DolanMoreCurve>& curves) {
    out << "method,tau,fraction\n";
    for (const auto& c : curves) {
        for (std::size_t i = 0; i < c.taus.size(); ++i) {
            out << toString(c.method) << ',' << formatDouble(c.taus[i]) << ',' << formatDouble(c.fractions[i]) << '\n';
        }
    }
}

void writeNoiseCsv(std::ostream& out, const std::vector<NoiseRow>& rows) {
    out << "sigma,method,mpe\n";
    for (const auto& r : rows) {
        out << formatDouble(r.sigma) << ',' << toString(r.method) << ','
            << (std::isfinite(r.mpe) ? formatDouble(r.mpe) : "") << '\n';
    }
}

namespace {

std::string escapeXml(const std::string& s) {
    std::string out;
    for (char c : s) {
        switch (c) {
        case '&': out += "&amp;"; break;
        case '<': out += "&lt;"; break;
        case '>': out += "&gt;"; break;
        case '"': out += "&quot;"; break;
        default: out += c;
        }
    }
    return out;
}

std::string fmt(double v) {
    std::ostringstream ss;
    ss.imbue(std::locale::classic());
    ss.precision(4);
    ss << v;
    return ss.str();
}

} // namespace

std::string renderLineChart(const std::string& title, const std::string& xLabel, const std::string& yLabel,
                            const std::vector<Series>& series) {
    static const char* palette[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b"};
    constexpr double W = 800, H = 600, left = 80, right = 160, top = 50, bottom = 70;

    double xMin = std::numeric_limits<double>::infinity(), xMax = -xMin;
    double yMin = xMin, yMax = -xMin;
    for (const auto& s : series) {
        for (std::size_t i = 0; i < s.xs.size(); ++i) {
            if (!std::isfinite(s.xs[i]) || !std::isfinite(s.ys[i])) continue;
            xMin = std::min(xMin, s.xs[i]);
            xMax = std::max(xMax, s.xs[i]);
            yMin = std::min(yMin, s.ys[i]);
            yMax = std::max(yMax, s.ys[i]);
        }
    }
    if (!std::isfinite(xMin)) xMin = 0, xMax = 1, yMin = 0, yMax = 1;
    if (xMax == xMin) xMax = xMin + 1;
    if (yMax == yMin) yMax = yMin + 1;
    yMin = std::min(yMin, 0.0);

    auto px = [&](double x) { return left + (x - xMin) / (xMax - xMin) * (W - left - right); };
    auto py = [&](double y) { return H - bottom - (y - yMin) / (yMax - yMin) * (H - top - bottom); };

    std::ostringstream svg;
    svg.imbue(std::locale::classic());
    svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"0 0 800 600\" width=\"800\" height=\"600\">\n"
        << "<rect width=\"800\" height=\"600\" fill=\"white\"/>\n"
        << "<text x=\"400\" y=\"30\" text-anchor=\"middle\" font-size=\"18\">" << escapeXml(title) << "</text>\n"
        << "<line x1=\"" << left << "\" y1=\"" << H - bottom << "\" x2=\"" << W - right << "\" y2=\"" << H - bottom
        << "\" stroke=\"black\"/>\n"
        << "<line x1=\"" << left << "\" y1=\"" << top << "\" x2=\"" << left << "\" y2=\"" << H - bottom
        << "\" stroke=\"black\"/>\n";
    for (int t = 0; t <= 5; ++t) {
        const double xv = xMin + (xMax - xMin) * t / 5.0;
        const double yv = yMin + (yMax - yMin) * t / 5.0;
        svg << "<text x=\"" << px(xv) << "\" y=\"" << H - bottom + 20 << "\" text-anchor=\"middle\" font-size=\"12\">"
            << fmt(xv) << "</text>\n"
            << "<text x=\"" << left - 8 << "\" y=\"" << py(yv) + 4 << "\" text-anchor=\"end\" font-size=\"12\">"
            << fmt(yv) << "</text>\n";
    }
    svg << "<text x=\"" << (left + W - right) / 2 << "\" y=\"" << H - 20 << "\" text-anchor=\"middle\" font-size=\"14\">"
        << escapeXml(xLabel) << "</text>\n"
        << "<text x=\"20\" y=\"" << (top + H - bottom) / 2 << "\" text-anchor=\"middle\" font-size=\"14\" transform=\"rotate(-90 20 "
        << (top + H - bottom) / 2 << ")\">" << escapeXml(yLabel) << "</text>\n";

    for (std::size_t s = 0; s < series.size(); ++s) {
        const char* color = palette[s % std::size(palette)];
        svg << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"2\" points=\"";
        for (std::size_t i = 0; i < series[s].xs.size(); ++i) {
            if (!std::isfinite(series[s].xs[i]) || !std::isfinite(series[s].ys[i])) continue;
            svg << px(series[s].xs[i]) << ',' << py(series[s].ys[i]) << ' ';
        }
        svg << "\"/>\n";
        const double ly = top + 20.0 * static_cast<double>(s);
        svg << "<line x1=\"" << W - right + 15 << "\" y1=\"" << ly << "\" x2=\"" << W - right + 40 << "\" y2=\"" << ly
            << "\" stroke=\"" << color << "\" stroke-width=\"2\"/>\n"
            << "<text x=\"" << W - right + 45 << "\" y=\"" << ly + 4 << "\" font-size=\"12\">"
            << escapeXml(series[s].name) << "</text>\n";
    }
    svg << "</svg>\n";
    return svg.str();
}

std::string dolanMoreSvg(const std::vector<DolanMoreCurve>& curves) {
    std::vector<Series> series;
    for (const auto& c : curves) series.push_back({toString(c.method), c.taus, c.fractions});
    return renderLineChart("Dolan-More performance profiles", "tau", "p(tau)", series);
}

std::string noiseSvg(const std::vector<NoiseRow>& rows) {
    std::vector<Series> series;
    for (const auto& r : rows) {
        auto it = std::find_if(series.begin(), series.end(),
                               [&](const Series& s) { return s.name == toString(r.method); });
        if (it == series.end()) {
            series.push_back({toString(r.method), {}, {}});
            it = series.end() - 1;
        }
        it->xs.push_back(r.sigma);
        it->ys.push_back(r.mpe);
    }
    return renderLineChart("Estimation error under Gaussian noise", "noise sigma", "MPE", series);
}

} // namespace idest

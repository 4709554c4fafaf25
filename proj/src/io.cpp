#include <idest/io.h>

#include <charconv>
#include <fstream>
#include <istream>
#include <ostream>
#include <system_error>

namespace idest {

using nlohmann::json;

std::string formatDouble(double v) {
    char buf[32];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

bool parseDouble(std::string_view cell, double& out) {
    while (!cell.empty() && (cell.front() == ' ' || cell.front() == '\t')) cell.remove_prefix(1);
    while (!cell.empty() && (cell.back() == ' ' || cell.back() == '\t' || cell.back() == '\r')) {
        cell.remove_suffix(1);
    }
    if (!cell.empty() && cell.front() == '+') cell.remove_prefix(1);
    if (cell.empty()) return false;
    const auto res = std::from_chars(cell.data(), cell.data() + cell.size(), out);
    return res.ec == std::errc() && res.ptr == cell.data() + cell.size();
}

namespace {

std::vector<std::string_view> splitCells(std::string_view line) {
    std::vector<std::string_view> cells;
    std::size_t start = 0;
    for (;;) {
        const auto comma = line.find(',', start);
        if (comma == std::string_view::npos) {
            cells.push_back(line.substr(start));
            return cells;
        }
        cells.push_back(line.substr(start, comma - start));
        start = comma + 1;
    }
}

bool blank(std::string_view line) {
    return line.find_first_not_of(" \t\r") == std::string_view::npos;
}

} // namespace

PointCloud readPointCloudCsv(std::istream& in, std::string label) {
    std::vector<double> values;
    std::size_t width = 0;
    std::size_t rows = 0;
    std::size_t lineNo = 0;
    bool seenFirst = false;
    std::string line;
    while (std::getline(in, line)) {
        ++lineNo;
        if (blank(line)) continue;
        const auto cells = splitCells(line);
        std::vector<double> parsed(cells.size());
        bool numeric = true;
        for (std::size_t c = 0; c < cells.size(); ++c) {
            if (!parseDouble(cells[c], parsed[c])) {
                numeric = false;
                break;
            }
        }
        if (!seenFirst) {
            seenFirst = true;
            if (!numeric) continue; // header
        } else if (!numeric) {
            throw DataError("non-numeric cell on line " + std::to_string(lineNo));
        }
        if (width == 0) width = parsed.size();
        if (parsed.size() != width) {
            throw DataError("line " + std::to_string(lineNo) + " has " + std::to_string(parsed.size()) +
                            " columns, expected " + std::to_string(width));
        }
        values.insert(values.end(), parsed.begin(), parsed.end());
        ++rows;
    }
    if (rows == 0) throw DataError("no data rows");
    return PointCloud(rows, width, std::move(values), std::move(label));
}

PointCloud readPointCloudCsv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open '" + path + "'");
    return readPointCloudCsv(in, path);
}

void writePointCloudCsv(std::ostream& out, const PointCloud& cloud, bool header) {
    const std::size_t p = cloud.dim();
    if (header) {
        for (std::size_t c = 0; c < p; ++c) out << (c ? "," : "") << 'x' << c;
        out << '\n';
    }
    for (std::size_t i = 0; i < cloud.size(); ++i) {
        const auto row = cloud.point(i);
        for (std::size_t c = 0; c < p; ++c) out << (c ? "," : "") << formatDouble(row[c]);
        out << '\n';
    }
}

json specToJson(const ManifoldSpec& spec) {
    return json{{"kind", toString(spec.kind)},
                {"m", spec.intrinsicDim},
                {"p", spec.ambientDim},
                {"n", spec.n},
                {"seed", spec.seed},
                {"rng", Rng::kAlgorithm}};
}

ManifoldSpec specFromJson(const json& j) {
    try {
        ManifoldSpec spec;
        spec.kind = parseManifoldKind(j.at("kind").get<std::string>());
        spec.intrinsicDim = j.at("m").get<int>();
        spec.ambientDim = j.at("p").get<int>();
        spec.n = j.value("n", 1000);
        spec.seed = j.value("seed", std::uint64_t{0});
        return spec;
    } catch (const json::exception& e) {
        throw DataError(std::string("malformed manifold spec: ") + e.what());
    }
}

json configToJson(const MethodConfig& cfg) {
    return std::visit(
        [](const auto& c) -> json {
            using T = std::decay_t<decltype(c)>;
            if constexpr (std::is_same_v<T, MleConfig>) {
                return json{{"k", c.k},
                            {"aggregation", toString(c.aggregation)},
                            {"duplicate_epsilon", c.duplicateEpsilon}};
            } else if constexpr (std::is_same_v<T, GeoMleConfig>) {
                return json{{"k1", c.k1},
                            {"k2", c.k2},
                            {"M", c.bootstrapCount},
                            {"degree", c.degree},
                            {"seed", c.seed},
                            {"variance_floor", c.varianceFloor},
                            {"duplicate_epsilon", c.duplicateEpsilon}};
            } else {
                return json{{"explained_variance_threshold", c.explainedVarianceThreshold}};
            }
        },
        cfg);
}

namespace {

MethodConfig configFromJson(Method method, const json& j) {
    switch (method) {
    case Method::MLE: {
        MleConfig c;
        c.k = j.at("k").get<int>();
        c.aggregation = parseAggregation(j.at("aggregation").get<std::string>());
        c.duplicateEpsilon = j.at("duplicate_epsilon").get<double>();
        return c;
    }
    case Method::GeoMLE: {
        GeoMleConfig c;
        c.k1 = j.at("k1").get<int>();
        c.k2 = j.at("k2").get<int>();
        c.bootstrapCount = j.at("M").get<int>();
        c.degree = j.at("degree").get<int>();
        c.seed = j.at("seed").get<std::uint64_t>();
        c.varianceFloor = j.at("variance_floor").get<double>();
        c.duplicateEpsilon = j.at("duplicate_epsilon").get<double>();
        return c;
    }
    case Method::PCA: {
        PcaConfig c;
        c.explainedVarianceThreshold = j.at("explained_variance_threshold").get<double>();
        return c;
    }
    }
    throw DataError("unknown method");
}

} // namespace

json reportToJson(const EstimateReport& report) {
    json perPoint = json::array();
    for (const auto& d : report.perPoint) {
        json perK = json::array();
        for (const auto& s : d.perK) perK.push_back({s.k, s.meanDistance, s.meanEstimate, s.variance});
        perPoint.push_back({{"index", d.pointIndex},
                            {"estimate", d.localEstimate},
                            {"per_k", std::move(perK)},
                            {"eta", d.eta},
                            {"dropped_cells", d.droppedCells}});
    }
    json failures = json::array();
    for (const auto& f : report.failures) failures.push_back({{"index", f.pointIndex}, {"reason", f.reason}});
    return json{{"method", toString(report.method)},
                {"global_estimate", report.globalEstimate},
                {"config", configToJson(report.config)},
                {"per_point", std::move(perPoint)},
                {"failures", std::move(failures)}};
}

EstimateReport reportFromJson(const json& j) {
    try {
        EstimateReport r;
        r.method = parseMethod(j.at("method").get<std::string>());
        r.globalEstimate = j.at("global_estimate").get<double>();
        r.config = configFromJson(r.method, j.at("config"));
        for (const auto& pj : j.at("per_point")) {
            PointDiagnostics d;
            d.pointIndex = pj.at("index").get<std::size_t>();
            d.localEstimate = pj.at("estimate").get<double>();
            for (const auto& kj : pj.at("per_k")) {
                d.perK.push_back({kj.at(0).get<int>(), kj.at(1).get<double>(), kj.at(2).get<double>(),
                                  kj.at(3).get<double>()});
            }
            d.eta = pj.at("eta").get<std::vector<double>>();
            d.droppedCells = pj.value("dropped_cells", 0);
            r.perPoint.push_back(std::move(d));
        }
        for (const auto& fj : j.value("failures", json::array())) {
            r.failures.push_back({fj.at("index").get<std::size_t>(), fj.at("reason").get<std::string>()});
        }
        return r;
    } catch (const json::exception& e) {
        throw DataError(std::string("malformed report: ") + e.what());
    }
}

} // namespace idest

#include <idest/cli.h>

#include <idest/bench.h>
#include <idest/estimators.h>
#include <idest/io.h>
#include <idest/parallel.h>

#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <ostream>
#include <sstream>

namespace idest::cli {

using nlohmann::json;

namespace {

// =============================================================================
// Shared flag groups
// =============================================================================

struct EstimatorFlags {
    int k = 20;
    std::string aggregation = "mean";
    GeoMleConfig geo;
    double threshold = 0.99;
    double duplicateEpsilon = 1e-12;

    void attach(CLI::App* app) {
        app->add_option("--k", k, "MLE neighbor count")->capture_default_str();
        app->add_option("--aggregation", aggregation, "MLE aggregation: mean | inverse-mean")->capture_default_str();
        app->add_option("--k1", geo.k1, "GeoMLE smallest k")->capture_default_str();
        app->add_option("--k2", geo.k2, "GeoMLE largest k")->capture_default_str();
        app->add_option("--bootstrap,-M", geo.bootstrapCount, "GeoMLE bootstrap replicates")->capture_default_str();
        app->add_option("--degree", geo.degree, "GeoMLE polynomial degree")->capture_default_str();
        app->add_option("--variance-floor", geo.varianceFloor)->capture_default_str();
        app->add_option("--duplicate-epsilon", duplicateEpsilon)->capture_default_str();
        app->add_option("--threshold", threshold, "PCA explained-variance threshold")->capture_default_str();
    }

    MethodSettings settings() const {
        MethodSettings s;
        s.mle = {k, parseAggregation(aggregation), duplicateEpsilon};
        s.geo = geo;
        s.geo.duplicateEpsilon = duplicateEpsilon;
        s.pca.explainedVarianceThreshold = threshold;
        return s;
    }
};

struct SuiteFlags {
    std::string builtin;
    std::string suitePath;
    std::string kind;
    int m = 0;
    int p = 0;
    int n = 1000;

    void attach(CLI::App* app, bool allowSingle) {
        app->add_option("--builtin", builtin, "builtin suite name (table1)");
        app->add_option("--suite", suitePath, "JSON file holding a list of manifold specs");
        if (allowSingle) {
            app->add_option("--kind", kind, "single-manifold suite: manifold kind");
            app->add_option("--m", m, "intrinsic dimension");
            app->add_option("--p", p, "ambient dimension");
            app->add_option("--n", n, "points per cloud")->capture_default_str();
        }
    }

    std::vector<ManifoldSpec> specs() const {
        const int sources = !builtin.empty() + !suitePath.empty() + !kind.empty();
        if (sources != 1) throw ConfigError("give exactly one of --builtin, --suite or --kind");
        if (!builtin.empty()) return builtinSuite(builtin);
        if (!suitePath.empty()) {
            std::ifstream in(suitePath);
            if (!in) throw DataError("cannot open suite '" + suitePath + "'");
            json j;
            try {
                in >> j;
            } catch (const json::exception& e) {
                throw DataError("suite '" + suitePath + "' is not valid JSON: " + e.what());
            }
            try {
                return suiteFromJson(j);
            } catch (const json::exception& e) {
                throw DataError("suite '" + suitePath + "': " + e.what());
            }
        }
        ManifoldSpec spec{parseManifoldKind(kind), m, p, n, 0};
        validateSpec(spec);
        return {spec};
    }
};

std::vector<Method> parseMethods(const std::string& list) {
    std::vector<Method> methods;
    std::stringstream ss(list);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (!item.empty()) methods.push_back(parseMethod(item));
    }
    if (methods.empty()) throw ConfigError("--methods is empty");
    return methods;
}

/// "lo:hi:step" or a comma separated list.
std::vector<double> parseGrid(const std::string& text, const char* flag) {
    auto number = [&](const std::string& s) {
        double v;
        if (!parseDouble(s, v)) throw ConfigError(std::string("bad value '") + s + "' in " + flag);
        return v;
    };
    std::vector<std::string> parts;
    const char sep = text.find(':') != std::string::npos ? ':' : ',';
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, sep)) parts.push_back(item);
    if (sep == ':') {
        if (parts.size() != 3) throw ConfigError(std::string(flag) + " expects lo:hi:step");
        return linearGrid(number(parts[0]), number(parts[1]), number(parts[2]));
    }
    std::vector<double> values;
    for (const auto& part : parts) values.push_back(number(part));
    if (values.empty()) throw ConfigError(std::string(flag) + " is empty");
    return values;
}

void writeFile(const std::string& path, const std::string& content) {
    std::ofstream f(path, std::ios::binary);
    if (!f || !(f << content)) throw DataError("cannot write '" + path + "'");
}

unsigned resolveThreads(int flag) {
    if (flag < 0) throw ConfigError("--threads must be >= 0");
    return flag == 0 ? defaultThreadCount() : static_cast<unsigned>(flag);
}

bool anySucceeded(const BenchmarkRun& run) {
    return std::any_of(run.entries.begin(), run.entries.end(), [](const BenchEntry& e) { return e.estimate.has_value(); });
}

// =============================================================================
// Subcommands
// =============================================================================

struct GenerateCmd {
    std::string kind;
    int m = 0, p = 0, n = 1000;
    std::uint64_t seed = 0;
    std::string out;
    bool header = false;

    void attach(CLI::App* app) {
        app->add_option("--kind", kind, "manifold kind")->required();
        app->add_option("--m", m, "intrinsic dimension")->required();
        app->add_option("--p", p, "ambient dimension")->required();
        app->add_option("--n", n, "number of points")->capture_default_str();
        app->add_option("--seed", seed)->capture_default_str();
        app->add_option("--out,-o", out, "CSV path (default <kind>-m<m>-p<p>-s<seed>.csv)");
        app->add_flag("--header", header, "write an x0..x{p-1} header row");
    }

    int exec(std::ostream& stdOut) {
        const ManifoldSpec spec{parseManifoldKind(kind), m, p, n, seed};
        const auto labeled = generate(spec);
        if (out.empty()) {
            out = toString(spec.kind) + "-m" + std::to_string(m) + "-p" + std::to_string(p) + "-s" +
                  std::to_string(seed) + ".csv";
        }
        std::ostringstream csv;
        writePointCloudCsv(csv, labeled.cloud, header);
        writeFile(out, csv.str());

        json meta = specToJson(spec);
        meta["true_dim"] = labeled.trueDim;
        meta["header"] = header;
        meta["csv"] = out;
        const std::string sidecar = out + ".json";
        writeFile(sidecar, meta.dump(2) + "\n");
        stdOut << sidecar << '\n';
        return kOk;
    }
};

struct EstimateCmd {
    std::string input;
    std::string method = "geomle";
    std::uint64_t seed = 0;
    int threads = 0;
    bool round = false;
    bool summary = false;
    std::string out;
    EstimatorFlags est;

    void attach(CLI::App* app) {
        app->add_option("input", input, "point cloud CSV")->required();
        app->add_option("--method", method, "mle | geomle | pca")->capture_default_str();
        app->add_option("--seed", seed, "GeoMLE bootstrap seed")->capture_default_str();
        app->add_option("--threads", threads, "worker cap (0: IDEST_THREADS or all cores)");
        app->add_flag("--round", round, "add rounded_estimate (half away from zero)");
        app->add_flag("--summary", summary, "omit per-point diagnostics");
        app->add_option("--out,-o", out, "write the report here instead of stdout");
        est.attach(app);
    }

    int exec(std::ostream& stdOut) {
        const Method m = parseMethod(method);
        MethodSettings s = est.settings();
        s.geo.seed = seed;
        // Config problems are usage errors even when the data file is also bad.
        if (m == Method::GeoMLE) validateConfig(s.geo, std::numeric_limits<std::size_t>::max());
        if (m == Method::MLE && s.mle.k < 2) throw ConfigError("k >= 2 required");
        if (m == Method::PCA && !(s.pca.explainedVarianceThreshold > 0.0 && s.pca.explainedVarianceThreshold < 1.0)) {
            throw ConfigError("threshold must lie in (0, 1)");
        }
        const unsigned workers = resolveThreads(threads);

        const PointCloud cloud = readPointCloudCsv(input);
        EstimateReport report;
        switch (m) {
        case Method::MLE: report = mleDataset(cloud, s.mle, workers); break;
        case Method::GeoMLE: report = geomleDataset(cloud, s.geo, workers); break;
        case Method::PCA: report = pcaEstimate(cloud, s.pca); break;
        }

        json j = reportToJson(report);
        if (summary) j.erase("per_point");
        if (round) j["rounded_estimate"] = static_cast<long long>(std::round(report.globalEstimate));
        const std::string text = j.dump(2) + "\n";
        if (out.empty()) {
            stdOut << text;
        } else {
            writeFile(out, text);
        }
        return kOk;
    }
};

struct BenchCmd {
    SuiteFlags suite;
    std::string methods = "mle,geomle,pca";
    int replicates = 10;
    std::uint64_t seed = 0;
    int threads = 0;
    std::string out;
    std::string jsonOut;
    EstimatorFlags est;

    void attach(CLI::App* app) {
        suite.attach(app, false);
        app->add_option("--methods", methods)->capture_default_str();
        app->add_option("--replicates", replicates)->capture_default_str();
        app->add_option("--seed", seed, "base seed")->capture_default_str();
        app->add_option("--threads", threads);
        app->add_option("--out,-o", out, "run CSV path (default stdout)");
        app->add_option("--json", jsonOut, "also write the run as JSON");
        est.attach(app);
    }

    int exec(std::ostream& stdOut) {
        const auto specs = suite.specs();
        const auto run = runSuite(specs, parseMethods(methods), replicates, seed, est.settings(), resolveThreads(threads));
        std::ostringstream csv;
        writeRunCsv(csv, run);
        if (out.empty()) {
            stdOut << csv.str();
        } else {
            writeFile(out, csv.str());
        }
        if (!jsonOut.empty()) writeFile(jsonOut, runToJson(run).dump(2) + "\n");
        return anySucceeded(run) ? kOk : kNumerical;
    }
};

struct NoiseCmd {
    SuiteFlags suite;
    std::string methods = "mle,geomle";
    std::string sigmas = "0:0.05:0.01";
    int replicates = 5;
    std::uint64_t seed = 0;
    int threads = 0;
    std::string out;
    std::string svg;
    std::string runOut;
    EstimatorFlags est;

    void attach(CLI::App* app) {
        suite.attach(app, true);
        app->add_option("--methods", methods)->capture_default_str();
        app->add_option("--sigmas", sigmas, "lo:hi:step or comma list")->capture_default_str();
        app->add_option("--replicates", replicates, "noise realizations")->capture_default_str();
        app->add_option("--seed", seed, "base seed")->capture_default_str();
        app->add_option("--threads", threads);
        app->add_option("--out,-o", out, "(sigma, method, mpe) CSV path (default stdout)");
        app->add_option("--svg", svg, "line chart path");
        app->add_option("--runs", runOut, "raw entries of every sigma as one CSV");
        est.attach(app);
    }

    int exec(std::ostream& stdOut) {
        const auto specs = suite.specs();
        const auto grid = parseGrid(sigmas, "--sigmas");
        const auto sweep = noiseSweep(specs, parseMethods(methods), grid, replicates, seed, est.settings(),
                                      resolveThreads(threads));
        std::ostringstream csv;
        writeNoiseCsv(csv, sweep.rows);
        if (out.empty()) {
            stdOut << csv.str();
        } else {
            writeFile(out, csv.str());
        }
        if (!svg.empty()) writeFile(svg, noiseSvg(sweep.rows));
        if (!runOut.empty()) {
            BenchmarkRun all;
            for (const auto& r : sweep.runs) all.entries.insert(all.entries.end(), r.entries.begin(), r.entries.end());
            std::ostringstream raw;
            writeRunCsv(raw, all);
            writeFile(runOut, raw.str());
        }
        const bool ok = std::any_of(sweep.runs.begin(), sweep.runs.end(), anySucceeded);
        return ok ? kOk : kNumerical;
    }
};

struct DolanMoreCmd {
    std::string input;
    std::string taus = "1:10:0.05";
    std::string out;
    std::string svg;

    void attach(CLI::App* app) {
        app->add_option("input", input, "run CSV written by bench")->required();
        app->add_option("--taus", taus, "lo:hi:step or comma list")->capture_default_str();
        app->add_option("--out,-o", out, "curve CSV path (default stdout)");
        app->add_option("--svg", svg, "line chart path");
    }

    int exec(std::ostream& stdOut) {
        const auto grid = parseGrid(taus, "--taus");
        std::ifstream in(input);
        if (!in) throw DataError("cannot open '" + input + "'");
        const auto curves = dolanMore(readRunCsv(in), grid);
        std::ostringstream csv;
        writeDolanMoreCsv(csv, curves);
        if (out.empty()) {
            stdOut << csv.str();
        } else {
            writeFile(out, csv.str());
        }
        if (!svg.empty()) writeFile(svg, dolanMoreSvg(curves));
        return kOk;
    }
};

int exitCodeFor(const Error& e) {
    switch (e.errorClass()) {
    case ErrorClass::Usage: return kUsage;
    case ErrorClass::Data: return kData;
    case ErrorClass::Numerical: return kNumerical;
    }
    return kUsage;
}

} // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Intrinsic dimension estimation and benchmarking", "idest"};
    app.require_subcommand(1);
    app.allow_extras(false);

    GenerateCmd generateCmd;
    EstimateCmd estimateCmd;
    BenchCmd benchCmd;
    NoiseCmd noiseCmd;
    DolanMoreCmd dolanCmd;
    auto* gen = app.add_subcommand("generate", "sample a synthetic manifold to CSV");
    auto* est = app.add_subcommand("estimate", "estimate the intrinsic dimension of a CSV point cloud");
    auto* ben = app.add_subcommand("bench", "run estimators over a manifold suite");
    auto* noi = app.add_subcommand("noise", "MPE under additive Gaussian noise");
    auto* dol = app.add_subcommand("dolan-more", "performance profiles from a bench run CSV");
    generateCmd.attach(gen);
    estimateCmd.attach(est);
    benchCmd.attach(ben);
    noiseCmd.attach(noi);
    dolanCmd.attach(dol);

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kOk;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return kOk;
    } catch (const CLI::ParseError& e) {
        // CLI11 reports --help on a subcommand through the same channel.
        if (e.get_exit_code() == 0) {
            for (auto* sub : app.get_subcommands()) out << sub->help();
            return kOk;
        }
        err << "error: " << e.what() << '\n';
        return kUsage;
    }

    try {
        if (gen->parsed()) return generateCmd.exec(out);
        if (est->parsed()) return estimateCmd.exec(out);
        if (ben->parsed()) return benchCmd.exec(out);
        if (noi->parsed()) return noiseCmd.exec(out);
        if (dol->parsed()) return dolanCmd.exec(out);
    } catch (const Error& e) {
        err << "error: " << e.what() << '\n';
        return exitCodeFor(e);
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kData;
    }
    return kUsage;
}

} // namespace idest::cli

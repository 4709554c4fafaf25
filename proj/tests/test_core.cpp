#include <idest/core.h>
#include <idest/io.h>
#include <idest/random.h>

#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <sstream>

using namespace idest;

// =============================================================================
// PointCloud
// =============================================================================

TEST(PointCloud, RejectsBadShapes) {
    EXPECT_THROW(PointCloud(1, 2, {0.0, 1.0}), DataError);
    EXPECT_THROW(PointCloud(2, 0, {}), DataError);
    EXPECT_THROW(PointCloud(2, 2, {0.0, 1.0, 2.0}), DataError);
    EXPECT_THROW(PointCloud(2, 1, {0.0, std::numeric_limits<double>::quiet_NaN()}), DataError);
    EXPECT_THROW(PointCloud(2, 1, {0.0, std::numeric_limits<double>::infinity()}), DataError);
    EXPECT_NO_THROW(PointCloud(2, 1, {0.0, 1.0}));
}

TEST(PointCloud, FromRows) {
    const auto c = PointCloud::fromRows({{1, 2}, {3, 4}, {5, 6}});
    EXPECT_EQ(c.size(), 3u);
    EXPECT_EQ(c.dim(), 2u);
    EXPECT_EQ(c.point(2)[1], 6.0);
    EXPECT_THROW(PointCloud::fromRows({{1, 2}, {3}}), DataError);
}

TEST(PointCloud, Euclidean) {
    const std::vector<double> a{0, 0, 0}, b{1, 2, 2};
    EXPECT_DOUBLE_EQ(euclidean(a, b), 3.0);
}

// =============================================================================
// Config validation
// =============================================================================

TEST(ValidateConfig, DefaultsAcceptedAtThousandPoints) {
    EXPECT_NO_THROW(validateConfig(GeoMleConfig{}, 1000));
}

TEST(ValidateConfig, NamesFirstViolation) {
    auto expectMessage = [](GeoMleConfig cfg, std::size_t n, const std::string& needle) {
        try {
            validateConfig(cfg, n);
            FAIL() << "expected ConfigError containing " << needle;
        } catch (const ConfigError& e) {
            EXPECT_NE(std::string(e.what()).find(needle), std::string::npos) << e.what();
        }
    };
    GeoMleConfig c;
    c.k1 = 1;
    expectMessage(c, 1000, "2 <= k1");
    c = {};
    c.k1 = 10;
    c.k2 = 5;
    expectMessage(c, 1000, "k1 <= k2");
    c = {};
    expectMessage(c, 40, "k2 < n");
    c = {};
    c.k1 = 10;
    c.k2 = 12;
    c.degree = 2;
    expectMessage(c, 1000, "k2-k1+1 >= degree+2");
}

TEST(ValidateConfig, OtherFields) {
    GeoMleConfig c;
    c.bootstrapCount = 0;
    EXPECT_THROW(validateConfig(c, 1000), ConfigError);
    c = {};
    c.degree = 0;
    EXPECT_THROW(validateConfig(c, 1000), ConfigError);
    c = {};
    c.varianceFloor = 0.0;
    EXPECT_THROW(validateConfig(c, 1000), ConfigError);
    c = {};
    c.duplicateEpsilon = -1.0;
    EXPECT_THROW(validateConfig(c, 1000), ConfigError);
}

TEST(Method, ParseAndPrint) {
    EXPECT_EQ(parseMethod("GeoMLE"), Method::GeoMLE);
    EXPECT_EQ(parseMethod("mle"), Method::MLE);
    EXPECT_EQ(parseMethod("PCA"), Method::PCA);
    EXPECT_THROW(parseMethod("danco"), ConfigError);
    for (Method m : {Method::MLE, Method::GeoMLE, Method::PCA}) EXPECT_EQ(parseMethod(toString(m)), m);
    EXPECT_EQ(parseAggregation(toString(MleAggregation::InverseMean)), MleAggregation::InverseMean);
}

TEST(Errors, ClassesAndPrefix) {
    EXPECT_EQ(ConfigError("x").errorClass(), ErrorClass::Usage);
    EXPECT_EQ(DataError("x").errorClass(), ErrorClass::Data);
    EXPECT_EQ(AllPointsFailed("x").errorClass(), ErrorClass::Numerical);
    EXPECT_STREQ(RankDeficient("cond").what(), "RankDeficient: cond");
}

// =============================================================================
// RNG
// =============================================================================

TEST(Rng, DeterministicPerSeedAndStream) {
    Rng a(5, 3), b(5, 3), c(5, 4);
    bool differs = false;
    for (int i = 0; i < 100; ++i) {
        const auto x = a.nextU64();
        EXPECT_EQ(x, b.nextU64());
        differs |= x != c.nextU64();
    }
    EXPECT_TRUE(differs);
}

TEST(Rng, UniformAndBelowRanges) {
    Rng r(1);
    double sum = 0.0;
    for (int i = 0; i < 20000; ++i) {
        const double u = r.uniform();
        ASSERT_GE(u, 0.0);
        ASSERT_LT(u, 1.0);
        sum += u;
        ASSERT_LT(r.below(7), 7u);
    }
    EXPECT_NEAR(sum / 20000, 0.5, 0.01);
}

TEST(Rng, NormalMoments) {
    Rng r(2);
    double s = 0, s2 = 0;
    const int n = 100000;
    for (int i = 0; i < n; ++i) {
        const double z = r.normal();
        s += z;
        s2 += z * z;
    }
    EXPECT_NEAR(s / n, 0.0, 0.02);
    EXPECT_NEAR(s2 / n, 1.0, 0.02);
}

// =============================================================================
// Serialization
// =============================================================================

TEST(Json, ReportRoundTripIsExact) {
    EstimateReport r;
    r.method = Method::GeoMLE;
    r.globalEstimate = 0.1 + 0.2;
    GeoMleConfig cfg;
    cfg.seed = 0xFFFFFFFFFFFFFFFFull;
    r.config = cfg;
    PointDiagnostics d;
    d.pointIndex = 3;
    d.localEstimate = -1.0 / 3.0;
    d.perK = {{10, 1.0 / 7.0, 2.5, 1e-300}, {11, 0.2, 2.6, 0.0}};
    d.eta = {1e-17, -4.25};
    d.droppedCells = 2;
    r.perPoint.push_back(d);
    r.failures.push_back({7, "DegenerateNeighborhood: zero distances"});

    const auto text = reportToJson(r).dump();
    EXPECT_EQ(reportFromJson(nlohmann::json::parse(text)), r);
}

TEST(Json, MleAndPcaConfigsRoundTrip) {
    for (MethodConfig cfg : {MethodConfig{MleConfig{7, MleAggregation::InverseMean, 1e-9}},
                             MethodConfig{PcaConfig{0.95}}}) {
        EstimateReport r;
        r.method = std::holds_alternative<MleConfig>(cfg) ? Method::MLE : Method::PCA;
        r.globalEstimate = 4.0;
        r.config = cfg;
        EXPECT_EQ(reportFromJson(reportToJson(r)), r);
    }
}

TEST(Csv, FormatParseRoundTrip) {
    Rng rng(9);
    for (int i = 0; i < 1000; ++i) {
        const double v = (rng.uniform() - 0.5) * std::pow(10.0, rng.uniform(-30, 30));
        double back;
        ASSERT_TRUE(parseDouble(formatDouble(v), back));
        ASSERT_EQ(back, v);
    }
    double x;
    EXPECT_FALSE(parseDouble("1.5abc", x));
    EXPECT_FALSE(parseDouble("", x));
    EXPECT_TRUE(parseDouble(" 2.5 ", x));
    EXPECT_EQ(x, 2.5);
}

TEST(Csv, HeaderDetectionAndErrors) {
    std::istringstream withHeader("x0,x1\n1,2\n3,4\n");
    const auto c = readPointCloudCsv(withHeader);
    EXPECT_EQ(c.size(), 2u);
    EXPECT_EQ(c.point(1)[0], 3.0);

    std::istringstream empty("");
    EXPECT_THROW(readPointCloudCsv(empty), DataError);
    std::istringstream ragged("1,2\n3\n");
    EXPECT_THROW(readPointCloudCsv(ragged), DataError);
    std::istringstream text("1,2\n3,abc\n");
    EXPECT_THROW(readPointCloudCsv(text), DataError);
}

TEST(Csv, WriteReadBitExact) {
    Rng rng(3);
    std::vector<double> v(60);
    for (auto& x : v) x = rng.normal() * 1e3;
    const PointCloud c(20, 3, v);
    for (bool header : {false, true}) {
        std::stringstream ss;
        writePointCloudCsv(ss, c, header);
        EXPECT_EQ(readPointCloudCsv(ss).values().size(), 60u);
        ss.clear();
        ss.seekg(0);
        const auto back = readPointCloudCsv(ss);
        EXPECT_TRUE(std::equal(back.values().begin(), back.values().end(), c.values().begin()));
    }
}

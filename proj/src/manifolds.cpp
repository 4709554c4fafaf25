#include <idest/manifolds.h>

#include <algorithm>
#include <cctype>
#include <cmath>
#include <numbers>

namespace idest {

namespace {

using std::numbers::pi;

constexpr std::uint64_t kSampleStream = 0;
constexpr std::uint64_t kFrameStream = 1;

struct KindName {
    ManifoldKind kind;
    const char* name;
};

constexpr KindName kKindNames[] = {
    {ManifoldKind::Affine, "affine"},
    {ManifoldKind::Norm, "norm"},
    {ManifoldKind::Uniform, "uniform"},
    {ManifoldKind::Sphere, "sphere"},
    {ManifoldKind::NonuniformSphere, "nonuniform_sphere"},
    {ManifoldKind::Helix1D, "helix1d"},
    {ManifoldKind::Helix2D, "helix2d"},
    {ManifoldKind::SwissRoll, "swissroll"},
    {ManifoldKind::Moebius, "moebius"},
    {ManifoldKind::Spiral, "spiral"},
    {ManifoldKind::Paraboloid, "paraboloid"},
    {ManifoldKind::Nonlinear, "nonlinear"},
    {ManifoldKind::CubeSurface, "cubic"},
};

std::string lower(std::string s) {
    std::transform(s.begin(), s.end(), s.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return s;
}

std::string describe(const ManifoldSpec& s) {
    return toString(s.kind) + "(m=" + std::to_string(s.intrinsicDim) + ", p=" + std::to_string(s.ambientDim) + ")";
}

int embeddedBlock(const ManifoldSpec& spec) {
    switch (spec.kind) {
    case ManifoldKind::Affine: return spec.intrinsicDim;
    case ManifoldKind::Sphere:
    case ManifoldKind::NonuniformSphere: return spec.intrinsicDim + 1;
    default: return 0;
    }
}

/// Writes a point given in its first `coords.size()` coordinates, zeros after.
void writePadded(std::vector<double>& out, std::size_t row, std::size_t p, std::initializer_list<double> coords) {
    std::size_t c = 0;
    for (double v : coords) out[row * p + c++] = v;
}

} // namespace

std::string toString(ManifoldKind kind) {
    for (const auto& kn : kKindNames) {
        if (kn.kind == kind) return kn.name;
    }
    return "?";
}

ManifoldKind parseManifoldKind(const std::string& s) {
    const std::string l = lower(s);
    for (const auto& kn : kKindNames) {
        if (l == kn.name) return kn.kind;
    }
    if (l == "roll" || l == "swiss_roll") return ManifoldKind::SwissRoll;
    if (l == "cubesurface" || l == "cube_surface") return ManifoldKind::CubeSurface;
    if (l == "nonuniformsphere") return ManifoldKind::NonuniformSphere;
    throw SpecError("unknown manifold kind '" + s + "'");
}

void validateSpec(const ManifoldSpec& spec) {
    const int m = spec.intrinsicDim;
    const int p = spec.ambientDim;
    if (spec.n < 2) throw SpecError("n >= 2 required");
    if (m < 1) throw SpecError("m >= 1 required");
    if (m > p) throw SpecError(describe(spec) + ": m <= p required");
    switch (spec.kind) {
    case ManifoldKind::Affine:
    case ManifoldKind::Norm:
    case ManifoldKind::Uniform: break;
    case ManifoldKind::Sphere:
    case ManifoldKind::NonuniformSphere:
    case ManifoldKind::CubeSurface:
        if (p < m + 1) throw SpecError(describe(spec) + ": requires p >= m+1");
        break;
    case ManifoldKind::Helix1D:
    case ManifoldKind::Spiral:
        if (m != 1) throw SpecError(describe(spec) + ": fixes m=1");
        if (p < 3) throw SpecError(describe(spec) + ": requires p >= 3");
        break;
    case ManifoldKind::Helix2D:
    case ManifoldKind::SwissRoll:
    case ManifoldKind::Moebius:
        if (m != 2) throw SpecError(describe(spec) + ": fixes m=2");
        if (p < 3) throw SpecError(describe(spec) + ": requires p >= 3");
        break;
    case ManifoldKind::Paraboloid:
        if (p != 3 * (m + 1)) throw SpecError(describe(spec) + ": requires p = 3(m+1)");
        break;
    case ManifoldKind::Nonlinear:
        if (p % (2 * m) != 0) throw SpecError(describe(spec) + ": requires p to be a multiple of 2m");
        break;
    }
}

Eigen::MatrixXd orthonormalFrame(int p, int m, Rng& rng) {
    Eigen::MatrixXd g(p, m);
    for (int c = 0; c < m; ++c) {
        for (int r = 0; r < p; ++r) g(r, c) = rng.normal();
    }
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(g);
    Eigen::MatrixXd q = qr.householderQ() * Eigen::MatrixXd::Identity(p, m);
    const Eigen::MatrixXd& r = qr.matrixQR();
    for (int c = 0; c < m; ++c) {
        if (r(c, c) < 0.0) q.col(c) = -q.col(c);
    }
    return q;
}

Eigen::MatrixXd embeddingFrame(const ManifoldSpec& spec) {
    validateSpec(spec);
    const int block = embeddedBlock(spec);
    if (block == 0) throw SpecError(describe(spec) + " is not embedded through a frame");
    Rng rng(spec.seed, kFrameStream);
    return orthonormalFrame(spec.ambientDim, block, rng);
}

LabeledCloud generate(const ManifoldSpec& spec) {
    validateSpec(spec);
    const auto n = static_cast<std::size_t>(spec.n);
    const auto p = static_cast<std::size_t>(spec.ambientDim);
    const int m = spec.intrinsicDim;
    std::vector<double> out(n * p, 0.0);
    Rng rng(spec.seed, kSampleStream);

    const int block = embeddedBlock(spec);
    Eigen::MatrixXd frame;
    Eigen::VectorXd offset = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(p));
    if (block > 0) {
        Rng frameRng(spec.seed, kFrameStream);
        frame = orthonormalFrame(spec.ambientDim, block, frameRng);
        if (spec.kind == ManifoldKind::Affine) {
            for (auto& v : offset) v = frameRng.uniform(-1.0, 1.0);
        }
    }
    Eigen::VectorXd local(block);
    auto embed = [&](std::size_t row) {
        const Eigen::VectorXd x = frame * local + offset;
        for (std::size_t c = 0; c < p; ++c) out[row * p + c] = x(static_cast<Eigen::Index>(c));
    };

    for (std::size_t i = 0; i < n; ++i) {
        switch (spec.kind) {
        case ManifoldKind::Affine:
            for (int d = 0; d < m; ++d) local(d) = rng.uniform(-2.5, 2.5);
            embed(i);
            break;
        case ManifoldKind::Norm:
            for (int d = 0; d < m; ++d) out[i * p + d] = rng.normal();
            break;
        case ManifoldKind::Uniform:
            for (int d = 0; d < m; ++d) out[i * p + d] = rng.uniform();
            break;
        case ManifoldKind::Sphere:
            for (int d = 0; d <= m; ++d) local(d) = rng.normal();
            local /= local.norm();
            embed(i);
            break;
        case ManifoldKind::NonuniformSphere:
            for (int d = 0; d < m; ++d) local(d) = rng.uniform(-1.0, 1.0);
            local(m) = 1.0;
            local /= local.norm();
            embed(i);
            break;
        case ManifoldKind::Helix1D: {
            const double t = rng.uniform(0.0, 2.0 * pi);
            const double r = 2.0 + std::cos(8.0 * t);
            writePadded(out, i, p, {r * std::cos(t), r * std::sin(t), std::sin(8.0 * t)});
            break;
        }
        case ManifoldKind::Helix2D: {
            const double r = rng.uniform(0.0, 10.0 * pi);
            const double s = rng.uniform(0.0, 10.0 * pi);
            writePadded(out, i, p, {r * std::cos(s), r * std::sin(s), 0.5 * s});
            break;
        }
        case ManifoldKind::SwissRoll: {
            const double t = rng.uniform(1.5 * pi, 4.5 * pi);
            const double h = rng.uniform(0.0, 21.0);
            writePadded(out, i, p, {t * std::cos(t), h, t * std::sin(t)});
            break;
        }
        case ManifoldKind::Moebius: {
            const double t = rng.uniform(0.0, 2.0 * pi);
            const double v = rng.uniform(-1.0, 1.0);
            const double r = 1.0 + 0.5 * v * std::cos(0.5 * t);
            writePadded(out, i, p, {r * std::cos(t), r * std::sin(t), 0.5 * v * std::sin(0.5 * t)});
            break;
        }
        case ManifoldKind::Spiral: {
            const double t = rng.uniform(0.0, 4.0 * pi);
            writePadded(out, i, p, {t * std::cos(t), t * std::sin(t), t});
            break;
        }
        case ManifoldKind::Paraboloid: {
            const double e0 = rng.exponential();
            double sq = 0.0;
            const auto dims = static_cast<std::size_t>(m + 1);
            std::vector<double> y(dims);
            for (int d = 0; d < m; ++d) {
                y[d] = 1.0 / (1.0 + rng.exponential() / e0);
                sq += y[d] * y[d];
            }
            y[m] = sq;
            for (std::size_t d = 0; d < dims; ++d) {
                out[i * p + d] = y[d];
                out[i * p + dims + d] = std::sin(y[d]);
                out[i * p + 2 * dims + d] = y[d] * y[d];
            }
            break;
        }
        case ManifoldKind::Nonlinear: {
            std::vector<double> u(static_cast<std::size_t>(m));
            for (auto& v : u) v = rng.uniform();
            const auto width = static_cast<std::size_t>(2 * m);
            for (std::size_t d = 0; d < static_cast<std::size_t>(m); ++d) {
                const double radius = u[(d + 1) % u.size()];
                const double angle = 2.0 * pi * u[d];
                out[i * p + 2 * d] = radius * std::cos(angle);
                out[i * p + 2 * d + 1] = radius * std::sin(angle);
            }
            for (std::size_t rep = 1; rep < p / width; ++rep) {
                std::copy_n(out.begin() + static_cast<std::ptrdiff_t>(i * p), width,
                            out.begin() + static_cast<std::ptrdiff_t>(i * p + rep * width));
            }
            break;
        }
        case ManifoldKind::CubeSurface: {
            for (int d = 0; d <= m; ++d) out[i * p + d] = rng.uniform();
            const auto face = rng.below(static_cast<std::uint64_t>(m + 1));
            out[i * p + face] = static_cast<double>(rng.below(2));
            break;
        }
        }
    }

    const std::string label = toString(spec.kind) + "-m" + std::to_string(m) + "-p" + std::to_string(p);
    return {PointCloud(n, p, std::move(out), label), m, spec};
}

LabeledCloud nonuniformSphere(int m, int p, int n, std::uint64_t seed) {
    return generate({ManifoldKind::NonuniformSphere, m, p, n, seed});
}

PointCloud addNoise(const PointCloud& cloud, double sigma, std::uint64_t seed) {
    if (!(sigma >= 0.0) || !std::isfinite(sigma)) throw ConfigError("noise sigma must be >= 0");
    if (sigma == 0.0) return cloud;
    Rng rng(seed, 0);
    std::vector<double> values(cloud.values().begin(), cloud.values().end());
    for (double& v : values) v += sigma * rng.normal();
    return PointCloud(cloud.size(), cloud.dim(), std::move(values), cloud.label());
}

} // namespace idest

#pragma once

#include <idest/core.h>
#include <idest/random.h>

#include <Eigen/Dense>

#include <cstdint>
#include <string>
#include <vector>

namespace idest {

enum class ManifoldKind {
    Affine,
    Norm,
    Uniform,
    Sphere,
    NonuniformSphere,
    Helix1D,
    Helix2D,
    SwissRoll,
    Moebius,
    Spiral,
    Paraboloid,
    Nonlinear,
    CubeSurface,
};

std::string toString(ManifoldKind kind);
/// Case-insensitive; also accepts the aliases "roll", "cubic", "nonuniformsphere".
ManifoldKind parseManifoldKind(const std::string& s);

struct ManifoldSpec {
    ManifoldKind kind = ManifoldKind::Sphere;
    int intrinsicDim = 1;
    int ambientDim = 2;
    int n = 1000;
    std::uint64_t seed = 0;

    bool operator==(const ManifoldSpec&) const = default;
};

struct LabeledCloud {
    PointCloud cloud;
    int trueDim;
    ManifoldSpec spec;
};

/// Throws SpecError for violated dimension constraints.
void validateSpec(const ManifoldSpec& spec);

/// Seeded sample of the manifold described by spec. Parameterizations:
///
///   Affine          u ~ U[-2.5, 2.5]^m, x = F u + b, F a random orthonormal p×m frame, b ~ U[-1, 1]^p
///   Norm            N(0, I_m) in the first m coordinates
///   Uniform         U[0, 1]^m in the first m coordinates
///   Sphere          g / |g|, g ~ N(0, I_{m+1}), embedded by a random orthonormal p×(m+1) frame
///   NonuniformSphere (u, 1) / |(u, 1)|, u ~ U[-1, 1]^m, embedded as Sphere
///   Helix1D         t ~ U[0, 2π): ((2 + cos 8t) cos t, (2 + cos 8t) sin t, sin 8t)
///   Helix2D         r, s ~ U[0, 10π]: (r cos s, r sin s, s / 2)
///   SwissRoll       t ~ U[3π/2, 9π/2], h ~ U[0, 21]: (t cos t, h, t sin t)
///   Moebius         t ~ U[0, 2π), v ~ U[-1, 1]: ((1 + v/2 cos t/2) cos t, (1 + v/2 cos t/2) sin t, v/2 sin t/2)
///   Spiral          t ~ U[0, 4π]: (t cos t, t sin t, t)
///   Paraboloid      p = 3(m+1); E ~ Exp(1)^{m+1}, y_i = (1 + E_i/E_0)^{-1}, y_{m+1} = |y|²,
///                   x = (y, sin y, y²)
///   Nonlinear       p = 2rm; u ~ U[0, 1]^m, block (u_{i+1} cos 2πu_i, u_{i+1} sin 2πu_i)_i
///                   (indices cyclic), repeated r times
///   CubeSurface     surface of [0, 1]^{m+1}: one random coordinate pinned to 0 or 1
///
/// Curves and surfaces given in R^3 are padded with zeros up to p.
LabeledCloud generate(const ManifoldSpec& spec);

/// NonuniformSphere shortcut.
LabeledCloud nonuniformSphere(int m, int p, int n, std::uint64_t seed);

/// i.i.d. N(0, sigma²) on every coordinate. sigma = 0 returns the input unchanged.
PointCloud addNoise(const PointCloud& cloud, double sigma, std::uint64_t seed);

/// Random p×m matrix with orthonormal columns (Householder QR of a Gaussian matrix).
Eigen::MatrixXd orthonormalFrame(int p, int m, Rng& rng);

/// Frame used by generate() for the kinds that embed through one (Affine,
/// Sphere, NonuniformSphere); exposed so tests can undo the embedding.
Eigen::MatrixXd embeddingFrame(const ManifoldSpec& spec);

} // namespace idest

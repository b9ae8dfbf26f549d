#pragma once

// Brane solutions: the NS-5-brane, superpositions built from quaternionic
// affine maps Q^2 -> Q, M-2/M-5 data, HKT residuals and field-equation
// residuals of the string common sector.

#include "hkt/exterior.hpp"
#include "hkt/geom.hpp"
#include "hkt/quat.hpp"

#include <array>
#include <cstdint>
#include <string>
#include <vector>

namespace hkt::brane {

using exterior::AltForm;
using exterior::FdOptions;
using exterior::FormField;
using exterior::MetricField;
using exterior::ScalarField;
using quat::Quaternion;

// u -> p1 u^1 + p2 u^2 - a with weight r; u = (x[0..3], x[4..7]).
struct TauMap {
    Quaternion p1, p2, a;
    double weight = 1.0;

    Quaternion operator()(const Vector& x) const;
    Matrix jacobian() const;  // 4 x 8, [L_p1 | L_p2]
};

// Affine map x -> A x - a to R^4 = Q with weight; TauMap is the
// quaternionic special case. Arbitrary maps are allowed so that
// non-quaternionic arrangements can be built for comparison.
struct LinearBrane {
    Matrix A;  // 4 x n
    Vector a;  // 4
    double weight = 1.0;

    Vector operator()(const Vector& x) const { return A * x - a; }
    // Euclidean distance from x to the affine plane A x = a.
    double distance(const Vector& x) const;
};

LinearBrane to_linear(const TauMap& t);

struct SuperpositionConfig {
    std::vector<TauMap> taus;
    double box_lo = -2.0;
    double box_hi = 2.0;
    FdOptions fd{};

    std::vector<LinearBrane> linear() const;
    double singular_clearance(const Vector& x) const;
    // Kernels of d tau pairwise transverse.
    bool general_position(double tol = 1e-9) const;
};

// Rejects (p1, p2) = 0 and non-positive weights.
void validate(const TauMap& t);

// Smallest class containing the normalized products conj(p1) p2 of every map.
quat::ParameterClass parameter_class(const SuperpositionConfig& cfg, double tol = 1e-9);

// Quaternionic line ker d tau with orientation induced by right
// multiplication through (1, i, j, k).
exterior::Plane kernel_plane(const TauMap& t);

struct Ns5Base {
    MetricField metric;   // |q|^-2 delta on R^4 - {0}
    FormField torsion;    // -1/2 *d(|q|^-2)
};

Ns5Base ns5_base();

// H = -1/2 *dh for a harmonic function with gradient dh (flat star).
AltForm ns5_torsion(const Vector& dh);

struct CommonSectorSolution {
    int dim = 0;
    MetricField metric;
    FormField torsion;
    ScalarField dilaton;
    int longitudinal_dim = 2;  // flat R^(1, longitudinal_dim - 1) factor, metadata only
    bool general_position = true;
    std::vector<std::string> warnings;
};

// Transverse data of the NS-5-brane: h delta, H = -1/2 *dh, e^{2 phi} = h
// with h = 1 + 1/|q|^2.
CommonSectorSolution ns5_solution();
double ns5_harmonic(const Vector& q);

Matrix build_metric(const SuperpositionConfig& cfg, const Vector& x);
AltForm build_torsion(const SuperpositionConfig& cfg, const Vector& x);
Matrix superposition_metric(const std::vector<LinearBrane>& branes, const Vector& x);
AltForm superposition_torsion(const std::vector<LinearBrane>& branes, const Vector& x);

CommonSectorSolution assemble_solution(const SuperpositionConfig& cfg);
CommonSectorSolution assemble_solution(const std::vector<LinearBrane>& branes, int dim = 8);

geom::TorsionConnection connection(const CommonSectorSolution& sol, int sign);

struct HktResidual {
    std::array<double, 3> per{};  // |d w_r - 2 s i_{J_r} H| (Euclidean coefficient norm)
    double max = 0;
};

// sign s = +1 tests the structure against the torsion of nabla^+, s = -1 against nabla^- (torsion -H).
HktResidual hkt_residual(const CommonSectorSolution& sol, const Vector& x, const quat::HypercomplexTriple& triple,
                         const FdOptions& fd = {}, int sign = +1);
HktResidual hkt_residual(const SuperpositionConfig& cfg, const Vector& x, const quat::HypercomplexTriple& triple,
                         int sign = +1);

// max_r |K_r^T g K_r - g|
double hermiticity_residual(const Matrix& g, const quat::HypercomplexTriple& triple);

// Left-multiplies by u = conj(q)/|q|^2 for the first nonzero q of (p1, p2).
TauMap normalize_tau(const TauMap& t);

enum class MKind { M2, M5 };
std::string to_string(MKind k);

struct MBraneSolution {
    MKind kind = MKind::M5;
    double q = 1.0;
    int transverse_dim = 5;
    int worldvolume_dim = 6;
    // ds^2 = h^{transverse_exponent} (h^{-1} ds^2(R^{1,p}) + ds^2(R^d))
    double transverse_exponent = 2.0 / 3.0;
    ScalarField harmonic;
    // M-5: F = -1/2 *dh on R^5 (degree 4). M-2: the transverse dual data
    // -1/2 *dh on R^8 (degree 7), F itself having legs along R^(1,2).
    FormField flux;
    bool flux_is_dual = false;
    // d(h^{-1}) on the transverse space: F = -1/2 dvol(R^(1,2)) ^ d(h^{-1}) for the M-2.
    FormField potential_gradient;

    // Warp factors (longitudinal, transverse) of the line element at y.
    std::pair<double, double> warp(const Vector& y) const;
};

MBraneSolution m_brane(MKind kind, double q);

struct FluxCharge {
    double integral = 0;       // raw integral of F over the outward-oriented S^4
    double normalization = 0;  // integral per unit q_5, 4 pi^2
    double charge = 0;         // integral / normalization
    double error_estimate = 0; // relative change against half resolution
};

// Throws std::invalid_argument for M-2 data (needs a gauge potential) or
// R <= 0, and std::runtime_error if the estimated quadrature error exceeds 1%.
FluxCharge flux_charge(const MBraneSolution& sol, double radius, int resolution = 24);

struct EomResidual {
    double einstein = 0;  // R_mn + 2 nabla_m nabla_n phi - H_mpq H_n^pq
    double h_field = 0;   // nabla^p (e^{-2 phi} H_pmn)
    double dilaton = 0;   // R + 4 nabla^2 phi - 4 |d phi|^2 - 1/3 H_abc H^abc
    double max() const { return std::max({einstein, h_field, dilaton}); }
};

inline constexpr FdOptions kEomFd{1e-3, false};

// Requires clearance > 3 * step.
EomResidual eom_residual(const CommonSectorSolution& sol, const Vector& x, const FdOptions& fd = kEomFd);

// Seeded low-discrepancy points in the box [lo, hi]^dim with clearance.
std::vector<Vector> sample_points(int dim, double lo, double hi, int count, std::uint64_t seed,
                                  const exterior::Clearance& clearance, double min_clearance);
std::vector<Vector> sample_points(const SuperpositionConfig& cfg, int count, std::uint64_t seed, double min_clearance);

struct FarTransport {
    std::vector<Vector> path;
    Vector far_point;
    double path_clearance = 0;
};

// Ray from x to |y| ~ far_radius avoiding the singular planes, log-spaced.
FarTransport ray_to_far_region(const SuperpositionConfig& cfg, const Vector& x, double far_radius = 1e3,
                               double min_clearance = 0.05);

// Curvature samples at x carried by parallel transport to the far end of
// the ray, where the metric is nearly flat: R -> P R P^{-1}.
std::vector<geom::CurvatureSample> transported_curvature(const SuperpositionConfig& cfg, int sign, const Vector& x,
                                                         const FdOptions& fd = geom::kCurvatureFd,
                                                         double far_radius = 1e3);

}  // namespace hkt::brane

#pragma once

// Metric connections with totally antisymmetric torsion, curvature,
// parallel transport and curvature-algebra membership tests.
//
// Index convention: nabla_{e_b} e_c = Gamma^a_{bc} e_a, so the first lower
// index is the differentiation direction. Gamma is stored per direction b
// as the matrix (Gamma_b)^a_c.

#include "hkt/exterior.hpp"
#include "hkt/quat.hpp"

#include <optional>
#include <string>
#include <vector>

namespace hkt::geom {

using exterior::AltForm;
using exterior::FdOptions;
using exterior::FormField;
using exterior::MetricField;

struct Gamma {
    std::vector<Matrix> dir;

    Gamma() = default;
    explicit Gamma(int n) : dir(n, Matrix::Zero(n, n)) {}

    int dim() const { return static_cast<int>(dir.size()); }
    double operator()(int a, int b, int c) const { return dir[b](a, c); }
    // Gamma(v) = sum_b v^b Gamma_b
    Matrix along(const Vector& v) const;
    double max_abs() const;

    Gamma& operator+=(const Gamma& o);
    Gamma& operator-=(const Gamma& o);
    Gamma& operator*=(double s);
};

// Levi-Civita connection; throws if g(x) is not positive-definite.
Gamma christoffel(const MetricField& g, const Vector& x, const FdOptions& fd = {});

// Connection D + sign * H: Gamma^a_{bc} = Gamma_LC^a_{bc} + sign * H^a_{cb}.
// Its torsion is -2 sign H and it preserves the metric.
struct TorsionConnection {
    MetricField metric;
    std::optional<FormField> torsion;
    int sign = +1;
};

Gamma connection_coeffs(const TorsionConnection& c, const Vector& x, const FdOptions& fd = {});

// (nabla_b J)^a_c for a constant endomorphism J, one matrix per direction b.
std::vector<Matrix> covariant_derivative_of_J(const TorsionConnection& c, const Matrix& J, const Vector& x,
                                              const FdOptions& fd = {});

// (nabla_b g)_{ac}, one matrix per direction b.
std::vector<Matrix> covariant_derivative_of_metric(const TorsionConnection& c, const Vector& x, const FdOptions& fd = {});

double max_abs(const std::vector<Matrix>& ms);

struct CurvatureSample {
    Vector x;
    int m = 0, n = 0;
    Matrix R;  // R(e_m, e_n) as an endomorphism
    Matrix g;  // metric at x
};

// Default curvature differencing: step 1e-3 with Richardson extrapolation.
inline constexpr FdOptions kCurvatureFd{1e-3, true};

CurvatureSample curvature(const TorsionConnection& c, const Vector& x, int m, int n, const FdOptions& fd = kCurvatureFd);
// All pairs m < n at once, in lexicographic order.
std::vector<CurvatureSample> curvature_all(const TorsionConnection& c, const Vector& x, const FdOptions& fd = kCurvatureFd);

// |g R + R^T g| / |R| (Frobenius).
double skew_residual(const CurvatureSample& s);

struct TransportOptions {
    int substeps = 1;  // RK4 steps per polyline segment
    FdOptions fd{};
};

// Solves dV/dt = -Gamma(x'(t)) V along the polyline, columns of frame being V(0).
Matrix parallel_transport(const TorsionConnection& c, const std::vector<Vector>& path, const Matrix& frame,
                          const TransportOptions& opts = {});

// Structures against which curvature is tested. I and J are the left and
// right triples; cayley is the Spin(7) form (degree 4, dimension 8).
struct Structures {
    quat::HypercomplexTriple I;
    quat::HypercomplexTriple J;
    std::optional<AltForm> cayley;
};

enum class Verdict { Member, NonMember, Inconclusive, Indeterminate };
std::string to_string(Verdict v);

inline constexpr double kMemberThreshold = 1e-3;
inline constexpr double kNonMemberThreshold = 1e-1;

Verdict judge(double residual, bool degenerate);

struct MembershipReport {
    double norm = 0;
    bool degenerate = false;  // |R| < 1e-10
    double sp2_I = 0;         // max_r |[R, I_r]| / |R|
    double sp2_J = 0;
    double u4 = 0;            // |[R, I_1]| / |R|
    double su4 = 0;           // max(u4, |tr(I_1 R)| / |R|)
    double spin7 = -1;        // |projection onto the 7-dim eigenspace| / |R|; -1 when no Cayley form
};

MembershipReport algebra_membership(const Matrix& R, const Matrix& g, const Structures& s);

// Matrix of beta -> *(Omega ^ beta) on 2-forms (Euclidean), in the
// increasing-pair basis.
Matrix spin7_operator(const AltForm& omega);

// Lowered curvature g R as a 2-form.
AltForm curvature_two_form(const Matrix& R, const Matrix& g);

// Rank of the span of a list of matrices (singular values above rel_tol * max).
int span_dimension(const std::vector<Matrix>& ms, double rel_tol = 1e-6);

}  // namespace hkt::geom

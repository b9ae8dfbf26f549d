#include "hkt/geom.hpp"

#include <cmath>
#include <stdexcept>

namespace hkt::geom {

using exterior::central_difference;
using exterior::require_clearance;

Matrix Gamma::along(const Vector& v) const {
    Matrix out = Matrix::Zero(dim(), dim());
    for (int b = 0; b < dim(); ++b)
        if (v[b] != 0) out += v[b] * dir[b];
    return out;
}

double Gamma::max_abs() const {
    double m = 0;
    for (const auto& d : dir) m = std::max(m, d.cwiseAbs().maxCoeff());
    return m;
}

Gamma& Gamma::operator+=(const Gamma& o) {
    for (int b = 0; b < dim(); ++b) dir[b] += o.dir[b];
    return *this;
}

Gamma& Gamma::operator-=(const Gamma& o) {
    for (int b = 0; b < dim(); ++b) dir[b] -= o.dir[b];
    return *this;
}

Gamma& Gamma::operator*=(double s) {
    for (auto& d : dir) d *= s;
    return *this;
}

namespace {

Matrix checked_inverse(const Matrix& g) {
    Eigen::LLT<Matrix> llt(g);
    if (llt.info() != Eigen::Success) throw std::domain_error("metric is not positive-definite at this point");
    return llt.solve(Matrix::Identity(g.rows(), g.cols()));
}

}  // namespace

Gamma christoffel(const MetricField& g, const Vector& x, const FdOptions& fd) {
    require_clearance(g.clearance(x), fd.step, 2.0, "christoffel");
    const int n = g.dim();
    const Matrix ginv = checked_inverse(g(x));
    std::vector<Matrix> dg(n);  // dg[c](a, b) = d_c g_ab
    for (int c = 0; c < n; ++c) dg[c] = central_difference<Matrix>(g, x, c, fd);
    Gamma out(n);
    Matrix low(n, n);
    for (int b = 0; b < n; ++b) {
        // low(d, c) = 1/2 (d_b g_dc + d_c g_db - d_d g_bc)
        for (int d = 0; d < n; ++d)
            for (int c = 0; c < n; ++c) low(d, c) = 0.5 * (dg[b](d, c) + dg[c](d, b) - dg[d](b, c));
        out.dir[b] = ginv * low;
    }
    return out;
}

Gamma connection_coeffs(const TorsionConnection& c, const Vector& x, const FdOptions& fd) {
    Gamma out = christoffel(c.metric, x, fd);
    if (!c.torsion) return out;
    const int n = out.dim();
    const AltForm H = (*c.torsion)(x);
    if (H.degree() != 3 || H.dim() != n) throw std::invalid_argument("connection_coeffs: torsion must be a 3-form on the chart");
    const Matrix ginv = checked_inverse(c.metric(x));
    Matrix low(n, n);
    for (int b = 0; b < n; ++b) {
        // sign * H^a_{cb} = -sign * g^{ad} H_{dbc}
        for (int d = 0; d < n; ++d)
            for (int cc = 0; cc < n; ++cc) low(d, cc) = (d == b || cc == b || d == cc) ? 0.0 : H.component({d, b, cc});
        out.dir[b] -= c.sign * ginv * low;
    }
    return out;
}

std::vector<Matrix> covariant_derivative_of_J(const TorsionConnection& c, const Matrix& J, const Vector& x,
                                              const FdOptions& fd) {
    const Gamma G = connection_coeffs(c, x, fd);
    std::vector<Matrix> out(G.dim());
    for (int b = 0; b < G.dim(); ++b) out[b] = G.dir[b] * J - J * G.dir[b];
    return out;
}

std::vector<Matrix> covariant_derivative_of_metric(const TorsionConnection& c, const Vector& x, const FdOptions& fd) {
    const Gamma G = connection_coeffs(c, x, fd);
    const Matrix g = c.metric(x);
    std::vector<Matrix> out(G.dim());
    for (int b = 0; b < G.dim(); ++b) {
        const Matrix dg = central_difference<Matrix>(c.metric, x, b, fd);
        const Matrix lowG = g * G.dir[b];  // Gamma_{d b a} with rows d, cols a
        out[b] = dg - lowG.transpose() - lowG;
    }
    return out;
}

double max_abs(const std::vector<Matrix>& ms) {
    double m = 0;
    for (const auto& a : ms) m = std::max(m, a.cwiseAbs().maxCoeff());
    return m;
}

std::vector<CurvatureSample> curvature_all(const TorsionConnection& c, const Vector& x, const FdOptions& fd) {
    require_clearance(c.metric.clearance(x), fd.step, 3.0, "curvature");
    const int n = c.metric.dim();
    const Gamma G = connection_coeffs(c, x, fd);
    auto coeffs = [&](const Vector& y) { return connection_coeffs(c, y, fd); };
    std::vector<Gamma> dG(n);
    for (int m = 0; m < n; ++m) dG[m] = central_difference<Gamma>(coeffs, x, m, fd);
    const Matrix g = c.metric(x);
    std::vector<CurvatureSample> out;
    for (int m = 0; m < n; ++m)
        for (int k = m + 1; k < n; ++k) {
            CurvatureSample s;
            s.x = x;
            s.m = m;
            s.n = k;
            s.R = dG[m].dir[k] - dG[k].dir[m] + G.dir[m] * G.dir[k] - G.dir[k] * G.dir[m];
            s.g = g;
            out.push_back(std::move(s));
        }
    return out;
}

CurvatureSample curvature(const TorsionConnection& c, const Vector& x, int m, int n, const FdOptions& fd) {
    const int dim = c.metric.dim();
    if (m < 0 || n < 0 || m >= dim || n >= dim) throw std::invalid_argument("curvature: axis out of range");
    require_clearance(c.metric.clearance(x), fd.step, 3.0, "curvature");
    const Gamma G = connection_coeffs(c, x, fd);
    auto coeffs = [&](const Vector& y) { return connection_coeffs(c, y, fd); };
    CurvatureSample s;
    s.x = x;
    s.m = m;
    s.n = n;
    s.g = c.metric(x);
    if (m == n) {
        s.R = Matrix::Zero(dim, dim);
        return s;
    }
    const Gamma dm = central_difference<Gamma>(coeffs, x, m, fd);
    const Gamma dn = central_difference<Gamma>(coeffs, x, n, fd);
    s.R = dm.dir[n] - dn.dir[m] + G.dir[m] * G.dir[n] - G.dir[n] * G.dir[m];
    return s;
}

double skew_residual(const CurvatureSample& s) {
    const double nr = s.R.norm();
    if (nr == 0) return 0;
    return (s.g * s.R + s.R.transpose() * s.g).norm() / nr;
}

Matrix parallel_transport(const TorsionConnection& c, const std::vector<Vector>& path, const Matrix& frame,
                          const TransportOptions& opts) {
    if (opts.substeps < 1) throw std::invalid_argument("parallel_transport: substeps must be positive");
    Matrix V = frame;
    auto rhs = [&](const Vector& y, const Vector& v, const Matrix& W) -> Matrix {
        return -(connection_coeffs(c, y, opts.fd).along(v) * W);
    };
    for (std::size_t s = 0; s + 1 < path.size(); ++s) {
        const Vector d = (path[s + 1] - path[s]) / opts.substeps;
        for (int k = 0; k < opts.substeps; ++k) {
            const Vector y = path[s] + k * d;
            const Matrix k1 = rhs(y, d, V);
            const Matrix k2 = rhs(y + 0.5 * d, d, V + 0.5 * k1);
            const Matrix k3 = rhs(y + 0.5 * d, d, V + 0.5 * k2);
            const Matrix k4 = rhs(y + d, d, V + k3);
            V += (k1 + 2 * k2 + 2 * k3 + k4) / 6.0;
        }
    }
    return V;
}

std::string to_string(Verdict v) {
    switch (v) {
        case Verdict::Member: return "pass";
        case Verdict::NonMember: return "fail";
        case Verdict::Inconclusive: return "inconclusive";
        case Verdict::Indeterminate: return "indeterminate";
    }
    return "?";
}

Verdict judge(double residual, bool degenerate) {
    if (degenerate) return Verdict::Indeterminate;
    if (residual < kMemberThreshold) return Verdict::Member;
    if (residual > kNonMemberThreshold) return Verdict::NonMember;
    return Verdict::Inconclusive;
}

AltForm curvature_two_form(const Matrix& R, const Matrix& g) {
    const Matrix low = g * R;
    const int n = static_cast<int>(R.rows());
    AltForm b(n, 2);
    for (int s = 0; s < b.size(); ++s) {
        const auto& I = b.indices(s);
        b.coeff(s) = 0.5 * (low(I[0], I[1]) - low(I[1], I[0]));
    }
    return b;
}

Matrix spin7_operator(const AltForm& omega) {
    const int n = omega.dim();
    const Matrix delta = Matrix::Identity(n, n);
    AltForm e(n, 2);
    Matrix T(e.size(), e.size());
    for (int t = 0; t < e.size(); ++t) {
        AltForm basis(n, 2);
        basis.coeff(t) = 1.0;
        const AltForm img = exterior::hodge_star(delta, exterior::wedge(omega, basis));
        for (int s = 0; s < e.size(); ++s) T(s, t) = img.coeff(s);
    }
    return T;
}

namespace {

double commutator_residual(const Matrix& R, const quat::HypercomplexTriple& t, double nr) {
    double m = 0;
    for (int r = 0; r < 3; ++r) m = std::max(m, (R * t[r] - t[r] * R).norm() / nr);
    return m;
}

double spin7_residual(const Matrix& R, const Matrix& g, const AltForm& omega) {
    // Work in the g-orthonormal frame E = L^{-T}, g = L L^T.
    Eigen::LLT<Matrix> llt(g);
    if (llt.info() != Eigen::Success) throw std::domain_error("algebra_membership: metric not positive-definite");
    const Matrix L = llt.matrixL();
    const Matrix E = L.transpose().triangularView<Eigen::Upper>().solve(Matrix::Identity(g.rows(), g.cols()));
    const Matrix Rt = L.transpose() * R * E;
    const AltForm om = exterior::pullback(E, omega);
    const AltForm beta = curvature_two_form(Rt, Matrix::Identity(g.rows(), g.cols()));
    Eigen::SelfAdjointEigenSolver<Matrix> eig(spin7_operator(om));
    Vector b(beta.size());
    for (int s = 0; s < beta.size(); ++s) b[s] = beta.coeff(s);
    const Vector c = eig.eigenvectors().transpose() * b;
    double seven = 0;
    for (int s = 0; s < c.size(); ++s)
        if (eig.eigenvalues()[s] > 1.0) seven += c[s] * c[s];
    const double total = b.squaredNorm();
    return total > 0 ? std::sqrt(seven / total) : 0.0;
}

}  // namespace

MembershipReport algebra_membership(const Matrix& R, const Matrix& g, const Structures& s) {
    MembershipReport rep;
    rep.norm = R.norm();
    rep.degenerate = rep.norm < 1e-10;
    if (rep.degenerate) return rep;
    const double nr = rep.norm;
    rep.sp2_I = commutator_residual(R, s.I, nr);
    rep.sp2_J = commutator_residual(R, s.J, nr);
    rep.u4 = (R * s.I[0] - s.I[0] * R).norm() / nr;
    rep.su4 = std::max(rep.u4, std::abs((s.I[0] * R).trace()) / nr);
    if (s.cayley) rep.spin7 = spin7_residual(R, g, *s.cayley);
    return rep;
}

int span_dimension(const std::vector<Matrix>& ms, double rel_tol) {
    if (ms.empty()) return 0;
    const auto sz = ms[0].size();
    Matrix A(sz, static_cast<Eigen::Index>(ms.size()));
    for (std::size_t i = 0; i < ms.size(); ++i) A.col(static_cast<Eigen::Index>(i)) = ms[i].reshaped();
    Eigen::JacobiSVD<Matrix> svd(A);
    const auto& sv = svd.singularValues();
    if (sv.size() == 0 || sv[0] == 0) return 0;
    int r = 0;
    for (int i = 0; i < sv.size(); ++i)
        if (sv[i] > rel_tol * sv[0]) ++r;
    return r;
}

}  // namespace hkt::geom

#include "hkt/brane.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>

namespace hkt::brane {

using exterior::hodge_star;
using exterior::pullback;

Quaternion TauMap::operator()(const Vector& x) const {
    const Quaternion u1{x[0], x[1], x[2], x[3]};
    const Quaternion u2{x[4], x[5], x[6], x[7]};
    return p1 * u1 + p2 * u2 - a;
}

Matrix TauMap::jacobian() const {
    Matrix J(4, 8);
    J.leftCols<4>() = quat::left_matrix(p1);
    J.rightCols<4>() = quat::left_matrix(p2);
    return J;
}

double LinearBrane::distance(const Vector& x) const {
    const Vector r = A * x - a;
    const Matrix AAt = A * A.transpose();
    return std::sqrt(std::max(0.0, r.dot(AAt.llt().solve(r))));
}

LinearBrane to_linear(const TauMap& t) { return {t.jacobian(), t.a.vec(), t.weight}; }

void validate(const TauMap& t) {
    if (t.p1.norm2() == 0 && t.p2.norm2() == 0) throw std::invalid_argument("degenerate tau: (p1, p2) = (0, 0)");
    if (!(t.weight > 0)) throw std::invalid_argument("tau weight must be positive");
}

std::vector<LinearBrane> SuperpositionConfig::linear() const {
    std::vector<LinearBrane> out;
    out.reserve(taus.size());
    for (const auto& t : taus) out.push_back(to_linear(t));
    return out;
}

double SuperpositionConfig::singular_clearance(const Vector& x) const {
    double d = std::numeric_limits<double>::infinity();
    for (const auto& t : taus) {
        const double s = std::sqrt(t.p1.norm2() + t.p2.norm2());
        d = std::min(d, t(x).norm() / s);
    }
    return d;
}

bool SuperpositionConfig::general_position(double tol) const {
    for (std::size_t i = 0; i < taus.size(); ++i)
        for (std::size_t j = i + 1; j < taus.size(); ++j) {
            Matrix M(8, 8);
            M.topRows<4>() = taus[i].jacobian();
            M.bottomRows<4>() = taus[j].jacobian();
            Eigen::JacobiSVD<Matrix> svd(M);
            const auto& sv = svd.singularValues();
            if (sv[7] <= tol * sv[0]) return false;
        }
    return true;
}

quat::ParameterClass parameter_class(const SuperpositionConfig& cfg, double tol) {
    using quat::ParameterClass;
    std::vector<Quaternion> products;
    for (const auto& t : cfg.taus) {
        Quaternion c = t.p1.conj() * t.p2;
        const double n = c.norm();
        products.push_back(n > 0 ? (1.0 / n) * c : c);
    }
    for (ParameterClass k : {ParameterClass::Real, ParameterClass::Complex, ParameterClass::ImaginaryQuaternion}) {
        bool all = true;
        for (const auto& c : products) all = all && quat::contains(k, c, tol);
        if (all) return k;
    }
    return ParameterClass::Quaternion;
}

exterior::Plane kernel_plane(const TauMap& t) {
    validate(t);
    // (x q, y q) with p1 x + p2 y = 0, q running through the basis
    Quaternion x, y;
    if (t.p1.norm2() >= t.p2.norm2()) {
        x = -(t.p1.conj() * t.p2);
        y = Quaternion{t.p1.norm2(), 0, 0, 0};
    } else {
        x = Quaternion{t.p2.norm2(), 0, 0, 0};
        y = -(t.p2.conj() * t.p1);
    }
    const std::array<Quaternion, 4> basis = {Quaternion::one(), Quaternion::i(), Quaternion::j(), Quaternion::k()};
    Matrix cols(8, 4);
    for (int b = 0; b < 4; ++b) {
        cols.col(b).head<4>() = (x * basis[b]).vec();
        cols.col(b).tail<4>() = (y * basis[b]).vec();
    }
    return exterior::Plane::span(cols);
}

AltForm ns5_torsion(const Vector& dh) {
    const int n = static_cast<int>(dh.size());
    AltForm d(n, 1);
    for (int a = 0; a < n; ++a) d.coeff(a) = dh[a];
    return -0.5 * hodge_star(Matrix::Identity(n, n), d);
}

namespace {

double norm_clearance(const Vector& q) { return q.norm(); }

}  // namespace

Ns5Base ns5_base() {
    Ns5Base b;
    b.metric = MetricField(
        4, [](const Vector& q) -> Matrix { return Matrix::Identity(4, 4) / q.squaredNorm(); }, norm_clearance);
    b.torsion = FormField(
        4,
        [](const Vector& q) {
            const double r2 = q.squaredNorm();
            return ns5_torsion(-2.0 * q / (r2 * r2));
        },
        norm_clearance);
    return b;
}

double ns5_harmonic(const Vector& q) {
    if (q.squaredNorm() == 0) throw SingularityError("NS-5 harmonic function evaluated at the origin");
    return 1.0 + 1.0 / q.squaredNorm();
}

CommonSectorSolution ns5_solution() {
    CommonSectorSolution s;
    s.dim = 4;
    s.longitudinal_dim = 6;
    s.metric = MetricField(
        4, [](const Vector& q) -> Matrix { return ns5_harmonic(q) * Matrix::Identity(4, 4); }, norm_clearance);
    s.torsion = FormField(
        4,
        [](const Vector& q) {
            const double r2 = q.squaredNorm();
            return ns5_torsion(-2.0 * q / (r2 * r2));
        },
        norm_clearance);
    s.dilaton = ScalarField(4, [](const Vector& q) { return 0.5 * std::log(ns5_harmonic(q)); }, norm_clearance);
    return s;
}

Matrix superposition_metric(const std::vector<LinearBrane>& branes, const Vector& x) {
    const auto n = x.size();
    Matrix g = Matrix::Identity(n, n);
    for (const auto& b : branes) {
        const double q2 = (b.A * x - b.a).squaredNorm();
        if (q2 == 0) throw SingularityError("metric evaluated on a singular plane");
        g += (b.weight * b.weight / q2) * (b.A.transpose() * b.A);
    }
    return g;
}

AltForm superposition_torsion(const std::vector<LinearBrane>& branes, const Vector& x) {
    const int n = static_cast<int>(x.size());
    AltForm H(n, 3);
    for (const auto& b : branes) {
        const Vector q = b.A * x - b.a;
        const double q2 = q.squaredNorm();
        if (q2 == 0) throw SingularityError("torsion evaluated on a singular plane");
        H += (b.weight * b.weight) * pullback(b.A, ns5_torsion(-2.0 * q / (q2 * q2)));
    }
    return H;
}

Matrix build_metric(const SuperpositionConfig& cfg, const Vector& x) {
    if (x.size() != 8) throw std::invalid_argument("build_metric: point must lie in R^8");
    if (!(cfg.singular_clearance(x) > 0)) throw SingularityError("build_metric: point on a singular plane");
    return superposition_metric(cfg.linear(), x);
}

AltForm build_torsion(const SuperpositionConfig& cfg, const Vector& x) {
    if (x.size() != 8) throw std::invalid_argument("build_torsion: point must lie in R^8");
    if (!(cfg.singular_clearance(x) > 0)) throw SingularityError("build_torsion: point on a singular plane");
    return superposition_torsion(cfg.linear(), x);
}

CommonSectorSolution assemble_solution(const std::vector<LinearBrane>& branes, int dim) {
    CommonSectorSolution s;
    s.dim = dim;
    s.longitudinal_dim = 2;
    auto clear = [branes](const Vector& x) {
        double d = std::numeric_limits<double>::infinity();
        for (const auto& b : branes) d = std::min(d, b.distance(x));
        return d;
    };
    s.metric = MetricField(dim, [branes](const Vector& x) { return superposition_metric(branes, x); }, clear);
    s.torsion = FormField(dim, [branes](const Vector& x) { return superposition_torsion(branes, x); }, clear);
    s.dilaton = ScalarField(
        dim, [branes](const Vector& x) { return 0.125 * std::log(superposition_metric(branes, x).determinant()); }, clear);
    return s;
}

CommonSectorSolution assemble_solution(const SuperpositionConfig& cfg) {
    for (const auto& t : cfg.taus) validate(t);
    CommonSectorSolution s;
    s.dim = 8;
    s.longitudinal_dim = 2;
    auto clear = [cfg](const Vector& x) { return cfg.singular_clearance(x); };
    const auto branes = cfg.linear();
    s.metric = MetricField(8, [branes](const Vector& x) { return superposition_metric(branes, x); }, clear);
    s.torsion = FormField(8, [branes](const Vector& x) { return superposition_torsion(branes, x); }, clear);
    s.dilaton = ScalarField(
        8, [branes](const Vector& x) { return 0.125 * std::log(superposition_metric(branes, x).determinant()); }, clear);
    s.general_position = cfg.general_position();
    if (cfg.taus.empty()) s.warnings.push_back("empty tau list: flat solution");
    if (!s.general_position) s.warnings.push_back("singular planes not in general position; solution may be incomplete");
    return s;
}

geom::TorsionConnection connection(const CommonSectorSolution& sol, int sign) { return {sol.metric, sol.torsion, sign}; }

HktResidual hkt_residual(const CommonSectorSolution& sol, const Vector& x, const quat::HypercomplexTriple& triple,
                         const FdOptions& fd, int sign) {
    if (triple.dim != sol.dim) throw std::invalid_argument("hkt_residual: triple dimension mismatch");
    if (sign != 1 && sign != -1) throw std::invalid_argument("hkt_residual: sign must be +1 or -1");
    HktResidual out;
    const AltForm H = sol.torsion(x);
    for (int r = 0; r < 3; ++r) {
        const Matrix J = triple[r];
        const MetricField& g = sol.metric;
        FormField omega(sol.dim, [g, J](const Vector& y) { return exterior::kahler_form(J, g(y)); }, g.clearance_rule());
        AltForm res = exterior::exterior_derivative(omega, x, fd);
        res -= 2.0 * sign * exterior::j_derivation(J, H);
        out.per[r] = res.euclidean_norm();
        out.max = std::max(out.max, out.per[r]);
    }
    return out;
}

HktResidual hkt_residual(const SuperpositionConfig& cfg, const Vector& x, const quat::HypercomplexTriple& triple,
                         int sign) {
    return hkt_residual(assemble_solution(cfg), x, triple, cfg.fd, sign);
}

double hermiticity_residual(const Matrix& g, const quat::HypercomplexTriple& triple) {
    double m = 0;
    for (int r = 0; r < 3; ++r)
        m = std::max(m, (triple[r].transpose() * g * triple[r] - g).cwiseAbs().maxCoeff());
    return m;
}

TauMap normalize_tau(const TauMap& t) {
    validate(t);
    const Quaternion q = t.p1.norm2() > 0 ? t.p1 : t.p2;
    const Quaternion u = q.inverse();
    TauMap out = t;
    out.p1 = u * t.p1;
    out.p2 = u * t.p2;
    out.a = u * t.a;
    if (t.p1.norm2() > 0) out.p1 = Quaternion::one();
    else out.p2 = Quaternion::one();
    return out;
}

std::string to_string(MKind k) { return k == MKind::M2 ? "M2" : "M5"; }

std::pair<double, double> MBraneSolution::warp(const Vector& y) const {
    const double h = harmonic(y);
    return {std::pow(h, transverse_exponent - 1.0), std::pow(h, transverse_exponent)};
}

MBraneSolution m_brane(MKind kind, double q) {
    if (!(q > 0)) throw std::invalid_argument("m_brane: charge parameter must be positive");
    MBraneSolution s;
    s.kind = kind;
    s.q = q;
    const int d = kind == MKind::M2 ? 8 : 5;
    const int p = d - 2;  // h = 1 + q / |y|^p
    s.transverse_dim = d;
    s.worldvolume_dim = 11 - d;
    s.transverse_exponent = kind == MKind::M2 ? 1.0 / 3.0 : 2.0 / 3.0;
    s.flux_is_dual = kind == MKind::M2;
    auto clear = [](const Vector& y) { return y.norm(); };
    s.harmonic = ScalarField(d, [q, p](const Vector& y) { return 1.0 + q / std::pow(y.norm(), p); }, clear);
    auto grad = [q, p](const Vector& y) -> Vector {
        const double r = y.norm();
        return (-p * q / std::pow(r, p + 2)) * y;
    };
    s.flux = FormField(d, [grad](const Vector& y) { return ns5_torsion(grad(y)); }, clear);
    s.potential_gradient = FormField(
        d,
        [grad, q, p, d](const Vector& y) {
            const double h = 1.0 + q / std::pow(y.norm(), p);
            const Vector g = -grad(y) / (h * h);
            AltForm a(d, 1);
            for (int i = 0; i < d; ++i) a.coeff(i) = g[i];
            return a;
        },
        clear);
    return s;
}

namespace {

struct Gauss {
    std::vector<double> x, w;
};

// Gauss-Legendre rule on [-1, 1].
Gauss gauss_legendre(int n) {
    Gauss g;
    g.x.resize(n);
    g.w.resize(n);
    for (int i = 0; i < n; ++i) {
        double z = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
        double dp = 0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1, p1 = z;
            for (int k = 2; k <= n; ++k) {
                const double p2 = ((2 * k - 1) * z * p1 - (k - 1) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            dp = n * (z * p1 - p0) / (z * z - 1);
            const double dz = p1 / dp;
            z -= dz;
            if (std::abs(dz) < 1e-15) break;
        }
        g.x[i] = z;
        g.w[i] = 2 / ((1 - z * z) * dp * dp);
    }
    return g;
}

double sphere_integral(const MBraneSolution& sol, double R, int N) {
    const Gauss gl = gauss_legendre(N);
    const int M = 2 * N;
    const double pi = std::numbers::pi;
    double total = 0;
    Matrix frame(5, 4), full(5, 5);
    for (int i1 = 0; i1 < N; ++i1) {
        const double t1 = 0.5 * pi * (gl.x[i1] + 1), w1 = 0.5 * pi * gl.w[i1];
        for (int i2 = 0; i2 < N; ++i2) {
            const double t2 = 0.5 * pi * (gl.x[i2] + 1), w2 = 0.5 * pi * gl.w[i2];
            for (int i3 = 0; i3 < N; ++i3) {
                const double t3 = 0.5 * pi * (gl.x[i3] + 1), w3 = 0.5 * pi * gl.w[i3];
                for (int i4 = 0; i4 < M; ++i4) {
                    const double t4 = 2 * pi * i4 / M, w4 = 2 * pi / M;
                    const double c1 = std::cos(t1), s1 = std::sin(t1), c2 = std::cos(t2), s2 = std::sin(t2);
                    const double c3 = std::cos(t3), s3 = std::sin(t3), c4 = std::cos(t4), s4 = std::sin(t4);
                    Vector y(5);
                    y << c1, s1 * c2, s1 * s2 * c3, s1 * s2 * s3 * c4, s1 * s2 * s3 * s4;
                    // columns: d/dt1 .. d/dt4 of the unit-sphere embedding
                    frame.col(0) << -s1, c1 * c2, c1 * s2 * c3, c1 * s2 * s3 * c4, c1 * s2 * s3 * s4;
                    frame.col(1) << 0, -s1 * s2, s1 * c2 * c3, s1 * c2 * s3 * c4, s1 * c2 * s3 * s4;
                    frame.col(2) << 0, 0, -s1 * s2 * s3, s1 * s2 * c3 * c4, s1 * s2 * c3 * s4;
                    frame.col(3) << 0, 0, 0, -s1 * s2 * s3 * s4, s1 * s2 * s3 * c4;
                    full.col(0) = y;
                    full.rightCols<4>() = frame;
                    const double orient = full.determinant() >= 0 ? 1.0 : -1.0;
                    const AltForm F = sol.flux(R * y);
                    total += orient * F(R * frame) * w1 * w2 * w3 * w4;
                }
            }
        }
    }
    return total;
}

}  // namespace

FluxCharge flux_charge(const MBraneSolution& sol, double radius, int resolution) {
    if (sol.kind != MKind::M5) throw std::invalid_argument("flux_charge: the M-2 charge needs a gauge potential; only M-5 is supported");
    if (!(radius > 0)) throw std::invalid_argument("flux_charge: radius must be positive");
    if (resolution < 2) throw std::invalid_argument("flux_charge: resolution must be at least 2");
    FluxCharge out;
    out.integral = sphere_integral(sol, radius, resolution);
    const double coarse = sphere_integral(sol, radius, std::max(1, resolution / 2));
    out.error_estimate = std::abs(out.integral - coarse) / std::max(std::abs(out.integral), 1e-300);
    if (out.error_estimate > 0.01) throw std::runtime_error("flux_charge: quadrature resolution too coarse");
    out.normalization = 4 * std::numbers::pi * std::numbers::pi;
    out.charge = out.integral / out.normalization;
    return out;
}

namespace {

// Full antisymmetric tensor T[(a * n + b) * n + c] of a 3-form.
std::vector<double> full3(const AltForm& H) {
    const int n = H.dim();
    std::vector<double> T(static_cast<std::size_t>(n) * n * n, 0.0);
    for (int s = 0; s < H.size(); ++s) {
        const auto& I = H.indices(s);
        const double v = H.coeff(s);
        const int a = I[0], b = I[1], c = I[2];
        auto at = [&](int i, int j, int k) -> double& { return T[(static_cast<std::size_t>(i) * n + j) * n + k]; };
        at(a, b, c) = v;
        at(b, c, a) = v;
        at(c, a, b) = v;
        at(b, a, c) = -v;
        at(a, c, b) = -v;
        at(c, b, a) = -v;
    }
    return T;
}

}  // namespace

EomResidual eom_residual(const CommonSectorSolution& sol, const Vector& x, const FdOptions& fd) {
    exterior::require_clearance(sol.metric.clearance(x), fd.step, 3.0, "eom_residual");
    const int n = sol.dim;
    const double h = fd.step;
    const Matrix g = sol.metric(x);
    const Matrix gi = g.inverse();
    const geom::Gamma G = geom::christoffel(sol.metric, x, fd);
    auto lc = [&](const Vector& y) { return geom::christoffel(sol.metric, y, fd); };
    std::vector<geom::Gamma> dG(n);
    for (int m = 0; m < n; ++m) dG[m] = exterior::central_difference<geom::Gamma>(lc, x, m, fd);

    // Ric_cn = sum_a R(e_a, e_n)^a_c
    Matrix Ric = Matrix::Zero(n, n);
    for (int a = 0; a < n; ++a)
        for (int k = 0; k < n; ++k) {
            if (a == k) continue;
            const Matrix R = dG[a].dir[k] - dG[k].dir[a] + G.dir[a] * G.dir[k] - G.dir[k] * G.dir[a];
            Ric.col(k) += R.row(a).transpose();
        }
    const double scalar = (gi.array() * Ric.array()).sum();

    // dilaton derivatives
    const double phi0 = sol.dilaton(x);
    Vector dphi(n);
    Matrix hess(n, n);
    for (int a = 0; a < n; ++a) {
        Vector xp = x, xm = x;
        xp[a] += h;
        xm[a] -= h;
        const double fp = sol.dilaton(xp), fm = sol.dilaton(xm);
        dphi[a] = (fp - fm) / (2 * h);
        hess(a, a) = (fp - 2 * phi0 + fm) / (h * h);
        for (int b = a + 1; b < n; ++b) {
            Vector pp = xp, pm = xp, mp = xm, mm = xm;
            pp[b] += h;
            pm[b] -= h;
            mp[b] += h;
            mm[b] -= h;
            hess(a, b) = hess(b, a) =
                (sol.dilaton(pp) - sol.dilaton(pm) - sol.dilaton(mp) + sol.dilaton(mm)) / (4 * h * h);
        }
    }
    Matrix ddphi = hess;
    for (int m = 0; m < n; ++m)
        for (int k = 0; k < n; ++k) ddphi(m, k) -= G.dir[m].col(k).dot(dphi);
    const double lap = (gi.array() * ddphi.array()).sum();
    const double grad2 = dphi.dot(gi * dphi);

    // torsion contractions
    const std::vector<double> T = full3(sol.torsion(x));
    auto idx = [n](int a, int b, int c) { return (static_cast<std::size_t>(a) * n + b) * n + c; };
    Matrix HH = Matrix::Zero(n, n);
    for (int m = 0; m < n; ++m)
        for (int k = 0; k < n; ++k) {
            double s = 0;
            for (int p = 0; p < n; ++p)
                for (int q = 0; q < n; ++q) {
                    const double tm = T[idx(m, p, q)];
                    if (tm == 0) continue;
                    for (int r = 0; r < n; ++r)
                        for (int t = 0; t < n; ++t) s += tm * T[idx(k, r, t)] * gi(p, r) * gi(q, t);
                }
            HH(m, k) = s;
        }
    const double H2 = (gi.array() * HH.array()).sum();

    EomResidual out;
    out.einstein = (Ric + 2 * ddphi - HH).norm();
    out.dilaton = std::abs(scalar + 4 * lap - 4 * grad2 - H2 / 3.0);

    // nabla^p(e^{-2 phi} H_pmn)
    auto weighted = [&](const Vector& y) { return std::exp(-2 * sol.dilaton(y)) * sol.torsion(y); };
    std::vector<std::vector<double>> dF(n);
    for (int q = 0; q < n; ++q) dF[q] = full3(exterior::central_difference<AltForm>(weighted, x, q, fd));
    std::vector<double> F = T;
    for (double& v : F) v *= std::exp(-2 * phi0);
    Matrix B = Matrix::Zero(n, n);
    for (int m = 0; m < n; ++m)
        for (int k = 0; k < n; ++k) {
            double s = 0;
            for (int p = 0; p < n; ++p)
                for (int q = 0; q < n; ++q) {
                    double cov = dF[q][idx(p, m, k)];
                    for (int a = 0; a < n; ++a)
                        cov -= G(a, q, p) * F[idx(a, m, k)] + G(a, q, m) * F[idx(p, a, k)] + G(a, q, k) * F[idx(p, m, a)];
                    s += gi(p, q) * cov;
                }
            B(m, k) = s;
        }
    out.h_field = B.norm();
    return out;
}

std::vector<Vector> sample_points(int dim, double lo, double hi, int count, std::uint64_t seed,
                                  const exterior::Clearance& clearance, double min_clearance) {
    static const int primes[] = {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53};
    if (dim > 16) throw std::invalid_argument("sample_points: dimension too large");
    if (!(hi > lo)) throw std::invalid_argument("sample_points: empty box");
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> U(0.0, 1.0);
    std::vector<double> shift(dim);
    for (auto& s : shift) s = U(rng);
    std::vector<Vector> out;
    const long max_tries = 2000L * std::max(count, 1);
    for (long i = 1; static_cast<int>(out.size()) < count; ++i) {
        if (i > max_tries) throw std::runtime_error("sample_points: too few points with the requested clearance");
        Vector x(dim);
        for (int d = 0; d < dim; ++d) {
            double f = 1.0, r = 0.0;
            for (long k = i; k > 0; k /= primes[d]) {
                f /= primes[d];
                r += f * static_cast<double>(k % primes[d]);
            }
            const double u = std::fmod(r + shift[d], 1.0);
            x[d] = lo + (hi - lo) * u;
        }
        if (!clearance || clearance(x) >= min_clearance) out.push_back(x);
    }
    return out;
}

std::vector<Vector> sample_points(const SuperpositionConfig& cfg, int count, std::uint64_t seed, double min_clearance) {
    return sample_points(
        8, cfg.box_lo, cfg.box_hi, count, seed, [&cfg](const Vector& x) { return cfg.singular_clearance(x); },
        min_clearance);
}

namespace {

// Minimum distance to the singular planes along x + t d, t in [0, T].
double segment_clearance(const SuperpositionConfig& cfg, const Vector& x, const Vector& d, double T) {
    double best = std::numeric_limits<double>::infinity();
    for (const auto& t : cfg.taus) {
        const Matrix A = t.jacobian();
        const double s2 = t.p1.norm2() + t.p2.norm2();  // A A^T = s2 Id
        const Vector u = A * x - t.a.vec();
        const Vector w = A * d;
        const double ww = w.squaredNorm();
        const double ts = ww > 0 ? std::clamp(-u.dot(w) / ww, 0.0, T) : 0.0;
        best = std::min(best, (u + ts * w).norm() / std::sqrt(s2));
    }
    return best;
}

}  // namespace

FarTransport ray_to_far_region(const SuperpositionConfig& cfg, const Vector& x, double far_radius, double min_clearance) {
    const int n = static_cast<int>(x.size());
    std::vector<Vector> dirs;
    Vector d0 = x.norm() > 1e-6 ? Vector(x / x.norm()) : Vector(Vector::Unit(n, 0));
    dirs.push_back(d0);
    for (int k = 0; k < n; ++k)
        for (double s : {0.7, -0.7}) {
            Vector d = d0 + s * Vector::Unit(n, k);
            if (d.norm() > 1e-6) dirs.push_back(d / d.norm());
        }
    FarTransport best;
    best.path_clearance = -1;
    for (const Vector& d : dirs) {
        // t with |x + t d| = far_radius
        const double b = x.dot(d);
        const double T = -b + std::sqrt(std::max(0.0, b * b - x.squaredNorm() + far_radius * far_radius));
        const double c = segment_clearance(cfg, x, d, T);
        if (c > best.path_clearance + 1e-12) {
            best.path_clearance = c;
            best.path.clear();
            best.path.push_back(x);
            for (double t = 0.01; t < T; t *= 1.05) best.path.push_back(x + t * d);
            best.path.push_back(x + T * d);
            best.far_point = best.path.back();
        }
        if (c >= 4 * min_clearance && &d == &dirs.front()) break;
    }
    if (best.path_clearance < min_clearance) throw SingularityError("ray_to_far_region: no ray clears the singular planes");
    return best;
}

std::vector<geom::CurvatureSample> transported_curvature(const SuperpositionConfig& cfg, int sign, const Vector& x,
                                                         const FdOptions& fd, double far_radius) {
    const CommonSectorSolution sol = assemble_solution(cfg);
    const geom::TorsionConnection c = connection(sol, sign);
    auto samples = geom::curvature_all(c, x, fd);
    const FarTransport ray = ray_to_far_region(cfg, x, far_radius);
    const Matrix P = geom::parallel_transport(c, ray.path, Matrix::Identity(8, 8));
    const Matrix Pinv = P.inverse();
    const Matrix gfar = sol.metric(ray.far_point);
    for (auto& s : samples) {
        s.R = P * s.R * Pinv;
        s.x = ray.far_point;
        s.g = gfar;
    }
    return samples;
}

}  // namespace hkt::brane

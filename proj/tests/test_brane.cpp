#include "hkt/brane.hpp"

#include <doctest.h>

#include <numbers>
#include <random>

using namespace hkt;
using namespace hkt::brane;

namespace {

Quaternion random_q(std::mt19937_64& g, double s = 1.0) {
    std::normal_distribution<double> N(0.0, s);
    return {N(g), N(g), N(g), N(g)};
}

SuperpositionConfig random_config(std::mt19937_64& g, int maps) {
    SuperpositionConfig cfg;
    cfg.box_lo = -1.5;
    cfg.box_hi = 1.5;
    for (int i = 0; i < maps; ++i) cfg.taus.push_back({random_q(g), random_q(g), random_q(g, 0.5), 1.0});
    return cfg;
}

// Metric written out from the quaternion product alone: the columns of
// d tau are p1 e_b and p2 e_b.
Matrix metric_oracle(const SuperpositionConfig& cfg, const Vector& x) {
    Matrix g = Matrix::Identity(8, 8);
    const Quaternion basis[4] = {Quaternion::one(), Quaternion::i(), Quaternion::j(), Quaternion::k()};
    for (const auto& t : cfg.taus) {
        Matrix A(4, 8);
        for (int b = 0; b < 4; ++b) {
            A.col(b) = (t.p1 * basis[b]).vec();
            A.col(4 + b) = (t.p2 * basis[b]).vec();
        }
        const double n2 = t(x).norm2();
        g += t.weight * t.weight / n2 * A.transpose() * A;
    }
    return g;
}

Vector random_point(std::mt19937_64& g, int n = 8) {
    std::uniform_real_distribution<double> U(-1.5, 1.5);
    Vector x(n);
    for (int i = 0; i < n; ++i) x[i] = U(g);
    return x;
}

}  // namespace

TEST_CASE("NS-5 harmonic function and torsion at the unit point") {
    Vector q(4);
    q << 1, 0, 0, 0;
    CHECK(ns5_harmonic(q) == 2.0);
    q << 0.5, -0.5, 0.5, 0.5;
    CHECK(ns5_harmonic(q) == 2.0);
    // dh = -2 q / |q|^4 = (-2, 0, 0, 0) at q = 1; H = -1/2 *dh = *dx^0 = dx^1 ^ dx^2 ^ dx^3.
    Vector dh(4);
    dh << -2, 0, 0, 0;
    const AltForm H = ns5_torsion(dh);
    CHECK((H - AltForm::basis(4, {1, 2, 3})).max_abs() < 1e-15);
    const auto sol = ns5_solution();
    q << 1, 0, 0, 0;
    CHECK((sol.torsion(q) - H).max_abs() < 1e-15);
    CHECK((sol.metric(q) - 2.0 * Matrix::Identity(4, 4)).norm() == 0);
    CHECK(sol.dilaton(q) == doctest::Approx(0.5 * std::log(2.0)));
    CHECK(sol.longitudinal_dim == 6);
}

TEST_CASE("superposition metric matches the product-formula oracle") {
    std::mt19937_64 g(21);
    for (int maps : {1, 2, 3}) {
        const auto cfg = random_config(g, maps);
        const Vector x = random_point(g);
        const Matrix G = build_metric(cfg, x);
        CHECK((G - metric_oracle(cfg, x)).norm() < 1e-12 * G.norm());
        CHECK((G - G.transpose()).norm() == 0);
        CHECK(hermiticity_residual(G, quat::right_triple(8)) < 1e-10 * G.norm());
    }
    CHECK((build_metric(SuperpositionConfig{}, Vector::Zero(8)) - Matrix::Identity(8, 8)).norm() == 0);
    CHECK(build_torsion(SuperpositionConfig{}, Vector::Zero(8)).max_abs() == 0);
}

TEST_CASE("jacobian of tau matches finite differences") {
    std::mt19937_64 g(22);
    const TauMap t{random_q(g), random_q(g), random_q(g), 1.0};
    const Vector x = random_point(g);
    for (int b = 0; b < 8; ++b) {
        Vector xp = x, xm = x;
        xp[b] += 1e-6;
        xm[b] -= 1e-6;
        const Eigen::Vector4d fd = ((t(xp) - t(xm)).vec()) / 2e-6;
        CHECK((fd - t.jacobian().col(b)).norm() < 1e-8);
    }
}

TEST_CASE("kernel plane lies in the kernel") {
    std::mt19937_64 g(23);
    const TauMap t{random_q(g), random_q(g), {}, 1.0};
    const auto P = kernel_plane(t);
    CHECK((t.jacobian() * P.frame()).norm() < 1e-13);
    CHECK(P.degree() == 4);
}

TEST_CASE("normalize_tau") {
    const TauMap t{Quaternion::i(), Quaternion::j(), {}, 1.0};
    const TauMap n = normalize_tau(t);
    CHECK(n.p1 == Quaternion::one());
    CHECK(n.p2.w == 0);
    CHECK(n.p2.x == 0);
    CHECK(n.p2.y == 0);
    CHECK(n.p2.z == doctest::Approx(-1.0));
    CHECK_THROWS_AS(validate({{}, {}, {}, 1.0}), std::invalid_argument);
    CHECK_THROWS_AS(validate({Quaternion::one(), {}, {}, -1.0}), std::invalid_argument);
}

TEST_CASE("tau equivalence and scaling covariance") {
    std::mt19937_64 g(24);
    const auto cfg = random_config(g, 2);
    SuperpositionConfig moved = cfg, scaled = cfg;
    const Quaternion u = random_q(g);
    const double lambda = 1.7;
    for (auto& t : moved.taus) t = {u * t.p1, u * t.p2, u * t.a, t.weight};
    for (auto& t : scaled.taus) t = {t.p1, t.p2, lambda * t.a, lambda * t.weight};
    for (int k = 0; k < 10; ++k) {
        const Vector x = random_point(g);
        const Matrix G = build_metric(cfg, x);
        CHECK((build_metric(moved, x) - G).norm() < 1e-10 * G.norm());
        CHECK((build_metric(scaled, lambda * x) - G).norm() < 1e-10 * G.norm());
    }
}

TEST_CASE("metric is flat far away and single-brane near one plane") {
    std::mt19937_64 g(25);
    auto cfg = random_config(g, 2);
    Vector far = Vector::Constant(8, 1e4);
    CHECK((build_metric(cfg, far) - Matrix::Identity(8, 8)).norm() < 1e-6);
    // Close to the first plane the metric is dominated by its own term.
    const auto lin = cfg.linear();
    const Matrix A = lin[0].A;
    Vector x0 = A.transpose() * (A * A.transpose()).ldlt().solve(lin[0].a);
    Vector x = x0 + 1e-4 * A.transpose().col(0).normalized();
    SuperpositionConfig one;
    one.taus = {cfg.taus[0]};
    const Matrix G = build_metric(cfg, x), G1 = build_metric(one, x);
    CHECK((G - G1).norm() < 1e-6 * G1.norm());
}

TEST_CASE("parameter classes of configs") {
    SuperpositionConfig cfg;
    CHECK(parameter_class(cfg) == quat::ParameterClass::Real);
    cfg.taus = {{Quaternion::one(), Quaternion{0.5, 0.8, 0, 0}, {}, 1.0}, {Quaternion::one(), Quaternion{2, 0, 0, 0}, {}, 1.0}};
    CHECK(parameter_class(cfg) == quat::ParameterClass::Complex);
    cfg.taus.push_back({Quaternion::one(), Quaternion{0, 0, 1, 0}, {}, 1.0});
    CHECK(parameter_class(cfg) == quat::ParameterClass::Quaternion);
    SuperpositionConfig twice;
    twice.taus = {{Quaternion::one(), Quaternion::i(), {}, 1.0}, {Quaternion::one(), Quaternion::i(), Quaternion::one(), 1.0}};
    CHECK_FALSE(twice.general_position());
    CHECK_FALSE(assemble_solution(twice).warnings.empty());
}

TEST_CASE("HKT residuals") {
    const auto sol = ns5_solution();
    Vector x(4);
    x << 0.7, -0.2, 0.4, 0.5;
    CHECK(hkt_residual(sol, x, quat::right_triple(4)).max < 1e-7);
    CHECK(hkt_residual(sol, x, quat::left_triple(4), {}, -1).max < 1e-7);
    CHECK(hkt_residual(sol, x, quat::left_triple(4), {}, +1).max > 1e-2);
    std::mt19937_64 g(26);
    const auto cfg = random_config(g, 2);
    const auto two = assemble_solution(cfg);
    const auto pts = sample_points(cfg, 5, 3, 0.25);
    for (const auto& p : pts) {
        CHECK(hkt_residual(two, p, quat::right_triple(8), {1e-4, true}).max < 1e-6);
        CHECK(hkt_residual(two, p, quat::left_triple(8), {1e-4, true}, -1).max > 1e-2);
    }
}

TEST_CASE("NS-5 satisfies the field equations") {
    const auto sol = ns5_solution();
    Vector x(4);
    x << 0.7, -0.2, 0.4, 0.5;
    const auto r = eom_residual(sol, x);
    CHECK(r.max() < 1e-4);
    const auto fine = eom_residual(sol, x, {5e-4, false});
    CHECK(fine.einstein < r.einstein / 3);
    MetricField flat(4, [](const Vector&) { return Matrix::Identity(4, 4); });
    const auto empty = assemble_solution(SuperpositionConfig{});
    CHECK(eom_residual(empty, Vector::Zero(8)).max() == 0);
}

TEST_CASE("M-brane data") {
    const auto m5 = m_brane(MKind::M5, 2.0);
    CHECK(m5.transverse_dim == 5);
    CHECK(m5.worldvolume_dim == 6);
    Vector y = Vector::Zero(5);
    y[0] = 1;
    CHECK(m5.harmonic(y) == 3.0);
    const auto [wl, wt] = m5.warp(y);
    CHECK(wl == doctest::Approx(std::pow(3.0, -1.0 / 3.0)));
    CHECK(wt == doctest::Approx(std::pow(3.0, 2.0 / 3.0)));
    const auto m2 = m_brane(MKind::M2, 1.0);
    CHECK(m2.transverse_dim == 8);
    CHECK(m2.flux_is_dual);
    CHECK_THROWS(m_brane(MKind::M5, 0.0));
    CHECK_THROWS_AS(flux_charge(m2, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(flux_charge(m5, -1.0), std::invalid_argument);
}

TEST_CASE("M-5 flux integral") {
    const double four_pi2 = 4 * std::numbers::pi * std::numbers::pi;
    for (double q : {1.0, 2.5})
        for (double R : {0.5, 4.0}) {
            const auto f = flux_charge(m_brane(MKind::M5, q), R);
            CHECK(f.integral == doctest::Approx(four_pi2 * q).epsilon(1e-9));
            CHECK(f.charge == doctest::Approx(q).epsilon(1e-9));
        }
}

TEST_CASE("sample points are seeded, in the box and clear of the planes") {
    std::mt19937_64 g(27);
    const auto cfg = random_config(g, 3);
    const auto a = sample_points(cfg, 20, 4, 0.2), b = sample_points(cfg, 20, 4, 0.2), c = sample_points(cfg, 20, 5, 0.2);
    REQUIRE(a.size() == 20);
    bool differ = false;
    for (std::size_t i = 0; i < a.size(); ++i) {
        CHECK(a[i] == b[i]);
        differ |= a[i] != c[i];
        CHECK(cfg.singular_clearance(a[i]) >= 0.2);
        CHECK(a[i].maxCoeff() <= cfg.box_hi);
        CHECK(a[i].minCoeff() >= cfg.box_lo);
    }
    CHECK(differ);
}

TEST_CASE("rays to the far region avoid the planes") {
    std::mt19937_64 g(28);
    const auto cfg = random_config(g, 3);
    const auto x = sample_points(cfg, 1, 1, 0.3)[0];
    const auto ray = ray_to_far_region(cfg, x);
    CHECK(ray.far_point.norm() > 900);
    CHECK(ray.path_clearance >= 0.05);
    CHECK(ray.path.front() == x);
}

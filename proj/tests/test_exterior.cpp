#include "hkt/exterior.hpp"
#include "hkt/quat.hpp"

#include <doctest.h>

#include <numeric>
#include <random>

using namespace hkt;
using namespace hkt::exterior;

namespace {

Matrix random_matrix(int r, int c, std::mt19937_64& g) {
    std::normal_distribution<double> N;
    Matrix m(r, c);
    for (int i = 0; i < r; ++i)
        for (int j = 0; j < c; ++j) m(i, j) = N(g);
    return m;
}

Matrix random_metric(int n, std::mt19937_64& g) {
    const Matrix a = random_matrix(n, n, g);
    return a * a.transpose() + n * Matrix::Identity(n, n);
}

AltForm random_form(int n, int k, std::mt19937_64& g) {
    std::normal_distribution<double> N;
    AltForm a(n, k);
    for (int s = 0; s < a.size(); ++s) a.coeff(s) = N(g);
    return a;
}

// Determinant-expansion oracle: a(X_1..X_k) = sum_I a_I det(X restricted to rows I).
double evaluate_oracle(const AltForm& a, const Matrix& X) {
    double v = 0;
    for (int s = 0; s < a.size(); ++s) {
        const auto& idx = a.indices(s);
        Matrix sub(a.degree(), a.degree());
        for (int r = 0; r < a.degree(); ++r) sub.row(r) = X.row(idx[r]);
        v += a.coeff(s) * sub.determinant();
    }
    return v;
}

}  // namespace

TEST_CASE("basis forms carry permutation signs") {
    const AltForm a = AltForm::basis(4, {1, 0});
    CHECK(a.component({0, 1}) == -1);
    CHECK(a.component({1, 0}) == 1);
    CHECK(a.component({1, 1}) == 0);
    CHECK_THROWS(AltForm::basis(4, {2, 2}));
    CHECK(AltForm::volume(4).component({3, 2, 1, 0}) == 1);
}

TEST_CASE("evaluation matches the determinant expansion") {
    std::mt19937_64 g(1);
    for (int k = 1; k <= 4; ++k) {
        const AltForm a = random_form(6, k, g);
        const Matrix X = random_matrix(6, k, g);
        CHECK(a(X) == doctest::Approx(evaluate_oracle(a, X)).epsilon(1e-12));
    }
}

TEST_CASE("wedge is graded commutative and associative") {
    std::mt19937_64 g(2);
    const AltForm a = random_form(6, 1, g), b = random_form(6, 2, g), c = random_form(6, 3, g);
    CHECK((wedge(a, b) - wedge(b, a)).max_abs() < 1e-13);
    CHECK((wedge(a, c) + wedge(c, a)).max_abs() < 1e-13);
    CHECK((wedge(wedge(a, b), c) - wedge(a, wedge(b, c))).max_abs() < 1e-12);
    CHECK(wedge(a, a).max_abs() == 0);
    CHECK(wedge(AltForm::basis(4, {0}), AltForm::basis(4, {1})).component({0, 1}) == 1);
}

TEST_CASE("interior product is a graded derivation") {
    std::mt19937_64 g(4);
    const AltForm a = random_form(5, 2, g), b = random_form(5, 2, g);
    const Vector v = random_matrix(5, 1, g).col(0);
    const AltForm lhs = interior(v, wedge(a, b));
    const AltForm rhs = wedge(interior(v, a), b) + wedge(a, interior(v, b));
    CHECK((lhs - rhs).max_abs() < 1e-12);
    Matrix X = random_matrix(5, 1, g);
    Matrix vx(5, 2);
    vx << v, X;
    CHECK(interior(v, a)(X) == doctest::Approx(a(vx)));
    CHECK_THROWS_AS(interior(v, AltForm::scalar(5, 1.0)), std::invalid_argument);
}

TEST_CASE("flat hodge star") {
    CHECK((hodge_star(Matrix::Identity(4, 4), AltForm::basis(4, {0, 1})) - AltForm::basis(4, {2, 3})).max_abs() < 1e-15);
    CHECK((hodge_star(Matrix::Identity(4, 4), AltForm::basis(4, {0})) - AltForm::basis(4, {1, 2, 3})).max_abs() < 1e-15);
    CHECK((hodge_star(Matrix::Identity(4, 4), AltForm::basis(4, {0}), -1) + AltForm::basis(4, {1, 2, 3})).max_abs() < 1e-15);
}

TEST_CASE("hodge star satisfies a ^ *b = <a, b> vol_g") {
    std::mt19937_64 g(5);
    for (int k = 0; k <= 5; ++k) {
        const Matrix G = random_metric(5, g);
        const AltForm a = random_form(5, k, g), b = random_form(5, k, g);
        const double lhs = wedge(a, hodge_star(G, b)).coeff(0);
        const double rhs = inner(G, a, b) * std::sqrt(G.determinant());
        CHECK(lhs == doctest::Approx(rhs).epsilon(1e-10));
        const double s = (k * (5 - k)) % 2 ? -1.0 : 1.0;
        CHECK((hodge_star(G, hodge_star(G, a)) - s * a).max_abs() < 1e-10 * (1 + a.max_abs()));
    }
    CHECK_THROWS(hodge_star(-Matrix::Identity(3, 3), AltForm::basis(3, {0})));
}

TEST_CASE("norm convention") {
    CHECK(norm(Matrix::Identity(4, 4), AltForm::basis(4, {0, 1})) == doctest::Approx(1.0));
    CHECK(norm(4.0 * Matrix::Identity(4, 4), AltForm::basis(4, {0, 1})) == doctest::Approx(0.25));
}

TEST_CASE("pullback commutes with evaluation") {
    std::mt19937_64 g(6);
    const Matrix jac = random_matrix(6, 4, g);
    const AltForm a = random_form(6, 3, g);
    const Matrix X = random_matrix(4, 3, g);
    CHECK(pullback(jac, a)(X) == doctest::Approx(a(jac * X)).epsilon(1e-12));
    const Matrix G = random_metric(6, g);
    CHECK((pullback_metric(jac, G) - jac.transpose() * G * jac).norm() < 1e-12);
}

TEST_CASE("kahler form of the first left structure") {
    const auto I = quat::left_triple(4);
    const AltForm w = kahler_form(I[0]);
    // I_1 e_0 = e_1, so w(e_0, e_1) = g(e_1, e_1) = 1.
    CHECK(w.component({0, 1}) == 1);
    CHECK(w.component({2, 3}) == 1);
    CHECK(w.component({0, 2}) == 0);
}

TEST_CASE("exterior derivative") {
    // d(x0 dx1) = dx0 ^ dx1, d(sin(x2) x0 dx0) = cos(x2) x0 dx2 ^ dx0
    FormField f(3, [](const Vector& x) {
        AltForm a(3, 1);
        a.add_component({1}, x[0]);
        a.add_component({0}, std::sin(x[2]) * x[0]);
        return a;
    });
    Vector x(3);
    x << 0.7, -0.2, 0.4;
    AltForm expect = AltForm::basis(3, {0, 1});
    expect.add_component({2, 0}, std::cos(0.4) * 0.7);
    CHECK((exterior_derivative(f, x) - expect).max_abs() < 1e-8);
    CHECK((exterior_derivative(f, x, {1e-3, true}) - expect).max_abs() < 1e-10);
}

TEST_CASE("d of an exact form vanishes") {
    ScalarField u(4, [](const Vector& x) { return std::exp(x[0] * x[1]) + x[2] * x[3] * x[3]; });
    const FormField du(4, [u](const Vector& x) { return exterior_derivative(as_form_field(u), x, {1e-4, true}); });
    Vector x = Vector::LinSpaced(4, 0.1, 0.4);
    CHECK(exterior_derivative(du, x, {1e-3, false}).max_abs() < 1e-6);
}

TEST_CASE("singular sets are refused") {
    FormField f(2, [](const Vector&) { return AltForm(2, 1); }, [](const Vector& x) { return x.norm(); });
    CHECK_THROWS_AS(f(Vector::Zero(2)), SingularityError);
    CHECK_THROWS_AS(exterior_derivative(f, Vector::Constant(2, 1e-5)), SingularityError);
    CHECK_NOTHROW(exterior_derivative(f, Vector::Constant(2, 1.0)));
}

TEST_CASE("planes") {
    std::mt19937_64 g(7);
    const Matrix cols = random_matrix(8, 4, g);
    const Plane p = Plane::span(cols);
    CHECK((p.frame().transpose() * p.frame() - Matrix::Identity(4, 4)).norm() < 1e-13);
    // Orientation follows the spanning columns.
    CHECK((p.frame().transpose() * cols).determinant() > 0);
    CHECK(largest_principal_angle(p, Plane::span(cols * Matrix::Identity(4, 4).reverse())) < 1e-7);
    CHECK(evaluate_on_plane(AltForm::volume(4), Plane(Matrix::Identity(4, 4))) == 1);
    Matrix bad = Matrix::Identity(4, 2);
    bad(0, 1) = 0.1;
    CHECK_THROWS(Plane{bad});
}

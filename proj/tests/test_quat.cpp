#include "hkt/quat.hpp"

#include <doctest.h>

#include <random>

using namespace hkt::quat;

namespace {

// Multiplication table of the units, written out by hand.
Quaternion unit(int a) {
    switch (a) {
        case 0: return Quaternion::one();
        case 1: return Quaternion::i();
        case 2: return Quaternion::j();
        default: return Quaternion::k();
    }
}

// e_a e_b = sign * e_c
struct Entry { int c; int sign; };
constexpr Entry kTable[4][4] = {
    {{0, 1}, {1, 1}, {2, 1}, {3, 1}},
    {{1, 1}, {0, -1}, {3, 1}, {2, -1}},
    {{2, 1}, {3, -1}, {0, -1}, {1, 1}},
    {{3, 1}, {2, 1}, {1, -1}, {0, -1}},
};

Quaternion random_q(std::mt19937_64& g) {
    std::normal_distribution<double> N;
    return {N(g), N(g), N(g), N(g)};
}

}  // namespace

TEST_CASE("unit products follow the hand table") {
    for (int a = 0; a < 4; ++a)
        for (int b = 0; b < 4; ++b) {
            const auto e = kTable[a][b];
            CHECK(unit(a) * unit(b) == static_cast<double>(e.sign) * unit(e.c));
        }
    static_assert(Quaternion::i() * Quaternion::j() == Quaternion::k());
}

TEST_CASE("product expands bilinearly over the table") {
    std::mt19937_64 g(11);
    for (int t = 0; t < 100; ++t) {
        const Quaternion p = random_q(g), q = random_q(g);
        const double pc[4] = {p.w, p.x, p.y, p.z}, qc[4] = {q.w, q.x, q.y, q.z};
        double out[4] = {0, 0, 0, 0};
        for (int a = 0; a < 4; ++a)
            for (int b = 0; b < 4; ++b) out[kTable[a][b].c] += kTable[a][b].sign * pc[a] * qc[b];
        const Quaternion r = p * q;
        CHECK(r.w == doctest::Approx(out[0]).epsilon(1e-14));
        CHECK(r.x == doctest::Approx(out[1]).epsilon(1e-14));
        CHECK(r.y == doctest::Approx(out[2]).epsilon(1e-14));
        CHECK(r.z == doctest::Approx(out[3]).epsilon(1e-14));
    }
}

TEST_CASE("left and right matrices act by multiplication") {
    std::mt19937_64 g(3);
    for (int t = 0; t < 20; ++t) {
        const Quaternion p = random_q(g), v = random_q(g);
        CHECK((left_matrix(p) * v.vec() - (p * v).vec()).norm() < 1e-13);
        CHECK((right_matrix(p) * v.vec() - (v * p).vec()).norm() < 1e-13);
    }
}

TEST_CASE("inverse and conjugate") {
    const Quaternion q{1, 2, -1, 0.5};
    const Quaternion u = q * q.inverse();
    CHECK(u.w == doctest::Approx(1.0));
    CHECK(std::abs(u.x) + std::abs(u.y) + std::abs(u.z) < 1e-15);
    CHECK((q * q.conj()).w == doctest::Approx(q.norm2()));
}

TEST_CASE("triples are integer matrices with quaternion relations") {
    for (int n : {4, 8, 12}) {
        const auto I = left_triple(n), J = right_triple(n);
        const Eigen::MatrixXd id = Eigen::MatrixXd::Identity(n, n);
        for (int r = 0; r < 3; ++r) {
            CHECK((I[r] * I[r]) == -id);
            CHECK((J[r] * J[r]) == -id);
            CHECK(I[r].transpose() == -I[r]);
            for (int s = 0; s < 3; ++s) CHECK((I[r] * J[s]) == (J[s] * I[r]));
        }
        CHECK((I[0] * I[1]) == I[2]);
        CHECK((J[0] * J[1]) == J[2]);
    }
    CHECK_THROWS_AS(left_triple(6), std::invalid_argument);
    CHECK_THROWS_AS(right_triple(0), std::invalid_argument);
}

TEST_CASE("classify_product") {
    CHECK(classify_product({1, 0, 0, 0}, {2, 0, 0, 0}) == ParameterClass::Real);
    CHECK(classify_product({1, 0, 0, 0}, {0, 0, 0, 0}) == ParameterClass::Real);
    CHECK(classify_product({1, 0, 0, 0}, {0.5, 0.8, 0, 0}) == ParameterClass::Complex);
    CHECK(classify_product({1, 0, 0, 0}, {0, 0.3, 0.4, 0}) == ParameterClass::ImaginaryQuaternion);
    CHECK(classify_product({1, 0, 0, 0}, {1, 1, 1, 1}) == ParameterClass::Quaternion);
    // conj(i) * j = -i j = -k
    CHECK(classify_product(Quaternion::i(), Quaternion::j()) == ParameterClass::ImaginaryQuaternion);
    CHECK(classify_product(Quaternion::i(), Quaternion::i()) == ParameterClass::Real);
    CHECK_THROWS_AS(classify_product({1, 0, 0, 0}, {1, 0, 0, 0}, 0.0), std::invalid_argument);
    CHECK(to_string(ParameterClass::ImaginaryQuaternion) == "ImQ");
}

#pragma once

// Quaternions q = w + x i + y j + z k with ij = k, and the two hypercomplex
// triples on R^n = Q^{n/4}: I_r (left multiplication by i, j, k) and
// J_r (negated right multiplication by i, j, k).

#include <Eigen/Dense>

#include <array>
#include <string>

namespace hkt::quat {

struct Quaternion {
    double w = 0, x = 0, y = 0, z = 0;

    constexpr Quaternion() = default;
    constexpr Quaternion(double w_, double x_, double y_, double z_) : w{w_}, x{x_}, y{y_}, z{z_} {}

    static constexpr Quaternion one() { return {1, 0, 0, 0}; }
    static constexpr Quaternion i() { return {0, 1, 0, 0}; }
    static constexpr Quaternion j() { return {0, 0, 1, 0}; }
    static constexpr Quaternion k() { return {0, 0, 0, 1}; }

    constexpr Quaternion conj() const { return {w, -x, -y, -z}; }
    constexpr double norm2() const { return w * w + x * x + y * y + z * z; }
    double norm() const;
    Quaternion inverse() const;

    Eigen::Vector4d vec() const { return {w, x, y, z}; }
    static Quaternion from(const Eigen::Ref<const Eigen::Vector4d>& v) { return {v[0], v[1], v[2], v[3]}; }

    constexpr bool operator==(const Quaternion&) const = default;
};

constexpr Quaternion operator+(Quaternion a, Quaternion b) { return {a.w + b.w, a.x + b.x, a.y + b.y, a.z + b.z}; }
constexpr Quaternion operator-(Quaternion a, Quaternion b) { return {a.w - b.w, a.x - b.x, a.y - b.y, a.z - b.z}; }
constexpr Quaternion operator-(Quaternion a) { return {-a.w, -a.x, -a.y, -a.z}; }
constexpr Quaternion operator*(double s, Quaternion a) { return {s * a.w, s * a.x, s * a.y, s * a.z}; }

// Hamilton product.
constexpr Quaternion mul(Quaternion a, Quaternion b) {
    return {a.w * b.w - a.x * b.x - a.y * b.y - a.z * b.z,
            a.w * b.x + a.x * b.w + a.y * b.z - a.z * b.y,
            a.w * b.y - a.x * b.z + a.y * b.w + a.z * b.x,
            a.w * b.z + a.x * b.y - a.y * b.x + a.z * b.w};
}
constexpr Quaternion operator*(Quaternion a, Quaternion b) { return mul(a, b); }

// 4x4 matrices of v -> q v and v -> v q in the basis (1, i, j, k).
Eigen::Matrix4d left_matrix(const Quaternion& q);
Eigen::Matrix4d right_matrix(const Quaternion& q);

struct HypercomplexTriple {
    int dim = 0;
    std::array<Eigen::MatrixXd, 3> J;

    const Eigen::MatrixXd& operator[](int r) const { return J[r]; }
};

// Throw std::invalid_argument unless n is a positive multiple of 4.
HypercomplexTriple left_triple(int n);
HypercomplexTriple right_triple(int n);

// Block-diagonal copy of a 4x4 matrix acting on every quaternionic factor.
Eigen::MatrixXd blockwise(const Eigen::Matrix4d& m, int n);

enum class ParameterClass { Real, Complex, ImaginaryQuaternion, Quaternion };

std::string to_string(ParameterClass c);

// Smallest class containing conj(p1) p2; the complex class is span{1, i}.
ParameterClass classify_product(const Quaternion& p1, const Quaternion& p2, double tol = 1e-12);

// Membership of a single product in a class (absolute tolerance on the excluded components).
bool contains(ParameterClass c, const Quaternion& product, double tol);

}  // namespace hkt::quat

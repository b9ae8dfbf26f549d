#include "hkt/quat.hpp"

#include <cmath>
#include <stdexcept>

namespace hkt::quat {

double Quaternion::norm() const { return std::sqrt(norm2()); }

Quaternion Quaternion::inverse() const {
    const double n2 = norm2();
    if (n2 == 0) throw std::domain_error("inverse of zero quaternion");
    return (1.0 / n2) * conj();
}

namespace {

const std::array<Quaternion, 4> kBasis = {Quaternion::one(), Quaternion::i(), Quaternion::j(), Quaternion::k()};

void check_dim(int n) {
    if (n <= 0 || n % 4 != 0) throw std::invalid_argument("dimension must be a positive multiple of 4, got " + std::to_string(n));
}

}  // namespace

Eigen::Matrix4d left_matrix(const Quaternion& q) {
    Eigen::Matrix4d m;
    for (int c = 0; c < 4; ++c) m.col(c) = mul(q, kBasis[c]).vec();
    return m;
}

Eigen::Matrix4d right_matrix(const Quaternion& q) {
    Eigen::Matrix4d m;
    for (int c = 0; c < 4; ++c) m.col(c) = mul(kBasis[c], q).vec();
    return m;
}

Eigen::MatrixXd blockwise(const Eigen::Matrix4d& m, int n) {
    check_dim(n);
    Eigen::MatrixXd out = Eigen::MatrixXd::Zero(n, n);
    for (int b = 0; b < n; b += 4) out.block<4, 4>(b, b) = m;
    return out;
}

HypercomplexTriple left_triple(int n) {
    check_dim(n);
    HypercomplexTriple t;
    t.dim = n;
    for (int r = 0; r < 3; ++r) t.J[r] = blockwise(left_matrix(kBasis[r + 1]), n);
    return t;
}

HypercomplexTriple right_triple(int n) {
    check_dim(n);
    HypercomplexTriple t;
    t.dim = n;
    for (int r = 0; r < 3; ++r) t.J[r] = blockwise(-right_matrix(kBasis[r + 1]), n);
    return t;
}

std::string to_string(ParameterClass c) {
    switch (c) {
        case ParameterClass::Real: return "R";
        case ParameterClass::Complex: return "C";
        case ParameterClass::ImaginaryQuaternion: return "ImQ";
        case ParameterClass::Quaternion: return "Q";
    }
    return "?";
}

bool contains(ParameterClass c, const Quaternion& p, double tol) {
    switch (c) {
        case ParameterClass::Real: return std::abs(p.x) <= tol && std::abs(p.y) <= tol && std::abs(p.z) <= tol;
        case ParameterClass::Complex: return std::abs(p.y) <= tol && std::abs(p.z) <= tol;
        case ParameterClass::ImaginaryQuaternion: return std::abs(p.w) <= tol;
        case ParameterClass::Quaternion: return true;
    }
    return false;
}

ParameterClass classify_product(const Quaternion& p1, const Quaternion& p2, double tol) {
    if (!(tol > 0)) throw std::invalid_argument("classify_product: tol must be positive");
    const Quaternion c = mul(p1.conj(), p2);
    for (ParameterClass k : {ParameterClass::Real, ParameterClass::Complex, ParameterClass::ImaginaryQuaternion})
        if (contains(k, c, tol)) return k;
    return ParameterClass::Quaternion;
}

}  // namespace hkt::quat

#pragma once

// Quaternionic calibrations on R^8 = Q^2, comass checks by Grassmannian
// optimization, and contact-set dimension estimates.

#include "hkt/exterior.hpp"
#include "hkt/quat.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace hkt::calib {

using exterior::AltForm;
using exterior::Plane;

enum class CalibrationKind { MixedIJ, Kahler2PlusPhi, CayleyPlusPhi, PhiJ };

std::string to_string(CalibrationKind k);
// Accepts "mixed_ij", "kahler2_phi", "cayley_phi", "phi_j".
std::optional<CalibrationKind> parse_kind(const std::string& name);
// Row of the calibration table matching a parameter class.
CalibrationKind matching_calibration(quat::ParameterClass c);

struct CalibrationSpec {
    CalibrationKind kind = CalibrationKind::PhiJ;
    quat::HypercomplexTriple I = quat::left_triple(8);
    quat::HypercomplexTriple J = quat::right_triple(8);
};

// (1/6) sum_r w_r ^ w_r, signed so that the first quaternionic line taken
// with orientation (1, i, j, k) has value +1.
AltForm build_phi(const quat::HypercomplexTriple& triple);

// vol(Q_1) + vol(Q_2) - sum_a w_a^(1) ^ w_a^(2), where w_a^(s) is the Kahler
// form of I_a on the s-th quaternionic factor.
AltForm build_cayley(const quat::HypercomplexTriple& I);

AltForm build_calibration(const CalibrationSpec& spec);
AltForm build_calibration(CalibrationKind kind);

using exterior::evaluate_on_plane;

// Uniformly distributed oriented k-plane (QR of a Gaussian matrix).
template <class Rng>
Plane random_plane(int n, int k, Rng& rng);

// Largest value of w over count random planes; seeded, order-independent.
double random_plane_max(const AltForm& w, long count, std::uint64_t seed);

struct MaximizeOptions {
    int restarts = 256;
    int max_iterations = 20000;
    double tol = 1e-6;            // maximizers kept within tol of the best value
    double initial_step = 0.1;    // backtracking starts here
    double convergence = 1e-10;   // frame update norm
    double dedup_angle = 1e-3;    // largest principal angle for "same plane"
    int local_probes = 8;         // re-optimizations started near each maximizer
    double probe_radius = 0.05;
    std::uint64_t seed = 1;
};

struct ContactReport {
    double max_value = 0;
    std::vector<Plane> maximizers;
    int estimated_dimension = -1;
    struct Diagnostics {
        int restarts = 0;
        int converged = 0;
        int max_iterations_used = 0;
        long total_iterations = 0;
        int local_probes = 0;
    } diagnostics;
};

// Multi-start projected gradient ascent on the Stiefel manifold.
ContactReport maximize(const AltForm& w, int k, const MaximizeOptions& opts = {});

struct DimensionOptions {
    int neighbors = 8;
    double threshold = 0.1;  // singular values kept relative to the largest
};

// Most frequent local PCA rank of the maximizers embedded as projection
// matrices. Throws std::invalid_argument with fewer than 30 maximizers.
int contact_dimension(const ContactReport& report, const DimensionOptions& opts = {});

// |(1 - P) K_r P| for the projection P onto the plane, max over the triple.
double invariance_residual(const Plane& p, const quat::HypercomplexTriple& t);

}  // namespace hkt::calib

#include <random>

namespace hkt::calib {

template <class Rng>
Plane random_plane(int n, int k, Rng& rng) {
    std::normal_distribution<double> N(0.0, 1.0);
    Matrix m(n, k);
    for (int c = 0; c < k; ++c)
        for (int r = 0; r < n; ++r) m(r, c) = N(rng);
    return Plane::span(m);
}

}  // namespace hkt::calib

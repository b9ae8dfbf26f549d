#include "hkt/calib.hpp"

#include "hkt/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>

namespace hkt::calib {

using exterior::kahler_form;
using exterior::wedge;
using quat::HypercomplexTriple;

std::string to_string(CalibrationKind k) {
    switch (k) {
        case CalibrationKind::MixedIJ: return "mixed_ij";
        case CalibrationKind::Kahler2PlusPhi: return "kahler2_phi";
        case CalibrationKind::CayleyPlusPhi: return "cayley_phi";
        case CalibrationKind::PhiJ: return "phi_j";
    }
    return "?";
}

std::optional<CalibrationKind> parse_kind(const std::string& name) {
    for (auto k : {CalibrationKind::MixedIJ, CalibrationKind::Kahler2PlusPhi, CalibrationKind::CayleyPlusPhi, CalibrationKind::PhiJ})
        if (to_string(k) == name) return k;
    return std::nullopt;
}

CalibrationKind matching_calibration(quat::ParameterClass c) {
    switch (c) {
        case quat::ParameterClass::Real: return CalibrationKind::MixedIJ;
        case quat::ParameterClass::Complex: return CalibrationKind::Kahler2PlusPhi;
        case quat::ParameterClass::ImaginaryQuaternion: return CalibrationKind::CayleyPlusPhi;
        case quat::ParameterClass::Quaternion: return CalibrationKind::PhiJ;
    }
    return CalibrationKind::PhiJ;
}

namespace {

void require8(const HypercomplexTriple& t, const char* what) {
    if (t.dim != 8) throw std::invalid_argument(std::string(what) + ": triple must act on R^8");
}

Matrix first_line() {
    Matrix f = Matrix::Zero(8, 4);
    f.topRows<4>() = Matrix::Identity(4, 4);
    return f;
}

}  // namespace

AltForm build_phi(const HypercomplexTriple& triple) {
    require8(triple, "build_phi");
    AltForm sum(8, 4);
    for (int r = 0; r < 3; ++r) {
        const AltForm w = kahler_form(triple[r]);
        sum += wedge(w, w);
    }
    const double orient = sum(first_line()) >= 0 ? 1.0 : -1.0;
    return (orient / 6.0) * sum;
}

AltForm build_cayley(const HypercomplexTriple& I) {
    require8(I, "build_cayley");
    AltForm omega(8, 4);
    omega.add_component({0, 1, 2, 3}, 1.0);
    omega.add_component({4, 5, 6, 7}, 1.0);
    for (int r = 0; r < 3; ++r) {
        Matrix top = Matrix::Zero(8, 8), bottom = Matrix::Zero(8, 8);
        top.topLeftCorner<4, 4>() = I[r].topLeftCorner<4, 4>();
        bottom.bottomRightCorner<4, 4>() = I[r].bottomRightCorner<4, 4>();
        omega -= wedge(kahler_form(top), kahler_form(bottom));
    }
    return omega;
}

AltForm build_calibration(const CalibrationSpec& spec) {
    const AltForm phiJ = build_phi(spec.J);
    switch (spec.kind) {
        case CalibrationKind::MixedIJ: return 0.5 * (build_phi(spec.I) + phiJ);
        case CalibrationKind::Kahler2PlusPhi: {
            const AltForm w = kahler_form(spec.I[0]);
            return 0.2 * wedge(w, w) + 0.6 * phiJ;
        }
        case CalibrationKind::CayleyPlusPhi: return 0.25 * build_cayley(spec.I) + 0.75 * phiJ;
        case CalibrationKind::PhiJ: return phiJ;
    }
    return phiJ;
}

AltForm build_calibration(CalibrationKind kind) {
    CalibrationSpec spec;
    spec.kind = kind;
    return build_calibration(spec);
}

double random_plane_max(const AltForm& w, long count, std::uint64_t seed) {
    constexpr long kChunk = 1024;
    const long chunks = (count + kChunk - 1) / kChunk;
    std::vector<double> best(static_cast<std::size_t>(chunks), -std::numeric_limits<double>::infinity());
    parallel_for(static_cast<std::size_t>(chunks), [&](std::size_t c) {
        std::mt19937_64 rng(split_seed(seed, c));
        const long end = std::min(count, static_cast<long>(c + 1) * kChunk);
        for (long i = static_cast<long>(c) * kChunk; i < end; ++i)
            best[c] = std::max(best[c], w(random_plane(w.dim(), w.degree(), rng).frame()));
    });
    return *std::max_element(best.begin(), best.end());
}

namespace {

// Objective f(V) = w(V) with its Euclidean gradient, for k x k minors.
class Objective {
public:
    explicit Objective(const AltForm& w) : n_{w.dim()}, k_{w.degree()} {
        for (int s = 0; s < w.size(); ++s)
            if (w.coeff(s) != 0) terms_.push_back({w.coeff(s), w.indices(s)});
    }

    double value(const Matrix& V) const {
        Matrix sub(k_, k_);
        double f = 0;
        for (const auto& t : terms_) {
            for (int r = 0; r < k_; ++r) sub.row(r) = V.row(t.rows[r]);
            f += t.c * sub.determinant();
        }
        return f;
    }

    double value_grad(const Matrix& V, Matrix& G) const {
        G.setZero(n_, k_);
        Matrix sub(k_, k_), minor(k_ - 1, k_ - 1);
        double f = 0;
        for (const auto& t : terms_) {
            for (int r = 0; r < k_; ++r) sub.row(r) = V.row(t.rows[r]);
            f += t.c * sub.determinant();
            for (int i = 0; i < k_; ++i)
                for (int j = 0; j < k_; ++j) {
                    for (int a = 0, ra = 0; a < k_; ++a) {
                        if (a == i) continue;
                        for (int b = 0, cb = 0; b < k_; ++b) {
                            if (b == j) continue;
                            minor(ra, cb++) = sub(a, b);
                        }
                        ++ra;
                    }
                    const double cof = ((i + j) % 2 ? -1.0 : 1.0) * (k_ == 1 ? 1.0 : minor.determinant());
                    G(t.rows[i], j) += t.c * cof;
                }
        }
        return f;
    }

private:
    struct Term {
        double c;
        std::vector<int> rows;
    };
    int n_, k_;
    std::vector<Term> terms_;
};

Matrix orthonormalize(const Matrix& M) { return Plane::span(M).frame(); }

struct Ascent {
    Matrix V;
    double value = 0;
    int iterations = 0;
    bool converged = false;
};

Ascent ascend(const Objective& obj, Matrix V, const MaximizeOptions& o) {
    Ascent a;
    Matrix G;
    double f = obj.value_grad(V, G);
    for (int it = 0; it < o.max_iterations; ++it) {
        a.iterations = it + 1;
        const Matrix VtG = V.transpose() * G;
        const Matrix xi = G - V * (0.5 * (VtG + VtG.transpose()));
        const double xi2 = xi.squaredNorm();
        if (xi2 == 0) {
            a.converged = true;
            break;
        }
        double t = o.initial_step;
        Matrix Vn;
        double fn = f;
        bool accepted = false;
        while (t > 1e-20) {
            Vn = orthonormalize(V + t * xi);
            fn = obj.value(Vn);
            if (fn >= f + 1e-4 * t * xi2) {
                accepted = true;
                break;
            }
            t *= 0.5;
        }
        if (!accepted) {
            a.converged = true;  // no ascent direction left at working precision
            break;
        }
        const double update = (Vn - V).norm();
        V = Vn;
        f = obj.value_grad(V, G);
        if (update < o.convergence) {
            a.converged = true;
            break;
        }
    }
    a.V = V;
    a.value = f;
    return a;
}

Matrix random_frame(int n, int k, std::mt19937_64& rng) { return random_plane(n, k, rng).frame(); }

bool is_duplicate(const std::vector<Plane>& kept, const Plane& p, double angle) {
    for (const auto& q : kept)
        if (exterior::largest_principal_angle(q, p) < angle) return true;
    return false;
}

}  // namespace

ContactReport maximize(const AltForm& w, int k, const MaximizeOptions& opts) {
    if (w.degree() != k) throw std::invalid_argument("maximize: form degree differs from plane degree");
    if (opts.restarts < 1) throw std::invalid_argument("maximize: restarts must be positive");
    const Objective obj(w);
    const int n = w.dim();
    std::vector<Ascent> runs(static_cast<std::size_t>(opts.restarts));
    parallel_for(runs.size(), [&](std::size_t r) {
        std::mt19937_64 rng(split_seed(opts.seed, r));
        runs[r] = ascend(obj, random_frame(n, k, rng), opts);
    });

    ContactReport rep;
    rep.diagnostics.restarts = opts.restarts;
    auto account = [&rep](const Ascent& a) {
        rep.diagnostics.converged += a.converged ? 1 : 0;
        rep.diagnostics.max_iterations_used = std::max(rep.diagnostics.max_iterations_used, a.iterations);
        rep.diagnostics.total_iterations += a.iterations;
    };
    rep.max_value = -std::numeric_limits<double>::infinity();
    for (const auto& a : runs) {
        account(a);
        rep.max_value = std::max(rep.max_value, a.value);
    }
    std::vector<Plane> seeds;
    for (const auto& a : runs) {
        if (a.value < rep.max_value - opts.tol) continue;
        Plane p(a.V);
        if (!is_duplicate(rep.maximizers, p, opts.dedup_angle)) rep.maximizers.push_back(p);
    }

    if (opts.local_probes > 0) {
        const std::vector<Plane> centers = rep.maximizers;
        const std::size_t total = centers.size() * static_cast<std::size_t>(opts.local_probes);
        std::vector<Ascent> probes(total);
        parallel_for(total, [&](std::size_t i) {
            std::mt19937_64 rng(split_seed(opts.seed ^ 0x5bd1e995ULL, i));
            std::normal_distribution<double> N(0.0, 1.0);
            Matrix Z(n, k);
            for (int c = 0; c < k; ++c)
                for (int r = 0; r < n; ++r) Z(r, c) = N(rng);
            const Matrix& V = centers[i / opts.local_probes].frame();
            probes[i] = ascend(obj, orthonormalize(V + opts.probe_radius * Z / Z.norm()), opts);
        });
        rep.diagnostics.local_probes = static_cast<int>(total);
        for (const auto& a : probes) {
            account(a);
            rep.max_value = std::max(rep.max_value, a.value);
        }
        for (const auto& a : probes) {
            if (a.value < rep.max_value - opts.tol) continue;
            Plane p(a.V);
            if (!is_duplicate(rep.maximizers, p, opts.dedup_angle)) rep.maximizers.push_back(p);
        }
        std::erase_if(rep.maximizers, [&](const Plane& p) { return evaluate_on_plane(w, p) < rep.max_value - opts.tol; });
    }
    return rep;
}

int contact_dimension(const ContactReport& report, const DimensionOptions& opts) {
    const auto& ps = report.maximizers;
    if (ps.size() < 30) throw std::invalid_argument("contact_dimension: at least 30 distinct maximizers are required");
    std::vector<Vector> emb;
    for (const auto& p : ps) emb.push_back(p.projection().reshaped());
    const int m = static_cast<int>(emb.size());
    const int nb = std::min(opts.neighbors, m - 1);
    std::map<int, int> votes;
    for (int i = 0; i < m; ++i) {
        std::vector<std::pair<double, int>> d;
        for (int j = 0; j < m; ++j)
            if (j != i) d.push_back({(emb[j] - emb[i]).squaredNorm(), j});
        std::partial_sort(d.begin(), d.begin() + nb, d.end());
        Matrix X(nb + 1, emb[i].size());
        X.row(0) = emb[i].transpose();
        for (int t = 0; t < nb; ++t) X.row(t + 1) = emb[d[t].second].transpose();
        const Eigen::RowVectorXd mean = X.colwise().mean();
        X.rowwise() -= mean;
        Eigen::JacobiSVD<Matrix> svd(X);
        const auto& sv = svd.singularValues();
        int rank = 0;
        for (int s = 0; s < sv.size(); ++s)
            if (sv[s] >= opts.threshold * sv[0]) ++rank;
        ++votes[rank];
    }
    int best = -1, count = -1;
    for (const auto& [rank, c] : votes)
        if (c > count) best = rank, count = c;
    return best;
}

double invariance_residual(const Plane& p, const HypercomplexTriple& t) {
    const Matrix P = p.projection();
    const Matrix Q = Matrix::Identity(P.rows(), P.cols()) - P;
    double m = 0;
    for (int r = 0; r < 3; ++r) m = std::max(m, (Q * t[r] * P).norm());
    return m;
}

}  // namespace hkt::calib

#include "hkt/exterior.hpp"

#include <array>
#include <bit>
#include <cmath>
#include <memory>
#include <mutex>

namespace hkt::exterior {

namespace {

struct IndexTable {
    std::vector<std::vector<int>> combos;  // lexicographic
    std::vector<int> slot_of_mask;         // -1 for masks of other popcount
};

const IndexTable& table(int n, int k) {
    static std::array<std::array<std::once_flag, kMaxDim + 1>, kMaxDim + 1> flags;
    static std::array<std::array<std::unique_ptr<IndexTable>, kMaxDim + 1>, kMaxDim + 1> tables;
    std::call_once(flags[n][k], [n, k] {
        auto t = std::make_unique<IndexTable>();
        t->slot_of_mask.assign(std::size_t{1} << n, -1);
        std::vector<int> c(k);
        for (int i = 0; i < k; ++i) c[i] = i;
        while (true) {
            unsigned mask = 0;
            for (int i : c) mask |= 1u << i;
            t->slot_of_mask[mask] = static_cast<int>(t->combos.size());
            t->combos.push_back(c);
            int i = k - 1;
            while (i >= 0 && c[i] == n - k + i) --i;
            if (i < 0) break;
            ++c[i];
            for (int j = i + 1; j < k; ++j) c[j] = c[j - 1] + 1;
        }
        tables[n][k] = std::move(t);
    });
    return *tables[n][k];
}

unsigned mask_of(const std::vector<int>& idx) {
    unsigned m = 0;
    for (int i : idx) m |= 1u << i;
    return m;
}

// Sign of the permutation sorting idx, 0 on repeats.
int sort_sign(const std::vector<int>& idx) {
    int inversions = 0;
    for (std::size_t a = 0; a < idx.size(); ++a)
        for (std::size_t b = a + 1; b < idx.size(); ++b) {
            if (idx[a] == idx[b]) return 0;
            if (idx[a] > idx[b]) ++inversions;
        }
    return inversions % 2 ? -1 : 1;
}

// Sign of the shuffle placing mask a before mask b.
int shuffle_sign(unsigned a, unsigned b) {
    int count = 0;
    for (unsigned rest = b; rest; rest &= rest - 1) {
        const int j = std::countr_zero(rest);
        count += std::popcount(a >> (j + 1));
    }
    return count % 2 ? -1 : 1;
}

double small_det(const Matrix& m) {
    const auto k = m.rows();
    switch (k) {
        case 0: return 1.0;
        case 1: return m(0, 0);
        case 2: return m(0, 0) * m(1, 1) - m(0, 1) * m(1, 0);
        case 3:
            return m(0, 0) * (m(1, 1) * m(2, 2) - m(1, 2) * m(2, 1)) - m(0, 1) * (m(1, 0) * m(2, 2) - m(1, 2) * m(2, 0)) +
                   m(0, 2) * (m(1, 0) * m(2, 1) - m(1, 1) * m(2, 0));
        case 4: return Eigen::Matrix4d(m).determinant();
        default: return m.determinant();
    }
}

void check_same(const AltForm& a, const AltForm& b, const char* what) {
    if (a.dim() != b.dim()) throw std::invalid_argument(std::string(what) + ": dimension mismatch");
}

}  // namespace

AltForm::AltForm(int n, int k) : n_{n}, k_{k} {
    if (n < 0 || n > kMaxDim) throw std::invalid_argument("AltForm: dimension out of range");
    if (k < 0 || k > n) throw std::invalid_argument("AltForm: degree out of range");
    c_.assign(table(n, k).combos.size(), 0.0);
}

AltForm AltForm::scalar(int n, double c) {
    AltForm a(n, 0);
    a.c_[0] = c;
    return a;
}

AltForm AltForm::basis(int n, const std::vector<int>& indices) {
    AltForm a(n, static_cast<int>(indices.size()));
    a.add_component(indices, 1.0);
    return a;
}

AltForm AltForm::volume(int n) {
    AltForm v(n, n);
    v.c_[0] = 1.0;
    return v;
}

const std::vector<int>& AltForm::indices(int slot) const { return table(n_, k_).combos[slot]; }

int AltForm::slot(const std::vector<int>& increasing) const { return table(n_, k_).slot_of_mask[mask_of(increasing)]; }

double AltForm::component(const std::vector<int>& idx) const {
    if (static_cast<int>(idx.size()) != k_) throw std::invalid_argument("AltForm::component: wrong number of indices");
    const int s = sort_sign(idx);
    if (s == 0) return 0.0;
    return s * c_[table(n_, k_).slot_of_mask[mask_of(idx)]];
}

void AltForm::add_component(const std::vector<int>& idx, double value) {
    if (static_cast<int>(idx.size()) != k_) throw std::invalid_argument("AltForm::add_component: wrong number of indices");
    for (int i : idx)
        if (i < 0 || i >= n_) throw std::invalid_argument("AltForm: index out of range");
    const int s = sort_sign(idx);
    if (s == 0) throw std::invalid_argument("AltForm: repeated index");
    c_[table(n_, k_).slot_of_mask[mask_of(idx)]] += s * value;
}

double AltForm::operator()(const Matrix& frame) const {
    if (frame.rows() != n_ || frame.cols() != k_) throw std::invalid_argument("AltForm: frame shape mismatch");
    const auto& combos = table(n_, k_).combos;
    Matrix sub(k_, k_);
    double sum = 0;
    for (std::size_t s = 0; s < combos.size(); ++s) {
        if (c_[s] == 0) continue;
        for (int r = 0; r < k_; ++r) sub.row(r) = frame.row(combos[s][r]);
        sum += c_[s] * small_det(sub);
    }
    return sum;
}

double AltForm::max_abs() const {
    double m = 0;
    for (double c : c_) m = std::max(m, std::abs(c));
    return m;
}

double AltForm::euclidean_norm() const {
    double s = 0;
    for (double c : c_) s += c * c;
    return std::sqrt(s);
}

AltForm& AltForm::operator+=(const AltForm& o) {
    if (o.n_ != n_ || o.k_ != k_) throw std::invalid_argument("AltForm: adding forms of different shape");
    for (std::size_t i = 0; i < c_.size(); ++i) c_[i] += o.c_[i];
    return *this;
}

AltForm& AltForm::operator-=(const AltForm& o) {
    if (o.n_ != n_ || o.k_ != k_) throw std::invalid_argument("AltForm: subtracting forms of different shape");
    for (std::size_t i = 0; i < c_.size(); ++i) c_[i] -= o.c_[i];
    return *this;
}

AltForm& AltForm::operator*=(double s) {
    for (double& c : c_) c *= s;
    return *this;
}

AltForm operator+(AltForm a, const AltForm& b) { return a += b; }
AltForm operator-(AltForm a, const AltForm& b) { return a -= b; }
AltForm operator*(double s, AltForm a) { return a *= s; }

AltForm wedge(const AltForm& a, const AltForm& b) {
    check_same(a, b, "wedge");
    const int n = a.dim();
    if (a.degree() + b.degree() > n) throw std::invalid_argument("wedge: degree exceeds dimension");
    AltForm out(n, a.degree() + b.degree());
    const auto& ta = table(n, a.degree());
    const auto& tb = table(n, b.degree());
    const auto& to = table(n, out.degree());
    for (int i = 0; i < a.size(); ++i) {
        if (a.coeff(i) == 0) continue;
        const unsigned ma = mask_of(ta.combos[i]);
        for (int j = 0; j < b.size(); ++j) {
            if (b.coeff(j) == 0) continue;
            const unsigned mb = mask_of(tb.combos[j]);
            if (ma & mb) continue;
            out.coeff(to.slot_of_mask[ma | mb]) += shuffle_sign(ma, mb) * a.coeff(i) * b.coeff(j);
        }
    }
    return out;
}

AltForm interior(const Vector& v, const AltForm& a) {
    if (v.size() != a.dim()) throw std::invalid_argument("interior: dimension mismatch");
    if (a.degree() == 0) throw std::invalid_argument("interior: contraction of a degree-0 form");
    AltForm out(a.dim(), a.degree() - 1);
    std::vector<int> rest(a.degree() - 1);
    for (int s = 0; s < a.size(); ++s) {
        if (a.coeff(s) == 0) continue;
        const auto& I = a.indices(s);
        for (int m = 0; m < a.degree(); ++m) {
            int t = 0;
            for (int q = 0; q < a.degree(); ++q)
                if (q != m) rest[t++] = I[q];
            out.coeff(out.slot(rest)) += (m % 2 ? -1.0 : 1.0) * v[I[m]] * a.coeff(s);
        }
    }
    return out;
}

AltForm j_derivation(const Matrix& J, const AltForm& a) {
    const int n = a.dim();
    if (J.rows() != n || J.cols() != n) throw std::invalid_argument("j_derivation: matrix shape mismatch");
    AltForm out(n, a.degree());
    std::vector<int> idx;
    for (int s = 0; s < out.size(); ++s) {
        double sum = 0;
        for (int m = 0; m < a.degree(); ++m) {
            idx = out.indices(s);
            const int col = idx[m];
            for (int b = 0; b < n; ++b) {
                if (J(b, col) == 0) continue;
                idx[m] = b;
                sum += J(b, col) * a.component(idx);
            }
        }
        out.coeff(s) = sum;
    }
    return out;
}

namespace {

void check_metric(const Matrix& g, int n, const char* what) {
    if (g.rows() != n || g.cols() != n) throw std::invalid_argument(std::string(what) + ": metric shape mismatch");
    if (!g.isApprox(g.transpose(), 1e-12)) throw std::invalid_argument(std::string(what) + ": metric not symmetric");
    Eigen::LLT<Matrix> llt(g);
    if (llt.info() != Eigen::Success) throw std::invalid_argument(std::string(what) + ": metric not positive-definite");
}

// Components a^I with all indices raised by g^{-1}.
AltForm raise(const Matrix& ginv, const AltForm& a) {
    if (ginv.isIdentity(0.0)) return a;
    const int k = a.degree();
    AltForm out(a.dim(), k);
    Matrix sub(k, k);
    for (int s = 0; s < a.size(); ++s) {
        const auto& I = a.indices(s);
        double sum = 0;
        for (int t = 0; t < a.size(); ++t) {
            if (a.coeff(t) == 0) continue;
            const auto& K = a.indices(t);
            for (int r = 0; r < k; ++r)
                for (int c = 0; c < k; ++c) sub(r, c) = ginv(I[r], K[c]);
            sum += small_det(sub) * a.coeff(t);
        }
        out.coeff(s) = sum;
    }
    return out;
}

}  // namespace

AltForm hodge_star(const Matrix& g, const AltForm& a, int orientation) {
    const int n = a.dim();
    check_metric(g, n, "hodge_star");
    if (orientation != 1 && orientation != -1) throw std::invalid_argument("hodge_star: orientation must be +1 or -1");
    const Matrix ginv = g.inverse();
    const double vol = orientation * std::sqrt(g.determinant());
    const AltForm up = raise(ginv, a);
    AltForm out(n, n - a.degree());
    const unsigned full = (1u << n) - 1;
    const auto& ta = table(n, a.degree());
    for (int s = 0; s < out.size(); ++s) {
        const unsigned mj = mask_of(out.indices(s));
        const unsigned mi = full & ~mj;
        out.coeff(s) = vol * shuffle_sign(mi, mj) * up.coeff(ta.slot_of_mask[mi]);
    }
    return out;
}

double inner(const Matrix& g, const AltForm& a, const AltForm& b) {
    check_same(a, b, "inner");
    if (a.degree() != b.degree()) throw std::invalid_argument("inner: degree mismatch");
    const AltForm up = raise(g.inverse(), b);
    double s = 0;
    for (int i = 0; i < a.size(); ++i) s += a.coeff(i) * up.coeff(i);
    return s;
}

double norm(const Matrix& g, const AltForm& a) { return std::sqrt(std::max(0.0, inner(g, a, a))); }

AltForm pullback(const Matrix& jac, const AltForm& a) {
    if (jac.rows() != a.dim()) throw std::invalid_argument("pullback: Jacobian rows must match form dimension");
    const int n = static_cast<int>(jac.cols());
    AltForm out(n, a.degree());
    Matrix cols(jac.rows(), a.degree());
    for (int s = 0; s < out.size(); ++s) {
        const auto& I = out.indices(s);
        for (int c = 0; c < a.degree(); ++c) cols.col(c) = jac.col(I[c]);
        out.coeff(s) = a(cols);
    }
    return out;
}

Matrix pullback_metric(const Matrix& jac, const Matrix& g) { return jac.transpose() * g * jac; }

AltForm kahler_form(const Matrix& K, const Matrix& g) {
    const int n = static_cast<int>(K.rows());
    const Matrix w = K.transpose() * g;  // w(e_a, e_b) = g(K e_a, e_b)
    AltForm out(n, 2);
    for (int s = 0; s < out.size(); ++s) {
        const auto& I = out.indices(s);
        out.coeff(s) = w(I[0], I[1]);
    }
    return out;
}

AltForm kahler_form(const Matrix& K) { return kahler_form(K, Matrix::Identity(K.rows(), K.cols())); }

FormField as_form_field(const ScalarField& f) {
    const int n = f.dim();
    return FormField(n, [f, n](const Vector& x) { return AltForm::scalar(n, f(x)); }, f.clearance_rule());
}

void require_clearance(double clearance, double step, double factor, const char* what) {
    if (!(step > 0)) throw std::invalid_argument(std::string(what) + ": step must be positive");
    if (!(clearance > factor * step))
        throw SingularityError(std::string(what) + ": point within " + std::to_string(factor) + " steps of the excluded set");
}

AltForm exterior_derivative(const FormField& f, const Vector& x, const FdOptions& fd) {
    require_clearance(f.clearance(x), fd.step, 2.0, "exterior_derivative");
    const int n = f.dim();
    const AltForm f0 = f(x);
    AltForm out(n, f0.degree() + 1);
    for (int b = 0; b < n; ++b) {
        const AltForm db = central_difference<AltForm>(f, x, b, fd);
        out += wedge(AltForm::basis(n, {b}), db);
    }
    return out;
}

Plane::Plane(Matrix frame) : frame_(std::move(frame)) {
    const Matrix gram = frame_.transpose() * frame_;
    if (gram.size() > 0 && !((gram - Matrix::Identity(gram.rows(), gram.cols())).cwiseAbs().maxCoeff() <= 1e-12))
        throw std::invalid_argument("Plane: frame columns are not orthonormal");
}

Plane Plane::span(const Matrix& columns) {
    Eigen::HouseholderQR<Matrix> qr(columns);
    Matrix q = qr.householderQ() * Matrix::Identity(columns.rows(), columns.cols());
    const Matrix r = qr.matrixQR();
    for (int c = 0; c < columns.cols(); ++c) {
        if (std::abs(r(c, c)) < 1e-14) throw std::invalid_argument("Plane::span: columns are linearly dependent");
        if (r(c, c) < 0) q.col(c) = -q.col(c);
    }
    return Plane(q);
}

double evaluate_on_plane(const AltForm& w, const Plane& p) {
    if (w.degree() != p.degree() || w.dim() != p.dim()) throw std::invalid_argument("evaluate_on_plane: degree mismatch");
    return w(p.frame());
}

double largest_principal_angle(const Plane& a, const Plane& b) {
    if (a.degree() != b.degree() || a.dim() != b.dim()) throw std::invalid_argument("principal angle: plane shape mismatch");
    Eigen::JacobiSVD<Matrix> svd(a.frame().transpose() * b.frame());
    const double smin = svd.singularValues().minCoeff();
    // sine form is accurate for small angles
    const Matrix resid = b.frame() - a.projection() * b.frame();
    Eigen::JacobiSVD<Matrix> svd2(resid);
    const double smax = svd2.singularValues().maxCoeff();
    return smin > 0.7 ? std::asin(std::min(1.0, smax)) : std::acos(std::clamp(smin, 0.0, 1.0));
}

}  // namespace hkt::exterior

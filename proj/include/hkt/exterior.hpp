#pragma once

// Constant-coefficient alternating forms on R^n and smooth fields on a
// coordinate chart with an excluded (singular) set.
//
// A k-form is stored by its coefficients on dx^I for strictly increasing
// multi-indices I in lexicographic order. Indices are zero-based: dx^0 is
// the first coordinate differential.

#include <Eigen/Dense>

#include <functional>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

namespace hkt {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

// Raised when a field is evaluated on, or too close to, its excluded set.
class SingularityError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

}  // namespace hkt

namespace hkt::exterior {

inline constexpr int kMaxDim = 16;

class AltForm {
public:
    AltForm() = default;
    AltForm(int n, int k);

    static AltForm scalar(int n, double c);
    // dx^{i_1} ^ ... ^ dx^{i_k}; indices in any order, sign included.
    static AltForm basis(int n, const std::vector<int>& indices);
    static AltForm volume(int n);

    int dim() const { return n_; }
    int degree() const { return k_; }
    int size() const { return static_cast<int>(c_.size()); }

    const std::vector<int>& indices(int slot) const;
    int slot(const std::vector<int>& increasing) const;
    double coeff(int slot) const { return c_[slot]; }
    double& coeff(int slot) { return c_[slot]; }
    const std::vector<double>& coeffs() const { return c_; }

    // Component a(e_{i_1}, ..., e_{i_k}) for arbitrary (possibly repeated) indices.
    double component(const std::vector<int>& indices) const;
    void add_component(const std::vector<int>& indices, double value);

    // a(X_1, ..., X_k) for the columns of an n x k matrix.
    double operator()(const Matrix& frame) const;

    double max_abs() const;
    double euclidean_norm() const;

    AltForm& operator+=(const AltForm& o);
    AltForm& operator-=(const AltForm& o);
    AltForm& operator*=(double s);

private:
    int n_ = 0;
    int k_ = 0;
    std::vector<double> c_;
};

AltForm operator+(AltForm a, const AltForm& b);
AltForm operator-(AltForm a, const AltForm& b);
AltForm operator*(double s, AltForm a);

AltForm wedge(const AltForm& a, const AltForm& b);

// (i_v a)(X_2, ..., X_k) = a(v, X_2, ..., X_k). Degree 0 input is an error.
AltForm interior(const Vector& v, const AltForm& a);

// Derivation extension of an endomorphism: (i_J a)(X_1..X_k) = sum_m a(.., J X_m, ..).
AltForm j_derivation(const Matrix& J, const AltForm& a);

// Riemannian Hodge star, orientation +1 for dx^0 ^ ... ^ dx^{n-1}.
AltForm hodge_star(const Matrix& g, const AltForm& a, int orientation = 1);

// g-inner product with the convention |a|^2 = (1/k!) a_{i..} a^{i..}.
double inner(const Matrix& g, const AltForm& a, const AltForm& b);
double norm(const Matrix& g, const AltForm& a);

// Linear map with Jacobian jac (m x n, R^n -> R^m): pullback of a form on R^m.
AltForm pullback(const Matrix& jac, const AltForm& a);
Matrix pullback_metric(const Matrix& jac, const Matrix& g);

// Kahler form w(X, Y) = g(K X, Y) of an endomorphism K.
AltForm kahler_form(const Matrix& K, const Matrix& g);
AltForm kahler_form(const Matrix& K);

// Fields on a chart. clearance(x) is the distance from x to the excluded
// set (+inf when there is none); evaluation requires clearance > 0.
using Clearance = std::function<double(const Vector&)>;

template <class V>
class Field {
public:
    using Rule = std::function<V(const Vector&)>;

    Field() = default;
    Field(int dim, Rule rule, Clearance clearance = {})
        : dim_{dim}, rule_{std::move(rule)}, clearance_{std::move(clearance)} {}

    int dim() const { return dim_; }
    double clearance(const Vector& x) const {
        return clearance_ ? clearance_(x) : std::numeric_limits<double>::infinity();
    }
    V operator()(const Vector& x) const {
        if (x.size() != dim_) throw std::invalid_argument("field evaluated at point of wrong dimension");
        if (!(clearance(x) > 0)) throw SingularityError("field evaluated on its excluded set");
        return rule_(x);
    }
    const Clearance& clearance_rule() const { return clearance_; }

private:
    int dim_ = 0;
    Rule rule_;
    Clearance clearance_;
};

using ScalarField = Field<double>;
using FormField = Field<AltForm>;
using MetricField = Field<Matrix>;

FormField as_form_field(const ScalarField& f);

struct FdOptions {
    double step = 1e-4;
    bool richardson = false;
};

// Throws SingularityError unless clearance(x) > factor * step.
void require_clearance(double clearance, double step, double factor, const char* what);

// Central-difference derivative of a vector-valued rule along axis b.
template <class V, class F>
V central_difference(const F& f, const Vector& x, int b, const FdOptions& fd) {
    auto d = [&](double h) {
        Vector xp = x, xm = x;
        xp[b] += h;
        xm[b] -= h;
        V out = f(xp);
        out -= f(xm);
        out *= 1.0 / (2 * h);
        return out;
    };
    if (!fd.richardson) return d(fd.step);
    V fine = d(fd.step / 2);
    V coarse = d(fd.step);
    fine *= 4.0 / 3.0;
    coarse *= 1.0 / 3.0;
    fine -= coarse;
    return fine;
}

// Numerical d f at x. Requires clearance > 2 * step.
AltForm exterior_derivative(const FormField& f, const Vector& x, const FdOptions& fd = {});

// Oriented orthonormal k-frame in R^n.
class Plane {
public:
    Plane() = default;
    // Frame must have orthonormal columns to 1e-12.
    explicit Plane(Matrix frame);
    // Gram-Schmidt of the columns, keeping the orientation of their span.
    static Plane span(const Matrix& columns);

    int dim() const { return static_cast<int>(frame_.rows()); }
    int degree() const { return static_cast<int>(frame_.cols()); }
    const Matrix& frame() const { return frame_; }
    Matrix projection() const { return frame_ * frame_.transpose(); }

private:
    Matrix frame_;
};

double evaluate_on_plane(const AltForm& w, const Plane& p);

// Largest principal angle between two planes of equal degree.
double largest_principal_angle(const Plane& a, const Plane& b);

}  // namespace hkt::exterior

#include "svip/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "svip/error.hpp"

namespace svip {

namespace {

void require_same_dim(std::size_t a, std::size_t b, const char* what) {
    if (a != b) {
        throw ContractError(std::string(what) + ": dimension mismatch (" + std::to_string(a) +
                            " vs " + std::to_string(b) + ")");
    }
}

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

}  // namespace

bool Vector::all_finite() const noexcept {
    return std::all_of(data_.begin(), data_.end(), [](double v) { return std::isfinite(v); });
}

Vector& Vector::operator+=(const Vector& other) {
    require_same_dim(size(), other.size(), "vector add");
    for (std::size_t i = 0; i < data_.size(); ++i) data_[i] += other.data_[i];
    return *this;
}

Vector& Vector::operator-=(const Vector& other) {
    require_same_dim(size(), other.size(), "vector subtract");
    for (std::size_t i = 0; i < data_.size(); ++i) data_[i] -= other.data_[i];
    return *this;
}

Vector& Vector::operator*=(double s) noexcept {
    for (auto& v : data_) v *= s;
    return *this;
}

Vector& Vector::axpy(double s, const Vector& other) {
    require_same_dim(size(), other.size(), "axpy");
    for (std::size_t i = 0; i < data_.size(); ++i) data_[i] += s * other.data_[i];
    return *this;
}

Vector operator+(Vector lhs, const Vector& rhs) { return lhs += rhs; }
Vector operator-(Vector lhs, const Vector& rhs) { return lhs -= rhs; }
Vector operator*(double s, Vector v) { return v *= s; }
Vector operator*(Vector v, double s) { return v *= s; }

double dot(const Vector& x, const Vector& y) {
    require_same_dim(x.size(), y.size(), "dot");
    double acc = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) acc += x[i] * y[i];
    return acc;
}

double norm_sq(const Vector& x) noexcept {
    double acc = 0.0;
    for (double v : x) acc += v * v;
    return acc;
}

double norm(const Vector& x) noexcept { return std::sqrt(norm_sq(x)); }

double distance(const Vector& x, const Vector& y) {
    require_same_dim(x.size(), y.size(), "distance");
    double acc = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double d = x[i] - y[i];
        acc += d * d;
    }
    return std::sqrt(acc);
}

DenseMatrix::DenseMatrix(std::initializer_list<std::initializer_list<double>> rows)
    : rows_(rows.size()), cols_(rows.size() == 0 ? 0 : rows.begin()->size()) {
    data_.reserve(rows_ * cols_);
    for (const auto& r : rows) {
        if (r.size() != cols_) throw ContractError("DenseMatrix: ragged initializer");
        data_.insert(data_.end(), r.begin(), r.end());
    }
}

DenseMatrix DenseMatrix::identity(std::size_t n) {
    DenseMatrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
}

DenseMatrix DenseMatrix::diagonal(const Vector& d) {
    DenseMatrix m(d.size(), d.size());
    for (std::size_t i = 0; i < d.size(); ++i) m(i, i) = d[i];
    return m;
}

DenseMatrix DenseMatrix::transpose() const {
    DenseMatrix t(cols_, rows_);
    for (std::size_t r = 0; r < rows_; ++r)
        for (std::size_t c = 0; c < cols_; ++c) t(c, r) = (*this)(r, c);
    return t;
}

Vector apply(const DenseMatrix& m, const Vector& x) {
    require_same_dim(m.cols(), x.size(), "apply");
    Vector y(m.rows());
    for (std::size_t r = 0; r < m.rows(); ++r) {
        const auto row = m.row(r);
        double acc = 0.0;
        for (std::size_t c = 0; c < row.size(); ++c) acc += row[c] * x[c];
        y[r] = acc;
    }
    return y;
}

Vector apply_adjoint(const DenseMatrix& m, const Vector& y) {
    require_same_dim(m.rows(), y.size(), "apply_adjoint");
    Vector x(m.cols());
    for (std::size_t r = 0; r < m.rows(); ++r) {
        const auto row = m.row(r);
        const double yr = y[r];
        for (std::size_t c = 0; c < row.size(); ++c) x[c] += row[c] * yr;
    }
    return x;
}

DenseMatrix adjoint(const DenseMatrix& m) { return m.transpose(); }

DenseMatrix multiply(const DenseMatrix& a, const DenseMatrix& b) {
    require_same_dim(a.cols(), b.rows(), "multiply");
    DenseMatrix out(a.rows(), b.cols());
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t k = 0; k < a.cols(); ++k) {
            const double aik = a(i, k);
            for (std::size_t j = 0; j < b.cols(); ++j) out(i, j) += aik * b(k, j);
        }
    return out;
}

DenseMatrix gram(const DenseMatrix& m) {
    DenseMatrix g(m.cols(), m.cols());
    for (std::size_t r = 0; r < m.rows(); ++r) {
        const auto row = m.row(r);
        for (std::size_t i = 0; i < m.cols(); ++i)
            for (std::size_t j = 0; j < m.cols(); ++j) g(i, j) += row[i] * row[j];
    }
    return g;
}

DenseMatrix add(const DenseMatrix& a, const DenseMatrix& b) {
    require_same_dim(a.rows(), b.rows(), "matrix add (rows)");
    require_same_dim(a.cols(), b.cols(), "matrix add (cols)");
    DenseMatrix out(a.rows(), a.cols());
    for (std::size_t r = 0; r < a.rows(); ++r)
        for (std::size_t c = 0; c < a.cols(); ++c) out(r, c) = a(r, c) + b(r, c);
    return out;
}

DenseMatrix scale(double s, const DenseMatrix& m) {
    DenseMatrix out(m.rows(), m.cols());
    for (std::size_t r = 0; r < m.rows(); ++r)
        for (std::size_t c = 0; c < m.cols(); ++c) out(r, c) = s * m(r, c);
    return out;
}

double max_asymmetry(const DenseMatrix& m) {
    if (!m.is_square()) throw ContractError("max_asymmetry: matrix is not square");
    double worst = 0.0;
    for (std::size_t i = 0; i < m.rows(); ++i)
        for (std::size_t j = i + 1; j < m.cols(); ++j)
            worst = std::max(worst, std::abs(m(i, j) - m(j, i)));
    return worst;
}

Cholesky::Cholesky(const DenseMatrix& m, double sym_tol) : n_(m.rows()), lower_(n_ * n_, 0.0) {
    if (!m.is_square()) throw ContractError("Cholesky: matrix is not square");
    if (max_asymmetry(m) > sym_tol) {
        throw ContractError("Cholesky: matrix is not symmetric within " + std::to_string(sym_tol));
    }
    auto L = [&](std::size_t i, std::size_t j) -> double& { return lower_[i * n_ + j]; };
    for (std::size_t j = 0; j < n_; ++j) {
        double diag = m(j, j);
        for (std::size_t k = 0; k < j; ++k) diag -= L(j, k) * L(j, k);
        if (!(diag > 0.0) || !std::isfinite(diag)) throw NotSpdError(j, diag);
        const double ljj = std::sqrt(diag);
        L(j, j) = ljj;
        for (std::size_t i = j + 1; i < n_; ++i) {
            double acc = m(i, j);
            for (std::size_t k = 0; k < j; ++k) acc -= L(i, k) * L(j, k);
            L(i, j) = acc / ljj;
        }
    }
}

Vector Cholesky::solve(const Vector& rhs) const {
    require_same_dim(n_, rhs.size(), "Cholesky::solve");
    Vector y(n_);
    // L y = rhs
    for (std::size_t i = 0; i < n_; ++i) {
        double acc = rhs[i];
        for (std::size_t k = 0; k < i; ++k) acc -= lower_[i * n_ + k] * y[k];
        y[i] = acc / lower_[i * n_ + i];
    }
    // L^T x = y
    Vector x(n_);
    for (std::size_t ii = n_; ii-- > 0;) {
        double acc = y[ii];
        for (std::size_t k = ii + 1; k < n_; ++k) acc -= lower_[k * n_ + ii] * x[k];
        x[ii] = acc / lower_[ii * n_ + ii];
    }
    return x;
}

Vector solve_spd(const DenseMatrix& m, const Vector& rhs) { return Cholesky(m).solve(rhs); }

OpNormEstimate op_norm_sq(const DenseMatrix& m, double tol, std::size_t max_iter) {
    if (m.rows() == 0 || m.cols() == 0) throw ContractError("op_norm_sq: empty matrix");
    const bool all_zero =
        std::all_of(m.values().begin(), m.values().end(), [](double v) { return v == 0.0; });
    if (all_zero) throw ContractError("op_norm_sq: zero matrix has no dominant direction");

    // Fixed random start avoids being orthogonal to the top singular vector.
    Rng rng(0x5eedULL);
    Vector v = gaussian_vector(m.cols(), rng);
    v *= 1.0 / norm(v);

    OpNormEstimate est;
    double previous = 0.0;
    for (std::size_t it = 1; it <= max_iter; ++it) {
        Vector w = apply_adjoint(m, apply(m, v));
        const double lambda = dot(v, w);
        const double wn = norm(w);
        est.value = lambda;
        est.iterations = it;
        if (wn == 0.0) {
            // Start landed in the null space; restart on a coordinate M does not annihilate.
            v = Vector(m.cols());
            for (std::size_t c = 0; c < m.cols(); ++c) {
                bool nonzero_column = false;
                for (std::size_t r = 0; r < m.rows(); ++r) nonzero_column |= m(r, c) != 0.0;
                if (nonzero_column) {
                    v[c] = 1.0;
                    break;
                }
            }
            continue;
        }
        if (it > 1 && std::abs(lambda - previous) <= tol * std::abs(lambda)) {
            est.converged = true;
            return est;
        }
        previous = lambda;
        v = std::move(w);
        v *= 1.0 / wn;
    }
    return est;
}

Rng Rng::derived(std::uint64_t seed, std::uint64_t stream) {
    return Rng(splitmix64(seed ^ splitmix64(stream)));
}

double Rng::uniform() {
    // 53 random mantissa bits, shifted off zero.
    return (static_cast<double>(engine_() >> 11) + 0.5) * 0x1.0p-53;
}

double Rng::normal() {
    if (has_spare_) {
        has_spare_ = false;
        return spare_;
    }
    const double u1 = uniform();
    const double u2 = uniform();
    const double radius = std::sqrt(-2.0 * std::log(u1));
    const double angle = 2.0 * std::numbers::pi * u2;
    spare_ = radius * std::sin(angle);
    has_spare_ = true;
    return radius * std::cos(angle);
}

DenseMatrix gaussian_matrix(std::size_t rows, std::size_t cols, Rng& rng) {
    if (rows == 0 || cols == 0) throw ContractError("gaussian_matrix: rows and cols must be >= 1");
    DenseMatrix m(rows, cols);
    for (std::size_t r = 0; r < rows; ++r)
        for (std::size_t c = 0; c < cols; ++c) m(r, c) = rng.normal();
    return m;
}

DenseMatrix gaussian_matrix(std::size_t rows, std::size_t cols, std::uint64_t seed) {
    Rng rng(seed);
    return gaussian_matrix(rows, cols, rng);
}

Vector gaussian_vector(std::size_t dim, Rng& rng) {
    Vector v(dim);
    for (std::size_t i = 0; i < dim; ++i) v[i] = rng.normal();
    return v;
}

}  // namespace svip

#pragma once

#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <random>
#include <span>
#include <string_view>
#include <vector>

namespace svip {

/// Dense real vector of fixed dimension.
class Vector {
public:
    Vector() = default;
    explicit Vector(std::size_t dim, double fill = 0.0) : data_(dim, fill) {}
    Vector(std::initializer_list<double> values) : data_(values) {}
    explicit Vector(std::vector<double> values) : data_(std::move(values)) {}

    std::size_t size() const noexcept { return data_.size(); }
    double operator[](std::size_t i) const { return data_[i]; }
    double& operator[](std::size_t i) { return data_[i]; }

    std::span<const double> values() const noexcept { return data_; }
    std::span<double> values() noexcept { return data_; }
    const std::vector<double>& raw() const noexcept { return data_; }

    auto begin() const noexcept { return data_.begin(); }
    auto end() const noexcept { return data_.end(); }

    bool all_finite() const noexcept;

    Vector& operator+=(const Vector& other);
    Vector& operator-=(const Vector& other);
    Vector& operator*=(double s) noexcept;

    /// this += s * other
    Vector& axpy(double s, const Vector& other);

    friend bool operator==(const Vector&, const Vector&) = default;

private:
    std::vector<double> data_;
};

Vector operator+(Vector lhs, const Vector& rhs);
Vector operator-(Vector lhs, const Vector& rhs);
Vector operator*(double s, Vector v);
Vector operator*(Vector v, double s);

double dot(const Vector& x, const Vector& y);
double norm_sq(const Vector& x) noexcept;
double norm(const Vector& x) noexcept;
double distance(const Vector& x, const Vector& y);

/// Row-major dense matrix.
class DenseMatrix {
public:
    DenseMatrix() = default;
    DenseMatrix(std::size_t rows, std::size_t cols, double fill = 0.0)
        : rows_(rows), cols_(cols), data_(rows * cols, fill) {}
    DenseMatrix(std::initializer_list<std::initializer_list<double>> rows);

    static DenseMatrix identity(std::size_t n);
    static DenseMatrix diagonal(const Vector& d);

    std::size_t rows() const noexcept { return rows_; }
    std::size_t cols() const noexcept { return cols_; }
    bool is_square() const noexcept { return rows_ == cols_; }

    double operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }
    double& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }

    std::span<const double> row(std::size_t r) const {
        return {data_.data() + r * cols_, cols_};
    }
    std::span<const double> values() const noexcept { return data_; }

    DenseMatrix transpose() const;

    friend bool operator==(const DenseMatrix&, const DenseMatrix&) = default;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> data_;
};

/// M x
Vector apply(const DenseMatrix& m, const Vector& x);
/// M^T y, i.e. the adjoint applied to y.
Vector apply_adjoint(const DenseMatrix& m, const Vector& y);
DenseMatrix adjoint(const DenseMatrix& m);
DenseMatrix multiply(const DenseMatrix& a, const DenseMatrix& b);
/// M^T M
DenseMatrix gram(const DenseMatrix& m);
DenseMatrix add(const DenseMatrix& a, const DenseMatrix& b);
DenseMatrix scale(double s, const DenseMatrix& m);

/// Largest |M_ij - M_ji|.
double max_asymmetry(const DenseMatrix& m);

/// Lower-triangular Cholesky factor L with M = L L^T.
class Cholesky {
public:
    /// Throws ContractError if M is not square or asymmetric beyond `sym_tol`,
    /// NotSpdError naming the failing pivot otherwise.
    explicit Cholesky(const DenseMatrix& m, double sym_tol = 1e-10);

    std::size_t dim() const noexcept { return n_; }
    Vector solve(const Vector& rhs) const;

private:
    std::size_t n_;
    std::vector<double> lower_;
};

Vector solve_spd(const DenseMatrix& m, const Vector& rhs);

struct OpNormEstimate {
    double value = 0.0;
    std::size_t iterations = 0;
    bool converged = false;
};

/// ||M||^2, the largest eigenvalue of M^T M, by power iteration.
OpNormEstimate op_norm_sq(const DenseMatrix& m, double tol = 1e-12, std::size_t max_iter = 10000);

/// Seeded random stream. mt19937_64 for uniforms, Box-Muller for normals.
class Rng {
public:
    static constexpr std::string_view algorithm = "mt19937_64+box-muller";

    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    /// Independent stream derived from (seed, stream) via splitmix64.
    static Rng derived(std::uint64_t seed, std::uint64_t stream);

    /// Uniform on (0, 1).
    double uniform();
    double normal();

private:
    std::mt19937_64 engine_;
    bool has_spare_ = false;
    double spare_ = 0.0;
};

DenseMatrix gaussian_matrix(std::size_t rows, std::size_t cols, std::uint64_t seed);
DenseMatrix gaussian_matrix(std::size_t rows, std::size_t cols, Rng& rng);
Vector gaussian_vector(std::size_t dim, Rng& rng);

}  // namespace svip

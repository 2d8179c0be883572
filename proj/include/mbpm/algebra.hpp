#pragma once

#include <cstddef>
#include <initializer_list>
#include <span>
#include <vector>

namespace mbpm {

using Vector = std::vector<double>;

// Dense row-major square-or-rectangular matrix; small dimensions only.
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0);
  Matrix(std::initializer_list<std::initializer_list<double>> rows);

  static Matrix identity(std::size_t n);

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  bool square() const noexcept { return rows_ == cols_; }

  double& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  double operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

  std::span<const double> data() const noexcept { return data_; }

  Vector column(std::size_t c) const;
  Matrix transpose() const;

  Matrix& operator+=(const Matrix& other);
  Matrix& operator*=(double s);

  friend bool operator==(const Matrix&, const Matrix&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

Matrix operator+(Matrix a, const Matrix& b);
Matrix operator*(double s, Matrix a);
Matrix operator*(const Matrix& a, const Matrix& b);
Vector operator*(const Matrix& a, std::span<const double> x);

double dot(std::span<const double> a, std::span<const double> b);
Vector add(std::span<const double> a, std::span<const double> b);
// xᵀ A y
double quadratic_form(std::span<const double> x, const Matrix& a, std::span<const double> y);
double max_abs(std::span<const double> x);

// Componentwise product of two vectors.
Vector hadamard(std::span<const double> z1, std::span<const double> z2);

// Σᵢ zᵢ Aᵢ for a list of p matrices of equal shape.
Matrix odot(std::span<const double> z, std::span<const Matrix> mats);

// Offspring mean matrix: square with nonnegative entries. Column i holds the
// mean offspring vector of a type-i individual.
class NonnegMatrix {
 public:
  explicit NonnegMatrix(Matrix m);
  NonnegMatrix(std::initializer_list<std::initializer_list<double>> rows)
      : NonnegMatrix(Matrix(rows)) {}

  std::size_t dim() const noexcept { return m_.rows(); }
  const Matrix& matrix() const noexcept { return m_; }
  double operator()(std::size_t r, std::size_t c) const { return m_(r, c); }

 private:
  Matrix m_;
};

struct SpectralData {
  double rho = 0.0;
  Vector u;  // left eigenvector, Σuᵢ = 1
  Vector v;  // right eigenvector, uᵀv = 1
};

struct PerronOptions {
  double residual_tol = 1e-12;
  int max_iterations = 100000;
};

// Primitive iff some power m^k (k ≤ (p−1)²+1) is strictly positive, decided
// on the boolean pattern by repeated squaring.
bool is_primitive(const NonnegMatrix& m);

// Perron eigenvalue and normalized eigenvectors by shifted power iteration.
// Throws NotPrimitiveError or ConvergenceError.
SpectralData perron(const NonnegMatrix& m, const PerronOptions& options = {});

enum class Criticality { subcritical, critical, supercritical };

const char* to_string(Criticality c);

Criticality criticality(const NonnegMatrix& m, double tol = 1e-9);

}  // namespace mbpm

#include "mbpm/algebra.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "mbpm/error.hpp"

namespace mbpm {

Matrix::Matrix(std::size_t rows, std::size_t cols, double fill)
    : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

Matrix::Matrix(std::initializer_list<std::initializer_list<double>> rows) {
  rows_ = rows.size();
  cols_ = rows_ == 0 ? 0 : rows.begin()->size();
  data_.reserve(rows_ * cols_);
  for (const auto& row : rows) {
    if (row.size() != cols_) throw DimensionError("Matrix: ragged initializer");
    data_.insert(data_.end(), row.begin(), row.end());
  }
}

Matrix Matrix::identity(std::size_t n) {
  Matrix out(n, n);
  for (std::size_t i = 0; i < n; ++i) out(i, i) = 1.0;
  return out;
}

Vector Matrix::column(std::size_t c) const {
  Vector out(rows_);
  for (std::size_t r = 0; r < rows_; ++r) out[r] = (*this)(r, c);
  return out;
}

Matrix Matrix::transpose() const {
  Matrix out(cols_, rows_);
  for (std::size_t r = 0; r < rows_; ++r)
    for (std::size_t c = 0; c < cols_; ++c) out(c, r) = (*this)(r, c);
  return out;
}

Matrix& Matrix::operator+=(const Matrix& other) {
  if (rows_ != other.rows_ || cols_ != other.cols_)
    throw DimensionError("Matrix +=: shape mismatch");
  for (std::size_t k = 0; k < data_.size(); ++k) data_[k] += other.data_[k];
  return *this;
}

Matrix& Matrix::operator*=(double s) {
  for (auto& x : data_) x *= s;
  return *this;
}

Matrix operator+(Matrix a, const Matrix& b) { return a += b; }

Matrix operator*(double s, Matrix a) { return a *= s; }

Matrix operator*(const Matrix& a, const Matrix& b) {
  if (a.cols() != b.rows()) throw DimensionError("Matrix product: shape mismatch");
  Matrix out(a.rows(), b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t k = 0; k < a.cols(); ++k) {
      const double aik = a(i, k);
      if (aik == 0.0) continue;
      for (std::size_t j = 0; j < b.cols(); ++j) out(i, j) += aik * b(k, j);
    }
  return out;
}

Vector operator*(const Matrix& a, std::span<const double> x) {
  if (a.cols() != x.size()) throw DimensionError("Matrix-vector product: shape mismatch");
  Vector out(a.rows(), 0.0);
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) out[i] += a(i, j) * x[j];
  return out;
}

double dot(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw DimensionError("dot: length mismatch");
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

Vector add(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw DimensionError("add: length mismatch");
  Vector out(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = a[i] + b[i];
  return out;
}

double quadratic_form(std::span<const double> x, const Matrix& a, std::span<const double> y) {
  return dot(x, a * y);
}

double max_abs(std::span<const double> x) {
  double m = 0.0;
  for (double e : x) m = std::max(m, std::abs(e));
  return m;
}

Vector hadamard(std::span<const double> z1, std::span<const double> z2) {
  if (z1.size() != z2.size()) throw DimensionError("hadamard: length mismatch");
  Vector out(z1.size());
  for (std::size_t i = 0; i < z1.size(); ++i) out[i] = z1[i] * z2[i];
  return out;
}

Matrix odot(std::span<const double> z, std::span<const Matrix> mats) {
  if (z.size() != mats.size()) throw DimensionError("odot: need one matrix per weight");
  if (mats.empty()) return {};
  Matrix out(mats[0].rows(), mats[0].cols());
  for (std::size_t i = 0; i < z.size(); ++i) {
    if (mats[i].rows() != out.rows() || mats[i].cols() != out.cols())
      throw DimensionError("odot: matrices differ in shape");
    if (z[i] == 0.0) continue;
    Matrix term = mats[i];
    term *= z[i];
    out += term;
  }
  return out;
}

NonnegMatrix::NonnegMatrix(Matrix m) : m_(std::move(m)) {
  if (!m_.square() || m_.rows() == 0) throw DimensionError("NonnegMatrix: must be square and non-empty");
  for (double x : m_.data())
    if (!(x >= 0.0) || !std::isfinite(x)) throw DimensionError("NonnegMatrix: entries must be finite and >= 0");
}

namespace {

using Pattern = std::vector<char>;

Pattern bool_square(const Pattern& a, std::size_t n) {
  Pattern out(n * n, 0);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t k = 0; k < n; ++k) {
      if (!a[i * n + k]) continue;
      for (std::size_t j = 0; j < n; ++j)
        if (a[k * n + j]) out[i * n + j] = 1;
    }
  return out;
}

double l1(const Vector& x) {
  double s = 0.0;
  for (double e : x) s += std::abs(e);
  return s;
}

// Dominant eigenvector of a (primitive) matrix by power iteration on a + shift·I.
// The shift keeps the dominant eigenvalue strictly separated in modulus even
// for nearly periodic patterns.
Vector dominant_vector(const Matrix& a, const PerronOptions& options, const char* side) {
  const std::size_t n = a.rows();
  double scale = 0.0;
  for (double x : a.data()) scale = std::max(scale, x);
  const double shift = scale;
  Vector x(n, 1.0 / static_cast<double>(n));
  for (int it = 0; it < options.max_iterations; ++it) {
    Vector ax = a * x;
    // ρ estimate as the 1-norm growth of a positive vector
    const double rho = l1(ax);
    double resid = 0.0;
    for (std::size_t i = 0; i < n; ++i) resid = std::max(resid, std::abs(ax[i] - rho * x[i]));
    if (resid <= options.residual_tol * std::max(1.0, rho)) return x;
    for (std::size_t i = 0; i < n; ++i) ax[i] += shift * x[i];
    const double norm = l1(ax);
    for (std::size_t i = 0; i < n; ++i) x[i] = ax[i] / norm;
  }
  std::ostringstream msg;
  msg << "perron: " << side << " power iteration did not converge in " << options.max_iterations
      << " iterations";
  throw ConvergenceError(msg.str());
}

}  // namespace

bool is_primitive(const NonnegMatrix& m) {
  const std::size_t n = m.dim();
  Pattern pat(n * n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) pat[i * n + j] = m(i, j) > 0.0 ? 1 : 0;
  const std::size_t wielandt = (n - 1) * (n - 1) + 1;
  // A primitive pattern stays positive for every power ≥ the Wielandt
  // exponent; a non-primitive one is never positive.
  for (std::size_t power = 1; power < wielandt; power *= 2) pat = bool_square(pat, n);
  return std::all_of(pat.begin(), pat.end(), [](char c) { return c != 0; });
}

SpectralData perron(const NonnegMatrix& m, const PerronOptions& options) {
  if (!is_primitive(m)) throw NotPrimitiveError("perron: offspring mean matrix is not primitive");
  const Matrix& a = m.matrix();
  Vector v = dominant_vector(a, options, "right");
  Vector u = dominant_vector(a.transpose(), options, "left");

  const Vector av = a * v;
  SpectralData out;
  out.rho = dot(u, av) / dot(u, v);

  double su = 0.0;
  for (double x : u) su += x;
  for (double& x : u) x /= su;
  const double uv = dot(u, v);
  for (double& x : v) x /= uv;
  out.u = std::move(u);
  out.v = std::move(v);
  return out;
}

const char* to_string(Criticality c) {
  switch (c) {
    case Criticality::subcritical: return "subcritical";
    case Criticality::critical: return "critical";
    case Criticality::supercritical: return "supercritical";
  }
  return "unknown";
}

Criticality criticality(const NonnegMatrix& m, double tol) {
  const double rho = perron(m).rho;
  if (std::abs(rho - 1.0) <= tol) return Criticality::critical;
  return rho < 1.0 ? Criticality::subcritical : Criticality::supercritical;
}

}  // namespace mbpm

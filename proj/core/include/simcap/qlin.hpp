#pragma once

// Small dense complex linear algebra for the 2x2 / 4x4 (and Eve-side <= 16)
// matrices used throughout the library. Storage is row-major; the two-qubit
// basis ordering is |00>, |01>, |10>, |11>.

#include <complex>
#include <cstddef>
#include <initializer_list>
#include <span>
#include <vector>

namespace simcap::qlin {

using Complex = std::complex<double>;

inline constexpr Complex kI{0.0, 1.0};

class CVector {
 public:
  CVector() = default;
  explicit CVector(std::size_t dim);
  explicit CVector(std::vector<Complex> entries);
  CVector(std::initializer_list<Complex> entries);

  std::size_t dim() const noexcept { return entries_.size(); }
  Complex operator[](std::size_t i) const { return entries_[i]; }
  Complex& operator[](std::size_t i) { return entries_[i]; }
  std::span<const Complex> entries() const noexcept { return entries_; }

  /// Euclidean norm.
  double norm() const;
  /// Copy scaled to unit norm. Throws NumericError on a zero vector.
  CVector normalized() const;

 private:
  std::vector<Complex> entries_;
};

class CMatrix {
 public:
  CMatrix() = default;
  /// Zero matrix.
  CMatrix(std::size_t rows, std::size_t cols);
  /// Row-major entries; throws DimensionError on a length mismatch and
  /// NumericError on non-finite values.
  CMatrix(std::size_t rows, std::size_t cols, std::vector<Complex> entries);
  /// Nested rows, e.g. CMatrix{{1, 0}, {0, -1}}.
  CMatrix(std::initializer_list<std::initializer_list<Complex>> rows);

  static CMatrix identity(std::size_t n);
  static CMatrix diagonal(std::span<const Complex> diag);
  static CMatrix diagonal(std::span<const double> diag);

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  bool is_square() const noexcept { return rows_ == cols_; }

  Complex operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }
  Complex& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  std::span<const Complex> entries() const noexcept { return data_; }

  CMatrix& operator+=(const CMatrix& other);
  CMatrix& operator-=(const CMatrix& other);
  CMatrix& operator*=(Complex s);

  friend bool operator==(const CMatrix&, const CMatrix&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<Complex> data_;
};

enum class Subsystem { A, B };

struct EigResult {
  std::vector<double> eigenvalues;   // descending
  std::vector<CVector> eigenvectors;  // orthonormal, eigenvectors[i] <-> eigenvalues[i]
};

CMatrix operator+(CMatrix a, const CMatrix& b);
CMatrix operator-(CMatrix a, const CMatrix& b);
CMatrix operator*(const CMatrix& a, const CMatrix& b);
CMatrix operator*(Complex s, CMatrix a);
CVector operator*(const CMatrix& a, const CVector& v);
CVector operator+(const CVector& a, const CVector& b);
CVector operator*(Complex s, const CVector& v);

CMatrix adjoint(const CMatrix& a);
CMatrix transpose(const CMatrix& a);
Complex trace(const CMatrix& a);

/// <v|w>, conjugate-linear in the first argument.
Complex inner(const CVector& v, const CVector& w);
/// |v><w|
CMatrix outer(const CVector& v, const CVector& w);
/// |v><v|
CMatrix projector(const CVector& v);
/// Kronecker product of vectors.
CVector tensor(const CVector& a, const CVector& b);
/// Expectation <v|m|v>.
Complex expectation(const CMatrix& m, const CVector& v);

/// Max-norm of the entries.
double max_abs(const CMatrix& a);
double max_abs_diff(const CMatrix& a, const CMatrix& b);
double max_abs_diff(const CVector& a, const CVector& b);
/// Max-norm of a - a^H.
double hermiticity_residual(const CMatrix& a);
/// Largest singular value (spectral norm), via the eigenvalues of a^H a.
double spectral_norm(const CMatrix& a);

/// Kronecker product; dimensions multiply.
CMatrix tensor(const CMatrix& a, const CMatrix& b);

/// Partial transpose of a 4x4 two-qubit operator on the chosen factor.
/// A pure index permutation, so applying it twice is bit-exact identity.
CMatrix partial_transpose(const CMatrix& rho, Subsystem subsystem);

/// Reduced operator on `keep` for a (dA*dB)-dimensional operator.
CMatrix partial_trace(const CMatrix& rho, std::size_t dim_a, std::size_t dim_b, Subsystem keep);

/// Eigendecomposition of a Hermitian matrix by cyclic complex Jacobi
/// rotations. Throws NumericError when ||h - h^H||_max > 1e-10.
EigResult herm_eig(const CMatrix& h);

/// Pseudo-inverse square root of a Hermitian PSD matrix: eigenvalues <= tol
/// are mapped to zero. Throws NumericError for eigenvalues below -tol.
CMatrix psd_sqrt_inv(const CMatrix& m, double tol);

/// Hermitian functional calculus helper: V diag(f(lambda)) V^H.
CMatrix reconstruct(const EigResult& eig, std::span<const double> values);

namespace pauli {
CMatrix x();
CMatrix y();
CMatrix z();
/// index 0..3 -> I, X, Y, Z
CMatrix by_index(int index);
}  // namespace pauli

}  // namespace simcap::qlin

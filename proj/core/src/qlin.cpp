#include "simcap/qlin.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "simcap/error.hpp"

namespace simcap::qlin {

namespace {

void check_finite(std::span<const Complex> values) {
  for (const auto& v : values) {
    if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) {
      throw NumericError("non-finite matrix entry");
    }
  }
}

void require_same_shape(const CMatrix& a, const CMatrix& b, const char* op) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw DimensionError(std::string(op) + ": shape mismatch " + std::to_string(a.rows()) + "x" +
                         std::to_string(a.cols()) + " vs " + std::to_string(b.rows()) + "x" +
                         std::to_string(b.cols()));
  }
}

}  // namespace

// ---------------------------------------------------------------------------
// CVector

CVector::CVector(std::size_t dim) : entries_(dim) {}

CVector::CVector(std::vector<Complex> entries) : entries_(std::move(entries)) {
  check_finite(entries_);
}

CVector::CVector(std::initializer_list<Complex> entries) : entries_(entries) {
  check_finite(entries_);
}

double CVector::norm() const {
  double s = 0.0;
  for (const auto& v : entries_) s += std::norm(v);
  return std::sqrt(s);
}

CVector CVector::normalized() const {
  const double n = norm();
  if (n == 0.0) throw NumericError("cannot normalize a zero vector");
  CVector out(*this);
  for (auto& v : out.entries_) v /= n;
  return out;
}

// ---------------------------------------------------------------------------
// CMatrix

CMatrix::CMatrix(std::size_t rows, std::size_t cols)
    : rows_(rows), cols_(cols), data_(rows * cols) {}

CMatrix::CMatrix(std::size_t rows, std::size_t cols, std::vector<Complex> entries)
    : rows_(rows), cols_(cols), data_(std::move(entries)) {
  if (data_.size() != rows * cols) {
    throw DimensionError("CMatrix: expected " + std::to_string(rows * cols) + " entries, got " +
                         std::to_string(data_.size()));
  }
  check_finite(data_);
}

CMatrix::CMatrix(std::initializer_list<std::initializer_list<Complex>> rows)
    : rows_(rows.size()), cols_(rows.size() == 0 ? 0 : rows.begin()->size()) {
  data_.reserve(rows_ * cols_);
  for (const auto& row : rows) {
    if (row.size() != cols_) throw DimensionError("CMatrix: ragged initializer");
    data_.insert(data_.end(), row.begin(), row.end());
  }
  check_finite(data_);
}

CMatrix CMatrix::identity(std::size_t n) {
  CMatrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

CMatrix CMatrix::diagonal(std::span<const Complex> diag) {
  CMatrix m(diag.size(), diag.size());
  for (std::size_t i = 0; i < diag.size(); ++i) m(i, i) = diag[i];
  return m;
}

CMatrix CMatrix::diagonal(std::span<const double> diag) {
  CMatrix m(diag.size(), diag.size());
  for (std::size_t i = 0; i < diag.size(); ++i) m(i, i) = diag[i];
  return m;
}

CMatrix& CMatrix::operator+=(const CMatrix& other) {
  require_same_shape(*this, other, "operator+");
  for (std::size_t i = 0; i < data_.size(); ++i) data_[i] += other.data_[i];
  return *this;
}

CMatrix& CMatrix::operator-=(const CMatrix& other) {
  require_same_shape(*this, other, "operator-");
  for (std::size_t i = 0; i < data_.size(); ++i) data_[i] -= other.data_[i];
  return *this;
}

CMatrix& CMatrix::operator*=(Complex s) {
  for (auto& v : data_) v *= s;
  return *this;
}

// ---------------------------------------------------------------------------
// Arithmetic

CMatrix operator+(CMatrix a, const CMatrix& b) { return a += b; }
CMatrix operator-(CMatrix a, const CMatrix& b) { return a -= b; }

CMatrix operator*(const CMatrix& a, const CMatrix& b) {
  if (a.cols() != b.rows()) {
    throw DimensionError("matmul: inner dimensions " + std::to_string(a.cols()) + " vs " +
                         std::to_string(b.rows()));
  }
  CMatrix out(a.rows(), b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    for (std::size_t k = 0; k < a.cols(); ++k) {
      const Complex aik = a(i, k);
      if (aik == Complex{}) continue;
      for (std::size_t j = 0; j < b.cols(); ++j) out(i, j) += aik * b(k, j);
    }
  }
  return out;
}

CMatrix operator*(Complex s, CMatrix a) { return a *= s; }

CVector operator*(const CMatrix& a, const CVector& v) {
  if (a.cols() != v.dim()) throw DimensionError("matvec: dimension mismatch");
  CVector out(a.rows());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    Complex s{};
    for (std::size_t j = 0; j < a.cols(); ++j) s += a(i, j) * v[j];
    out[i] = s;
  }
  return out;
}

CVector operator+(const CVector& a, const CVector& b) {
  if (a.dim() != b.dim()) throw DimensionError("vector add: dimension mismatch");
  CVector out(a.dim());
  for (std::size_t i = 0; i < a.dim(); ++i) out[i] = a[i] + b[i];
  return out;
}

CVector operator*(Complex s, const CVector& v) {
  CVector out(v.dim());
  for (std::size_t i = 0; i < v.dim(); ++i) out[i] = s * v[i];
  return out;
}

CMatrix adjoint(const CMatrix& a) {
  CMatrix out(a.cols(), a.rows());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) out(j, i) = std::conj(a(i, j));
  return out;
}

CMatrix transpose(const CMatrix& a) {
  CMatrix out(a.cols(), a.rows());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) out(j, i) = a(i, j);
  return out;
}

Complex trace(const CMatrix& a) {
  if (!a.is_square()) throw DimensionError("trace of a non-square matrix");
  Complex s{};
  for (std::size_t i = 0; i < a.rows(); ++i) s += a(i, i);
  return s;
}

Complex inner(const CVector& v, const CVector& w) {
  if (v.dim() != w.dim()) throw DimensionError("inner: dimension mismatch");
  Complex s{};
  for (std::size_t i = 0; i < v.dim(); ++i) s += std::conj(v[i]) * w[i];
  return s;
}

CMatrix outer(const CVector& v, const CVector& w) {
  CMatrix out(v.dim(), w.dim());
  for (std::size_t i = 0; i < v.dim(); ++i)
    for (std::size_t j = 0; j < w.dim(); ++j) out(i, j) = v[i] * std::conj(w[j]);
  return out;
}

CMatrix projector(const CVector& v) { return outer(v, v); }

CVector tensor(const CVector& a, const CVector& b) {
  CVector out(a.dim() * b.dim());
  for (std::size_t i = 0; i < a.dim(); ++i)
    for (std::size_t j = 0; j < b.dim(); ++j) out[i * b.dim() + j] = a[i] * b[j];
  return out;
}

Complex expectation(const CMatrix& m, const CVector& v) { return inner(v, m * v); }

double max_abs(const CMatrix& a) {
  double m = 0.0;
  for (const auto& v : a.entries()) m = std::max(m, std::abs(v));
  return m;
}

double max_abs_diff(const CMatrix& a, const CMatrix& b) {
  require_same_shape(a, b, "max_abs_diff");
  double m = 0.0;
  for (std::size_t i = 0; i < a.entries().size(); ++i)
    m = std::max(m, std::abs(a.entries()[i] - b.entries()[i]));
  return m;
}

double max_abs_diff(const CVector& a, const CVector& b) {
  if (a.dim() != b.dim()) throw DimensionError("max_abs_diff: dimension mismatch");
  double m = 0.0;
  for (std::size_t i = 0; i < a.dim(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

double hermiticity_residual(const CMatrix& a) {
  if (!a.is_square()) throw DimensionError("hermiticity of a non-square matrix");
  double m = 0.0;
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = i; j < a.cols(); ++j)
      m = std::max(m, std::abs(a(i, j) - std::conj(a(j, i))));
  return m;
}

double spectral_norm(const CMatrix& a) {
  const auto eig = herm_eig(adjoint(a) * a);
  return std::sqrt(std::max(0.0, eig.eigenvalues.front()));
}

CMatrix tensor(const CMatrix& a, const CMatrix& b) {
  CMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) {
      const Complex aij = a(i, j);
      for (std::size_t k = 0; k < b.rows(); ++k)
        for (std::size_t l = 0; l < b.cols(); ++l)
          out(i * b.rows() + k, j * b.cols() + l) = aij * b(k, l);
    }
  return out;
}

CMatrix partial_transpose(const CMatrix& rho, Subsystem subsystem) {
  if (rho.rows() != 4 || rho.cols() != 4) {
    throw DimensionError("partial_transpose expects a 4x4 two-qubit operator");
  }
  CMatrix out(4, 4);
  for (std::size_t a = 0; a < 2; ++a)
    for (std::size_t b = 0; b < 2; ++b)
      for (std::size_t ap = 0; ap < 2; ++ap)
        for (std::size_t bp = 0; bp < 2; ++bp) {
          const std::size_t row = 2 * a + b;
          const std::size_t col = 2 * ap + bp;
          if (subsystem == Subsystem::B) {
            out(row, col) = rho(2 * a + bp, 2 * ap + b);
          } else {
            out(row, col) = rho(2 * ap + b, 2 * a + bp);
          }
        }
  return out;
}

CMatrix partial_trace(const CMatrix& rho, std::size_t dim_a, std::size_t dim_b, Subsystem keep) {
  if (!rho.is_square() || rho.rows() != dim_a * dim_b || dim_a == 0 || dim_b == 0) {
    throw DimensionError("partial_trace: operator is " + std::to_string(rho.rows()) + "x" +
                         std::to_string(rho.cols()) + ", dims " + std::to_string(dim_a) + "*" +
                         std::to_string(dim_b));
  }
  if (keep == Subsystem::A) {
    CMatrix out(dim_a, dim_a);
    for (std::size_t i = 0; i < dim_a; ++i)
      for (std::size_t j = 0; j < dim_a; ++j) {
        Complex s{};
        for (std::size_t k = 0; k < dim_b; ++k) s += rho(i * dim_b + k, j * dim_b + k);
        out(i, j) = s;
      }
    return out;
  }
  CMatrix out(dim_b, dim_b);
  for (std::size_t i = 0; i < dim_b; ++i)
    for (std::size_t j = 0; j < dim_b; ++j) {
      Complex s{};
      for (std::size_t k = 0; k < dim_a; ++k) s += rho(k * dim_b + i, k * dim_b + j);
      out(i, j) = s;
    }
  return out;
}

EigResult herm_eig(const CMatrix& h) {
  if (!h.is_square() || h.rows() == 0) throw DimensionError("herm_eig expects a square matrix");
  if (hermiticity_residual(h) > 1e-10) throw NumericError("herm_eig: input is not Hermitian");

  const std::size_t n = h.rows();
  // Symmetrize so the rotations act on an exactly Hermitian matrix.
  CMatrix a(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    a(i, i) = h(i, i).real();
    for (std::size_t j = i + 1; j < n; ++j) {
      a(i, j) = 0.5 * (h(i, j) + std::conj(h(j, i)));
      a(j, i) = std::conj(a(i, j));
    }
  }
  CMatrix v = CMatrix::identity(n);

  const double scale = std::max(max_abs(a), 1e-300);
  constexpr int kMaxSweeps = 64;
  for (int sweep = 0; sweep < kMaxSweeps; ++sweep) {
    double off = 0.0;
    for (std::size_t p = 0; p < n; ++p)
      for (std::size_t q = p + 1; q < n; ++q) off += std::norm(a(p, q));
    if (std::sqrt(off) <= 1e-16 * scale) break;

    for (std::size_t p = 0; p < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        const double g = std::abs(a(p, q));
        if (g <= 1e-300) continue;
        const Complex phase = a(p, q) / g;  // a_pq = g * phase
        const double app = a(p, p).real();
        const double aqq = a(q, q).real();
        // Real Jacobi rotation on the phase-corrected block [[app, g], [g, aqq]].
        const double zeta = (aqq - app) / (2.0 * g);
        const double t = (zeta >= 0.0 ? 1.0 : -1.0) / (std::abs(zeta) + std::sqrt(1.0 + zeta * zeta));
        const double c = 1.0 / std::sqrt(1.0 + t * t);
        const double s = t * c;
        // V = diag(1, conj(phase)) * [[c, s], [-s, c]] on the (p, q) plane.
        const Complex vpp = c;
        const Complex vpq = s;
        const Complex vqp = -s * std::conj(phase);
        const Complex vqq = c * std::conj(phase);

        for (std::size_t k = 0; k < n; ++k) {  // a <- a V
          const Complex kp = a(k, p);
          const Complex kq = a(k, q);
          a(k, p) = kp * vpp + kq * vqp;
          a(k, q) = kp * vpq + kq * vqq;
        }
        for (std::size_t k = 0; k < n; ++k) {  // a <- V^H a
          const Complex pk = a(p, k);
          const Complex qk = a(q, k);
          a(p, k) = std::conj(vpp) * pk + std::conj(vqp) * qk;
          a(q, k) = std::conj(vpq) * pk + std::conj(vqq) * qk;
        }
        a(p, q) = 0.0;
        a(q, p) = 0.0;
        a(p, p) = a(p, p).real();
        a(q, q) = a(q, q).real();
        for (std::size_t k = 0; k < n; ++k) {  // v <- v V
          const Complex kp = v(k, p);
          const Complex kq = v(k, q);
          v(k, p) = kp * vpp + kq * vqp;
          v(k, q) = kp * vpq + kq * vqq;
        }
      }
    }
  }

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t i, std::size_t j) { return a(i, i).real() > a(j, j).real(); });

  EigResult out;
  out.eigenvalues.reserve(n);
  out.eigenvectors.reserve(n);
  for (std::size_t idx : order) {
    out.eigenvalues.push_back(a(idx, idx).real());
    CVector col(n);
    for (std::size_t k = 0; k < n; ++k) col[k] = v(k, idx);
    out.eigenvectors.push_back(std::move(col));
  }
  return out;
}

CMatrix reconstruct(const EigResult& eig, std::span<const double> values) {
  if (values.size() != eig.eigenvectors.size()) throw DimensionError("reconstruct: size mismatch");
  const std::size_t n = eig.eigenvectors.empty() ? 0 : eig.eigenvectors.front().dim();
  CMatrix out(n, n);
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (values[i] == 0.0) continue;
    out += Complex(values[i]) * projector(eig.eigenvectors[i]);
  }
  return out;
}

CMatrix psd_sqrt_inv(const CMatrix& m, double tol) {
  const auto eig = herm_eig(m);
  std::vector<double> values(eig.eigenvalues.size());
  for (std::size_t i = 0; i < values.size(); ++i) {
    const double lambda = eig.eigenvalues[i];
    if (lambda < -tol) {
      throw NumericError("psd_sqrt_inv: negative eigenvalue " + std::to_string(lambda));
    }
    values[i] = lambda > tol ? 1.0 / std::sqrt(lambda) : 0.0;
  }
  return reconstruct(eig, values);
}

namespace pauli {

CMatrix x() { return CMatrix{{0.0, 1.0}, {1.0, 0.0}}; }
CMatrix y() { return CMatrix{{0.0, -kI}, {kI, 0.0}}; }
CMatrix z() { return CMatrix{{1.0, 0.0}, {0.0, -1.0}}; }

CMatrix by_index(int index) {
  switch (index) {
    case 0: return CMatrix::identity(2);
    case 1: return x();
    case 2: return y();
    case 3: return z();
    default: throw DomainError("pauli index must be 0..3");
  }
}

}  // namespace pauli

}  // namespace simcap::qlin

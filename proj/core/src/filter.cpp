#include "simcap/filter.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "simcap/error.hpp"

namespace simcap::filter {

using qlin::CMatrix;
using qlin::Complex;
using qlin::CVector;
using qlin::Subsystem;

namespace {

double det3(const Mat3& m) {
  return m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) -
         m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0]) +
         m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0]);
}

Mat3 identity3() { return {{{1, 0, 0}, {0, 1, 0}, {0, 0, 1}}}; }

std::array<double, 3> column(const Mat3& m, int j) { return {m[0][j], m[1][j], m[2][j]}; }

void set_column(Mat3& m, int j, const std::array<double, 3>& v) {
  for (int i = 0; i < 3; ++i) m[i][j] = v[i];
}

double dot(const std::array<double, 3>& a, const std::array<double, 3>& b) {
  return a[0] * b[0] + a[1] * b[1] + a[2] * b[2];
}

// Fills columns of u whose singular value is negligible with an orthonormal
// completion of the others.
void complete_basis(Mat3& u, const std::array<bool, 3>& valid) {
  const int n_valid = static_cast<int>(std::count(valid.begin(), valid.end(), true));
  if (n_valid == 3) return;
  if (n_valid == 0) {
    u = identity3();
    return;
  }
  std::array<std::array<double, 3>, 3> basis{};
  int filled = 0;
  for (int j = 0; j < 3; ++j)
    if (valid[j]) basis[filled++] = column(u, j);
  // Gram-Schmidt against the standard axes until three vectors exist.
  for (int axis = 0; axis < 3 && filled < 3; ++axis) {
    std::array<double, 3> v{0, 0, 0};
    v[axis] = 1.0;
    for (int k = 0; k < filled; ++k) {
      const double p = dot(basis[k], v);
      for (int i = 0; i < 3; ++i) v[i] -= p * basis[k][i];
    }
    const double n = std::sqrt(dot(v, v));
    if (n < 1e-6) continue;
    for (auto& x : v) x /= n;
    basis[filled++] = v;
  }
  int next = n_valid;
  for (int j = 0; j < 3; ++j)
    if (!valid[j]) set_column(u, j, basis[next++]);
}

double bell_offdiagonal(const CMatrix& rho, std::array<double, 4>& weights) {
  std::array<CVector, 4> bell;
  for (int i = 0; i < 4; ++i) bell[i] = states::bell_state(static_cast<states::BellIndex>(i));
  double residual = 0.0;
  for (int i = 0; i < 4; ++i) {
    const CVector rb = rho * bell[i];
    for (int j = 0; j < 4; ++j) {
      const Complex v = qlin::inner(bell[j], rb);
      if (i == j) {
        weights[i] = v.real();
      } else {
        residual = std::max(residual, std::abs(v));
      }
    }
  }
  return residual;
}

CMatrix whiten(const CMatrix& rho, Subsystem side, const FilterOptions& options, CMatrix& accumulated) {
  const Subsystem keep = side;
  const CMatrix marginal = qlin::partial_trace(rho, 2, 2, keep);
  const auto eig = qlin::herm_eig(marginal);
  if (eig.eigenvalues.back() < options.singular_tolerance) {
    throw SingularMarginalError("local filter undefined: marginal eigenvalue " +
                                    std::to_string(eig.eigenvalues.back()) + " below " +
                                    std::to_string(options.singular_tolerance),
                                eig.eigenvalues.back());
  }
  const CMatrix g = qlin::psd_sqrt_inv(Complex(2.0) * marginal, 0.0);
  const CMatrix id = CMatrix::identity(2);
  const CMatrix k = side == Subsystem::A ? qlin::tensor(g, id) : qlin::tensor(id, g);
  CMatrix next = k * rho * qlin::adjoint(k);
  next *= 1.0 / qlin::trace(next).real();
  accumulated = g * accumulated;
  accumulated *= 1.0 / qlin::max_abs(accumulated);
  return next;
}

// exp(a . sigma), a positive filter.
CMatrix exp_pauli(const std::array<double, 3>& a) {
  const double n = std::sqrt(a[0] * a[0] + a[1] * a[1] + a[2] * a[2]);
  const double c = std::cosh(n), s = n > 0 ? std::sinh(n) / n : 1.0;
  CMatrix m = Complex(c) * CMatrix::identity(2);
  for (int i = 0; i < 3; ++i) m = m + Complex(s * a[i]) * qlin::pauli::by_index(i + 1);
  return m;
}

using Vec6 = std::array<double, 6>;

// Bloch vectors of both marginals of the normalized (F_A (x) F_B) rho (.)^H.
Vec6 marginal_bloch(const CMatrix& rho, const Vec6& h) {
  const CMatrix k = qlin::tensor(exp_pauli({h[0], h[1], h[2]}), exp_pauli({h[3], h[4], h[5]}));
  CMatrix r = k * rho * qlin::adjoint(k);
  r *= 1.0 / qlin::trace(r).real();
  const CMatrix ma = qlin::partial_trace(r, 2, 2, Subsystem::A);
  const CMatrix mb = qlin::partial_trace(r, 2, 2, Subsystem::B);
  Vec6 out{};
  for (int i = 0; i < 3; ++i) {
    out[i] = qlin::trace(ma * qlin::pauli::by_index(i + 1)).real();
    out[3 + i] = qlin::trace(mb * qlin::pauli::by_index(i + 1)).real();
  }
  return out;
}

double norm6(const Vec6& v) {
  double s = 0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

// Solves j x = b by partial pivoting; false if j is numerically singular.
bool solve6(std::array<Vec6, 6> j, Vec6 b, Vec6& x) {
  for (int c = 0; c < 6; ++c) {
    int piv = c;
    for (int r = c + 1; r < 6; ++r)
      if (std::abs(j[r][c]) > std::abs(j[piv][c])) piv = r;
    if (std::abs(j[piv][c]) < 1e-300) return false;
    std::swap(j[c], j[piv]);
    std::swap(b[c], b[piv]);
    for (int r = c + 1; r < 6; ++r) {
      const double f = j[r][c] / j[c][c];
      for (int k = c; k < 6; ++k) j[r][k] -= f * j[c][k];
      b[r] -= f * b[c];
    }
  }
  for (int c = 5; c >= 0; --c) {
    double v = b[c];
    for (int k = c + 1; k < 6; ++k) v -= j[c][k] * x[k];
    x[c] = v / j[c][c];
  }
  return true;
}

// Whitening slows to a crawl on nearly rank-deficient states. Newton on the
// six marginal Bloch components, with backtracking, finishes the job; each
// step is applied to rho and folded into the accumulated filters.
bool newton_polish(CMatrix& rho, CMatrix& f_a, CMatrix& f_b, int max_steps, double tol, int& steps) {
  const auto residual = [](const CMatrix& r) {
    const CMatrix half = Complex(0.5) * CMatrix::identity(2);
    return std::max(qlin::max_abs_diff(qlin::partial_trace(r, 2, 2, Subsystem::A), half),
                    qlin::max_abs_diff(qlin::partial_trace(r, 2, 2, Subsystem::B), half));
  };
  const double d = 1e-6;
  for (steps = 0; steps < max_steps; ++steps) {
    if (residual(rho) <= tol) return true;
    const Vec6 zero{};
    const Vec6 r0 = marginal_bloch(rho, zero);
    std::array<Vec6, 6> jac{};
    for (int c = 0; c < 6; ++c) {
      Vec6 hp{}, hm{};
      hp[c] = d;
      hm[c] = -d;
      const Vec6 fp = marginal_bloch(rho, hp), fm = marginal_bloch(rho, hm);
      for (int r = 0; r < 6; ++r) jac[r][c] = (fp[r] - fm[r]) / (2 * d);
    }
    Vec6 neg{}, step{};
    for (int r = 0; r < 6; ++r) neg[r] = -r0[r];
    if (!solve6(jac, neg, step)) return false;
    double t = 1.0;
    const double n0 = norm6(r0);
    Vec6 h{};
    for (; t > 1e-4; t *= 0.5) {
      for (int r = 0; r < 6; ++r) h[r] = t * step[r];
      if (norm6(marginal_bloch(rho, h)) < n0) break;
    }
    if (t <= 1e-4) return false;
    const CMatrix ga = exp_pauli({h[0], h[1], h[2]}), gb = exp_pauli({h[3], h[4], h[5]});
    const CMatrix k = qlin::tensor(ga, gb);
    rho = k * rho * qlin::adjoint(k);
    rho *= 1.0 / qlin::trace(rho).real();
    f_a = ga * f_a;
    f_a *= 1.0 / qlin::max_abs(f_a);
    f_b = gb * f_b;
    f_b *= 1.0 / qlin::max_abs(f_b);
  }
  return residual(rho) <= tol;
}

}  // namespace

CMatrix FilterResult::local_operator() const { return qlin::tensor(u_a * f_a, u_b * f_b); }

std::pair<CMatrix, double> apply_filter(const FilterResult& result, const CMatrix& rho) {
  const CMatrix k = result.local_operator();
  CMatrix out = k * rho * qlin::adjoint(k);
  const double p = qlin::trace(out).real();
  if (!(p > 0.0)) throw NumericError("filter annihilates the state");
  out *= 1.0 / p;
  return {out, p};
}

Mat3 correlation_matrix(const CMatrix& rho) {
  Mat3 t{};
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) {
      const CMatrix op = qlin::tensor(qlin::pauli::by_index(i + 1), qlin::pauli::by_index(j + 1));
      t[i][j] = qlin::trace(rho * op).real();
    }
  return t;
}

SignedSvd signed_svd(const Mat3& t) {
  // One-sided Jacobi: orthogonalize the columns of W = t V.
  Mat3 w = t;
  Mat3 v = identity3();
  for (int sweep = 0; sweep < 60; ++sweep) {
    bool rotated = false;
    for (int p = 0; p < 3; ++p)
      for (int q = p + 1; q < 3; ++q) {
        const auto wp = column(w, p);
        const auto wq = column(w, q);
        const double alpha = dot(wp, wp);
        const double beta = dot(wq, wq);
        const double gamma = dot(wp, wq);
        if (std::abs(gamma) <= 1e-15 * std::sqrt(alpha * beta) || std::abs(gamma) < 1e-300) continue;
        rotated = true;
        const double zeta = (beta - alpha) / (2.0 * gamma);
        const double tt = (zeta >= 0 ? 1.0 : -1.0) / (std::abs(zeta) + std::sqrt(1.0 + zeta * zeta));
        const double c = 1.0 / std::sqrt(1.0 + tt * tt);
        const double s = c * tt;
        for (int i = 0; i < 3; ++i) {
          const double a = w[i][p], b = w[i][q];
          w[i][p] = c * a - s * b;
          w[i][q] = s * a + c * b;
          const double va = v[i][p], vb = v[i][q];
          v[i][p] = c * va - s * vb;
          v[i][q] = s * va + c * vb;
        }
      }
    if (!rotated) break;
  }

  SignedSvd out{};
  Mat3 u{};
  std::array<bool, 3> valid{};
  double scale = 0.0;
  for (int j = 0; j < 3; ++j) scale = std::max(scale, std::sqrt(dot(column(w, j), column(w, j))));
  for (int j = 0; j < 3; ++j) {
    const auto col = column(w, j);
    const double sigma = std::sqrt(dot(col, col));
    out.d[j] = sigma;
    valid[j] = sigma > 1e-14 * std::max(scale, 1e-300) && sigma > 1e-300;
    if (valid[j]) set_column(u, j, {col[0] / sigma, col[1] / sigma, col[2] / sigma});
  }
  complete_basis(u, valid);

  // Move reflections into the singular values, preferring the column whose
  // diagonal entry is most negative so diagonal inputs come back unrotated.
  auto fix = [&](Mat3& m) {
    if (det3(m) > 0) return;
    int k = 0;
    for (int j = 1; j < 3; ++j)
      if (m[j][j] < m[k][k]) k = j;
    for (int i = 0; i < 3; ++i) m[i][k] = -m[i][k];
    out.d[k] = -out.d[k];
  };
  fix(u);
  fix(v);
  out.rot_a = u;
  out.rot_b = v;
  return out;
}

CMatrix su2_from_rotation(const Mat3& r) {
  double w, x, y, z;
  const double tr = r[0][0] + r[1][1] + r[2][2];
  if (tr > 0) {
    const double s = std::sqrt(tr + 1.0) * 2.0;
    w = 0.25 * s;
    x = (r[2][1] - r[1][2]) / s;
    y = (r[0][2] - r[2][0]) / s;
    z = (r[1][0] - r[0][1]) / s;
  } else if (r[0][0] > r[1][1] && r[0][0] > r[2][2]) {
    const double s = std::sqrt(1.0 + r[0][0] - r[1][1] - r[2][2]) * 2.0;
    w = (r[2][1] - r[1][2]) / s;
    x = 0.25 * s;
    y = (r[0][1] + r[1][0]) / s;
    z = (r[0][2] + r[2][0]) / s;
  } else if (r[1][1] > r[2][2]) {
    const double s = std::sqrt(1.0 + r[1][1] - r[0][0] - r[2][2]) * 2.0;
    w = (r[0][2] - r[2][0]) / s;
    x = (r[0][1] + r[1][0]) / s;
    y = 0.25 * s;
    z = (r[1][2] + r[2][1]) / s;
  } else {
    const double s = std::sqrt(1.0 + r[2][2] - r[0][0] - r[1][1]) * 2.0;
    w = (r[1][0] - r[0][1]) / s;
    x = (r[0][2] + r[2][0]) / s;
    y = (r[1][2] + r[2][1]) / s;
    z = 0.25 * s;
  }
  const double n = std::sqrt(w * w + x * x + y * y + z * z);
  w /= n;
  x /= n;
  y /= n;
  z /= n;
  // U = w 1 - i (x X + y Y + z Z)
  return CMatrix{{Complex(w, -z), Complex(-y, -x)}, {Complex(y, -x), Complex(w, z)}};
}

Mat3 rotation_from_su2(const CMatrix& u) {
  Mat3 r{};
  const CMatrix ud = qlin::adjoint(u);
  for (int k = 0; k < 3; ++k)
    for (int j = 0; j < 3; ++j) {
      const CMatrix m = qlin::pauli::by_index(k + 1) * u * qlin::pauli::by_index(j + 1) * ud;
      r[k][j] = 0.5 * qlin::trace(m).real();
    }
  return r;
}

FilterResult bell_diagonalize(const states::TwoQubitState& s, const FilterOptions& options) {
  const CMatrix& rho0 = s.rho();
  CMatrix rho = rho0;
  CMatrix f_a = CMatrix::identity(2);
  CMatrix f_b = CMatrix::identity(2);
  const CMatrix half = Complex(0.5) * CMatrix::identity(2);

  int iterations = 0;
  double residual = 0.0;
  for (;; ++iterations) {
    residual = std::max(qlin::max_abs_diff(qlin::partial_trace(rho, 2, 2, Subsystem::A), half),
                        qlin::max_abs_diff(qlin::partial_trace(rho, 2, 2, Subsystem::B), half));
    if (residual <= options.tolerance) break;
    if (iterations >= options.max_iterations) {
      int steps = 0;
      if (newton_polish(rho, f_a, f_b, options.newton_steps, options.tolerance, steps)) {
        iterations += steps;
        break;
      }
      throw ConvergenceError("marginal whitening did not converge after " +
                                 std::to_string(iterations) + " iterations (residual " +
                                 std::to_string(residual) + ")",
                             residual, iterations);
    }
    rho = whiten(rho, Subsystem::A, options, f_a);
    rho = whiten(rho, Subsystem::B, options, f_b);
  }

  f_a *= 1.0 / qlin::spectral_norm(f_a);
  f_b *= 1.0 / qlin::spectral_norm(f_b);

  // Recompute the filtered state from the normalized filters so the
  // reported quantities refer to exactly (f_a (x) f_b).
  const CMatrix k = qlin::tensor(f_a, f_b);
  CMatrix filtered = k * rho0 * qlin::adjoint(k);
  const double p_success = qlin::trace(filtered).real();
  filtered *= 1.0 / p_success;

  const SignedSvd svd = signed_svd(correlation_matrix(filtered));
  Mat3 ra{}, rb{};
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) {
      ra[i][j] = svd.rot_a[j][i];
      rb[i][j] = svd.rot_b[j][i];
    }
  const CMatrix u_a = su2_from_rotation(ra);
  CMatrix u_b = su2_from_rotation(rb);

  const CMatrix align = qlin::tensor(u_a, u_b);
  CMatrix aligned = align * filtered * qlin::adjoint(align);

  std::array<double, 4> weights{};
  bell_offdiagonal(aligned, weights);
  double total = 0.0;
  for (double& w : weights) {
    if (w < -1e-9) throw NumericError("negative Bell weight " + std::to_string(w) + " after filtering");
    w = std::max(0.0, w);
    total += w;
  }
  for (double& w : weights) w /= total;
  const auto lambdas = states::BellDiagonal::canonical(weights);
  u_b = qlin::pauli::by_index(lambdas.bob_pauli()) * u_b;

  FilterResult result{f_a, f_b, u_a, u_b, lambdas, p_success, iterations, 0.0};
  const auto [out, p] = apply_filter(result, rho0);
  std::array<double, 4> check{};
  result.bell_residual = bell_offdiagonal(out, check);
  for (int i = 0; i < 4; ++i)
    result.bell_residual = std::max(result.bell_residual, std::abs(check[i] - lambdas[i]));
  if (result.bell_residual > options.bell_residual_limit) {
    throw NumericError("filtered state is not Bell-diagonal (residual " +
                       std::to_string(result.bell_residual) + ")");
  }
  (void)p;
  return result;
}

}  // namespace simcap::filter

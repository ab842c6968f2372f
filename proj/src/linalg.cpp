#include "ctdg/linalg.hpp"

#include <algorithm>
#include <cmath>

namespace ctdg {

DenseVector matvec(const DenseMatrix& m, std::span<const double> x) {
  if (x.size() != m.cols) throw std::invalid_argument("matvec: shape mismatch");
  DenseVector y(m.rows, 0.0);
  for (std::size_t r = 0; r < m.rows; ++r) {
    const double* row = m.values.data() + r * m.cols;
    double acc = 0.0;
    for (std::size_t c = 0; c < m.cols; ++c) acc += row[c] * x[c];
    y[r] = acc;
  }
  return y;
}

DenseVector matvec_t(const DenseMatrix& m, std::span<const double> x) {
  if (x.size() != m.rows) throw std::invalid_argument("matvec_t: shape mismatch");
  DenseVector y(m.cols, 0.0);
  for (std::size_t r = 0; r < m.rows; ++r) {
    const double* row = m.values.data() + r * m.cols;
    const double xr = x[r];
    for (std::size_t c = 0; c < m.cols; ++c) y[c] += row[c] * xr;
  }
  return y;
}

double dot(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw std::invalid_argument("dot: size mismatch");
  double acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) acc += a[i] * b[i];
  return acc;
}

double norm2(std::span<const double> v) {
  double acc = 0.0;
  for (double x : v) acc += x * x;
  return std::sqrt(acc);
}

void axpy(double a, std::span<const double> x, DenseVector& y) {
  if (x.size() != y.size()) throw std::invalid_argument("axpy: size mismatch");
  for (std::size_t i = 0; i < x.size(); ++i) y[i] += a * x[i];
}

namespace {

// One power-iteration run from a given start; returns false if the iterate
// fell into the null space of M^T M (estimate is then 0 along this start).
bool power_iterate(const DenseMatrix& m, DenseVector v, double tol,
                   int max_iters, double* out) {
  double prev = -1.0;
  for (int it = 0; it < max_iters; ++it) {
    DenseVector w = matvec(m, v);
    const double est = norm2(w);  // ||M v|| with ||v|| = 1
    if (est == 0.0) return false;
    if (it > 0 && std::abs(est - prev) < tol) {
      *out = est;
      return true;
    }
    prev = est;
    DenseVector z = matvec_t(m, w);
    const double zn = norm2(z);
    if (zn == 0.0) return false;
    for (double& x : z) x /= zn;
    v = std::move(z);
  }
  throw SpectralNormError("spectral_norm: no convergence within max_iters",
                          prev);
}

}  // namespace

double spectral_norm(const DenseMatrix& m, double tol, int max_iters) {
  if (m.rows == 0 || m.cols == 0)
    throw std::invalid_argument("spectral_norm: empty matrix");
  if (tol <= 0.0) throw std::invalid_argument("spectral_norm: tol must be > 0");
  if (max_iters < 1)
    throw std::invalid_argument("spectral_norm: max_iters must be >= 1");
  for (double x : m.values)
    if (!std::isfinite(x))
      throw std::invalid_argument("spectral_norm: non-finite entry");

  // Deterministic start: normalized all-ones; if that lands exactly in the
  // null space, fall through the canonical basis vectors in order.
  DenseVector start(m.cols, 1.0 / std::sqrt(static_cast<double>(m.cols)));
  double est = 0.0;
  if (power_iterate(m, start, tol, max_iters, &est)) return est;
  for (std::size_t j = 0; j < m.cols; ++j) {
    DenseVector e(m.cols, 0.0);
    e[j] = 1.0;
    if (power_iterate(m, std::move(e), tol, max_iters, &est)) return est;
  }
  return 0.0;  // zero matrix
}

DenseVector relu(std::span<const double> v) {
  DenseVector out(v.begin(), v.end());
  for (double& x : out) x = x > 0.0 ? x : 0.0;
  return out;
}

DenseVector leaky_relu(std::span<const double> v, double slope) {
  if (!(slope > 0.0 && slope <= 1.0))
    throw std::invalid_argument("leaky_relu: slope must be in (0,1]");
  DenseVector out(v.begin(), v.end());
  for (double& x : out) x = x >= 0.0 ? x : slope * x;
  return out;
}

DenseVector tanh_act(std::span<const double> v) {
  DenseVector out(v.begin(), v.end());
  for (double& x : out) x = std::tanh(x);
  return out;
}

DenseVector softmax(std::span<const double> logits) {
  if (logits.empty()) throw std::invalid_argument("softmax: empty input");
  const double hi = *std::max_element(logits.begin(), logits.end());
  DenseVector out(logits.size());
  double sum = 0.0;
  for (std::size_t i = 0; i < logits.size(); ++i) {
    out[i] = std::exp(logits[i] - hi);
    sum += out[i];
  }
  for (double& x : out) x /= sum;
  return out;
}

DenseVector norm_clip(std::span<const double> v, double bound) {
  if (!(bound > 0.0)) throw std::invalid_argument("norm_clip: bound must be > 0");
  DenseVector out(v.begin(), v.end());
  const double n = norm2(out);
  if (n > bound) {
    const double s = bound / n;
    for (double& x : out) x *= s;
  }
  return out;
}

}  // namespace ctdg

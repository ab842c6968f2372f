#pragma once

#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace ctdg {

// All numeric kernels work in 64-bit floats; the bound-verification paths
// need the headroom (gaps span many orders of magnitude).
using DenseVector = std::vector<double>;

struct DenseMatrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> values;  // row-major

  DenseMatrix() = default;
  DenseMatrix(std::size_t r, std::size_t c, double fill = 0.0)
      : rows(r), cols(c), values(r * c, fill) {}

  double& at(std::size_t r, std::size_t c) { return values[r * cols + c]; }
  double at(std::size_t r, std::size_t c) const { return values[r * cols + c]; }
};

DenseVector matvec(const DenseMatrix& m, std::span<const double> x);
DenseVector matvec_t(const DenseMatrix& m, std::span<const double> x);

double dot(std::span<const double> a, std::span<const double> b);
double norm2(std::span<const double> v);
// y += a * x
void axpy(double a, std::span<const double> x, DenseVector& y);

struct SpectralNormError : std::runtime_error {
  double last_estimate;
  SpectralNormError(const std::string& what, double estimate)
      : std::runtime_error(what), last_estimate(estimate) {}
};

// Largest singular value via power iteration on M^T M, deterministic
// normalized all-ones start. Converges when successive estimates differ
// by less than tol; throws SpectralNormError (carrying the last estimate)
// if max_iters is exhausted first.
double spectral_norm(const DenseMatrix& m, double tol = 1e-10,
                     int max_iters = 10000);

DenseVector relu(std::span<const double> v);
DenseVector leaky_relu(std::span<const double> v, double slope);
DenseVector tanh_act(std::span<const double> v);

// Max-subtracted stable softmax; input must be non-empty.
DenseVector softmax(std::span<const double> logits);

// Rescales v onto the ball of radius bound when ||v|| > bound; identity
// otherwise (no rescaling noise inside the ball).
DenseVector norm_clip(std::span<const double> v, double bound);

}  // namespace ctdg

#include "ganduf/kernels.hpp"

// Scalar reference kernels. Reductions use four accumulator lanes with the
// same lane assignment (element i -> lane i%4) and the same final combine
// ((l0+l1)+(l2+l3)) as the AVX2 kernels; this TU is compiled with
// -ffp-contract=off so both backends produce identical bits.

namespace ganduf::kernels::detail {
namespace {

void add_k(const double* a, const double* b, double* out, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) out[i] = a[i] + b[i];
}

void sub_k(const double* a, const double* b, double* out, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) out[i] = a[i] - b[i];
}

void mul_k(const double* a, const double* b, double* out, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) out[i] = a[i] * b[i];
}

void scale_k(const double* a, double s, double* out, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) out[i] = a[i] * s;
}

void axpy_k(double a, const double* x, double* y, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) y[i] = y[i] + a * x[i];
}

double dot_k(const double* a, const double* b, std::size_t n) {
  double lane[4] = {0.0, 0.0, 0.0, 0.0};
  for (std::size_t i = 0; i < n; ++i) lane[i % 4] += a[i] * b[i];
  return (lane[0] + lane[1]) + (lane[2] + lane[3]);
}

double sum_k(const double* a, std::size_t n) {
  double lane[4] = {0.0, 0.0, 0.0, 0.0};
  for (std::size_t i = 0; i < n; ++i) lane[i % 4] += a[i];
  return (lane[0] + lane[1]) + (lane[2] + lane[3]);
}

// ikj order: each C row accumulates axpy contributions in k order, so there
// is no reduction reordering to worry about.
void matmul_k(const double* A, const double* B, double* C, std::size_t rows,
              std::size_t inner, std::size_t cols) {
  for (std::size_t i = 0; i < rows; ++i) {
    double* crow = C + i * cols;
    for (std::size_t k = 0; k < inner; ++k) {
      const double a = A[i * inner + k];
      const double* brow = B + k * cols;
      for (std::size_t j = 0; j < cols; ++j) crow[j] = crow[j] + a * brow[j];
    }
  }
}

void matmul_nt_k(const double* A, const double* B, double* C, std::size_t rows,
                 std::size_t inner, std::size_t cols) {
  for (std::size_t i = 0; i < rows; ++i) {
    const double* arow = A + i * inner;
    for (std::size_t j = 0; j < cols; ++j) {
      C[i * cols + j] += dot_k(arow, B + j * inner, inner);
    }
  }
}

void matmul_tn_k(const double* A, const double* B, double* C, std::size_t rows,
                 std::size_t inner, std::size_t cols) {
  for (std::size_t k = 0; k < inner; ++k) {
    const double* brow = B + k * cols;
    for (std::size_t i = 0; i < rows; ++i) {
      const double a = A[k * rows + i];
      double* crow = C + i * cols;
      for (std::size_t j = 0; j < cols; ++j) crow[j] = crow[j] + a * brow[j];
    }
  }
}

}  // namespace

const KernelTable& scalar_table() {
  static const KernelTable t = {add_k,    sub_k, mul_k,    scale_k,
                                axpy_k,   dot_k, sum_k,    matmul_k,
                                matmul_nt_k, matmul_tn_k};
  return t;
}

}  // namespace ganduf::kernels::detail

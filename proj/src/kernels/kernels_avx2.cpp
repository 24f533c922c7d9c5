#include "ganduf/kernels.hpp"

// AVX2 variants. Built with -mavx2 -ffp-contract=off; no FMA intrinsics are
// used so results match the scalar reference bit-for-bit (see kernels.hpp).

#if defined(__x86_64__) || defined(_M_X64)
#define GANDUF_HAVE_AVX2_TU 1
#include <immintrin.h>
#else
#define GANDUF_HAVE_AVX2_TU 0
#endif

namespace ganduf::kernels::detail {

#if GANDUF_HAVE_AVX2_TU

namespace {

void add_k(const double* a, const double* b, double* out, std::size_t n) {
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    _mm256_storeu_pd(out + i, _mm256_add_pd(_mm256_loadu_pd(a + i),
                                            _mm256_loadu_pd(b + i)));
  }
  for (; i < n; ++i) out[i] = a[i] + b[i];
}

void sub_k(const double* a, const double* b, double* out, std::size_t n) {
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    _mm256_storeu_pd(out + i, _mm256_sub_pd(_mm256_loadu_pd(a + i),
                                            _mm256_loadu_pd(b + i)));
  }
  for (; i < n; ++i) out[i] = a[i] - b[i];
}

void mul_k(const double* a, const double* b, double* out, std::size_t n) {
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    _mm256_storeu_pd(out + i, _mm256_mul_pd(_mm256_loadu_pd(a + i),
                                            _mm256_loadu_pd(b + i)));
  }
  for (; i < n; ++i) out[i] = a[i] * b[i];
}

void scale_k(const double* a, double s, double* out, std::size_t n) {
  const __m256d sv = _mm256_set1_pd(s);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    _mm256_storeu_pd(out + i, _mm256_mul_pd(_mm256_loadu_pd(a + i), sv));
  }
  for (; i < n; ++i) out[i] = a[i] * s;
}

void axpy_k(double a, const double* x, double* y, std::size_t n) {
  const __m256d av = _mm256_set1_pd(a);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d prod = _mm256_mul_pd(av, _mm256_loadu_pd(x + i));
    _mm256_storeu_pd(y + i, _mm256_add_pd(_mm256_loadu_pd(y + i), prod));
  }
  for (; i < n; ++i) y[i] = y[i] + a * x[i];
}

double dot_k(const double* a, const double* b, std::size_t n) {
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    acc = _mm256_add_pd(
        acc, _mm256_mul_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i)));
  }
  alignas(32) double lane[4];
  _mm256_store_pd(lane, acc);
  for (; i < n; ++i) lane[i % 4] += a[i] * b[i];
  return (lane[0] + lane[1]) + (lane[2] + lane[3]);
}

double sum_k(const double* a, std::size_t n) {
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) acc = _mm256_add_pd(acc, _mm256_loadu_pd(a + i));
  alignas(32) double lane[4];
  _mm256_store_pd(lane, acc);
  for (; i < n; ++i) lane[i % 4] += a[i];
  return (lane[0] + lane[1]) + (lane[2] + lane[3]);
}

void matmul_k(const double* A, const double* B, double* C, std::size_t rows,
              std::size_t inner, std::size_t cols) {
  for (std::size_t i = 0; i < rows; ++i) {
    double* crow = C + i * cols;
    for (std::size_t k = 0; k < inner; ++k) {
      const double a = A[i * inner + k];
      const double* brow = B + k * cols;
      const __m256d av = _mm256_set1_pd(a);
      std::size_t j = 0;
      for (; j + 4 <= cols; j += 4) {
        const __m256d prod = _mm256_mul_pd(av, _mm256_loadu_pd(brow + j));
        _mm256_storeu_pd(crow + j,
                         _mm256_add_pd(_mm256_loadu_pd(crow + j), prod));
      }
      for (; j < cols; ++j) crow[j] = crow[j] + a * brow[j];
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
      const __m256d av = _mm256_set1_pd(a);
      std::size_t j = 0;
      for (; j + 4 <= cols; j += 4) {
        const __m256d prod = _mm256_mul_pd(av, _mm256_loadu_pd(brow + j));
        _mm256_storeu_pd(crow + j,
                         _mm256_add_pd(_mm256_loadu_pd(crow + j), prod));
      }
      for (; j < cols; ++j) crow[j] = crow[j] + a * brow[j];
    }
  }
}

}  // namespace

const KernelTable* avx2_table() {
  static const KernelTable t = {add_k,    sub_k, mul_k,    scale_k,
                                axpy_k,   dot_k, sum_k,    matmul_k,
                                matmul_nt_k, matmul_tn_k};
  return &t;
}

#else

const KernelTable* avx2_table() { return nullptr; }

#endif  // GANDUF_HAVE_AVX2_TU

}  // namespace ganduf::kernels::detail

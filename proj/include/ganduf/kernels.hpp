#pragma once

#include <cstddef>
#include <string>

namespace ganduf::kernels {

// Dense double-precision inner loops behind the tensor ops. Every kernel has
// a scalar reference implementation and (on x86-64 with AVX2) a vectorized
// variant; the backend is picked once at startup from CPUID, overridable via
// the GANDUF_KERNELS env var ("scalar" | "avx2") or set_backend().
//
// Reductions (dot, sum, matmul_nt) accumulate in four independent lanes
// combined as (l0+l1)+(l2+l3) in both backends, and the kernel translation
// units are built with -ffp-contract=off, so the two backends agree
// bit-for-bit. The equivalence tests assert exactly that.

enum class Backend { scalar, avx2 };

Backend active_backend();
void set_backend(Backend b);      // throws if the backend is unavailable
bool avx2_available();
std::string backend_name();

// Elementwise over contiguous arrays of length n. out may alias a or b.
void add(const double* a, const double* b, double* out, std::size_t n);
void sub(const double* a, const double* b, double* out, std::size_t n);
void mul(const double* a, const double* b, double* out, std::size_t n);
void scale(const double* a, double s, double* out, std::size_t n);
void axpy(double a, const double* x, double* y, std::size_t n);  // y += a*x

// Blocked-order reductions.
double dot(const double* a, const double* b, std::size_t n);
double sum(const double* a, std::size_t n);

// Row-major matrix products, accumulating into C (callers zero C first when
// they want a plain product).
//   matmul:    C[r,c] += sum_k A[r,k] * B[k,c]     A: r x k, B: k x c
//   matmul_nt: C[r,c] += sum_k A[r,k] * B[c,k]     A: r x k, B: c x k
//   matmul_tn: C[r,c] += sum_k A[k,r] * B[k,c]     A: k x r, B: k x c
void matmul(const double* A, const double* B, double* C, std::size_t rows,
            std::size_t inner, std::size_t cols);
void matmul_nt(const double* A, const double* B, double* C, std::size_t rows,
               std::size_t inner, std::size_t cols);
void matmul_tn(const double* A, const double* B, double* C, std::size_t rows,
               std::size_t inner, std::size_t cols);

namespace detail {

struct KernelTable {
  void (*add)(const double*, const double*, double*, std::size_t);
  void (*sub)(const double*, const double*, double*, std::size_t);
  void (*mul)(const double*, const double*, double*, std::size_t);
  void (*scale)(const double*, double, double*, std::size_t);
  void (*axpy)(double, const double*, double*, std::size_t);
  double (*dot)(const double*, const double*, std::size_t);
  double (*sum)(const double*, std::size_t);
  void (*matmul)(const double*, const double*, double*, std::size_t,
                 std::size_t, std::size_t);
  void (*matmul_nt)(const double*, const double*, double*, std::size_t,
                    std::size_t, std::size_t);
  void (*matmul_tn)(const double*, const double*, double*, std::size_t,
                    std::size_t, std::size_t);
};

const KernelTable& scalar_table();
const KernelTable* avx2_table();  // nullptr when not compiled in

}  // namespace detail

}  // namespace ganduf::kernels

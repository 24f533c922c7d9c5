#include <cstdlib>
#include <cstring>

#include "ganduf/errors.hpp"
#include "ganduf/kernels.hpp"

namespace ganduf::kernels {

namespace {

using detail::KernelTable;

bool cpu_has_avx2() {
#if defined(__x86_64__) || defined(_M_X64)
  return __builtin_cpu_supports("avx2") != 0;
#else
  return false;
#endif
}

struct Dispatch {
  Backend backend;
  const KernelTable* table;

  Dispatch() {
    backend = Backend::scalar;
    table = &detail::scalar_table();
    if (avx2_available()) {
      backend = Backend::avx2;
      table = detail::avx2_table();
    }
    if (const char* env = std::getenv("GANDUF_KERNELS")) {
      if (std::strcmp(env, "scalar") == 0) {
        backend = Backend::scalar;
        table = &detail::scalar_table();
      } else if (std::strcmp(env, "avx2") == 0 && avx2_available()) {
        backend = Backend::avx2;
        table = detail::avx2_table();
      }
    }
  }
};

Dispatch& dispatch() {
  static Dispatch d;
  return d;
}

}  // namespace

bool avx2_available() {
  return detail::avx2_table() != nullptr && cpu_has_avx2();
}

Backend active_backend() { return dispatch().backend; }

std::string backend_name() {
  return dispatch().backend == Backend::avx2 ? "avx2" : "scalar";
}

void set_backend(Backend b) {
  if (b == Backend::avx2) {
    if (!avx2_available()) throw ContractError("avx2 kernels unavailable on this cpu");
    dispatch().backend = Backend::avx2;
    dispatch().table = detail::avx2_table();
  } else {
    dispatch().backend = Backend::scalar;
    dispatch().table = &detail::scalar_table();
  }
}

void add(const double* a, const double* b, double* out, std::size_t n) {
  dispatch().table->add(a, b, out, n);
}
void sub(const double* a, const double* b, double* out, std::size_t n) {
  dispatch().table->sub(a, b, out, n);
}
void mul(const double* a, const double* b, double* out, std::size_t n) {
  dispatch().table->mul(a, b, out, n);
}
void scale(const double* a, double s, double* out, std::size_t n) {
  dispatch().table->scale(a, s, out, n);
}
void axpy(double a, const double* x, double* y, std::size_t n) {
  dispatch().table->axpy(a, x, y, n);
}
double dot(const double* a, const double* b, std::size_t n) {
  return dispatch().table->dot(a, b, n);
}
double sum(const double* a, std::size_t n) { return dispatch().table->sum(a, n); }
void matmul(const double* A, const double* B, double* C, std::size_t rows,
            std::size_t inner, std::size_t cols) {
  dispatch().table->matmul(A, B, C, rows, inner, cols);
}
void matmul_nt(const double* A, const double* B, double* C, std::size_t rows,
               std::size_t inner, std::size_t cols) {
  dispatch().table->matmul_nt(A, B, C, rows, inner, cols);
}
void matmul_tn(const double* A, const double* B, double* C, std::size_t rows,
               std::size_t inner, std::size_t cols) {
  dispatch().table->matmul_tn(A, B, C, rows, inner, cols);
}

}  // namespace ganduf::kernels

#include "egonav/nn/gemm.hpp"

#ifdef EGONAV_USE_CBLAS
#include <cblas.h>
#else
#include <cstddef>
#endif

namespace egonav::nn {

#ifdef EGONAV_USE_CBLAS

void gemm(bool trans_a, bool trans_b, int m, int n, int k, float alpha, const float* a,
          int lda, const float* b, int ldb, float beta, float* c, int ldc) {
  cblas_sgemm(CblasRowMajor, trans_a ? CblasTrans : CblasNoTrans,
              trans_b ? CblasTrans : CblasNoTrans, m, n, k, alpha, a, lda, b, ldb, beta,
              c, ldc);
}

void gemm(bool trans_a, bool trans_b, int m, int n, int k, double alpha, const double* a,
          int lda, const double* b, int ldb, double beta, double* c, int ldc) {
  cblas_dgemm(CblasRowMajor, trans_a ? CblasTrans : CblasNoTrans,
              trans_b ? CblasTrans : CblasNoTrans, m, n, k, alpha, a, lda, b, ldb, beta,
              c, ldc);
}

#else

namespace {

// plain blocked fallback; correctness over speed
template <typename T>
void gemm_impl(bool trans_a, bool trans_b, int m, int n, int k, T alpha, const T* a,
               int lda, const T* b, int ldb, T beta, T* c, int ldc) {
  auto at = [&](int i, int p) { return trans_a ? a[(std::size_t)p * lda + i]
                                               : a[(std::size_t)i * lda + p]; };
  auto bt = [&](int p, int j) { return trans_b ? b[(std::size_t)j * ldb + p]
                                               : b[(std::size_t)p * ldb + j]; };
  for (int i = 0; i < m; ++i) {
    for (int j = 0; j < n; ++j) {
      T acc = 0;
      for (int p = 0; p < k; ++p) acc += at(i, p) * bt(p, j);
      T* out = &c[(std::size_t)i * ldc + j];
      *out = alpha * acc + (beta == T(0) ? T(0) : beta * *out);
    }
  }
}

}  // namespace

void gemm(bool trans_a, bool trans_b, int m, int n, int k, float alpha, const float* a,
          int lda, const float* b, int ldb, float beta, float* c, int ldc) {
  gemm_impl(trans_a, trans_b, m, n, k, alpha, a, lda, b, ldb, beta, c, ldc);
}

void gemm(bool trans_a, bool trans_b, int m, int n, int k, double alpha, const double* a,
          int lda, const double* b, int ldb, double beta, double* c, int ldc) {
  gemm_impl(trans_a, trans_b, m, n, k, alpha, a, lda, b, ldb, beta, c, ldc);
}

#endif

}  // namespace egonav::nn

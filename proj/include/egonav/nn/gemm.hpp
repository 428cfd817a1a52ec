#pragma once

namespace egonav::nn {

// C[m,n] = alpha * op(A) * op(B) + beta * C, row-major
// op(A) is A[m,k] or, when trans_a, A stored as [k,m]
void gemm(bool trans_a, bool trans_b, int m, int n, int k, float alpha, const float* a,
          int lda, const float* b, int ldb, float beta, float* c, int ldc);
void gemm(bool trans_a, bool trans_b, int m, int n, int k, double alpha, const double* a,
          int lda, const double* b, int ldb, double beta, double* c, int ldc);

}  // namespace egonav::nn

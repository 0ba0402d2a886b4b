#ifndef STOKESLAB_LINALG_HPP
#define STOKESLAB_LINALG_HPP

#include "stokeslab/bigcomplex.hpp"

#include <vector>

namespace stokeslab {

/// Dense complex matrix at working precision (row-major). Sized for the
/// homological blocks (tens of rows), not for large-scale work.
class CMatrix {
public:
    CMatrix() : r_(0), c_(0) {}
    CMatrix(int rows, int cols) : r_(rows), c_(cols), a_(static_cast<size_t>(rows * cols)) {}

    int rows() const { return r_; }
    int cols() const { return c_; }
    BigComplex& at(int i, int j) { return a_[static_cast<size_t>(i * c_ + j)]; }
    const BigComplex& at(int i, int j) const { return a_[static_cast<size_t>(i * c_ + j)]; }

private:
    int r_, c_;
    std::vector<BigComplex> a_;
};

using CVecN = std::vector<BigComplex>;

struct LsqResult {
    CVecN x;                 // minimum-norm least-squares solution
    BigFloat residual_norm;  // euclidean norm of A x - b
    int rank = 0;
    std::vector<CVecN> kernel;  // orthonormal basis of ker(A)
};

/// Minimum-norm least squares via Householder QR with column pivoting.
/// Columns whose pivot falls below pivot_tol * |first pivot| are treated as
/// dependent.
LsqResult lsq_min_norm(const CMatrix& A, const CVecN& b, const BigFloat& pivot_tol);

/// Solve a square system by LU with partial pivoting.
CVecN lu_solve(const CMatrix& A, const CVecN& b);

BigFloat vec_norm(const CVecN& v);

}  // namespace stokeslab

#endif

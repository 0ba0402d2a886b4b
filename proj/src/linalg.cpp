#include "stokeslab/linalg.hpp"

#include "stokeslab/errors.hpp"

#include <algorithm>

namespace stokeslab {

BigFloat vec_norm(const CVecN& v) {
    BigFloat s(0L);
    for (const auto& z : v) {
        s += z.re() * z.re();
        s += z.im() * z.im();
    }
    return sqrt(s);
}

namespace {

BigComplex inner(const CVecN& a, const CVecN& b) {
    // conj(a) . b
    BigComplex s(0L);
    for (size_t i = 0; i < a.size(); ++i) s += conj(a[i]) * b[i];
    return s;
}

// Householder QR with column pivoting applied to a working copy.
// On exit: R stored in the upper triangle, reflectors v_k in the lower part
// (with unit leading entry implied), beta_k scaling factors, perm the column
// permutation.
struct QRP {
    CMatrix A;
    std::vector<BigComplex> beta;
    std::vector<int> perm;
    int rank = 0;

    QRP(CMatrix M, const BigFloat& pivot_tol) : A(std::move(M)) {
        int m = A.rows(), n = A.cols();
        int kmax = std::min(m, n);
        beta.assign(static_cast<size_t>(kmax), BigComplex(0L));
        perm.resize(static_cast<size_t>(n));
        for (int j = 0; j < n; ++j) perm[static_cast<size_t>(j)] = j;
        std::vector<BigFloat> colnorm(static_cast<size_t>(n), BigFloat(0L));
        auto col_norm2 = [&](int j, int from) {
            BigFloat s(0L);
            for (int i = from; i < m; ++i) {
                s += A.at(i, j).re() * A.at(i, j).re();
                s += A.at(i, j).im() * A.at(i, j).im();
            }
            return s;
        };
        BigFloat first_pivot(-1L);
        for (int k = 0; k < kmax; ++k) {
            // pivot: column with largest remaining norm
            int best = k;
            BigFloat bn(-1L);
            for (int j = k; j < n; ++j) {
                colnorm[static_cast<size_t>(j)] = col_norm2(j, k);
                if (colnorm[static_cast<size_t>(j)] > bn) {
                    bn = colnorm[static_cast<size_t>(j)];
                    best = j;
                }
            }
            if (best != k) {
                for (int i = 0; i < m; ++i) std::swap(A.at(i, k), A.at(i, best));
                std::swap(perm[static_cast<size_t>(k)], perm[static_cast<size_t>(best)]);
            }
            BigFloat nrm = sqrt(bn);
            if (first_pivot < BigFloat(0L)) first_pivot = nrm;
            if (first_pivot.is_zero() || nrm <= pivot_tol * first_pivot) break;  // rank found
            // Householder vector for column k
            BigComplex x0 = A.at(k, k);
            BigFloat ax0 = abs(x0);
            BigComplex phase = ax0.is_zero() ? BigComplex(1L) : x0 * BigComplex(BigFloat(1L) / ax0, BigFloat(0L));
            BigComplex alpha = phase * BigComplex(-nrm, BigFloat(0L));
            // v = x - alpha e1, normalized so v_k(k)=1
            BigComplex v0 = x0 - alpha;
            if (v0.is_zero()) {
                // x is already -alpha e1; no reflection needed
                beta[static_cast<size_t>(k)] = BigComplex(0L);
                A.at(k, k) = alpha;
                ++rank;
                continue;
            }
            for (int i = k + 1; i < m; ++i) A.at(i, k) = A.at(i, k) / v0;
            // beta = v0^* v0 related scaling: with v normalized (v(k)=1),
            // H = I - beta v v^*, beta = 2 / (v^* v)
            BigFloat vv(1L);
            for (int i = k + 1; i < m; ++i) {
                vv += A.at(i, k).re() * A.at(i, k).re();
                vv += A.at(i, k).im() * A.at(i, k).im();
            }
            BigComplex b(BigFloat(2L) / vv, BigFloat(0L));
            beta[static_cast<size_t>(k)] = b;
            A.at(k, k) = alpha;
            // apply H to remaining columns
            for (int j = k + 1; j < n; ++j) {
                BigComplex s = A.at(k, j);
                for (int i = k + 1; i < m; ++i) s += conj(A.at(i, k)) * A.at(i, j);
                s *= b;
                A.at(k, j) -= s;
                for (int i = k + 1; i < m; ++i) A.at(i, j).sub_mul(s, A.at(i, k));
            }
            ++rank;
        }
    }

    // y <- Q^* y
    void apply_qstar(CVecN& y) const {
        int m = A.rows();
        for (int k = 0; k < rank; ++k) {
            if (beta[static_cast<size_t>(k)].is_zero()) continue;
            BigComplex s = y[static_cast<size_t>(k)];
            for (int i = k + 1; i < m; ++i) s += conj(A.at(i, k)) * y[static_cast<size_t>(i)];
            s *= beta[static_cast<size_t>(k)];
            y[static_cast<size_t>(k)] -= s;
            for (int i = k + 1; i < m; ++i) y[static_cast<size_t>(i)].sub_mul(s, A.at(i, k));
        }
    }
};

}  // namespace

LsqResult lsq_min_norm(const CMatrix& A, const CVecN& b, const BigFloat& pivot_tol) {
    int m = A.rows(), n = A.cols();
    QRP qr(A, pivot_tol);
    int r = qr.rank;

    CVecN y = b;
    qr.apply_qstar(y);

    LsqResult res;
    res.rank = r;
    // residual norm = ||y[r:]||
    {
        BigFloat s(0L);
        for (int i = r; i < m; ++i) {
            s += y[static_cast<size_t>(i)].re() * y[static_cast<size_t>(i)].re();
            s += y[static_cast<size_t>(i)].im() * y[static_cast<size_t>(i)].im();
        }
        res.residual_norm = sqrt(s);
    }
    // basic solution: R11 z = y[0:r]
    CVecN z(static_cast<size_t>(r), BigComplex(0L));
    for (int i = r - 1; i >= 0; --i) {
        BigComplex s = y[static_cast<size_t>(i)];
        for (int j = i + 1; j < r; ++j) s.sub_mul(qr.A.at(i, j), z[static_cast<size_t>(j)]);
        z[static_cast<size_t>(i)] = s / qr.A.at(i, i);
    }
    CVecN x(static_cast<size_t>(n), BigComplex(0L));
    for (int i = 0; i < r; ++i) x[static_cast<size_t>(qr.perm[static_cast<size_t>(i)])] = z[static_cast<size_t>(i)];

    // kernel basis: for each free column f (r..n-1): solve R11 w = -R12 e_f
    std::vector<CVecN> kernel;
    for (int f = r; f < n; ++f) {
        CVecN w(static_cast<size_t>(r), BigComplex(0L));
        for (int i = r - 1; i >= 0; --i) {
            BigComplex s = -qr.A.at(i, f);
            for (int j = i + 1; j < r; ++j) s.sub_mul(qr.A.at(i, j), w[static_cast<size_t>(j)]);
            w[static_cast<size_t>(i)] = s / qr.A.at(i, i);
        }
        CVecN k(static_cast<size_t>(n), BigComplex(0L));
        for (int i = 0; i < r; ++i) k[static_cast<size_t>(qr.perm[static_cast<size_t>(i)])] = w[static_cast<size_t>(i)];
        k[static_cast<size_t>(qr.perm[static_cast<size_t>(f)])] = BigComplex(1L);
        kernel.push_back(std::move(k));
    }
    // orthonormalize the kernel (modified Gram-Schmidt) and project x onto
    // the orthogonal complement: the minimum-norm solution.
    for (auto& k : kernel) {
        for (const auto& prev : res.kernel) {
            BigComplex c = inner(prev, k);
            for (size_t i = 0; i < k.size(); ++i) k[i].sub_mul(c, prev[i]);
        }
        BigFloat nn = vec_norm(k);
        if (nn.is_zero()) continue;
        BigComplex inv(BigFloat(1L) / nn, BigFloat(0L));
        for (auto& e : k) e *= inv;
        res.kernel.push_back(std::move(k));
    }
    for (const auto& kvec : res.kernel) {
        BigComplex c = inner(kvec, x);
        for (size_t i = 0; i < x.size(); ++i) x[i].sub_mul(c, kvec[i]);
    }
    res.x = std::move(x);
    return res;
}

CVecN lu_solve(const CMatrix& A, const CVecN& b) {
    int n = A.rows();
    if (A.cols() != n) throw Error("lu_solve: square matrix required");
    CMatrix M = A;
    CVecN x = b;
    std::vector<int> piv(static_cast<size_t>(n));
    for (int i = 0; i < n; ++i) piv[static_cast<size_t>(i)] = i;
    for (int k = 0; k < n; ++k) {
        int best = k;
        BigFloat bb = norm1(M.at(k, k));
        for (int i = k + 1; i < n; ++i) {
            BigFloat t = norm1(M.at(i, k));
            if (t > bb) {
                bb = t;
                best = i;
            }
        }
        if (best != k) {
            for (int j = 0; j < n; ++j) std::swap(M.at(k, j), M.at(best, j));
            std::swap(x[static_cast<size_t>(k)], x[static_cast<size_t>(best)]);
        }
        if (M.at(k, k).is_zero()) throw Error("lu_solve: singular matrix");
        for (int i = k + 1; i < n; ++i) {
            M.at(i, k) = M.at(i, k) / M.at(k, k);
            for (int j = k + 1; j < n; ++j) M.at(i, j).sub_mul(M.at(i, k), M.at(k, j));
            x[static_cast<size_t>(i)].sub_mul(M.at(i, k), x[static_cast<size_t>(k)]);
        }
    }
    for (int i = n - 1; i >= 0; --i) {
        for (int j = i + 1; j < n; ++j) x[static_cast<size_t>(i)].sub_mul(M.at(i, j), x[static_cast<size_t>(j)]);
        x[static_cast<size_t>(i)] = x[static_cast<size_t>(i)] / M.at(i, i);
    }
    return x;
}

}  // namespace stokeslab

#include "bfv/lattice.hpp"

#include <algorithm>
#include <stdexcept>

namespace bfv {

ZMat hnf_rows(ZMat a) {
    if (a.empty()) return {};
    size_t n = a[0].size();
    size_t row = 0;
    for (size_t col = 0; col < n && row < a.size(); ++col) {
        // eliminate below `row` in `col` by gcd steps
        while (true) {
            size_t piv = a.size();
            for (size_t r = row; r < a.size(); ++r)
                if (a[r][col] != 0 && (piv == a.size() || abs(a[r][col]) < abs(a[piv][col])))
                    piv = r;
            if (piv == a.size()) break;  // column clear
            std::swap(a[row], a[piv]);
            bool clear = true;
            for (size_t r = row + 1; r < a.size(); ++r) {
                if (a[r][col] == 0) continue;
                mpz_class q = a[r][col] / a[row][col];  // truncated; remainder shrinks
                for (size_t c = 0; c < n; ++c) a[r][c] -= q * a[row][c];
                if (a[r][col] != 0) clear = false;
            }
            if (clear) break;
        }
        if (a[row][col] == 0) continue;
        if (a[row][col] < 0)
            for (size_t c = 0; c < n; ++c) a[row][c] = -a[row][c];
        // reduce entries above the pivot into [0, pivot)
        for (size_t r = 0; r < row; ++r) {
            mpz_class q;
            mpz_fdiv_q(q.get_mpz_t(), a[r][col].get_mpz_t(), a[row][col].get_mpz_t());
            if (q != 0)
                for (size_t c = 0; c < n; ++c) a[r][c] -= q * a[row][c];
        }
        ++row;
    }
    a.resize(row);
    return a;
}

ZMat kernel_basis(const ZMat& a, int n) {
    size_t m = a.size();
    // column operations on A, mirrored on an identity matrix U; kernel basis =
    // columns of U under the zero columns of the reduced A
    ZMat w(m, ZVec(n, 0));
    for (size_t r = 0; r < m; ++r)
        for (int c = 0; c < n; ++c) w[r][c] = a[r][c];
    ZMat u(n, ZVec(n, 0));
    for (int i = 0; i < n; ++i) u[i][i] = 1;

    auto colswap = [&](int i, int j) {
        for (size_t r = 0; r < m; ++r) std::swap(w[r][i], w[r][j]);
        for (int r = 0; r < n; ++r) std::swap(u[r][i], u[r][j]);
    };
    auto colsub = [&](int i, int j, const mpz_class& q) {  // col_i -= q * col_j
        for (size_t r = 0; r < m; ++r) w[r][i] -= q * w[r][j];
        for (int r = 0; r < n; ++r) u[r][i] -= q * u[r][j];
    };

    int lead = 0;
    for (size_t row = 0; row < m && lead < n; ++row) {
        while (true) {
            int piv = -1;
            for (int c = lead; c < n; ++c)
                if (w[row][c] != 0 && (piv < 0 || abs(w[row][c]) < abs(w[row][piv]))) piv = c;
            if (piv < 0) break;
            colswap(lead, piv);
            bool clear = true;
            for (int c = lead + 1; c < n; ++c) {
                if (w[row][c] == 0) continue;
                mpz_class q = w[row][c] / w[row][lead];
                colsub(c, lead, q);
                if (w[row][c] != 0) clear = false;
            }
            if (clear) break;
        }
        if (w[row][lead] != 0) ++lead;
    }
    ZMat out;
    for (int c = lead; c < n; ++c) {
        ZVec v(n);
        bool nz = false;
        for (int r = 0; r < n; ++r) {
            v[r] = u[r][c];
            if (v[r] != 0) nz = true;
        }
        if (nz) out.push_back(std::move(v));
    }
    return hnf_rows(std::move(out));
}

bool lattice_contains(const ZMat& hnf, ZVec v) {
    size_t n = v.size();
    size_t row = 0;
    for (size_t col = 0; col < n; ++col) {
        // pivot of `row` is the first nonzero entry of that HNF row
        size_t pivcol = n;
        if (row < hnf.size()) {
            pivcol = 0;
            while (pivcol < n && hnf[row][pivcol] == 0) ++pivcol;
        }
        if (pivcol == col) {
            mpz_class q, r;
            mpz_fdiv_qr(q.get_mpz_t(), r.get_mpz_t(), v[col].get_mpz_t(),
                        hnf[row][col].get_mpz_t());
            if (r != 0) return false;
            for (size_t c = col; c < n; ++c) v[c] -= q * hnf[row][c];
            ++row;
        } else if (v[col] != 0) {
            return false;
        }
    }
    return true;
}

}  // namespace bfv

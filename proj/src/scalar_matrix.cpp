#include "fb/scalar_matrix.hpp"

#include "fb/errors.hpp"

#include <sstream>

namespace fb {

ScalarMatrix ScalarMatrix::identity(int n)
{
    ScalarMatrix m(n, n);
    for (int i = 0; i < n; ++i) m(i, i) = Scalar(1);
    return m;
}

ScalarMatrix ScalarMatrix::from_columns(const std::vector<std::vector<Scalar>> &cols)
{
    int r = cols.empty() ? 0 : (int)cols[0].size();
    ScalarMatrix m(r, (int)cols.size());
    for (int j = 0; j < m.cols_; ++j) {
        if ((int)cols[j].size() != r) throw Error(ErrorKind::DimensionMismatch, "ragged columns");
        for (int i = 0; i < r; ++i) m(i, j) = cols[j][i];
    }
    return m;
}

std::vector<Scalar> ScalarMatrix::column(int j) const
{
    std::vector<Scalar> c(rows_);
    for (int i = 0; i < rows_; ++i) c[i] = (*this)(i, j);
    return c;
}

bool ScalarMatrix::is_zero() const
{
    for (auto &x : a_)
        if (!x.is_zero()) return false;
    return true;
}

ScalarMatrix ScalarMatrix::transpose() const
{
    ScalarMatrix t(cols_, rows_);
    for (int i = 0; i < rows_; ++i)
        for (int j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
    return t;
}

ScalarMatrix ScalarMatrix::map(const std::function<Scalar(const Scalar &)> &f) const
{
    ScalarMatrix r = *this;
    for (auto &x : r.a_) x = f(x);
    return r;
}

ScalarMatrix ScalarMatrix::operator-() const
{
    ScalarMatrix r = *this;
    for (auto &x : r.a_) x = -x;
    return r;
}

ScalarMatrix operator*(const Scalar &c, const ScalarMatrix &m)
{
    if (c.is_one()) return m;
    ScalarMatrix r = m;
    for (auto &x : r.a_)
        if (!x.is_zero()) x *= c;
    return r;
}

ScalarMatrix operator*(const ScalarMatrix &a, const ScalarMatrix &b)
{
    if (a.cols_ != b.rows_) throw Error(ErrorKind::DimensionMismatch, "matrix product shapes");
    ScalarMatrix c(a.rows_, b.cols_);
    for (int i = 0; i < a.rows_; ++i)
        for (int k = 0; k < a.cols_; ++k) {
            const Scalar &x = a(i, k);
            if (x.is_zero()) continue;
            for (int j = 0; j < b.cols_; ++j)
                if (!b(k, j).is_zero()) c(i, j) += x * b(k, j);
        }
    return c;
}

ScalarMatrix operator+(const ScalarMatrix &a, const ScalarMatrix &b)
{
    if (a.rows_ != b.rows_ || a.cols_ != b.cols_) throw Error(ErrorKind::DimensionMismatch, "matrix sum shapes");
    ScalarMatrix c = a;
    for (size_t i = 0; i < c.a_.size(); ++i) c.a_[i] += b.a_[i];
    return c;
}

ScalarMatrix operator-(const ScalarMatrix &a, const ScalarMatrix &b)
{
    if (a.rows_ != b.rows_ || a.cols_ != b.cols_) throw Error(ErrorKind::DimensionMismatch, "matrix difference shapes");
    ScalarMatrix c = a;
    for (size_t i = 0; i < c.a_.size(); ++i) c.a_[i] -= b.a_[i];
    return c;
}

std::vector<Scalar> ScalarMatrix::apply(const std::vector<Scalar> &v) const
{
    if ((int)v.size() != cols_) throw Error(ErrorKind::DimensionMismatch, "vector length");
    std::vector<Scalar> r(rows_);
    for (int i = 0; i < rows_; ++i)
        for (int j = 0; j < cols_; ++j)
            if (!(*this)(i, j).is_zero() && !v[j].is_zero()) r[i] += (*this)(i, j) * v[j];
    return r;
}

std::string ScalarMatrix::to_string() const
{
    std::ostringstream os;
    os << "[";
    for (int i = 0; i < rows_; ++i) {
        os << (i ? ", [" : "[");
        for (int j = 0; j < cols_; ++j) os << (j ? ", " : "") << (*this)(i, j).to_string();
        os << "]";
    }
    os << "]";
    return os.str();
}

namespace {

Scalar det_cofactor(const ScalarMatrix &m, std::vector<int> &rows, int col)
{
    int n = (int)rows.size();
    if (n == 1) return m(rows[0], col);
    if (n == 2) return m(rows[0], col) * m(rows[1], col + 1) - m(rows[1], col) * m(rows[0], col + 1);
    Scalar d;
    for (int k = 0; k < n; ++k) {
        const Scalar &x = m(rows[k], col);
        if (x.is_zero()) continue;
        std::vector<int> sub;
        for (int r = 0; r < n; ++r)
            if (r != k) sub.push_back(rows[r]);
        Scalar minor = det_cofactor(m, sub, col + 1);
        d += (k % 2 ? -x : x) * minor;
    }
    return d;
}

// Fraction-free elimination; every division is exact.
Scalar det_bareiss(ScalarMatrix a)
{
    int n = a.rows();
    int sign = 1;
    Scalar prev(1);
    for (int k = 0; k < n - 1; ++k) {
        if (a(k, k).is_zero()) {
            int p = k + 1;
            while (p < n && a(p, k).is_zero()) ++p;
            if (p == n) return Scalar();
            for (int j = 0; j < n; ++j) std::swap(a(k, j), a(p, j));
            sign = -sign;
        }
        for (int i = k + 1; i < n; ++i)
            for (int j = k + 1; j < n; ++j) a(i, j) = (a(i, j) * a(k, k) - a(i, k) * a(k, j)) / prev;
        prev = a(k, k);
    }
    return sign > 0 ? a(n - 1, n - 1) : -a(n - 1, n - 1);
}

} // namespace

Scalar mat_det(const ScalarMatrix &m)
{
    if (m.rows() != m.cols()) throw Error(ErrorKind::NonSquare, "determinant of a non-square matrix");
    int n = m.rows();
    if (n == 0) return Scalar(1);
    // Clear denominators row by row so the expansion runs over polynomials
    // and only the final quotient needs a gcd.
    ScalarMatrix cleared = m;
    Poly den(1);
    for (int i = 0; i < n; ++i) {
        Poly l(1);
        for (int j = 0; j < n; ++j) {
            const Poly &d = m(i, j).den();
            if (d.is_one()) continue;
            Poly g = poly_gcd(l, d);
            l = l * (g.is_constant() ? d : *divide_exact(d, g));
        }
        if (l.is_one()) continue;
        den = den * l;
        for (int j = 0; j < n; ++j) cleared(i, j) = m(i, j) * Scalar(l);
    }
    if (!den.is_one()) return mat_det(cleared) / Scalar(den);
    if (n <= 4) {
        std::vector<int> rows(n);
        for (int i = 0; i < n; ++i) rows[i] = i;
        return det_cofactor(m, rows, 0);
    }
    return det_bareiss(m);
}

SolveResult mat_solve_full(const ScalarMatrix &m, const ScalarMatrix &b)
{
    if (m.rows() != b.rows()) throw Error(ErrorKind::DimensionMismatch, "solve: row counts differ");
    int R = m.rows(), C = m.cols(), K = b.cols();
    ScalarMatrix a(R, C + K);
    for (int i = 0; i < R; ++i) {
        for (int j = 0; j < C; ++j) a(i, j) = m(i, j);
        for (int j = 0; j < K; ++j) a(i, C + j) = b(i, j);
    }
    SolveResult res;
    int row = 0;
    for (int col = 0; col < C && row < R; ++col) {
        // Prefer the simplest nonzero pivot to limit expression swell.
        int p = -1;
        size_t best = 0;
        for (int i = row; i < R; ++i) {
            if (a(i, col).is_zero()) continue;
            size_t w = a(i, col).num().size() + a(i, col).den().size();
            if (p < 0 || w < best) p = i, best = w;
        }
        if (p < 0) continue;
        for (int j = 0; j < C + K; ++j) std::swap(a(row, j), a(p, j));
        Scalar inv = a(row, col).inverse();
        for (int j = col; j < C + K; ++j)
            if (!a(row, j).is_zero()) a(row, j) *= inv;
        for (int i = 0; i < R; ++i) {
            if (i == row || a(i, col).is_zero()) continue;
            Scalar f = a(i, col);
            for (int j = col; j < C + K; ++j)
                if (!a(row, j).is_zero()) a(i, j) -= f * a(row, j);
        }
        res.pivots.push_back(col);
        ++row;
    }
    res.rank = row;
    res.solvable = true;
    for (int i = row; i < R && res.solvable; ++i)
        for (int j = 0; j < K; ++j)
            if (!a(i, C + j).is_zero()) {
                res.solvable = false;
                break;
            }
    if (res.solvable) {
        res.solution = ScalarMatrix(C, K);
        for (int r = 0; r < res.rank; ++r)
            for (int j = 0; j < K; ++j) res.solution(res.pivots[r], j) = a(r, C + j);
    }
    std::vector<bool> is_pivot(C, false);
    for (int p : res.pivots) is_pivot[p] = true;
    for (int f = 0; f < C; ++f) {
        if (is_pivot[f]) continue;
        std::vector<Scalar> v(C);
        v[f] = Scalar(1);
        for (int r = 0; r < res.rank; ++r) v[res.pivots[r]] = -a(r, f);
        res.nullspace.push_back(std::move(v));
    }
    return res;
}

ScalarMatrix mat_solve(const ScalarMatrix &m, const ScalarMatrix &b)
{
    auto r = mat_solve_full(m, b);
    if (!r.solvable) throw Error(ErrorKind::NoSolution, "inconsistent system (rank " + std::to_string(r.rank) + ")");
    return r.solution;
}

int mat_rank(const ScalarMatrix &m) { return mat_solve_full(m, ScalarMatrix(m.rows(), 0)).rank; }

std::vector<std::vector<Scalar>> mat_nullspace(const ScalarMatrix &m)
{
    return mat_solve_full(m, ScalarMatrix(m.rows(), 0)).nullspace;
}

ScalarMatrix mat_inverse(const ScalarMatrix &m)
{
    if (m.rows() != m.cols()) throw Error(ErrorKind::NonSquare, "inverse of a non-square matrix");
    auto r = mat_solve_full(m, ScalarMatrix::identity(m.rows()));
    if (r.rank < m.rows()) throw Error(ErrorKind::NoSolution, "singular matrix");
    return r.solution;
}

} // namespace fb

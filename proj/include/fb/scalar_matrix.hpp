#pragma once

#include "fb/scalar.hpp"

#include <functional>
#include <optional>
#include <vector>

namespace fb {

class ScalarMatrix {
  public:
    ScalarMatrix() = default;
    ScalarMatrix(int rows, int cols) : rows_(rows), cols_(cols), a_((size_t)rows * cols) {}
    static ScalarMatrix identity(int n);
    static ScalarMatrix from_columns(const std::vector<std::vector<Scalar>> &cols);

    int rows() const { return rows_; }
    int cols() const { return cols_; }
    Scalar &operator()(int i, int j) { return a_[(size_t)i * cols_ + j]; }
    const Scalar &operator()(int i, int j) const { return a_[(size_t)i * cols_ + j]; }
    std::vector<Scalar> column(int j) const;
    bool is_zero() const;

    ScalarMatrix transpose() const;
    ScalarMatrix map(const std::function<Scalar(const Scalar &)> &f) const;
    ScalarMatrix operator-() const;
    friend ScalarMatrix operator*(const Scalar &c, const ScalarMatrix &m);
    friend ScalarMatrix operator*(const ScalarMatrix &a, const ScalarMatrix &b);
    friend ScalarMatrix operator+(const ScalarMatrix &a, const ScalarMatrix &b);
    friend ScalarMatrix operator-(const ScalarMatrix &a, const ScalarMatrix &b);
    friend bool operator==(const ScalarMatrix &a, const ScalarMatrix &b)
    {
        return a.rows_ == b.rows_ && a.cols_ == b.cols_ && a.a_ == b.a_;
    }
    friend bool operator!=(const ScalarMatrix &a, const ScalarMatrix &b) { return !(a == b); }
    std::vector<Scalar> apply(const std::vector<Scalar> &v) const;

    std::string to_string() const;

  private:
    int rows_ = 0, cols_ = 0;
    std::vector<Scalar> a_;
};

Scalar mat_det(const ScalarMatrix &m);

struct SolveResult {
    bool solvable = false;
    int rank = 0;
    std::vector<int> pivots;
    ScalarMatrix solution;              // particular solution (cols = B.cols) when solvable
    std::vector<std::vector<Scalar>> nullspace; // basis of ker M
};

// Gauss-Jordan over the fraction field.
SolveResult mat_solve_full(const ScalarMatrix &m, const ScalarMatrix &b);
// Throws NoSolution (with rank in the message) when inconsistent.
ScalarMatrix mat_solve(const ScalarMatrix &m, const ScalarMatrix &b);
int mat_rank(const ScalarMatrix &m);
std::vector<std::vector<Scalar>> mat_nullspace(const ScalarMatrix &m);
ScalarMatrix mat_inverse(const ScalarMatrix &m);

} // namespace fb

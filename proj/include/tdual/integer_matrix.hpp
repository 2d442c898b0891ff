#pragma once

#include <optional>
#include <string>
#include <vector>

#include "tdual/symbolic.hpp"

namespace tdual::algebra {

using IntVector = std::vector<BigInt>;

/// Dense row-major matrix of arbitrary-precision integers.
class IntMatrix {
public:
    IntMatrix() = default;
    IntMatrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), data_(rows * cols) {}
    IntMatrix(std::size_t rows, std::size_t cols, std::initializer_list<long> values);

    static IntMatrix identity(std::size_t n);
    /// Matrix whose columns are the given vectors (all of length `rows`).
    static IntMatrix from_columns(std::size_t rows, const std::vector<IntVector>& columns);

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    BigInt& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
    const BigInt& operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

    IntVector column(std::size_t j) const;
    IntMatrix transpose() const;
    IntMatrix select_columns(std::size_t begin, std::size_t end) const;
    IntMatrix select_rows(const std::vector<std::size_t>& rows) const;
    bool is_zero() const;
    /// [this | other], same row count.
    IntMatrix hstack(const IntMatrix& other) const;

    friend IntMatrix operator*(const IntMatrix& a, const IntMatrix& b);
    friend IntVector operator*(const IntMatrix& a, const IntVector& v);
    friend bool operator==(const IntMatrix& a, const IntMatrix& b) = default;

    std::string to_string() const;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<BigInt> data_;
};

/// U * M * V = D with U, V unimodular and D diagonal, d_1 | d_2 | ... , d_i >= 0.
struct SmithForm {
    IntMatrix U, U_inv, D, V, V_inv;
    IntVector diagonal;   // min(rows, cols) entries
    std::size_t rank = 0;
};

SmithForm smith_normal_form(const IntMatrix& M);

/// Columns form a Z-basis of {x : M x = 0}.
IntMatrix kernel_basis(const IntMatrix& M);

/// Some integer x with A x = b, if one exists.
std::optional<IntVector> solve(const IntMatrix& A, const IntVector& b);

/// Every column of `vectors` lies in the Z-span of the columns of `lattice`.
bool lattice_contains(const IntMatrix& lattice, const IntMatrix& vectors);

/// Same Z-span of columns.
bool lattice_equal(const IntMatrix& a, const IntMatrix& b);

IntVector add(const IntVector& a, const IntVector& b);
IntVector scale(const IntVector& a, const BigInt& k);
bool is_zero(const IntVector& v);

}  // namespace tdual::algebra

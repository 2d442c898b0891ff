#include "tdual/integer_matrix.hpp"

#include <sstream>
#include <stdexcept>

namespace tdual::algebra {

IntMatrix::IntMatrix(std::size_t rows, std::size_t cols, std::initializer_list<long> values) : IntMatrix(rows, cols) {
    if (values.size() != rows * cols) throw std::invalid_argument("initializer size does not match shape");
    std::size_t k = 0;
    for (long v : values) data_[k++] = v;
}

IntMatrix IntMatrix::identity(std::size_t n) {
    IntMatrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1;
    return m;
}

IntMatrix IntMatrix::from_columns(std::size_t rows, const std::vector<IntVector>& columns) {
    IntMatrix m(rows, columns.size());
    for (std::size_t j = 0; j < columns.size(); ++j) {
        if (columns[j].size() != rows) throw std::invalid_argument("column length mismatch");
        for (std::size_t i = 0; i < rows; ++i) m(i, j) = columns[j][i];
    }
    return m;
}

IntVector IntMatrix::column(std::size_t j) const {
    IntVector v(rows_);
    for (std::size_t i = 0; i < rows_; ++i) v[i] = (*this)(i, j);
    return v;
}

IntMatrix IntMatrix::transpose() const {
    IntMatrix t(cols_, rows_);
    for (std::size_t i = 0; i < rows_; ++i)
        for (std::size_t j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
    return t;
}

IntMatrix IntMatrix::select_columns(std::size_t begin, std::size_t end) const {
    IntMatrix m(rows_, end - begin);
    for (std::size_t i = 0; i < rows_; ++i)
        for (std::size_t j = begin; j < end; ++j) m(i, j - begin) = (*this)(i, j);
    return m;
}

IntMatrix IntMatrix::select_rows(const std::vector<std::size_t>& rows) const {
    IntMatrix m(rows.size(), cols_);
    for (std::size_t i = 0; i < rows.size(); ++i)
        for (std::size_t j = 0; j < cols_; ++j) m(i, j) = (*this)(rows[i], j);
    return m;
}

bool IntMatrix::is_zero() const {
    for (const auto& x : data_)
        if (x != 0) return false;
    return true;
}

IntMatrix IntMatrix::hstack(const IntMatrix& other) const {
    if (other.rows_ != rows_) throw std::invalid_argument("hstack row mismatch");
    IntMatrix m(rows_, cols_ + other.cols_);
    for (std::size_t i = 0; i < rows_; ++i) {
        for (std::size_t j = 0; j < cols_; ++j) m(i, j) = (*this)(i, j);
        for (std::size_t j = 0; j < other.cols_; ++j) m(i, cols_ + j) = other(i, j);
    }
    return m;
}

IntMatrix operator*(const IntMatrix& a, const IntMatrix& b) {
    if (a.cols_ != b.rows_) throw std::invalid_argument("matrix product shape mismatch");
    IntMatrix c(a.rows_, b.cols_);
    for (std::size_t i = 0; i < a.rows_; ++i)
        for (std::size_t k = 0; k < a.cols_; ++k) {
            const BigInt& x = a(i, k);
            if (x == 0) continue;
            for (std::size_t j = 0; j < b.cols_; ++j)
                if (b(k, j) != 0) c(i, j) += x * b(k, j);
        }
    return c;
}

IntVector operator*(const IntMatrix& a, const IntVector& v) {
    if (a.cols_ != v.size()) throw std::invalid_argument("matrix-vector shape mismatch");
    IntVector out(a.rows_);
    for (std::size_t i = 0; i < a.rows_; ++i)
        for (std::size_t k = 0; k < a.cols_; ++k)
            if (a(i, k) != 0 && v[k] != 0) out[i] += a(i, k) * v[k];
    return out;
}

std::string IntMatrix::to_string() const {
    std::ostringstream os;
    os << "[";
    for (std::size_t i = 0; i < rows_; ++i) {
        os << (i ? "; " : "");
        for (std::size_t j = 0; j < cols_; ++j) os << (j ? " " : "") << (*this)(i, j);
    }
    os << "]";
    return os.str();
}

// ---------------------------------------------------------------------------

namespace {

// Tracks U M V = D while elementary operations are applied to D.
struct Reducer {
    IntMatrix D, U, Ui, V, Vi;

    explicit Reducer(const IntMatrix& M)
        : D(M), U(IntMatrix::identity(M.rows())), Ui(IntMatrix::identity(M.rows())),
          V(IntMatrix::identity(M.cols())), Vi(IntMatrix::identity(M.cols())) {}

    // row_i += k row_j
    void add_row(std::size_t i, std::size_t j, const BigInt& k) {
        if (k == 0) return;
        for (std::size_t c = 0; c < D.cols(); ++c) D(i, c) += k * D(j, c);
        for (std::size_t c = 0; c < U.cols(); ++c) U(i, c) += k * U(j, c);
        for (std::size_t r = 0; r < Ui.rows(); ++r) Ui(r, j) -= k * Ui(r, i);
    }
    void swap_rows(std::size_t i, std::size_t j) {
        if (i == j) return;
        for (std::size_t c = 0; c < D.cols(); ++c) std::swap(D(i, c), D(j, c));
        for (std::size_t c = 0; c < U.cols(); ++c) std::swap(U(i, c), U(j, c));
        for (std::size_t r = 0; r < Ui.rows(); ++r) std::swap(Ui(r, i), Ui(r, j));
    }
    void negate_row(std::size_t i) {
        for (std::size_t c = 0; c < D.cols(); ++c) D(i, c) = -D(i, c);
        for (std::size_t c = 0; c < U.cols(); ++c) U(i, c) = -U(i, c);
        for (std::size_t r = 0; r < Ui.rows(); ++r) Ui(r, i) = -Ui(r, i);
    }
    // col_i += k col_j
    void add_col(std::size_t i, std::size_t j, const BigInt& k) {
        if (k == 0) return;
        for (std::size_t r = 0; r < D.rows(); ++r) D(r, i) += k * D(r, j);
        for (std::size_t r = 0; r < V.rows(); ++r) V(r, i) += k * V(r, j);
        for (std::size_t c = 0; c < Vi.cols(); ++c) Vi(j, c) -= k * Vi(i, c);
    }
    void swap_cols(std::size_t i, std::size_t j) {
        if (i == j) return;
        for (std::size_t r = 0; r < D.rows(); ++r) std::swap(D(r, i), D(r, j));
        for (std::size_t r = 0; r < V.rows(); ++r) std::swap(V(r, i), V(r, j));
        for (std::size_t c = 0; c < Vi.cols(); ++c) std::swap(Vi(i, c), Vi(j, c));
    }
};

// floor-free quotient so that |remainder| is minimal-ish; truncation is enough for termination
BigInt quotient(const BigInt& a, const BigInt& b) { return a / b; }

}  // namespace

SmithForm smith_normal_form(const IntMatrix& M) {
    Reducer R(M);
    const std::size_t m = M.rows(), n = M.cols();
    const std::size_t steps = std::min(m, n);
    std::size_t t = 0;
    for (; t < steps; ++t) {
        for (;;) {
            // pivot: smallest nonzero magnitude in the trailing block
            std::size_t pi = m, pj = n;
            BigInt best;
            for (std::size_t i = t; i < m; ++i)
                for (std::size_t j = t; j < n; ++j) {
                    const BigInt& x = R.D(i, j);
                    if (x == 0) continue;
                    BigInt ax = abs(x);
                    if (pi == m || ax < best) {
                        best = ax;
                        pi = i;
                        pj = j;
                    }
                }
            if (pi == m) goto done;
            R.swap_rows(t, pi);
            R.swap_cols(t, pj);

            bool clean = true;
            for (std::size_t i = t + 1; i < m; ++i) {
                if (R.D(i, t) == 0) continue;
                R.add_row(i, t, -quotient(R.D(i, t), R.D(t, t)));
                if (R.D(i, t) != 0) clean = false;
            }
            for (std::size_t j = t + 1; j < n; ++j) {
                if (R.D(t, j) == 0) continue;
                R.add_col(j, t, -quotient(R.D(t, j), R.D(t, t)));
                if (R.D(t, j) != 0) clean = false;
            }
            if (!clean) continue;

            // divisibility of the remaining block
            bool divides = true;
            for (std::size_t i = t + 1; i < m && divides; ++i)
                for (std::size_t j = t + 1; j < n; ++j)
                    if (R.D(i, j) % R.D(t, t) != 0) {
                        R.add_row(t, i, 1);
                        divides = false;
                        break;
                    }
            if (divides) break;
        }
        if (R.D(t, t) < 0) R.negate_row(t);
    }
done:
    SmithForm out;
    out.rank = t;
    out.diagonal.resize(steps);
    for (std::size_t i = 0; i < steps; ++i) out.diagonal[i] = R.D(i, i);
    out.D = std::move(R.D);
    out.U = std::move(R.U);
    out.U_inv = std::move(R.Ui);
    out.V = std::move(R.V);
    out.V_inv = std::move(R.Vi);
    return out;
}

IntMatrix kernel_basis(const IntMatrix& M) {
    if (M.rows() == 0) return IntMatrix::identity(M.cols());
    SmithForm s = smith_normal_form(M);
    return s.V.select_columns(s.rank, M.cols());
}

std::optional<IntVector> solve(const IntMatrix& A, const IntVector& b) {
    if (b.size() != A.rows()) throw std::invalid_argument("solve: right-hand side length mismatch");
    if (A.cols() == 0) {
        if (is_zero(b)) return IntVector{};
        return std::nullopt;
    }
    if (A.rows() == 0) return IntVector(A.cols());
    SmithForm s = smith_normal_form(A);
    IntVector y = s.U * b;
    IntVector z(A.cols());
    for (std::size_t i = 0; i < y.size(); ++i) {
        if (i < s.rank) {
            if (y[i] % s.diagonal[i] != 0) return std::nullopt;
            z[i] = y[i] / s.diagonal[i];
        } else if (y[i] != 0) {
            return std::nullopt;
        }
    }
    return s.V * z;
}

bool lattice_contains(const IntMatrix& lattice, const IntMatrix& vectors) {
    if (lattice.rows() != vectors.rows()) throw std::invalid_argument("lattice dimension mismatch");
    if (vectors.cols() == 0) return true;
    if (lattice.cols() == 0) return vectors.is_zero();
    SmithForm s = smith_normal_form(lattice);
    for (std::size_t j = 0; j < vectors.cols(); ++j) {
        IntVector y = s.U * vectors.column(j);
        for (std::size_t i = 0; i < y.size(); ++i) {
            if (i < s.rank) {
                if (y[i] % s.diagonal[i] != 0) return false;
            } else if (y[i] != 0) {
                return false;
            }
        }
    }
    return true;
}

bool lattice_equal(const IntMatrix& a, const IntMatrix& b) { return lattice_contains(a, b) && lattice_contains(b, a); }

IntVector add(const IntVector& a, const IntVector& b) {
    if (a.size() != b.size()) throw std::invalid_argument("vector length mismatch");
    IntVector c(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) c[i] = a[i] + b[i];
    return c;
}

IntVector scale(const IntVector& a, const BigInt& k) {
    IntVector c(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) c[i] = a[i] * k;
    return c;
}

bool is_zero(const IntVector& v) {
    for (const auto& x : v)
        if (x != 0) return false;
    return true;
}

}  // namespace tdual::algebra

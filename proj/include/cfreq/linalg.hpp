#pragma once

#include <complex>
#include <vector>

namespace cfreq {

class ComplexMatrix {
public:
    using value_type = std::complex<double>;

    ComplexMatrix() = default;
    ComplexMatrix(int rows, int cols);

    [[nodiscard]] static ComplexMatrix identity(int n);

    [[nodiscard]] int rows() const noexcept { return rows_; }
    [[nodiscard]] int cols() const noexcept { return cols_; }
    [[nodiscard]] bool empty() const noexcept { return data_.empty(); }

    value_type& operator()(int i, int j) { return data_[static_cast<std::size_t>(i) * cols_ + j]; }
    const value_type& operator()(int i, int j) const {
        return data_[static_cast<std::size_t>(i) * cols_ + j];
    }

    [[nodiscard]] value_type* data() noexcept { return data_.data(); }
    [[nodiscard]] const value_type* data() const noexcept { return data_.data(); }

    [[nodiscard]] ComplexMatrix adjoint() const;
    [[nodiscard]] ComplexMatrix transpose() const;
    [[nodiscard]] ComplexMatrix conj() const;
    [[nodiscard]] double frobenius_norm() const;
    /// max |entry|
    [[nodiscard]] double max_abs() const;
    /// Rows and columns picked by index lists.
    [[nodiscard]] ComplexMatrix submatrix(const std::vector<int>& row_idx,
                                          const std::vector<int>& col_idx) const;

    ComplexMatrix& operator*=(value_type c);
    ComplexMatrix& operator+=(const ComplexMatrix& other);
    ComplexMatrix& operator-=(const ComplexMatrix& other);

private:
    int rows_ = 0;
    int cols_ = 0;
    std::vector<value_type> data_;
};

[[nodiscard]] ComplexMatrix operator*(const ComplexMatrix& a, const ComplexMatrix& b);
[[nodiscard]] ComplexMatrix operator-(ComplexMatrix a, const ComplexMatrix& b);
[[nodiscard]] ComplexMatrix operator*(std::complex<double> c, ComplexMatrix a);

/// All singular values, descending (one-sided Jacobi).
[[nodiscard]] std::vector<double> singular_values(const ComplexMatrix& M);
[[nodiscard]] double largest_singular_value(const ComplexMatrix& M);

/// All eigenvalues of a Hermitian matrix, ascending (cyclic Jacobi).
[[nodiscard]] std::vector<double> hermitian_eigenvalues(const ComplexMatrix& H);
[[nodiscard]] double smallest_hermitian_eigenvalue(const ComplexMatrix& H);

/// (M + M*) / 2
[[nodiscard]] ComplexMatrix hermitian_symmetrize(const ComplexMatrix& M);

}  // namespace cfreq

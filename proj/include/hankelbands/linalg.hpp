#pragma once

#include <cstddef>
#include <vector>

#include "hankelbands/special.hpp"

namespace hankelbands {

// Dense row-major complex matrix.
class ComplexMatrix {
public:
    ComplexMatrix() = default;
    ComplexMatrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), data_(rows * cols) {}

    static ComplexMatrix identity(std::size_t n);

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    bool square() const { return rows_ == cols_; }

    Complex& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
    const Complex& operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

    Complex* data() { return data_.data(); }
    const Complex* data() const { return data_.data(); }

    double max_abs() const;
    // max |a_ij - conj(a_ji)|.
    double hermitian_defect() const;
    ComplexMatrix adjoint() const;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<Complex> data_;
};

ComplexMatrix operator*(const ComplexMatrix& a, const ComplexMatrix& b);
ComplexMatrix operator-(const ComplexMatrix& a, const ComplexMatrix& b);
double frobenius_norm(const ComplexMatrix& a);

namespace linalg {

struct EigenDecomposition {
    std::vector<double> eigenvalues;  // ascending
    ComplexMatrix eigenvectors;       // columns, empty when not requested
};

// Hermitian eigensolver: Householder reduction to real tridiagonal form, then implicit QL.
// Rejects input whose Hermitian defect exceeds hermitian_tolerance * max|a_ij|.
EigenDecomposition hermitian_eigh(const ComplexMatrix& m, bool want_vectors = true,
                                  double hermitian_tolerance = 1e-12);
std::vector<double> hermitian_eigvals(const ComplexMatrix& m, double hermitian_tolerance = 1e-12);

struct LogDeterminant {
    double log_abs = 0.0;  // -inf when singular
    Complex phase{1.0, 0.0};
    bool singular = false;
    Complex value() const;
};

// LU with partial pivoting; the first row of maximal modulus wins ties.
LogDeterminant complex_log_det_lu(const ComplexMatrix& m);
Complex complex_det_lu(const ComplexMatrix& m);

}  // namespace linalg
}  // namespace hankelbands

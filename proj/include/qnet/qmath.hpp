#pragma once

// Dense complex linear algebra for one- and two-qubit states and operators.

#include <complex>
#include <cstddef>
#include <initializer_list>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace qnet {

using Complex = std::complex<double>;

/// Operand shapes do not fit the operation.
class DimensionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A documented precondition (Hermiticity, positivity, finiteness) was violated.
class ContractViolation : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Row-major dense complex matrix. Kets are stored as n x 1 columns.
class CMatrix {
 public:
  CMatrix(std::size_t rows, std::size_t cols);
  CMatrix(std::size_t rows, std::size_t cols, std::vector<Complex> entries);
  CMatrix(std::initializer_list<std::initializer_list<Complex>> rows);

  static CMatrix identity(std::size_t n);
  static CMatrix diagonal(std::span<const double> values);
  static CMatrix column(std::span<const Complex> amplitudes);

  [[nodiscard]] std::size_t rows() const noexcept { return rows_; }
  [[nodiscard]] std::size_t cols() const noexcept { return cols_; }
  [[nodiscard]] bool is_square() const noexcept { return rows_ == cols_; }
  [[nodiscard]] std::span<const Complex> entries() const noexcept { return data_; }

  Complex& operator()(std::size_t r, std::size_t c) noexcept { return data_[r * cols_ + c]; }
  const Complex& operator()(std::size_t r, std::size_t c) const noexcept {
    return data_[r * cols_ + c];
  }

  CMatrix& operator+=(const CMatrix& other);
  CMatrix& operator-=(const CMatrix& other);
  CMatrix& operator*=(Complex scale) noexcept;

  friend bool operator==(const CMatrix&, const CMatrix&) = default;

 private:
  std::size_t rows_;
  std::size_t cols_;
  std::vector<Complex> data_;
};

CMatrix operator+(CMatrix lhs, const CMatrix& rhs);
CMatrix operator-(CMatrix lhs, const CMatrix& rhs);
CMatrix operator*(const CMatrix& lhs, const CMatrix& rhs);
CMatrix operator*(Complex scale, CMatrix m);

CMatrix dagger(const CMatrix& a);
CMatrix transpose(const CMatrix& a);
CMatrix conjugate(const CMatrix& a);

/// Kronecker product; entry (i*b.rows()+k, j*b.cols()+l) is a(i,j)*b(k,l).
CMatrix kron(const CMatrix& a, const CMatrix& b);

/// |v><v| for a column vector.
CMatrix outer(const CMatrix& ket);

Complex trace(const CMatrix& a);
double frobenius_norm(const CMatrix& a);
/// Largest entrywise modulus of a - b.
double max_abs_diff(const CMatrix& a, const CMatrix& b);
bool is_hermitian(const CMatrix& a, double tol);

/// Qubit label in the two-qubit tensor order A (x) B.
enum class Subsystem { A, B };

/// Transposes the indices of one qubit of a 4x4 operator.
CMatrix partial_transpose(const CMatrix& rho, Subsystem which);

/// Reduced 2x2 operator on `keep`, tracing out the other qubit.
CMatrix partial_trace(const CMatrix& rho, Subsystem keep);

struct HermitianEigen {
  std::vector<double> values;  // ascending
  CMatrix vectors;             // column k belongs to values[k]
};

inline constexpr double kHermitianTolerance = 1e-10;
inline constexpr double kPsdTolerance = 1e-10;

/// Cyclic complex Jacobi diagonalization. The input is symmetrized before
/// iterating; a Hermiticity defect above kHermitianTolerance is rejected.
HermitianEigen hermitian_eigen(const CMatrix& h);

/// Principal square root of a positive-semidefinite Hermitian matrix.
/// Eigenvalues in [-kPsdTolerance, noise floor] are treated as zero.
CMatrix sqrt_psd(const CMatrix& h);

/// Eigenvalues whose magnitude is below this are indistinguishable from zero
/// in double precision for a matrix of the given spectral scale.
double spectral_noise_floor(double scale) noexcept;

}  // namespace qnet

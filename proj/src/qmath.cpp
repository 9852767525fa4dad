#include "qnet/qmath.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace qnet {

namespace {

void require_finite(std::span<const Complex> values, const char* where) {
  for (const Complex& z : values) {
    if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) {
      throw ContractViolation(std::string(where) + ": non-finite entry");
    }
  }
}

void require_same_shape(const CMatrix& a, const CMatrix& b, const char* where) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw DimensionError(std::string(where) + ": shape mismatch");
  }
}

void require_two_qubit(const CMatrix& rho, const char* where) {
  if (rho.rows() != 4 || rho.cols() != 4) {
    throw DimensionError(std::string(where) + ": expected a 4x4 operator, got " +
                         std::to_string(rho.rows()) + "x" + std::to_string(rho.cols()));
  }
}

double off_diagonal_norm(const CMatrix& a) {
  double sum = 0.0;
  for (std::size_t i = 0; i < a.rows(); ++i) {
    for (std::size_t j = 0; j < a.cols(); ++j) {
      if (i != j) sum += std::norm(a(i, j));
    }
  }
  return std::sqrt(sum);
}

}  // namespace

CMatrix::CMatrix(std::size_t rows, std::size_t cols)
    : rows_(rows), cols_(cols), data_(rows * cols, Complex{}) {
  if (rows == 0 || cols == 0) throw DimensionError("CMatrix: dimensions must be positive");
}

CMatrix::CMatrix(std::size_t rows, std::size_t cols, std::vector<Complex> entries)
    : rows_(rows), cols_(cols), data_(std::move(entries)) {
  if (rows == 0 || cols == 0) throw DimensionError("CMatrix: dimensions must be positive");
  if (data_.size() != rows * cols) {
    throw DimensionError("CMatrix: entry count does not match shape");
  }
  require_finite(data_, "CMatrix");
}

CMatrix::CMatrix(std::initializer_list<std::initializer_list<Complex>> rows)
    : rows_(rows.size()), cols_(rows.size() == 0 ? 0 : rows.begin()->size()) {
  if (rows_ == 0 || cols_ == 0) throw DimensionError("CMatrix: dimensions must be positive");
  data_.reserve(rows_ * cols_);
  for (const auto& row : rows) {
    if (row.size() != cols_) throw DimensionError("CMatrix: ragged initializer");
    data_.insert(data_.end(), row.begin(), row.end());
  }
  require_finite(data_, "CMatrix");
}

CMatrix CMatrix::identity(std::size_t n) {
  CMatrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

CMatrix CMatrix::diagonal(std::span<const double> values) {
  CMatrix m(values.size(), values.size());
  for (std::size_t i = 0; i < values.size(); ++i) m(i, i) = values[i];
  return m;
}

CMatrix CMatrix::column(std::span<const Complex> amplitudes) {
  return CMatrix(amplitudes.size(), 1, {amplitudes.begin(), amplitudes.end()});
}

CMatrix& CMatrix::operator+=(const CMatrix& other) {
  require_same_shape(*this, other, "operator+");
  for (std::size_t i = 0; i < data_.size(); ++i) data_[i] += other.data_[i];
  return *this;
}

CMatrix& CMatrix::operator-=(const CMatrix& other) {
  require_same_shape(*this, other, "operator-");
  for (std::size_t i = 0; i < data_.size(); ++i) data_[i] -= other.data_[i];
  return *this;
}

CMatrix& CMatrix::operator*=(Complex scale) noexcept {
  for (Complex& z : data_) z *= scale;
  return *this;
}

CMatrix operator+(CMatrix lhs, const CMatrix& rhs) { return lhs += rhs; }
CMatrix operator-(CMatrix lhs, const CMatrix& rhs) { return lhs -= rhs; }
CMatrix operator*(Complex scale, CMatrix m) { return m *= scale; }

CMatrix operator*(const CMatrix& lhs, const CMatrix& rhs) {
  if (lhs.cols() != rhs.rows()) throw DimensionError("operator*: inner dimensions differ");
  CMatrix out(lhs.rows(), rhs.cols());
  for (std::size_t i = 0; i < lhs.rows(); ++i) {
    for (std::size_t k = 0; k < lhs.cols(); ++k) {
      const Complex a = lhs(i, k);
      if (a == Complex{}) continue;
      for (std::size_t j = 0; j < rhs.cols(); ++j) out(i, j) += a * rhs(k, j);
    }
  }
  return out;
}

CMatrix dagger(const CMatrix& a) {
  CMatrix out(a.cols(), a.rows());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    for (std::size_t j = 0; j < a.cols(); ++j) out(j, i) = std::conj(a(i, j));
  }
  return out;
}

CMatrix transpose(const CMatrix& a) {
  CMatrix out(a.cols(), a.rows());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    for (std::size_t j = 0; j < a.cols(); ++j) out(j, i) = a(i, j);
  }
  return out;
}

CMatrix conjugate(const CMatrix& a) {
  CMatrix out = a;
  for (std::size_t i = 0; i < a.rows(); ++i) {
    for (std::size_t j = 0; j < a.cols(); ++j) out(i, j) = std::conj(a(i, j));
  }
  return out;
}

CMatrix kron(const CMatrix& a, const CMatrix& b) {
  CMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    for (std::size_t j = 0; j < a.cols(); ++j) {
      const Complex aij = a(i, j);
      for (std::size_t k = 0; k < b.rows(); ++k) {
        for (std::size_t l = 0; l < b.cols(); ++l) {
          out(i * b.rows() + k, j * b.cols() + l) = aij * b(k, l);
        }
      }
    }
  }
  return out;
}

CMatrix outer(const CMatrix& ket) {
  if (ket.cols() != 1) throw DimensionError("outer: expected a column vector");
  return ket * dagger(ket);
}

Complex trace(const CMatrix& a) {
  if (!a.is_square()) throw DimensionError("trace: matrix is not square");
  Complex sum{};
  for (std::size_t i = 0; i < a.rows(); ++i) sum += a(i, i);
  return sum;
}

double frobenius_norm(const CMatrix& a) {
  double sum = 0.0;
  for (const Complex& z : a.entries()) sum += std::norm(z);
  return std::sqrt(sum);
}

double max_abs_diff(const CMatrix& a, const CMatrix& b) {
  require_same_shape(a, b, "max_abs_diff");
  double worst = 0.0;
  for (std::size_t i = 0; i < a.entries().size(); ++i) {
    worst = std::max(worst, std::abs(a.entries()[i] - b.entries()[i]));
  }
  return worst;
}

bool is_hermitian(const CMatrix& a, double tol) {
  if (!a.is_square()) return false;
  for (std::size_t i = 0; i < a.rows(); ++i) {
    for (std::size_t j = i; j < a.cols(); ++j) {
      if (std::abs(a(i, j) - std::conj(a(j, i))) > tol) return false;
    }
  }
  return true;
}

CMatrix partial_transpose(const CMatrix& rho, Subsystem which) {
  require_two_qubit(rho, "partial_transpose");
  CMatrix out(4, 4);
  for (std::size_t i = 0; i < 2; ++i) {
    for (std::size_t k = 0; k < 2; ++k) {
      for (std::size_t j = 0; j < 2; ++j) {
        for (std::size_t l = 0; l < 2; ++l) {
          const Complex v = rho(i * 2 + k, j * 2 + l);
          if (which == Subsystem::A) {
            out(j * 2 + k, i * 2 + l) = v;
          } else {
            out(i * 2 + l, j * 2 + k) = v;
          }
        }
      }
    }
  }
  return out;
}

CMatrix partial_trace(const CMatrix& rho, Subsystem keep) {
  require_two_qubit(rho, "partial_trace");
  CMatrix out(2, 2);
  for (std::size_t x = 0; x < 2; ++x) {
    for (std::size_t y = 0; y < 2; ++y) {
      Complex sum{};
      for (std::size_t t = 0; t < 2; ++t) {
        sum += keep == Subsystem::A ? rho(x * 2 + t, y * 2 + t) : rho(t * 2 + x, t * 2 + y);
      }
      out(x, y) = sum;
    }
  }
  return out;
}

HermitianEigen hermitian_eigen(const CMatrix& h) {
  if (!h.is_square()) throw DimensionError("hermitian_eigen: matrix is not square");
  require_finite(h.entries(), "hermitian_eigen");
  if (!is_hermitian(h, kHermitianTolerance)) {
    throw ContractViolation("hermitian_eigen: matrix is not Hermitian within tolerance");
  }

  const std::size_t n = h.rows();
  CMatrix a = 0.5 * (h + dagger(h));
  CMatrix v = CMatrix::identity(n);
  const double threshold = 1e-13 * std::max(1.0, frobenius_norm(a));

  constexpr int kMaxSweeps = 64;
  for (int sweep = 0; sweep < kMaxSweeps && off_diagonal_norm(a) >= threshold; ++sweep) {
    for (std::size_t p = 0; p + 1 < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        const Complex apq = a(p, q);
        const double g = std::abs(apq);
        if (g == 0.0) continue;

        // Phase q so the pivot becomes real, then apply a real Jacobi rotation.
        const Complex phase = std::conj(apq) / g;
        const double app = a(p, p).real();
        const double aqq = a(q, q).real();
        const double theta = (aqq - app) / (2.0 * g);
        const double t = (theta >= 0.0 ? 1.0 : -1.0) / (std::abs(theta) + std::hypot(theta, 1.0));
        const double c = 1.0 / std::hypot(t, 1.0);
        const double s = t * c;

        const Complex gpp = c;
        const Complex gpq = s;
        const Complex gqp = -s * phase;
        const Complex gqq = c * phase;

        for (std::size_t k = 0; k < n; ++k) {
          const Complex akp = a(k, p);
          const Complex akq = a(k, q);
          a(k, p) = akp * gpp + akq * gqp;
          a(k, q) = akp * gpq + akq * gqq;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const Complex apk = a(p, k);
          const Complex aqk = a(q, k);
          a(p, k) = std::conj(gpp) * apk + std::conj(gqp) * aqk;
          a(q, k) = std::conj(gpq) * apk + std::conj(gqq) * aqk;
        }
        a(p, q) = 0.0;
        a(q, p) = 0.0;
        a(p, p) = app - t * g;
        a(q, q) = aqq + t * g;

        for (std::size_t k = 0; k < n; ++k) {
          const Complex vkp = v(k, p);
          const Complex vkq = v(k, q);
          v(k, p) = vkp * gpp + vkq * gqp;
          v(k, q) = vkp * gpq + vkq * gqq;
        }
      }
    }
  }

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) {
    return a(x, x).real() < a(y, y).real();
  });

  HermitianEigen result{std::vector<double>(n), CMatrix(n, n)};
  for (std::size_t k = 0; k < n; ++k) {
    result.values[k] = a(order[k], order[k]).real();
    for (std::size_t r = 0; r < n; ++r) result.vectors(r, k) = v(r, order[k]);
  }
  return result;
}

double spectral_noise_floor(double scale) noexcept {
  return 64.0 * std::numeric_limits<double>::epsilon() * scale;
}

CMatrix sqrt_psd(const CMatrix& h) {
  const HermitianEigen eig = hermitian_eigen(h);
  if (eig.values.front() < -kPsdTolerance) {
    throw ContractViolation("sqrt_psd: matrix has a negative eigenvalue " +
                            std::to_string(eig.values.front()));
  }
  const double scale = std::max(std::abs(eig.values.front()), std::abs(eig.values.back()));
  const double floor = spectral_noise_floor(scale);

  const std::size_t n = h.rows();
  CMatrix root(n, n);
  for (std::size_t k = 0; k < n; ++k) {
    if (eig.values[k] <= floor) continue;
    const double s = std::sqrt(eig.values[k]);
    for (std::size_t i = 0; i < n; ++i) {
      const Complex vi = s * eig.vectors(i, k);
      for (std::size_t j = 0; j < n; ++j) root(i, j) += vi * std::conj(eig.vectors(j, k));
    }
  }
  return 0.5 * (root + dagger(root));
}

}  // namespace qnet

#include "qnet/states.hpp"

#include <cmath>
#include <limits>
#include <numbers>

#include "qnet/random.hpp"

namespace qnet {

namespace {

CMatrix rotation(double theta) {
  const double c = std::cos(theta);
  const double s = std::sin(theta);
  return {{c, -s}, {s, c}};
}

}  // namespace

PureState::PureState(std::vector<Complex> amplitudes) : amplitudes_(std::move(amplitudes)) {
  if (amplitudes_.size() != 2 && amplitudes_.size() != 4) {
    throw StateError("pure state must have 2 or 4 amplitudes");
  }
  double norm = 0.0;
  for (const Complex& z : amplitudes_) {
    if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) {
      throw StateError("pure state has a non-finite amplitude");
    }
    norm += std::norm(z);
  }
  if (std::abs(norm - 1.0) > kNormTolerance) {
    throw StateError("pure state is not normalized (norm^2 = " + std::to_string(norm) + ")");
  }
}

CMatrix PureState::ket() const { return CMatrix::column(amplitudes_); }

DensityOp PureState::density() const { return DensityOp(outer(ket())); }

std::optional<std::string> check_density(const CMatrix& m) {
  if (!m.is_square() || (m.rows() != 2 && m.rows() != 4)) {
    return "density operator must be 2x2 or 4x4";
  }
  if (!is_hermitian(m, kHermitianTolerance)) return "matrix is not Hermitian";
  const double tr = trace(m).real();
  if (std::abs(tr - 1.0) > kTraceTolerance) {
    return "trace is " + std::to_string(tr) + ", expected 1";
  }
  const double min_eig = hermitian_eigen(m).values.front();
  if (min_eig < -kPsdTolerance) {
    return "matrix is not positive semidefinite (min eigenvalue " + std::to_string(min_eig) + ")";
  }
  return std::nullopt;
}

DensityOp::DensityOp(const CMatrix& m) : matrix_(m) {
  if (auto problem = check_density(m)) throw StateError(*problem);
  matrix_ = 0.5 * (m + dagger(m));
  const double tr = trace(matrix_).real();
  if (std::abs(tr - 1.0) > 8 * std::numeric_limits<double>::epsilon()) matrix_ *= 1.0 / tr;
}

double purity(const DensityOp& rho) { return trace(rho.matrix() * rho.matrix()).real(); }

DensityOp product(const DensityOp& a, const DensityOp& b) {
  if (a.dim() != 2 || b.dim() != 2) throw StateError("product expects two single-qubit states");
  return DensityOp(kron(a.matrix(), b.matrix()));
}

PureState ket_h() { return PureState({1.0, 0.0}); }
PureState ket_v() { return PureState({0.0, 1.0}); }

PureState spdc_source(double a, double b) {
  if (std::abs(a * a + b * b - 1.0) > kNormTolerance) {
    throw StateError("source amplitudes must satisfy a^2 + b^2 = 1");
  }
  return PureState({a, 0.0, 0.0, b});
}

CMatrix hwp_jones(double theta) {
  const double c = std::cos(2.0 * theta);
  const double s = std::sin(2.0 * theta);
  return {{c, s}, {s, -c}};
}

CMatrix qwp_jones(double theta) {
  using std::numbers::pi;
  const CMatrix retarder{{std::polar(1.0, -pi / 4), 0.0}, {0.0, std::polar(1.0, pi / 4)}};
  return rotation(theta) * retarder * rotation(-theta);
}

CMatrix jones(const WaveplateSetting& plate) {
  return plate.kind == WaveplateKind::HWP ? hwp_jones(plate.theta) : qwp_jones(plate.theta);
}

PureState apply_jones(const CMatrix& jones_matrix, const PureState& psi) {
  if (psi.dim() != 2) throw StateError("Jones matrices act on single-qubit states");
  const CMatrix out = jones_matrix * psi.ket();
  return PureState({out(0, 0), out(1, 0)});
}

PureState hwp_prepared(double theta) {
  return PureState({std::cos(2.0 * theta), std::sin(2.0 * theta)});
}

DensityOp apply_quartz(const DensityOp& rho, DephaserSetting dephaser) {
  if (!(dephaser.kappa >= 0.0 && dephaser.kappa <= 1.0)) {
    throw StateError("dephaser kappa must lie in [0, 1]");
  }
  if (rho.dim() != 2) throw StateError("dephaser acts on single-qubit states");
  CMatrix m = rho.matrix();
  m(0, 1) *= dephaser.kappa;
  m(1, 0) *= dephaser.kappa;
  return DensityOp(m);
}

DensityOp dephased_diagonal(double kappa) {
  return apply_quartz(hwp_prepared(std::numbers::pi / 8).density(), DephaserSetting{kappa});
}

PureState phi_plus() {
  const double r = std::numbers::sqrt2 / 2;
  return PureState({r, 0.0, 0.0, r});
}

PureState phi_minus() {
  const double r = std::numbers::sqrt2 / 2;
  return PureState({r, 0.0, 0.0, -r});
}

PureState psi_plus() {
  const double r = std::numbers::sqrt2 / 2;
  return PureState({0.0, r, r, 0.0});
}

PureState psi_minus() {
  const double r = std::numbers::sqrt2 / 2;
  return PureState({0.0, r, -r, 0.0});
}

DensityOp make_werner(double p) {
  if (!(p >= 0.0 && p <= 1.0)) throw StateError("Werner weight p must lie in [0, 1]");
  CMatrix m = p * outer(psi_minus().ket());
  m += (0.25 * (1.0 - p)) * CMatrix::identity(4);
  return DensityOp(m);
}

PureState nonmax_entangled(double theta, Sign sign, PairBasis basis) {
  const double c = std::cos(2.0 * theta);
  const double s = (sign == Sign::Plus ? 1.0 : -1.0) * std::sin(2.0 * theta);
  if (basis == PairBasis::HH_VV) return PureState({c, 0.0, 0.0, s});
  return PureState({0.0, c, s, 0.0});
}

DensityOp random_density(std::uint64_t seed, std::size_t dim, std::size_t rank) {
  if (dim != 2 && dim != 4) throw StateError("random_density: dim must be 2 or 4");
  if (rank < 1 || rank > dim) throw StateError("random_density: rank must be in [1, dim]");

  rng::Engine engine = rng::make_engine(rng::derive_seed(seed, "random_density"));
  CMatrix g(dim, rank);
  for (std::size_t i = 0; i < dim; ++i) {
    for (std::size_t j = 0; j < rank; ++j) {
      const double re = rng::standard_normal(engine);
      const double im = rng::standard_normal(engine);
      g(i, j) = Complex(re, im);
    }
  }
  CMatrix m = g * dagger(g);
  m *= 1.0 / trace(m).real();
  return DensityOp(m);
}

}  // namespace qnet

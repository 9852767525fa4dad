#pragma once

// Polarization states fed into the network: source pairs, waveplate-prepared
// qubits, dephased mixtures, Bell and Werner states.
//
// Basis order is H, V for one qubit and HH, HV, VH, VV for two.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "qnet/qmath.hpp"

namespace qnet {

/// Invalid state data or a state parameter outside its domain.
class StateError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

inline constexpr double kNormTolerance = 1e-12;
inline constexpr double kTraceTolerance = 1e-10;

class DensityOp;

class PureState {
 public:
  /// Requires 2 or 4 amplitudes with unit norm (within kNormTolerance).
  explicit PureState(std::vector<Complex> amplitudes);

  [[nodiscard]] std::size_t dim() const noexcept { return amplitudes_.size(); }
  [[nodiscard]] const std::vector<Complex>& amplitudes() const noexcept { return amplitudes_; }
  [[nodiscard]] CMatrix ket() const;
  [[nodiscard]] DensityOp density() const;

 private:
  std::vector<Complex> amplitudes_;
};

/// Trace-one positive-semidefinite Hermitian operator on one or two qubits.
class DensityOp {
 public:
  /// Admits `m` if it passes check_density. The stored matrix is the
  /// Hermitian part of `m`, renormalized to unit trace.
  explicit DensityOp(const CMatrix& m);

  [[nodiscard]] std::size_t dim() const noexcept { return matrix_.rows(); }
  [[nodiscard]] const CMatrix& matrix() const noexcept { return matrix_; }

 private:
  CMatrix matrix_;
};

/// Reason `m` is not an admissible density operator, or nullopt if it is.
std::optional<std::string> check_density(const CMatrix& m);

double purity(const DensityOp& rho);
DensityOp product(const DensityOp& a, const DensityOp& b);

PureState ket_h();
PureState ket_v();

/// a|HH> + b|VV>; requires a^2 + b^2 = 1.
PureState spdc_source(double a, double b);

enum class WaveplateKind { HWP, QWP };

struct WaveplateSetting {
  WaveplateKind kind;
  double theta;  // axis angle, radians
};

/// [[cos 2t, sin 2t], [sin 2t, -cos 2t]]; maps |H> to cos 2t|H> + sin 2t|V>.
CMatrix hwp_jones(double theta);

/// R(t) diag(e^{-i pi/4}, e^{i pi/4}) R(-t), with R the rotation by t.
CMatrix qwp_jones(double theta);

CMatrix jones(const WaveplateSetting& plate);

/// A Jones matrix applied to a single-qubit pure state.
PureState apply_jones(const CMatrix& jones_matrix, const PureState& psi);

/// cos 2t|H> + sin 2t|V>, the state a half-wave plate at angle t makes from |H>.
PureState hwp_prepared(double theta);

/// Birefringent dephaser: off-diagonal H/V coherences are scaled by kappa.
struct DephaserSetting {
  double kappa;
};

/// kappa that reproduces the mixed state [[0.5, 0.29], [0.29, 0.5]] from
/// the 45 degree polarized input.
inline constexpr double kDefaultQuartzKappa = 0.58;

DensityOp apply_quartz(const DensityOp& rho, DephaserSetting dephaser);

/// HWP at 22.5 degrees on |H>, then the quartz dephaser.
DensityOp dephased_diagonal(double kappa = kDefaultQuartzKappa);

PureState phi_plus();
PureState phi_minus();
PureState psi_plus();   // (|HV> + |VH>)/sqrt 2, the triplet used in the flip test
PureState psi_minus();  // singlet

/// p |psi-><psi-| + (1 - p) I/4, p in [0, 1].
DensityOp make_werner(double p);

enum class Sign { Plus, Minus };
enum class PairBasis { HH_VV, HV_VH };

/// cos 2t|xy> +/- sin 2t|x'y'> on the chosen basis pair.
PureState nonmax_entangled(double theta, Sign sign, PairBasis basis);

/// Random density operator of the requested rank (Ginibre construction),
/// deterministic in `seed`.
DensityOp random_density(std::uint64_t seed, std::size_t dim, std::size_t rank);

}  // namespace qnet

#pragma once

// Coincidence statistics of the controlled-SWAP interferometer.
//
// Two routes are provided. The ideal route evaluates the closed-form fringe
// r(phi) = 1 + eps * Tr(rho S) * cos(phi). The optical route propagates each
// photon's spatial mode through the four 50:50 beam splitters and the phase
// shifter, then post-selects one photon in u3 and one in d4. The two photons
// carry the polarization qubits A and B; bosonic symmetrization of the output
// pair produces the identity and SWAP branches of the post-selection operator.

#include <optional>

#include "qnet/qmath.hpp"
#include "qnet/states.hpp"

namespace qnet {

struct SwapWitness {
  CMatrix matrix;
};

/// S|xy> = |yx>.
SwapWitness swap_operator();

struct OpticalConfig {
  double phase = 0.0;              // phi, radians
  double distinguishability = 1.0;  // eps: 1 = perfect HOM overlap, 0 = no interference
};

/// Throws std::invalid_argument unless eps is in [0, 1] and phase is finite.
void validate(const OpticalConfig& cfg);

/// Tr(rho_ab S). Lies in [-1, 1].
double ideal_visibility(const DensityOp& rho_ab);

/// Normalized coincidence rate 1 + eps * v * cos(phi), in [0, 2].
double ideal_coincidence_rate(const DensityOp& rho_ab, const OpticalConfig& cfg);

/// Spatial modes of the network. Inputs `in_a`, `in_b` carry the photons;
/// `vac_a`, `vac_b` are the unused ports of the first two beam splitters.
enum class InputMode { in_a, vac_a, in_b, vac_b };
enum class OutputMode { u3, d3, u4, d4 };

/// Detector that each output mode feeds: u3 -> D2, d3 -> D1, u4 -> D3, d4 -> D4.
int detector_for(OutputMode mode) noexcept;

/// 4x4 single-photon transfer matrix, rows indexed by OutputMode and columns
/// by InputMode, for the given phase on arm u1.
CMatrix network_transfer(double phase);

/// Branch operators for two photons entering `in_a` (qubit A) and `in_b`
/// (qubit B) and leaving in the distinct modes `first` and `second`. The
/// output polarization is ordered (photon in `first`) (x) (photon in `second`).
/// `direct` is the amplitude for A -> first, B -> second; `exchange` is the
/// amplitude for A -> second, B -> first, which acts as SWAP on polarization.
struct PairBranches {
  CMatrix direct;
  CMatrix exchange;
};

PairBranches pair_branches(const CMatrix& transfer, std::size_t in_a, std::size_t in_b,
                           std::size_t first, std::size_t second);

/// Unnormalized post-selected operator: eps * M rho M^dag +
/// (1 - eps) * (D rho D^dag + X rho X^dag), with M = D + X.
CMatrix postselected_operator(const PairBranches& branches, const DensityOp& rho_ab,
                              double distinguishability);

struct PostselectResult {
  std::optional<DensityOp> conditional_state;  // empty when probability <= 1e-15
  double probability;
};

inline constexpr double kMinPostselectProbability = 1e-15;

/// Coincidence of detectors D2 and D4 (modes u3 and d4).
PostselectResult optical_postselect(const DensityOp& rho_ab, const OpticalConfig& cfg);

/// Same post-selection for an arbitrary pair of distinct output modes.
PostselectResult optical_postselect(const DensityOp& rho_ab, const OpticalConfig& cfg,
                                    OutputMode first, OutputMode second);

/// Coincidence probability behind one 50:50 beam splitter, (1 - eps Tr(rho_a rho_b)) / 2.
double hom_coincidence(const DensityOp& rho_a, const DensityOp& rho_b, double distinguishability);

/// The same quantity from mode-level propagation through a single beam splitter.
double hom_coincidence_optical(const DensityOp& rho_a, const DensityOp& rho_b,
                               double distinguishability);

}  // namespace qnet

#include "qnet/network.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace qnet {

namespace {

constexpr std::size_t index_of(InputMode m) noexcept { return static_cast<std::size_t>(m); }
constexpr std::size_t index_of(OutputMode m) noexcept { return static_cast<std::size_t>(m); }

void require_two_qubit(const DensityOp& rho) {
  if (rho.dim() != 4) throw StateError("expected a two-qubit density operator");
}

void require_single_qubit(const DensityOp& rho) {
  if (rho.dim() != 2) throw StateError("expected a single-qubit density operator");
}

void require_distinguishability(double eps) {
  if (!(eps >= 0.0 && eps <= 1.0)) {
    throw std::invalid_argument("distinguishability must lie in [0, 1]");
  }
}

CMatrix sandwich(const CMatrix& k, const CMatrix& rho) { return k * rho * dagger(k); }

}  // namespace

SwapWitness swap_operator() {
  CMatrix s(4, 4);
  for (std::size_t x = 0; x < 2; ++x) {
    for (std::size_t y = 0; y < 2; ++y) s(y * 2 + x, x * 2 + y) = 1.0;
  }
  return SwapWitness{s};
}

void validate(const OpticalConfig& cfg) {
  if (!std::isfinite(cfg.phase)) throw std::invalid_argument("phase must be finite");
  require_distinguishability(cfg.distinguishability);
}

double ideal_visibility(const DensityOp& rho_ab) {
  require_two_qubit(rho_ab);
  return trace(rho_ab.matrix() * swap_operator().matrix).real();
}

double ideal_coincidence_rate(const DensityOp& rho_ab, const OpticalConfig& cfg) {
  validate(cfg);
  return 1.0 + cfg.distinguishability * ideal_visibility(rho_ab) * std::cos(cfg.phase);
}

int detector_for(OutputMode mode) noexcept {
  switch (mode) {
    case OutputMode::u3: return 2;
    case OutputMode::d3: return 1;
    case OutputMode::u4: return 3;
    case OutputMode::d4: return 4;
  }
  return 0;
}

CMatrix network_transfer(double phase) {
  const double h = std::numbers::sqrt2 / 2;
  // Columns in_a, vac_a, in_b, vac_b -> rows u1, d1, u2, d2.
  const CMatrix split{{h, h, 0, 0}, {-h, h, 0, 0}, {0, 0, h, h}, {0, 0, h, -h}};
  CMatrix shifter = CMatrix::identity(4);
  shifter(0, 0) = std::polar(1.0, phase);
  // Columns u1, d1, u2, d2 -> rows u3, d3, u4, d4.
  const CMatrix combine{{h, 0, h, 0}, {h, 0, -h, 0}, {0, h, 0, h}, {0, h, 0, -h}};
  return combine * shifter * split;
}

PairBranches pair_branches(const CMatrix& transfer, std::size_t in_a, std::size_t in_b,
                           std::size_t first, std::size_t second) {
  if (first == second) {
    throw std::invalid_argument("coincidence requires two distinct output modes");
  }
  if (std::max(first, second) >= transfer.rows() || std::max(in_a, in_b) >= transfer.cols()) {
    throw DimensionError("mode index outside the transfer matrix");
  }
  const Complex direct = transfer(first, in_a) * transfer(second, in_b);
  const Complex exchange = transfer(second, in_a) * transfer(first, in_b);
  return PairBranches{direct * CMatrix::identity(4), exchange * swap_operator().matrix};
}

CMatrix postselected_operator(const PairBranches& branches, const DensityOp& rho_ab,
                              double distinguishability) {
  require_two_qubit(rho_ab);
  require_distinguishability(distinguishability);
  const CMatrix& rho = rho_ab.matrix();
  const CMatrix coherent = sandwich(branches.direct + branches.exchange, rho);
  const CMatrix incoherent = sandwich(branches.direct, rho) + sandwich(branches.exchange, rho);
  return distinguishability * coherent + (1.0 - distinguishability) * incoherent;
}

PostselectResult optical_postselect(const DensityOp& rho_ab, const OpticalConfig& cfg) {
  return optical_postselect(rho_ab, cfg, OutputMode::u3, OutputMode::d4);
}

PostselectResult optical_postselect(const DensityOp& rho_ab, const OpticalConfig& cfg,
                                    OutputMode first, OutputMode second) {
  validate(cfg);
  const PairBranches branches =
      pair_branches(network_transfer(cfg.phase), index_of(InputMode::in_a),
                    index_of(InputMode::in_b), index_of(first), index_of(second));
  CMatrix sigma = postselected_operator(branches, rho_ab, cfg.distinguishability);
  const double probability = trace(sigma).real();
  if (probability <= kMinPostselectProbability) return PostselectResult{std::nullopt, probability};
  sigma *= 1.0 / probability;
  return PostselectResult{DensityOp(sigma), probability};
}

double hom_coincidence(const DensityOp& rho_a, const DensityOp& rho_b, double distinguishability) {
  require_single_qubit(rho_a);
  require_single_qubit(rho_b);
  require_distinguishability(distinguishability);
  const double overlap = trace(rho_a.matrix() * rho_b.matrix()).real();
  return 0.5 * (1.0 - distinguishability * overlap);
}

double hom_coincidence_optical(const DensityOp& rho_a, const DensityOp& rho_b,
                               double distinguishability) {
  require_single_qubit(rho_a);
  require_single_qubit(rho_b);
  const double h = std::numbers::sqrt2 / 2;
  const CMatrix splitter{{h, h}, {h, -h}};
  const PairBranches branches = pair_branches(splitter, 0, 1, 0, 1);
  return trace(postselected_operator(branches, product(rho_a, rho_b), distinguishability)).real();
}

}  // namespace qnet

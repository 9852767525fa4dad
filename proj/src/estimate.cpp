#include "qnet/estimate.hpp"

#include <fmt/format.h>

#include <Eigen/Dense>
#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <functional>
#include <limits>
#include <numbers>

#include "qnet/network.hpp"
#include "qnet/random.hpp"

namespace qnet {

namespace {

using std::numbers::pi;

double wrap_angle(double a) { return std::remainder(a, 2.0 * pi); }

std::size_t distinct_phases(std::span<const double> phases) {
  std::vector<double> reduced;
  for (const double phi : phases) {
    const double w = wrap_angle(phi);
    const bool seen = std::any_of(reduced.begin(), reduced.end(), [&](double x) {
      return std::abs(wrap_angle(x - w)) < 1e-12;
    });
    if (!seen) reduced.push_back(w);
  }
  return reduced.size();
}

std::uint64_t fingerprint(const DensityOp& rho) {
  std::uint64_t h = rng::tag_hash("state");
  for (const Complex& z : rho.matrix().entries()) {
    h = rng::splitmix64(h ^ std::bit_cast<std::uint64_t>(z.real()));
    h = rng::splitmix64(h ^ std::bit_cast<std::uint64_t>(z.imag()));
  }
  return h;
}

FunctionalReport finish(Functional kind, double estimate, double oracle, std::vector<SubRun> runs) {
  return FunctionalReport{kind, estimate, oracle, std::abs(estimate - oracle), std::move(runs)};
}

FunctionalReport pair_overlap(Functional kind, const DensityOp& rho_a, const DensityOp& rho_b,
                              double oracle, const SweepPlan& plan) {
  SubRun reference = reference_run(plan);
  SubRun target = measure(std::string(to_string(kind)), product(rho_a, rho_b), plan,
                          rng::derive_seed(plan.seed, to_string(kind)));
  const double v = signed_visibility(target.fit, reference.fit);
  return finish(kind, v, oracle, {std::move(target), std::move(reference)});
}

}  // namespace

double FitResult::visibility_magnitude() const noexcept { return std::abs(visibility_signed); }

double FitResult::fringe_phase() const noexcept { return std::atan2(sin_c, cos_b); }

FitResult fit_interference(std::span<const CountRecord> records) {
  std::vector<double> phases;
  std::vector<double> values;
  phases.reserve(records.size());
  values.reserve(records.size());
  for (const CountRecord& r : records) {
    phases.push_back(r.phase_nominal);
    values.push_back(static_cast<double>(r.counts));
  }
  return fit_interference(phases, values);
}

FitResult fit_interference(std::span<const double> phases, std::span<const double> values) {
  if (phases.size() != values.size()) throw FitError("phase and value counts differ");
  if (phases.size() < 4) throw FitError("fit needs at least 4 records");
  if (distinct_phases(phases) < 3) throw FitError("fit needs at least 3 distinct phases");

  const auto n = static_cast<Eigen::Index>(phases.size());
  Eigen::MatrixXd design(n, 3);
  Eigen::VectorXd counts(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double phi = phases[static_cast<std::size_t>(i)];
    design(i, 0) = 1.0;
    design(i, 1) = std::cos(phi);
    design(i, 2) = std::sin(phi);
    counts(i) = values[static_cast<std::size_t>(i)];
  }

  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(design);
  qr.setThreshold(1e-10);
  if (qr.rank() < 3) throw FitError("fit design is rank deficient (phases equal modulo pi)");
  const Eigen::Vector3d coef = qr.solve(counts);

  const double a = coef(0);
  if (!(a > 0.0)) throw FitError("fitted offset is not positive; no counts to normalize by");
  const double b = coef(1);
  const double c = coef(2);
  const double magnitude = std::hypot(b, c) / a;
  const double residual = (design * coef - counts).norm() / std::sqrt(static_cast<double>(n));
  return FitResult{a, b, c, b >= 0.0 ? magnitude : -magnitude, residual};
}

double signed_visibility(const FitResult& target, const FitResult& reference) {
  if (reference.visibility_magnitude() < kMinReferenceVisibility) {
    throw CalibrationError(fmt::format("reference visibility {} is below {}",
                                       reference.visibility_magnitude(), kMinReferenceVisibility));
  }
  const double magnitude = target.visibility_magnitude();
  if (magnitude == 0.0) return 0.0;
  const double separation = std::abs(wrap_angle(target.fringe_phase() - reference.fringe_phase()));
  return separation <= pi / 2 ? magnitude : -magnitude;
}

std::string_view to_string(Functional kind) noexcept {
  switch (kind) {
    case Functional::Overlap: return "Overlap";
    case Functional::Purity: return "Purity";
    case Functional::Fidelity: return "Fidelity";
    case Functional::HSDistance: return "HSDistance";
    case Functional::WitnessValue: return "WitnessValue";
    case Functional::Concurrence: return "Concurrence";
  }
  return "Unknown";
}

std::string_view to_string(Verdict verdict) noexcept {
  return verdict == Verdict::Entangled ? "Entangled" : "Inconclusive";
}

double overlap_oracle(const DensityOp& rho_a, const DensityOp& rho_b) {
  return trace(rho_a.matrix() * rho_b.matrix()).real();
}

double fidelity_oracle(const PureState& psi, const DensityOp& rho) {
  const CMatrix ket = psi.ket();
  return (dagger(ket) * rho.matrix() * ket)(0, 0).real();
}

double hs_distance_oracle(const DensityOp& rho_a, const DensityOp& rho_b) {
  const CMatrix diff = rho_a.matrix() - rho_b.matrix();
  return 0.5 * trace(diff * diff).real();
}

double oracle_ppt_min_eigenvalue(const DensityOp& rho_ab) {
  if (rho_ab.dim() != 4) throw StateError("PPT test needs a two-qubit state");
  return hermitian_eigen(partial_transpose(rho_ab.matrix(), Subsystem::A)).values.front();
}

double oracle_wootters_concurrence(const DensityOp& rho_ab) {
  if (rho_ab.dim() != 4) throw StateError("concurrence needs a two-qubit state");
  const CMatrix sigma_y{{0.0, Complex(0, -1)}, {Complex(0, 1), 0.0}};
  const CMatrix flip = kron(sigma_y, sigma_y);
  const CMatrix& rho = rho_ab.matrix();
  const CMatrix rho_tilde = flip * conjugate(rho) * flip;
  const CMatrix root = sqrt_psd(rho);
  CMatrix r = root * rho_tilde * root;
  r = 0.5 * (r + dagger(r));

  std::vector<double> mu = hermitian_eigen(r).values;
  // Unit trace bounds the spectrum of r by 1.
  const double floor = spectral_noise_floor(1.0);
  std::vector<double> lambda(mu.size());
  std::transform(mu.begin(), mu.end(), lambda.begin(),
                 [&](double m) { return m <= floor ? 0.0 : std::sqrt(m); });
  std::sort(lambda.begin(), lambda.end(), std::greater<>());
  return std::max(0.0, lambda[0] - lambda[1] - lambda[2] - lambda[3]);
}

SubRun measure(std::string label, const DensityOp& rho_ab, const SweepPlan& plan,
               std::uint64_t seed) {
  SweepPlan sub = plan;
  sub.seed = seed;
  std::vector<CountRecord> records = simulate_sweep(rho_ab, sub);
  FitResult fit = fit_interference(records);
  return SubRun{std::move(label), seed, std::move(records), fit};
}

SubRun reference_run(const SweepPlan& plan) {
  const DensityOp hh = product(ket_h().density(), ket_h().density());
  return measure("reference", hh, plan, rng::derive_seed(plan.seed, "reference"));
}

FunctionalReport estimate_overlap(const DensityOp& rho_a, const DensityOp& rho_b,
                                  const SweepPlan& plan) {
  return pair_overlap(Functional::Overlap, rho_a, rho_b, overlap_oracle(rho_a, rho_b), plan);
}

FunctionalReport estimate_purity(const DensityOp& rho, const SweepPlan& plan) {
  return pair_overlap(Functional::Purity, rho, rho, purity(rho), plan);
}

FunctionalReport estimate_fidelity(const PureState& psi, const DensityOp& rho,
                                   const SweepPlan& plan) {
  if (psi.dim() != 2) throw StateError("fidelity estimate expects a single-qubit pure state");
  return pair_overlap(Functional::Fidelity, psi.density(), rho, fidelity_oracle(psi, rho), plan);
}

FunctionalReport estimate_hs_distance(const DensityOp& rho_a, const DensityOp& rho_b,
                                      const SweepPlan& plan) {
  SubRun reference = reference_run(plan);
  const std::uint64_t self_stream = rng::derive_seed(plan.seed, "self");
  SubRun aa = measure("self_a", product(rho_a, rho_a), plan,
                      rng::derive_seed(self_stream, fingerprint(rho_a)));
  SubRun bb = measure("self_b", product(rho_b, rho_b), plan,
                      rng::derive_seed(self_stream, fingerprint(rho_b)));
  SubRun ab = measure("cross", product(rho_a, rho_b), plan, rng::derive_seed(plan.seed, "cross"));

  const double v_aa = signed_visibility(aa.fit, reference.fit);
  const double v_bb = signed_visibility(bb.fit, reference.fit);
  const double v_ab = signed_visibility(ab.fit, reference.fit);
  const double estimate = 0.5 * (v_aa + v_bb - 2.0 * v_ab);
  return finish(Functional::HSDistance, estimate, hs_distance_oracle(rho_a, rho_b),
                {std::move(aa), std::move(bb), std::move(ab), std::move(reference)});
}

FunctionalReport estimate_witness(const DensityOp& rho_ab, const SweepPlan& plan) {
  SubRun reference = reference_run(plan);
  SubRun target = measure("witness", rho_ab, plan, rng::derive_seed(plan.seed, "witness"));
  const double v = signed_visibility(target.fit, reference.fit);
  return finish(Functional::WitnessValue, v, ideal_visibility(rho_ab),
                {std::move(target), std::move(reference)});
}

double concurrence_from_visibility(double v, ConcurrenceFamily family) {
  if (!(std::abs(v) <= 1.0 + 1e-12)) {
    throw std::invalid_argument("visibility magnitude exceeds 1");
  }
  return family == ConcurrenceFamily::HV_VH ? std::abs(v) : std::max(0.0, -v);
}

FunctionalReport estimate_concurrence(const DensityOp& rho_ab, ConcurrenceFamily family,
                                      const SweepPlan& plan) {
  FunctionalReport witness = estimate_witness(rho_ab, plan);
  const double v = std::clamp(witness.estimate, -1.0, 1.0);
  return finish(Functional::Concurrence, concurrence_from_visibility(v, family),
                oracle_wootters_concurrence(rho_ab), std::move(witness.runs));
}

WitnessVerdict witness_verdict(std::span<const SegmentRecord> run, double threshold) {
  std::array<std::vector<double>, 3> segments;
  for (const SegmentRecord& row : run) {
    if (row.segment >= segments.size()) {
      throw ProtocolError(fmt::format("segment index {} outside 0..2", row.segment));
    }
    segments[row.segment].push_back(static_cast<double>(row.record.counts));
  }
  for (std::size_t s = 0; s < segments.size(); ++s) {
    if (segments[s].empty()) throw ProtocolError(fmt::format("segment {} has no dots", s));
  }
  const double lock_cos = std::cos(run.front().record.phase_nominal);
  if (std::abs(lock_cos) < 1e-9) {
    throw ProtocolError("lock phase sits at a fringe node; the flip direction is undefined");
  }

  std::vector<double> outer = segments[0];
  outer.insert(outer.end(), segments[2].begin(), segments[2].end());
  const std::vector<double>& middle = segments[1];

  const auto mean = [](const std::vector<double>& xs) {
    double sum = 0.0;
    for (const double x : xs) sum += x;
    return sum / static_cast<double>(xs.size());
  };
  const auto sum_sq = [](const std::vector<double>& xs, double m) {
    double sum = 0.0;
    for (const double x : xs) sum += (x - m) * (x - m);
    return sum;
  };

  const double mean_outer = mean(outer);
  const double mean_middle = mean(middle);
  const double dof = static_cast<double>(outer.size() + middle.size()) - 2.0;
  const double pooled_sd =
      std::sqrt((sum_sq(outer, mean_outer) + sum_sq(middle, mean_middle)) / dof);
  const double gap = std::abs(mean_middle - mean_outer);

  double statistic = 0.0;
  if (gap > 0.0) {
    statistic = pooled_sd > 0.0 ? gap / pooled_sd : std::numeric_limits<double>::infinity();
  }
  const bool flipped = (mean_outer - mean_middle) * lock_cos < 0.0;
  const Verdict verdict = statistic > threshold && flipped ? Verdict::Entangled
                                                           : Verdict::Inconclusive;
  return WitnessVerdict{verdict, statistic, threshold, mean_outer, mean_middle};
}

std::string to_key_value(const FunctionalReport& report) {
  std::string out = fmt::format("kind={}\nestimate={}\noracle={}\nabs_error={}\n",
                                to_string(report.kind), report.estimate, report.oracle,
                                report.abs_error);
  for (const SubRun& run : report.runs) {
    out += fmt::format("run.{}.seed={}\nrun.{}.visibility={}\n", run.label, run.seed, run.label,
                       run.fit.visibility_signed);
  }
  return out;
}

std::string to_key_value(const WitnessVerdict& verdict) {
  return fmt::format("verdict={}\nstatistic={}\nthreshold={}\nmean_outer={}\nmean_middle={}\n",
                     to_string(verdict.verdict), verdict.statistic, verdict.threshold,
                     verdict.mean_outer, verdict.mean_middle);
}

std::string to_csv_row(const FunctionalReport& report) {
  return fmt::format("{},{},{},{}", to_string(report.kind), report.estimate, report.oracle,
                     report.abs_error);
}

std::string to_csv_row(const WitnessVerdict& verdict) {
  return fmt::format("{},{},{},{},{}", to_string(verdict.verdict), verdict.statistic,
                     verdict.threshold, verdict.mean_outer, verdict.mean_middle);
}

}  // namespace qnet

#include <catch_amalgamated.hpp>

#include <cmath>
#include <numbers>

#include "qnet/states.hpp"
#include "test_support.hpp"

using namespace qnet;
using Catch::Matchers::WithinAbs;
using std::numbers::pi;

namespace {

double amp_distance(const PureState& a, const std::vector<Complex>& b) {
  double worst = 0.0;
  for (std::size_t i = 0; i < b.size(); ++i) worst = std::max(worst, std::abs(a.amplitudes()[i] - b[i]));
  return worst;
}

/// |<a|b>| == 1, i.e. equal up to a global phase.
bool same_ray(const PureState& a, const PureState& b) {
  Complex inner{};
  for (std::size_t i = 0; i < a.dim(); ++i) inner += std::conj(a.amplitudes()[i]) * b.amplitudes()[i];
  return std::abs(std::abs(inner) - 1.0) < 1e-12;
}

}  // namespace

TEST_CASE("spdc_source", "[states]") {
  CHECK(amp_distance(spdc_source(1, 0), {1, 0, 0, 0}) == 0.0);
  const double r = std::sqrt(0.5);
  CHECK(amp_distance(spdc_source(r, r), phi_plus().amplitudes()) < 1e-15);
  const PureState s = spdc_source(0.6, 0.8);
  CHECK(amp_distance(s, {0.6, 0, 0, 0.8}) == 0.0);
  CHECK_THAT(purity(s.density()), WithinAbs(1.0, 1e-12));
  CHECK_NOTHROW(spdc_source(-0.6, 0.8));
  CHECK_THROWS_AS(spdc_source(0.6, 0.6), StateError);
}

TEST_CASE("half-wave plate", "[states]") {
  CHECK(amp_distance(apply_jones(hwp_jones(0), ket_h()), {1, 0}) == 0.0);
  const double r = std::sqrt(0.5);
  CHECK(amp_distance(apply_jones(hwp_jones(pi / 8), ket_h()), {r, r}) < 1e-15);

  std::mt19937_64 gen(41);
  std::uniform_real_distribution<double> angle(-pi, pi);
  for (int trial = 0; trial < 100; ++trial) {
    const double theta = angle(gen);
    const CMatrix h = hwp_jones(theta);
    CHECK(max_abs_diff(h * h, CMatrix::identity(2)) < 1e-15);
    CHECK(is_hermitian(h, 0.0));
    CHECK_THAT((h(0, 0) * h(1, 1) - h(0, 1) * h(1, 0)).real(), WithinAbs(-1.0, 1e-15));
    // The prepared-state parametrization is reproduced exactly.
    CHECK(amp_distance(apply_jones(h, ket_h()), hwp_prepared(theta).amplitudes()) == 0.0);
  }
}

TEST_CASE("quarter-wave plate", "[states]") {
  CHECK(same_ray(apply_jones(qwp_jones(0), ket_h()), ket_h()));

  const PureState circ = apply_jones(qwp_jones(pi / 4), ket_h());
  CHECK_THAT(std::abs(circ.amplitudes()[0]), WithinAbs(std::sqrt(0.5), 1e-15));
  CHECK_THAT(std::abs(circ.amplitudes()[1]), WithinAbs(std::sqrt(0.5), 1e-15));
  const double rel = std::arg(circ.amplitudes()[1] / circ.amplitudes()[0]);
  CHECK_THAT(std::abs(rel), WithinAbs(pi / 2, 1e-14));

  std::mt19937_64 gen(43);
  std::uniform_real_distribution<double> angle(-pi, pi);
  for (int trial = 0; trial < 100; ++trial) {
    const CMatrix q = qwp_jones(angle(gen));
    CHECK(max_abs_diff(dagger(q) * q, CMatrix::identity(2)) < 1e-15);
    const CMatrix q4 = q * q * q * q;
    CHECK(max_abs_diff(q4, q4(0, 0) * CMatrix::identity(2)) < 1e-14);
    CHECK_THAT(std::abs(q4(0, 0)), WithinAbs(1.0, 1e-14));
  }
  CHECK(jones({WaveplateKind::QWP, 0.3}) == qwp_jones(0.3));
  CHECK(jones({WaveplateKind::HWP, 0.3}) == hwp_jones(0.3));
}

TEST_CASE("quartz dephaser", "[states]") {
  const DensityOp diag45 = hwp_prepared(pi / 8).density();

  CHECK(max_abs_diff(apply_quartz(diag45, {1.0}).matrix(), diag45.matrix()) == 0.0);
  CHECK(max_abs_diff(apply_quartz(diag45, {0.0}).matrix(), 0.5 * CMatrix::identity(2)) < 1e-15);

  const CMatrix expected{{0.5, 0.29}, {0.29, 0.5}};
  CHECK(max_abs_diff(apply_quartz(diag45, {kDefaultQuartzKappa}).matrix(), expected) < 1e-15);
  CHECK(max_abs_diff(dephased_diagonal().matrix(), expected) < 1e-15);

  CHECK_THROWS_AS(apply_quartz(diag45, {1.2}), StateError);
  CHECK_THROWS_AS(apply_quartz(diag45, {-0.1}), StateError);

  std::mt19937_64 gen(47);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    const DensityOp rho = random_density(seed, 2, 1 + seed % 2);
    const double kappa = u(gen);
    const DensityOp out = apply_quartz(rho, {kappa});
    CHECK(out.matrix()(0, 0) == rho.matrix()(0, 0));
    CHECK(out.matrix()(1, 1) == rho.matrix()(1, 1));
    CHECK(purity(out) <= purity(rho) + 1e-12);
  }
}

TEST_CASE("Werner states", "[states]") {
  CHECK(max_abs_diff(make_werner(1).matrix(), psi_minus().density().matrix()) < 1e-15);
  CHECK(max_abs_diff(make_werner(0).matrix(), 0.25 * CMatrix::identity(4)) < 1e-15);

  // Diagonal in the Bell basis: p + (1-p)/4 on the singlet, (1-p)/4 elsewhere.
  const std::vector<double> ev = hermitian_eigen(make_werner(0.5).matrix()).values;
  CHECK_THAT(ev[0], WithinAbs(0.125, 1e-12));
  CHECK_THAT(ev[1], WithinAbs(0.125, 1e-12));
  CHECK_THAT(ev[2], WithinAbs(0.125, 1e-12));
  CHECK_THAT(ev[3], WithinAbs(0.625, 1e-12));

  for (int k = 0; k <= 32; ++k) {
    const double p = k / 32.0;
    const double min_pt =
        hermitian_eigen(partial_transpose(make_werner(p).matrix(), Subsystem::A)).values.front();
    CHECK_THAT(min_pt, WithinAbs((1 - 3 * p) / 4, 1e-12));
  }

  CHECK_THROWS_AS(make_werner(1.5), StateError);
  CHECK_THROWS_AS(make_werner(-0.1), StateError);
}

TEST_CASE("nonmaximally entangled families", "[states]") {
  const double r = std::sqrt(0.5);
  CHECK(amp_distance(nonmax_entangled(pi / 8, Sign::Minus, PairBasis::HV_VH), {0, r, -r, 0}) < 1e-15);
  CHECK(amp_distance(nonmax_entangled(0, Sign::Plus, PairBasis::HH_VV), {1, 0, 0, 0}) == 0.0);
  CHECK(amp_distance(nonmax_entangled(pi / 8, Sign::Plus, PairBasis::HV_VH), {0, r, r, 0}) < 1e-15);
  for (int k = 0; k < 50; ++k) {
    CHECK_THAT(purity(nonmax_entangled(0.07 * k, Sign::Minus, PairBasis::HH_VV).density()),
               WithinAbs(1.0, 1e-12));
  }
}

TEST_CASE("density validation", "[states]") {
  CHECK_FALSE(check_density(0.5 * CMatrix::identity(2)).has_value());
  CHECK(check_density(CMatrix{{0.5, 0.6}, {0.6, 0.5}}).has_value());         // negative eigenvalue
  CHECK(check_density(CMatrix{{0.5, 0.1}, {0.2, 0.5}}).has_value());         // not Hermitian
  CHECK(check_density(CMatrix{{0.6, 0.0}, {0.0, 0.6}}).has_value());         // trace 1.2
  CHECK(check_density((1.0 / 3) * CMatrix::identity(3)).has_value());  // dim 3

  const DensityOp repaired(CMatrix{{0.5 + 4e-11, 0.0}, {0.0, 0.5}});
  CHECK_THAT(trace(repaired.matrix()).real(), WithinAbs(1.0, 1e-15));
  CHECK_THROWS_AS(DensityOp(CMatrix{{0.5 + 1e-9, 0.0}, {0.0, 0.5}}), StateError);
  CHECK_NOTHROW(DensityOp(CMatrix{{1.0 + 5e-11, 0.0}, {0.0, -5e-11}}));

  CHECK_THROWS_AS(PureState({1.0, 1.0}), StateError);
  CHECK_THROWS_AS(PureState({1.0, 0.0, 0.0}), StateError);
}

TEST_CASE("random_density", "[states]") {
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    CHECK_THAT(purity(random_density(seed, 4, 1)), WithinAbs(1.0, 1e-10));
    CHECK_THAT(purity(random_density(seed, 2, 1)), WithinAbs(1.0, 1e-10));
  }
  CHECK(random_density(99, 4, 3).matrix() == random_density(99, 4, 3).matrix());
  CHECK_FALSE(random_density(99, 4, 3).matrix() == random_density(100, 4, 3).matrix());

  for (std::uint64_t seed = 0; seed < 1000; ++seed) {
    const DensityOp rho = random_density(seed, 4, 4);
    REQUIRE_FALSE(check_density(rho.matrix()).has_value());
    CHECK(hermitian_eigen(rho.matrix()).values.front() >= -1e-10);
  }

  for (std::size_t rank = 1; rank <= 4; ++rank) {
    const std::vector<double> ev = hermitian_eigen(random_density(7, 4, rank).matrix()).values;
    const auto nonzero = std::count_if(ev.begin(), ev.end(), [](double v) { return v > 1e-10; });
    CHECK(static_cast<std::size_t>(nonzero) == rank);
  }

  CHECK_THROWS_AS(random_density(1, 2, 3), StateError);
  CHECK_THROWS_AS(random_density(1, 3, 1), StateError);
}

TEST_CASE("pure states project to unit purity", "[states]") {
  for (const PureState& s : {ket_h(), ket_v(), phi_plus(), phi_minus(), psi_plus(), psi_minus(),
                             hwp_prepared(0.3), apply_jones(qwp_jones(0.2), ket_h())}) {
    CHECK_THAT(purity(s.density()), WithinAbs(1.0, 1e-12));
  }
}

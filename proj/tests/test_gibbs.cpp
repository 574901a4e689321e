#include <doctest.h>

#include <cmath>

#include "ctgibbs/errors.hpp"
#include "ctgibbs/gibbs.hpp"
#include "support.hpp"

using namespace ctgibbs;
using testing::two_state;

namespace {
const double kRoot2 = std::sqrt(2.0);
}

TEST_CASE("two-state gibbs chain closed forms") {
  const auto a = two_state(0.5, 0.5);
  const auto& s = a.space();
  const auto chain = build_gibbs(a, PotentialField(s, {0.0, 1.0}));
  CHECK(chain.lambda() == doctest::Approx(kRoot2 / 2).epsilon(1e-12));
  CHECK(chain.gamma[0] == doctest::Approx(1.0 + kRoot2 / 2).epsilon(1e-12));
  CHECK(chain.gamma[1] == doctest::Approx(kRoot2 / 2).epsilon(1e-12));
  for (Word x = 0; x < 2; ++x) {
    CHECK(chain.kernel.weight(x, 0) == doctest::Approx(1.0 - kRoot2 / 2).epsilon(1e-10));
    CHECK(chain.kernel.weight(x, 1) == doctest::Approx(kRoot2 / 2).epsilon(1e-10));
  }
  CHECK(chain.stationary[0] == doctest::Approx(0.146447).epsilon(1e-5));
  CHECK(chain.stationary[1] == doctest::Approx(0.853553).epsilon(1e-6));
  // mu_{B,gamma} = (1 - 1/sqrt2)/... closed form: (2 - sqrt2)/4 on "1".
  CHECK(std::abs(chain.stationary[0] - (2.0 - kRoot2) / 4.0) <= 1e-12);

  const auto hot = build_gibbs(a, PotentialField(s, {0.0, 10.0}));
  CHECK(hot.stationary[1] == doctest::Approx(0.997519).epsilon(1e-6));
  CHECK(hot.stationary[0] == doctest::Approx(0.002481).epsilon(1e-3));
}

TEST_CASE("constant potentials leave the base chain unchanged") {
  CounterRng rng(71);
  const CylinderSpace s(2, 2);
  const auto a = testing::random_kernel(s, rng);
  const auto chain = build_gibbs(a, PotentialField::constant(s, -0.8));
  CHECK(chain.lambda() == doctest::Approx(-0.8).epsilon(1e-12));
  for (Word x = 0; x < s.size(); ++x) CHECK(chain.gamma[x] == doctest::Approx(1.0).epsilon(1e-12));
  for (std::size_t i = 0; i < a.weights().size(); ++i)
    CHECK(std::abs(chain.kernel.weights()[i] - a.weights()[i]) <= 1e-12);
  CHECK(chain.stationary.max_abs_difference(equilibrium_measure(a)) <= 1e-12);

  const CylinderSpace single(1, 1);
  const auto trivial = build_gibbs(KernelField::uniform(single), PotentialField(single, {3.0}));
  CHECK(trivial.gamma[0] == doctest::Approx(1.0));
}

TEST_CASE("gibbs chains are admissible and stationary") {
  CounterRng rng(73);
  for (auto [d, k] : testing::shapes()) {
    const CylinderSpace s(d, k);
    for (int rep = 0; rep < 4; ++rep) {
      const auto a = testing::random_kernel(s, rng);
      const auto V = testing::uniform_field(s, rng, -2.0, 2.0);
      const auto chain = build_gibbs(a, V);
      CHECK(chain.gamma.min() > 0.0);
      CHECK(chain.kernel.normalization_defect() <= 1e-12);
      const Matrix q = GeneratorMatrix(chain.gamma, chain.kernel).dense();
      // int L^V f dmu = 0 over the indicator basis.
      const Vector mu = testing::as_vector(chain.stationary.mass());
      CHECK((q.transpose() * mu).cwiseAbs().maxCoeff() <= 1e-10);
      const auto check = eigenprobability_relation(chain);
      CHECK(check.residual <= 1e-9);
      CHECK(check.distance_to_nu <= 1e-9);
      // Rearranged variational identity.
      CHECK(std::abs(relative_entropy(chain.candidate(), a) - (chain.lambda() - chain.stationary.integrate(V))) <=
            1e-9);
    }
  }
}

TEST_CASE("eigenprobability relation on the two-state example") {
  const auto a = two_state(0.5, 0.5);
  const auto chain = build_gibbs(a, PotentialField(a.space(), {0.0, 1.0}));
  CHECK(eigenprobability_relation(chain).residual <= 1e-10);
  const auto flat = build_gibbs(a, PotentialField::constant(a.space(), 0.0));
  const auto c = eigenprobability_relation(flat);
  CHECK(c.residual <= 1e-15);
  CHECK(flat.stationary.max_abs_difference(equilibrium_measure(a)) <= 1e-15);
}

TEST_CASE("relative entropy closed forms") {
  const auto a = two_state(0.5, 0.5);
  const auto& s = a.space();
  CHECK(relative_entropy(AdmissibleCandidate::base(a), a) == 0.0);
  const auto doubled = AdmissibleCandidate::make(PotentialField::constant(s, 2.0), a);
  CHECK(std::abs(relative_entropy(doubled, a) - (1.0 - 2.0 * std::log(2.0))) <= 1e-12);
  const auto gibbs = build_gibbs(a, PotentialField(s, {0.0, 1.0}));
  CHECK(relative_entropy(gibbs.candidate(), a) == doctest::Approx(-0.146447).epsilon(1e-5));
}

TEST_CASE("relative entropy is nonpositive and vanishes only at the base chain") {
  CounterRng rng(79);
  const CylinderSpace s(2, 2);
  const auto a = testing::random_kernel(s, rng);
  for (int rep = 0; rep < 50; ++rep)
    CHECK(relative_entropy(random_candidate(s, derive_seed(5, rep)), a) <= 1e-12);
  double previous = 0.0;
  for (double eps : {1e-3, 1e-2, 1e-1}) {
    const PotentialField gamma = PotentialField::constant(s, 1.0) + PotentialField::indicator(s, 1) * eps;
    const double h = relative_entropy(AdmissibleCandidate::make(gamma, a), a);
    CHECK(h < 0.0);
    CHECK(h < previous);
    previous = h;
  }
}

TEST_CASE("candidates are validated") {
  const auto a = two_state(0.3, 0.3);
  const auto& s = a.space();
  CHECK_THROWS_AS(AdmissibleCandidate::make(PotentialField(s, {1.0, 0.0}), a), ArgumentError);
  CHECK_THROWS_AS(AdmissibleCandidate::make(PotentialField::constant(s, 1.0), KernelField(s, {1.0, 1.0, 1.0, 1.0})),
                  ArgumentError);
  AdmissibleCandidate bad = AdmissibleCandidate::base(a);
  bad.stationary = Measure(s, {0.9, 0.1});
  CHECK_THROWS_AS(relative_entropy(bad, a), ArgumentError);
}

TEST_CASE("random candidates are reproducible") {
  const CylinderSpace s(3, 2);
  const auto c1 = random_candidate(s, 99), c2 = random_candidate(s, 99), c3 = random_candidate(s, 100);
  CHECK(std::equal(c1.gamma.values().begin(), c1.gamma.values().end(), c2.gamma.values().begin()));
  CHECK_FALSE(std::equal(c1.gamma.values().begin(), c1.gamma.values().end(), c3.gamma.values().begin()));
  CHECK(c1.kernel.normalized());
  CHECK(std::exp(-1.0) <= c1.gamma.min());
  CHECK(c1.gamma.max() <= std::exp(1.0));
}

TEST_CASE("pressure report") {
  const auto a = two_state(0.5, 0.5);
  const auto& s = a.space();
  auto r = pressure(a, PotentialField(s, {0.0, 1.0}), 50, 7);
  CHECK(std::abs(r.lambda - kRoot2 / 2) <= 1e-12);
  CHECK(std::abs(r.gibbs_value - r.lambda) <= 1e-9);
  CHECK(r.audits.size() == 50);
  CHECK(r.audit_max <= r.lambda + 1e-9);
  for (std::size_t i = 0; i < r.audits.size(); ++i) {
    CHECK(r.audits[i].seed == derive_seed(7, i));
    CHECK(r.audits[i].gap >= -1e-9);
    CHECK(r.audits[i].entropy <= 0.0);
  }
  r = pressure(a, PotentialField(s, {0.0, 10.0}), 0, 7);
  CHECK(r.lambda == doctest::Approx((9.0 + std::sqrt(101.0)) / 2).epsilon(1e-12));
  CHECK(r.audits.empty());
  CHECK(std::isinf(r.audit_max));

  r = pressure(a, PotentialField::constant(s, 0.25), 10, 1);
  CHECK(r.lambda == doctest::Approx(0.25));
  CHECK(r.gibbs_value == doctest::Approx(0.25));
  CHECK(r.audit_max <= 0.25 + 1e-12);
}

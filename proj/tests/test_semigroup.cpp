#include <doctest.h>

#include <cmath>

#include "ctgibbs/errors.hpp"
#include "support.hpp"

using namespace ctgibbs;
using testing::two_state;

TEST_CASE("generator matrix of the two-state chain") {
  const double p1 = 0.3, p2 = 0.6;
  const Matrix q = GeneratorMatrix::unit_rate(two_state(p1, p2)).dense();
  CHECK(q(0, 0) == doctest::Approx(-p1));
  CHECK(q(0, 1) == doctest::Approx(p1));
  CHECK(q(1, 0) == doctest::Approx(p2));
  CHECK(q(1, 1) == doctest::Approx(-p2));
}

TEST_CASE("generator_apply examples") {
  const auto gen = GeneratorMatrix::unit_rate(two_state(0.5, 0.5));
  const auto g = generator_apply(gen, PotentialField(gen.space(), {0.0, 1.0}));
  CHECK(g[0] == doctest::Approx(0.5));
  CHECK(g[1] == doctest::Approx(-0.5));

  const CylinderSpace single(1, 2);
  const auto trivial = GeneratorMatrix::unit_rate(KernelField::uniform(single));
  CHECK(generator_apply(trivial, PotentialField(single, {7.0}))[0] == 0.0);
}

TEST_CASE("generators annihilate constants and match their dense form") {
  CounterRng rng(3);
  for (auto [d, k] : testing::shapes()) {
    const CylinderSpace s(d, k);
    const GeneratorMatrix gen(testing::uniform_field(s, rng, 0.2, 3.0), testing::random_kernel(s, rng));
    const Matrix q = gen.dense();
    CHECK(q.rowwise().sum().cwiseAbs().maxCoeff() <= 1e-12);
    CHECK(generator_apply(gen, PotentialField::constant(s, 2.5)).sup_norm() <= 1e-12);
    const auto f = testing::uniform_field(s, rng);
    CHECK(testing::sup_diff(q * testing::as_vector(f.values()), generator_apply(gen, f).values()) <= 1e-12);
  }
}

TEST_CASE("generator arguments are validated") {
  const CylinderSpace s(2, 1);
  CHECK_THROWS_AS(GeneratorMatrix(PotentialField(s, {1.0, 0.0}), KernelField::uniform(s)), ArgumentError);
  CHECK_THROWS_AS(GeneratorMatrix::unit_rate(KernelField(s, {1.0, 1.0, 1.0, 1.0})), ArgumentError);
}

TEST_CASE("uniformization examples") {
  const auto a = two_state(0.5, 0.5);
  const auto gen = GeneratorMatrix::unit_rate(a);
  const auto& s = gen.space();
  const auto one = PotentialField::constant(s, 1.0);
  for (double T : {0.0, 0.3, 4.0, 40.0})
    CHECK(uniformization_apply(gen, PotentialField::constant(s, 0.0), one, T).sup_norm() ==
          doctest::Approx(1.0).epsilon(1e-12));

  const PotentialField V(s, {0.0, 1.0});
  Matrix m(2, 2);
  m << -0.5, 0.5, 0.5, 0.5;
  const Vector expected = m.exp() * Vector::Ones(2);
  CHECK(testing::sup_diff(expected, uniformization_apply(gen, V, one, 1.0).values()) <= 1e-12);

  const CylinderSpace single(1, 1);
  const auto g1 = GeneratorMatrix::unit_rate(KernelField::uniform(single));
  for (double v : {-3.0, 0.5, 2.0})
    CHECK(uniformization_apply(g1, PotentialField(single, {v}), PotentialField(single, {1.0}), 1.7)[0] ==
          doctest::Approx(std::exp(1.7 * v)).epsilon(1e-12));

  CHECK_THROWS_AS(uniformization_apply(gen, V, one, -1.0), ArgumentError);
  CHECK_THROWS_AS(uniformization_apply(gen, V, one, 1.0, 0.0), ArgumentError);
}

TEST_CASE("uniformization agrees with the dense matrix exponential") {
  CounterRng rng(17);
  for (auto [d, k] : testing::shapes()) {
    const CylinderSpace s(d, k);
    for (int rep = 0; rep < 4; ++rep) {
      const GeneratorMatrix gen(testing::uniform_field(s, rng, 0.5, 2.0), testing::random_kernel(s, rng));
      const auto V = testing::uniform_field(s, rng, -2.0, 2.0);
      const auto f = testing::uniform_field(s, rng, 0.0, 1.0);
      for (double T : {0.1, 1.0, 5.0}) {
        const Vector oracle = testing::expm_apply(gen, V, f, T);
        const double scale = std::max(1.0, oracle.cwiseAbs().maxCoeff());
        CHECK(testing::sup_diff(oracle, uniformization_apply(gen, V, f, T, 1e-11).values()) <= 1e-10 * scale);
        const Vector left_oracle =
            (T * testing::with_potential(gen, V)).exp().transpose() * testing::as_vector(f.values());
        CHECK(testing::sup_diff(left_oracle, uniformization_apply_left(gen, V, f.values(), T, 1e-11)) <=
              1e-10 * std::max(1.0, left_oracle.cwiseAbs().maxCoeff()));
      }
    }
  }
}

TEST_CASE("semigroup law") {
  CounterRng rng(19);
  const CylinderSpace s(2, 2);
  const double tol = 1e-12;
  for (int rep = 0; rep < 5; ++rep) {
    const auto gen = GeneratorMatrix::unit_rate(testing::random_kernel(s, rng));
    const auto V = testing::uniform_field(s, rng, -1.0, 0.0);
    const auto f = testing::uniform_field(s, rng, 0.0, 1.0);
    const auto once = uniformization_apply(gen, V, f, 1.9, tol);
    const auto twice = uniformization_apply(gen, V, uniformization_apply(gen, V, f, 0.7, tol), 1.2, tol);
    CHECK((once - twice).sup_norm() <= 2 * tol);
  }
}

TEST_CASE("convolved exponentials closed forms") {
  CHECK(convolved_exponentials(std::vector<double>{-0.4}, 2.0) == doctest::Approx(std::exp(-0.8)));
  const double r0 = -1.0, r1 = 0.5, T = 1.3;
  CHECK(convolved_exponentials(std::vector<double>{r0, r1}, T) ==
        doctest::Approx((std::exp(r0 * T) - std::exp(r1 * T)) / (r0 - r1)).epsilon(1e-14));
  CHECK(convolved_exponentials(std::vector<double>{r0, r0}, T) == doctest::Approx(T * std::exp(r0 * T)));
  // Three equal rates: T^2/2 e^{rT}; nearly equal rates approach it continuously.
  const std::vector<double> equal = {0.2, 0.2, 0.2};
  const std::vector<double> close = {0.2, 0.2 + 1e-9, 0.2 - 1e-9};
  CHECK(convolved_exponentials(equal, T) == doctest::Approx(T * T / 2 * std::exp(0.2 * T)).epsilon(1e-14));
  CHECK(convolved_exponentials(close, T) == doctest::Approx(convolved_exponentials(equal, T)).epsilon(1e-8));
  // Distinct rates against the divided-difference formula.
  const std::vector<double> r = {-1.0, 0.0, 2.0};
  double dd = 0.0;
  for (std::size_t i = 0; i < 3; ++i) {
    double denom = 1.0;
    for (std::size_t j = 0; j < 3; ++j)
      if (j != i) denom *= r[i] - r[j];
    dd += std::exp(r[i] * T) / denom;
  }
  CHECK(convolved_exponentials(r, T) == doctest::Approx(dd).epsilon(1e-13));
}

TEST_CASE("perron solve closed forms") {
  const auto a = two_state(0.5, 0.5);
  const auto& s = a.space();
  auto sol = perron_solve(a, PotentialField(s, {0.0, 1.0}));
  CHECK(std::abs(sol.lambda - std::sqrt(0.5)) <= 1e-10);
  CHECK(sol.F[1] == doctest::Approx(1.0));
  CHECK(sol.F[0] == doctest::Approx(1.0 / (1.0 + std::sqrt(2.0))).epsilon(1e-10));
  CHECK(eigen_equation_check(sol, a, PotentialField(s, {0.0, 1.0})) <= 1e-10);

  sol = perron_solve(a, PotentialField(s, {0.0, 10.0}));
  CHECK(std::abs(sol.lambda - (9.0 + std::sqrt(101.0)) / 2.0) <= 1e-9);

  const auto b = two_state(0.2, 0.7);
  sol = perron_solve(b, PotentialField::constant(s, 0.4));
  CHECK(sol.lambda == doctest::Approx(0.4).epsilon(1e-12));
  CHECK(sol.F.min() == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(sol.nu.max_abs_difference(equilibrium_measure(b)) <= 1e-10);
  CHECK(eigen_equation_check(perron_solve(b, PotentialField::constant(s, 0.0)), b,
                             PotentialField::constant(s, 0.0)) == doctest::Approx(0.0).epsilon(1e-14));

  const CylinderSpace single(1, 1);
  CHECK(perron_solve(KernelField::uniform(single), PotentialField(single, {-2.5})).lambda == doctest::Approx(-2.5));
}

TEST_CASE("perron solve against a dense eigensolver") {
  CounterRng rng(23);
  for (auto [d, k] : testing::shapes()) {
    const CylinderSpace s(d, k);
    for (int rep = 0; rep < 5; ++rep) {
      const auto a = testing::random_kernel(s, rng);
      const auto V = testing::uniform_field(s, rng, -1.0, 1.0);
      const auto sol = perron_solve(a, V);
      const auto gen = GeneratorMatrix::unit_rate(a);
      const Matrix m = testing::with_potential(gen, V);
      CHECK(std::abs(sol.lambda - testing::principal_eigenvalue(m)) <= 1e-10);
      CHECK(sol.F.min() > 0.0);
      const Vector F = testing::as_vector(sol.F.values());
      CHECK((m * F - sol.lambda * F).cwiseAbs().maxCoeff() <= 1e-10);
      const Vector nu = testing::as_vector(sol.nu.mass());
      CHECK((m.transpose() * nu - sol.lambda * nu).cwiseAbs().maxCoeff() <= 1e-10);
      CHECK(std::abs(sol.lambda - sol.nu.integrate(V)) <= 1e-10);
      CHECK(eigen_equation_check(sol, a, V) <= 1e-9);

      const auto rate = testing::uniform_field(s, rng, 0.5, 2.0);
      const auto general = perron_solve(a, rate, V);
      const Matrix mg = testing::with_potential(GeneratorMatrix(rate, a), V);
      CHECK(std::abs(general.lambda - testing::principal_eigenvalue(mg)) <= 1e-10);
    }
  }
}

TEST_CASE("eigen-relations under the semigroup") {
  CounterRng rng(29);
  const CylinderSpace s(2, 2);
  const auto a = testing::random_kernel(s, rng);
  const auto V = testing::uniform_field(s, rng);
  const auto sol = perron_solve(a, V);
  const auto gen = GeneratorMatrix::unit_rate(a);
  const double T = 1.5, tol = 1e-12, growth = std::exp(sol.lambda * T);
  const auto right = uniformization_apply(gen, V, sol.F, T, tol);
  CHECK((right - sol.F * growth).sup_norm() <= 10 * tol * growth);
  const auto left = uniformization_apply_left(gen, V, sol.nu.mass(), T, tol);
  for (Word x = 0; x < s.size(); ++x) CHECK(std::abs(left[x] - growth * sol.nu[x]) <= 10 * tol * growth);
}

TEST_CASE("ratio bound for the semigroup applied to constants") {
  CounterRng rng(31);
  for (auto [d, k] : testing::shapes()) {
    const CylinderSpace s(d, k, 0.5);
    for (int rep = 0; rep < 5; ++rep) {
      const auto a = testing::random_kernel(s, rng);
      const auto V = testing::uniform_field(s, rng);
      const double ca = kernel_lipschitz_bound(a), cv = variation_profile(V).lipschitz_bound;
      const double theta = s.theta();
      for (double T : {0.5, 2.0}) {
        const auto p = uniformization_apply(GeneratorMatrix::unit_rate(a), V, PotentialField::constant(s, 1.0), T);
        for (Word x = 0; x < s.size(); ++x)
          for (Word y = 0; y < s.size(); ++y) {
            const double bound = std::exp((ca * theta + T * cv) / (1.0 - theta) * s.distance(x, y));
            CHECK(p[x] / p[y] <= bound * (1.0 + 1e-10));
          }
      }
    }
  }
}

TEST_CASE("small-time asymptotics of the log semigroup") {
  CounterRng rng(37);
  const CylinderSpace s(2, 2);
  const auto a = testing::random_kernel(s, rng);
  const auto V = testing::uniform_field(s, rng);
  const auto f = testing::uniform_field(s, rng, 0.5, 1.5);
  const auto gen = GeneratorMatrix::unit_rate(a);
  const auto lf = generator_apply(gen, f) + PotentialField::from_function(s, [&](Word x) { return V[x] * f[x]; });
  auto slope = [&](double t) {
    const auto p = uniformization_apply(gen, V, f, t, 1e-15);
    return PotentialField::from_function(s, [&](Word x) { return std::log(p[x] / f[x]) / t; });
  };
  const auto coarse = slope(1e-3), fine = slope(5e-4);
  const auto extrapolated = fine * 2.0 - coarse;
  for (Word x = 0; x < s.size(); ++x) {
    const double target = lf[x] / f[x];
    CHECK(std::abs(coarse[x] - target) <= 5e-3);
    CHECK(std::abs(extrapolated[x] - target) <= 1e-6);
  }
}

TEST_CASE("dirichlet form") {
  for (auto [p1, p2] : {std::pair{0.5, 0.5}, std::pair{0.2, 0.9}}) {
    const auto a = two_state(p1, p2);
    const auto r = dirichlet_form(a, equilibrium_measure(a), PotentialField(a.space(), {0.0, 1.0}));
    CHECK(r.energy == doctest::Approx(p1 * p2 / (p1 + p2)).epsilon(1e-12));
    CHECK(r.quadratic == doctest::Approx(r.energy).epsilon(1e-12));
  }
  CounterRng rng(41);
  for (auto [d, k] : testing::shapes()) {
    const CylinderSpace s(d, k);
    const auto a = testing::random_kernel(s, rng);
    const auto mu = equilibrium_measure(a);
    CHECK(std::abs(dirichlet_form(a, mu, PotentialField::constant(s, 3.0)).energy) <= 1e-15);
    const auto r = dirichlet_form(a, mu, testing::uniform_field(s, rng, -3.0, 3.0));
    CHECK(r.energy >= 0.0);
    CHECK(std::abs(r.quadratic - r.energy) <= 1e-12 * std::max(1.0, r.energy));
  }
  const auto a = two_state(0.3, 0.6);
  CHECK_THROWS_AS(dirichlet_form(a, Measure::uniform(a.space()), PotentialField(a.space(), {0.0, 1.0})),
                  ArgumentError);
}

TEST_CASE("adjoint and symmetrization") {
  CounterRng rng(43);
  const CylinderSpace s(2, 2);
  const auto a = testing::random_kernel(s, rng);
  const auto mu = equilibrium_measure(a);
  const auto gen = GeneratorMatrix::unit_rate(a);
  const auto pair = adjoint_and_symmetrize(gen, mu);
  const Matrix q = gen.dense();
  CHECK(pair.adjoint.rowwise().sum().cwiseAbs().maxCoeff() <= 1e-12);
  for (Eigen::Index x = 0; x < q.rows(); ++x)
    for (Eigen::Index y = 0; y < q.cols(); ++y)
      CHECK(std::abs(mu[static_cast<Word>(x)] * pair.symmetric(x, y) - mu[static_cast<Word>(y)] * pair.symmetric(y, x)) <=
            1e-13);
  // Adjoint mass flows from a word to its shift only: x -> y needs x = (b, y_1..y_{k-1}).
  for (Word x = 0; x < s.size(); ++x)
    for (Word y = 0; y < s.size(); ++y) {
      bool preimage = false;
      for (int b = 0; b < 2; ++b) preimage = preimage || s.prepend(b, y) == x;
      if (x != y && !preimage) CHECK(pair.adjoint(static_cast<Eigen::Index>(x), static_cast<Eigen::Index>(y)) == 0.0);
    }

  const auto sym = two_state(0.5, 0.5);
  const auto p = adjoint_and_symmetrize(GeneratorMatrix::unit_rate(sym), Measure::uniform(sym.space()));
  CHECK((p.symmetric - GeneratorMatrix::unit_rate(sym).dense()).cwiseAbs().maxCoeff() <= 1e-15);
  CHECK_THROWS_AS(adjoint_and_symmetrize(gen, Measure::uniform(s)), ArgumentError);
}

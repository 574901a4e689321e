#include <doctest.h>

#include <cmath>
#include <numeric>

#include "ctgibbs/errors.hpp"
#include "ctgibbs/gibbs.hpp"
#include "ctgibbs/montecarlo.hpp"
#include "support.hpp"

using namespace ctgibbs;
using testing::two_state;

namespace {

struct Moments {
  double mean = 0.0, se = 0.0;
};

Moments moments(const std::vector<double>& v) {
  const double n = static_cast<double>(v.size());
  const double mean = std::accumulate(v.begin(), v.end(), 0.0) / n;
  double ss = 0.0;
  for (double x : v) ss += (x - mean) * (x - mean);
  return {mean, std::sqrt(ss / (n - 1) / n)};
}

Trajectory hand_path(const CylinderSpace& s, std::vector<Word> states, std::vector<double> times, double T) {
  return Trajectory{s, states.front(), std::move(times), std::move(states), T};
}

}  // namespace

TEST_CASE("simulate at time zero and trajectory structure") {
  const auto a = two_state(0.4, 0.7);
  const auto& s = a.space();
  const auto one = PotentialField::constant(s, 1.0);
  const auto t0 = simulate(one, a, 1, 0.0, 3);
  CHECK(t0.jumps() == 0);
  CHECK(t0.states == std::vector<Word>{1});

  const CylinderSpace s3(3, 2);
  CounterRng rng(3);
  const auto k = testing::random_kernel(s3, rng);
  const auto traj = simulate(testing::uniform_field(s3, rng, 0.5, 2.0), k, 4, 50.0, 9);
  CHECK(traj.states.size() == traj.jumps() + 1);
  CHECK(traj.states.front() == 4);
  for (std::size_t n = 0; n < traj.jumps(); ++n) {
    if (n > 0) CHECK(traj.jump_times[n] > traj.jump_times[n - 1]);
    CHECK(traj.jump_times[n] <= 50.0);
    CHECK(traj.states[n + 1] == s3.prepend(s3.first_symbol(traj.states[n + 1]), traj.states[n]));
  }
}

TEST_CASE("simulation is seed deterministic") {
  const auto a = two_state(0.4, 0.7);
  const auto one = PotentialField::constant(a.space(), 1.0);
  const auto t1 = simulate(one, a, 0, 30.0, 42), t2 = simulate(one, a, 0, 30.0, 42), t3 = simulate(one, a, 0, 30.0, 43);
  CHECK(t1.jump_times == t2.jump_times);
  CHECK(t1.states == t2.states);
  CHECK(t1.jump_times != t3.jump_times);
}

TEST_CASE("unit clock rings at rate one") {
  const auto a = two_state(0.5, 0.5);
  const auto one = PotentialField::constant(a.space(), 1.0);
  const double T = 5.0;
  std::vector<double> counts(10000);
  for (std::size_t i = 0; i < counts.size(); ++i)
    counts[i] = static_cast<double>(simulate(one, a, 0, T, derive_seed(1, i)).jumps());
  const auto m = moments(counts);
  CHECK(std::abs(m.mean - T) <= 3 * m.se);
}

TEST_CASE("sampler law: transition frequencies and holding times") {
  const auto a = two_state(0.3, 0.65);
  const auto& s = a.space();
  const PotentialField gamma(s, {0.8, 2.5});
  // One long path with well over 1e5 events.
  const auto traj = simulate(gamma, a, 0, 120000.0, 17);
  REQUIRE(traj.jumps() >= 100000);
  std::vector<std::vector<double>> holds(2);
  std::vector<std::array<double, 2>> moves(2, {0.0, 0.0});
  double prev = 0.0;
  for (std::size_t n = 0; n < traj.jumps(); ++n) {
    const Word x = traj.states[n];
    holds[x].push_back(traj.jump_times[n] - prev);
    prev = traj.jump_times[n];
    moves[x][static_cast<std::size_t>(s.first_symbol(traj.states[n + 1]))] += 1.0;
  }
  for (Word x = 0; x < 2; ++x) {
    const auto h = moments(holds[x]);
    CHECK(std::abs(h.mean - 1.0 / gamma[x]) <= 3 * h.se);
    const double total = moves[x][0] + moves[x][1];
    const double p = a.weight(x, 1);
    CHECK(std::abs(moves[x][1] / total - p) <= 3 * std::sqrt(p * (1 - p) / total));
  }
}

TEST_CASE("empirical measure and time integral by hand") {
  const CylinderSpace s(2, 1);
  const auto still = hand_path(s, {1}, {}, 4.0);
  CHECK(empirical_measure(still)[1] == 1.0);
  const auto half = hand_path(s, {0, 1}, {2.0}, 4.0);
  CHECK(empirical_measure(half)[0] == 0.5);
  CHECK(empirical_measure(half)[1] == 0.5);
  const PotentialField f(s, {3.0, -1.0});
  CHECK(time_integral(half, f) == doctest::Approx(2.0 * 3.0 + 2.0 * -1.0));
  CHECK(time_integral(half, PotentialField::constant(s, 0.3)) == 0.3 * 4.0);
  CHECK_THROWS_AS(empirical_measure(hand_path(s, {0}, {}, 0.0)), ArgumentError);
}

TEST_CASE("occupation fractions are consistent with time integrals") {
  CounterRng rng(5);
  const CylinderSpace s(3, 2);
  const auto k = testing::random_kernel(s, rng);
  const auto traj = simulate(PotentialField::constant(s, 1.0), k, 0, 37.5, 5);
  const auto emp = empirical_measure(traj);
  CHECK(std::abs(emp.total() - 1.0) <= 1e-12);
  for (Word w = 0; w < s.size(); ++w)
    CHECK(std::abs(time_integral(traj, PotentialField::indicator(s, w)) / 37.5 - emp[w]) <= 1e-12);
}

TEST_CASE("empirical measures approach the stationary law") {
  const auto a = two_state(0.5, 0.5);
  const auto one = PotentialField::constant(a.space(), 1.0);
  std::vector<double> medians;
  for (double T : {10.0, 100.0, 1000.0}) {
    std::vector<double> tv;
    for (std::uint64_t seed = 0; seed < 100; ++seed)
      tv.push_back(empirical_measure(simulate(one, a, 0, T, derive_seed(seed, 77))).total_variation(Measure::uniform(a.space())));
    std::nth_element(tv.begin(), tv.begin() + 50, tv.end());
    medians.push_back(tv[50]);
  }
  CHECK(medians[1] < medians[0]);
  CHECK(medians[2] < medians[1]);

  std::vector<double> fractions(2000);
  for (std::size_t i = 0; i < fractions.size(); ++i)
    fractions[i] = empirical_measure(simulate(one, a, 0, 200.0, derive_seed(9, i)))[0];
  const auto m = moments(fractions);
  CHECK(std::abs(m.mean - 0.5) <= 3 * m.se);
}

TEST_CASE("radon-nikodym weights") {
  const auto a = two_state(0.5, 0.5);
  const auto& s = a.space();
  const auto base = AdmissibleCandidate::base(a);
  const auto doubled = AdmissibleCandidate::make(PotentialField::constant(s, 2.0), a);
  const auto one = PotentialField::constant(s, 1.0);
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto traj = simulate(one, a, 0, 7.0, seed);
    CHECK(log_rn(traj, a, base) == 0.0);
    CHECK(log_rn(traj, a, doubled) ==
          doctest::Approx(-7.0 + static_cast<double>(traj.jumps()) * std::log(2.0)).epsilon(1e-13));
  }
}

TEST_CASE("change of measure: the density has mean one under the base chain") {
  CounterRng rng(13);
  const CylinderSpace s(2, 2);
  const auto a = testing::random_kernel(s, rng);
  const auto cand = random_candidate(s, 21);
  const auto one = PotentialField::constant(s, 1.0);
  const double T = 2.0;
  std::vector<double> w(10000);
  for (std::size_t i = 0; i < w.size(); ++i) w[i] = std::exp(log_rn(simulate(one, a, 1, T, derive_seed(2, i)), a, cand));
  const auto m = moments(w);
  CHECK(std::abs(m.mean - 1.0) <= 3 * m.se);
}

TEST_CASE("importance sampling identity for an occupation functional") {
  CounterRng rng(15);
  const CylinderSpace s(2, 1);
  const auto a = testing::random_kernel(s, rng);
  const auto cand = random_candidate(s, 4);
  const auto one = PotentialField::constant(s, 1.0);
  const double T = 3.0;
  std::vector<double> under_base(10000), under_cand(10000);
  for (std::size_t i = 0; i < under_base.size(); ++i) {
    const auto tb = simulate(cand.gamma, cand.kernel, 0, T, derive_seed(3, i));
    // Phi = occupation of word "2"; sample under the candidate, reweight to base.
    under_base[i] = empirical_measure(tb)[1] * std::exp(-log_rn(tb, a, cand));
    under_cand[i] = empirical_measure(simulate(one, a, 0, T, derive_seed(4, i)))[1];
  }
  const auto mb = moments(under_base), mc = moments(under_cand);
  CHECK(std::abs(mb.mean - mc.mean) <= 3 * std::hypot(mb.se, mc.se));
}

TEST_CASE("scgf estimator trivial cases and accuracy") {
  const auto a = two_state(0.5, 0.5);
  const auto& s = a.space();
  CHECK(mc_scgf(a, PotentialField::constant(s, 0.0), 10.0, 50, 1).estimate == 0.0);
  const auto c = mc_scgf(a, PotentialField::constant(s, 0.37), 13.0, 50, 1);
  CHECK(c.estimate == 0.37);
  CHECK(c.std_error == 0.0);
  const PotentialField V(s, {0.0, 1.0});
  const double T = 50.0;
  const auto plain = mc_scgf(a, V, T, 4000, 3);
  const auto is = mc_scgf(a, V, T, 4000, 3, ScgfSampler::gibbs_importance);
  const double exact = finite_horizon_scgf(a, V, T);
  CHECK(std::abs(is.estimate - exact) <= 3 * is.std_error + 1e-12);
  CHECK(std::abs(exact - std::sqrt(0.5)) <= 0.01);
  CHECK(std::abs(plain.estimate - exact) <= 0.1);
  CHECK_THROWS_AS(mc_scgf(a, V, 0.0, 10, 1), ArgumentError);
  CHECK_THROWS_AS(mc_scgf(a, V, 1.0, 1, 1), ArgumentError);
}

TEST_CASE("finite horizon scgf against the matrix exponential") {
  CounterRng rng(19);
  const CylinderSpace s(2, 2);
  const auto a = testing::random_kernel(s, rng);
  const auto V = testing::uniform_field(s, rng);
  const double T = 3.0;
  const auto u = testing::expm_apply(GeneratorMatrix::unit_rate(a), V, PotentialField::constant(s, 1.0), T);
  const double oracle = std::log(testing::as_vector(equilibrium_measure(a).mass()).dot(u)) / T;
  CHECK(finite_horizon_scgf(a, V, T) == doctest::Approx(oracle).epsilon(1e-12));
}

TEST_CASE("entropy estimator") {
  const auto a = two_state(0.5, 0.5);
  const auto& s = a.space();
  const auto base = mc_entropy(a, AdmissibleCandidate::base(a), 20.0, 100, 1);
  CHECK(base.estimate == 0.0);
  CHECK(base.std_error == 0.0);
  const auto doubled = AdmissibleCandidate::make(PotentialField::constant(s, 2.0), a);
  const auto e = mc_entropy(a, doubled, 50.0, 2000, 2);
  CHECK(std::abs(e.estimate - (1.0 - 2.0 * std::log(2.0))) <= 4 * e.std_error + 1e-3);
  const auto gibbs = build_gibbs(a, PotentialField(s, {0.0, 1.0})).candidate();
  const auto g = mc_entropy(a, gibbs, 50.0, 2000, 3);
  CHECK(std::abs(g.estimate - relative_entropy(gibbs, a)) <= 0.02);
}

TEST_CASE("martingale identity") {
  const auto a = two_state(0.5, 0.5);
  const auto& s = a.space();
  const auto base = AdmissibleCandidate::base(a);
  const auto unit = martingale_check(base, PotentialField::constant(s, 1.0), 10.0, 2000, 1);
  CHECK(unit.compensator.estimate == doctest::Approx(10.0));
  CHECK(std::abs(unit.jump_sum.estimate - 10.0) <= 3 * unit.jump_sum.std_error);
  const auto zero = martingale_check(base, PotentialField::constant(s, 0.0), 10.0, 200, 1);
  CHECK(zero.jump_sum.estimate == 0.0);
  CHECK(zero.compensator.estimate == 0.0);
  const auto gibbs = build_gibbs(a, PotentialField(s, {0.0, 1.0})).candidate();
  const auto r = martingale_check(gibbs, PotentialField(s, {1.0, 0.0}), 20.0, 10000, 5);
  CHECK(r.within_3se);
}

TEST_CASE("annealing ladder") {
  const auto a = two_state(0.5, 0.5);
  const auto& s = a.space();
  const auto r = anneal(a, PotentialField(s, {0.0, 1.0}), {0.0, 1.0, 10.0}, 20.0, 500, 8);
  REQUIRE(r.stages.size() == 3);
  CHECK(r.argmax == std::vector<Word>{1});
  CHECK_FALSE(r.degenerate);
  CHECK(r.stages[0].analytic_mass == doctest::Approx(0.5));
  CHECK(r.stages[1].analytic_mass == doctest::Approx(0.853553).epsilon(1e-6));
  CHECK(r.stages[2].analytic_mass == doctest::Approx(0.997519).epsilon(1e-6));
  CHECK(r.stages[2].lambda == doctest::Approx((9.0 + std::sqrt(101.0)) / 2).epsilon(1e-10));
  CHECK(r.stages[2].gap == doctest::Approx(r.stages[2].lambda - 10.0));
  for (const auto& st : r.stages)
    CHECK(std::abs(st.empirical_mass.estimate - st.analytic_mass) <= 4 * st.empirical_mass.std_error + 1e-12);

  const CylinderSpace s2(2, 2);
  const auto tie = anneal(KernelField::uniform(s2), PotentialField::first_symbols(s2, std::vector<double>{0.0, 1.0}),
                          {0.0, 4.0}, 5.0, 50, 1);
  CHECK(tie.degenerate);
  CHECK(tie.argmax.size() == 2);
  CHECK_THROWS_AS(anneal(a, PotentialField(s, {0.0, 1.0}), {1.0, 1.0}, 5.0, 10, 1), ArgumentError);
}

#include <doctest.h>

#include <random>

#include "oracles.hpp"
#include "rotortrack/errors.hpp"
#include "rotortrack/propagation.hpp"

using namespace rotortrack;

namespace {

Track zero_track(double T) {
  return function_track([](double) { return TrackPoint{0.0, 0.0}; }, T);
}

SimParams params(double dt, double T) {
  SimParams p;
  p.dt = dt;
  p.duration = T;
  return p;
}

}  // namespace

TEST_CASE("free evolution of basis states") {
  const BasisSpec b(4);
  for (int m : {0, 1, -2, 3}) {
    const RotorState s = step(RotorState::basis_state(b, m), FieldSample{0, 0, 0}, 0.3);
    CHECK(std::abs(s.amplitude(m) - std::polar(1.0, -0.3 * m * m)) < 1e-14);
    CHECK(s.populations()[b.index_of(m)] == doctest::Approx(1.0).epsilon(1e-14));
  }
}

TEST_CASE("step matches the dense matrix exponential") {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(-30.0, 30.0);
  for (int big_m : {1, 2, 5, 16}) {
    const BasisSpec b(big_m);
    Propagator prop(b);
    for (int k = 0; k < 20; ++k) {
      const double ex = u(rng);
      const double ey = k % 5 == 0 ? 0.0 : u(rng);
      const double dt = 0.05 * (k + 1);
      const oracle::Vector psi0 = oracle::random_state(big_m, rng, big_m);
      const oracle::Vector expected = oracle::expm_propagator(oracle::field_hamiltonian(big_m, ex, ey), dt) * psi0;
      ComplexVector psi = psi0;
      prop.advance(psi, ex, ey, dt);
      CHECK((psi - expected).cwiseAbs().maxCoeff() < 1e-11);
    }
  }
}

TEST_CASE("step is unitary to 1e-13") {
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> u(-50.0, 50.0);
  const BasisSpec b(16);
  Propagator prop(b);
  double worst = 0.0;
  for (int k = 0; k < 2000; ++k) {
    ComplexVector psi = oracle::random_state(16, rng, 16);
    prop.advance(psi, u(rng), u(rng), 1e-3 * (1 + k % 7));
    worst = std::max(worst, std::abs(psi.norm() - 1.0));
  }
  CHECK(worst < 1e-13);
}

TEST_CASE("norm preserved over a million steps") {
  const BasisSpec b(3);
  Propagator prop(b);
  ComplexVector psi = RotorState::basis_state(b, 0).coeffs();
  for (int k = 0; k < 1000000; ++k) {
    const double t = 1e-4 * k;
    prop.advance(psi, 0.8 * std::sin(0.7 * t), 0.5 * std::cos(1.3 * t), 1e-4);
  }
  CHECK(std::abs(psi.norm() - 1.0) < 1e-10);
}

TEST_CASE("step rejects non-finite input") {
  const RotorState s = RotorState::basis_state(BasisSpec(2), 0);
  CHECK_THROWS_AS(step(s, FieldSample{0, std::nan(""), 0}, 0.1), NonFinite);
  CHECK_THROWS_AS(step(s, FieldSample{0, 0, 0}, INFINITY), NonFinite);
}

TEST_CASE("SimParams validation and grid") {
  CHECK_THROWS_AS(params(0.0, 1.0).validate(), InvalidArgument);
  CHECK_THROWS_AS(params(2.0, 1.0).validate(), InvalidArgument);
  SimParams p = params(0.3, 1.0);
  CHECK(p.step_count() == 4);
  CHECK(p.effective_dt() == doctest::Approx(0.25));
  p.midpoint_iters = -1;
  CHECK_THROWS_AS(p.validate(), InvalidArgument);
  p.midpoint_iters = 9;
  CHECK_THROWS_AS(p.validate(), InvalidArgument);
  CHECK(params(1e-4, 50.0).effective_stride() == 26);
}

TEST_CASE("origin track keeps the ground state at rest") {
  const RotorState g = RotorState::basis_state(BasisSpec(6), 0);
  const SimulationRecord r = run_tracking(g, zero_track(10.0), GuardConfig{}, params(1e-3, 10.0));
  CHECK(r.fields.size() == 10001);
  for (const FieldSample& f : r.fields) {
    CHECK(std::abs(f.eps_x) < 1e-10);
    CHECK(std::abs(f.eps_y) < 1e-10);
  }
  CHECK(r.samples.back().populations[6] > 1 - 1e-6);
  CHECK(r.max_deviation() < 1e-12);
}

TEST_CASE("tracking a Gaussian pulse") {
  const Track tr = gaussian_track(0.6, 10.0);
  const RotorState g = RotorState::basis_state(BasisSpec(10), 0);
  const SimulationRecord hold = run_tracking(g, tr, GuardConfig{}, params(1e-3, 10.0));
  SimParams mp = params(1e-3, 10.0);
  mp.midpoint_iters = 3;
  const SimulationRecord mid = run_tracking(g, tr, GuardConfig{}, mp);
  CHECK(hold.max_deviation() < 1e-2);
  CHECK(mid.max_deviation() < hold.max_deviation() / 10);
  for (const RecordSample& s : mid.samples) {
    CHECK(std::abs(s.norm - 1.0) < 1e-8);
    CHECK(s.determinant > GuardConfig{}.d_min);
    CHECK(s.margin > GuardConfig{}.margin_min);
    CHECK(std::abs(s.ox - s.ox_d) <= mid.max_deviation_x);
  }
  CHECK(mid.samples.front().t == 0.0);
  CHECK(mid.samples.back().t == 10.0);
}

TEST_CASE("tracking is deterministic") {
  const Track tr = gaussian_track(0.6, 20.0);
  const RotorState g = RotorState::basis_state(BasisSpec(8), 0);
  const SimulationRecord a = run_tracking(g, tr, GuardConfig{}, params(2e-3, 20.0));
  const SimulationRecord b = run_tracking(g, tr, GuardConfig{}, params(2e-3, 20.0));
  REQUIRE(a.fields.size() == b.fields.size());
  for (std::size_t i = 0; i < a.fields.size(); ++i) {
    CHECK(a.fields[i].eps_x == b.fields[i].eps_x);
    CHECK(a.fields[i].eps_y == b.fields[i].eps_y);
  }
}

TEST_CASE("track heading for the unit circle trips the guard with a partial record") {
  // x_d reaches 1 at t = 2; with margin_min = 0.5 the guard trips once <cos>^2 > 0.5
  const Track tr = function_track([](double t) { return TrackPoint{0.25 * t * t, 0.0}; }, 4.0);
  const RotorState g = RotorState::basis_state(BasisSpec(24), 0);
  GuardConfig guard;
  guard.margin_min = 0.5;
  try {
    run_tracking(g, tr, guard, params(1e-3, 4.0));
    FAIL("expected SingularityGuard");
  } catch (const SingularityGuard& e) {
    CHECK(e.reason() == SingularityGuard::Reason::kMargin);
    CHECK(e.t() > 1.5);
    CHECK(e.t() < 2.0);
    REQUIRE(e.partial_record());
    const SimulationRecord& r = *e.partial_record();
    CHECK(!r.samples.empty());
    CHECK(r.samples.back().t <= e.t());
    for (const FieldSample& f : r.fields) {
      CHECK(std::isfinite(f.eps_x));
      CHECK(std::isfinite(f.eps_y));
    }
  }
}

TEST_CASE("small basis leaks") {
  const Track tr = gaussian_track(0.9, 50.0);
  const RotorState g = RotorState::basis_state(BasisSpec(2), 0);
  try {
    run_tracking(g, tr, GuardConfig{}, params(1e-3, 50.0));
    FAIL("expected BasisLeakage");
  } catch (const BasisLeakage& e) {
    CHECK(e.edge_population() > 1e-6);
    REQUIRE(e.partial_record());
    CHECK(e.partial_record()->samples.back().t <= e.t());
  }
}

TEST_CASE("strict consistency rejects an inconsistent start") {
  const Track off = function_track([](double) { return TrackPoint{0.3, 0.0}; }, 1.0);
  SimParams p = params(1e-2, 1.0);
  const RotorState g = RotorState::basis_state(BasisSpec(4), 0);
  p.consistency = ConsistencyMode::kStrict;
  CHECK_THROWS_AS(run_tracking(g, off, GuardConfig{}, p), InvalidArgument);
  p.consistency = ConsistencyMode::kWarn;
  const SimulationRecord r = run_tracking(g, off, GuardConfig{}, p);
  CHECK(r.warnings.size() == 1);
  CHECK_THROWS_AS(run_tracking(g, off, GuardConfig{}, params(1e-2, 2.0)), InvalidArgument);
}

TEST_CASE("replay of recorded fields reproduces the run") {
  const Track tr = gaussian_track(0.7, 20.0);
  const RotorState g = RotorState::basis_state(BasisSpec(10), 0);
  for (int iters : {0, 2}) {
    SimParams p = params(2e-3, 20.0);
    p.midpoint_iters = iters;
    const SimulationRecord run = run_tracking(g, tr, GuardConfig{}, p);
    const SimulationRecord rep = run_replay(g, run.fields, p, FieldInterpolation::kHold, &tr);
    REQUIRE(rep.samples.size() == run.samples.size());
    double worst = 0.0;
    for (std::size_t i = 0; i < run.samples.size(); ++i) {
      worst = std::max({worst, std::abs(rep.samples[i].ox - run.samples[i].ox),
                        std::abs(rep.samples[i].oy - run.samples[i].oy)});
    }
    CHECK(worst < 1e-9);
    CHECK(rep.max_deviation() == doctest::Approx(run.max_deviation()).epsilon(1e-6));
  }
}

TEST_CASE("replay of zero fields from the ground state") {
  std::vector<FieldSample> zeros;
  for (int k = 0; k <= 100; ++k) zeros.push_back({0.05 * k, 0.0, 0.0});
  const SimulationRecord r =
      run_replay(RotorState::basis_state(BasisSpec(3), 0), zeros, params(0.05, 5.0), FieldInterpolation::kLinear);
  for (const RecordSample& s : r.samples) {
    CHECK(s.ox == 0.0);
    CHECK(s.oy == 0.0);
  }
  CHECK_FALSE(r.has_designated);
}

TEST_CASE("linear interpolation of a constant series equals hold") {
  std::vector<FieldSample> c;
  for (int k = 0; k <= 20; ++k) c.push_back({0.1 * k, 0.4, -0.2});
  const RotorState g = RotorState::basis_state(BasisSpec(4), 0);
  const SimulationRecord a = run_replay(g, c, params(0.01, 2.0), FieldInterpolation::kHold);
  const SimulationRecord b = run_replay(g, c, params(0.01, 2.0), FieldInterpolation::kLinear);
  CHECK(a.samples.back().ox == doctest::Approx(b.samples.back().ox).epsilon(1e-14));
}

TEST_CASE("replay grid checks") {
  const RotorState g = RotorState::basis_state(BasisSpec(3), 0);
  std::vector<FieldSample> s;
  for (int k = 0; k <= 10; ++k) s.push_back({0.1 * k, 0.0, 0.0});
  CHECK_THROWS_AS(run_replay(g, s, params(0.1, 2.0)), GridMismatch);  // ends early
  std::vector<FieldSample> gap = s;
  gap[5].t = 0.55;
  CHECK_THROWS_AS(run_replay(g, gap, params(0.1, 1.0)), GridMismatch);
  std::vector<FieldSample> late(s.begin() + 1, s.end());
  CHECK_THROWS_AS(run_replay(g, late, params(0.1, 1.0)), GridMismatch);
  std::vector<FieldSample> nan = s;
  nan[3].eps_x = std::nan("");
  CHECK_THROWS_AS(run_replay(g, nan, params(0.1, 1.0)), NonFinite);
  CHECK_NOTHROW(run_replay(g, s, params(0.1, 1.0)));
}

TEST_CASE("filter_fields keeps the grid") {
  std::vector<FieldSample> s;
  for (int k = 0; k <= 200; ++k) s.push_back({0.01 * k, std::sin(0.5 * k), 1.0});
  const auto f = filter_fields(s, 1.0);
  REQUIRE(f.size() == s.size());
  CHECK(f[17].t == s[17].t);
  CHECK(f[17].eps_y == doctest::Approx(1.0).epsilon(1e-12));
}

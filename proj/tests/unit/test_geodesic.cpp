#include "bp/error.hpp"
#include "bp/geodesic.hpp"
#include "bp/manifold.hpp"
#include "bp/sampling.hpp"

#include <doctest.h>

#include <cmath>
#include <string>
#include <vector>

using namespace bp;

namespace {

ManifoldSpec custom3d() {
  const std::vector<std::string> e{"1 + 0.2*x2^2", "0.1*sin(x3)", "0", "exp(0.3*x1)", "0", "1 + 0.1*x1^2 + 0.05*x2*x3"};
  return ManifoldSpec::custom(3, e, ChartDomain::box(Vec::Constant(3, -1.5), Vec::Constant(3, 1.5)));
}

Vec unit_at(const ManifoldSpec& m, const Vec& x, Vec v) {
  const Mat g = metric_at(m, {x});
  return v / std::sqrt(inner(g, v, v));
}

// Stereographic sphere of radius 1/k, written out independently of the library.
struct StereoSphere {
  double k;
  int n;
  Eigen::VectorXd embed(const Vec& x) const {
    const double s = k * k * x.squaredNorm();
    Eigen::VectorXd X(n + 1);
    X.head(n) = 2.0 * x / (1.0 + s);
    X[n] = (s - 1.0) / (k * (1.0 + s));
    return X;
  }
  // Differential of embed applied to a chart vector, by central differences.
  Eigen::VectorXd push(const Vec& x, const Vec& v) const {
    const double h = 1e-6;
    return (embed(x + h * v) - embed(x - h * v)) / (2 * h);
  }
  Vec chart(const Eigen::VectorXd& X) const {
    // Inverse stereographic projection from the north pole (0, ..., 1/k).
    const Eigen::VectorXd Y = k * X;
    return Y.head(n) / (k * (1.0 - Y[n]));
  }
};

}  // namespace

TEST_CASE("exp map: Euclidean is a straight line") {
  const ManifoldSpec m = ManifoldSpec::euclidean(3);
  Rng rng(1);
  for (int s = 0; s < 20; ++s) {
    const Vec z = random_in_ball(rng, 3, 2.0), v = random_in_ball(rng, 3, 1.5);
    const double t = rng.uniform(0.1, 3.0);
    const ChartPoint x = exp_map(m, {z}, {{z}, v}, t);
    CHECK((x.coords - (z + t * v)).norm() <= 1e-12);
  }
}

TEST_CASE("exp map: great circles on the sphere") {
  Rng rng(2);
  for (double k : {0.5, 1.0, 2.0}) {
    const ManifoldSpec m = ManifoldSpec::sphere(3, k);
    const StereoSphere S{k, 3};
    // From the chart origin the distance along a ray is 2 atan(k|x|)/k.
    for (int s = 0; s < 10; ++s) {
      const Vec v = unit_at(m, Vec::Zero(3), random_unit(rng, 3));
      const double r = rng.uniform(0.05, 1.2) / k;
      const ChartPoint x = exp_map(m, {Vec::Zero(3)}, {{Vec::Zero(3)}, v}, r);
      CHECK(std::abs(x.coords.norm() - std::tan(k * r / 2) / k) <= 1e-9 / k);
      CHECK((x.coords.normalized() - v.normalized()).norm() <= 1e-12);
    }
    // From an arbitrary base point, compare with X(t) = cos(kt) X0 + sin(kt) V0 / k.
    for (int s = 0; s < 10; ++s) {
      const Vec z = random_in_ball(rng, 3, 1.0 / k);
      const Vec v = unit_at(m, z, random_unit(rng, 3));
      const double t = rng.uniform(0.1, 1.2) / k;
      const Eigen::VectorXd X = std::cos(k * t) * S.embed(z) + std::sin(k * t) * S.push(z, v) / k;
      const ChartPoint x = exp_map(m, {z}, {{z}, v}, t);
      // Steps are per unit arc length, so larger k means coarser steps relative to the curvature scale.
      CHECK((x.coords - S.chart(X)).norm() <= 1e-7 / k);
    }
  }
}

TEST_CASE("exp map: hyperbolic radius from the center of the ball") {
  Rng rng(3);
  for (double k : {0.5, 1.0, 2.0}) {
    const ManifoldSpec m = ManifoldSpec::hyperbolic(2, k);
    for (int s = 0; s < 10; ++s) {
      const Vec v = unit_at(m, Vec::Zero(2), random_unit(rng, 2));
      const double t = rng.uniform(0.05, 2.0) / k;
      const ChartPoint x = exp_map(m, {Vec::Zero(2)}, {{Vec::Zero(2)}, v}, t);
      CHECK(std::abs(x.coords.norm() - std::tanh(k * t / 2) / k) <= 1e-9 / k);
    }
  }
}

TEST_CASE("geodesic flow: speed is conserved") {
  Rng rng(4);
  const std::vector<ManifoldSpec> all{ManifoldSpec::sphere(2, 1.0), ManifoldSpec::hyperbolic(3, 1.0), custom3d()};
  for (const ManifoldSpec& m : all) {
    for (int s = 0; s < 10; ++s) {
      const Vec z = random_in_ball(rng, m.dim(), 0.3);
      const Vec v = unit_at(m, z, random_unit(rng, m.dim()));
      const double t = 1.0;
      const FlowResult f = integrate_flow(m, z, v, t, {}, {});
      CHECK(f.speed_drift <= 1e-8 * t);
      const Mat g = metric_at(m, f.end.position);
      CHECK(std::abs(std::sqrt(inner(g, f.end.velocity, f.end.velocity)) - 1.0) <= 1e-8 * t);
    }
  }
}

TEST_CASE("parallel transport") {
  Rng rng(5);
  SUBCASE("Euclidean components are constant") {
    const ManifoldSpec m = ManifoldSpec::euclidean(3);
    const Vec z = random_in_ball(rng, 3, 1.0), v = random_unit(rng, 3), u = random_in_ball(rng, 3, 1.0);
    const TangentVector V = parallel_transport(m, {{z}, v, 0.0}, u, 2.0);
    CHECK((V.components - u).norm() <= 1e-14);
  }
  SUBCASE("geodesics are self-parallel") {
    for (const ManifoldSpec& m : {ManifoldSpec::sphere(3, 1.0), ManifoldSpec::hyperbolic(2, 2.0)}) {
      const Vec z = random_in_ball(rng, m.dim(), 0.2);
      const Vec v = unit_at(m, z, random_unit(rng, m.dim()));
      const FlowResult f = integrate_flow(m, z, v, 0.5, std::vector<Vec>{v}, {});
      CHECK((f.transported[0] - f.end.velocity).norm() <= 1e-9);
    }
  }
  SUBCASE("quarter great circle keeps the angle with the velocity") {
    const ManifoldSpec m = ManifoldSpec::sphere(2, 1.0);
    const Vec z = Vec::Zero(2);
    const Vec v = unit_at(m, z, Vec::Unit(2, 0));
    const Vec u = unit_at(m, z, Vec(Vec::Unit(2, 0) + Vec::Unit(2, 1)));
    const Mat g0 = metric_at(m, {z});
    const double c0 = inner(g0, u, v);
    for (double t : {0.3, 0.9, M_PI / 2}) {
      const FlowResult f = integrate_flow(m, z, v, t, std::vector<Vec>{u}, {});
      const Mat g = metric_at(m, f.end.position);
      CHECK(std::abs(inner(g, f.transported[0], f.end.velocity) - c0) <= 1e-8);
      CHECK(std::abs(inner(g, f.transported[0], f.transported[0]) - 1.0) <= 1e-8);
    }
  }
  SUBCASE("transported frames stay orthonormal") {
    const std::vector<ManifoldSpec> all{ManifoldSpec::sphere(3, 1.0), ManifoldSpec::hyperbolic(3, 1.0), custom3d()};
    for (const ManifoldSpec& m : all) {
      const int n = m.dim();
      const Vec z = random_in_ball(rng, n, 0.2);
      const OrthonormalFrame E = orthonormal_frame(m, {z});
      const Vec v = E.vector(0);
      std::vector<Vec> frame;
      for (int a = 0; a < n; ++a) frame.push_back(E.vector(a));
      const double t = 1.0;
      const FlowResult f = integrate_flow(m, z, v, t, frame, {});
      const Mat g = metric_at(m, f.end.position);
      for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b)
          CHECK(std::abs(inner(g, f.transported[a], f.transported[b]) - (a == b ? 1.0 : 0.0)) <= 1e-8 * t);
    }
  }
}

TEST_CASE("jacobi fields: constant curvature closed forms") {
  Rng rng(6);
  const ManifoldSpec e = ManifoldSpec::euclidean(3);
  const Vec v = random_unit(rng, 3);
  const JacobiState je = jacobi_field(e, {{Vec::Zero(3)}, random_unit(rng, 3), 0.0}, Vec::Zero(3), v, 1.7);
  CHECK((je.value.components - 1.7 * v).norm() <= 1e-13);

  for (double k : {0.5, 1.0, 2.0}) {
    for (int sign : {-1, 1}) {
      const ManifoldSpec m = sign < 0 ? ManifoldSpec::hyperbolic(3, k) : ManifoldSpec::sphere(3, k);
      const Vec z = random_in_ball(rng, 3, 0.2 / k);
      const OrthonormalFrame E = orthonormal_frame(m, {z});
      const Vec vel = E.vector(0), normal = E.vector(1);
      const double t = 1.0 / k;
      const FlowResult f = integrate_flow(m, z, vel, t, std::vector<Vec>{normal},
                                          std::vector<JacobiInit>{{Vec::Zero(3), normal}, {normal, Vec::Zero(3)}});
      const double s = sign < 0 ? std::sinh(k * t) / k : std::sin(k * t) / k;
      const double c = sign < 0 ? std::cosh(k * t) : std::cos(k * t);
      const Mat g = metric_at(m, f.end.position);
      auto gnorm = [&](const Vec& w) { return std::sqrt(inner(g, w, w)); };
      CHECK(gnorm(f.jacobi[0] - s * f.transported[0]) <= 1e-8);
      CHECK(gnorm(f.jacobi[1] - c * f.transported[0]) <= 1e-8);
    }
  }
}

TEST_CASE("jacobi fields: linearity and conserved pairing") {
  Rng rng(7);
  const ManifoldSpec m = custom3d();
  for (int s = 0; s < 10; ++s) {
    const Vec z = random_in_ball(rng, 3, 0.3);
    const Vec v = unit_at(m, z, random_unit(rng, 3));
    const Vec a0 = random_in_ball(rng, 3, 1), a1 = random_in_ball(rng, 3, 1);
    const Vec b0 = random_in_ball(rng, 3, 1), b1 = random_in_ball(rng, 3, 1);
    const double alpha = rng.uniform(-2, 2), beta = rng.uniform(-2, 2);
    const GeodesicState start{{z}, v, 0.0};
    const double t = 0.9;
    const JacobiState A = jacobi_field(m, start, a0, a1, t);
    const JacobiState B = jacobi_field(m, start, b0, b1, t);
    const JacobiState C = jacobi_field(m, start, alpha * a0 + beta * b0, alpha * a1 + beta * b1, t);
    CHECK((C.value.components - alpha * A.value.components - beta * B.value.components).norm() <= 1e-10);
    CHECK((C.derivative - alpha * A.derivative - beta * B.derivative).norm() <= 1e-10);

    // <γ', J>(t) = <γ', J'(0)> t + <γ', J(0)>
    const FlowResult f = integrate_flow(m, z, v, t, {}, std::vector<JacobiInit>{{a0, a1}});
    const Mat g0 = metric_at(m, {z}), g = metric_at(m, f.end.position);
    const double expect = inner(g0, v, a1) * t + inner(g0, v, a0);
    CHECK(std::abs(inner(g, f.end.velocity, f.jacobi[0]) - expect) <= 1e-8);
  }
}

TEST_CASE("rk4: fourth order on the sphere") {
  const double k = 1.0;
  const ManifoldSpec m = ManifoldSpec::sphere(2, k);
  const StereoSphere S{k, 2};
  const Vec z = (Vec(2) << 0.3, -0.2).finished();
  const Vec v = unit_at(m, z, (Vec(2) << 0.6, 0.8).finished());
  const double t = 1.0;
  const Eigen::VectorXd X = std::cos(k * t) * S.embed(z) + std::sin(k * t) * S.push(z, v) / k;
  const Vec exact = S.chart(X);
  auto err = [&](int steps) {
    IntegratorConfig cfg;
    cfg.fixed_steps = steps;
    return (exp_map(m, {z}, {{z}, v}, t, cfg).coords - exact).norm();
  };
  const double ratio = err(8) / err(16);
  CHECK(ratio >= 12.0);
  CHECK(ratio <= 20.0);
}

TEST_CASE("geodesic flow: errors") {
  const ManifoldSpec h = ManifoldSpec::hyperbolic(2, 1.0);
  const Vec o = Vec::Zero(2);
  const Vec v = unit_at(h, o, Vec::Unit(2, 0));
  try {
    exp_map(h, {o}, {{o}, v}, 10.0);
    FAIL("expected LeftChartDomain");
  } catch (const LeftChartDomain& e) {
    // The chart ends at |x| = 0.99, i.e. distance 2 atanh(0.99).
    CHECK(std::abs(e.exit_time() - 2 * std::atanh(0.99)) <= 0.05);
  }
  IntegratorConfig tiny;
  tiny.max_steps = 10;
  try {
    exp_map(h, {o}, {{o}, v}, 1.0, tiny);
    FAIL("expected StepCountOverflow");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::StepCountOverflow);
  }
  IntegratorConfig strict;
  strict.fixed_steps = 2;
  strict.tolerance = 1e-15;
  try {
    exp_map(h, {o}, {{o}, v}, 2.5, strict);
    FAIL("expected IntegratorDrift");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::IntegratorDrift);
  }
  CHECK_THROWS_AS(exp_map(h, {Vec::Constant(2, 0.8)}, {{o}, v}, 0.1), Error);
}

TEST_CASE("step counts") {
  IntegratorConfig cfg;
  CHECK(step_count(0.0, cfg) == cfg.min_steps);
  CHECK(step_count(1.0, cfg) == 256);
  CHECK(step_count(0.5, cfg) == 128);
  cfg.fixed_steps = 40;
  CHECK(step_count(3.0, cfg) == 40);
}

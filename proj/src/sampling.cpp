// SPDX-License-Identifier: Apache-2.0
#include "bp/sampling.hpp"

#include "bp/error.hpp"

#include <charconv>
#include <cmath>
#include <numbers>
#include <string>

namespace bp {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

Rng::Rng(std::uint64_t seed, std::uint64_t stream, std::uint64_t substream)
    : engine_(splitmix64(splitmix64(splitmix64(seed) ^ stream) ^ substream)) {}

double Rng::uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

double Rng::normal() {
  if (has_spare_) {
    has_spare_ = false;
    return spare_;
  }
  double u1 = uniform();
  while (u1 <= 0.0) u1 = uniform();
  const double u2 = uniform();
  const double rad = std::sqrt(-2.0 * std::log(u1));
  const double ang = 2.0 * std::numbers::pi * u2;
  spare_ = rad * std::sin(ang);
  has_spare_ = true;
  return rad * std::cos(ang);
}

Vec random_unit(Rng& rng, int d) {
  Vec v(d);
  double norm = 0.0;
  do {
    for (int i = 0; i < d; ++i) v[i] = rng.normal();
    norm = v.norm();
  } while (norm < 1e-12);
  return v / norm;
}

Vec random_in_ball(Rng& rng, int d, double radius) {
  return random_unit(rng, d) * radius * std::pow(rng.uniform(), 1.0 / d);
}

Vec from_frame(const OrthonormalFrame& frame, const Vec& coords) { return frame.vectors * coords; }

std::vector<Vec> regular_simplex(int d) {
  // Centered standard basis of R^{d+1}, expressed in an orthonormal basis of 1⊥.
  const int D = d + 1;
  MatX P = MatX::Identity(D, D) - MatX::Constant(D, D, 1.0 / D);
  MatX basis(D, d);
  int found = 0;
  for (int c = 0; c < D && found < d; ++c) {
    VecX w = P.col(c);
    for (int q = 0; q < found; ++q) w -= w.dot(basis.col(q)) * basis.col(q);
    if (w.norm() < 1e-9) continue;
    basis.col(found++) = w.normalized();
  }
  std::vector<Vec> out;
  for (int i = 0; i < D; ++i) {
    const VecX c = basis.transpose() * P.col(i);
    out.push_back(Vec(c.normalized()));
  }
  return out;
}

namespace {

std::vector<Vec> orthant_vectors(int d, int count) {
  std::vector<Vec> even, odd;
  for (int mask = 0; mask < (1 << d); ++mask) {
    Vec s(d);
    int minus = 0;
    for (int i = 0; i < d; ++i) {
      const bool neg = (mask >> i) & 1;
      s[i] = neg ? -1.0 : 1.0;
      minus += neg;
    }
    s /= std::sqrt(static_cast<double>(d));
    (minus % 2 == 0 ? even : odd).push_back(s);
  }
  even.insert(even.end(), odd.begin(), odd.end());
  if (static_cast<int>(even.size()) < count) throw Error(Errc::InvalidConfiguration, "not enough orthant vectors");
  even.resize(static_cast<std::size_t>(count));
  return even;
}

Vec embed(const Vec& c, int n) {
  Vec out = Vec::Zero(n);
  out.head(c.size()) = c;
  return out;
}

std::vector<Vec> parse_explicit(std::string_view spec, int n) {
  std::vector<Vec> out;
  std::size_t start = 0;
  while (start <= spec.size()) {
    const std::size_t end = std::min(spec.find(';', start), spec.size());
    const std::string_view item = spec.substr(start, end - start);
    std::vector<double> vals;
    std::size_t p = 0;
    while (p <= item.size()) {
      const std::size_t q = std::min(item.find(',', p), item.size());
      std::string tok(item.substr(p, q - p));
      while (!tok.empty() && tok.front() == ' ') tok.erase(tok.begin());
      while (!tok.empty() && tok.back() == ' ') tok.pop_back();
      double x = 0.0;
      const auto res = std::from_chars(tok.data(), tok.data() + tok.size(), x);
      if (tok.empty() || res.ec != std::errc() || res.ptr != tok.data() + tok.size() || !std::isfinite(x))
        throw Error(Errc::InvalidConfiguration, "cannot parse direction component '" + tok + "'");
      vals.push_back(x);
      p = q + 1;
    }
    if (static_cast<int>(vals.size()) != n)
      throw Error(Errc::InvalidConfiguration, "direction '" + std::string(item) + "' needs " + std::to_string(n) +
                                                  " components");
    Vec v = Eigen::Map<const Vec>(vals.data(), n);
    if (v.norm() < 1e-12) throw Error(Errc::InvalidConfiguration, "zero direction vector");
    out.push_back(v.normalized());
    start = end + 1;
  }
  return out;
}

}  // namespace

std::vector<Vec> preset_directions(std::string_view spec, BPMode mode, int n) {
  const int count = direction_count(mode, n);
  if (spec == "equilateral" || spec == "orthants") {
    const bool eq = spec == "equilateral";
    switch (mode) {
      case BPMode::Full: return eq ? regular_simplex(n) : orthant_vectors(n, n + 1);
      case BPMode::Antipodal: return {eq ? Vec(Vec::Unit(n, 0)) : orthant_vectors(n, 1)[0]};
      case BPMode::Hyperplane: {
        std::vector<Vec> us = eq ? regular_simplex(n - 1) : orthant_vectors(n - 1, n);
        std::vector<Vec> out;
        for (const Vec& u : us) out.push_back(embed(u, n));
        out.push_back(Vec::Unit(n, n - 1));
        return out;
      }
    }
  }
  if (spec.substr(0, 7) == "random:") {
    std::uint64_t seed = 0;
    const std::string_view digits = spec.substr(7);
    const auto res = std::from_chars(digits.data(), digits.data() + digits.size(), seed);
    if (digits.empty() || res.ec != std::errc() || res.ptr != digits.data() + digits.size())
      throw Error(Errc::InvalidConfiguration, "random preset needs an unsigned seed, e.g. random:7");
    Rng rng(seed, 0x64697273ULL);
    std::vector<Vec> out;
    if (mode != BPMode::Hyperplane) {
      for (int i = 0; i < count; ++i) out.push_back(random_unit(rng, n));
      return out;
    }
    const Vec v = random_unit(rng, n);
    for (int i = 0; i < n; ++i) {
      Vec u = random_unit(rng, n);
      u -= u.dot(v) * v;
      out.push_back(u.normalized());
    }
    out.push_back(v);
    return out;
  }
  std::vector<Vec> out = parse_explicit(spec, n);
  if (static_cast<int>(out.size()) != count)
    throw Error(Errc::InvalidConfiguration, std::string(to_string(mode)) + " mode needs " + std::to_string(count) +
                                                " directions, got " + std::to_string(out.size()));
  return out;
}

std::vector<Vec> directions_at(const ManifoldSpec& m, const ChartPoint& z, const std::vector<Vec>& frame_coords) {
  const OrthonormalFrame E = orthonormal_frame(m, z);
  std::vector<Vec> out;
  for (const Vec& c : frame_coords) {
    if (c.size() != m.dim()) throw Error(Errc::DimensionMismatch, "direction has the wrong dimension");
    out.push_back(from_frame(E, c));
  }
  return out;
}

BPConfiguration random_configuration(const ManifoldSpec& m, BPMode mode, Rng& rng, const RandomConfigOptions& opt) {
  const int n = m.dim();
  BPConfiguration cfg;
  cfg.mode = mode;
  const Vec center = opt.z_center.size() == n ? opt.z_center : Vec(Vec::Zero(n));
  for (int attempt = 0; attempt < 1000; ++attempt) {
    cfg.r = rng.uniform(opt.r_min, opt.r_max);
    Vec z(n);
    if (opt.z_in_box) {
      for (int i = 0; i < n; ++i) z[i] = center[i] + rng.uniform(-opt.z_radius, opt.z_radius);
    } else {
      z = center + random_in_ball(rng, n, opt.z_radius);
    }
    cfg.z.coords = z;
    std::vector<Vec> coords;
    if (mode == BPMode::Hyperplane) {
      const Vec v = random_unit(rng, n);
      for (int i = 0; i < n; ++i) {
        Vec u = random_unit(rng, n);
        u -= u.dot(v) * v;
        coords.push_back(u.normalized());
      }
      coords.push_back(v);
    } else {
      for (int i = 0; i < direction_count(mode, n); ++i) coords.push_back(random_unit(rng, n));
    }
    double vol = 2.0;
    if (mode == BPMode::Full) {
      vol = simplex_volume(coords);
    } else if (mode == BPMode::Hyperplane) {
      // Volume within v⊥: rotate v to the last axis.
      const Vec& v = coords.back();
      MatX Q = MatX::Identity(n, n);
      const Vec target = Vec::Unit(n, n - 1);
      const Vec w = v - target;
      if (w.norm() > 1e-12) Q -= 2.0 * w * w.transpose() / w.squaredNorm();
      std::vector<Vec> flat;
      for (int i = 0; i < n; ++i) flat.push_back(Vec((Q * coords[static_cast<std::size_t>(i)]).head(n - 1)));
      vol = simplex_volume(flat);
    }
    if (vol < opt.min_simplex_volume) continue;
    cfg.directions = directions_at(m, cfg.z, coords);
    return cfg;
  }
  throw Error(Errc::InvalidConfiguration, "could not sample a non-degenerate configuration");
}

}  // namespace bp

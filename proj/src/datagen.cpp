#include "mgsr/datagen.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <fstream>
#include <random>

#include "mgsr/error.hpp"
#include "mgsr/spectral.hpp"

namespace mgsr {

namespace {

using Spectrum = std::vector<std::complex<double>>;

Grid ddx(const Grid& g) {
  const int n = g.n();
  const double inv = 0.5 / g.h();
  Grid out(n, g.h());
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) out(i, j) = (g(i, j == n - 1 ? 0 : j + 1) - g(i, j == 0 ? n - 1 : j - 1)) * inv;
  return out;
}

Grid ddy(const Grid& g) {
  const int n = g.n();
  const double inv = 0.5 / g.h();
  Grid out(n, g.h());
  for (int i = 0; i < n; ++i) {
    const int up = i == 0 ? n - 1 : i - 1;
    const int down = i == n - 1 ? 0 : i + 1;
    for (int j = 0; j < n; ++j) out(i, j) = (g(down, j) - g(up, j)) * inv;
  }
  return out;
}

// Centred-difference symbol sin(2 pi k / n) / h per index; zero at Nyquist.
std::vector<double> centred_symbol(const FourierTransform2D& fft, int count, double h) {
  const int n = fft.n();
  std::vector<double> s(count);
  for (int k = 0; k < count; ++k) {
    s[k] = (k == n / 2) ? 0.0 : std::sin(2.0 * std::numbers::pi * k / n) / h;
  }
  return s;
}

void project_pair(Grid& a, Grid& b) {
  const int n = a.n();
  const double h = a.h();
  const FourierTransform2D& fft = cached_transform(n);
  const int half = fft.half();
  const auto sy = centred_symbol(fft, n, h);
  const auto sx = centred_symbol(fft, half, h);
  Spectrum ah = fft.forward(a);
  Spectrum bh = fft.forward(b);
  for (int r = 0; r < n; ++r) {
    for (int c = 0; c < half; ++c) {
      const double S = sx[c] * sx[c] + sy[r] * sy[r];
      if (S == 0.0) continue;
      const std::size_t k = static_cast<std::size_t>(r) * half + c;
      const std::complex<double> d = sx[c] * ah[k] + sy[r] * bh[k];
      ah[k] -= sx[c] * d / S;
      bh[k] -= sy[r] * d / S;
    }
  }
  a = fft.inverse(std::move(ah), h);
  b = fft.inverse(std::move(bh), h);
}

// nu lap(u) - (u . grad) u, both components.
std::pair<Grid, Grid> momentum_rhs(const VelocityField& vel) {
  Grid au = laplacian(vel.u) * vel.nu;
  Grid av = laplacian(vel.v) * vel.nu;
  const Grid ux = ddx(vel.u), uy = ddy(vel.u);
  const Grid vx = ddx(vel.v), vy = ddy(vel.v);
  auto au_v = au.values();
  auto av_v = av.values();
  const auto u = vel.u.values();
  const auto v = vel.v.values();
  for (std::size_t k = 0; k < au_v.size(); ++k) {
    au_v[k] -= u[k] * ux.values()[k] + v[k] * uy.values()[k];
    av_v[k] -= u[k] * vx.values()[k] + v[k] * vy.values()[k];
  }
  return {std::move(au), std::move(av)};
}

double max_speed(const VelocityField& vel) {
  double m = 0.0;
  const auto u = vel.u.values();
  const auto v = vel.v.values();
  for (std::size_t k = 0; k < u.size(); ++k) m = std::max(m, std::hypot(u[k], v[k]));
  return m;
}

// One SSP-RK3 step of du/dt = P[nu lap u - (u . grad) u].
void rk3_step(VelocityField& vel, double dt) {
  auto tendency = [](const VelocityField& s) {
    auto [a, b] = momentum_rhs(s);
    project_pair(a, b);
    return std::make_pair(std::move(a), std::move(b));
  };
  const VelocityField u0 = vel;

  auto [k1u, k1v] = tendency(u0);
  VelocityField u1{u0.u + dt * k1u, u0.v + dt * k1v, u0.nu};

  auto [k2u, k2v] = tendency(u1);
  VelocityField u2{0.75 * u0.u + 0.25 * (u1.u + dt * k2u), 0.75 * u0.v + 0.25 * (u1.v + dt * k2v), u0.nu};

  auto [k3u, k3v] = tendency(u2);
  vel.u = (1.0 / 3.0) * u0.u + (2.0 / 3.0) * (u2.u + dt * k3u);
  vel.v = (1.0 / 3.0) * u0.v + (2.0 / 3.0) * (u2.v + dt * k3v);
  project_divergence_free(vel);
}

}  // namespace

Grid divergence(const VelocityField& vel) { return ddx(vel.u) + ddy(vel.v); }

double relative_divergence(const VelocityField& vel) {
  const double speed = std::hypot(norm(vel.u), norm(vel.v));
  if (speed == 0.0) return 0.0;
  return norm(divergence(vel)) * vel.h() / speed;
}

double kinetic_energy(const VelocityField& vel) {
  double sum = 0.0;
  const auto u = vel.u.values();
  const auto v = vel.v.values();
  for (std::size_t k = 0; k < u.size(); ++k) sum += u[k] * u[k] + v[k] * v[k];
  return 0.5 * sum / static_cast<double>(u.size());
}

void project_divergence_free(VelocityField& vel) { project_pair(vel.u, vel.v); }

VelocityField init_broadband_velocity(int n, std::uint64_t seed, int k_peak, double nu, double length) {
  if (n < 16 || n % 2 != 0) throw ShapeError("init_broadband_velocity: n must be even and >= 16");
  if (k_peak < 1) throw ConfigError("init_broadband_velocity: k_peak must be positive");
  const double h = length / n;
  const FourierTransform2D& fft = cached_transform(n);
  const int half = fft.half();

  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> phase(0.0, 2.0 * std::numbers::pi);
  Spectrum psi(static_cast<std::size_t>(n) * half);
  for (int r = 0; r < n; ++r) {
    for (int c = 0; c < half; ++c) {
      const double theta = phase(rng);
      const int ky = fft.wavenumber(r);
      if (r == n / 2 || c == n / 2) continue;
      const double k = std::hypot(static_cast<double>(c), static_cast<double>(ky));
      if (k == 0.0) continue;
      const double energy = std::pow(k, 4) * std::exp(-2.0 * (k / k_peak) * (k / k_peak));
      const double amp = std::sqrt(energy / (std::numbers::pi * k * k * k));
      psi[static_cast<std::size_t>(r) * half + c] = std::polar(amp, theta);
    }
  }
  const Grid stream = fft.inverse(std::move(psi), h);

  // u = d(psi)/dy, v = -d(psi)/dx with centred-difference symbols.
  const auto sy = centred_symbol(fft, n, h);
  const auto sx = centred_symbol(fft, half, h);
  const Spectrum ph = fft.forward(stream);
  Spectrum uh(ph.size()), vh(ph.size());
  const std::complex<double> I(0.0, 1.0);
  for (int r = 0; r < n; ++r) {
    for (int c = 0; c < half; ++c) {
      const std::size_t k = static_cast<std::size_t>(r) * half + c;
      uh[k] = I * sy[r] * ph[k];
      vh[k] = -I * sx[c] * ph[k];
    }
  }
  VelocityField vel{fft.inverse(std::move(uh), h), fft.inverse(std::move(vh), h), nu};
  project_divergence_free(vel);
  const double rms = std::sqrt(kinetic_energy(vel));  // per-component RMS
  if (rms == 0.0) throw NumericalError("init_broadband_velocity: zero field");
  vel.u *= 1.0 / rms;
  vel.v *= 1.0 / rms;
  return vel;
}

VelocityField taylor_green(int n, double nu) {
  const double h = 2.0 * std::numbers::pi / n;
  Grid u(n, h), v(n, h);
  for (int i = 0; i < n; ++i) {
    const double y = i * h;
    for (int j = 0; j < n; ++j) {
      const double x = j * h;
      u(i, j) = std::sin(x) * std::cos(y);
      v(i, j) = -std::cos(x) * std::sin(y);
    }
  }
  return {std::move(u), std::move(v), nu};
}

double energy_fraction_in_band(const VelocityField& vel, int k_lo, int k_hi) {
  const int n = vel.n();
  const FourierTransform2D& fft = cached_transform(n);
  const int half = fft.half();
  const Spectrum uh = fft.forward(vel.u);
  const Spectrum vh = fft.forward(vel.v);
  double total = 0.0, band = 0.0;
  for (int r = 0; r < n; ++r) {
    for (int c = 0; c < half; ++c) {
      const std::size_t k = static_cast<std::size_t>(r) * half + c;
      const double weight = (c == 0 || c == n / 2) ? 1.0 : 2.0;
      const double e = weight * (std::norm(uh[k]) + std::norm(vh[k]));
      const long shell = std::lround(std::hypot(static_cast<double>(c), static_cast<double>(fft.wavenumber(r))));
      total += e;
      if (shell >= k_lo && shell <= k_hi) band += e;
    }
  }
  return total > 0.0 ? band / total : 0.0;
}

Grid compute_source(const VelocityField& vel) {
  auto [a, b] = momentum_rhs(vel);
  return subtract_mean(ddx(a) + ddy(b));
}

std::vector<Snapshot> evolve(VelocityField& vel, const EvolveOptions& options, const PressureSolver& solver) {
  if (options.steps < 0) throw ConfigError("evolve: negative step count");
  if (!(options.cfl > 0.0) || options.cfl > 0.5) throw ConfigError("evolve: cfl must be in (0, 0.5]");
  std::vector<Snapshot> snapshots;
  double t = 0.0;
  for (int step = 1; step <= options.steps; ++step) {
    const double speed = max_speed(vel);
    double dt = options.dt;
    if (dt > 0.0) {
      if (speed > 0.0 && dt > 0.5 * vel.h() / speed) {
        throw ConfigError("evolve: dt violates the advective bound 0.5 h / max|u|");
      }
    } else {
      if (speed == 0.0) throw ConfigError("evolve: adaptive dt needs a non-zero velocity");
      dt = options.cfl * vel.h() / speed;
    }
    rk3_step(vel, dt);
    t += dt;
    if (!vel.u.all_finite() || !vel.v.all_finite()) {
      throw DivergenceError("evolve: non-finite velocity at step " + std::to_string(step));
    }
    if (options.on_step) options.on_step(step, t, vel);
    if (options.snapshot_every > 0 && step % options.snapshot_every == 0) {
      Grid f = compute_source(vel);
      Grid p = solver(f);
      snapshots.push_back({std::move(p), std::move(f), step, t});
    }
  }
  return snapshots;
}

std::filesystem::path field_path(const std::filesystem::path& dir, int id, char kind) {
  return dir / ("field_" + std::to_string(id) + "_" + kind + ".pgrd");
}

nlohmann::json generate_fields(const DatagenOptions& options, const std::filesystem::path& out_dir) {
  if (options.fields < 1) throw ConfigError("datagen: need at least one field");
  if (!(options.heldout_fraction >= 0.0 && options.heldout_fraction < 1.0)) {
    throw ConfigError("datagen: heldout fraction must be in [0, 1)");
  }
  std::filesystem::create_directories(out_dir);
  VelocityField vel = init_broadband_velocity(options.n, options.seed, options.k_peak, options.nu);

  EvolveOptions evo;
  evo.cfl = options.cfl;
  evo.steps = options.fields * options.snapshot_every;
  evo.snapshot_every = options.snapshot_every;
  const auto snaps = evolve(vel, evo, fft_poisson_solve);

  const int heldout = static_cast<int>(std::lround(options.fields * options.heldout_fraction));
  nlohmann::json train = nlohmann::json::array(), held = nlohmann::json::array(), fields = nlohmann::json::array();
  for (int id = 0; id < static_cast<int>(snaps.size()); ++id) {
    write_pgrd(snaps[id].pressure, field_path(out_dir, id, 'p'));
    write_pgrd(snaps[id].source, field_path(out_dir, id, 'f'));
    fields.push_back({{"id", id}, {"step", snaps[id].step}, {"time", snaps[id].time}});
    (id < options.fields - heldout ? train : held).push_back(id);
  }
  nlohmann::json manifest = {{"format_version", 1},
                             {"n", options.n},
                             {"count", options.fields},
                             {"seed", options.seed},
                             {"k_peak", options.k_peak},
                             {"nu", options.nu},
                             {"cfl", options.cfl},
                             {"snapshot_every", options.snapshot_every},
                             {"fields", fields},
                             {"split", {{"train", train}, {"heldout", held}}}};
  std::ofstream os(out_dir / "fields.json");
  if (!os) throw IoError("cannot write " + (out_dir / "fields.json").string());
  os << manifest.dump(2) << '\n';
  return manifest;
}

std::vector<int> manifest_field_ids(const nlohmann::json& manifest, const std::string& split) {
  std::vector<int> ids;
  if (split == "all") {
    for (const auto& f : manifest.at("fields")) ids.push_back(f.at("id").get<int>());
  } else if (split == "train" || split == "heldout") {
    for (const auto& id : manifest.at("split").at(split)) ids.push_back(id.get<int>());
  } else {
    throw ConfigError("unknown split '" + split + "'");
  }
  return ids;
}

}  // namespace mgsr

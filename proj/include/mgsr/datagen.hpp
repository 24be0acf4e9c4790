#pragma once

// Pressure/source corpus from 2-D decaying turbulence.
//
// Velocities live on the same collocated biperiodic lattice as the solver
// grids. Spatial operators are second-order centred differences; the
// projection onto discretely divergence-free fields is exact (done in
// Fourier space with the centred-difference symbols). Time integration is
// third-order strong-stability-preserving Runge-Kutta.

#include <cstdint>
#include <filesystem>
#include <functional>
#include <numbers>
#include <vector>

#include <json.hpp>

#include "mgsr/grid.hpp"

namespace mgsr {

struct VelocityField {
  Grid u;  ///< x-velocity (varies along columns j)
  Grid v;  ///< y-velocity (varies along rows i)
  double nu = 1e-3;

  int n() const { return u.n(); }
  double h() const { return u.h(); }
};

/// Centred-difference divergence du/dx + dv/dy.
Grid divergence(const VelocityField& vel);
/// norm(div) * h / norm(u, v); dimensionless.
double relative_divergence(const VelocityField& vel);
/// 0.5 * mean(u^2 + v^2).
double kinetic_energy(const VelocityField& vel);
/// Removes the discretely divergent part of (u, v) in place.
void project_divergence_free(VelocityField& vel);

/// Random solenoidal field with shell spectrum E(k) ~ k^4 exp(-2 (k/k_peak)^2)
/// on the domain [0, length)^2, per-component RMS velocity 1.
VelocityField init_broadband_velocity(int n, std::uint64_t seed, int k_peak, double nu = 1e-3,
                                      double length = 2.0 * std::numbers::pi);

/// u = sin x cos y, v = -cos x sin y on [0, 2 pi)^2.
VelocityField taylor_green(int n, double nu);

/// Fraction of kinetic energy in integer shells k_lo <= round(|k|) <= k_hi
/// (wavenumbers in units of 2 pi / length).
double energy_fraction_in_band(const VelocityField& vel, int k_lo, int k_hi);

/// f = div(nu lap(u) - (u . grad) u) with centred differences, mean removed.
Grid compute_source(const VelocityField& vel);

using PressureSolver = std::function<Grid(const Grid&)>;

struct Snapshot {
  Grid pressure;
  Grid source;
  int step = 0;
  double time = 0.0;
};

struct EvolveOptions {
  double cfl = 0.5;          ///< dt = cfl * h / max|u| when dt == 0
  double dt = 0.0;           ///< fixed step; must satisfy the advective bound
  int steps = 0;
  int snapshot_every = 20;   ///< 0 disables snapshots
  std::function<void(int step, double time, const VelocityField&)> on_step;
};

/// Advances `vel` in place. Snapshots are (solver(f), f) pairs with f from
/// compute_source, taken after every `snapshot_every` steps. Throws
/// ConfigError if a fixed dt violates dt <= 0.5 h / max|u|, DivergenceError
/// on non-finite velocities.
std::vector<Snapshot> evolve(VelocityField& vel, const EvolveOptions& options, const PressureSolver& solver);

struct DatagenOptions {
  int n = 192;
  int fields = 200;
  std::uint64_t seed = 0;
  int k_peak = 4;
  double nu = 1e-3;
  double cfl = 0.5;
  int snapshot_every = 20;
  double heldout_fraction = 0.5;  ///< trailing field ids reserved for benchmarking
};

/// Runs one trajectory and writes field_{id}_p.pgrd / field_{id}_f.pgrd plus
/// fields.json into `out_dir`. Returns the manifest.
nlohmann::json generate_fields(const DatagenOptions& options, const std::filesystem::path& out_dir);

/// Reads fields.json; ids of the "train" or "heldout" split, or all ids.
std::vector<int> manifest_field_ids(const nlohmann::json& manifest, const std::string& split);

std::filesystem::path field_path(const std::filesystem::path& dir, int id, char kind);

}  // namespace mgsr

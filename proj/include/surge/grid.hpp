#pragma once

// Yee lattice, material storage and the E/H leapfrog kernels.
//
// Staggering (indices are integer lattice nodes, all arrays share one
// (nx+1)(ny+1)(nz+1) node-indexed layout, unused tails stay zero):
//   Ex(i,j,k) at (i+1/2, j, k)      Hx(i,j,k) at (i, j+1/2, k+1/2)
//   Ey(i,j,k) at (i, j+1/2, k)      Hy(i,j,k) at (i+1/2, j, k+1/2)
//   Ez(i,j,k) at (i, j, k+1/2)      Hz(i,j,k) at (i+1/2, j+1/2, k)
//
// The absorbing layer wraps the interior volume: interior node 0 sits at
// lattice node `pml` on every axis. The outermost lattice faces are PEC.

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace surge {

class CpmlState;

enum class Axis : int { x = 0, y = 1, z = 2 };

inline constexpr int axis_index(Axis a) { return static_cast<int>(a); }

struct Vec3 {
  double x = 0, y = 0, z = 0;
  double operator[](int a) const { return a == 0 ? x : (a == 1 ? y : z); }
  double& operator[](int a) { return a == 0 ? x : (a == 1 ? y : z); }
  bool operator==(const Vec3&) const = default;
};

struct Box {
  Vec3 lo, hi;
};

// Integer lattice node.
struct Node {
  int i = 0, j = 0, k = 0;
  int operator[](int a) const { return a == 0 ? i : (a == 1 ? j : k); }
  int& operator[](int a) { return a == 0 ? i : (a == 1 ? j : k); }
  bool operator==(const Node&) const = default;
};

// One E edge: axis, lower node, and +1/-1 for the direction the user wrote
// it in (start -> end along +axis or -axis).
struct EdgeRef {
  int axis = 0;
  Node lower;
  int sign = 1;
};

struct GridSpec {
  int nx = 0, ny = 0, nz = 0;  // interior cells
  double delta = 0;            // cubic cell edge, m
  double dt = 0;               // s
  long n_steps = 0;
};

// Stability bound cfl * delta / (c sqrt 3). Throws ParameterError unless
// delta > 0 and 0 < cfl <= 1.
double courant_dt(double delta, double cfl);

// Validates the GridSpec invariants against a requested simulated time.
void check_grid_spec(const GridSpec& g, double calctime);

struct Lattice {
  int nx = 0, ny = 0, nz = 0;  // total cells, absorbing layer included
  int pml = 0;
  double delta = 0;

  Lattice() = default;
  Lattice(int interior_nx, int interior_ny, int interior_nz, double delta, int pml_cells);

  int interior(int axis) const { return cells(axis) - 2 * pml; }
  int cells(int axis) const { return axis == 0 ? nx : (axis == 1 ? ny : nz); }
  std::size_t stride_i() const { return std::size_t(ny + 1) * std::size_t(nz + 1); }
  std::size_t stride_j() const { return std::size_t(nz + 1); }
  std::size_t nodes() const { return std::size_t(nx + 1) * stride_i(); }
  std::size_t index(int i, int j, int k) const {
    return std::size_t(i) * stride_i() + std::size_t(j) * stride_j() + std::size_t(k);
  }
  // Lattice node nearest to an interior-frame coordinate (meters) along `axis`.
  double to_lattice(int axis, double meters) const;
  // True when (i,j,k) is a valid index for a component directed along `axis`
  // (E edge when electric, H face otherwise) and not on the outer PEC wall.
  bool is_updated_e(int axis, int i, int j, int k) const;
};

using Field = std::vector<double>;

struct FieldSet {
  Field ex, ey, ez, hx, hy, hz;

  FieldSet() = default;
  explicit FieldSet(const Lattice& lat);

  Field& e(int axis) { return axis == 0 ? ex : (axis == 1 ? ey : ez); }
  const Field& e(int axis) const { return axis == 0 ? ex : (axis == 1 ? ey : ez); }
  Field& h(int axis) { return axis == 0 ? hx : (axis == 1 ? hy : hz); }
  const Field& h(int axis) const { return axis == 0 ? hx : (axis == 1 ? hy : hz); }
};

// Per-edge eps/sigma and per-face mu. debye holds an index into the medium
// table of the run, -1 for non-dispersive edges.
struct MaterialMap {
  Lattice lattice;
  std::array<std::vector<double>, 3> eps, sigma, mu;
  std::array<std::vector<std::int16_t>, 3> debye;

  MaterialMap() = default;
  explicit MaterialMap(const Lattice& lat);  // vacuum everywhere
};

// Paints every E edge whose midpoint (clamped into the interior volume, so
// absorbing layers continue the adjacent material) lies in the closed box.
// Boxes with zero extent along any axis paint nothing.
void paint_block(MaterialMap& map, const Box& box, double eps_r, double sigma,
                 int debye_id = -1);

// Explicit update coefficients. cb and ch are pre-divided by delta so the
// kernels work on raw neighbour differences.
struct UpdateCoefficients {
  Lattice lattice;
  double dt = 0;
  std::array<std::vector<double>, 3> ca, cb, ch;
  // Kernel view: per-edge / per-face index into tables of distinct values.
  // Entry 0 of the E tables is the inert (0, 0) pair. Empty when there are
  // too many distinct values, in which case the kernels read ca/cb/ch.
  std::array<std::vector<std::uint16_t>, 3> e_id, h_id;
  std::array<std::vector<double>, 3> ta, tb, th;
};

// Rebuilds the indexed kernel view from ca/cb/ch.
void index_coefficients(UpdateCoefficients& c);

// eps_extra[id] is added to the permittivity of edges tagged with Debye
// medium id (the ADE instantaneous term); may be empty.
UpdateCoefficients build_coefficients(const MaterialMap& map, double dt,
                                      std::span<const double> eps_extra = {});

// Pins an E edge to zero for every subsequent step (PEC wire or plate).
void force_edge(UpdateCoefficients& c, int axis, std::size_t index);

// H from n-1/2 to n+1/2.
void step_h(FieldSet& f, const UpdateCoefficients& c, CpmlState* cpml = nullptr);
// E from n to n+1 (curl and loss terms only; sources and dispersion are
// layered on by the caller).
void step_e(FieldSet& f, const UpdateCoefficients& c, CpmlState* cpml = nullptr);

// Diagnostics used by tests and the acceptance suite.
double max_abs_divergence_h(const FieldSet& f, const Lattice& lat);
double max_abs(const Field& v);
// Leapfrog-invariant energy 1/2 sum eps E^n.E^n + 1/2 sum mu H^{n+1/2}.H^{n-1/2}
// (per unit cell volume); constant in lossless closed cavities.
double discrete_energy(const FieldSet& f, const FieldSet& h_prev, const MaterialMap& map);
bool all_finite(const FieldSet& f);

}  // namespace surge

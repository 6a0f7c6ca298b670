#pragma once

// Sub-cell conductors. A wire pins the E edges along its path to zero and
// rescales the surrounding ring of transverse E edges (eps, sigma times m)
// and circumferential H faces (mu divided by m), with
//   m = ln(delta / r0) / ln(delta / r),
// r0 being the radius a bare chain of zeroed edges already represents.

#include <array>
#include <span>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "surge/grid.hpp"

namespace surge {

enum class WireModel { thin, staircase };

struct WireSegment {
  WireModel model = WireModel::thin;
  Vec3 start, end;  // interior-frame meters
  double radius = 0;
  bool terminal = false;  // end point feeds a source / probe gap
  int line = 0;
};

inline constexpr double kStaircaseIntrinsicRadius = 0.23;  // fraction of delta
inline constexpr double kThinIntrinsicRadius = 0.23;       // fraction of delta

double intrinsic_radius(WireModel model, double delta);
double wire_scale_factor(double delta, double r0, double r);

// Courant reduction sqrt-argument for a set of wires: min(1, m_min) * min(1, 1/m_max).
double wire_stability_factor(std::span<const WireSegment> wires, double delta);

struct WireEmbedding {
  std::array<std::unordered_set<std::size_t>, 3> forced;
  std::array<std::unordered_map<std::size_t, double>, 3> e_scale, h_scale;
  std::vector<Node> terminals;  // lattice nodes of terminal-flagged wire ends
  std::vector<Node> ends;       // every wire end node

  bool is_forced(int axis, std::size_t index) const { return forced[axis].count(index) > 0; }
  bool empty() const;
};

// Minimal axis-aligned path between two lattice nodes, stepping along the
// axis that lags furthest behind the straight line (ties: x, y, z).
std::vector<Node> staircase_path(Node from, Node to);

// Both throw ValidationError (with seg.line) on invalid geometry.
void embed_wire_grid_aligned(WireEmbedding& w, const Lattice& lat, const WireSegment& seg);
void embed_wire_staircase(WireEmbedding& w, const Lattice& lat, const WireSegment& seg);
void embed_wire(WireEmbedding& w, const Lattice& lat, const WireSegment& seg);

// Applies the radius scaling to the material map; forced edges are left
// to apply_forced_edges.
void apply_wire_embedding(MaterialMap& map, const WireEmbedding& w);
void apply_forced_edges(UpdateCoefficients& c, const WireEmbedding& w);

}  // namespace surge

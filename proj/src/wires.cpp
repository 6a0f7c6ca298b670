#include "surge/wires.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "surge/errors.hpp"

namespace surge {

double intrinsic_radius(WireModel model, double delta) {
  return (model == WireModel::thin ? kThinIntrinsicRadius : kStaircaseIntrinsicRadius) * delta;
}

double wire_scale_factor(double delta, double r0, double r) {
  if (!(r > 0) || !(r < delta)) throw ParameterError("wire radius must lie in (0, delta)");
  if (std::abs(r - r0) <= 1e-9 * delta) return 1.0;
  return std::log(delta / r0) / std::log(delta / r);
}

double wire_stability_factor(std::span<const WireSegment> wires, double delta) {
  double lo = 1, hi = 1;
  for (const auto& w : wires) {
    const double m = wire_scale_factor(delta, intrinsic_radius(w.model, delta), w.radius);
    lo = std::min(lo, m);
    hi = std::max(hi, m);
  }
  return lo / hi;
}

bool WireEmbedding::empty() const {
  for (int a = 0; a < 3; ++a)
    if (!forced[a].empty() || !e_scale[a].empty() || !h_scale[a].empty()) return false;
  return true;
}

std::vector<Node> staircase_path(Node from, Node to) {
  int n[3], dir[3], done[3] = {0, 0, 0};
  int total = 0;
  for (int a = 0; a < 3; ++a) {
    const int d = to[a] - from[a];
    n[a] = std::abs(d);
    dir[a] = d >= 0 ? 1 : -1;
    total += n[a];
  }
  std::vector<Node> path{from};
  Node cur = from;
  for (int s = 0; s < total; ++s) {
    int best = -1;
    double best_frac = 0;
    for (int a = 0; a < 3; ++a) {
      if (done[a] >= n[a]) continue;
      const double frac = (done[a] + 0.5) / n[a];
      if (best < 0 || frac < best_frac) {
        best = a;
        best_frac = frac;
      }
    }
    cur[best] += dir[best];
    ++done[best];
    path.push_back(cur);
  }
  return path;
}

namespace {

[[noreturn]] void fail(const WireSegment& seg, const std::string& msg) {
  throw ValidationError(seg.line, "wire: " + msg);
}

void check_common(const Lattice& lat, const WireSegment& seg) {
  if (!(seg.radius > 0)) fail(seg, "radius must be positive");
  if (!(seg.radius < 0.5 * lat.delta)) fail(seg, "radius must be below half a cell");
  const double tol = lat.delta / 100;
  for (const Vec3& p : {seg.start, seg.end})
    for (int a = 0; a < 3; ++a)
      if (p[a] < -tol || p[a] > lat.interior(a) * lat.delta + tol)
        fail(seg, "end point lies outside the interior volume");
}

Node to_node(const Lattice& lat, const Vec3& p) {
  Node n;
  for (int a = 0; a < 3; ++a) n[a] = static_cast<int>(std::lround(lat.to_lattice(a, p[a])));
  return n;
}

// Prolongs a path whose end sits on an interior face, running normal to it,
// straight through the absorbing layer to the PEC wall.
void extend_to_walls(const Lattice& lat, std::vector<Node>& path) {
  if (lat.pml == 0 || path.size() < 2) return;
  auto extend = [&](Node end, Node prev, std::vector<Node>& out) {
    for (int a = 0; a < 3; ++a) {
      const int step = end[a] - prev[a];
      if (step == 0) continue;
      const int face = step > 0 ? lat.cells(a) - lat.pml : lat.pml;
      const int wall = step > 0 ? lat.cells(a) : 0;
      if (end[a] != face) continue;
      Node n = end;
      while (n[a] != wall) {
        n[a] += step;
        out.push_back(n);
      }
    }
  };
  std::vector<Node> tail, head;
  extend(path.back(), path[path.size() - 2], tail);
  extend(path.front(), path[1], head);
  std::vector<Node> full(head.rbegin(), head.rend());
  full.insert(full.end(), path.begin(), path.end());
  full.insert(full.end(), tail.begin(), tail.end());
  path = std::move(full);
}

void embed_path(WireEmbedding& w, const Lattice& lat, const std::vector<Node>& path, double m) {
  auto in_lattice = [&](const Node& n) {
    return n.i >= 0 && n.j >= 0 && n.k >= 0 && n.i <= lat.nx && n.j <= lat.ny && n.k <= lat.nz;
  };
  auto idx = [&](const Node& n) { return lat.index(n.i, n.j, n.k); };
  for (std::size_t s = 0; s + 1 < path.size(); ++s) {
    const Node p = path[s], q = path[s + 1];
    int a = 0;
    while (p[a] == q[a]) ++a;
    Node lo = p;
    lo[a] = std::min(p[a], q[a]);
    w.forced[a].insert(idx(lo));
    // Transverse E edges leaving both end nodes of this edge.
    for (const Node& n : {p, q})
      for (int b = 0; b < 3; ++b) {
        if (b == a) continue;
        Node minus = n;
        minus[b] -= 1;
        if (n[b] < lat.cells(b)) w.e_scale[b][idx(n)] = m;
        if (in_lattice(minus)) w.e_scale[b][idx(minus)] = m;
      }
    // Circumferential H faces around the edge.
    for (int b = 0; b < 3; ++b) {
      if (b == a) continue;
      const int c = 3 - a - b;
      Node h0 = lo, h1 = lo;
      h1[c] -= 1;
      if (lo[c] < lat.cells(c)) w.h_scale[b][idx(h0)] = m;
      if (in_lattice(h1)) w.h_scale[b][idx(h1)] = m;
    }
  }
}

void record_ends(WireEmbedding& w, const Lattice& lat, const WireSegment& seg) {
  const Node a = to_node(lat, seg.start), b = to_node(lat, seg.end);
  w.ends.push_back(a);
  w.ends.push_back(b);
  if (seg.terminal) w.terminals.push_back(b);
}

}  // namespace

void embed_wire_grid_aligned(WireEmbedding& w, const Lattice& lat, const WireSegment& seg) {
  check_common(lat, seg);
  const double tol = lat.delta / 100;
  int moving = 0;
  for (int a = 0; a < 3; ++a) {
    for (const Vec3& p : {seg.start, seg.end}) {
      const double cells = p[a] / lat.delta;
      if (std::abs(cells - std::round(cells)) * lat.delta > tol) fail(seg, "end point is off the grid");
    }
    if (std::abs(seg.end[a] - seg.start[a]) > tol) ++moving;
  }
  if (moving != 1) fail(seg, "thin wires must run along exactly one axis");
  std::vector<Node> path = staircase_path(to_node(lat, seg.start), to_node(lat, seg.end));
  extend_to_walls(lat, path);
  const double m = wire_scale_factor(lat.delta, intrinsic_radius(WireModel::thin, lat.delta), seg.radius);
  embed_path(w, lat, path, m);
  record_ends(w, lat, seg);
}

void embed_wire_staircase(WireEmbedding& w, const Lattice& lat, const WireSegment& seg) {
  check_common(lat, seg);
  const Node a = to_node(lat, seg.start), b = to_node(lat, seg.end);
  if (a == b) fail(seg, "segment collapses to a single node");
  std::vector<Node> path = staircase_path(a, b);
  extend_to_walls(lat, path);
  const double m =
      wire_scale_factor(lat.delta, intrinsic_radius(WireModel::staircase, lat.delta), seg.radius);
  embed_path(w, lat, path, m);
  record_ends(w, lat, seg);
}

void embed_wire(WireEmbedding& w, const Lattice& lat, const WireSegment& seg) {
  if (seg.model == WireModel::thin)
    embed_wire_grid_aligned(w, lat, seg);
  else
    embed_wire_staircase(w, lat, seg);
}

void apply_wire_embedding(MaterialMap& map, const WireEmbedding& w) {
  for (int a = 0; a < 3; ++a) {
    for (const auto& [id, m] : w.e_scale[a]) {
      map.eps[a][id] *= m;
      map.sigma[a][id] *= m;
    }
    for (const auto& [id, m] : w.h_scale[a]) map.mu[a][id] /= m;
  }
}

void apply_forced_edges(UpdateCoefficients& c, const WireEmbedding& w) {
  for (int a = 0; a < 3; ++a)
    for (std::size_t id : w.forced[a]) force_edge(c, a, id);
}

}  // namespace surge

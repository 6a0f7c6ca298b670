#include "surge/probes.hpp"

#include <cmath>
#include <stdexcept>

#include "surge/errors.hpp"

namespace surge {

double measure_current(const FieldSet& f, const Lattice& lat, const EdgeRef& edge) {
  const std::size_t id = lat.index(edge.lower.i, edge.lower.j, edge.lower.k);
  const std::size_t si = lat.stride_i(), sj = lat.stride_j();
  double loop = 0;
  switch (edge.axis) {
    case 0:
      loop = (f.hz[id] - f.hz[id - sj]) - (f.hy[id] - f.hy[id - 1]);
      break;
    case 1:
      loop = (f.hx[id] - f.hx[id - 1]) - (f.hz[id] - f.hz[id - si]);
      break;
    default:
      loop = (f.hy[id] - f.hy[id - si]) - (f.hx[id] - f.hx[id - sj]);
      break;
  }
  return edge.sign * loop * lat.delta;
}

double measure_voltage(const FieldSet& f, const Lattice& lat, const std::vector<EdgeRef>& path) {
  double v = 0;
  for (const auto& e : path)
    v -= e.sign * f.e(e.axis)[lat.index(e.lower.i, e.lower.j, e.lower.k)] * lat.delta;
  return v;
}

double measure(const FieldSet& f, const Lattice& lat, const Probe& p) {
  if (p.kind == ProbeKind::current) return measure_current(f, lat, p.edges.front());
  return measure_voltage(f, lat, p.edges);
}

std::vector<EdgeRef> edge_chain(Node from, Node to, int line) {
  int axis = -1;
  for (int a = 0; a < 3; ++a) {
    if (from[a] == to[a]) continue;
    if (axis >= 0) throw ValidationError(line, "path must follow a single grid line");
    axis = a;
  }
  if (axis < 0) throw ValidationError(line, "path has zero length");
  const int sign = to[axis] > from[axis] ? 1 : -1;
  std::vector<EdgeRef> out;
  for (Node n = from; n[axis] != to[axis]; n[axis] += sign) {
    EdgeRef e;
    e.axis = axis;
    e.sign = sign;
    e.lower = n;
    if (sign < 0) e.lower[axis] -= 1;
    out.push_back(e);
  }
  return out;
}

std::string format_csv_row(double time, const std::vector<double>& values) {
  char buf[64];
  std::string row;
  std::snprintf(buf, sizeof buf, "%.9e", time);
  row += buf;
  for (double v : values) {
    std::snprintf(buf, sizeof buf, ",%.9e", v);
    row += buf;
  }
  row += '\n';
  return row;
}

CsvWriter::CsvWriter(const std::string& path, const std::vector<std::string>& columns) {
  out_ = std::fopen(path.c_str(), "wb");
  if (!out_) throw std::runtime_error("cannot open " + path + " for writing");
  std::string header = "time";
  for (const auto& c : columns) header += "," + c;
  header += '\n';
  std::fputs(header.c_str(), out_);
  std::fflush(out_);
}

CsvWriter::~CsvWriter() {
  if (out_) std::fclose(out_);
}

void CsvWriter::write_row(double time, const std::vector<double>& values) {
  std::fputs(format_csv_row(time, values).c_str(), out_);
  std::fflush(out_);
}

}  // namespace surge

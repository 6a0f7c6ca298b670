#pragma once

#include <cstdio>
#include <memory>
#include <string>
#include <vector>

#include "surge/grid.hpp"

namespace surge {

enum class ProbeKind { current, voltage };

struct Probe {
  ProbeKind kind = ProbeKind::current;
  std::vector<EdgeRef> edges;  // one edge for current, a chain for voltage
  std::string name;
};

// Discrete Ampere loop around the edge: delta * (curl H) . axis, signed by
// the edge direction.
double measure_current(const FieldSet& f, const Lattice& lat, const EdgeRef& edge);
// -sum E . dl along the chain.
double measure_voltage(const FieldSet& f, const Lattice& lat, const std::vector<EdgeRef>& path);
double measure(const FieldSet& f, const Lattice& lat, const Probe& p);

// Straight axis-aligned chain of edges between two lattice nodes. Throws
// ValidationError when the nodes are not on a common grid line.
std::vector<EdgeRef> edge_chain(Node from, Node to, int line = 0);

// Writes "time,<name>,..." then one row per record, flushed per row so an
// interrupted run leaves a readable prefix.
class CsvWriter {
 public:
  CsvWriter(const std::string& path, const std::vector<std::string>& columns);
  ~CsvWriter();
  CsvWriter(const CsvWriter&) = delete;
  CsvWriter& operator=(const CsvWriter&) = delete;

  void write_row(double time, const std::vector<double>& values);

 private:
  std::FILE* out_ = nullptr;
};

std::string format_csv_row(double time, const std::vector<double>& values);

}  // namespace surge

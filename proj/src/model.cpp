#include "surge/model.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "surge/constants.hpp"

namespace surge {

// ---------------------------------------------------------------------------
// Lexing / parsing

namespace {

struct Arity {
  int lo, hi;
};

const std::map<std::string, Arity>& arities() {
  static const std::map<std::string, Arity> table = {
      {"volume", {4, 4}},   {"calctime", {1, 1}}, {"output", {1, 1}},
      {"abc", {1, 7}},      {"block", {8, 9}},    {"debye", {3, 9}},
      {"wire", {8, 9}},     {"source", {8, 9}},   {"calculate", {7, 8}},
      {"function", {3, 1000000}},
  };
  return table;
}

bool ident_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; }
bool ident_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; }
bool is_space(char c) { return c == ' ' || c == '\t'; }

class LineParser {
 public:
  LineParser(std::string_view s, int line, std::vector<Diagnostic>& diags)
      : s_(s), line_(line), diags_(diags) {}

  std::optional<Command> run() {
    skip();
    Command cmd;
    cmd.line = line_;
    cmd.column = col();
    if (pos_ >= s_.size() || !ident_start(s_[pos_])) return error("expected a command keyword");
    cmd.keyword = ident();
    skip();
    if (!eat('(')) return error("expected '(' after '" + cmd.keyword + "'");
    skip();
    if (!eat(')')) {
      for (;;) {
        skip();
        auto v = value();
        if (!v) return std::nullopt;
        cmd.args.push_back(std::move(*v));
        skip();
        if (eat(',')) continue;
        if (eat(')')) break;
        return error("expected ',' or ')'");
      }
    }
    skip();
    if (pos_ < s_.size()) return error("unexpected text after ')'");
    return cmd;
  }

 private:
  int col() const { return int(pos_) + 1; }
  void skip() {
    while (pos_ < s_.size() && is_space(s_[pos_])) ++pos_;
  }
  bool eat(char c) {
    if (pos_ < s_.size() && s_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }
  std::string ident() {
    const std::size_t b = pos_;
    while (pos_ < s_.size() && ident_char(s_[pos_])) ++pos_;
    return std::string(s_.substr(b, pos_ - b));
  }
  std::nullopt_t error(const std::string& msg) {
    diags_.push_back({Diagnostic::Severity::error, line_, col(), msg});
    return std::nullopt;
  }
  std::optional<double> number() {
    const char* b = s_.data() + pos_;
    const char* e = s_.data() + s_.size();
    if (b < e && *b == '+') ++b;
    double v = 0;
    auto r = std::from_chars(b, e, v);
    if (r.ec != std::errc() || r.ptr == b) return std::nullopt;
    pos_ = std::size_t(r.ptr - s_.data());
    return v;
  }
  std::optional<Value> value() {
    Value v;
    v.column = col();
    if (pos_ >= s_.size()) return error("missing argument");
    const char c = s_[pos_];
    if (ident_start(c)) {
      v.kind = Value::Kind::identifier;
      v.text = ident();
      return v;
    }
    if (c == '[') {
      const std::size_t close = s_.find(']', pos_);
      if (close == std::string_view::npos) return error("unterminated '['");
      const std::string_view body = s_.substr(pos_ + 1, close - pos_ - 1);
      ++pos_;
      v.kind = Value::Kind::list;
      bool numeric = true;
      skip();
      if (s_[pos_] != ']') {
        for (;;) {
          skip();
          auto x = number();
          if (!x) {
            numeric = false;
            break;
          }
          v.list.push_back(*x);
          skip();
          if (eat(',')) continue;
          if (s_[pos_] == ']') break;
          numeric = false;
          break;
        }
      }
      if (!numeric) {
        // Free-text placeholder such as "[measured current]"; resolved at validation.
        v.kind = Value::Kind::text;
        v.list.clear();
        v.text = std::string(body);
      }
      pos_ = close + 1;
      return v;
    }
    auto x = number();
    if (!x) return error("expected a number, identifier or list");
    if (pos_ < s_.size() && ident_char(s_[pos_])) return error("malformed number");
    v.number = *x;
    return v;
  }

  std::string_view s_;
  std::size_t pos_ = 0;
  int line_;
  std::vector<Diagnostic>& diags_;
};

}  // namespace

ParseResult parse_model_text(std::string_view text) {
  ParseResult out;
  int line = 0;
  std::size_t b = 0;
  while (b <= text.size()) {
    std::size_t e = text.find('\n', b);
    if (e == std::string_view::npos) e = text.size();
    std::string_view s = text.substr(b, e - b);
    ++line;
    if (!s.empty() && s.back() == '\r') s.remove_suffix(1);
    if (const std::size_t h = s.find('#'); h != std::string_view::npos) s = s.substr(0, h);
    bool blank = std::all_of(s.begin(), s.end(), is_space);
    if (!blank) {
      LineParser p(s, line, out.diagnostics);
      if (auto cmd = p.run()) {
        const auto it = arities().find(cmd->keyword);
        if (it == arities().end()) {
          out.diagnostics.push_back({Diagnostic::Severity::error, line, cmd->column,
                                     "unknown keyword '" + cmd->keyword + "'"});
        } else {
          const int n = int(cmd->args.size());
          if (n < it->second.lo || n > it->second.hi) {
            std::string want = std::to_string(it->second.lo);
            if (it->second.hi != it->second.lo)
              want += it->second.hi > 1000 ? " or more" : "-" + std::to_string(it->second.hi);
            out.diagnostics.push_back({Diagnostic::Severity::error, line, cmd->column,
                                       cmd->keyword + " expects " + want + " arguments, got " +
                                           std::to_string(n)});
          } else {
            out.commands.push_back(std::move(*cmd));
          }
        }
      }
    }
    if (e == text.size()) break;
    b = e + 1;
  }
  return out;
}

// ---------------------------------------------------------------------------
// Validation

int Model::pml_cells() const { return absorbing ? cpml_cells(cpml, grid.delta) : 0; }

long Model::record_every() const {
  return std::max(1L, std::lround(output_interval / grid.dt));
}

namespace {

class Checker {
 public:
  std::vector<Diagnostic> diags;

  void error(int line, int col, const std::string& msg) {
    diags.push_back({Diagnostic::Severity::error, line, col, msg});
  }
  void warn(int line, const std::string& msg) {
    diags.push_back({Diagnostic::Severity::warning, line, 0, msg});
  }
  bool has_errors() const {
    return std::any_of(diags.begin(), diags.end(),
                       [](const Diagnostic& d) { return d.severity == Diagnostic::Severity::error; });
  }

  // Numeric argument, reporting a diagnostic when it is something else.
  std::optional<double> num(const Command& c, std::size_t i) {
    if (i >= c.args.size()) return std::nullopt;
    const Value& v = c.args[i];
    if (v.kind != Value::Kind::number) {
      error(c.line, v.column, c.keyword + ": argument " + std::to_string(i + 1) + " must be a number");
      return std::nullopt;
    }
    return v.number;
  }
  std::optional<std::string> ident(const Command& c, std::size_t i) {
    if (i >= c.args.size()) return std::nullopt;
    const Value& v = c.args[i];
    if (v.kind != Value::Kind::identifier) {
      error(c.line, v.column,
            c.keyword + ": argument " + std::to_string(i + 1) + " must be an identifier");
      return std::nullopt;
    }
    return v.text;
  }
  std::optional<Vec3> point(const Command& c, std::size_t i) {
    auto x = num(c, i), y = num(c, i + 1), z = num(c, i + 2);
    if (!x || !y || !z) return std::nullopt;
    return Vec3{*x, *y, *z};
  }
};

bool on_grid(double v, double delta) {
  return std::abs(v / delta - std::round(v / delta)) * delta <= delta / 100;
}

bool inside(const Vec3& p, const Vec3& extent, double delta) {
  const double tol = delta / 100;
  for (int a = 0; a < 3; ++a)
    if (p[a] < -tol || p[a] > extent[a] + tol) return false;
  return true;
}

Node grid_node(const Vec3& p, double delta) {
  Node n;
  for (int a = 0; a < 3; ++a) n[a] = int(std::lround(p[a] / delta));
  return n;
}

}  // namespace

Model validate_model(const std::vector<Command>& commands, const ModelOptions& opt) {
  Checker ck;
  Model m;
  std::map<std::string, int> seen_single;
  const Command* volume = nullptr;
  const Command* calctime = nullptr;
  const Command* output = nullptr;
  const Command* abc = nullptr;
  for (const auto& c : commands) {
    const Command** slot = nullptr;
    if (c.keyword == "volume") slot = &volume;
    if (c.keyword == "calctime") slot = &calctime;
    if (c.keyword == "output") slot = &output;
    if (c.keyword == "abc") slot = &abc;
    if (!slot) continue;
    if (*slot)
      ck.error(c.line, c.column,
               "duplicate " + c.keyword + " command (first on line " + std::to_string((*slot)->line) + ")");
    else
      *slot = &c;
  }
  for (const char* k : {"volume", "calctime", "output", "abc"}) {
    const Command* c = std::string(k) == "volume" ? volume
                       : std::string(k) == "calctime" ? calctime
                       : std::string(k) == "output" ? output : abc;
    if (!c) ck.error(0, 0, std::string("missing ") + k + " command");
  }

  if (!(opt.cfl > 0) || opt.cfl > 1) ck.error(0, 0, "CFL number must lie in (0, 1]");
  m.cfl = opt.cfl;

  double delta = 0;
  bool grid_ok = false;
  if (volume) {
    auto x = ck.num(*volume, 0), y = ck.num(*volume, 1), z = ck.num(*volume, 2), d = ck.num(*volume, 3);
    if (x && y && z && d) {
      if (!(*d > 0)) {
        ck.error(volume->line, volume->args[3].column, "volume: cell size must be positive");
      } else {
        delta = *d;
        m.extent = {*x, *y, *z};
        m.grid.delta = delta;
        int n[3];
        grid_ok = true;
        for (int a = 0; a < 3; ++a) {
          const double cells = m.extent[a] / delta;
          n[a] = int(std::lround(cells));
          if (std::abs(cells - n[a]) * delta > delta / 100) {
            ck.error(volume->line, volume->args[a].column,
                     "volume: extent is not a whole number of cells");
            grid_ok = false;
          } else if (n[a] < 4) {
            ck.error(volume->line, volume->args[a].column, "volume: at least 4 cells per axis required");
            grid_ok = false;
          }
        }
        m.grid.nx = n[0];
        m.grid.ny = n[1];
        m.grid.nz = n[2];
        if (grid_ok) {
          for (int a = 0; a < 3; ++a) m.extent[a] = n[a] * delta;
        }
      }
    }
  }
  if (calctime) {
    if (auto v = ck.num(*calctime, 0)) {
      if (!(*v > 0)) ck.error(calctime->line, calctime->args[0].column, "calctime must be positive");
      m.calctime = *v;
    }
  }
  if (output) {
    if (auto v = ck.num(*output, 0)) {
      if (!(*v > 0)) ck.error(output->line, output->args[0].column, "output interval must be positive");
      m.output_interval = *v;
    }
  }
  if (abc) {
    if (auto type = ck.ident(*abc, 0)) {
      if (*type == "cpml") {
        m.absorbing = true;
        if (abc->args.size() < 2) {
          ck.error(abc->line, abc->column, "abc: cpml needs at least a depth");
        } else {
          double vals[6] = {0, 1, 1, 0, 3, 1};
          bool ok = true;
          for (std::size_t i = 1; i < abc->args.size(); ++i) {
            auto v = ck.num(*abc, i);
            if (v)
              vals[i - 1] = *v;
            else
              ok = false;
          }
          m.cpml = CpmlParams{vals[0], vals[1], vals[2], vals[3], vals[4], vals[5]};
          if (ok && delta > 0) {
            try {
              cpml_cells(m.cpml, delta);
            } catch (const ValidationError& e) {
              for (const auto& d : e.diagnostics()) ck.error(abc->line, abc->column, "abc: " + d.message);
            } catch (const ParameterError& e) {
              ck.error(abc->line, abc->column, std::string("abc: ") + e.what());
            }
          }
        }
      } else if (*type == "pec" || *type == "none") {
        m.absorbing = false;
        if (abc->args.size() > 1) ck.error(abc->line, abc->column, "abc: pec takes no parameters");
      } else if (*type == "upml") {
        ck.error(abc->line, abc->args[0].column, "abc: upml is not supported, use cpml");
      } else {
        ck.error(abc->line, abc->args[0].column, "abc: unknown boundary type '" + *type + "'");
      }
    }
  }

  // Named definitions first so references can point forward.
  std::map<std::string, int> debye_line, fn_line;
  for (const auto& c : commands) {
    if (c.keyword == "debye") {
      auto name = ck.ident(c, 0);
      if (!name) continue;
      if (debye_line.count(*name)) {
        ck.error(c.line, c.args[0].column,
                 "debye '" + *name + "' already defined on line " + std::to_string(debye_line[*name]));
        continue;
      }
      debye_line[*name] = c.line;
      if (c.args.size() % 2 == 0) {
        ck.error(c.line, c.column, "debye: poles must be given as (delta_eps, tau) pairs");
        continue;
      }
      ModelDebye d{*name, {}, c.line};
      bool ok = true;
      for (std::size_t i = 1; i + 1 < c.args.size(); i += 2) {
        auto de = ck.num(c, i), tau = ck.num(c, i + 1);
        if (!de || !tau) {
          ok = false;
          continue;
        }
        if (!(*de >= 0)) ck.error(c.line, c.args[i].column, "debye: delta_eps must be non-negative");
        if (!(*tau > 0)) ck.error(c.line, c.args[i + 1].column, "debye: tau must be positive");
        d.poles.push_back({*de, *tau});
      }
      if (ok) m.debye.push_back(std::move(d));
    } else if (c.keyword == "function") {
      auto name = ck.ident(c, 0);
      auto kind = ck.ident(c, 1);
      if (!name || !kind) continue;
      if (fn_line.count(*name)) {
        ck.error(c.line, c.args[0].column,
                 "function '" + *name + "' already defined on line " + std::to_string(fn_line[*name]));
        continue;
      }
      fn_line[*name] = c.line;
      ModelFunction f;
      f.line = c.line;
      f.wave.name = *name;
      if (*kind == "custom") {
        f.wave.kind = Waveform::Kind::sampled;
        if (c.args.size() != 4) {
          ck.error(c.line, c.column, "function: custom expects (name, custom, dt, [samples])");
          continue;
        }
        auto dt = ck.num(c, 2);
        const Value& lv = c.args[3];
        if (lv.kind != Value::Kind::list) {
          ck.error(c.line, lv.column, "function: samples must be a bracketed list of numbers");
          continue;
        }
        if (!dt) continue;
        f.wave.sample_dt = *dt;
        f.wave.values = lv.list;
        if (!(*dt > 0)) ck.error(c.line, c.args[2].column, "function: sample interval must be positive");
        if (lv.list.empty()) ck.error(c.line, lv.column, "function: sample list is empty");
      } else if (*kind == "heidler") {
        f.wave.kind = Waveform::Kind::heidler_sum;
        if (c.args.size() > 2 && c.args[2].kind == Value::Kind::identifier) {
          // Legacy layout: (name, heidler, tag, tau1, tau2, i0, n, ...)
          if (c.args.size() < 7) {
            ck.error(c.line, c.column, "function: heidler needs tau1, tau2, i0 and n");
            continue;
          }
          auto t1 = ck.num(c, 3), t2 = ck.num(c, 4), i0 = ck.num(c, 5), n = ck.num(c, 6);
          if (!t1 || !t2 || !i0 || !n) continue;
          f.wave.terms.push_back({*i0, *t1, *t2, *n});
          if (c.args.size() > 7)
            ck.warn(c.line, "function: trailing heidler arguments after n are ignored");
        } else {
          const std::size_t rest = c.args.size() - 2;
          if (rest == 0 || rest % 4 != 0) {
            ck.error(c.line, c.column, "function: heidler expects groups of (i0, tau1, tau2, n)");
            continue;
          }
          bool ok = true;
          for (std::size_t i = 2; i < c.args.size(); i += 4) {
            auto i0 = ck.num(c, i), t1 = ck.num(c, i + 1), t2 = ck.num(c, i + 2), n = ck.num(c, i + 3);
            if (!i0 || !t1 || !t2 || !n) {
              ok = false;
              continue;
            }
            f.wave.terms.push_back({*i0, *t1, *t2, *n});
          }
          if (!ok) continue;
        }
        for (const auto& t : f.wave.terms) {
          try {
            check_heidler(t);
          } catch (const std::exception& e) {
            ck.error(c.line, c.column, std::string("function: ") + e.what());
          }
        }
      } else {
        ck.error(c.line, c.args[1].column, "function: unknown waveform kind '" + *kind + "'");
        continue;
      }
      m.functions.push_back(std::move(f));
    }
  }

  auto check_point = [&](const Command& c, std::size_t i, const Vec3& p, bool need_grid) {
    if (!grid_ok) return;
    if (!inside(p, m.extent, delta)) {
      ck.error(c.line, c.args[i].column, c.keyword + ": point lies outside the volume");
      return;
    }
    if (need_grid)
      for (int a = 0; a < 3; ++a)
        if (!on_grid(p[a], delta)) {
          ck.error(c.line, c.args[i + a].column, c.keyword + ": coordinate is off the grid");
          return;
        }
  };

  for (const auto& c : commands) {
    if (c.keyword == "block") {
      auto lo = ck.point(c, 0), hi = ck.point(c, 3);
      auto er = ck.num(c, 6), sg = ck.num(c, 7);
      std::string deb;
      if (c.args.size() == 9) {
        auto d = ck.ident(c, 8);
        if (!d) continue;
        deb = *d;
        if (!debye_line.count(deb))
          ck.error(c.line, c.args[8].column, "block: undefined debye medium '" + deb + "'");
      }
      if (!lo || !hi || !er || !sg) continue;
      if (!(*er >= 1)) ck.error(c.line, c.args[6].column, "block: relative permittivity must be >= 1");
      if (!(*sg >= 0)) ck.error(c.line, c.args[7].column, "block: conductivity must be non-negative");
      check_point(c, 0, *lo, false);
      check_point(c, 3, *hi, false);
      ModelBlock b;
      for (int a = 0; a < 3; ++a) {
        b.box.lo[a] = std::min((*lo)[a], (*hi)[a]);
        b.box.hi[a] = std::max((*lo)[a], (*hi)[a]);
      }
      b.eps_r = *er;
      b.sigma = *sg;
      b.debye = deb;
      b.line = c.line;
      m.blocks.push_back(b);
    } else if (c.keyword == "wire") {
      auto model = ck.ident(c, 0);
      auto a = ck.point(c, 1), b = ck.point(c, 4);
      auto r = ck.num(c, 7);
      bool term = false;
      if (c.args.size() == 9) {
        auto t = ck.ident(c, 8);
        if (!t) continue;
        if (*t != "t") {
          ck.error(c.line, c.args[8].column, "wire: the only flag is 't'");
          continue;
        }
        term = true;
      }
      if (!model || !a || !b || !r) continue;
      WireSegment w;
      if (*model == "thin")
        w.model = WireModel::thin;
      else if (*model == "staircase")
        w.model = WireModel::staircase;
      else if (*model == "oblique") {
        ck.error(c.line, c.args[0].column, "wire: oblique model is not supported, use staircase");
        continue;
      } else {
        ck.error(c.line, c.args[0].column, "wire: unknown model '" + *model + "'");
        continue;
      }
      w.start = *a;
      w.end = *b;
      w.radius = *r;
      w.terminal = term;
      w.line = c.line;
      if (grid_ok) {
        Lattice lat(m.grid.nx, m.grid.ny, m.grid.nz, delta, 0);
        WireEmbedding scratch;
        try {
          embed_wire(scratch, lat, w);
        } catch (const ValidationError& e) {
          for (const auto& d : e.diagnostics()) ck.error(c.line, c.column, "wire: " + d.message);
        } catch (const ParameterError& e) {
          ck.error(c.line, c.column, std::string("wire: ") + e.what());
        }
      }
      m.wires.push_back(w);
    } else if (c.keyword == "source") {
      auto kind = ck.ident(c, 0);
      auto a = ck.point(c, 1), b = ck.point(c, 4);
      auto v = ck.num(c, 7);
      if (!kind || !a || !b || !v) continue;
      ModelSource s;
      static const std::map<std::string, ModelSource::Kind> kinds = {
          {"current", ModelSource::Kind::current},   {"voltage", ModelSource::Kind::voltage},
          {"hard_e", ModelSource::Kind::hard_e},     {"soft_e", ModelSource::Kind::soft_e},
          {"resistor", ModelSource::Kind::resistor}, {"capacitor", ModelSource::Kind::capacitor}};
      const auto it = kinds.find(*kind);
      if (it == kinds.end()) {
        ck.error(c.line, c.args[0].column, "source: unknown kind '" + *kind + "'");
        continue;
      }
      s.kind = it->second;
      s.start = *a;
      s.end = *b;
      s.value = *v;
      s.line = c.line;
      const bool lumped = s.kind == ModelSource::Kind::resistor || s.kind == ModelSource::Kind::capacitor;
      if (lumped) {
        if (!(*v > 0)) ck.error(c.line, c.args[7].column, "source: element value must be positive");
        if (c.args.size() == 9) {
          if (auto f = ck.ident(c, 8)) s.function = *f;
        }
      } else {
        if (!(*v >= 0)) ck.error(c.line, c.args[7].column, "source: internal resistance must be >= 0");
        if (c.args.size() != 9) {
          ck.error(c.line, c.column, "source: missing waveform function name");
          continue;
        }
        auto f = ck.ident(c, 8);
        if (!f) continue;
        s.function = *f;
        if (!fn_line.count(*f))
          ck.error(c.line, c.args[8].column, "source: undefined function '" + *f + "'");
      }
      check_point(c, 1, *a, true);
      check_point(c, 4, *b, true);
      m.sources.push_back(s);
    } else if (c.keyword == "calculate") {
      auto kind = ck.ident(c, 0);
      auto a = ck.point(c, 1), b = ck.point(c, 4);
      if (!kind || !a || !b) continue;
      ModelProbe p;
      if (*kind == "current")
        p.kind = ProbeKind::current;
      else if (*kind == "voltage")
        p.kind = ProbeKind::voltage;
      else {
        ck.error(c.line, c.args[0].column, "calculate: unknown probe kind '" + *kind + "'");
        continue;
      }
      p.start = *a;
      p.end = *b;
      p.line = c.line;
      if (c.args.size() == 8) {
        auto n = ck.ident(c, 7);
        if (!n) continue;
        p.name = *n;
      }
      check_point(c, 1, *a, true);
      check_point(c, 4, *b, true);
      m.probes.push_back(p);
    }
  }

  // Wire corrections lower the local wave impedance bound; the step shrinks
  // by sqrt(min eps_r * min mu_r) so the scaled cells stay stable.
  if (delta > 0 && m.output_interval > 0 && opt.cfl > 0 && opt.cfl <= 1) {
    double factor = 1;
    try {
      factor = wire_stability_factor(m.wires, delta);
    } catch (const ParameterError&) {
    }
    const double dmax = courant_dt(delta, opt.cfl) * std::sqrt(factor);
    const double k = std::ceil(m.output_interval / dmax * (1 - 1e-12));
    m.grid.dt = m.output_interval / k;
    if (m.calctime > 0) m.grid.n_steps = long(std::ceil(m.calctime / m.grid.dt - 1e-9));
  }

  // Default probe names and uniqueness.
  {
    int nc = 0, nv = 0;
    std::set<std::string> names;
    for (auto& p : m.probes) {
      if (p.name.empty())
        p.name = p.kind == ProbeKind::current ? "current" + std::to_string(nc) : "voltage" + std::to_string(nv);
      (p.kind == ProbeKind::current ? nc : nv)++;
      if (p.name == "time" || !names.insert(p.name).second)
        ck.error(p.line, 0, "calculate: duplicate probe name '" + p.name + "'");
    }
  }

  // Span geometry: sources and current probes occupy one edge, voltage
  // probes an axis-aligned chain.
  std::set<std::tuple<int, int, int>> terminals;
  if (grid_ok)
    for (const auto& w : m.wires)
      if (w.terminal) {
        const Node n = grid_node(w.end, delta);
        terminals.insert({n.i, n.j, n.k});
      }
  auto span_check = [&](int line, const Vec3& a, const Vec3& b, bool single, bool gap,
                        const std::string& what) {
    if (!grid_ok) return;
    if (!inside(a, m.extent, delta) || !inside(b, m.extent, delta)) return;
    const Node na = grid_node(a, delta), nb = grid_node(b, delta);
    int moving = 0, len = 0;
    for (int ax = 0; ax < 3; ++ax)
      if (na[ax] != nb[ax]) {
        ++moving;
        len = std::abs(na[ax] - nb[ax]);
      }
    if (moving != 1) {
      ck.error(line, 0, what + ": span must run along exactly one axis");
      return;
    }
    if (single && len != 1) {
      ck.error(line, 0, what + ": span must be a single cell edge");
      return;
    }
    if (gap && !m.wires.empty() && !terminals.count({na.i, na.j, na.k}) &&
        !terminals.count({nb.i, nb.j, nb.k}))
      ck.error(line, 0, what + ": gap does not touch a terminal ('t') wire end");
  };
  for (const auto& s : m.sources) {
    const bool gap = s.kind != ModelSource::Kind::hard_e && s.kind != ModelSource::Kind::soft_e;
    span_check(s.line, s.start, s.end, true, gap, "source");
  }
  for (const auto& p : m.probes)
    span_check(p.line, p.start, p.end, p.kind == ProbeKind::current, true, "calculate");

  if (ck.has_errors()) throw ValidationError(ck.diags);
  m.warnings = ck.diags;
  return m;
}

Model load_model(std::string_view text, const ModelOptions& opt) {
  ParseResult pr = parse_model_text(text);
  if (!pr.diagnostics.empty()) {
    // Still validate to report everything in one pass.
    std::vector<Diagnostic> all = pr.diagnostics;
    try {
      validate_model(pr.commands, opt);
    } catch (const ValidationError& e) {
      for (const auto& d : e.diagnostics())
        if (d.line > 0) all.push_back(d);
    }
    std::stable_sort(all.begin(), all.end(),
                     [](const Diagnostic& a, const Diagnostic& b) { return a.line < b.line; });
    throw ValidationError(all);
  }
  return validate_model(pr.commands, opt);
}

Model load_model_file(const std::string& path, const ModelOptions& opt) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::ios_base::failure("cannot read '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return load_model(ss.str(), opt);
}

// ---------------------------------------------------------------------------
// Printing

namespace {

std::string fmt(double v) {
  char buf[64];
  auto r = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, r.ptr);
}

std::string pt(const Vec3& p) { return fmt(p.x) + ", " + fmt(p.y) + ", " + fmt(p.z); }

}  // namespace

std::string print_model(const Model& m) {
  std::ostringstream o;
  o << "volume (" << pt(m.extent) << ", " << fmt(m.grid.delta) << ")\n";
  o << "calctime (" << fmt(m.calctime) << ")\n";
  o << "output (" << fmt(m.output_interval) << ")\n";
  if (m.absorbing)
    o << "abc (cpml, " << fmt(m.cpml.depth_m) << ", " << fmt(m.cpml.kappa_max) << ", "
      << fmt(m.cpml.sigma_factor) << ", " << fmt(m.cpml.alpha_max) << ", " << fmt(m.cpml.poly_order)
      << ", " << fmt(m.cpml.alpha_order) << ")\n";
  else
    o << "abc (pec)\n";
  for (const auto& b : m.blocks) {
    o << "block (" << pt(b.box.lo) << ", " << pt(b.box.hi) << ", " << fmt(b.eps_r) << ", "
      << fmt(b.sigma);
    if (!b.debye.empty()) o << ", " << b.debye;
    o << ")\n";
  }
  for (const auto& d : m.debye) {
    o << "debye (" << d.name;
    for (const auto& p : d.poles) o << ", " << fmt(p.delta_eps) << ", " << fmt(p.tau);
    o << ")\n";
  }
  for (const auto& w : m.wires) {
    o << "wire (" << (w.model == WireModel::thin ? "thin" : "staircase") << ", " << pt(w.start)
      << ", " << pt(w.end) << ", " << fmt(w.radius) << (w.terminal ? ", t" : "") << ")\n";
  }
  static const char* kind_names[] = {"current", "voltage", "hard_e", "soft_e", "resistor", "capacitor"};
  for (const auto& s : m.sources) {
    o << "source (" << kind_names[int(s.kind)] << ", " << pt(s.start) << ", " << pt(s.end) << ", "
      << fmt(s.value);
    if (!s.function.empty()) o << ", " << s.function;
    o << ")\n";
  }
  for (const auto& p : m.probes)
    o << "calculate (" << (p.kind == ProbeKind::current ? "current" : "voltage") << ", " << pt(p.start)
      << ", " << pt(p.end) << ", " << p.name << ")\n";
  for (const auto& f : m.functions) {
    const Waveform& w = f.wave;
    if (w.kind == Waveform::Kind::sampled) {
      o << "function (" << w.name << ", custom, " << fmt(w.sample_dt) << ", [";
      for (std::size_t i = 0; i < w.values.size(); ++i) o << (i ? ", " : "") << fmt(w.values[i]);
      o << "])\n";
    } else {
      o << "function (" << w.name << ", heidler";
      for (const auto& t : w.terms)
        o << ", " << fmt(t.i0) << ", " << fmt(t.tau1) << ", " << fmt(t.tau2) << ", " << fmt(t.n);
      o << ")\n";
    }
  }
  return o.str();
}

// ---------------------------------------------------------------------------
// Assembly

SimulationInput build_simulation_input(const Model& m) {
  const int pml = m.pml_cells();
  const double d = m.grid.delta;
  Lattice lat(m.grid.nx, m.grid.ny, m.grid.nz, d, pml);
  SimulationInput in;
  in.dt = m.grid.dt;
  in.materials = MaterialMap(lat);
  if (m.absorbing) in.cpml = m.cpml;

  std::map<std::string, const ModelDebye*> debye;
  for (const auto& x : m.debye) debye[x.name] = &x;
  for (const auto& b : m.blocks) {
    int id = -1;
    if (!b.debye.empty()) {
      const ModelDebye* md = debye.at(b.debye);
      id = int(in.media.size());
      in.media.push_back(DebyeMedium{md->name, b.eps_r, b.sigma, md->poles});
    }
    paint_block(in.materials, b.box, b.eps_r, b.sigma, id);
  }
  for (const auto& w : m.wires) embed_wire(in.wires, lat, w);

  std::map<std::string, int> fn;
  for (const auto& f : m.functions) {
    fn[f.wave.name] = int(in.waveforms.size());
    in.waveforms.push_back(f.wave);
  }
  auto node = [&](const Vec3& p) {
    Node n = grid_node(p, d);
    for (int a = 0; a < 3; ++a) n[a] += pml;
    return n;
  };
  auto edge = [&](const Vec3& a, const Vec3& b) {
    const Node na = node(a), nb = node(b);
    EdgeRef e;
    for (int ax = 0; ax < 3; ++ax)
      if (na[ax] != nb[ax]) e.axis = ax;
    e.lower = na[e.axis] < nb[e.axis] ? na : nb;
    e.sign = nb[e.axis] > na[e.axis] ? 1 : -1;
    return e;
  };
  for (const auto& s : m.sources) {
    const EdgeRef e = edge(s.start, s.end);
    switch (s.kind) {
      case ModelSource::Kind::resistor:
        in.lumped.push_back({LumpedKind::resistor, e, s.value});
        break;
      case ModelSource::Kind::capacitor:
        in.lumped.push_back({LumpedKind::capacitor, e, s.value});
        break;
      default: {
        Source src;
        src.kind = s.kind == ModelSource::Kind::current   ? SourceKind::current
                   : s.kind == ModelSource::Kind::voltage ? SourceKind::voltage
                   : s.kind == ModelSource::Kind::hard_e  ? SourceKind::hard_e
                                                          : SourceKind::soft_e;
        src.edge = e;
        src.r_internal = s.value;
        src.waveform = fn.at(s.function);
        in.sources.push_back(src);
      }
    }
  }
  for (const auto& p : m.probes) {
    Probe pr;
    pr.kind = p.kind;
    pr.name = p.name;
    if (p.kind == ProbeKind::current)
      pr.edges = {edge(p.start, p.end)};
    else
      pr.edges = edge_chain(node(p.start), node(p.end), p.line);
    in.probes.push_back(std::move(pr));
  }
  return in;
}

}  // namespace surge

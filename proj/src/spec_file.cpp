#include "combsum/spec_file.hpp"

#include <yaml-cpp/yaml.h>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <initializer_list>
#include <sstream>

namespace combsum {

namespace {

[[noreturn]] void fail(const YAML::Node& node, const std::string& msg) {
  const YAML::Mark mark = node.Mark();
  if (mark.line >= 0) {
    throw SpecError("line " + std::to_string(mark.line + 1) + ": " + msg);
  }
  throw SpecError(msg);
}

void require_map(const YAML::Node& node, const std::string& what) {
  if (!node.IsMap()) fail(node, what + " must be a mapping");
}

void allow_keys(const YAML::Node& map, std::initializer_list<std::string_view> keys,
                const std::string& where) {
  for (const auto& kv : map) {
    const auto key = kv.first.as<std::string>();
    if (std::find(keys.begin(), keys.end(), key) == keys.end()) {
      fail(kv.first, "unknown key '" + key + "' in " + where);
    }
  }
}

YAML::Node need(const YAML::Node& map, const std::string& key, const std::string& where) {
  const YAML::Node v = map[key];
  if (!v) fail(map, "missing key '" + key + "' in " + where);
  return v;
}

double to_double(const YAML::Node& node) {
  if (!node.IsScalar()) fail(node, "expected a number");
  const std::string& s = node.Scalar();
  const char* first = s.data();
  const char* last = s.data() + s.size();
  if (first != last && *first == '+') ++first;
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc() || ptr != last || !std::isfinite(v)) {
    fail(node, "'" + s + "' is not a finite decimal number");
  }
  return v;
}

long long to_integer(const YAML::Node& node) {
  if (!node.IsScalar()) fail(node, "expected an integer");
  const std::string& s = node.Scalar();
  long long v = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) fail(node, "'" + s + "' is not an integer");
  return v;
}

std::size_t to_size(const YAML::Node& node) {
  const long long v = to_integer(node);
  if (v < 0) fail(node, "expected a non-negative integer");
  return static_cast<std::size_t>(v);
}

template <typename T, typename Convert>
SquareMatrix<T> to_square(const YAML::Node& node, const std::string& what, Convert convert) {
  if (!node.IsSequence() || node.size() == 0) fail(node, what + " must be a non-empty list of rows");
  const std::size_t n = node.size();
  std::vector<T> data;
  data.reserve(n * n);
  for (const auto& row : node) {
    if (!row.IsSequence() || row.size() != n) {
      fail(row, what + " must be square: every row needs " + std::to_string(n) + " entries");
    }
    for (const auto& x : row) data.push_back(convert(x));
  }
  return SquareMatrix<T>(n, std::move(data));
}

Sign to_sign(const YAML::Node& node) {
  const long long s = to_integer(node);
  if (s != 1 && s != -1) fail(node, "sign must be 1 or -1");
  return s == 1 ? Sign::plus : Sign::minus;
}

EntryDistribution to_law(const YAML::Node& node) {
  require_map(node, "a law");
  const auto kind = need(node, "law", "a law").as<std::string>();
  try {
    if (kind == "point") {
      allow_keys(node, {"law", "c"}, "a point law");
      return EntryDistribution::point_mass(to_double(need(node, "c", "a point law")));
    }
    if (kind == "discrete") {
      allow_keys(node, {"law", "atoms"}, "a discrete law");
      const YAML::Node atoms = need(node, "atoms", "a discrete law");
      if (!atoms.IsSequence()) fail(atoms, "atoms must be a list of [value, prob] pairs");
      std::vector<Atom> out;
      for (const auto& a : atoms) {
        if (!a.IsSequence() || a.size() != 2) fail(a, "each atom must be [value, prob]");
        out.push_back({to_double(a[0]), to_double(a[1])});
      }
      return EntryDistribution::discrete(std::move(out));
    }
    if (kind == "exponential") {
      allow_keys(node, {"law", "rate", "sign"}, "an exponential law");
      const Sign sign = node["sign"] ? to_sign(node["sign"]) : Sign::plus;
      return EntryDistribution::exponential(to_double(need(node, "rate", "an exponential law")),
                                            sign);
    }
    if (kind == "gamma") {
      allow_keys(node, {"law", "shape", "rate", "sign"}, "a gamma law");
      const Sign sign = node["sign"] ? to_sign(node["sign"]) : Sign::plus;
      return EntryDistribution::gamma(to_double(need(node, "shape", "a gamma law")),
                                      to_double(need(node, "rate", "a gamma law")), sign);
    }
  } catch (const std::invalid_argument& err) {
    fail(node, err.what());
  }
  fail(node, "unknown law '" + kind + "' (expected point, discrete, exponential or gamma)");
}

std::vector<EntryDistribution> to_law_list(const YAML::Node& node, const std::string& what) {
  if (!node.IsSequence() || node.size() == 0) fail(node, what + " must be a non-empty list of laws");
  std::vector<EntryDistribution> out;
  for (const auto& x : node) out.push_back(to_law(x));
  return out;
}

// --- emitting ---------------------------------------------------------------

std::string num(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

void emit_law(YAML::Emitter& out, const EntryDistribution& d) {
  out << YAML::Flow << YAML::BeginMap;
  if (const auto* p = d.get_if<PointMass>()) {
    out << YAML::Key << "law" << YAML::Value << "point" << YAML::Key << "c" << YAML::Value
        << num(p->c);
  } else if (const auto* f = d.get_if<FiniteDiscrete>()) {
    out << YAML::Key << "law" << YAML::Value << "discrete" << YAML::Key << "atoms" << YAML::Value
        << YAML::BeginSeq;
    for (const auto& a : f->atoms) {
      out << YAML::BeginSeq << num(a.value) << num(a.prob) << YAML::EndSeq;
    }
    out << YAML::EndSeq;
  } else if (const auto* x = d.get_if<SignedExponential>()) {
    out << YAML::Key << "law" << YAML::Value << "exponential" << YAML::Key << "rate"
        << YAML::Value << num(x->rate) << YAML::Key << "sign" << YAML::Value << to_int(x->sign);
  } else if (const auto* g = d.get_if<SignedGamma>()) {
    out << YAML::Key << "law" << YAML::Value << "gamma" << YAML::Key << "shape" << YAML::Value
        << num(g->shape) << YAML::Key << "rate" << YAML::Value << num(g->rate) << YAML::Key
        << "sign" << YAML::Value << to_int(g->sign);
  }
  out << YAML::EndMap;
}

template <typename T, typename Emit>
void emit_square(YAML::Emitter& out, const SquareMatrix<T>& m, Emit emit) {
  out << YAML::Block << YAML::BeginSeq;
  for (std::size_t i = 0; i < m.size(); ++i) {
    out << YAML::Flow << YAML::BeginSeq;
    for (const auto& x : m.row(i)) emit(x);
    out << YAML::EndSeq;
  }
  out << YAML::EndSeq;
}

void emit_laws(YAML::Emitter& out, const std::vector<EntryDistribution>& laws) {
  out << YAML::Block << YAML::BeginSeq;
  for (const auto& d : laws) emit_law(out, d);
  out << YAML::EndSeq;
}

std::size_t grid_size(std::size_t n, std::size_t& slot) {
  if (slot != 0 && slot != n) throw SpecError("grids in one spec must have equal sizes");
  slot = n;
  return n;
}

}  // namespace

EnsembleSpec parse_spec(std::string_view yaml_text) {
  YAML::Node root;
  try {
    root = YAML::Load(std::string(yaml_text));
  } catch (const YAML::Exception& err) {
    throw SpecError(std::string("invalid YAML: ") + err.what());
  }
  require_map(root, "the spec document");

  const long long version = to_integer(need(root, "schema_version", "the spec"));
  if (version != kSpecSchemaVersion) {
    fail(root["schema_version"], "unsupported schema_version " + std::to_string(version) +
                                     " (this build reads version " +
                                     std::to_string(kSpecSchemaVersion) + ")");
  }

  EnsembleSpec spec;
  spec.family = need(root, "family", "the spec").as<std::string>();
  if (root["n"]) spec.n = to_size(root["n"]);
  if (root["scale"]) {
    spec.scale = to_double(root["scale"]);
    if (!(*spec.scale > 0.0)) fail(root["scale"], "scale must be positive");
  }

  std::size_t size = 0;
  const std::string& f = spec.family;
  if (f == "degenerate") {
    allow_keys(root, {"schema_version", "family", "n", "scale", "grid"}, "a degenerate spec");
    spec.grid = to_square<double>(need(root, "grid", f), "grid", to_double);
    grid_size(spec.grid.size(), size);
  } else if (f == "checkerboard_exponential") {
    allow_keys(root, {"schema_version", "family", "n", "scale", "rate"}, "a checkerboard spec");
    if (!spec.n) fail(root, "checkerboard_exponential needs n");
    if (root["rate"]) spec.rate = to_double(root["rate"]);
    if (!(spec.rate > 0.0)) fail(root["rate"], "rate must be positive");
  } else if (f == "k_sequence") {
    allow_keys(root, {"schema_version", "family", "n", "scale", "palette", "assignment"},
               "a k_sequence spec");
    spec.palette = to_law_list(need(root, "palette", f), "palette");
    spec.assignment = to_square<int>(need(root, "assignment", f), "assignment",
                                     [](const YAML::Node& x) {
                                       return static_cast<int>(to_integer(x));
                                     });
    for (int k : spec.assignment.data()) {
      if (k < 0 || static_cast<std::size_t>(k) >= spec.palette.size()) {
        fail(root["assignment"], "assignment index " + std::to_string(k) + " is outside the palette");
      }
    }
    grid_size(spec.assignment.size(), size);
  } else if (f == "rademacher") {
    allow_keys(root, {"schema_version", "family", "n", "scale", "means", "amplitudes"},
               "a rademacher spec");
    spec.means = to_square<double>(need(root, "means", f), "means", to_double);
    spec.amplitudes = to_square<double>(need(root, "amplitudes", f), "amplitudes", to_double);
    grid_size(spec.means.size(), size);
    grid_size(spec.amplitudes.size(), size);
  } else if (f == "row_constant") {
    allow_keys(root, {"schema_version", "family", "n", "scale", "rows", "row_law"},
               "a row_constant spec");
    if (root["rows"] && root["row_law"]) fail(root, "row_constant takes rows or row_law, not both");
    if (root["rows"]) {
      spec.rows = to_law_list(root["rows"], "rows");
      grid_size(spec.rows.size(), size);
    } else {
      spec.row_law = to_law(need(root, "row_law", f));
      if (!spec.n) fail(root, "row_constant with row_law needs n");
    }
  } else if (f == "grid") {
    allow_keys(root, {"schema_version", "family", "n", "scale", "cells"}, "a grid spec");
    const YAML::Node cells = need(root, "cells", f);
    if (!cells.IsSequence() || cells.size() == 0) fail(cells, "cells must be a list of rows");
    const std::size_t n = cells.size();
    std::vector<EntryDistribution> data;
    for (const auto& row : cells) {
      if (!row.IsSequence() || row.size() != n) fail(row, "cells must be square");
      for (const auto& x : row) data.push_back(to_law(x));
    }
    spec.cells = SquareMatrix<EntryDistribution>(n, std::move(data));
    grid_size(n, size);
  } else {
    fail(root["family"], "unknown family '" + f + "'");
  }

  if (size != 0) {
    if (spec.n && *spec.n != size) {
      fail(root["n"], "n = " + std::to_string(*spec.n) + " disagrees with the grid size " +
                          std::to_string(size));
    }
    spec.n = size;
  }
  if (*spec.n < 2) fail(root, "ensembles need n >= 2");
  return spec;
}

EnsembleSpec load_spec(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::filesystem::filesystem_error("cannot open spec file", path,
                                                   std::make_error_code(std::errc::no_such_file_or_directory));
  std::ostringstream text;
  text << in.rdbuf();
  try {
    return parse_spec(text.str());
  } catch (const SpecError& err) {
    throw SpecError(path.string() + ": " + err.what());
  }
}

bool EnsembleSpec::resizable() const noexcept {
  return family == "checkerboard_exponential" || (family == "row_constant" && row_law.has_value());
}

MatrixEnsemble EnsembleSpec::build(Centering centering) const { return build(n.value_or(0), centering); }

MatrixEnsemble EnsembleSpec::build(std::size_t size, Centering centering) const {
  if (!resizable() && n && size != *n) {
    throw SpecError("family '" + family + "' has a fixed size " + std::to_string(*n) +
                    "; cannot build n = " + std::to_string(size));
  }
  if (family == "degenerate") return make_degenerate(grid, scale, centering);
  if (family == "checkerboard_exponential") {
    MatrixEnsemble e = make_checkerboard_exponential(size, rate);
    return scale ? MatrixEnsemble(e.cells(), *scale) : e;
  }
  if (family == "k_sequence") return make_k_sequence(palette, assignment, scale, centering);
  if (family == "rademacher") return make_rademacher(means, amplitudes, scale, centering);
  if (family == "row_constant") {
    if (row_law) return make_row_constant(std::vector(size, *row_law), scale, centering);
    return make_row_constant(rows, scale, centering);
  }
  if (family == "grid") return make_grid(cells, scale, centering);
  throw SpecError("unknown family '" + family + "'");
}

std::string serialize_spec(const EnsembleSpec& spec) {
  YAML::Emitter out;
  out << YAML::BeginMap;
  out << YAML::Key << "schema_version" << YAML::Value << kSpecSchemaVersion;
  out << YAML::Key << "family" << YAML::Value << spec.family;
  if (spec.n) out << YAML::Key << "n" << YAML::Value << *spec.n;
  if (spec.scale) out << YAML::Key << "scale" << YAML::Value << num(*spec.scale);
  const auto emit_num = [&](double x) { out << num(x); };
  const std::string& f = spec.family;
  if (f == "degenerate") {
    out << YAML::Key << "grid" << YAML::Value;
    emit_square(out, spec.grid, emit_num);
  } else if (f == "checkerboard_exponential") {
    out << YAML::Key << "rate" << YAML::Value << num(spec.rate);
  } else if (f == "k_sequence") {
    out << YAML::Key << "palette" << YAML::Value;
    emit_laws(out, spec.palette);
    out << YAML::Key << "assignment" << YAML::Value;
    emit_square(out, spec.assignment, [&](int k) { out << k; });
  } else if (f == "rademacher") {
    out << YAML::Key << "means" << YAML::Value;
    emit_square(out, spec.means, emit_num);
    out << YAML::Key << "amplitudes" << YAML::Value;
    emit_square(out, spec.amplitudes, emit_num);
  } else if (f == "row_constant") {
    if (spec.row_law) {
      out << YAML::Key << "row_law" << YAML::Value;
      emit_law(out, *spec.row_law);
    } else {
      out << YAML::Key << "rows" << YAML::Value;
      emit_laws(out, spec.rows);
    }
  } else if (f == "grid") {
    out << YAML::Key << "cells" << YAML::Value;
    emit_square(out, spec.cells, [&](const EntryDistribution& d) { emit_law(out, d); });
  }
  out << YAML::EndMap;
  return std::string(out.c_str()) + "\n";
}

std::string serialize_ensemble(const MatrixEnsemble& e) {
  EnsembleSpec spec;
  spec.family = "grid";
  spec.n = e.size();
  spec.scale = e.scale();
  spec.cells = e.cells();
  return serialize_spec(spec);
}

}  // namespace combsum

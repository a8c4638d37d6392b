#include "dynframe/json_io.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>

#include "dynframe/error.hpp"

namespace dynframe::json_io {

namespace {

const Json& field(const Json& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) throw InvalidArgument(std::string("JSON: missing field '") + key + "'");
  return j.at(key);
}

template <typename T>
T get(const Json& j, const char* key) {
  try {
    return field(j, key).get<T>();
  } catch (const nlohmann::json::exception& e) {
    throw InvalidArgument(std::string("JSON: bad field '") + key + "': " + e.what());
  }
}

std::vector<double> doubles(const Json& j, const char* key) { return get<std::vector<double>>(j, key); }

// Non-finite doubles have no JSON encoding; reports store them as strings.
Json number(double x) {
  if (std::isfinite(x)) return x;
  if (std::isnan(x)) return "nan";
  return x > 0 ? "inf" : "-inf";
}

}  // namespace

Json to_json(const CMatrix& m) {
  Json re = Json::array(), im = Json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
      re.push_back(m(r, c).real());
      im.push_back(m(r, c).imag());
    }
  }
  return Json{{"rows", m.rows()}, {"cols", m.cols()}, {"re", re}, {"im", im}};
}

CMatrix matrix_from_json(const Json& j) {
  const auto rows = get<Eigen::Index>(j, "rows");
  const auto cols = get<Eigen::Index>(j, "cols");
  if (rows < 0 || cols < 0) throw InvalidArgument("JSON: negative matrix shape");
  const auto re = doubles(j, "re");
  const auto im = j.contains("im") ? doubles(j, "im") : std::vector<double>(re.size(), 0.0);
  if (re.size() != static_cast<std::size_t>(rows * cols) || im.size() != re.size()) {
    throw InvalidArgument("JSON: matrix data length differs from rows * cols");
  }
  CMatrix m(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r) {
    for (Eigen::Index c = 0; c < cols; ++c) {
      const auto i = static_cast<std::size_t>(r * cols + c);
      m(r, c) = Complex(re[i], im[i]);
    }
  }
  return m;
}

Json vector_to_json(const CVector& v) { return to_json(CMatrix(v)); }

CVector vector_from_json(const Json& j) {
  if (j.is_object() && !j.contains("rows")) {
    const auto re = doubles(j, "re");
    const auto im = j.contains("im") ? doubles(j, "im") : std::vector<double>(re.size(), 0.0);
    if (im.size() != re.size()) throw InvalidArgument("JSON: re/im length mismatch");
    CVector v(static_cast<Eigen::Index>(re.size()));
    for (std::size_t i = 0; i < re.size(); ++i) v(static_cast<Eigen::Index>(i)) = Complex(re[i], im[i]);
    return v;
  }
  const CMatrix m = matrix_from_json(j);
  if (m.cols() != 1 && m.rows() != 1) throw InvalidArgument("JSON: expected a vector");
  return m.reshaped();
}

Json to_json(const semigroup::Descriptor& d) {
  using K = semigroup::Descriptor::Kind;
  switch (d.kind()) {
    case K::FreeAbelian:
      return Json{{"kind", "free_abelian"}, {"k", d.arity()}};
    case K::FiniteAbelian:
      return Json{{"kind", "finite_abelian"}, {"orders", d.orders()}};
    case K::Numerical:
      return Json{{"kind", "numerical"}, {"generators", d.generator_values()}};
    case K::Product:
      return Json{{"kind", "product"}, {"factors", Json::array({to_json(d.left()), to_json(d.right())})}};
  }
  return {};
}

semigroup::Descriptor descriptor_from_json(const Json& j) {
  const auto kind = get<std::string>(j, "kind");
  if (kind == "free_abelian") return semigroup::Descriptor::free_abelian(get<int>(j, "k"));
  if (kind == "finite_abelian") return semigroup::Descriptor::finite_abelian(get<std::vector<int>>(j, "orders"));
  if (kind == "numerical") return semigroup::Descriptor::numerical(get<std::vector<int>>(j, "generators"));
  if (kind == "product") {
    const Json& f = field(j, "factors");
    if (!f.is_array() || f.size() < 2) throw InvalidArgument("JSON: product needs at least two factors");
    semigroup::Descriptor acc = descriptor_from_json(f[0]);
    for (std::size_t i = 1; i < f.size(); ++i) acc = semigroup::Descriptor::product(acc, descriptor_from_json(f[i]));
    return acc;
  }
  throw InvalidArgument("JSON: unknown semigroup kind '" + kind + "'");
}

Json to_json(const semigroup::WindowSpec& s) {
  using K = semigroup::WindowSpec::Kind;
  switch (s.kind) {
    case K::Box:
      return Json{{"box", s.caps}};
    case K::TotalDegree:
      return Json{{"total_degree", s.caps.at(0)}};
    case K::Cap:
      return Json{{"cap", s.caps.at(0)}};
  }
  return {};
}

semigroup::WindowSpec window_spec_from_json(const Json& j) {
  if (j.is_string()) return semigroup::WindowSpec::parse(j.get<std::string>());
  if (j.is_object() && j.contains("box")) {
    const Json& b = j.at("box");
    if (b.is_number_integer()) return semigroup::WindowSpec::box({b.get<int>()});
    return semigroup::WindowSpec::box(get<std::vector<int>>(j, "box"));
  }
  if (j.is_object() && j.contains("total_degree")) return semigroup::WindowSpec::total_degree(get<int>(j, "total_degree"));
  if (j.is_object() && j.contains("cap")) return semigroup::WindowSpec::cap(get<int>(j, "cap"));
  throw InvalidArgument("JSON: window spec needs box, total_degree or cap");
}

Json to_json(const dynamical::OperatorTuple& t) {
  Json a = Json::array(), u = Json::array();
  for (const CMatrix& m : t.operators()) a.push_back(to_json(m));
  for (const auto& g : t.group()) u.push_back(Json{{"order", g.order}, {"matrix", to_json(g.matrix)}});
  Json out{{"dim", t.dim()}, {"A", a}, {"U", u}};
  if (!t.numerical_generators().empty()) out["numerical"] = t.numerical_generators();
  return out;
}

dynamical::OperatorTuple tuple_from_json(const Json& j) {
  const int dim = get<int>(j, "dim");
  std::vector<CMatrix> ops;
  for (const Json& m : field(j, "A")) ops.push_back(matrix_from_json(m));
  std::vector<dynamical::GroupGenerator> group;
  if (j.contains("U")) {
    for (const Json& g : j.at("U")) group.push_back({get<int>(g, "order"), matrix_from_json(field(g, "matrix"))});
  }
  std::vector<int> numerical;
  if (j.contains("numerical")) numerical = get<std::vector<int>>(j, "numerical");
  for (const CMatrix& m : ops) {
    if (m.rows() != dim) throw InvalidArgument("JSON: operator size differs from dim");
  }
  for (const auto& g : group) {
    if (g.matrix.rows() != dim) throw InvalidArgument("JSON: unitary size differs from dim");
  }
  return dynamical::OperatorTuple(std::move(ops), std::move(group), std::move(numerical));
}

Json to_json(const frame::Frame& f) {
  Json w = nullptr;
  if (f.window()) w = Json{{"descriptor", to_json(f.window()->descriptor())}, {"spec", to_json(f.window()->spec())}};
  return Json{{"dim", f.dim()}, {"window", w}, {"vectors", to_json(f.vectors())}};
}

frame::Frame frame_from_json(const Json& j) {
  CMatrix v = matrix_from_json(field(j, "vectors"));
  if (j.contains("dim") && get<Eigen::Index>(j, "dim") != v.rows()) {
    throw InvalidArgument("JSON: frame dim differs from the vector length");
  }
  std::shared_ptr<const semigroup::Window> w;
  if (j.contains("window") && !j.at("window").is_null()) {
    const Json& wj = j.at("window");
    w = std::make_shared<const semigroup::Window>(semigroup::Window::enumerate(
        descriptor_from_json(field(wj, "descriptor")), window_spec_from_json(field(wj, "spec"))));
  }
  return frame::Frame(std::move(v), std::move(w));
}

Json to_json(const model_space::PolySymbol& p) {
  Json re = Json::array(), im = Json::array();
  for (Eigen::Index i = 0; i < p.coeffs.size(); ++i) {
    re.push_back(p.coeffs(i).real());
    im.push_back(p.coeffs(i).imag());
  }
  return Json{{"k", p.arity()}, {"window", to_json(p.window->spec())}, {"coeffs", Json{{"re", re}, {"im", im}}}};
}

model_space::PolySymbol poly_from_json(const Json& j) {
  const semigroup::WindowSpec spec = window_spec_from_json(field(j, "window"));
  int k = 1;
  if (j.contains("k")) {
    k = get<int>(j, "k");
  } else if (spec.kind == semigroup::WindowSpec::Kind::Box) {
    k = static_cast<int>(spec.caps.size());
  }
  auto w = std::make_shared<const semigroup::Window>(
      semigroup::Window::enumerate(semigroup::Descriptor::free_abelian(k), spec));
  const CVector c = vector_from_json(field(j, "coeffs"));
  if (static_cast<std::size_t>(c.size()) != w->size()) {
    throw InvalidArgument("JSON: symbol has " + std::to_string(c.size()) + " coefficients for a window of size " +
                          std::to_string(w->size()));
  }
  return model_space::PolySymbol{std::move(w), c};
}

Json to_json(const sampling::SampleTable& y) {
  Json re = Json::array(), im = Json::array();
  for (Eigen::Index j = 0; j < y.values.rows(); ++j) {
    for (Eigen::Index n = 0; n < y.values.cols(); ++n) {
      re.push_back(y.values(j, n).real());
      im.push_back(y.values(j, n).imag());
    }
  }
  return Json{{"sensors", y.sensors}, {"times", y.times}, {"re", re}, {"im", im}};
}

sampling::SampleTable samples_from_json(const Json& j) {
  sampling::SampleTable y;
  y.sensors = get<int>(j, "sensors");
  y.times = get<int>(j, "times");
  if (y.sensors < 1 || y.times < 1) throw InvalidArgument("JSON: sample table needs sensors, times >= 1");
  y.values = matrix_from_json(Json{{"rows", y.sensors}, {"cols", y.times}, {"re", field(j, "re")},
                                   {"im", j.contains("im") ? j.at("im") : Json::array()}});
  return y;
}

Json to_json(const sampling::SamplingScheme& s) {
  Json sensors = Json::array();
  for (const CVector& g : s.sensors) sensors.push_back(vector_to_json(g));
  return Json{{"A", to_json(s.evolution)}, {"sensors", sensors}, {"horizon", s.horizon}};
}

sampling::SamplingScheme scheme_from_json(const Json& j) {
  sampling::SamplingScheme s;
  s.evolution = matrix_from_json(field(j, "A"));
  for (const Json& g : field(j, "sensors")) s.sensors.push_back(vector_from_json(g));
  s.horizon = get<int>(j, "horizon");
  s.validate();
  return s;
}

Json to_json(const commutant::ExperimentConfig& c) {
  Json out{{"k", c.k}, {"d_min", c.d_min}, {"d_max", c.d_max}, {"scheme", dynamical::to_string(c.scheme)},
           {"rho_max", c.rho_max}, {"trials", c.trials}, {"seed", c.seed}, {"max_resamples", c.max_resamples}};
  if (!c.group_orders.empty()) out["group_orders"] = c.group_orders;
  return out;
}

commutant::ExperimentConfig config_from_json(const Json& j) {
  commutant::ExperimentConfig c;
  c.k = get<int>(j, "k");
  if (j.contains("d")) {
    const Json& d = j.at("d");
    if (d.is_array() && d.size() == 2) {
      c.d_min = d[0].get<int>();
      c.d_max = d[1].get<int>();
    } else {
      c.d_min = c.d_max = get<int>(j, "d");
    }
  }
  if (j.contains("d_min")) c.d_min = get<int>(j, "d_min");
  if (j.contains("d_max")) c.d_max = get<int>(j, "d_max");
  if (j.contains("scheme")) c.scheme = dynamical::parse_scheme(get<std::string>(j, "scheme"));
  if (j.contains("rho_max")) c.rho_max = get<double>(j, "rho_max");
  if (j.contains("trials")) c.trials = get<int>(j, "trials");
  if (j.contains("seed")) c.seed = get<std::uint64_t>(j, "seed");
  if (j.contains("max_resamples")) c.max_resamples = get<int>(j, "max_resamples");
  if (j.contains("group_orders")) c.group_orders = get<std::vector<int>>(j, "group_orders");
  return c;
}

Json to_json(const frame::FrameReport& r) {
  return Json{{"lower", number(r.bounds.lower)},
              {"upper", number(r.bounds.upper)},
              {"classification", frame::to_string(r.classification)},
              {"condition", number(r.condition)},
              {"rank", r.rank}};
}

Json to_json(const dynamical::TailEstimate& t) {
  Json q = Json::array(), rho = Json::array(), shell = Json::array();
  for (double x : t.contraction) q.push_back(number(x));
  for (double x : t.spectral_radii) rho.push_back(number(x));
  for (double x : t.min_shell_ratio) shell.push_back(number(x));
  Json out{{"tau", number(t.tau)}, {"certified", t.certified}, {"contraction", q}, {"spectral_radii", rho},
           {"min_shell_ratio", shell}};
  if (!t.note.empty()) out["note"] = t.note;
  return out;
}

Json to_json(const dynamical::OrbitDiagnosis& d) {
  return Json{{"classification", dynamical::to_string(d.classification)},
              {"truncated", to_json(d.truncated)},
              {"lower_bound", number(d.lower_bound)},
              {"upper_bound", number(d.upper_bound)},
              {"krylov_rank", d.krylov_rank},
              {"tail", to_json(d.tail)}};
}

Json load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidArgument("cannot open " + path);
  try {
    return Json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw InvalidArgument("cannot parse " + path + ": " + e.what());
  }
}

void save_atomic(const std::string& path, const Json& j) {
  namespace fs = std::filesystem;
  const fs::path target(path);
  fs::path tmp = target;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::trunc);
    if (!out) throw Error("cannot write " + tmp.string());
    out << j.dump(2) << '\n';
    if (!out) throw Error("write failed for " + tmp.string());
  }
  std::error_code ec;
  fs::rename(tmp, target, ec);
  if (ec) {
    fs::remove(tmp);
    throw Error("cannot rename " + tmp.string() + " to " + path + ": " + ec.message());
  }
}

}  // namespace dynframe::json_io

#include "cli.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <ctime>
#include <functional>
#include <iomanip>
#include <limits>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>
#include <thread>

#include <CLI11.hpp>

#include "dynframe/commutant.hpp"
#include "dynframe/error.hpp"
#include "dynframe/json_io.hpp"
#include "dynframe/linalg.hpp"
#include "dynframe/model_space.hpp"
#include "dynframe/random.hpp"
#include "dynframe/sampling.hpp"
#include "dynframe/version.hpp"

namespace dynframe::cli {

namespace {

using json_io::Json;
using semigroup::Window;
using semigroup::WindowSpec;

// Raised for input problems discovered after argument parsing.
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

Json num(double x) {
  if (std::isfinite(x)) return x;
  return std::isnan(x) ? Json("nan") : Json(x > 0 ? "inf" : "-inf");
}

std::string utc_timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  std::ostringstream os;
  os << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
  return os.str();
}

int thread_budget() {
  if (const char* env = std::getenv("DYNFRAME_THREADS")) {
    char* end = nullptr;
    const long n = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && n >= 1) return static_cast<int>(n);
    throw UsageError("DYNFRAME_THREADS must be a positive integer");
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

class Report {
 public:
  Json config = Json::object();
  Json result = Json::object();
  std::optional<std::uint64_t> seed;

  void check(const std::string& name, double residual, double tolerance) {
    check(name, residual, tolerance, residual <= tolerance);
  }
  void check(const std::string& name, double residual, double tolerance, bool pass) {
    checks_.push_back(Json{{"name", name}, {"residual", num(residual)}, {"tolerance", num(tolerance)}, {"pass", pass}});
    ok_ = ok_ && pass;
  }
  void at_least(const std::string& name, double value, double minimum) {
    const bool pass = value >= minimum;
    checks_.push_back(Json{{"name", name}, {"value", num(value)}, {"minimum", num(minimum)}, {"pass", pass}});
    ok_ = ok_ && pass;
  }
  // Categorical verdicts: the observed value against the expected one.
  void expect(const std::string& name, const std::string& value, const std::string& expected) {
    const bool pass = value == expected;
    checks_.push_back(Json{{"name", name}, {"value", value}, {"expected", expected}, {"pass", pass}});
    ok_ = ok_ && pass;
  }
  void fail(const std::string& message) {
    error_ = message;
    ok_ = false;
  }
  bool ok() const { return ok_; }

  Json finish(const std::string& command) const {
    Json out{{"command", command}, {"version", kVersion}, {"timestamp", utc_timestamp()}};
    out["seed"] = seed ? Json(*seed) : Json(nullptr);
    out["config"] = config;
    out["checks"] = checks_;
    out["result"] = result;
    if (error_) out["error"] = *error_;
    out["passed"] = ok_;
    return out;
  }

 private:
  Json checks_ = Json::array();
  bool ok_ = true;
  std::optional<std::string> error_;
};

std::shared_ptr<const Window> make_window(const semigroup::Descriptor& d, const std::string& spec) {
  return std::make_shared<const Window>(Window::enumerate(d, WindowSpec::parse(spec)));
}

// ---------------------------------------------------------------------------
// Commands. Each fills the report; library errors that indicate a failed
// precondition are recorded by the caller.

struct Options {
  std::string frame_path, tuple_path, xi_path, eta_path, phi_path, scheme_path, samples_path, state_path,
      config_path;
  std::string window = "box:40";
  std::string scheme_name = "poly";
  std::string sensors = "0,1";
  std::string groups;
  std::string numerical;
  std::string free_window;
  std::optional<std::uint64_t> seed;
  int n = 0;
  int k = 1;
  int d = 0;
  int d_min = 2;
  int d_max = 6;
  int trials = 100;
  int controls = 100;
  int nodes = 16;
  int steps = 32;
  int cap = 30;
  int free_k = 0;
  double eps = 0.1;
  double rho_max = 0.9;
  double noise = 0.0;
  double tol = 1e-6;
};

std::vector<int> parse_int_list(const std::string& text, const char* what) {
  std::vector<int> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      out.push_back(std::stoi(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw UsageError(std::string("bad integer in ") + what + ": '" + item + "'");
    }
  }
  if (out.empty()) throw UsageError(std::string(what) + " is empty");
  return out;
}

std::uint64_t require_seed(const Options& o, const char* command) {
  if (!o.seed) throw UsageError(std::string(command) + " is randomized: --seed is required");
  return *o.seed;
}

void cmd_frame_check(const Options& o, Report& r) {
  const frame::Frame f = json_io::frame_from_json(json_io::load(o.frame_path));
  r.config = Json{{"frame", o.frame_path}};
  const frame::FrameReport fr = frame::frame_bounds(f);
  r.result["bounds"] = json_io::to_json(fr);
  const CMatrix s = frame::frame_operator(f);
  const double route = (s - frame::frame_operator_by_sum(f)).norm() / std::max(1.0, s.norm());
  r.check("frame_operator_routes", route, 1e-12);
  r.expect("is_frame", fr.is_frame() ? "yes" : "no", "yes");
  if (!fr.is_frame()) return;
  const frame::Frame dual = frame::canonical_dual(f);
  const frame::FrameReport dr = frame::frame_bounds(dual);
  r.result["dual_bounds"] = json_io::to_json(dr);
  // Dual bounds are the reciprocals (1/C2, 1/C1).
  r.check("dual_bounds", std::abs(dr.bounds.lower * fr.bounds.upper - 1.0) + std::abs(dr.bounds.upper * fr.bounds.lower - 1.0),
          1e-8);
  const CVector x = CVector::Ones(f.dim());
  const CVector coeffs = frame::analysis_matrix(f) * x;
  const auto direct = frame::reconstruct(f, coeffs, frame::Method::DirectDual);
  r.check("reconstruction_direct", (direct.x - x).norm() / x.norm(), 1e-8);
  const auto iter = frame::reconstruct(f, coeffs, frame::Method::Iterative);
  r.result["iterations"] = iter.iterations;
  r.check("reconstruction_iterative", (iter.x - x).norm() / x.norm(), 1e-8);
}

void cmd_orbit(const Options& o, Report& r) {
  const auto t = json_io::tuple_from_json(json_io::load(o.tuple_path));
  const CVector xi = json_io::vector_from_json(json_io::load(o.xi_path));
  r.config = Json{{"tuple", o.tuple_path}, {"xi", o.xi_path}, {"window", o.window}};
  const auto w = make_window(t.descriptor(), o.window);
  const auto diag = dynamical::classify_orbit(t, xi, w);
  r.result["window_size"] = w->size();
  r.result["diagnosis"] = json_io::to_json(diag);
  r.expect("classification", std::string(dynamical::to_string(diag.classification)), "Frame");
}

void cmd_equiv(const Options& o, Report& r) {
  const auto t = json_io::tuple_from_json(json_io::load(o.tuple_path));
  const CVector xi = json_io::vector_from_json(json_io::load(o.xi_path));
  const CVector eta = json_io::vector_from_json(json_io::load(o.eta_path));
  r.config = Json{{"tuple", o.tuple_path}, {"xi", o.xi_path}, {"eta", o.eta_path}, {"window", o.window}};
  r.seed = o.seed;
  const auto w = make_window(t.descriptor(), o.window);
  const commutant::IntertwinerOptions opts;
  const auto rep = commutant::are_equivalent_frame_vectors(t, xi, eta, w, opts);
  r.result["verdict"] = commutant::to_string(rep.verdict);
  r.result["witness"] = json_io::to_json(rep.witness.matrix);
  r.result["xi"] = json_io::to_json(rep.xi_diagnosis);
  r.result["eta"] = json_io::to_json(rep.eta_diagnosis);
  r.check("vector_residual", rep.witness.vector_residual, opts.residual);
  r.check("commutation_residual", rep.witness.commutation_residual, opts.residual);
  const double ratio = rep.witness.sigma_max > 0 ? rep.witness.sigma_min / rep.witness.sigma_max : 0.0;
  r.at_least("sigma_ratio", ratio, opts.invertibility);
  r.check("projector_distance", rep.frame_check.projector_distance, 1e-8);
  r.expect("verdict", std::string(commutant::to_string(rep.verdict)), "Equivalent");
}

void cmd_commutant(const Options& o, Report& r) {
  const auto t = json_io::tuple_from_json(json_io::load(o.tuple_path));
  r.config = Json{{"tuple", o.tuple_path}};
  const auto algebra = t.algebra_generators();
  const auto basis = commutant::commutant_basis(algebra);
  Json mats = Json::array();
  double worst = 0.0;
  for (const CMatrix& b : basis.basis) {
    mats.push_back(json_io::to_json(b));
    worst = std::max(worst, commutant::commutation_residual(b, algebra));
  }
  r.result["dimension"] = basis.size();
  r.result["basis"] = mats;
  r.check("commutation_residual", worst, 1e-10);
  const double ortho = (basis.stacked().adjoint() * basis.stacked() -
                        CMatrix::Identity(static_cast<Eigen::Index>(basis.size()), static_cast<Eigen::Index>(basis.size())))
                           .norm();
  r.check("orthonormality", ortho, 1e-10);
}

void cmd_model_space(const Options& o, Report& r) {
  const auto t = json_io::tuple_from_json(json_io::load(o.tuple_path));
  const CVector xi = json_io::vector_from_json(json_io::load(o.xi_path));
  r.config = Json{{"tuple", o.tuple_path}, {"xi", o.xi_path}, {"window", o.window}};
  const auto w = make_window(t.descriptor(), o.window);
  const auto m = model_space::build_model_space(t, xi, w);
  r.result["window_size"] = w->size();
  r.result["tau"] = num(m.tau);
  r.result["rank"] = m.rank();
  r.result["diagnosis"] = json_io::to_json(m.diagnosis);
  const auto gens = semigroup::generators(t.descriptor());
  for (std::size_t g = 0; g < gens.size(); ++g) {
    const std::string tag = "generator_" + std::to_string(g);
    const auto it = model_space::check_intertwining(m, t, gens[g]);
    r.check(tag + "_intertwining_interior", it.interior.residual, it.interior.tolerance);
    r.check(tag + "_intertwining_full", it.full.residual, it.full.tolerance);
    const auto co = model_space::check_coinvariance(m, gens[g]);
    r.check(tag + "_coinvariance", co.residual, co.tolerance);
  }
  const auto eq = model_space::model_frame_equivalence(m);
  r.check("model_frame_operator_residual", eq.operator_residual, 1e-8);
  r.check("model_frame_projector_distance", eq.projector_distance, 1e-8);
  r.expect("model_frame_equivalent", eq.equivalent ? "yes" : "no", "yes");
}

void cmd_cohyper(const Options& o, Report& r) {
  const std::uint64_t seed = require_seed(o, "cohyper");
  const auto t = json_io::tuple_from_json(json_io::load(o.tuple_path));
  const CVector xi = json_io::vector_from_json(json_io::load(o.xi_path));
  r.config = Json{{"tuple", o.tuple_path}, {"xi", o.xi_path}, {"window", o.window}, {"controls", o.controls}};
  r.seed = seed;
  const auto w = make_window(t.descriptor(), o.window);
  const auto m = model_space::build_model_space(t, xi, w);
  const auto ch = model_space::check_cohyperinvariance(m);
  r.result["tau"] = num(m.tau);
  r.result["worst_element"] = (*w)[ch.worst];
  r.check("cohyperinvariance", ch.check.residual, ch.check.tolerance);
  int failed = 0;
  double smallest = std::numeric_limits<double>::infinity();
  for (int i = 0; i < o.controls; ++i) {
    const CMatrix q = model_space::random_subspace(w->size(), t.dim(), derive_seed(seed, static_cast<std::uint64_t>(i)));
    const double res = model_space::cohyperinvariance(q, *w, m.budget()).check.residual;
    smallest = std::min(smallest, res);
    if (res >= 1e-2) ++failed;
  }
  r.result["controls_failed"] = failed;
  r.result["smallest_control_residual"] = num(smallest);
  const int needed = (95 * o.controls + 99) / 100;
  r.at_least("negative_controls_failed", failed, needed);
}

// Oracle for Fejer averages: 1/(n+1) sum_{k<=n} sum_{j<=k} phi_j, with phi_j
// the homogeneous parts.
CVector fejer_double_sum(const model_space::PolySymbol& phi, int n) {
  CVector out = CVector::Zero(phi.coeffs.size());
  for (int k = 0; k <= n; ++k) {
    for (int j = 0; j <= k; ++j) {
      for (std::size_t i = 0; i < phi.window->size(); ++i) {
        std::int64_t deg = 0;
        for (auto c : (*phi.window)[i]) deg += c;
        if (deg == j) out(static_cast<Eigen::Index>(i)) += phi.coeffs(static_cast<Eigen::Index>(i));
      }
    }
  }
  return out / static_cast<double>(n + 1);
}

void cmd_fejer(const Options& o, Report& r) {
  const auto phi = json_io::poly_from_json(json_io::load(o.phi_path));
  if (o.n < 0) throw UsageError("--n must be >= 0");
  r.config = Json{{"phi", o.phi_path}, {"n", o.n}};
  const auto psi = model_space::fejer_average(phi, o.n);
  r.result["psi"] = json_io::to_json(psi);
  const double scale = std::max(1.0, phi.coeffs.cwiseAbs().maxCoeff());
  r.check("double_sum", (psi.coeffs - fejer_double_sum(phi, o.n)).cwiseAbs().maxCoeff() / scale, 1e-14);
  const Window& w = *phi.window;
  const Window w2 = Window::enumerate(w.descriptor(), model_space::dilate(w.spec()));
  const double lhs = linalg::spectral_norm(model_space::multiplication_operator(psi, w));
  const double rhs = linalg::spectral_norm(model_space::multiplication_operator(phi, w2));
  r.result["norm_psi"] = lhs;
  r.result["norm_phi_dilated"] = rhs;
  r.check("norm_diagnostic", lhs - rhs, 1e-8);
}

void cmd_recover(const Options& o, Report& r) {
  const auto scheme = json_io::scheme_from_json(json_io::load(o.scheme_path));
  r.config = Json{{"scheme", o.scheme_path}, {"noise", o.noise}, {"tolerance", o.tol}};
  std::optional<CVector> truth;
  sampling::SampleTable y;
  if (!o.samples_path.empty()) {
    y = json_io::samples_from_json(json_io::load(o.samples_path));
    r.config["samples"] = o.samples_path;
  }
  if (!o.state_path.empty()) {
    truth = json_io::vector_from_json(json_io::load(o.state_path));
    r.config["state"] = o.state_path;
    if (o.samples_path.empty()) {
      y = sampling::collect_samples(scheme, *truth);
      r.check("sample_routes", y.route_mismatch, sampling::kRouteTolerance);
    }
  }
  if (o.samples_path.empty() && !truth) throw UsageError("recover needs --samples or --state");
  if (o.noise > 0.0) {
    r.seed = require_seed(o, "recover with --noise");
    y = sampling::add_noise(y, o.noise, *r.seed);
  }
  const auto rf = sampling::recovery_frame(scheme);
  r.result["frame"] = json_io::to_json(rf.report);
  Json per = Json::array();
  for (const auto& d : rf.per_sensor) per.push_back(json_io::to_json(d));
  r.result["per_sensor"] = per;
  const auto rep = sampling::recover(scheme, y, truth);
  r.result["recovered"] = json_io::vector_to_json(rep.recovered);
  r.result["noise_gain"] = num(rep.noise_gain);
  if (rep.relative_error) {
    r.result["relative_error"] = num(*rep.relative_error);
    // With noise the tolerance widens by the expected noise amplification.
    const double tol = o.tol + 3.0 * o.noise * rep.noise_gain / std::max(1e-300, truth->norm());
    r.check("relative_error", *rep.relative_error, tol);
  }
}

void cmd_demo(const Options& o, Report& r) {
  const std::uint64_t seed = require_seed(o, "demo");
  const auto sensors = parse_int_list(o.sensors, "--sensors");
  r.config = Json{{"nodes", o.nodes}, {"eps", o.eps}, {"sensors", sensors}, {"steps", o.steps}};
  r.seed = seed;
  const auto demo = sampling::demo_diffusion(o.nodes, o.eps, sensors, o.steps, seed);
  r.result["samples"] = json_io::to_json(demo.samples);
  r.result["frame"] = json_io::to_json(demo.frame.report);
  r.check("sample_routes", demo.samples.route_mismatch, sampling::kRouteTolerance);
  r.expect("sampling_family", std::string(frame::to_string(demo.frame.report.classification)),
           demo.frame.report.classification == frame::Classification::Parseval ? "Parseval" : "Frame");
  if (demo.recovery) {
    r.result["relative_error"] = num(*demo.recovery->relative_error);
    r.check("relative_error", *demo.recovery->relative_error, 1e-6);
    const auto study = sampling::noise_study(demo.scheme, demo.truth, {1e-4, 1e-3, 1e-2}, derive_seed(seed, 1));
    Json pts = Json::array();
    for (const auto& p : study.points) pts.push_back(Json{{"sigma", p.sigma}, {"error", num(p.error)}});
    r.result["noise"] = pts;
    r.check("noise_slope", std::abs(study.slope - 1.0), 0.05);
  }
  // A single sensor cannot see the repeated eigenvalues of the cycle.
  const auto single = sampling::demo_diffusion(o.nodes, o.eps, {sensors.front()}, o.steps, seed);
  r.result["single_sensor_frame"] = json_io::to_json(single.frame.report);
  r.expect("single_sensor", std::string(frame::to_string(single.frame.report.classification)), "Incomplete");
}

void cmd_centrality(const Options& o, Report& r) {
  const std::uint64_t seed = require_seed(o, "centrality");
  commutant::ExperimentConfig cfg;
  if (!o.config_path.empty()) cfg = json_io::config_from_json(json_io::load(o.config_path));
  cfg.k = o.k;
  if (o.d > 0) {
    cfg.d_min = cfg.d_max = o.d;
  } else {
    cfg.d_min = o.d_min;
    cfg.d_max = o.d_max;
  }
  cfg.scheme = dynamical::parse_scheme(o.scheme_name);
  cfg.rho_max = o.rho_max;
  cfg.trials = o.trials;
  cfg.seed = seed;
  if (!o.groups.empty()) cfg.group_orders = parse_int_list(o.groups, "--groups");
  cfg.threads = thread_budget();
  r.config = json_io::to_json(cfg);
  r.seed = seed;
  const auto rep = commutant::centrality_experiment(cfg);
  Json trials = Json::array();
  for (const auto& t : rep.trials) {
    Json j{{"trial", t.trial},
           {"seed", t.seed},
           {"d", t.d},
           {"window", t.window},
           {"commutant_dim", t.commutant_dim},
           {"resamples", t.resamples},
           {"certified", t.certified},
           {"verdict", commutant::to_string(t.verdict)},
           {"vector_residual", num(t.vector_residual)},
           {"commutation_residual", num(t.commutation_residual)},
           {"sigma_ratio", num(t.sigma_ratio)},
           {"projector_distance", num(t.projector_distance)}};
    if (!t.error.empty()) j["error"] = t.error;
    trials.push_back(std::move(j));
  }
  r.result["trials"] = trials;
  r.result["certified"] = rep.certified;
  r.result["equivalent"] = rep.equivalent;
  r.at_least("equivalent_pairs", rep.equivalent, cfg.trials);
  r.check("max_vector_residual", rep.max_vector_residual, 1e-8);
  r.check("max_commutation_residual", rep.max_commutation_residual, 1e-8);
  r.at_least("min_sigma_ratio", rep.min_sigma_ratio, 1e-8);
}

void cmd_conjecture_probe(const Options& o, Report& r) {
  semigroup::Descriptor d = semigroup::Descriptor::free_abelian(1);
  std::string spec;
  if (!o.numerical.empty()) {
    d = semigroup::Descriptor::numerical(parse_int_list(o.numerical, "--numerical"));
    spec = "cap:" + std::to_string(o.cap);
  } else if (o.free_k > 0) {
    d = semigroup::Descriptor::free_abelian(o.free_k);
    spec = o.free_window.empty() ? "box:" + std::to_string(o.cap) : o.free_window;
  } else {
    throw UsageError("conjecture-probe needs --numerical or --free");
  }
  r.config = Json{{"semigroup", json_io::to_json(d)}, {"window", spec}};
  const Window w = Window::enumerate(d, WindowSpec::parse(spec));
  if (w.size() > 120) throw UsageError("window too large for a dense commutant computation (|W| > 120)");
  const auto basis = commutant::commutant_basis(model_space::truncated_shifts(w));
  const auto n = static_cast<Eigen::Index>(w.size());
  CMatrix conv(n * n, n);
  for (Eigen::Index m = 0; m < n; ++m) {
    conv.col(m) = model_space::truncated_convolution(CVector::Unit(n, m), w).reshaped();
  }
  r.result["window_size"] = w.size();
  r.result["commutant_dimension"] = basis.size();
  r.check("dimension_gap", std::abs(static_cast<double>(basis.size()) - static_cast<double>(w.size())), 0.0);
  if (basis.size() == w.size()) {
    r.check("span_angle", linalg::max_principal_angle(basis.stacked(), linalg::orthonormal_range(conv)), 1e-8);
  }
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Dynamical frames: orbits, commutants, model spaces and dynamical sampling"};
  app.require_subcommand(1);
  app.set_version_flag("--version", kVersion);
  Options o;
  std::string report_path;
  std::uint64_t seed_value = 0;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--out", report_path, "Report path")->default_val("dynframe-" + sub->get_name() + ".json");
  };
  auto add_seed = [&](CLI::App* sub) { sub->add_option("--seed", seed_value, "RNG seed"); };

  auto* frame_check = app.add_subcommand("frame-check", "Bounds, classification and reconstruction of a finite frame");
  frame_check->add_option("--frame", o.frame_path, "Frame JSON")->required();
  add_common(frame_check);

  auto* orbit = app.add_subcommand("orbit", "Classify the orbit of xi on a window");
  orbit->add_option("--tuple", o.tuple_path)->required();
  orbit->add_option("--xi", o.xi_path)->required();
  orbit->add_option("--window", o.window);
  add_common(orbit);

  auto* equiv = app.add_subcommand("equiv", "Intertwiner between two frame vectors");
  equiv->add_option("--tuple", o.tuple_path)->required();
  equiv->add_option("--xi", o.xi_path)->required();
  equiv->add_option("--eta", o.eta_path)->required();
  equiv->add_option("--window", o.window);
  add_seed(equiv);
  add_common(equiv);

  auto* comm = app.add_subcommand("commutant", "Basis of the commutant of a tuple");
  comm->add_option("--tuple", o.tuple_path)->required();
  add_common(comm);

  auto* model = app.add_subcommand("model-space", "Model-space identities on a certified window");
  model->add_option("--tuple", o.tuple_path)->required();
  model->add_option("--xi", o.xi_path)->required();
  model->add_option("--window", o.window);
  add_common(model);

  auto* cohyper = app.add_subcommand("cohyper", "Co-hyperinvariance with random-projector controls");
  cohyper->add_option("--tuple", o.tuple_path)->required();
  cohyper->add_option("--xi", o.xi_path)->required();
  cohyper->add_option("--window", o.window);
  cohyper->add_option("--controls", o.controls)->check(CLI::PositiveNumber);
  add_seed(cohyper);
  add_common(cohyper);

  auto* fejer = app.add_subcommand("fejer", "Fejer average of a polynomial symbol");
  fejer->add_option("--phi", o.phi_path)->required();
  fejer->add_option("--n", o.n)->required();
  add_common(fejer);

  auto* recover = app.add_subcommand("recover", "Recover a state from space-time samples");
  recover->add_option("--scheme", o.scheme_path)->required();
  recover->add_option("--samples", o.samples_path);
  recover->add_option("--state", o.state_path);
  recover->add_option("--noise", o.noise)->check(CLI::NonNegativeNumber);
  recover->add_option("--tol", o.tol);
  add_seed(recover);
  add_common(recover);

  auto* demo = app.add_subcommand("demo", "Diffusion on a cycle: sample, certify, recover");
  demo->add_option("--nodes", o.nodes);
  demo->add_option("--eps", o.eps);
  demo->add_option("--sensors", o.sensors);
  demo->add_option("--steps", o.steps);
  add_seed(demo);
  add_common(demo);

  auto* centrality = app.add_subcommand("centrality", "Random frame-vector pairs and their intertwiners");
  centrality->add_option("--k", o.k)->check(CLI::Range(1, 6));
  centrality->add_option("--d", o.d)->check(CLI::Range(1, 64));
  centrality->add_option("--d-min", o.d_min);
  centrality->add_option("--d-max", o.d_max);
  centrality->add_option("--trials", o.trials)->check(CLI::PositiveNumber);
  centrality->add_option("--scheme", o.scheme_name);
  centrality->add_option("--rho-max", o.rho_max);
  centrality->add_option("--groups", o.groups, "Finite group orders, e.g. 2 or 3,3");
  centrality->add_option("--config", o.config_path);
  add_seed(centrality);
  add_common(centrality);

  auto* probe = app.add_subcommand("conjecture-probe", "Commutant dimension of truncated shifts");
  probe->add_option("--numerical", o.numerical, "Numerical semigroup generators, e.g. 2,3");
  probe->add_option("--free", o.free_k, "Rank k of Z+^k");
  probe->add_option("--window", o.free_window);
  probe->add_option("--cap", o.cap);
  add_common(probe);

  try {
    app.parse(std::vector<std::string>(args.rbegin(), args.rend()));
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kUsage;
  }

  CLI::App* sub = app.get_subcommands().front();
  if (const CLI::Option* opt = sub->get_option_no_throw("--seed"); opt && !opt->empty()) o.seed = seed_value;
  const std::string name = sub->get_name();

  static const std::map<std::string, std::function<void(const Options&, Report&)>> commands{
      {"frame-check", cmd_frame_check}, {"orbit", cmd_orbit},
      {"equiv", cmd_equiv},             {"commutant", cmd_commutant},
      {"model-space", cmd_model_space}, {"cohyper", cmd_cohyper},
      {"fejer", cmd_fejer},             {"recover", cmd_recover},
      {"demo", cmd_demo},               {"centrality", cmd_centrality},
      {"conjecture-probe", cmd_conjecture_probe}};

  Report report;
  try {
    commands.at(name)(o, report);
  } catch (const UsageError& e) {
    err << name << ": " << e.what() << '\n';
    return kUsage;
  } catch (const InvalidArgument& e) {
    err << name << ": " << e.what() << '\n';
    return kUsage;
  } catch (const DimMismatch& e) {
    err << name << ": " << e.what() << '\n';
    return kUsage;
  } catch (const IndexMismatch& e) {
    err << name << ": " << e.what() << '\n';
    return kUsage;
  } catch (const CommutationViolated& e) {
    err << name << ": " << e.what() << '\n';
    return kUsage;
  } catch (const NotHermitian& e) {
    err << name << ": " << e.what() << '\n';
    return kUsage;
  } catch (const Error& e) {
    // Computed, but a precondition or verdict failed (uncertified window,
    // not a frame, inconsistent verdicts, ...).
    report.fail(e.what());
  }

  try {
    json_io::save_atomic(report_path, report.finish(name));
  } catch (const Error& e) {
    err << name << ": " << e.what() << '\n';
    return kUsage;
  }
  out << name << ": " << (report.ok() ? "passed" : "FAILED") << " (report: " << report_path << ")\n";
  return report.ok() ? kOk : kCheckFailed;
}

}  // namespace dynframe::cli

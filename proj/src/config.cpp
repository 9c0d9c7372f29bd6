#include "tzitzeica/config.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <tuple>

#include "tzitzeica/errors.hpp"

namespace tz::config {

using nlohmann::json;

namespace {

std::string join(const std::string& path, const std::string& key) {
  return path.empty() ? key : path + "." + key;
}

// An object whose keys are consumed one by one; finish() rejects leftovers.
class Section {
 public:
  Section(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) throw ConfigError("expected an object", path_);
  }

  const json* find(const std::string& key) {
    used_.insert(key);
    auto it = j_.find(key);
    return it == j_.end() ? nullptr : &*it;
  }

  const json& require(const std::string& key) {
    const json* v = find(key);
    if (!v) throw ConfigError("missing required key", at(key));
    return *v;
  }

  std::string at(const std::string& key) const { return join(path_, key); }

  void finish() const {
    for (auto it = j_.begin(); it != j_.end(); ++it)
      if (!used_.count(it.key())) throw ConfigError("unknown key", at(it.key()));
  }

 private:
  const json& j_;
  std::string path_;
  std::set<std::string> used_;
};

double number(const json& j, const std::string& path) {
  if (!j.is_number()) throw ConfigError("expected a number", path);
  const double v = j.get<double>();
  if (!std::isfinite(v)) throw ConfigError("expected a finite number", path);
  return v;
}

double positive(const json& j, const std::string& path) {
  const double v = number(j, path);
  if (!(v > 0.0)) throw ConfigError("expected a positive number", path);
  return v;
}

int integer(const json& j, const std::string& path, int min) {
  if (!j.is_number_integer()) throw ConfigError("expected an integer", path);
  const auto v = j.get<long long>();
  if (v < min || v > 1'000'000'000) throw ConfigError("integer out of range", path);
  return static_cast<int>(v);
}

bool boolean(const json& j, const std::string& path) {
  if (!j.is_boolean()) throw ConfigError("expected true or false", path);
  return j.get<bool>();
}

std::string string(const json& j, const std::string& path) {
  if (!j.is_string()) throw ConfigError("expected a string", path);
  return j.get<std::string>();
}

cplx complex(const json& j, const std::string& path) {
  if (!j.is_array() || j.size() != 2) throw ConfigError("expected a [re, im] pair", path);
  return {number(j[0], path + "[0]"), number(j[1], path + "[1]")};
}

const json& array(const json& j, const std::string& path) {
  if (!j.is_array()) throw ConfigError("expected an array", path);
  return j;
}

std::vector<double> numbers(const json& j, const std::string& path) {
  std::vector<double> out;
  for (std::size_t n = 0; n < array(j, path).size(); ++n)
    out.push_back(number(j[n], path + "[" + std::to_string(n) + "]"));
  return out;
}

std::vector<cplx> complexes(const json& j, const std::string& path) {
  std::vector<cplx> out;
  for (std::size_t n = 0; n < array(j, path).size(); ++n)
    out.push_back(complex(j[n], path + "[" + std::to_string(n) + "]"));
  return out;
}

Eigen::VectorXcd complex_vector(const json& j, const std::string& path) {
  const auto v = complexes(j, path);
  return Eigen::Map<const Eigen::VectorXcd>(v.data(), static_cast<Eigen::Index>(v.size()));
}

std::pair<double, double> interval(const json& j, const std::string& path) {
  const auto v = numbers(j, path);
  if (v.size() != 2) throw ConfigError("expected [lo, hi]", path);
  return {v[0], v[1]};
}

GridSpec grid(const json& j, const std::string& path) {
  Section s(j, path);
  GridSpec g;
  std::tie(g.x0, g.x1) = interval(s.require("x"), s.at("x"));
  std::tie(g.t0, g.t1) = interval(s.require("t"), s.at("t"));
  g.nx = integer(s.require("nx"), s.at("nx"), 3);
  g.nt = integer(s.require("nt"), s.at("nt"), 3);
  s.finish();
  try {
    g.validate();
  } catch (const ConfigError& e) {
    throw ConfigError(e.what(), path);
  }
  return g;
}

theta::TruncationPolicy truncation(const json& j, const std::string& path) {
  Section s(j, path);
  theta::TruncationPolicy p;
  if (auto v = s.find("target_abs_error")) p.target_abs_error = positive(*v, s.at("target_abs_error"));
  if (auto v = s.find("max_radius")) p.max_radius = integer(*v, s.at("max_radius"), 1);
  if (auto v = s.find("zero_threshold")) p.zero_threshold = positive(*v, s.at("zero_threshold"));
  s.finish();
  try {
    p.validate();
  } catch (const ConfigError& e) {
    throw ConfigError(e.what(), path);
  }
  return p;
}

background::BackgroundData background_section(const json& j) {
  const std::string path = "background";
  if (j.is_string()) {
    if (j.get<std::string>() != "vacuum")
      throw ConfigError("expected \"vacuum\" or a finite-gap object", path);
    return background::BackgroundData::vacuum();
  }
  Section s(j, path);
  background::BackgroundData d;
  d.genus = integer(s.require("genus"), s.at("genus"), 1);
  d.c = complex(s.require("c"), s.at("c"));
  d.U = complex_vector(s.require("U"), s.at("U"));
  d.V = complex_vector(s.require("V"), s.at("V"));
  d.zD = complex_vector(s.require("zD"), s.at("zD"));

  const json& rows = array(s.require("prym"), s.at("prym"));
  Eigen::MatrixXcd b(rows.size(), rows.size());
  for (std::size_t r = 0; r < rows.size(); ++r) {
    const std::string rp = s.at("prym") + "[" + std::to_string(r) + "]";
    const auto row = complexes(rows[r], rp);
    if (row.size() != rows.size()) throw ConfigError("period matrix must be square", rp);
    for (std::size_t c = 0; c < row.size(); ++c) b(r, c) = row[c];
  }
  try {
    d.prym.emplace(b);
  } catch (const InvalidPeriodMatrix& e) {
    throw ConfigError(e.what(), s.at("prym"));
  }
  if (auto v = s.find("truncation")) d.policy = truncation(*v, s.at("truncation"));
  s.finish();
  try {
    d.validate();
  } catch (const ConfigError& e) {
    throw ConfigError(e.what(), e.key().empty() ? path : e.key());
  }
  return d;
}

void solitons_section(const json& j, RunConfig& cfg) {
  const std::string path = "solitons";
  Section s(j, path);
  const std::string placement = string(s.require("placement"), s.at("placement"));
  const auto c = complexes(s.require("C"), s.at("C"));
  try {
    if (placement == "canonical") {
      const auto lambdas = complexes(s.require("lambdas"), s.at("lambdas"));
      if (lambdas.size() != c.size())
        throw ConfigError("lambdas and C differ in length", s.at("C"));
      cfg.solitons = dressing::SolitonConfig::canonical(lambdas, c);
    } else if (placement == "explicit") {
      const json& pts = array(s.require("points"), s.at("points"));
      std::vector<std::pair<cplx, cplx>> ks;
      for (std::size_t n = 0; n < pts.size(); ++n) {
        Section p(pts[n], s.at("points") + "[" + std::to_string(n) + "]");
        ks.emplace_back(complex(p.require("k"), p.at("k")),
                        complex(p.require("k_star"), p.at("k_star")));
        p.finish();
      }
      if (ks.size() != c.size()) throw ConfigError("points and C differ in length", s.at("C"));
      cfg.solitons = dressing::SolitonConfig::explicit_points(ks, c);
    } else {
      throw ConfigError("placement must be \"canonical\" or \"explicit\"", s.at("placement"));
    }
  } catch (const ConfigError& e) {
    if (!e.key().empty()) throw;
    throw ConfigError(e.what(), path);
  }
  if (auto v = s.find("kernel_scale")) {
    const cplx k = complex(*v, s.at("kernel_scale"));
    if (k == 0.0) throw ConfigError("kernel scale must be nonzero", s.at("kernel_scale"));
    cfg.dressing.kernel_scale = k;
  }
  if (auto v = s.find("singular_threshold"))
    cfg.dressing.singular_threshold = positive(*v, s.at("singular_threshold"));
  s.finish();
}

void verify_section(const json& j, VerifySection& out) {
  Section s(j, "verify");
  if (auto v = s.find("tolerances")) {
    Section t(*v, s.at("tolerances"));
    auto set = [&](const char* key, double& field) {
      if (auto w = t.find(key)) field = positive(*w, t.at(key));
    };
    Tolerances& tol = out.tol;
    set("residual_lightcone", tol.residual_lightcone);
    set("residual_lab", tol.residual_lab);
    set("goursat_order_min", tol.goursat_order_min);
    set("goursat_order_max", tol.goursat_order_max);
    set("lax_analytic", tol.lax_analytic);
    set("lax_fd_order_min", tol.lax_fd_order_min);
    set("residue_identity", tol.residue_identity);
    set("route_equivalence", tol.route_equivalence);
    set("normalization_defect", tol.normalization_defect);
    set("tracking", tol.tracking);
    t.finish();
    if (tol.goursat_order_min > tol.goursat_order_max)
      throw ConfigError("order band is empty", t.at("goursat_order_min"));
  }
  if (auto v = s.find("stencil")) {
    Section st(*v, s.at("stencil"));
    if (auto w = st.find("step")) out.stencil.step = positive(*w, st.at("step"));
    if (auto w = st.find("richardson")) out.stencil.richardson = boolean(*w, st.at("richardson"));
    if (auto w = st.find("buffer")) out.stencil.buffer = integer(*w, st.at("buffer"), 0);
    st.finish();
  }
  if (auto v = s.find("lab_grid")) out.lab_grid = grid(*v, s.at("lab_grid"));
  if (auto v = s.find("goursat")) {
    Section g(*v, s.at("goursat"));
    GoursatSection gs;
    gs.grid = grid(g.require("grid"), g.at("grid"));
    if (auto w = g.find("levels")) gs.levels = integer(*w, g.at("levels"), 2);
    if (gs.levels > 12) throw ConfigError("at most 12 levels", g.at("levels"));
    g.finish();
    out.goursat = gs;
  }
  if (auto v = s.find("lax")) {
    Section l(*v, s.at("lax"));
    if (auto w = l.find("points")) {
      out.lax.points.clear();
      const json& pts = array(*w, l.at("points"));
      for (std::size_t n = 0; n < pts.size(); ++n)
        out.lax.points.push_back(interval(pts[n], l.at("points") + "[" + std::to_string(n) + "]"));
    }
    if (auto w = l.find("k")) {
      out.lax.k = complexes(*w, l.at("k"));
      for (cplx k : out.lax.k)
        if (k == 0.0) throw ConfigError("k = 0 is a marked point", l.at("k"));
    }
    if (auto w = l.find("fd_steps")) {
      out.lax.fd_steps = numbers(*w, l.at("fd_steps"));
      for (double h : out.lax.fd_steps)
        if (!(h > 0.0)) throw ConfigError("steps must be positive", l.at("fd_steps"));
    }
    l.finish();
  }
  if (auto v = s.find("route_points")) out.route_points = integer(*v, s.at("route_points"), 0);
  if (auto v = s.find("residue")) {
    Section r(*v, s.at("residue"));
    if (auto w = r.find("radius")) out.residue_radius = positive(*w, r.at("radius"));
    if (auto w = r.find("quadrature")) out.residue_quadrature = integer(*w, r.at("quadrature"), 8);
    r.finish();
  }
  if (auto v = s.find("inject")) {
    Section in(*v, s.at("inject"));
    Injection inj;
    std::tie(inj.x, inj.t) = interval(in.require("at"), in.at("at"));
    if (auto w = in.find("amplitude")) inj.amplitude = number(*w, in.at("amplitude"));
    if (auto w = in.find("width")) inj.width = positive(*w, in.at("width"));
    in.finish();
    out.inject = inj;
  }
  s.finish();
}

void kinematics_section(const json& j, KinematicsSection& out, int n_solitons) {
  Section s(j, "kinematics");
  if (auto v = s.find("epsilons")) out.epsilons = numbers(*v, s.at("epsilons"));
  if (auto v = s.find("track")) {
    Section t(*v, s.at("track"));
    TrackSection tr;
    if (auto w = t.find("times")) std::tie(tr.t_lo, tr.t_hi) = interval(*w, t.at("times"));
    if (!(tr.t_hi > tr.t_lo) || tr.t_lo < 0.0)
      throw ConfigError("need 0 <= lo < hi", t.at("times"));
    if (auto w = t.find("samples")) tr.samples = integer(*w, t.at("samples"), 2);
    const json& ws = array(t.require("windows"), t.at("windows"));
    for (std::size_t n = 0; n < ws.size(); ++n) {
      Section w(ws[n], t.at("windows") + "[" + std::to_string(n) + "]");
      TrackWindow tw;
      tw.center = number(w.require("center"), w.at("center"));
      if (auto x = w.find("drift")) tw.drift = number(*x, w.at("drift"));
      if (auto x = w.find("half_width")) tw.half_width = positive(*x, w.at("half_width"));
      if (auto x = w.find("samples")) tw.samples = integer(*x, w.at("samples"), 5);
      w.finish();
      tr.windows.push_back(tw);
    }
    if (static_cast<int>(tr.windows.size()) != n_solitons)
      throw ConfigError("one window per soliton", t.at("windows"));
    t.finish();
    out.track = tr;
  }
  s.finish();
}

void output_section(const json& j, OutputSection& out) {
  Section s(j, "output");
  auto path = [&](const char* key, std::optional<std::string>& field) {
    if (auto v = s.find(key)) field = string(*v, s.at(key));
  };
  path("field", out.field);
  path("verify", out.verify);
  path("scan", out.scan);
  path("velocities", out.velocities);
  s.finish();
}

}  // namespace

RunConfig parse_config(const json& doc) {
  Section s(doc, "");
  RunConfig cfg;
  cfg.background = background_section(s.require("background"));
  solitons_section(s.require("solitons"), cfg);
  if (cfg.background.genus > 0 && cfg.solitons.size() > 0)
    throw ConfigError("solitons on a finite-gap background are not supported", "solitons");
  cfg.grid = grid(s.require("grid"), "grid");
  if (auto v = s.find("scan")) {
    Section sc(*v, "scan");
    if (auto w = sc.find("threshold")) cfg.scan_threshold = positive(*w, sc.at("threshold"));
    sc.finish();
  }
  if (auto v = s.find("verify")) verify_section(*v, cfg.verify);
  if (auto v = s.find("kinematics")) kinematics_section(*v, cfg.kinematics, cfg.solitons.size());
  if (auto v = s.find("output")) output_section(*v, cfg.output);
  s.finish();
  return cfg;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path);
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("malformed JSON: ") + e.what());
  }
  return parse_config(doc);
}

}  // namespace tz::config

#include "tzitzeica/commands.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <istream>
#include <ostream>
#include <random>
#include <sstream>

#include "tzitzeica/asymptotics.hpp"
#include "tzitzeica/background.hpp"
#include "tzitzeica/dressing.hpp"
#include "tzitzeica/errors.hpp"

namespace tz::commands {

using nlohmann::json;

namespace {

constexpr const char* kFieldHeader = "x,t,re_u,im_u,re_exp_u,im_exp_u,flag";

json complex_json(cplx z) { return json::array({z.real(), z.imag()}); }

json optional_json(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

// Non-finite numbers would serialize as null; keep them explicit instead.
json number_json(double v) { return std::isfinite(v) ? json(v) : json(format_double(v)); }

class InjectedSource final : public FieldSource {
 public:
  InjectedSource(const FieldSource& src, config::Injection inj) : src_(src), inj_(inj) {}
  cplx exp_u(double x, double t) const override {
    const double r2 = (x - inj_.x) * (x - inj_.x) + (t - inj_.t) * (t - inj_.t);
    return src_.exp_u(x, t) * (1.0 + inj_.amplitude * std::exp(-r2 / (inj_.width * inj_.width)));
  }
  cplx exp_v(double x, double t) const override { return src_.exp_v(x, t); }

 private:
  const FieldSource& src_;
  config::Injection inj_;
};

std::shared_ptr<const curve::VacuumBackground> vacuum() {
  static const auto bg = std::make_shared<const curve::VacuumBackground>();
  return bg;
}

std::unique_ptr<dressing::DressedField> dressed(const config::RunConfig& cfg) {
  if (cfg.background.genus > 0) return nullptr;
  return std::make_unique<dressing::DressedField>(vacuum(), cfg.solitons, cfg.dressing);
}

json residual_json(const verify::VerificationReport& r, double tol) {
  json j;
  j["max_abs_residual"] = r.max_abs_residual;
  j["rel_residual"] = r.rel_residual;
  j["max_abs_exp_u"] = r.max_abs_exp_u;
  j["checked"] = r.checked;
  j["excluded"] = r.excluded;
  j["flagged"] = r.flagged.size();
  j["argmax"] = r.argmax_x ? json::array({*r.argmax_x, *r.argmax_t}) : json(nullptr);
  j["tolerance"] = tol;
  j["pass"] = r.checked > 0 && r.rel_residual <= tol;
  return j;
}

json skipped(const std::string& note) { return {{"skipped", true}, {"note", note}, {"pass", true}}; }

json goursat_json(const FieldSource& src, const config::RunConfig& cfg) {
  if (!cfg.verify.goursat) return skipped("no goursat grid configured");
  verify::GoursatOptions go;
  go.levels = cfg.verify.goursat->levels;
  const auto r = verify::goursat_cross_check(src, cfg.verify.goursat->grid, go);
  const auto& tol = cfg.verify.tol;
  json j;
  j["skipped"] = r.skipped;
  j["blow_up"] = r.blow_up;
  j["note"] = r.note;
  j["levels"] = go.levels;
  j["deviations"] = r.deviations;
  j["orders"] = r.orders;
  j["convergence_order"] = optional_json(r.convergence_order);
  j["order_band"] = json::array({tol.goursat_order_min, tol.goursat_order_max});
  bool pass = !r.blow_up;
  if (!r.skipped && !r.blow_up) {
    pass = !r.orders.empty();
    for (double o : r.orders) pass = pass && o >= tol.goursat_order_min && o <= tol.goursat_order_max;
  }
  j["pass"] = pass;
  return j;
}

json lax_json(const config::RunConfig& cfg) {
  if (cfg.background.genus > 0) return skipped("Baker-Akhiezer vector available for the vacuum only");
  const auto& lx = cfg.verify.lax;
  const auto bg = vacuum();
  double analytic = 0.0;
  std::vector<double> fd(lx.fd_steps.size(), 0.0);
  for (const auto& [x, t] : lx.points)
    for (cplx k : lx.k) {
      const curve::SpectralPoint p(k);
      const auto d = verify::lax_check(x, t, p, *bg);
      analytic = std::max({analytic, d.x_equation, d.t_equation});
      for (std::size_t s = 0; s < fd.size(); ++s) {
        verify::LaxOptions o;
        o.fd_step = lx.fd_steps[s];
        const auto e = verify::lax_check(x, t, p, *bg, o);
        fd[s] = std::max({fd[s], e.x_equation, e.t_equation});
      }
    }
  json j;
  j["analytic"] = analytic;
  j["fd_steps"] = lx.fd_steps;
  j["fd_deviations"] = fd;
  json orders = json::array();
  bool pass = analytic <= cfg.verify.tol.lax_analytic;
  for (std::size_t s = 0; s + 1 < fd.size(); ++s) {
    const double o = std::log(fd[s] / fd[s + 1]) / std::log(lx.fd_steps[s] / lx.fd_steps[s + 1]);
    orders.push_back(number_json(o));
    pass = pass && std::isfinite(o) && o >= cfg.verify.tol.lax_fd_order_min;
  }
  j["fd_orders"] = orders;
  j["pass"] = pass;
  return j;
}

json residue_json(const config::RunConfig& cfg, const dressing::DressedField& f) {
  const auto cols = cfg.solitons.column_points();
  const curve::SpectralPoint q = cols.empty() ? curve::SpectralPoint(1.0) : cols.front();
  const int n = cfg.verify.residue_quadrature;
  const double radius = std::min(cfg.verify.residue_radius, 0.5 * std::abs(q.k()));
  const auto a = dressing::residue_identity_check(q, *vacuum(), n, radius, 0.0, 0.0, f.kernel_scale());
  const auto b = dressing::residue_identity_check(q, *vacuum(), n, radius, 0.7, -0.4, f.kernel_scale());
  const double dev = std::max(std::abs(a.value - 1.0), std::abs(a.refined - 1.0));
  const double drift = std::abs(a.refined - b.refined);
  json j;
  j["point"] = complex_json(q.k());
  j["radius"] = radius;
  j["value"] = complex_json(a.value);
  j["refined"] = complex_json(a.refined);
  j["deviation"] = dev;
  j["xt_drift"] = drift;
  j["pass"] = a.converged && dev <= cfg.verify.tol.residue_identity &&
              drift <= cfg.verify.tol.residue_identity;
  return j;
}

json route_json(const config::RunConfig& cfg, const dressing::DressedField& f,
                const RunOptions& opts) {
  json j;
  const int want = cfg.solitons.size() > 0 ? cfg.verify.route_points : 0;
  std::mt19937_64 rng(opts.seed);
  std::uniform_real_distribution<double> ux(cfg.grid.x0, cfg.grid.x1), ut(cfg.grid.t0, cfg.grid.t1);
  double max_rel = 0.0, max_defect = 0.0;
  int used = 0, singular = 0;
  for (int attempt = 0; used < want && attempt < 20 * want; ++attempt) {
    const double x = ux(rng), t = ut(rng);
    try {
      const cplx a = f.exp_u(x, t);
      const cplx b = f.exp_u_via_linear_system(x, t);
      max_rel = std::max(max_rel, std::abs(a - b) / std::abs(a));
      max_defect = std::max(max_defect, std::abs(f.normalization_defect(x, t)));
      ++used;
    } catch (const SolutionSingular&) {
      ++singular;
    }
  }
  j["points"] = used;
  j["skipped_singular"] = singular;
  j["max_rel_difference"] = max_rel;
  j["max_normalization_defect"] = max_defect;
  j["pass"] = used == want && max_rel <= cfg.verify.tol.route_equivalence &&
              max_defect <= cfg.verify.tol.normalization_defect;
  return j;
}

json kinematics_json(const config::RunConfig& cfg, const FieldSource* src, double tol,
                     bool& pass) {
  json arr = json::array();
  pass = true;
  if (cfg.background.genus > 0) return arr;
  const auto bg = vacuum();
  const auto& track = cfg.kinematics.track;
  for (int j = 0; j < cfg.solitons.size(); ++j) {
    json e;
    e["index"] = j;
    e["lambda"] = complex_json(cfg.solitons.lambda(j));
    const auto g = asymptotics::growth_exponents(cfg.solitons, *bg, j);
    e["d_kappa_inf"] = g.d_kappa_inf;
    e["d_kappa_0"] = g.d_kappa_0;
    std::optional<double> v, slope;
    try {
      v = asymptotics::velocity_lightcone(cfg.solitons, *bg, j);
    } catch (const DegenerateTrajectory& ex) {
      e["v_error"] = ex.what();
    }
    try {
      slope = asymptotics::trajectory_slope(cfg.solitons, *bg, j);
    } catch (const DegenerateTrajectory& ex) {
      e["slope_error"] = ex.what();
    }
    e["v"] = optional_json(v);
    e["slope"] = optional_json(slope);
    json lab = json::array();
    for (double eps : cfg.kinematics.epsilons) {
      json l{{"eps", eps}};
      try {
        if (!v) throw DegenerateTrajectory("no light-cone velocity");
        l["V"] = asymptotics::velocity_lab(*v, eps);
      } catch (const DegenerateTrajectory& ex) {
        l["V"] = nullptr;
        l["error"] = ex.what();
      }
      lab.push_back(l);
    }
    e["lab"] = lab;

    if (track && src) {
      const auto& w = track->windows[j];
      json tj;
      if (!slope && !w.drift) {
        tj["error"] = "no drift for the window";
        pass = false;
      } else {
        asymptotics::XWindow xw{w.center, w.drift ? *w.drift : *slope, w.half_width, w.samples};
        asymptotics::TrackOptions to;
        to.split_intercepts = cfg.solitons.size() > 1;
        try {
          const auto tr = asymptotics::track_trajectory(
              *src, asymptotics::symmetric_times(track->t_lo, track->t_hi, track->samples), xw, to);
          tj["slope"] = tr.slope;
          tj["intercepts"] = json::array({tr.intercept_before, tr.intercept_after});
          tj["rms"] = tr.rms;
          tj["slices"] = tr.points.size();
          if (slope) {
            const double rel = std::abs(tr.slope - *slope) / std::abs(*slope);
            tj["rel_error"] = rel;
            tj["pass"] = rel <= tol;
            pass = pass && rel <= tol;
          }
        } catch (const TrackingFailed& ex) {
          tj["error"] = ex.what();
          tj["pass"] = false;
          pass = false;
        }
      }
      e["tracked"] = tj;
    }
    arr.push_back(e);
  }
  return arr;
}

std::vector<NodeFlag> merge(std::vector<NodeFlag> a, const std::vector<NodeFlag>& b) {
  for (std::size_t n = 0; n < a.size(); ++n)
    if (a[n] == NodeFlag::ok) a[n] = b[n];
  return a;
}

}  // namespace

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string error_json(const std::string& kind, const std::string& message,
                       const std::string& key) {
  json j{{"error", kind}, {"message", message}};
  if (!key.empty()) j["key"] = key;
  return j.dump();
}

std::unique_ptr<FieldSource> make_source(const config::RunConfig& cfg) {
  if (cfg.background.genus > 0) return std::make_unique<background::BackgroundField>(cfg.background);
  return dressed(cfg);
}

FieldGrid field_grid(const config::RunConfig& cfg, const RunOptions& opts) {
  const auto src = make_source(cfg);
  FieldGrid f = sample_field(*src, cfg.grid, opts.threads);
  if (const auto d = dressed(cfg); d && cfg.solitons.size() > 0) {
    const auto s = verify::singularity_scan(*d, cfg.grid, cfg.scan_threshold, opts.threads);
    f.flags = merge(f.flags, s.flags);
    unwrap_log(f);
  }
  return f;
}

void write_field_csv(std::ostream& out, const FieldGrid& f) {
  out << kFieldHeader << '\n';
  const GridSpec& g = f.grid;
  for (int j = 0; j < g.nt; ++j)
    for (int i = 0; i < g.nx; ++i) {
      const std::size_t n = g.index(i, j);
      out << format_double(g.x(i)) << ',' << format_double(g.t(j)) << ','
          << format_double(f.u[n].real()) << ',' << format_double(f.u[n].imag()) << ','
          << format_double(f.exp_u[n].real()) << ',' << format_double(f.exp_u[n].imag()) << ','
          << to_string(f.flags[n]) << '\n';
    }
}

FieldGrid read_field_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line != kFieldHeader)
    throw ConfigError("field file: expected header " + std::string(kFieldHeader), "field");
  struct Row {
    double x, t;
    cplx u, e;
    NodeFlag flag;
  };
  std::vector<Row> rows;
  int lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string cell;
    std::vector<std::string> cells;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    if (cells.size() != 7)
      throw ConfigError("field file: line " + std::to_string(lineno) + " needs 7 cells", "field");
    double v[6];
    for (int c = 0; c < 6; ++c) {
      try {
        std::size_t used = 0;
        v[c] = std::stod(cells[c], &used);
        if (used != cells[c].size()) throw std::invalid_argument(cells[c]);
      } catch (const std::exception&) {
        throw ConfigError("field file: bad number on line " + std::to_string(lineno), "field");
      }
    }
    rows.push_back({v[0], v[1], {v[2], v[3]}, {v[4], v[5]}, node_flag_from(cells[6])});
  }
  if (rows.empty()) throw ConfigError("field file has no rows", "field");

  int nx = 1;
  while (nx < static_cast<int>(rows.size()) && rows[nx].t == rows[0].t) ++nx;
  if (rows.size() % nx != 0) throw ConfigError("field file: rows do not form a grid", "field");
  GridSpec g;
  g.nx = nx;
  g.nt = static_cast<int>(rows.size()) / nx;
  g.x0 = rows.front().x;
  g.x1 = rows[nx - 1].x;
  g.t0 = rows.front().t;
  g.t1 = rows.back().t;
  try {
    g.validate();
  } catch (const ConfigError& e) {
    throw ConfigError(std::string("field file: ") + e.what(), "field");
  }
  FieldGrid f(g);
  const double tol = 1e-9 * std::max({std::abs(g.x0), std::abs(g.x1), std::abs(g.t0),
                                      std::abs(g.t1), 1.0});
  for (int j = 0; j < g.nt; ++j)
    for (int i = 0; i < g.nx; ++i) {
      const Row& r = rows[g.index(i, j)];
      if (std::abs(r.x - g.x(i)) > tol || std::abs(r.t - g.t(j)) > tol)
        throw ConfigError("field file: nodes are not on a uniform t-major grid", "field");
      f.u[g.index(i, j)] = r.u;
      f.exp_u[g.index(i, j)] = r.e;
      f.flags[g.index(i, j)] = r.flag;
    }
  return f;
}

json verify_report(const config::RunConfig& cfg, const RunOptions& opts) {
  const auto base = make_source(cfg);
  const auto d = dressed(cfg);
  std::unique_ptr<FieldSource> injected;
  if (cfg.verify.inject) injected = std::make_unique<InjectedSource>(*base, *cfg.verify.inject);
  const FieldSource& src = injected ? *injected : *base;
  const GridSpec lab_grid = cfg.verify.lab_grid.value_or(cfg.grid);

  std::vector<NodeFlag> flags, lab_flags;
  if (d) {
    flags = verify::singularity_scan(*d, cfg.grid, cfg.scan_threshold, opts.threads).flags;
    lab_flags = verify::singularity_scan(*d, lab_grid, cfg.scan_threshold, opts.threads, true).flags;
  } else {
    flags = sample_field(src, cfg.grid, opts.threads).flags;
    const verify::LabFrameSource lab_src(src);
    lab_flags = sample_field(lab_src, lab_grid, opts.threads).flags;
  }

  verify::StencilOptions so = cfg.verify.stencil;
  so.threads = opts.threads;
  const auto& tol = cfg.verify.tol;
  json j;
  j["residual_lightcone"] =
      residual_json(verify::residual_lightcone(src, cfg.grid, flags, so), tol.residual_lightcone);
  const verify::LabFrameSource lab(src);
  j["residual_lab"] = residual_json(verify::residual_lab(lab, lab_grid, lab_flags, so), tol.residual_lab);
  j["goursat"] = goursat_json(src, cfg);
  j["lax"] = lax_json(cfg);
  if (d) {
    j["residue_identity"] = residue_json(cfg, *d);
    j["route_equivalence"] = route_json(cfg, *d, opts);
  } else {
    j["residue_identity"] = skipped("no soliton kernel on a finite-gap background");
    j["route_equivalence"] = skipped("no solitons");
  }
  bool kin_pass = true;
  j["kinematics"] = kinematics_json(cfg, &src, tol.tracking, kin_pass);
  j["kinematics_pass"] = kin_pass;

  bool pass = kin_pass;
  for (const char* key : {"residual_lightcone", "residual_lab", "goursat", "lax", "residue_identity",
                          "route_equivalence"})
    pass = pass && j[key]["pass"].get<bool>();
  j["pass"] = pass;
  return j;
}

json verify_field_file(const FieldGrid& field, const config::RunConfig& cfg) {
  const double tol = cfg.verify.tol.residual_lightcone;
  json j;
  j["residual_lightcone"] = residual_json(verify::residual_lightcone(field, cfg.verify.stencil.buffer), tol);
  j["residual_lightcone"]["grid"] = {{"x", {field.grid.x0, field.grid.x1}},
                                     {"t", {field.grid.t0, field.grid.t1}},
                                     {"nx", field.grid.nx},
                                     {"nt", field.grid.nt}};
  const std::string note = "not available from a sampled field";
  for (const char* key : {"residual_lab", "goursat", "lax", "residue_identity", "route_equivalence"})
    j[key] = skipped(note);
  j["kinematics"] = json::array();
  j["pass"] = j["residual_lightcone"]["pass"];
  return j;
}

verify::ScanResult scan(const config::RunConfig& cfg, const RunOptions& opts) {
  const auto d = dressed(cfg);
  if (!d) {
    // det(1 - Omega J) is 1 without solitons.
    verify::ScanResult r;
    r.flags.assign(cfg.grid.size(), NodeFlag::ok);
    r.max_abs_det = 1.0;
    return r;
  }
  return verify::singularity_scan(*d, cfg.grid, cfg.scan_threshold, opts.threads);
}

void write_scan_csv(std::ostream& out, const verify::ScanResult& r) {
  out << "x,t,abs_det\n";
  for (const auto& n : r.nodes)
    out << format_double(n.x) << ',' << format_double(n.t) << ',' << format_double(n.abs_det) << '\n';
}

json velocities_report(const config::RunConfig& cfg) {
  std::unique_ptr<FieldSource> src;
  if (cfg.kinematics.track) src = make_source(cfg);
  bool pass = true;
  json j;
  j["epsilons"] = cfg.kinematics.epsilons;
  j["solitons"] = kinematics_json(cfg, src.get(), cfg.verify.tol.tracking, pass);
  if (cfg.kinematics.track) j["tracking_pass"] = pass;
  return j;
}

}  // namespace tz::commands

#include "hsgreen/job.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "hsgreen/errors.hpp"
#include "hsgreen/fullspace.hpp"

namespace hsgreen {

using nlohmann::json;

namespace {

Vec3 parse_vec3(const json& j, const std::string& name) {
  if (!j.is_array() || j.size() != 3)
    throw ValidationError(name + " must be an array of 3 numbers");
  return Vec3(j[0].get<double>(), j[1].get<double>(), j[2].get<double>());
}

std::vector<Vec3> expand_receivers(const json& j) {
  std::vector<Vec3> out;
  if (j.contains("points")) {
    for (size_t i = 0; i < j["points"].size(); ++i)
      out.push_back(parse_vec3(j["points"][i], "receivers.points[" +
                                                   std::to_string(i) + "]"));
  } else if (j.contains("grid")) {
    const json& g = j["grid"];
    const Vec3 origin = parse_vec3(g.at("origin"), "receivers.grid.origin");
    if (!g.contains("axes") || !g.contains("counts"))
      throw ValidationError("receivers.grid needs axes and counts");
    std::vector<Vec3> axes;
    for (size_t i = 0; i < g["axes"].size(); ++i)
      axes.push_back(
          parse_vec3(g["axes"][i], "receivers.grid.axes[" + std::to_string(i) + "]"));
    std::vector<long> counts = g["counts"].get<std::vector<long>>();
    if (axes.size() != counts.size() || axes.empty() || axes.size() > 3)
      throw ValidationError("receivers.grid.axes and counts must match (1..3 axes)");
    for (long c : counts)
      if (c < 1) throw ValidationError("receivers.grid.counts must be >= 1");
    while (axes.size() < 3) {
      axes.push_back(Vec3::Zero());
      counts.push_back(1);
    }
    // Row-major: first axis slowest.
    for (long i0 = 0; i0 < counts[0]; ++i0)
      for (long i1 = 0; i1 < counts[1]; ++i1)
        for (long i2 = 0; i2 < counts[2]; ++i2)
          out.push_back(origin + double(i0) * axes[0] + double(i1) * axes[1] +
                        double(i2) * axes[2]);
  } else {
    throw ValidationError("receivers must contain either points or grid");
  }
  return out;
}

std::string fmt_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string flags_str(const GreenFlags& f) {
  std::string s;
  if (f.near_surface) s += "NearSurface";
  if (f.no_convergence) s += (s.empty() ? "" : ";") + std::string("NoConvergence");
  return s;
}

void write_tensor_row(std::FILE* fp, const Vec3& x, double omega,
                      const CMat3& g, double quad_err,
                      const std::string& flags) {
  std::string line = fmt_double(x.x()) + "," + fmt_double(x.y()) + "," +
                     fmt_double(x.z()) + "," + fmt_double(omega);
  for (int j = 0; j < 3; ++j)
    for (int k = 0; k < 3; ++k) {
      line += "," + fmt_double(g(j, k).real());
      line += "," + fmt_double(g(j, k).imag());
    }
  line += "," + fmt_double(quad_err) + "," + flags + "\n";
  std::fputs(line.c_str(), fp);
}

void write_header(std::FILE* fp, const char* prefix) {
  std::fputs("schema=1\n", fp);
  std::string h = "x1,x2,x3,omega";
  for (int j = 1; j <= 3; ++j)
    for (int k = 1; k <= 3; ++k) {
      h += ",re_" + std::string(prefix) + std::to_string(j) + std::to_string(k);
      h += ",im_" + std::string(prefix) + std::to_string(j) + std::to_string(k);
    }
  h += ",quad_err,flags\n";
  std::fputs(h.c_str(), fp);
}

json residual_to_json(const ResidualReport& r) {
  json jr;
  jr["metric"] = r.metric_name;
  jr["value"] = r.value;
  jr["tolerance"] = r.tolerance;
  jr["pass"] = r.pass;
  json pts = json::array();
  for (const auto& p : r.sample_points) pts.push_back({p.x(), p.y(), p.z()});
  jr["sample_points"] = pts;
  return jr;
}

}  // namespace

JobConfig parse_config(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("config parse error: ") + e.what());
  }

  JobConfig cfg;
  try {
    if (!j.contains("material"))
      throw ValidationError("config needs a material section");
    const json& m = j["material"];
    cfg.material.lambda = m.at("lambda").get<double>();
    cfg.material.mu = m.at("mu").get<double>();
    cfg.material.rho = m.at("rho").get<double>();
    cfg.material.p = m.value("p", 0.0);
    cfg.material.q = m.value("q", 0.0);
    cfg.material.alpha = m.value("alpha", 0.0);
    validate(cfg.material);

    cfg.frequencies = j.at("frequencies").get<std::vector<double>>();
    if (cfg.frequencies.empty())
      throw ValidationError("frequencies must be non-empty");
    for (double w : cfg.frequencies)
      if (!(w > 0.0)) throw ValidationError("frequencies must be > 0");

    cfg.source = parse_vec3(j.at("source"), "source");
    if (!(cfg.source.z() < 0.0))
      throw ValidationError("source x3 must be < 0 (interior source)");

    if (j.contains("receivers")) cfg.receivers = expand_receivers(j["receivers"]);
    for (size_t i = 0; i < cfg.receivers.size(); ++i)
      if (!(cfg.receivers[i].z() < 0.0))
        throw ValidationError("receivers[" + std::to_string(i) +
                              "].x3 must be < 0");

    if (j.contains("quadrature")) {
      const json& q = j["quadrature"];
      cfg.quadrature.rel_tol = q.value("rel_tol", cfg.quadrature.rel_tol);
      cfg.quadrature.truncation_radius =
          q.value("truncation_radius", cfg.quadrature.truncation_radius);
      cfg.quadrature.radial_panels =
          q.value("radial_panels", cfg.quadrature.radial_panels);
      cfg.quadrature.angular_order =
          q.value("angular_order", cfg.quadrature.angular_order);
      cfg.quadrature.max_refine_depth =
          q.value("max_refine_depth", cfg.quadrature.max_refine_depth);
      cfg.quadrature.h_min_factor =
          q.value("h_min_factor", cfg.quadrature.h_min_factor);
      if (!(cfg.quadrature.rel_tol > 0.0))
        throw ValidationError("quadrature.rel_tol must be > 0");
    }

    if (j.contains("outputs")) {
      const json& o = j["outputs"];
      cfg.outputs.format = o.value("format", cfg.outputs.format);
      cfg.outputs.path = o.value("path", cfg.outputs.path);
      cfg.outputs.which = o.value("which", cfg.outputs.which);
      if (cfg.outputs.format != "csv" && cfg.outputs.format != "json")
        throw ValidationError("outputs.format must be csv or json");
      if (cfg.outputs.which != "displacement" && cfg.outputs.which != "traction" &&
          cfg.outputs.which != "both")
        throw ValidationError("outputs.which must be displacement, traction or both");
    }

    if (j.contains("verify")) {
      const json& v = j["verify"];
      cfg.verify.traction_free = v.value("traction_free", false);
      cfg.verify.pde = v.value("pde", false);
      cfg.verify.reciprocity = v.value("reciprocity", false);
      cfg.verify.hypothesis_scan = v.value("hypothesis_scan", false);
    }

    cfg.eps_damp = j.value("eps_damp", 0.0);

    if (j.contains("scan")) {
      const json& s = j["scan"];
      cfg.scan.r_min = s.value("r_min", cfg.scan.r_min);
      cfg.scan.r_max = s.value("r_max", cfg.scan.r_max);
      cfg.scan.n_r = s.value("n_r", cfg.scan.n_r);
      cfg.scan.n_theta = s.value("n_theta", cfg.scan.n_theta);
      cfg.scan_xi3 = s.value("xi3", cfg.scan_xi3);
      if (!(cfg.scan_xi3 < 0.0)) throw ValidationError("scan.xi3 must be < 0");
    }
  } catch (const json::exception& e) {
    throw ValidationError(std::string("config field error: ") + e.what());
  }
  return cfg;
}

JobConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open config file: " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

std::string serialize_config(const JobConfig& cfg) {
  json j;
  j["material"] = {{"lambda", cfg.material.lambda}, {"mu", cfg.material.mu},
                   {"rho", cfg.material.rho},       {"p", cfg.material.p},
                   {"q", cfg.material.q},           {"alpha", cfg.material.alpha}};
  j["frequencies"] = cfg.frequencies;
  j["source"] = {cfg.source.x(), cfg.source.y(), cfg.source.z()};
  json pts = json::array();
  for (const auto& r : cfg.receivers) pts.push_back({r.x(), r.y(), r.z()});
  j["receivers"] = {{"points", pts}};
  j["quadrature"] = {{"rel_tol", cfg.quadrature.rel_tol},
                     {"truncation_radius", cfg.quadrature.truncation_radius},
                     {"radial_panels", cfg.quadrature.radial_panels},
                     {"angular_order", cfg.quadrature.angular_order},
                     {"max_refine_depth", cfg.quadrature.max_refine_depth},
                     {"h_min_factor", cfg.quadrature.h_min_factor}};
  j["outputs"] = {{"format", cfg.outputs.format},
                  {"path", cfg.outputs.path},
                  {"which", cfg.outputs.which}};
  j["verify"] = {{"traction_free", cfg.verify.traction_free},
                 {"pde", cfg.verify.pde},
                 {"reciprocity", cfg.verify.reciprocity},
                 {"hypothesis_scan", cfg.verify.hypothesis_scan}};
  j["eps_damp"] = cfg.eps_damp;
  j["scan"] = {{"r_min", cfg.scan.r_min},
               {"r_max", cfg.scan.r_max},
               {"n_r", cfg.scan.n_r},
               {"n_theta", cfg.scan.n_theta},
               {"xi3", cfg.scan_xi3}};
  return j.dump(2);
}

std::string scan_report_json(const ScanReport& rep) {
  json j;
  j["schema"] = 1;
  j["grid"] = {{"r_min", rep.grid.r_min},
               {"r_max", rep.grid.r_max},
               {"n_r", rep.grid.n_r},
               {"n_theta", rep.grid.n_theta}};
  j["xi3"] = rep.xi3;
  j["min_abs_delta_hat"] = rep.min_abs;
  j["median_abs_delta_hat"] = rep.median_abs;
  j["min_over_median"] = rep.median_abs > 0 ? rep.min_abs / rep.median_abs : 0.0;
  j["argmin"] = {{"eta1", rep.argmin_eta1},
                 {"eta2", rep.argmin_eta2},
                 {"radius", rep.argmin_radius}};
  json cands = json::array();
  for (const auto& c : rep.candidates)
    cands.push_back({{"radius", c.radius}, {"min_abs", c.min_abs}});
  j["candidates"] = cands;
  return j.dump(2);
}

std::string residual_reports_json(const std::vector<ResidualReport>& reps) {
  json j;
  j["schema"] = 1;
  json arr = json::array();
  for (const auto& r : reps) arr.push_back(residual_to_json(r));
  j["reports"] = arr;
  return j.dump(2);
}

int run_job(const JobConfig& cfg, const std::string& out_dir) {
  namespace fs = std::filesystem;
  const fs::path dir = out_dir.empty() ? fs::path(cfg.outputs.path)
                                       : fs::path(out_dir);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) {
    std::fprintf(stderr, "cannot create output directory %s: %s\n",
                 dir.c_str(), ec.message().c_str());
    return 2;
  }

  const bool want_fields = !cfg.receivers.empty();
  const bool want_disp =
      cfg.outputs.which == "displacement" || cfg.outputs.which == "both";
  const bool want_trac =
      cfg.outputs.which == "traction" || cfg.outputs.which == "both";

  std::FILE* f_disp = nullptr;
  std::FILE* f_trac = nullptr;
  if (want_fields && want_disp) {
    f_disp = std::fopen((dir / "fields.csv").c_str(), "wb");
    if (!f_disp) return 2;
    write_header(f_disp, "g");
  }
  if (want_fields && want_trac) {
    f_trac = std::fopen((dir / "tractions.csv").c_str(), "wb");
    if (!f_trac) return 2;
    write_header(f_trac, "t");
  }

  const Vec3 surf_normal(0.0, 0.0, 1.0);
  for (double omega : cfg.frequencies) {
    const FrequencyContext ctx =
        frequency_context(cfg.material, omega, cfg.eps_damp);
    for (const Vec3& x : cfg.receivers) {
      CMat3 g = CMat3::Constant(cdouble(std::nan(""), std::nan("")));
      CMat3 t = g;
      double qerr = std::nan("");
      GreenFlags flags;
      try {
        const GreenResult res = green_displacement(x, cfg.source, ctx,
                                                   cfg.material, cfg.quadrature,
                                                   want_trac);
        g = res.displacement;
        qerr = res.quadrature_error;
        flags = res.flags;
        if (want_trac) t = res.stress->traction(surf_normal);
      } catch (const NearSurfaceLimit&) {
        flags.near_surface = true;
      }
      if (f_disp) write_tensor_row(f_disp, x, omega, g, qerr, flags_str(flags));
      if (f_trac) write_tensor_row(f_trac, x, omega, t, qerr, flags_str(flags));
    }
  }
  if (f_disp) std::fclose(f_disp);
  if (f_trac) std::fclose(f_trac);

  // ---- verification battery ----
  std::vector<ResidualReport> reports;
  const VerifySpec& v = cfg.verify;
  if (v.traction_free || v.pde || v.reciprocity) {
    for (double omega : cfg.frequencies) {
      const FrequencyContext ctx =
          frequency_context(cfg.material, omega, cfg.eps_damp);
      const double kref = std::abs(ctx.k2);
      std::ostringstream tag;
      tag << " @omega=" << omega;

      if (v.traction_free) {
        std::vector<Eigen::Vector2d> ring;
        for (int i = 0; i < 8; ++i) {
          const double th = 2.0 * kPi * i / 8.0;
          ring.push_back(Eigen::Vector2d(
              cfg.source.x() + 0.5 / kref * std::cos(th),
              cfg.source.y() + 0.5 / kref * std::sin(th)));
        }
        ResidualReport r = traction_free_residual(cfg.source, ctx, cfg.material,
                                                  ring, 1e-3 / kref,
                                                  cfg.quadrature);
        r.metric_name += tag.str();
        reports.push_back(std::move(r));
      }
      if (v.pde) {
        const Vec3 x = cfg.source + Vec3(0.6, 0.3, -0.5) / kref;
        ResidualReport r = pde_residual(x, cfg.source, ctx, cfg.material,
                                        1e-4 / kref, cfg.quadrature);
        r.metric_name += tag.str();
        reports.push_back(std::move(r));
      }
      if (v.reciprocity) {
        const Vec3 x = cfg.receivers.empty()
                           ? cfg.source + Vec3(0.8, 0.2, -0.6) / kref
                           : cfg.receivers.front();
        const GreenResult a =
            green_displacement(x, cfg.source, ctx, cfg.material, cfg.quadrature);
        const GreenResult b =
            green_displacement(cfg.source, x, ctx, cfg.material, cfg.quadrature);
        ResidualReport r;
        r.metric_name = "reciprocity" + tag.str();
        r.sample_points = {x, cfg.source};
        const double scale = a.displacement.norm();
        r.value = (a.displacement - b.displacement.transpose()).norm() / scale;
        r.tolerance = std::max(
            1e-4, 10.0 * (a.quadrature_error + b.quadrature_error) / scale);
        r.pass = r.value <= r.tolerance;
        reports.push_back(std::move(r));
      }
    }
    std::ofstream out(dir / "report.json");
    out << residual_reports_json(reports) << "\n";
  }

  if (v.hypothesis_scan) {
    const FrequencyContext ctx =
        frequency_context(cfg.material, cfg.frequencies.front(), cfg.eps_damp);
    const ScanReport rep =
        hypothesis_scan(cfg.material, ctx, cfg.scan_xi3, cfg.scan);
    std::ofstream out(dir / "scan.json");
    out << scan_report_json(rep) << "\n";
  }

  for (const auto& r : reports)
    if (!r.pass)
      std::fprintf(stderr, "verification failed: %s = %g (tol %g)\n",
                   r.metric_name.c_str(), r.value, r.tolerance);
  return 0;
}

}  // namespace hsgreen

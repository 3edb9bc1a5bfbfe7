// Command-line driver: field evaluation, verification battery, determinant
// scan and the plane-wave calibration self-test.
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>

#include <CLI11.hpp>

#include "hsgreen/errors.hpp"
#include "hsgreen/job.hpp"
#include "hsgreen/quadrature.hpp"

using namespace hsgreen;

namespace {

int cmd_eval(const std::string& config_path, const std::string& out_dir) {
  const JobConfig cfg = load_config(config_path);
  return run_job(cfg, out_dir);
}

int cmd_verify(const std::string& config_path, const std::string& out_dir) {
  JobConfig cfg = load_config(config_path);
  cfg.receivers.clear();  // residual battery only
  if (!cfg.verify.traction_free && !cfg.verify.pde && !cfg.verify.reciprocity &&
      !cfg.verify.hypothesis_scan) {
    cfg.verify.traction_free = true;
    cfg.verify.pde = true;
    cfg.verify.reciprocity = true;
  }
  return run_job(cfg, out_dir);
}

int cmd_scan(const std::string& config_path, const std::string& out_dir) {
  JobConfig cfg = load_config(config_path);
  const FrequencyContext ctx =
      frequency_context(cfg.material, cfg.frequencies.front(), cfg.eps_damp);
  const ScanReport rep =
      hypothesis_scan(cfg.material, ctx, cfg.scan_xi3, cfg.scan);
  const std::string json = scan_report_json(rep);

  namespace fs = std::filesystem;
  const fs::path dir = out_dir.empty() ? fs::path(cfg.outputs.path)
                                       : fs::path(out_dir);
  fs::create_directories(dir);
  std::ofstream out(dir / "scan.json");
  out << json << "\n";
  std::printf("%s\n", json.c_str());
  return 0;
}

int cmd_weyl(double k_re, double k_im, double depth, double rel_tol) {
  if (k_im <= 0.0) {
    std::fprintf(stderr, "weyl-test needs Im k > 0 (got %g)\n", k_im);
    return 2;
  }
  QuadratureConfig cfg;
  cfg.rel_tol = rel_tol;
  FieldPair pair;
  pair.x = Vec3(0.0, 0.0, -0.5 * depth);
  pair.xi = Vec3(0.0, 0.0, -1.5 * depth);
  const cdouble k(k_re, k_im);
  const IntegralResult r = weyl_phi(pair, k, kWeylConstant, cfg);
  const double rr = pair.r();
  const cdouble expected = std::exp(cdouble(0.0, 1.0) * k * rr) / rr;
  const double rel = std::abs(r.value - expected) / std::abs(expected);
  std::printf(
      "{\"k\": [%.17g, %.17g], \"depth\": %.17g, \"constant\": %.17g, "
      "\"value\": [%.17g, %.17g], \"closed_form\": [%.17g, %.17g], "
      "\"rel_error\": %.3e, \"evaluations\": %ld, \"converged\": %s}\n",
      k_re, k_im, depth, kWeylConstant, r.value.real(), r.value.imag(),
      expected.real(), expected.imag(), rel, r.evaluations,
      r.converged ? "true" : "false");
  return rel <= 10.0 * rel_tol ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"half-space viscoelastic Green's function evaluator"};
  app.require_subcommand(1);

  std::string config_path, out_dir;

  auto* eval = app.add_subcommand("eval", "evaluate fields on receivers");
  eval->add_option("--config", config_path, "job configuration (JSON)")
      ->required()
      ->check(CLI::ExistingFile);
  eval->add_option("--out", out_dir, "output directory (overrides config)");

  auto* verify = app.add_subcommand("verify", "run the residual battery");
  verify->add_option("--config", config_path, "job configuration (JSON)")
      ->required()
      ->check(CLI::ExistingFile);
  verify->add_option("--out", out_dir, "output directory (overrides config)");

  auto* scan = app.add_subcommand("scan-delta",
                                  "scan the boundary determinant over the "
                                  "wavenumber plane");
  scan->add_option("--config", config_path, "job configuration (JSON)")
      ->required()
      ->check(CLI::ExistingFile);
  scan->add_option("--out", out_dir, "output directory (overrides config)");

  double k_re = 1.0, k_im = 0.5, depth = 1.0, rel_tol = 1e-6;
  auto* weyl = app.add_subcommand("weyl-test",
                                  "compare the plane-wave representation of "
                                  "e^{ikr}/r against the closed form");
  weyl->add_option("--k-re", k_re, "Re k");
  weyl->add_option("--k-im", k_im, "Im k (> 0)");
  weyl->add_option("--depth", depth, "|x3 - xi3|");
  weyl->add_option("--rel-tol", rel_tol, "quadrature tolerance");

  CLI11_PARSE(app, argc, argv);

  try {
    if (eval->parsed()) return cmd_eval(config_path, out_dir);
    if (verify->parsed()) return cmd_verify(config_path, out_dir);
    if (scan->parsed()) return cmd_scan(config_path, out_dir);
    if (weyl->parsed()) return cmd_weyl(k_re, k_im, depth, rel_tol);
  } catch (const ParseError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return 2;
  } catch (const ValidationError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}

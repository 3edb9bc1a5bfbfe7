#include "hsgreen/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <mutex>
#include <numeric>
#include <optional>
#include <sstream>

#include "hsgreen/errors.hpp"
#include "hsgreen/fullspace.hpp"
#include "hsgreen/spectral.hpp"

namespace hsgreen {

namespace {

// ----------------------------------------------------------------------
// Gauss-Legendre rules on [-1,1], cached per order.

struct GaussRule {
  std::vector<double> x, w;
};

GaussRule compute_gauss(int n) {
  GaussRule r;
  r.x.resize(n);
  r.w.resize(n);
  const int m = (n + 1) / 2;
  for (int i = 0; i < m; ++i) {
    double x = std::cos(kPi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-15) break;
    }
    r.x[i] = -x;
    r.x[n - 1 - i] = x;
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    r.w[i] = w;
    r.w[n - 1 - i] = w;
  }
  return r;
}

const GaussRule& gauss_rule(int n) {
  static std::map<int, GaussRule> cache;
  static std::mutex mtx;
  std::lock_guard<std::mutex> lock(mtx);
  auto it = cache.find(n);
  if (it == cache.end()) it = cache.emplace(n, compute_gauss(n)).first;
  return it->second;
}

// Angular node table for one panel count: Gauss nodes of every panel over
// [0, 2pi), with cos/sin cached. Keyed by (n_panels, order).
struct AngularTable {
  std::vector<double> cos_t, sin_t, w;
};

const AngularTable& angular_table(int n_pan, int order) {
  static std::map<std::pair<int, int>, AngularTable> cache;
  static std::mutex mtx;
  std::lock_guard<std::mutex> lock(mtx);
  auto key = std::make_pair(n_pan, order);
  auto it = cache.find(key);
  if (it == cache.end()) {
    const GaussRule& rule = gauss_rule(order);
    AngularTable tab;
    const double width = 2.0 * kPi / n_pan;
    for (int p = 0; p < n_pan; ++p) {
      const double tm = (p + 0.5) * width;
      for (int j = 0; j < order; ++j) {
        const double theta = tm + 0.5 * width * rule.x[j];
        tab.cos_t.push_back(std::cos(theta));
        tab.sin_t.push_back(std::sin(theta));
        tab.w.push_back(rule.w[j] * 0.5 * width);
      }
    }
    it = cache.emplace(key, std::move(tab)).first;
  }
  return it->second;
}

// ----------------------------------------------------------------------
// Value traits. kBlocks separates unit groups for the relative error metric.

struct ScalarOps {
  using value_type = cdouble;
  static constexpr int kBlocks = 1;
  static value_type zero() { return 0.0; }
  static void axpy(value_type& a, cdouble c, const value_type& v) { a += c * v; }
  static void add(value_type& a, const value_type& v) { a += v; }
  static value_type diff(const value_type& a, const value_type& b) { return a - b; }
  static void absacc(value_type& acc, const value_type& d) { acc += std::abs(d); }
  static void absacc_scaled(value_type& acc, const value_type& d, double s) {
    acc += s * std::abs(d);
  }
  static void block_maxabs(const value_type& v, double* out) { out[0] = std::abs(v); }
};

struct Mat3Ops {
  using value_type = CMat3;
  static constexpr int kBlocks = 1;
  static value_type zero() { return CMat3::Zero(); }
  static void axpy(value_type& a, cdouble c, const value_type& v) { a += c * v; }
  static void add(value_type& a, const value_type& v) { a += v; }
  static value_type diff(const value_type& a, const value_type& b) { return a - b; }
  static void absacc(value_type& acc, const value_type& d) {
    acc += d.cwiseAbs().cast<cdouble>();
  }
  static void absacc_scaled(value_type& acc, const value_type& d, double s) {
    acc += s * d.cwiseAbs().cast<cdouble>();
  }
  static void block_maxabs(const value_type& v, double* out) {
    out[0] = v.cwiseAbs().maxCoeff();
  }
};

// Displacement + gradient of the correction term, integrated together.
struct WGrad {
  CMat3 w;
  std::array<CMat3, 3> g;
};

struct WGradOps {
  using value_type = WGrad;
  static constexpr int kBlocks = 2;
  static value_type zero() {
    return {CMat3::Zero(), {CMat3::Zero(), CMat3::Zero(), CMat3::Zero()}};
  }
  static void axpy(value_type& a, cdouble c, const value_type& v) {
    a.w += c * v.w;
    for (int l = 0; l < 3; ++l) a.g[l] += c * v.g[l];
  }
  static void add(value_type& a, const value_type& v) {
    a.w += v.w;
    for (int l = 0; l < 3; ++l) a.g[l] += v.g[l];
  }
  static value_type diff(const value_type& a, const value_type& b) {
    value_type d;
    d.w = a.w - b.w;
    for (int l = 0; l < 3; ++l) d.g[l] = a.g[l] - b.g[l];
    return d;
  }
  static void absacc(value_type& acc, const value_type& d) {
    acc.w += d.w.cwiseAbs().cast<cdouble>();
    for (int l = 0; l < 3; ++l) acc.g[l] += d.g[l].cwiseAbs().cast<cdouble>();
  }
  static void absacc_scaled(value_type& acc, const value_type& d, double s) {
    acc.w += s * d.w.cwiseAbs().cast<cdouble>();
    for (int l = 0; l < 3; ++l)
      acc.g[l] += s * d.g[l].cwiseAbs().cast<cdouble>();
  }
  static void block_maxabs(const value_type& v, double* out) {
    out[0] = v.w.cwiseAbs().maxCoeff();
    out[1] = 0.0;
    for (int l = 0; l < 3; ++l)
      out[1] = std::max(out[1], v.g[l].cwiseAbs().maxCoeff());
  }
};

// ----------------------------------------------------------------------
// Polar adaptive engine.

double resolve_radius(const QuadratureConfig& cfg) {
  if (cfg.truncation_radius > 0.0) return cfg.truncation_radius;
  if (cfg.decay_depth <= 0.0) {
    throw DecayViolation(
        "auto truncation radius needs a positive decay depth "
        "(x3 + xi3 must be negative)");
  }
  return cfg.k_max_re + std::log(100.0 / cfg.rel_tol) / cfg.decay_depth;
}

int angular_panels(double rho, double dx_norm) {
  // width <= pi / (2 |dx| rho)  =>  panels >= 4 |dx| rho
  const double needed = 4.0 * dx_norm * rho;
  int n = std::max(4, static_cast<int>(std::ceil(needed)));
  return ((n + 3) / 4) * 4;  // boundaries hit pi/2, 3pi/2; nodes stay interior
}

template <class Ops, class F>
class PolarEngine {
 public:
  using V = typename Ops::value_type;

  struct Result {
    V value;
    V abs_error;  // componentwise sum of panel differences
    double tail_error = 0.0;  // scalar truncation-tail bound
    long evaluations = 0;
    double radius = 0.0;
    bool converged = true;
  };

  PolarEngine(F& f, double dx1, double dx2, const QuadratureConfig& cfg)
      : f_(f), dx1_(dx1), dx2_(dx2), cfg_(cfg),
        dx_norm_(std::hypot(dx1, dx2)),
        rule_(gauss_rule(std::max(2, cfg.angular_order))) {}

  Result run(std::vector<std::pair<double, double>>* halves_out) {
    const double R = resolve_radius(cfg_);

    std::vector<double> edges = initial_edges(R);
    std::vector<Panel> panels;
    panels.reserve(edges.size() * 2);
    for (size_t i = 0; i + 1 < edges.size(); ++i)
      panels.push_back(make_panel(edges[i], edges[i + 1], std::nullopt, 0));

    Result res;
    res.radius = R;
    constexpr double kNoise = 100.0 * std::numeric_limits<double>::epsilon();

    while (true) {
      // Deterministic totals: accumulate in left-to-right interval order.
      std::vector<size_t> order(panels.size());
      std::iota(order.begin(), order.end(), size_t{0});
      std::sort(order.begin(), order.end(), [&](size_t a, size_t b) {
        return panels[a].a < panels[b].a;
      });
      V total = Ops::zero();
      V diff_acc = Ops::zero();
      double peak[Ops::kBlocks] = {};
      double mass = 0.0;
      for (size_t idx : order) {
        V fine = panels[idx].vL;
        Ops::add(fine, panels[idx].vR);
        Ops::add(total, fine);
        Ops::absacc(diff_acc, panels[idx].diff);
        mass += panels[idx].mass;
        double b[Ops::kBlocks];
        Ops::block_maxabs(fine, b);
        for (int k = 0; k < Ops::kBlocks; ++k) peak[k] = std::max(peak[k], b[k]);
      }

      // Truncation tail from the unsigned mass of the two outermost panels
      // (their signed values oscillate through Bessel-phase zeros and would
      // underestimate). Part of the reported error and the convergence flag,
      // but never drives refinement: no panel split can reduce it.
      double tail = 0.0;
      if (order.size() >= 2) {
        const double m_last = panels[order.back()].mass;
        const double m_prev = panels[order[order.size() - 2]].mass;
        const double r =
            m_prev > 0.0 ? std::min(m_last / m_prev, 0.9) : 0.9;
        tail = m_last * r / (1.0 - r);
      }

      double tot_b[Ops::kBlocks], diff_b[Ops::kBlocks];
      Ops::block_maxabs(total, tot_b);
      Ops::block_maxabs(diff_acc, diff_b);
      const double noise_floor = kNoise * mass;
      bool refine_needed = false;
      bool tol_met = true;
      for (int k = 0; k < Ops::kBlocks; ++k) {
        const double scale = std::max(tot_b[k], peak[k]);
        const double target = std::max(cfg_.rel_tol * scale, noise_floor);
        if (diff_b[k] > target) refine_needed = true;
        if (diff_b[k] + tail > target) tol_met = false;
      }

      if (!refine_needed) {
        res.converged = tol_met;
        res.tail_error = tail;
        finish(res, panels, order, total, diff_acc, halves_out);
        return res;
      }

      // Worst refinable panel; ties resolved by the left endpoint. Panels
      // whose difference sits at their own rounding floor are left alone.
      int worst = -1;
      for (size_t i = 0; i < panels.size(); ++i) {
        if (panels[i].depth >= cfg_.max_refine_depth) continue;
        if (panels[i].err <= kNoise * panels[i].mass) continue;
        if (worst < 0 || panels[i].err > panels[worst].err ||
            (panels[i].err == panels[worst].err &&
             panels[i].a < panels[worst].a))
          worst = static_cast<int>(i);
      }
      if (worst < 0 || static_cast<long>(panels.size()) >= cfg_.max_panels) {
        res.converged = false;
        res.tail_error = tail;
        finish(res, panels, order, total, diff_acc, halves_out);
        return res;
      }

      Panel parent = panels[worst];
      panels.erase(panels.begin() + worst);
      const double mid = 0.5 * (parent.a + parent.b);
      panels.push_back(make_panel(parent.a, mid, parent.vL, parent.depth + 1));
      panels.push_back(make_panel(mid, parent.b, parent.vR, parent.depth + 1));
    }
  }

 private:
  struct Panel {
    double a, b;
    V vL, vR;     // Gauss pass over each half; value = vL + vR
    V diff;       // (vL + vR) - single Gauss pass over [a,b]
    double err = 0.0;
    double mass = 0.0;  // accumulated |contribution|, sets the rounding floor
    int depth = 0;
  };

  std::vector<double> initial_edges(double R) const {
    std::vector<double> edges;
    const double kcut = 1.5 * cfg_.k_max_re;
    const int n_total = std::max(4, cfg_.radial_panels);
    if (kcut > 0.0 && kcut < 0.75 * R) {
      // Concentrate the initial partition where the integrand varies fastest.
      const int n1 = std::max(2, n_total / 2);
      const int n2 = std::max(2, n_total - n1);
      for (int i = 0; i <= n1; ++i) edges.push_back(kcut * i / n1);
      for (int i = 1; i <= n2; ++i)
        edges.push_back(kcut + (R - kcut) * i / n2);
    } else {
      for (int i = 0; i <= n_total; ++i) edges.push_back(R * i / n_total);
    }
    return edges;
  }

  Panel make_panel(double a, double b, std::optional<V> coarse, int depth) {
    Panel p;
    p.a = a;
    p.b = b;
    p.depth = depth;
    const double mid = 0.5 * (a + b);
    p.vL = eval_interval(a, mid, &p.mass);
    p.vR = eval_interval(mid, b, &p.mass);
    V single = coarse ? *coarse : eval_interval(a, b, nullptr);
    V fine = p.vL;
    Ops::add(fine, p.vR);
    p.diff = Ops::diff(fine, single);
    double b_[Ops::kBlocks];
    Ops::block_maxabs(p.diff, b_);
    p.err = *std::max_element(b_, b_ + Ops::kBlocks);
    return p;
  }

  V eval_interval(double a, double b, double* mass) {
    V acc = Ops::zero();
    const double mid = 0.5 * (a + b), half = 0.5 * (b - a);
    for (int i = 0; i < static_cast<int>(rule_.x.size()); ++i) {
      const double rho = mid + half * rule_.x[i];
      const double wr = rule_.w[i] * half * rho;
      angular_pass(rho, wr, acc, mass);
    }
    return acc;
  }

  void angular_pass(double rho, double wr, V& acc, double* mass) {
    const int n_pan = angular_panels(rho, dx_norm_);
    const AngularTable& tab =
        angular_table(n_pan, static_cast<int>(rule_.x.size()));
    double m = 0.0;
    for (size_t j = 0; j < tab.w.size(); ++j) {
      const double e1 = rho * tab.cos_t[j];
      const double e2 = rho * tab.sin_t[j];
      const double arg = e1 * dx1_ + e2 * dx2_;
      const cdouble phase(std::cos(arg), std::sin(arg));
      const V fv = f_(e1, e2);
      Ops::axpy(acc, (wr * tab.w[j]) * phase, fv);
      if (mass) {
        double b_[Ops::kBlocks];
        Ops::block_maxabs(fv, b_);
        m += std::abs(wr * tab.w[j]) *
             *std::max_element(b_, b_ + Ops::kBlocks);
      }
      ++evals_;
    }
    if (mass) *mass += m;
  }

  void finish(Result& res, const std::vector<Panel>& panels,
              const std::vector<size_t>& order, const V& total,
              const V& err_acc,
              std::vector<std::pair<double, double>>* halves_out) {
    res.value = total;
    res.abs_error = err_acc;
    res.evaluations = evals_;
    if (halves_out) {
      halves_out->clear();
      for (size_t idx : order) {
        const double mid = 0.5 * (panels[idx].a + panels[idx].b);
        halves_out->push_back({panels[idx].a, mid});
        halves_out->push_back({mid, panels[idx].b});
      }
    }
  }

  F& f_;
  double dx1_, dx2_;
  QuadratureConfig cfg_;
  double dx_norm_;
  const GaussRule& rule_;
  long evals_ = 0;
};

// ----------------------------------------------------------------------
// Correction-term integrand at one spectral node.

struct CorrectionContext {
  const Material& mat;
  const FrequencyContext& ctx;
  double xi3;
  double q_scale;  // kWeylConstant / mu

  struct ModeData {
    cdouble beta[3];
    CVec3 nu[3];
    CMat3 C;  // C(m,k)
  };

  ModeData solve(double e1, double e2) const {
    const SpectralPoint pt = make_spectral_point(e1, e2, ctx);
    const Eigenbasis basis = eigenbasis(pt);
    const CMat3 N = assemble_N(pt, basis, xi3, mat);
    const CMat3 Q = spectral_fullspace_traction(e1, e2, xi3, ctx, mat);
    ModeData md;
    md.beta[0] = pt.beta1;
    md.beta[1] = pt.beta2;
    md.beta[2] = pt.beta3;
    md.nu[0] = basis.nu1;
    md.nu[1] = basis.nu2;
    md.nu[2] = basis.nu3;
    md.C = solve_coefficients(N, (q_scale * Q).eval(),
                              std::numeric_limits<double>::infinity());
    return md;
  }

  // w integrand and (optionally) its x-gradient at height x3; the lateral
  // phase is applied by the engine / node loop.
  void fields(const ModeData& md, double e1, double e2, double x3, CMat3* w,
              std::array<CMat3, 3>* grad) const {
    if (w) w->setZero();
    if (grad)
      for (auto& gl : *grad) gl.setZero();
    const cdouble I(0.0, 1.0);
    for (int m = 0; m < 3; ++m) {
      // Same mode normalization as the N columns: e^{beta (x3+xi3)} / beta.
      const cdouble amp = std::exp(md.beta[m] * (x3 + xi3)) / md.beta[m];
      const cdouble sym[3] = {I * e1, I * e2, md.beta[m]};
      for (int k = 0; k < 3; ++k) {
        const cdouble c = md.C(m, k) * amp;
        if (w) w->col(k) += c * md.nu[m];
        if (grad)
          for (int l = 0; l < 3; ++l)
            (*grad)[l].col(k) += (c * sym[l]) * md.nu[m];
      }
    }
  }
};

double admissible_depth(const FieldPair& pair, const FrequencyContext& ctx,
                        const QuadratureConfig& cfg) {
  if (pair.xi.z() >= 0.0)
    throw SurfaceSource("correction term: xi3 must be < 0");
  if (pair.x.z() > 0.0)
    throw ValidationError("correction term: x3 must be <= 0 (half-space)");
  const double h_min = cfg.h_min_factor / std::abs(ctx.k2);
  const double depth = -(pair.x.z() + pair.xi.z());
  if (depth < h_min) {
    std::ostringstream os;
    os << "correction term: |x3 + xi3| = " << depth
       << " below the near-surface floor h_min = " << h_min;
    throw NearSurfaceLimit(os.str());
  }
  return depth;
}

QuadratureConfig with_decay(const QuadratureConfig& cfg, double depth,
                            const FrequencyContext& ctx) {
  QuadratureConfig c = cfg;
  c.decay_depth = depth;
  c.k_max_re = std::max(std::abs(ctx.k1.real()), std::abs(ctx.k2.real()));
  return c;
}

}  // namespace

// ----------------------------------------------------------------------

SpectralIntegral inverse_fourier_2d(const std::function<CMat3(double, double)>& f,
                                    double dx1, double dx2,
                                    const QuadratureConfig& cfg) {
  auto call = [&f](double e1, double e2) { return f(e1, e2); };
  PolarEngine<Mat3Ops, decltype(call)> engine(call, dx1, dx2, cfg);
  auto r = engine.run(nullptr);
  SpectralIntegral out;
  out.value = r.value;
  out.abs_error =
      r.abs_error.real() + Eigen::Matrix3d::Constant(r.tail_error);
  out.evaluations = r.evaluations;
  out.truncation_radius_used = r.radius;
  out.converged = r.converged;
  return out;
}

IntegralResult weyl_phi(const FieldPair& pair, cdouble k, double A,
                        const QuadratureConfig& cfg) {
  if (!(k.imag() > 0.0))
    throw ValidationError("weyl_phi: Im k must be > 0");
  const double dz = std::abs(pair.x.z() - pair.xi.z());
  if (dz <= 0.0) throw ValidationError("weyl_phi: x3 must differ from xi3");

  QuadratureConfig c = cfg;
  c.decay_depth = (c.truncation_radius > 0.0) ? c.decay_depth : dz;
  c.k_max_re = std::abs(k.real());

  auto f = [&](double e1, double e2) {
    const cdouble b = vertical_wavenumber(e1, e2, k);
    return std::exp(-b * dz) / b;
  };
  PolarEngine<ScalarOps, decltype(f)> engine(
      f, pair.x.x() - pair.xi.x(), pair.x.y() - pair.xi.y(), c);
  auto r = engine.run(nullptr);
  IntegralResult out;
  out.value = A * r.value;
  out.abs_error_estimate =
      std::abs(A) * (std::abs(r.abs_error) + r.tail_error);
  out.evaluations = r.evaluations;
  out.truncation_radius_used = r.radius;
  out.converged = r.converged;
  return out;
}

CMat3 correction_integrand(double eta1, double eta2, double x3, double xi3,
                           const Material& mat, const FrequencyContext& ctx) {
  CorrectionContext cc{mat, ctx, xi3, kWeylConstant / mat.mu};
  const auto md = cc.solve(eta1, eta2);
  CMat3 w;
  cc.fields(md, eta1, eta2, x3, &w, nullptr);
  return w;
}

SpectralIntegral correction_displacement(const FieldPair& pair,
                                         const Material& mat,
                                         const FrequencyContext& ctx,
                                         const QuadratureConfig& cfg) {
  const double depth = admissible_depth(pair, ctx, cfg);
  const QuadratureConfig c = with_decay(cfg, depth, ctx);
  CorrectionContext cc{mat, ctx, pair.xi.z(), kWeylConstant / mat.mu};
  const double x3 = pair.x.z();
  auto f = [&](double e1, double e2) {
    const auto md = cc.solve(e1, e2);
    CMat3 w;
    cc.fields(md, e1, e2, x3, &w, nullptr);
    return w;
  };
  PolarEngine<Mat3Ops, decltype(f)> engine(
      f, pair.x.x() - pair.xi.x(), pair.x.y() - pair.xi.y(), c);
  auto r = engine.run(nullptr);
  SpectralIntegral out;
  out.value = r.value;
  out.abs_error =
      r.abs_error.real() + Eigen::Matrix3d::Constant(r.tail_error);
  out.evaluations = r.evaluations;
  out.truncation_radius_used = r.radius;
  out.converged = r.converged;
  return out;
}

CorrectionField correction_field(const FieldPair& pair, const Material& mat,
                                 const FrequencyContext& ctx,
                                 const QuadratureConfig& cfg) {
  const double depth = admissible_depth(pair, ctx, cfg);
  const QuadratureConfig c = with_decay(cfg, depth, ctx);
  CorrectionContext cc{mat, ctx, pair.xi.z(), kWeylConstant / mat.mu};
  const double x3 = pair.x.z();
  auto f = [&](double e1, double e2) {
    const auto md = cc.solve(e1, e2);
    WGrad v;
    cc.fields(md, e1, e2, x3, &v.w, &v.g);
    return v;
  };
  PolarEngine<WGradOps, decltype(f)> engine(
      f, pair.x.x() - pair.xi.x(), pair.x.y() - pair.xi.y(), c);
  auto r = engine.run(nullptr);

  CorrectionField out;
  out.displacement = r.value.w;
  out.gradient = r.value.g;
  out.stress = stress_from_gradient(r.value.g, mat);
  out.disp_error = r.abs_error.w.cwiseAbs().maxCoeff() + r.tail_error;
  out.grad_error = r.tail_error;
  for (int l = 0; l < 3; ++l)
    out.grad_error =
        std::max(out.grad_error,
                 r.abs_error.g[l].cwiseAbs().maxCoeff() + r.tail_error);
  out.evaluations = r.evaluations;
  out.truncation_radius_used = r.radius;
  out.converged = r.converged;
  return out;
}

StressIntegral correction_stress(const FieldPair& pair, const Material& mat,
                                 const FrequencyContext& ctx,
                                 const QuadratureConfig& cfg) {
  const CorrectionField f = correction_field(pair, mat, ctx, cfg);
  StressIntegral out;
  out.value = f.stress;
  // lambda + 2 mu bounds the stiffness row sums in stress_from_gradient
  out.abs_error_estimate = (mat.lambda + 2.0 * mat.mu) * 3.0 * f.grad_error;
  out.evaluations = f.evaluations;
  out.truncation_radius_used = f.truncation_radius_used;
  out.converged = f.converged;
  return out;
}

std::vector<SpectralNode> correction_node_set(const FieldPair& ref,
                                              const Material& mat,
                                              const FrequencyContext& ctx,
                                              const QuadratureConfig& cfg) {
  const double depth = admissible_depth(ref, ctx, cfg);
  const QuadratureConfig c = with_decay(cfg, depth, ctx);
  CorrectionContext cc{mat, ctx, ref.xi.z(), kWeylConstant / mat.mu};
  const double x3 = ref.x.z();
  auto f = [&](double e1, double e2) {
    const auto md = cc.solve(e1, e2);
    WGrad v;
    cc.fields(md, e1, e2, x3, &v.w, &v.g);
    return v;
  };
  PolarEngine<WGradOps, decltype(f)> engine(
      f, ref.x.x() - ref.xi.x(), ref.x.y() - ref.xi.y(), c);
  std::vector<std::pair<double, double>> halves;
  engine.run(&halves);

  const GaussRule& rule = gauss_rule(std::max(2, cfg.angular_order));
  const double dx_norm =
      std::hypot(ref.x.x() - ref.xi.x(), ref.x.y() - ref.xi.y());
  std::vector<SpectralNode> nodes;
  for (const auto& [a, b] : halves) {
    const double mid = 0.5 * (a + b), half = 0.5 * (b - a);
    for (size_t i = 0; i < rule.x.size(); ++i) {
      const double rho = mid + half * rule.x[i];
      const double wr = rule.w[i] * half * rho;
      const int n_pan = angular_panels(rho, dx_norm);
      const double width = 2.0 * kPi / n_pan;
      for (int p = 0; p < n_pan; ++p) {
        const double tm = p * width + 0.5 * width;
        for (size_t j = 0; j < rule.x.size(); ++j) {
          const double theta = tm + 0.5 * width * rule.x[j];
          nodes.push_back({rho * std::cos(theta), rho * std::sin(theta),
                           wr * rule.w[j] * 0.5 * width});
        }
      }
    }
  }
  return nodes;
}

std::vector<CorrectionSample> correction_on_nodes(
    const std::vector<SpectralNode>& nodes, const Vec3& xi,
    const std::vector<Vec3>& xs, const Material& mat,
    const FrequencyContext& ctx) {
  CorrectionContext cc{mat, ctx, xi.z(), kWeylConstant / mat.mu};
  std::vector<CorrectionSample> out(xs.size());
  CMat3 w;
  std::array<CMat3, 3> grad;
  for (const SpectralNode& nd : nodes) {
    const auto md = cc.solve(nd.eta1, nd.eta2);
    for (size_t ix = 0; ix < xs.size(); ++ix) {
      cc.fields(md, nd.eta1, nd.eta2, xs[ix].z(), &w, &grad);
      const cdouble coeff =
          nd.weight * std::exp(cdouble(0.0, nd.eta1 * (xs[ix].x() - xi.x()) +
                                                nd.eta2 * (xs[ix].y() - xi.y())));
      out[ix].displacement += coeff * w;
      for (int l = 0; l < 3; ++l) out[ix].gradient[l] += coeff * grad[l];
    }
  }
  return out;
}

}  // namespace hsgreen

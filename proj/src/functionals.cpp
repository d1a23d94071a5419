#include "rmcf/functionals.hpp"

#include <algorithm>
#include <cmath>

#include "rmcf/errors.hpp"

namespace rmcf {

namespace {

template <class F>
FunctionalReport integrate(const CurveGeometry& geom, F&& integrand) {
  FunctionalReport r;
  r.integrand.resize(geom.size());
  for (int i = 0; i < geom.size(); ++i) {
    r.integrand[i] = integrand(i);
    r.value += r.integrand[i] * geom.measure_weight[i];
  }
  return r;
}

}  // namespace

FunctionalReport weighted_volume(const CurveGeometry& geom) {
  return integrate(geom, [&](int i) { return std::exp(-geom.potential[i]); });
}

FunctionalReport shrinker_residual_integral(const CurveGeometry& geom) {
  return integrate(geom, [&](int i) {
    const Vec& d = geom.shrinker_defect[i];
    return inner(geom.metric[i], d, d) * std::exp(-geom.potential[i]);
  });
}

FunctionalReport stone_functional(const CurveGeometry& geom) {
  return integrate(geom, [&](int i) { return std::exp(-0.5 * geom.potential[i]); });
}

FunctionalReport general_functional(const std::vector<double>& u, const DiscreteCurve& curve,
                                    const ScalarField& rho, const TensorField& metric,
                                    const Chart& chart) {
  if (static_cast<int>(u.size()) != curve.size()) throw ConfigError("u needs one value per vertex");
  std::vector<Vec> d1, d2;
  curve_derivatives(curve, chart, d1, d2);
  FunctionalReport r;
  r.integrand.resize(curve.size());
  for (int i = 0; i < curve.size(); ++i) {
    const double p = rho(curve[i]);
    if (!(p > 0.0)) throw DomainError("density must be positive along the curve");
    const Mat g = metric(curve[i]);
    const double q = inner(g, d1[i], d1[i]);
    if (!(q > 0.0)) throw DomainError("metric is not positive on the curve tangent");
    r.integrand[i] = u[i] * p;
    r.value += r.integrand[i] * std::sqrt(q) * curve.du();
  }
  return r;
}

FunctionalReport general_functional(const std::vector<double>& u, const DiscreteCurve& curve,
                                    const ScalarField& rho, const Geometry& g) {
  return general_functional(
      u, curve, rho,
      [&](const Vec& x) {
        g.require_inside(x);
        return g.jet(x, 0).g;
      },
      g.chart());
}

VariationData VariationData::zero(int n_vertices, int dim) {
  VariationData v;
  v.w.assign(n_vertices, 0.0);
  v.V.assign(n_vertices, Vec::Zero(dim));
  v.k = [](const Vec&) { return 0.0; };
  v.h = [dim](const Vec&) { return Mat(Mat::Zero(dim, dim)); };
  return v;
}

namespace {

void check_direction(const VariationData& v, const DiscreteCurve& curve) {
  if (!v.k || !v.h) throw ConfigError("variation needs closures for k and h");
  if (static_cast<int>(v.w.size()) != curve.size() || static_cast<int>(v.V.size()) != curve.size())
    throw ConfigError("variation needs one w and V per vertex");
}

}  // namespace

double first_variation_rhs(const std::vector<double>& u, const DiscreteCurve& curve,
                           const Geometry& g, const DensityField& rho, const VariationData& v,
                           double tau) {
  if (!rho) throw ConfigError("first variation needs a density closure with derivatives");
  if (!(tau > 0.0)) throw ConfigError("tau must be positive");
  if (static_cast<int>(u.size()) != curve.size()) throw ConfigError("u needs one value per vertex");
  check_direction(v, curve);
  const int n = curve.size();
  const int dim = g.dim();
  const CurveGeometry geom = compute_geometry(curve, g);
  const std::vector<double> lap_u = curve_laplacian(geom, u);
  const std::vector<double> du = periodic_d1(u, curve.du());

  double total = 0.0;
  for (int i = 0; i < n; ++i) {
    const Vec& x = curve[i];
    const ScalarJet r = rho(x);
    if (!(r.value > 0.0)) throw DomainError("density must be positive along the curve");
    const MetricJet j = g.jet(x, 1);
    const Mat g_inv = inverse(j.g);
    const Christoffel gamma = christoffel(j, g_inv);

    // f = −log ρ − (n/2) log(4πτ); only derivatives of f enter, so τ drops out.
    const Vec df = -r.grad / r.value;
    const Mat ddf = -r.hess / r.value + r.grad * r.grad.transpose() / (r.value * r.value);
    Mat hess_f = ddf;
    for (int a = 0; a < dim; ++a)
      for (int b = 0; b < dim; ++b)
        for (int c = 0; c < dim; ++c) hess_f(a, b) -= gamma(c, a, b) * df(c);
    const Vec grad_f = mul(g_inv, df);
    const Vec& e = geom.unit_tangent[i];
    const Vec grad_f_normal = normal_part(j.g, e, grad_f);
    const Vec& H = geom.H[i];

    const Mat h = v.h(x);
    const Mat b = hess_f - 0.5 * h;
    double tr_normal = 0.0;
    for (const auto& nu : geom.normal_frame[i]) tr_normal += inner(b, nu, nu);
    const double tr_h = (g_inv.cwiseProduct(h)).sum();
    const double lap_rho = laplacian(g_inv, gamma, r);
    const Vec push_grad_u = (du[i] / (geom.speed[i] * geom.speed[i])) * geom.tangent[i];

    const double term1 = -u[i] * inner(j.g, v.V[i] + grad_f_normal, H + grad_f_normal) * r.value;
    const double term2 = u[i] * (lap_rho + v.k(x) + 0.5 * r.value * tr_h);
    const double term3 =
        (v.w[i] - lap_u[i] - inner(j.g, v.V[i], push_grad_u) + u[i] * tr_normal) * r.value;
    total += (term1 + term2 + term3) * geom.measure_weight[i];
  }
  return total;
}

double finite_difference_variation(const std::vector<double>& u, const DiscreteCurve& curve,
                                   const Geometry& g, const ScalarField& rho,
                                   const VariationData& v, double eps) {
  if (!(eps >= 1e-7 && eps <= 1e-3)) throw ConfigError("eps must lie in [1e-7, 1e-3]");
  if (!rho) throw ConfigError("finite-difference variation needs a density closure");
  check_direction(v, curve);
  auto evaluate = [&](double s) {
    std::vector<Vec> pts(curve.size());
    std::vector<double> us(curve.size());
    for (int i = 0; i < curve.size(); ++i) {
      pts[i] = curve[i] + s * v.V[i];
      us[i] = u[i] + s * v.w[i];
    }
    const ScalarField rho_s = [&](const Vec& x) { return rho(x) + s * v.k(x); };
    const TensorField g_s = [&](const Vec& x) -> Mat {
      g.require_inside(x);
      const Mat m = g.jet(x, 0).g + s * v.h(x);
      if (Eigen::LLT<Eigen::MatrixXd>(Eigen::MatrixXd(m)).info() != Eigen::Success)
        throw DomainError("perturbed metric is not positive definite; reduce eps");
      return m;
    };
    return general_functional(us, DiscreteCurve(std::move(pts)), rho_s, g_s, g.chart()).value;
  };
  return (evaluate(eps) - evaluate(-eps)) / (2.0 * eps);
}

namespace {

/// ∫_{t_i}^{t_{i+1}} √(t₂ − t) φ dt for φ linear between φ_i and φ_{i+1}.
double weighted_panel(double t2, double ti, double tj, double phi_i, double phi_j) {
  const double b = t2 - ti, a = t2 - tj;
  const double w0 = (2.0 / 3.0) * (std::pow(b, 1.5) - std::pow(a, 1.5));
  const double w1 = (2.0 / 5.0) * (std::pow(b, 2.5) - std::pow(a, 2.5));
  // φ as a function of σ = t₂ − t: φ = A + Bσ.
  const double slope = -(phi_j - phi_i) / (b - a);
  const double intercept = phi_i - slope * b;
  return intercept * w0 + slope * w1;
}

template <class Eval>
double l_length_impl(const std::vector<PathSample>& path, const Chart& chart, Eval&& eval) {
  const int m = static_cast<int>(path.size());
  if (m < 2) throw InputError("a path needs at least two samples");
  for (int i = 1; i < m; ++i)
    if (!(path[i].second > path[i - 1].second)) throw InputError("path times must increase strictly");
  const double t2 = path.back().second;

  // γ̇ by three-point differences on the (possibly non-uniform) time grid.
  std::vector<Vec> vel(m);
  auto diff = [&](int i, int j) { return chart.delta(path[i].first, path[j].first); };
  for (int i = 0; i < m; ++i) {
    if (m == 2) {
      vel[i] = diff(0, 1) / (path[1].second - path[0].second);
      continue;
    }
    int c = std::clamp(i, 1, m - 2);
    const double t = path[i].second, h0 = path[c].second - path[c - 1].second,
                 h1 = path[c + 1].second - path[c].second;
    const Vec dm = diff(c, c - 1);  // x_{c−1} − x_c
    const Vec dp = diff(c, c + 1);  // x_{c+1} − x_c
    // Derivative at t of the quadratic through the three samples around c.
    const double s = t - path[c].second;
    const Vec first = (dp * h0 / h1 - dm * h1 / h0) / (h0 + h1);
    const Vec second = 2.0 * (dp / h1 + dm / h0) / (h0 + h1);
    vel[i] = first + s * second;
  }

  std::vector<double> phi(m);
  for (int i = 0; i < m; ++i) {
    const auto [scalar, g] = eval(path[i].first, path[i].second);
    phi[i] = scalar + inner(g, vel[i], vel[i]);
  }
  double total = 0.0;
  for (int i = 0; i + 1 < m; ++i)
    total += weighted_panel(t2, path[i].second, path[i + 1].second, phi[i], phi[i + 1]);
  return total;
}

}  // namespace

double l_length(const std::vector<PathSample>& path, const RicciFlowFamily& family) {
  if (!path.empty()) family.tau(path.back().second);
  return l_length_impl(path, family.soliton().chart(), [&](const Vec& x, double t) {
    family.soliton().require_inside(x);
    const CurvatureData cd = curvature(family.jet(x, t, 2));
    return std::make_pair(cd.scalar, Mat(family.jet(x, t, 0).g));
  });
}

double l_length(const std::vector<PathSample>& path, const Geometry& static_metric) {
  return l_length_impl(path, static_metric.chart(), [&](const Vec& x, double) {
    static_metric.require_inside(x);
    const MetricJet j = static_metric.jet(x, 2);
    return std::make_pair(curvature(j).scalar, Mat(j.g));
  });
}

double reduced_distance_gaussian(const Vec& base, double t2, const Vec& query, double t1) {
  if (!(t1 < t2)) throw DomainError("reduced distance needs t1 < t2");
  return (query - base).squaredNorm() / (4.0 * (t2 - t1));
}

}  // namespace rmcf

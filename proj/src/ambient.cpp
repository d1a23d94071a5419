#include "rmcf/ambient.hpp"

#include <cmath>
#include <numbers>

#include "rmcf/errors.hpp"

namespace rmcf {

MetricJet make_jet(int n, int order) {
  MetricJet jet;
  jet.order = order;
  jet.g = Mat::Zero(n, n);
  jet.df = Vec::Zero(n);
  jet.ddf = Mat::Zero(n, n);
  if (order >= 1)
    for (int k = 0; k < n; ++k) jet.dg[k] = Mat::Zero(n, n);
  if (order >= 2)
    for (int k = 0; k < n; ++k)
      for (int l = 0; l < n; ++l) jet.second(k, l) = Mat::Zero(n, n);
  return jet;
}

Christoffel christoffel(const MetricJet& jet, const Mat& g_inv) {
  const int n = jet.dim();
  Christoffel gamma(n);
  if (jet.order < 1) return gamma;
  bool constant = true;
  for (int k = 0; k < n && constant; ++k) constant = jet.dg[k].isZero(0.0);
  if (constant) return gamma;
  // Lowered symbols Γ_{dab} = ½(∂_a g_db + ∂_b g_da − ∂_d g_ab).
  Christoffel lowered(n);
  for (int d = 0; d < n; ++d)
    for (int a = 0; a < n; ++a)
      for (int b = 0; b < n; ++b)
        lowered(d, a, b) = 0.5 * (jet.dg[a](d, b) + jet.dg[b](d, a) - jet.dg[d](a, b));
  for (int c = 0; c < n; ++c)
    for (int a = 0; a < n; ++a)
      for (int b = 0; b < n; ++b) {
        double s = 0.0;
        for (int d = 0; d < n; ++d) s += g_inv(c, d) * lowered(d, a, b);
        gamma(c, a, b) = s;
      }
  return gamma;
}

CurvatureData curvature(const MetricJet& jet) {
  if (jet.order < 2) throw Error("curvature requires a second-order metric jet");
  const int n = jet.dim();
  CurvatureData out;
  out.g_inv = inverse(jet.g);
  out.gamma = christoffel(jet, out.g_inv);

  // ∂_k Γ^c_{ab}
  std::array<Christoffel, kMaxDim> dgamma;
  for (int k = 0; k < n; ++k) {
    const Mat dginv = -out.g_inv * jet.dg[k] * out.g_inv;
    dgamma[k] = Christoffel(n);
    for (int c = 0; c < n; ++c)
      for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b) {
          double s = 0.0;
          for (int d = 0; d < n; ++d) {
            const double first = jet.dg[a](d, b) + jet.dg[b](d, a) - jet.dg[d](a, b);
            const double second = jet.second(k, a)(d, b) + jet.second(k, b)(d, a) -
                                  jet.second(k, d)(a, b);
            s += 0.5 * (dginv(c, d) * first + out.g_inv(c, d) * second);
          }
          dgamma[k](c, a, b) = s;
        }
  }

  // R^m_{bcd} = ∂_c Γ^m_{db} − ∂_d Γ^m_{cb} + Γ^m_{cν} Γ^ν_{db} − Γ^m_{dν} Γ^ν_{cb}
  Tensor4 up(n);
  for (int m = 0; m < n; ++m)
    for (int b = 0; b < n; ++b)
      for (int c = 0; c < n; ++c)
        for (int d = 0; d < n; ++d) {
          double s = dgamma[c](m, d, b) - dgamma[d](m, c, b);
          for (int v = 0; v < n; ++v)
            s += out.gamma(m, c, v) * out.gamma(v, d, b) - out.gamma(m, d, v) * out.gamma(v, c, b);
          up(m, b, c, d) = s;
        }
  out.riemann = Tensor4(n);
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b)
      for (int c = 0; c < n; ++c)
        for (int d = 0; d < n; ++d) {
          double s = 0.0;
          for (int m = 0; m < n; ++m) s += jet.g(a, m) * up(m, b, c, d);
          out.riemann(a, b, c, d) = s;
        }
  out.ricci = Mat::Zero(n, n);
  for (int a = 0; a < n; ++a)
    for (int c = 0; c < n; ++c) {
      double s = 0.0;
      for (int b = 0; b < n; ++b)
        for (int d = 0; d < n; ++d) s += out.g_inv(b, d) * out.riemann(a, b, c, d);
      out.ricci(a, c) = s;
    }
  out.scalar = (out.g_inv.cwiseProduct(out.ricci)).sum();
  return out;
}

Vec potential_gradient(const MetricJet& jet, const Mat& g_inv) { return mul(g_inv, jet.df); }

Mat potential_hessian(const MetricJet& jet, const Christoffel& gamma) {
  const int n = jet.dim();
  Mat h = jet.ddf;
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b)
      for (int c = 0; c < n; ++c) h(a, b) -= gamma(c, a, b) * jet.df(c);
  return h;
}

void Geometry::require_inside(const Vec& x) const {
  if (!chart().contains(x)) throw DomainError("point outside chart validity domain");
}

Mat Geometry::metric_at(const Vec& x) const {
  require_inside(x);
  return jet(x, 0).g;
}

Christoffel Geometry::christoffel_at(const Vec& x) const {
  require_inside(x);
  const MetricJet j = jet(x, 1);
  return christoffel(j, inverse(j.g));
}

Tensor4 Geometry::riemann_at(const Vec& x) const {
  require_inside(x);
  return curvature(jet(x, 2)).riemann;
}

Mat Geometry::ricci_at(const Vec& x) const {
  require_inside(x);
  return curvature(jet(x, 2)).ricci;
}

double Geometry::scalar_at(const Vec& x) const {
  require_inside(x);
  return curvature(jet(x, 2)).scalar;
}

double Geometry::potential_at(const Vec& x) const {
  require_inside(x);
  return jet(x, 0).f;
}

Vec Geometry::potential_grad_at(const Vec& x) const {
  require_inside(x);
  const MetricJet j = jet(x, 1);
  return potential_gradient(j, inverse(j.g));
}

Mat Geometry::potential_hess_at(const Vec& x) const {
  require_inside(x);
  const MetricJet j = jet(x, 1);
  return potential_hessian(j, christoffel(j, inverse(j.g)));
}

namespace {

constexpr double kPi = std::numbers::pi;

/// (ℝⁿ, δ, |x|²/4)
class GaussianSoliton final : public AmbientSoliton {
 public:
  explicit GaussianSoliton(int n)
      : AmbientSoliton("gaussian", make_chart(n), std::vector<bool>(n, true), true) {}

  MetricJet jet(const Vec& x, int order) const override {
    const int n = dim();
    MetricJet j = make_jet(n, order);
    j.g = Mat::Identity(n, n);
    j.f = 0.25 * x.squaredNorm();
    j.df = 0.5 * x;
    j.ddf = 0.5 * Mat::Identity(n, n);
    return j;
  }

 private:
  static Chart make_chart(int n) {
    std::vector<Coordinate> coords;
    for (int i = 0; i < n; ++i)
      coords.push_back({"x" + std::to_string(i + 1), CoordinateKind::kLine, 0.0, 0.0});
    return Chart(std::move(coords));
  }
};

std::vector<Coordinate> sphere_coordinates() {
  return {{"theta", CoordinateKind::kInterval, kPoleMargin, kPi - kPoleMargin},
          {"phi", CoordinateKind::kPeriodic, -kPi, kPi}};
}

/// Round S²(r) in (θ, φ): g = r²(dθ² + sin²θ dφ²). Einstein with Ric = g/r²,
/// so r = √2 gives Ric = g/2 with constant potential f = 1.
void fill_sphere_block(MetricJet& j, double r2, double theta) {
  const double s = std::sin(theta);
  const double c = std::cos(theta);
  j.g(0, 0) = r2;
  j.g(1, 1) = r2 * s * s;
  if (j.order >= 1) j.dg[0](1, 1) = r2 * 2.0 * s * c;
  if (j.order >= 2) j.second(0, 0)(1, 1) = r2 * 2.0 * (c * c - s * s);
}

class SphereSoliton final : public AmbientSoliton {
 public:
  explicit SphereSoliton(double radius)
      : AmbientSoliton("sphere", Chart(sphere_coordinates()), {false, false}, false),
        r2_(radius * radius) {}

  MetricJet jet(const Vec& x, int order) const override {
    MetricJet j = make_jet(2, order);
    fill_sphere_block(j, r2_, x(0));
    j.f = 1.0;
    return j;
  }

 private:
  double r2_;
};

/// S²(√2) × ℝ in (θ, φ, x) with f = x²/4 + 1.
class CylinderSoliton final : public AmbientSoliton {
 public:
  explicit CylinderSoliton(double radius)
      : AmbientSoliton("cylinder", make_chart(), {false, false, true}, false),
        r2_(radius * radius) {}

  MetricJet jet(const Vec& x, int order) const override {
    MetricJet j = make_jet(3, order);
    fill_sphere_block(j, r2_, x(0));
    j.g(2, 2) = 1.0;
    j.f = 0.25 * x(2) * x(2) + 1.0;
    j.df(2) = 0.5 * x(2);
    j.ddf(2, 2) = 0.5;
    return j;
  }

 private:
  static Chart make_chart() {
    auto coords = sphere_coordinates();
    coords.push_back({"x", CoordinateKind::kLine, 0.0, 0.0});
    return Chart(std::move(coords));
  }
  double r2_;
};

double param_or(const std::map<std::string, double>& params, const std::string& key,
                double fallback) {
  auto it = params.find(key);
  return it == params.end() ? fallback : it->second;
}

double checked_radius(const std::map<std::string, double>& params) {
  const double r = param_or(params, "radius", std::numbers::sqrt2);
  if (!(r > 0.0)) throw ConfigError("soliton radius must be positive");
  // Ric = g/r² on the 2-sphere factor; only r = √2 satisfies Ric + Hess f = g/2.
  if (std::abs(r - std::numbers::sqrt2) > 1e-12)
    throw ConfigError("sphere factor radius must be sqrt(2) for the shrinking soliton equation");
  return r;
}

}  // namespace

std::shared_ptr<const AmbientSoliton> make_soliton(std::string_view name,
                                                   const std::map<std::string, double>& params) {
  for (const auto& [key, value] : params)
    if (key != "dim" && key != "radius") throw ConfigError("unknown soliton parameter: " + key);

  if (name == "gaussian") {
    const double n = param_or(params, "dim", 2.0);
    if (n != std::floor(n) || n < 2 || n > kMaxDim)
      throw ConfigError("gaussian soliton supports dim 2.." + std::to_string(kMaxDim));
    if (params.count("radius")) throw ConfigError("gaussian soliton takes no radius");
    return std::make_shared<GaussianSoliton>(static_cast<int>(n));
  }
  if (name == "sphere") {
    if (param_or(params, "dim", 2.0) != 2.0) throw ConfigError("sphere soliton supports dim 2");
    return std::make_shared<SphereSoliton>(checked_radius(params));
  }
  if (name == "cylinder") {
    if (param_or(params, "dim", 3.0) != 3.0) throw ConfigError("cylinder soliton supports dim 3");
    return std::make_shared<CylinderSoliton>(checked_radius(params));
  }
  throw ConfigError("unknown soliton: " + std::string(name));
}

std::pair<double, double> identity_residuals(const AmbientSoliton& soliton, const Vec& p) {
  soliton.require_inside(p);
  const MetricJet j = soliton.jet(p, 2);
  const CurvatureData cd = curvature(j);
  const Mat hess = potential_hessian(j, cd.gamma);
  const double soliton_eq = (cd.ricci + hess - 0.5 * j.g).cwiseAbs().maxCoeff();
  const Vec grad = potential_gradient(j, cd.g_inv);
  const double normalization = std::abs(cd.scalar + inner(j.g, grad, grad) - j.f);
  return {soliton_eq, normalization};
}

ConformalGeometry::ConformalGeometry(std::shared_ptr<const Geometry> base, double lambda, int m)
    : base_(std::move(base)), lambda_(lambda), m_(m) {
  if (m_ < 1) throw ConfigError("conformal exponent requires m >= 1");
}

MetricJet ConformalGeometry::jet(const Vec& x, int order) const {
  // ĝ = e^{2φ} g with φ = λ f / m.
  const MetricJet b = base_->jet(x, order);
  const int n = b.dim();
  const double c = 2.0 * lambda_ / m_;
  const double w = std::exp(c * b.f);
  MetricJet j = b;
  j.g = w * b.g;
  if (order >= 1) {
    for (int k = 0; k < n; ++k) j.dg[k] = w * (b.dg[k] + c * b.df(k) * b.g);
  }
  if (order >= 2) {
    for (int k = 0; k < n; ++k)
      for (int l = 0; l < n; ++l) {
        const double dk = c * b.df(k);
        const double dl = c * b.df(l);
        const double dkl = c * b.ddf(k, l);
        j.second(k, l) = w * (b.second(k, l) + dk * b.dg[l] + dl * b.dg[k] +
                              (dkl + dk * dl) * b.g);
      }
  }
  return j;
}

Mat conformal_metric_at(const AmbientSoliton& soliton, double lambda, int m, const Vec& p) {
  if (m < 1) throw ConfigError("conformal exponent requires m >= 1");
  soliton.require_inside(p);
  const MetricJet j = soliton.jet(p, 0);
  return std::exp(2.0 * lambda * j.f / m) * j.g;
}

}  // namespace rmcf

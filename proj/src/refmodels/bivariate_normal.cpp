#include "saem/refmodels/bivariate_normal.hpp"

#include "saem/normal.hpp"

#include <algorithm>
#include <cmath>

namespace saem::refmodels {

namespace {

// Unpacked parameter point.
struct Params {
  double m1, m2, s1, s2, sig1, sig2, r, d;

  explicit Params(const ParamVector& theta)
      : m1(theta[0]),
        m2(theta[1]),
        s1(theta[2]),
        s2(theta[3]),
        sig1(std::exp(theta[2])),
        sig2(std::exp(theta[3])),
        r(std::tanh(theta[4])),
        d(1.0 - std::tanh(theta[4]) * std::tanh(theta[4])) {}
};

inline double unit_loglik(const Params& p, double y1, double y2) {
  const double u = (y1 - p.m1) / p.sig1;
  const double v = (y2 - p.m2) / p.sig2;
  const double q = (u * u - 2.0 * p.r * u * v + v * v) / p.d;
  return -2.0 * kLogSqrt2Pi - p.s1 - p.s2 - 0.5 * std::log(p.d) - 0.5 * q;
}

// Gradient of unit_loglik in (m1, m2, log sig1, log sig2, atanh rho).
// With u, v the standardized residuals, a = 1/sig1, b = 1/sig2,
// P = (u - r v)/d, Q = (v - r u)/d:
//   g = (a P, b Q, -1 + u P, -1 + v Q, r + (u v d - r f)/d),  f = u^2 - 2ruv + v^2.
inline void unit_score(const Params& p, double y1, double y2, Vector& g) {
  const double a = 1.0 / p.sig1;
  const double b = 1.0 / p.sig2;
  const double u = (y1 - p.m1) * a;
  const double v = (y2 - p.m2) * b;
  const double P = (u - p.r * v) / p.d;
  const double Q = (v - p.r * u) / p.d;
  const double f = u * u - 2.0 * p.r * u * v + v * v;
  g[0] += a * P;
  g[1] += b * Q;
  g[2] += -1.0 + u * P;
  g[3] += -1.0 + v * Q;
  g[4] += p.r + (u * v * p.d - p.r * f) / p.d;
}

// Negative Hessian of unit_loglik in the same coordinates (so the returned
// matrix accumulates the complete-data information). Derived by
// differentiating the gradient above; dP/dw = (2ru - v(1+r^2))/d and
// dQ/dw = (2rv - u(1+r^2))/d with w = atanh rho.
inline void unit_neg_hessian(const Params& p, double y1, double y2, Matrix& info) {
  const double a = 1.0 / p.sig1;
  const double b = 1.0 / p.sig2;
  const double u = (y1 - p.m1) * a;
  const double v = (y2 - p.m2) * b;
  const double r = p.r;
  const double d = p.d;
  const double P = (u - r * v) / d;
  const double Q = (v - r * u) / d;
  const double f = u * u - 2.0 * r * u * v + v * v;
  const double dP_dw = (2.0 * r * u - v * (1.0 + r * r)) / d;
  const double dQ_dw = (2.0 * r * v - u * (1.0 + r * r)) / d;

  Matrix h(5, 5);
  h(0, 0) = -a * a / d;
  h(0, 1) = a * b * r / d;
  h(0, 2) = -a * P - a * u / d;
  h(0, 3) = a * r * v / d;
  h(0, 4) = a * dP_dw;
  h(1, 1) = -b * b / d;
  h(1, 2) = b * r * u / d;
  h(1, 3) = -b * Q - b * v / d;
  h(1, 4) = b * dQ_dw;
  h(2, 2) = -u * P - u * u / d;
  h(2, 3) = u * r * v / d;
  h(2, 4) = u * dP_dw;
  h(3, 3) = -v * Q - v * v / d;
  h(3, 4) = v * dQ_dw;
  h(4, 4) = d + 2.0 * r * u * v - f * (1.0 + r * r) / d;

  for (int i = 0; i < 5; ++i) {
    for (int j = i; j < 5; ++j) {
      info(i, j) -= h(i, j);
      if (j != i) info(j, i) -= h(i, j);
    }
  }
}

struct CondNormal {
  double mean, sd;
};

// x2 | x1 and x1 | x2 one-dimensional conditionals.
inline CondNormal cond_x2_given_x1(const Params& p, double y1) {
  const double u = (y1 - p.m1) / p.sig1;
  return {p.m2 + p.r * p.sig2 * u, p.sig2 * std::sqrt(p.d)};
}
inline CondNormal cond_x1_given_x2(const Params& p, double y2) {
  const double v = (y2 - p.m2) / p.sig2;
  return {p.m1 + p.r * p.sig1 * v, p.sig1 * std::sqrt(p.d)};
}

}  // namespace

BivariateNormalMissingModel::BivariateNormalMissingModel(BivariateData data) {
  for (const BivariatePair& row : data) {
    if (row.x1 && row.x2) {
      complete_.emplace_back(*row.x1, *row.x2);
    } else if (row.x1) {
      miss2_.push_back(*row.x1);
    } else if (row.x2) {
      miss1_.push_back(*row.x2);
    } else {
      throw DataFormatError("bivariate normal: a row with both coordinates missing "
                            "carries no information and is rejected");
    }
  }
  n_ = complete_.size() + miss2_.size() + miss1_.size();
  if (n_ == 0) throw DataFormatError("bivariate normal: no observations");
}

double BivariateNormalMissingModel::complete_loglik(const ParamVector& theta,
                                                    const Latent& z) const {
  if (z.size() != num_missing()) throw DimensionMismatch("bivariate: latent size mismatch");
  const Params p(theta);
  double ll = 0.0;
  for (const auto& [y1, y2] : complete_) ll += unit_loglik(p, y1, y2);
  std::size_t j = 0;
  for (double y1 : miss2_) ll += unit_loglik(p, y1, z[j++]);
  for (double y2 : miss1_) ll += unit_loglik(p, z[j++], y2);
  return ll;
}

Vector BivariateNormalMissingModel::score(const ParamVector& theta, const Latent& z) const {
  const Params p(theta);
  Vector g = Vector::Zero(5);
  for (const auto& [y1, y2] : complete_) unit_score(p, y1, y2, g);
  std::size_t j = 0;
  for (double y1 : miss2_) unit_score(p, y1, z[j++], g);
  for (double y2 : miss1_) unit_score(p, z[j++], y2, g);
  return g;
}

Matrix BivariateNormalMissingModel::complete_info(const ParamVector& theta,
                                                  const Latent& z) const {
  const Params p(theta);
  Matrix info = Matrix::Zero(5, 5);
  for (const auto& [y1, y2] : complete_) unit_neg_hessian(p, y1, y2, info);
  std::size_t j = 0;
  for (double y1 : miss2_) unit_neg_hessian(p, y1, z[j++], info);
  for (double y2 : miss1_) unit_neg_hessian(p, z[j++], y2, info);
  return info;
}

double BivariateNormalMissingModel::latent_conditional_logpdf(const ParamVector& theta,
                                                              const Latent& z) const {
  const Params p(theta);
  double lp = 0.0;
  std::size_t j = 0;
  for (double y1 : miss2_) {
    const CondNormal c = cond_x2_given_x1(p, y1);
    lp += norm_logpdf((z[j] - c.mean) / c.sd) - std::log(c.sd);
    ++j;
  }
  for (double y2 : miss1_) {
    const CondNormal c = cond_x1_given_x2(p, y2);
    lp += norm_logpdf((z[j] - c.mean) / c.sd) - std::log(c.sd);
    ++j;
  }
  return lp;
}

Proposal<BivariateNormalMissingModel::Latent> BivariateNormalMissingModel::propose(
    const ParamVector& theta, const Latent& z, Rng& rng) const {
  const Params p(theta);
  Latent candidate(num_missing());
  std::size_t j = 0;
  for (double y1 : miss2_) {
    const CondNormal c = cond_x2_given_x1(p, y1);
    candidate[j++] = c.mean + c.sd * rng.normal();
  }
  for (double y2 : miss1_) {
    const CondNormal c = cond_x1_given_x2(p, y2);
    candidate[j++] = c.mean + c.sd * rng.normal();
  }
  const double log_ratio =
      latent_conditional_logpdf(theta, z) - latent_conditional_logpdf(theta, candidate);
  return {std::move(candidate), log_ratio};
}

BivariateNormalMissingModel::Latent BivariateNormalMissingModel::init_latent(
    const ParamVector& theta, Rng& rng) const {
  const Params p(theta);
  Latent z(num_missing());
  std::size_t j = 0;
  for (double y1 : miss2_) {
    const CondNormal c = cond_x2_given_x1(p, y1);
    z[j++] = c.mean + c.sd * rng.normal();
  }
  for (double y2 : miss1_) {
    const CondNormal c = cond_x1_given_x2(p, y2);
    z[j++] = c.mean + c.sd * rng.normal();
  }
  return z;
}

double BivariateNormalMissingModel::exact_marginal_loglik(const ParamVector& theta) const {
  const Params p(theta);
  double ll = 0.0;
  for (const auto& [y1, y2] : complete_) ll += unit_loglik(p, y1, y2);
  for (double y1 : miss2_) {
    const double u = (y1 - p.m1) / p.sig1;
    ll += norm_logpdf(u) - p.s1;
  }
  for (double y2 : miss1_) {
    const double v = (y2 - p.m2) / p.sig2;
    ll += norm_logpdf(v) - p.s2;
  }
  return ll;
}

ParamVector BivariateNormalMissingModel::exact_em_step(const ParamVector& theta) const {
  const Params p(theta);
  double t1 = 0.0, t2 = 0.0, t11 = 0.0, t22 = 0.0, t12 = 0.0;
  for (const auto& [y1, y2] : complete_) {
    t1 += y1;
    t2 += y2;
    t11 += y1 * y1;
    t22 += y2 * y2;
    t12 += y1 * y2;
  }
  for (double y1 : miss2_) {
    const CondNormal c = cond_x2_given_x1(p, y1);
    t1 += y1;
    t2 += c.mean;
    t11 += y1 * y1;
    t22 += c.sd * c.sd + c.mean * c.mean;
    t12 += y1 * c.mean;
  }
  for (double y2 : miss1_) {
    const CondNormal c = cond_x1_given_x2(p, y2);
    t1 += c.mean;
    t2 += y2;
    t11 += c.sd * c.sd + c.mean * c.mean;
    t22 += y2 * y2;
    t12 += c.mean * y2;
  }
  const double n = static_cast<double>(n_);
  const double mu1 = t1 / n;
  const double mu2 = t2 / n;
  const double var1 = t11 / n - mu1 * mu1;
  const double var2 = t22 / n - mu2 * mu2;
  const double cov = t12 / n - mu1 * mu2;
  const double rho = cov / std::sqrt(var1 * var2);
  ParamVector next(5);
  next[0] = mu1;
  next[1] = mu2;
  next[2] = 0.5 * std::log(var1);
  next[3] = 0.5 * std::log(var2);
  next[4] = std::atanh(rho);
  return next;
}

ParamVector BivariateNormalMissingModel::default_init() const {
  double t1 = 0.0, t11 = 0.0, t2 = 0.0, t22 = 0.0;
  double n1 = 0.0, n2 = 0.0;
  auto add1 = [&](double y) { t1 += y; t11 += y * y; n1 += 1.0; };
  auto add2 = [&](double y) { t2 += y; t22 += y * y; n2 += 1.0; };
  for (const auto& [y1, y2] : complete_) {
    add1(y1);
    add2(y2);
  }
  for (double y1 : miss2_) add1(y1);
  for (double y2 : miss1_) add2(y2);

  const double mu1 = t1 / n1;
  const double mu2 = t2 / n2;
  double var1 = t11 / n1 - mu1 * mu1;
  double var2 = t22 / n2 - mu2 * mu2;
  if (!(var1 > 1e-12)) var1 = 1.0;
  if (!(var2 > 1e-12)) var2 = 1.0;

  double rho = 0.0;
  if (complete_.size() >= 2) {
    double c1 = 0.0, c2 = 0.0, c11 = 0.0, c22 = 0.0, c12 = 0.0;
    const double m = static_cast<double>(complete_.size());
    for (const auto& [y1, y2] : complete_) {
      c1 += y1;
      c2 += y2;
      c11 += y1 * y1;
      c22 += y2 * y2;
      c12 += y1 * y2;
    }
    const double v1 = c11 / m - (c1 / m) * (c1 / m);
    const double v2 = c22 / m - (c2 / m) * (c2 / m);
    if (v1 > 1e-12 && v2 > 1e-12) {
      rho = (c12 / m - (c1 / m) * (c2 / m)) / std::sqrt(v1 * v2);
      rho = std::clamp(rho, -0.99, 0.99);
    }
  }

  ParamVector theta(5);
  theta[0] = mu1;
  theta[1] = mu2;
  theta[2] = 0.5 * std::log(var1);
  theta[3] = 0.5 * std::log(var2);
  theta[4] = std::atanh(rho);
  return theta;
}

BivariateData BivariateNormalMissingModel::generate(double mu1, double mu2, double sigma1,
                                                    double sigma2, double rho, std::size_t n,
                                                    double miss_frac, std::uint64_t seed) {
  if (n == 0) throw ConfigError("bivariate generator: n must be >= 1");
  if (!(rho > -1.0 && rho < 1.0)) throw ConfigError("bivariate generator: rho must be in (-1, 1)");
  if (!(miss_frac >= 0.0 && miss_frac < 1.0)) {
    throw ConfigError("bivariate generator: miss_frac must be in [0, 1)");
  }
  Rng rng(seed);
  const double tail = std::sqrt(1.0 - rho * rho);
  BivariateData data(n);
  for (std::size_t k = 0; k < n; ++k) {
    const double e1 = rng.normal();
    const double e2 = rng.normal();
    const double y1 = mu1 + sigma1 * e1;
    const double y2 = mu2 + sigma2 * (rho * e1 + tail * e2);
    const double u = rng.uniform();
    if (u < 0.5 * miss_frac) {
      data[k] = {std::nullopt, y2};
    } else if (u < miss_frac) {
      data[k] = {y1, std::nullopt};
    } else {
      data[k] = {y1, y2};
    }
  }
  return data;
}

}  // namespace saem::refmodels

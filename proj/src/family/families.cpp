#include "family/family.hpp"

#include <boost/math/distributions/gamma.hpp>
#include <boost/math/distributions/normal.hpp>
#include <boost/math/special_functions/digamma.hpp>
#include <cmath>

namespace fb {

namespace {

constexpr double kScaleFloor = 1e-10;
constexpr double kScaleCeil = 1e10;
constexpr double kProbFloor = 1e-10;

double clamp_positive(double v) {
  return std::clamp(v, kScaleFloor, kScaleCeil);
}
double clamp_prob(double v) {
  return std::clamp(v, kProbFloor, 1.0 - kProbFloor);
}

void check_quantile_u(double u) {
  if (!(u >= 0.0 && u <= 1.0)) {
    throw DomainError("quantile probability outside [0, 1]");
  }
}

// -log density of the gamma with mean mu and coefficient of variation c
// (shape 1/c^2, scale mu*c^2).
double gamma_neg_log_density(double y, double mu, double c) {
  const double alpha = 1.0 / (c * c);
  const double scale = mu * c * c;
  return std::lgamma(alpha) + alpha * std::log(scale) -
         (alpha - 1.0) * std::log(y) + y / scale;
}

double gamma_kld(double mu1, double c1, double mu2, double c2) {
  const double a1 = 1.0 / (c1 * c1), s1 = mu1 * c1 * c1;
  const double a2 = 1.0 / (c2 * c2), s2 = mu2 * c2 * c2;
  return (a1 - a2) * boost::math::digamma(a1) - std::lgamma(a1) +
         std::lgamma(a2) + a2 * (std::log(s2) - std::log(s1)) +
         a1 * (s1 - s2) / s2;
}

class GaussianFamily final : public Family {
public:
  std::string id() const override { return "gaussian"; }
  int n_parameters() const override { return 2; }
  std::vector<std::string> parameter_names() const override {
    return {"mu", "sigma"};
  }
  Link link(int q) const override {
    return q == 0 ? Link::Identity : Link::Log;
  }

  double loss(double y, const Eigen::VectorXd& h) const override {
    const double mu = h[0];
    const double sigma = clamp_positive(std::exp(h[1]));
    const double z = (y - mu) / sigma;
    return 0.5 * std::log(2.0 * M_PI) + std::log(sigma) + 0.5 * z * z;
  }

  double partial_gradient(int q, double y,
                          const Eigen::VectorXd& h) const override {
    const double mu = h[0];
    const double sigma2 = std::exp(2.0 * h[1]);
    if (q == 0) return (mu - y) / sigma2;
    return 1.0 - (y - mu) * (y - mu) / sigma2;
  }

  double quantile(double u, const Eigen::VectorXd& theta) const override {
    check_quantile_u(u);
    boost::math::normal_distribution<double> n(theta[0], theta[1]);
    return boost::math::quantile(n, u);
  }

  double kld(const Eigen::VectorXd& t, const Eigen::VectorXd& e) const override {
    const double s1 = t[1], s2 = e[1], dm = t[0] - e[0];
    return std::log(s2 / s1) + (s1 * s1 + dm * dm) / (2.0 * s2 * s2) - 0.5;
  }

  Eigen::VectorXd offsets(const Eigen::MatrixXd& response) const override {
    const double n = static_cast<double>(response.size());
    const double mean = response.mean();
    const double ss = (response.array() - mean).square().sum();
    const double sd = std::sqrt(ss / std::max(n - 1.0, 1.0));
    if (!(sd > 0.0) || !std::isfinite(sd)) {
      throw DegenerateDataError("response has zero variance");
    }
    Eigen::VectorXd o(2);
    o << mean, std::log(sd);
    return o;
  }
};

// Moments of the strictly positive response values; shared by the gamma
// families for offset initialization.
struct PositiveMoments {
  double log_mean;
  double log_cv;
  double zero_fraction;
};

PositiveMoments positive_moments(const Eigen::MatrixXd& response) {
  std::vector<double> pos;
  long zeros = 0;
  for (long i = 0; i < response.rows(); ++i) {
    for (long j = 0; j < response.cols(); ++j) {
      const double v = response(i, j);
      if (v < 0.0) throw SupportError("negative response value");
      if (v == 0.0) {
        ++zeros;
      } else {
        pos.push_back(v);
      }
    }
  }
  if (pos.size() < 2) {
    throw DegenerateDataError("too few positive response values");
  }
  double mean = 0.0;
  for (double v : pos) mean += v;
  mean /= static_cast<double>(pos.size());
  double ss = 0.0;
  for (double v : pos) ss += (v - mean) * (v - mean);
  const double sd = std::sqrt(ss / (static_cast<double>(pos.size()) - 1.0));
  if (!(sd > 0.0) || !(mean > 0.0)) {
    throw DegenerateDataError("degenerate positive response moments");
  }
  PositiveMoments m;
  m.log_mean = std::log(mean);
  m.log_cv = std::log(sd / mean);
  m.zero_fraction =
      static_cast<double>(zeros) / static_cast<double>(response.size());
  return m;
}

class GammaCvFamily final : public Family {
public:
  std::string id() const override { return "gamma-cv"; }
  int n_parameters() const override { return 2; }
  std::vector<std::string> parameter_names() const override {
    return {"mu", "cv"};
  }
  Link link(int) const override { return Link::Log; }

  double loss(double y, const Eigen::VectorXd& h) const override {
    if (y <= 0.0) throw SupportError("gamma loss needs y > 0");
    const double mu = clamp_positive(std::exp(h[0]));
    const double c = clamp_positive(std::exp(h[1]));
    return gamma_neg_log_density(y, mu, c);
  }

  double partial_gradient(int q, double y,
                          const Eigen::VectorXd& h) const override {
    const double mu = std::exp(h[0]), c = std::exp(h[1]);
    const double alpha = 1.0 / (c * c);
    if (q == 0) return (1.0 - y / mu) * alpha;
    return 2.0 * alpha *
           (1.0 + std::log(y) - std::log(mu * c * c) -
            boost::math::digamma(alpha) - y / mu);
  }

  double quantile(double u, const Eigen::VectorXd& theta) const override {
    check_quantile_u(u);
    const double c = theta[1];
    boost::math::gamma_distribution<double> g(1.0 / (c * c),
                                              theta[0] * c * c);
    return boost::math::quantile(g, u);
  }

  double kld(const Eigen::VectorXd& t, const Eigen::VectorXd& e) const override {
    return gamma_kld(t[0], t[1], e[0], e[1]);
  }

  Eigen::VectorXd offsets(const Eigen::MatrixXd& response) const override {
    const auto m = positive_moments(response);
    Eigen::VectorXd o(2);
    o << m.log_mean, m.log_cv;
    return o;
  }
};

class ZeroAdjustedGammaFamily final : public Family {
public:
  std::string id() const override { return "za-gamma"; }
  int n_parameters() const override { return 3; }
  std::vector<std::string> parameter_names() const override {
    return {"mu", "cv", "p"};
  }
  Link link(int q) const override { return q == 2 ? Link::Logit : Link::Log; }

  double loss(double y, const Eigen::VectorXd& h) const override {
    if (y < 0.0) throw SupportError("zero-adjusted gamma loss needs y >= 0");
    const double p = clamp_prob(1.0 / (1.0 + std::exp(-h[2])));
    if (y == 0.0) return -std::log(p);
    const double mu = clamp_positive(std::exp(h[0]));
    const double c = clamp_positive(std::exp(h[1]));
    return -std::log(1.0 - p) + gamma_neg_log_density(y, mu, c);
  }

  double partial_gradient(int q, double y,
                          const Eigen::VectorXd& h) const override {
    const double p = 1.0 / (1.0 + std::exp(-h[2]));
    if (q == 2) return y == 0.0 ? -(1.0 - p) : p;
    if (y == 0.0) return 0.0;
    const double mu = std::exp(h[0]), c = std::exp(h[1]);
    const double alpha = 1.0 / (c * c);
    if (q == 0) return (1.0 - y / mu) * alpha;
    return 2.0 * alpha *
           (1.0 + std::log(y) - std::log(mu * c * c) -
            boost::math::digamma(alpha) - y / mu);
  }

  double quantile(double u, const Eigen::VectorXd& theta) const override {
    check_quantile_u(u);
    const double p = theta[2];
    if (u <= p) return 0.0;
    const double c = theta[1];
    boost::math::gamma_distribution<double> g(1.0 / (c * c),
                                              theta[0] * c * c);
    return boost::math::quantile(g, (u - p) / (1.0 - p));
  }

  double kld(const Eigen::VectorXd& t, const Eigen::VectorXd& e) const override {
    const double p1 = t[2], p2 = e[2];
    double out = 0.0;
    if (p1 > 0.0) out += p1 * std::log(p1 / p2);
    if (p1 < 1.0) out += (1.0 - p1) * std::log((1.0 - p1) / (1.0 - p2));
    out += (1.0 - p1) * gamma_kld(t[0], t[1], e[0], e[1]);
    return out;
  }

  Eigen::VectorXd offsets(const Eigen::MatrixXd& response) const override {
    const auto m = positive_moments(response);
    const double p = std::clamp(m.zero_fraction, 1e-6, 1.0 - 1e-6);
    Eigen::VectorXd o(3);
    o << m.log_mean, m.log_cv, std::log(p / (1.0 - p));
    return o;
  }
};

}  // namespace

double apply_link(Link link, double value) {
  switch (link) {
    case Link::Identity: return value;
    case Link::Log: return std::log(value);
    case Link::Logit: return std::log(value / (1.0 - value));
  }
  return value;
}

double apply_inverse_link(Link link, double predictor) {
  switch (link) {
    case Link::Identity: return predictor;
    case Link::Log: return std::exp(predictor);
    case Link::Logit: return 1.0 / (1.0 + std::exp(-predictor));
  }
  return predictor;
}

Eigen::VectorXd Family::parameters_from_predictors(
    const Eigen::VectorXd& h) const {
  Eigen::VectorXd theta(h.size());
  for (int q = 0; q < h.size(); ++q) {
    theta[q] = apply_inverse_link(link(q), h[q]);
  }
  return theta;
}

std::shared_ptr<const Family> gaussian_family() {
  static auto f = std::make_shared<const GaussianFamily>();
  return f;
}
std::shared_ptr<const Family> gamma_cv_family() {
  static auto f = std::make_shared<const GammaCvFamily>();
  return f;
}
std::shared_ptr<const Family> zero_adjusted_gamma_family() {
  static auto f = std::make_shared<const ZeroAdjustedGammaFamily>();
  return f;
}

std::shared_ptr<const Family> family_by_id(const std::string& id) {
  if (id == "gaussian") return gaussian_family();
  if (id == "gamma-cv") return gamma_cv_family();
  if (id == "za-gamma") return zero_adjusted_gamma_family();
  throw ConfigError("unknown family id '" + id + "'");
}

double empirical_loss(const Family& family, const Eigen::VectorXd& y,
                      const Eigen::MatrixXd& h) {
  if (h.rows() != family.n_parameters() || h.cols() != y.size()) {
    throw DimensionError("empirical_loss: shape mismatch");
  }
  if (!h.allFinite()) {
    throw DomainError("non-finite predictor in loss evaluation");
  }
  double sum = 0.0;
  for (long g = 0; g < y.size(); ++g) {
    sum += family.loss(y[g], h.col(g));
  }
  return sum;
}

}  // namespace fb

#ifndef FB_FAMILY_FAMILY_HPP
#define FB_FAMILY_FAMILY_HPP

#include <Eigen/Dense>
#include <memory>
#include <string>
#include <vector>

#include "core/dataset.hpp"
#include "core/errors.hpp"

namespace fb {

enum class Link { Identity, Log, Logit };

double apply_link(Link link, double value);
double apply_inverse_link(Link link, double predictor);

// A response distribution with Q parameters, each reached through its own
// link from an additive predictor h^(q). Stateless and reentrant.
class Family {
public:
  virtual ~Family() = default;

  virtual std::string id() const = 0;
  virtual int n_parameters() const = 0;
  virtual std::vector<std::string> parameter_names() const = 0;
  virtual Link link(int q) const = 0;

  // Pointwise negative log-likelihood at predictors h (size Q). Implied
  // parameter values are clamped to the admissible region before evaluation.
  virtual double loss(double y, const Eigen::VectorXd& h) const = 0;

  // d loss / d h^(q), evaluated at unclamped predictors.
  virtual double partial_gradient(int q, double y,
                                  const Eigen::VectorXd& h) const = 0;

  // Inverse CDF at probability u given parameter values theta (size Q).
  virtual double quantile(double u, const Eigen::VectorXd& theta) const = 0;

  // KLD[F(theta_true) : F(theta_est)].
  virtual double kld(const Eigen::VectorXd& theta_true,
                     const Eigen::VectorXd& theta_est) const = 0;

  // Per-parameter link-scale offsets from marginal moments of the response.
  virtual Eigen::VectorXd offsets(const Eigen::MatrixXd& response) const = 0;

  Eigen::VectorXd parameters_from_predictors(const Eigen::VectorXd& h) const;
};

std::shared_ptr<const Family> gaussian_family();
std::shared_ptr<const Family> gamma_cv_family();
std::shared_ptr<const Family> zero_adjusted_gamma_family();
std::shared_ptr<const Family> family_by_id(const std::string& id);

// Sum of pointwise losses over the grid (unweighted).
// y: G-vector; h: Q x G matrix of predictor values.
double empirical_loss(const Family& family, const Eigen::VectorXd& y,
                      const Eigen::MatrixXd& h);

}  // namespace fb

#endif

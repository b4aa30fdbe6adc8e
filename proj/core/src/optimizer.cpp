#include "fixgraph/optimizer.hpp"

#include <cmath>

#include "fixgraph/errors.hpp"

namespace fixgraph {

OptimizerKind optimizer_from_string(const std::string& name) {
  if (name == "adam") return OptimizerKind::Adam;
  if (name == "sgd-momentum") return OptimizerKind::SgdMomentum;
  throw BadConfig("unknown optimizer '" + name + "' (expected adam or sgd-momentum)");
}

std::string to_string(OptimizerKind kind) {
  return kind == OptimizerKind::Adam ? "adam" : "sgd-momentum";
}

Optimizer::Optimizer(OptimizerConfig config, Eigen::Index parameter_count)
    : config_(config),
      first_(Eigen::VectorXd::Zero(parameter_count)),
      second_(Eigen::VectorXd::Zero(parameter_count)) {}

void Optimizer::step(Eigen::VectorXd& params, const Eigen::VectorXd& grad) {
  if (params.size() != first_.size() || grad.size() != first_.size()) {
    throw ShapeMismatch("optimizer state does not match parameter count");
  }
  ++steps_;
  const Eigen::VectorXd g = grad + config_.weight_decay * params;
  if (config_.kind == OptimizerKind::SgdMomentum) {
    first_ = config_.momentum * first_ + g;
    params -= config_.learning_rate * first_;
    return;
  }
  first_ = config_.beta1 * first_ + (1.0 - config_.beta1) * g;
  second_ = config_.beta2 * second_ + (1.0 - config_.beta2) * g.cwiseProduct(g);
  const double c1 = 1.0 - std::pow(config_.beta1, static_cast<double>(steps_));
  const double c2 = 1.0 - std::pow(config_.beta2, static_cast<double>(steps_));
  const Eigen::ArrayXd m_hat = first_.array() / c1;
  const Eigen::ArrayXd v_hat = second_.array() / c2;
  params.array() -= config_.learning_rate * m_hat / (v_hat.sqrt() + config_.epsilon);
}

}  // namespace fixgraph

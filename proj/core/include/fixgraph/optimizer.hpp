#pragma once

#include <Eigen/Dense>
#include <string>

namespace fixgraph {

enum class OptimizerKind { SgdMomentum, Adam };

OptimizerKind optimizer_from_string(const std::string& name);  // "adam" | "sgd-momentum"
std::string to_string(OptimizerKind kind);

struct OptimizerConfig {
  OptimizerKind kind = OptimizerKind::Adam;
  double learning_rate = 1e-3;
  /// L2 penalty added to the gradient before the update.
  double weight_decay = 1e-5;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
  double momentum = 0.9;
};

/// Stateful first-order optimizer over a flat parameter vector.
class Optimizer {
 public:
  Optimizer(OptimizerConfig config, Eigen::Index parameter_count);
  void step(Eigen::VectorXd& params, const Eigen::VectorXd& grad);
  long steps() const { return steps_; }

 private:
  OptimizerConfig config_;
  Eigen::VectorXd first_;
  Eigen::VectorXd second_;
  long steps_ = 0;
};

}  // namespace fixgraph

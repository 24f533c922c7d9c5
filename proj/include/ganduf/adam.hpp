#pragma once

#include <cstdint>
#include <vector>

#include "ganduf/tensor.hpp"

namespace ganduf {

struct AdamConfig {
  double lr = 1e-4;
  double beta1 = 0.5;  // GAN-friendly momentum
  double beta2 = 0.999;
  double eps = 1e-8;
};

// Adam over a fixed parameter set. step() applies the bias-corrected update
// and zeroes the gradients it consumed.
class Adam {
 public:
  explicit Adam(std::vector<Tensor> params, AdamConfig cfg = {});

  void step();
  void zero_grad();
  std::uint64_t steps() const { return t_; }
  const AdamConfig& config() const { return cfg_; }

 private:
  std::vector<Tensor> params_;
  std::vector<std::vector<double>> m_;
  std::vector<std::vector<double>> v_;
  AdamConfig cfg_;
  std::uint64_t t_ = 0;
};

}  // namespace ganduf

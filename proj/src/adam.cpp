#include "ganduf/adam.hpp"

#include <cmath>

namespace ganduf {

Adam::Adam(std::vector<Tensor> params, AdamConfig cfg)
    : params_(std::move(params)), cfg_(cfg) {
  m_.reserve(params_.size());
  v_.reserve(params_.size());
  for (const Tensor& p : params_) {
    if (!p.requires_grad())
      throw ContractError("Adam: parameter does not require grad");
    m_.emplace_back(p.size(), 0.0);
    v_.emplace_back(p.size(), 0.0);
  }
}

void Adam::step() {
  for (const Tensor& p : params_) {
    if (!p.has_grad())
      throw ContractError("adam_step: parameter gradient not populated");
  }
  ++t_;
  const double bc1 = 1.0 - std::pow(cfg_.beta1, static_cast<double>(t_));
  const double bc2 = 1.0 - std::pow(cfg_.beta2, static_cast<double>(t_));
  for (std::size_t i = 0; i < params_.size(); ++i) {
    auto val = params_[i].value();
    auto& g = params_[i].node_->grad;
    auto& m = m_[i];
    auto& v = v_[i];
    for (std::size_t j = 0; j < val.size(); ++j) {
      m[j] = cfg_.beta1 * m[j] + (1.0 - cfg_.beta1) * g[j];
      v[j] = cfg_.beta2 * v[j] + (1.0 - cfg_.beta2) * g[j] * g[j];
      const double mhat = m[j] / bc1;
      const double vhat = v[j] / bc2;
      val[j] -= cfg_.lr * mhat / (std::sqrt(vhat) + cfg_.eps);
    }
    params_[i].zero_grad();
  }
}

void Adam::zero_grad() {
  for (Tensor& p : params_) p.zero_grad();
}

}  // namespace ganduf

#include "modcomp/model.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include <Eigen/Eigenvalues>

#include "modcomp/error.hpp"

namespace modcomp {

void Hyperparameters::validate() const {
  if (!(a0 > 1.0) || !std::isfinite(a0)) throw InputError("hyper: a0 must exceed 1");
  if (!(b0 > 0.0) || !std::isfinite(b0)) throw InputError("hyper: b0 must be positive");
  if (!(gamma >= 0.0) || !std::isfinite(gamma)) throw InputError("hyper: gamma must be nonnegative");
}

Model::Model(std::vector<int> indices) : indices_(std::move(indices)) {
  if (indices_.empty()) throw InputError("model: at least one covariate is required");
  if (indices_.front() < 1) throw InputError("model: indices are 1-based");
  for (std::size_t i = 1; i < indices_.size(); ++i)
    if (indices_[i] <= indices_[i - 1]) throw InputError("model: indices must be strictly increasing");
}

Model Model::full(int k) {
  std::vector<int> idx(k);
  for (int j = 0; j < k; ++j) idx[j] = j + 1;
  return Model(std::move(idx));
}

bool Model::contains(int index) const {
  return std::binary_search(indices_.begin(), indices_.end(), index);
}

bool Model::includes(const Model& other) const {
  return std::includes(indices_.begin(), indices_.end(), other.indices_.begin(), other.indices_.end());
}

std::string Model::label() const {
  std::string out = "{";
  for (std::size_t i = 0; i < indices_.size(); ++i) {
    if (i) out += ',';
    out += std::to_string(indices_[i]);
  }
  return out + "}";
}

std::strong_ordering operator<=>(const Model& a, const Model& b) {
  if (auto c = a.size() <=> b.size(); c != 0) return c;
  return a.indices_ <=> b.indices_;
}

Model parse_model(const std::string& text) {
  std::string s;
  for (char c : text)
    if (c != '{' && c != '}' && c != ' ') s += c;
  std::vector<int> idx;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) throw InputError("model: empty index in '" + text + "'");
    std::size_t pos = 0;
    int v = 0;
    try {
      v = std::stoi(item, &pos);
    } catch (const std::exception&) {
      throw InputError("model: bad index '" + item + "'");
    }
    if (pos != item.size()) throw InputError("model: bad index '" + item + "'");
    idx.push_back(v);
  }
  std::sort(idx.begin(), idx.end());
  return Model(std::move(idx));
}

AgentPrior AgentPrior::nig(Model model, Hyperparameters hyper) {
  AgentPrior a;
  const int m = model.size();
  a.model = std::move(model);
  a.hyper = hyper;
  a.assumed_xx = Eigen::MatrixXd::Identity(m, m);
  return a;
}

AgentPrior AgentPrior::known_variance(Model model, double gamma, double sigma_sq) {
  AgentPrior a = nig(std::move(model), Hyperparameters{2.0, 1.0, gamma});
  a.known_sigma_sq = sigma_sq;
  return a;
}

void AgentPrior::validate() const {
  if (model.empty()) throw InputError("agent: empty model");
  if (!known_sigma_sq) hyper.validate();
  else if (!(*known_sigma_sq > 0.0)) throw InputError("agent: known_sigma_sq must be positive");
  if (!(hyper.gamma >= 0.0)) throw InputError("hyper: gamma must be nonnegative");
  const int m = model.size();
  if (assumed_xx.rows() != m || assumed_xx.cols() != m)
    throw InputError("agent: assumed_xx must be |J| x |J|");
  const double scale = std::max(assumed_xx.cwiseAbs().maxCoeff(), 1e-300);
  if ((assumed_xx - assumed_xx.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale)
    throw InputError("agent: assumed_xx must be symmetric");
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(assumed_xx, Eigen::EigenvaluesOnly);
  if (eig.eigenvalues().minCoeff() <= 0.0) throw InputError("agent: assumed_xx must be positive definite");
}

}  // namespace modcomp

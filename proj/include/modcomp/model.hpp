#pragma once

#include <compare>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Core>

namespace modcomp {

/// Normal-Inverse-Gamma hyperparameters: beta | s2 ~ N(0, s2/(gamma |J|) I), s2 ~ IG(a0, b0).
struct Hyperparameters {
  double a0 = 2.0;
  double b0 = 1.0;
  double gamma = 0.001;

  /// Enforces a0 > 1, b0 > 0, gamma >= 0.
  void validate() const;

  friend bool operator==(const Hyperparameters&, const Hyperparameters&) = default;
};

/** A nonempty, strictly increasing set of 1-based covariate indices.
 *
 * Ordering is (size, lexicographic), the order used for enumeration and for
 * breaking exact ties between agents.
 */
class Model {
 public:
  Model() = default;
  explicit Model(std::vector<int> indices);

  /// All covariates 1..k.
  static Model full(int k);

  const std::vector<int>& indices() const { return indices_; }
  int size() const { return static_cast<int>(indices_.size()); }
  bool empty() const { return indices_.empty(); }
  /// Largest index, i.e. the smallest k this model fits in.
  int max_index() const { return indices_.empty() ? 0 : indices_.back(); }

  bool contains(int index) const;
  /// True if every index of `other` is in this model.
  bool includes(const Model& other) const;

  /// "{1,3}"
  std::string label() const;

  friend bool operator==(const Model&, const Model&) = default;
  friend std::strong_ordering operator<=>(const Model& a, const Model& b);

 private:
  std::vector<int> indices_;
};

/// Parses "1,3" or "{1,3}".
Model parse_model(const std::string& text);

/// An agent: model, NIG hyperparameters and the covariate second moments it assumes.
struct AgentPrior {
  Model model;
  Hyperparameters hyper;
  /// When set the agent's variance prior is a point mass and (a0, b0) are ignored.
  std::optional<double> known_sigma_sq;
  /// E_P[x_J x_J'], |J| x |J|.
  Eigen::MatrixXd assumed_xx;

  static AgentPrior nig(Model model, Hyperparameters hyper);
  static AgentPrior known_variance(Model model, double gamma, double sigma_sq);

  void validate() const;
};

}  // namespace modcomp

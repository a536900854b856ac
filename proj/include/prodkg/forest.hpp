#ifndef PRODKG_FOREST_HPP
#define PRODKG_FOREST_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "prodkg/common.hpp"

namespace prodkg::ml {

using FeatureVector = std::vector<double>;

struct TreeNode {
  int feature = -1;  // -1 marks a leaf
  double threshold = 0.0;
  int left = -1, right = -1;
  std::vector<double> class_counts;  // classification leaves
  double value = 0.0;                // regression leaves
};

struct Tree {
  std::vector<TreeNode> nodes;  // node 0 is the root
};

enum class ForestTask { Classify, Regress };

struct ForestConfig {
  size_t n_trees = 100;
  size_t max_depth = 8;
  size_t features_per_split = 0;  // 0 = ceil(sqrt(p))
  size_t min_samples_split = 2;
  uint64_t seed = 0;
};

// Bagged axis-aligned decision trees. Gini impurity splits for
// classification, variance reduction for regression. Split ties resolve to
// the lowest feature index, then the lowest threshold.
struct Forest {
  ForestTask task = ForestTask::Classify;
  size_t n_features = 0;
  size_t n_classes = 0;
  uint64_t seed = 0;
  std::vector<Tree> trees;

  std::string to_json() const;
  static Forest from_json(const std::string& text);
};

// For classification y holds class indices (as doubles); for regression,
// raw targets. Constant-y input degenerates to single-leaf trees.
Forest fit_forest(const std::vector<FeatureVector>& X, const std::vector<double>& y,
                  const ForestConfig& cfg, ForestTask task);

// Majority-vote fractions across trees; sums to 1.
std::vector<double> forest_predict_proba(const Forest& f, const FeatureVector& x);
// Mean of leaf values across trees, clamped to [0,1].
double forest_predict_value(const Forest& f, const FeatureVector& x);

}  // namespace prodkg::ml

#endif

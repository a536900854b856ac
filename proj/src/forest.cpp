#include "prodkg/forest.hpp"

#include <algorithm>
#include <cmath>

#include <json.hpp>

namespace prodkg::ml {

using nlohmann::json;

namespace {

struct Builder {
  const std::vector<FeatureVector>& X;
  const std::vector<double>& y;
  const ForestConfig& cfg;
  ForestTask task;
  size_t n_classes;
  size_t fps;  // features per split
  Rng rng;
  Tree tree;

  double node_impurity(const std::vector<size_t>& idx) const {
    if (task == ForestTask::Classify) {
      std::vector<double> counts(n_classes, 0.0);
      for (size_t i : idx) counts[static_cast<size_t>(y[i])] += 1.0;
      double g = 1.0;
      for (double c : counts) {
        const double p = c / idx.size();
        g -= p * p;
      }
      return g;
    }
    double mean = 0;
    for (size_t i : idx) mean += y[i];
    mean /= idx.size();
    double var = 0;
    for (size_t i : idx) var += (y[i] - mean) * (y[i] - mean);
    return var / idx.size();
  }

  int make_leaf(const std::vector<size_t>& idx) {
    TreeNode leaf;
    if (task == ForestTask::Classify) {
      leaf.class_counts.assign(n_classes, 0.0);
      for (size_t i : idx) leaf.class_counts[static_cast<size_t>(y[i])] += 1.0;
    } else {
      double mean = 0;
      for (size_t i : idx) mean += y[i];
      leaf.value = mean / idx.size();
    }
    tree.nodes.push_back(std::move(leaf));
    return static_cast<int>(tree.nodes.size() - 1);
  }

  int build(std::vector<size_t>& idx, size_t depth) {
    bool constant = true;
    for (size_t i = 1; i < idx.size(); ++i)
      if (y[idx[i]] != y[idx[0]]) {
        constant = false;
        break;
      }
    if (depth >= cfg.max_depth || idx.size() < cfg.min_samples_split || constant)
      return make_leaf(idx);

    // random feature subset, kept sorted so ties break on lowest index
    const size_t p = X[0].size();
    std::vector<size_t> feats(p);
    for (size_t i = 0; i < p; ++i) feats[i] = i;
    std::shuffle(feats.begin(), feats.end(), rng);
    feats.resize(std::min(fps, p));
    std::sort(feats.begin(), feats.end());

    const double parent_imp = node_impurity(idx);
    double best_gain = 1e-12;
    size_t best_feat = 0;
    double best_thresh = 0;
    bool found = false;

    std::vector<std::pair<double, size_t>> vals;
    std::vector<size_t> left_idx, right_idx;
    for (size_t f : feats) {
      vals.clear();
      for (size_t i : idx) vals.emplace_back(X[i][f], i);
      std::sort(vals.begin(), vals.end(),
                [](const auto& a, const auto& b) { return a.first < b.first; });

      // sweep split points between distinct values
      if (task == ForestTask::Classify) {
        std::vector<double> left_counts(n_classes, 0.0), right_counts(n_classes, 0.0);
        for (size_t i : idx) right_counts[static_cast<size_t>(y[i])] += 1.0;
        for (size_t k = 0; k + 1 < vals.size(); ++k) {
          const size_t cls = static_cast<size_t>(y[vals[k].second]);
          left_counts[cls] += 1.0;
          right_counts[cls] -= 1.0;
          if (vals[k].first == vals[k + 1].first) continue;
          const double nl = k + 1.0, nr = vals.size() - nl;
          double gl = 1.0, gr = 1.0;
          for (size_t c = 0; c < n_classes; ++c) {
            const double pl = left_counts[c] / nl, pr = right_counts[c] / nr;
            gl -= pl * pl;
            gr -= pr * pr;
          }
          const double gain = parent_imp - (nl * gl + nr * gr) / vals.size();
          const double thresh = 0.5 * (vals[k].first + vals[k + 1].first);
          if (gain > best_gain + 1e-15 ||
              (std::fabs(gain - best_gain) <= 1e-15 && found &&
               (f < best_feat || (f == best_feat && thresh < best_thresh)))) {
            best_gain = gain;
            best_feat = f;
            best_thresh = thresh;
            found = true;
          }
        }
      } else {
        double ls = 0, ls2 = 0, rs = 0, rs2 = 0;
        for (size_t i : idx) {
          rs += y[i];
          rs2 += y[i] * y[i];
        }
        for (size_t k = 0; k + 1 < vals.size(); ++k) {
          const double yv = y[vals[k].second];
          ls += yv;
          ls2 += yv * yv;
          rs -= yv;
          rs2 -= yv * yv;
          if (vals[k].first == vals[k + 1].first) continue;
          const double nl = k + 1.0, nr = vals.size() - nl;
          const double vl = ls2 / nl - (ls / nl) * (ls / nl);
          const double vr = rs2 / nr - (rs / nr) * (rs / nr);
          const double gain = parent_imp - (nl * vl + nr * vr) / vals.size();
          const double thresh = 0.5 * (vals[k].first + vals[k + 1].first);
          if (gain > best_gain + 1e-15 ||
              (std::fabs(gain - best_gain) <= 1e-15 && found &&
               (f < best_feat || (f == best_feat && thresh < best_thresh)))) {
            best_gain = gain;
            best_feat = f;
            best_thresh = thresh;
            found = true;
          }
        }
      }
    }
    if (!found) return make_leaf(idx);

    left_idx.clear();
    right_idx.clear();
    for (size_t i : idx)
      (X[i][best_feat] <= best_thresh ? left_idx : right_idx).push_back(i);
    if (left_idx.empty() || right_idx.empty()) return make_leaf(idx);

    const int self = static_cast<int>(tree.nodes.size());
    tree.nodes.emplace_back();
    tree.nodes[self].feature = static_cast<int>(best_feat);
    tree.nodes[self].threshold = best_thresh;
    const int l = build(left_idx, depth + 1);
    const int r = build(right_idx, depth + 1);
    tree.nodes[self].left = l;
    tree.nodes[self].right = r;
    return self;
  }
};

const TreeNode& walk(const Tree& t, const FeatureVector& x) {
  int cur = 0;
  while (t.nodes[cur].feature >= 0)
    cur = x[t.nodes[cur].feature] <= t.nodes[cur].threshold ? t.nodes[cur].left
                                                            : t.nodes[cur].right;
  return t.nodes[cur];
}

}  // namespace

Forest fit_forest(const std::vector<FeatureVector>& X, const std::vector<double>& y,
                  const ForestConfig& cfg, ForestTask task) {
  if (X.size() != y.size() || X.size() < 2) throw Error("fit_forest: need |X| = |y| >= 2");
  const size_t p = X[0].size();
  for (const auto& row : X)
    if (row.size() != p) throw Error("fit_forest: ragged feature matrix");

  Forest f;
  f.task = task;
  f.n_features = p;
  f.seed = cfg.seed;
  if (task == ForestTask::Classify) {
    double mx = 0;
    for (double v : y) {
      if (v < 0 || v != std::floor(v)) throw Error("fit_forest: class labels must be indices");
      mx = std::max(mx, v);
    }
    f.n_classes = static_cast<size_t>(mx) + 1;
  }

  const size_t fps = cfg.features_per_split
                         ? cfg.features_per_split
                         : static_cast<size_t>(std::ceil(std::sqrt(static_cast<double>(p))));
  for (size_t t = 0; t < cfg.n_trees; ++t) {
    Rng rng(derive_seed(cfg.seed, "forest-tree-" + std::to_string(t)));
    std::vector<size_t> boot(X.size());
    for (auto& i : boot) i = uniform_index(rng, X.size());
    std::sort(boot.begin(), boot.end());
    Builder b{X, y, cfg, task, f.n_classes, fps, std::move(rng), {}};
    b.build(boot, 0);
    f.trees.push_back(std::move(b.tree));
  }
  return f;
}

std::vector<double> forest_predict_proba(const Forest& f, const FeatureVector& x) {
  if (f.task != ForestTask::Classify) throw Error("forest: not a classifier");
  if (x.size() != f.n_features) throw Error("forest: feature dimension mismatch");
  std::vector<double> votes(f.n_classes, 0.0);
  for (const auto& t : f.trees) {
    const TreeNode& leaf = walk(t, x);
    size_t best = 0;
    for (size_t c = 1; c < f.n_classes; ++c)
      if (leaf.class_counts[c] > leaf.class_counts[best]) best = c;
    votes[best] += 1.0;
  }
  for (auto& v : votes) v /= f.trees.size();
  return votes;
}

double forest_predict_value(const Forest& f, const FeatureVector& x) {
  if (f.task != ForestTask::Regress) throw Error("forest: not a regressor");
  if (x.size() != f.n_features) throw Error("forest: feature dimension mismatch");
  double sum = 0;
  for (const auto& t : f.trees) sum += walk(t, x).value;
  const double mean = sum / f.trees.size();
  return std::clamp(mean, 0.0, 1.0);
}

std::string Forest::to_json() const {
  json j;
  j["format"] = "prodkg-forest";
  j["version"] = 1;
  j["task"] = task == ForestTask::Classify ? "classify" : "regress";
  j["n_features"] = n_features;
  j["n_classes"] = n_classes;
  j["seed"] = seed;
  json ts = json::array();
  for (const auto& t : trees) {
    json ns = json::array();
    for (const auto& n : t.nodes)
      ns.push_back(json{{"f", n.feature},
                        {"t", n.threshold},
                        {"l", n.left},
                        {"r", n.right},
                        {"c", n.class_counts},
                        {"v", n.value}});
    ts.push_back(std::move(ns));
  }
  j["trees"] = std::move(ts);
  return j.dump();
}

Forest Forest::from_json(const std::string& text) {
  json j = json::parse(text);
  if (j.value("format", "") != "prodkg-forest" || j.value("version", 0) != 1)
    throw Error("forest: unrecognized serialization");
  Forest f;
  f.task = j.at("task") == "classify" ? ForestTask::Classify : ForestTask::Regress;
  f.n_features = j.at("n_features").get<size_t>();
  f.n_classes = j.at("n_classes").get<size_t>();
  f.seed = j.value("seed", 0ull);
  for (const auto& tj : j.at("trees")) {
    Tree t;
    for (const auto& nj : tj) {
      TreeNode n;
      n.feature = nj.at("f").get<int>();
      n.threshold = nj.at("t").get<double>();
      n.left = nj.at("l").get<int>();
      n.right = nj.at("r").get<int>();
      n.class_counts = nj.at("c").get<std::vector<double>>();
      n.value = nj.at("v").get<double>();
      t.nodes.push_back(std::move(n));
    }
    f.trees.push_back(std::move(t));
  }
  return f;
}

}  // namespace prodkg::ml

#include "prodkg/synth.hpp"

#include <algorithm>
#include <cmath>

#include "prodkg/corpus_io.hpp"
#include "prodkg/text.hpp"

namespace prodkg::synth {

using nlohmann::json;

namespace {

const std::vector<std::string> kHeads = {
    "coffee", "tea",     "cookies", "candy",    "cereal", "sauce",   "chips",  "juice",
    "soap",   "shampoo", "lotion",  "crackers", "granola", "pasta",  "syrup",  "butter"};

const std::vector<std::string> kModifiers = {
    "ground", "instant",   "roasted", "golden", "classic", "herbal",  "spiced",  "dark",
    "creamy", "crunchy",   "frozen",  "organic", "smoked",  "sparkling", "toasted", "wild",
    "mellow", "zesty",     "rustic",  "velvet", "amber",   "crisp",   "silky",   "bold"};

const std::vector<std::string> kValueNouns = {
    "cherry", "hazelnut", "vanilla", "caramel", "mint",  "lemon",  "cocoa",  "berry",
    "almond", "honey",    "apple",   "ginger",  "maple", "peach",  "plum",   "fig",
    "oat",    "walnut",   "basil",   "rose",    "lilac", "cedar",  "citrus", "clove"};

const std::vector<std::string> kValueAdjs = {
    "black",  "double", "sweet", "sour",  "toasted", "frosted", "smoked",
    "ripe",   "raw",    "iced",  "salted", "glazed",  "candied", "dried"};

const std::vector<std::string> kValueTails = {"cheesecake", "swirl", "crunch",
                                              "blend",      "fusion", "delight"};

const std::vector<std::string> kBrandA = {"kav", "bri", "nor", "tal", "zen",
                                          "mar", "vel", "sun", "pol", "gri"};
const std::vector<std::string> kBrandB = {"ora", "ick", "den", "vona", "na",
                                          "lux", "byn", "eto", "ara", "ost"};
const std::vector<std::string> kBrandSuffix = {"farms", "naturals", "co", "foods"};

const std::vector<std::string> kValueAttrNames = {"flavor", "scent", "material",
                                                  "color",  "finish", "style"};

const std::vector<std::string> kSizes = {"12 oz", "6 pack", "16 oz", "2 lb",
                                         "24 ct", "8 oz",  "4 pack", "1 lb"};
const std::vector<std::string> kQueryFillers = {"gifts", "pack", "deal", "best", "fresh"};

std::string slug(const std::string& name) {
  std::string out = "t_";
  for (char c : name) out += (c == ' ' ? '_' : c);
  return out;
}

size_t poisson(Rng& rng, double mean) {
  return std::poisson_distribution<size_t>(mean)(rng);
}

}  // namespace

bool GroundTruth::applicable(const TypeId& t, const AttrId& a) const {
  auto it = applicability.find(t);
  if (it == applicability.end()) return false;
  auto jt = it->second.find(a);
  return jt != it->second.end() && jt->second;
}

int GroundTruth::synonym_class_of(const AttrId& a, const std::string& value_folded) const {
  auto it = synonym_classes.find(a);
  if (it == synonym_classes.end()) return -1;
  for (size_t k = 0; k < it->second.size(); ++k)
    for (const auto& s : it->second[k])
      if (fold_case(s) == value_folded) return static_cast<int>(k);
  return -1;
}

CorpusBundle generate_corpus(const GenConfig& cfg) {
  if (cfg.n_products > 0 && cfg.n_types < 3) throw Error("generate_corpus: n_types too small");
  if (cfg.depth != 2 && cfg.depth != 3) throw Error("generate_corpus: depth must be 2 or 3");
  if (cfg.n_attrs < 3) throw Error("generate_corpus: need at least 3 attributes");
  if (cfg.n_attrs > 2 + kValueAttrNames.size())
    throw Error("generate_corpus: n_attrs exceeds available attribute names");
  if (cfg.values_per_type > cfg.vocab_per_attr)
    throw Error("generate_corpus: values_per_type exceeds vocab_per_attr");

  Rng rng(derive_seed(cfg.seed, "generate-corpus"));
  CorpusBundle out;
  GroundTruth& gt = out.truth;

  // ---- taxonomy ----
  const size_t n_mid = cfg.depth == 3 ? std::max<size_t>(4, cfg.n_types / 6) : 0;
  if (cfg.depth == 3 && n_mid > kHeads.size())
    throw Error("generate_corpus: not enough category heads for n_types");
  const size_t n_leaves = cfg.n_types - 1 - n_mid;
  if (n_leaves < cfg.n_withheld + 1) throw Error("generate_corpus: too many withheld types");
  const size_t heads_in_use = cfg.depth == 3 ? n_mid : std::min(kHeads.size(), n_leaves);
  if (n_leaves > heads_in_use * kModifiers.size())
    throw Error("generate_corpus: not enough name combinations for n_types");

  Taxonomy& full = gt.full_taxonomy;
  full.root = "root";
  full.nodes["root"] = {"root", "products", std::nullopt};
  std::vector<TypeId> mids;
  for (size_t m = 0; m < n_mid; ++m) {
    const TypeId id = slug(kHeads[m]);
    full.nodes[id] = {id, kHeads[m], "root"};
    mids.push_back(id);
  }
  std::vector<TypeId> leaves;
  std::vector<size_t> leaf_mid;  // index into mids (or head index if depth 2)
  for (size_t l = 0; l < n_leaves; ++l) {
    const size_t head_ix = l % heads_in_use;
    const size_t mod_ix = l / heads_in_use;
    const std::string name = kModifiers[mod_ix] + " " + kHeads[head_ix];
    const TypeId id = slug(name);
    const TypeId parent = cfg.depth == 3 ? mids[head_ix] : full.root;
    full.nodes[id] = {id, name, parent};
    leaves.push_back(id);
    leaf_mid.push_back(head_ix);
  }

  // withhold a seeded sample of leaves
  std::vector<size_t> leaf_order(n_leaves);
  for (size_t i = 0; i < n_leaves; ++i) leaf_order[i] = i;
  std::shuffle(leaf_order.begin(), leaf_order.end(), rng);
  std::set<size_t> withheld_ix(leaf_order.begin(), leaf_order.begin() + cfg.n_withheld);
  for (size_t ix : withheld_ix) gt.withheld_types.push_back(leaves[ix]);
  std::sort(gt.withheld_types.begin(), gt.withheld_types.end());

  Taxonomy& emitted = out.catalog.taxonomy;
  emitted.root = full.root;
  for (const auto& [id, node] : full.nodes)
    if (!std::binary_search(gt.withheld_types.begin(), gt.withheld_types.end(), id))
      emitted.nodes[id] = node;

  // ---- attributes ----
  std::vector<AttrId> attrs{"brand"};
  const size_t n_value_attrs = cfg.n_attrs - 2;
  for (size_t v = 0; v < n_value_attrs; ++v) attrs.push_back(kValueAttrNames[v]);
  attrs.push_back("item_code");

  // vocabularies; value attrs share crossover pools pairwise
  std::map<AttrId, std::vector<std::string>> vocab;
  std::map<AttrId, std::vector<int>> crossover_id;  // -1 = attr-own value
  {
    std::set<std::string> taken;  // avoid collisions across attrs and with type names
    for (const auto& [id, node] : full.nodes) taken.insert(node.name);

    auto gen_brand = [&]() {
      std::string b = kBrandA[uniform_index(rng, kBrandA.size())] +
                      kBrandB[uniform_index(rng, kBrandB.size())];
      if (uniform_real(rng, 0, 1) < 0.3)
        b += " " + kBrandSuffix[uniform_index(rng, kBrandSuffix.size())];
      return b;
    };
    auto gen_value = [&]() {
      const double r = uniform_real(rng, 0, 1);
      const std::string noun = kValueNouns[uniform_index(rng, kValueNouns.size())];
      if (r < 0.25) return noun;
      const std::string adj = kValueAdjs[uniform_index(rng, kValueAdjs.size())];
      if (r < 0.85) return adj + " " + noun;
      return adj + " " + noun + " " + kValueTails[uniform_index(rng, kValueTails.size())];
    };
    auto gen_code = [&]() {
      std::string c;
      c += static_cast<char>('a' + uniform_index(rng, 26));
      c += static_cast<char>('a' + uniform_index(rng, 26));
      for (int i = 0; i < 4; ++i) c += static_cast<char>('0' + uniform_index(rng, 10));
      return c;
    };
    auto fill = [&](const AttrId& a, auto&& gen, size_t n) {
      auto& vs = vocab[a];
      auto& xs = crossover_id[a];
      int guard = 0;
      while (vs.size() < n && guard < 10000) {
        std::string v = gen();
        if (!taken.count(v)) {
          taken.insert(v);
          vs.push_back(v);
          xs.push_back(-1);
        }
        ++guard;
      }
      if (vs.size() < n) throw Error("generate_corpus: vocabulary bank exhausted for " + a);
    };

    fill("brand", gen_brand, cfg.vocab_per_attr);
    for (size_t v = 0; v < n_value_attrs; ++v) fill(attrs[1 + v], gen_value, cfg.vocab_per_attr);
    fill("item_code", gen_code, cfg.vocab_per_attr);

    // crossover pool shared between attr pairs (2i, 2i+1): the same phrases
    // play different roles under different mid categories
    int next_cross = 0;
    for (size_t v = 0; v + 1 < n_value_attrs; v += 2) {
      const AttrId a = attrs[1 + v], b = attrs[1 + v + 1];
      const size_t pool = std::max<size_t>(2, static_cast<size_t>(cfg.vocab_per_attr *
                                                                  cfg.crossover_frac));
      for (size_t k = 0; k < pool; ++k) {
        std::string phrase;
        int guard = 0;
        do {
          phrase = gen_value();
        } while (taken.count(phrase) && ++guard < 1000);
        taken.insert(phrase);
        // replace the tails of both vocabularies
        vocab[a][cfg.vocab_per_attr - 1 - k] = phrase;
        crossover_id[a][cfg.vocab_per_attr - 1 - k] = next_cross;
        vocab[b][cfg.vocab_per_attr - 1 - k] = phrase;
        crossover_id[b][cfg.vocab_per_attr - 1 - k] = next_cross;
        ++next_cross;
      }
    }
  }

  // synonym surface classes for value attributes
  std::map<AttrId, std::map<std::string, std::vector<std::string>>> surfaces;  // value -> class
  for (size_t v = 0; v < n_value_attrs; ++v) {
    const AttrId a = attrs[1 + v];
    for (const auto& base : vocab[a]) {
      std::vector<std::string> cls{base};
      if (uniform_real(rng, 0, 1) < cfg.synonym_class_rate) {
        auto seq = text::tokenize(base);
        std::string variant;
        if (seq.size() >= 2 && uniform_real(rng, 0, 1) < 0.5) {
          variant = seq.surface_join(0, seq.size() - 2);  // drop last word
        } else {
          // truncate the last token ("chocolate" -> "choc")
          std::string last = seq.tokens[seq.size() - 1].surface;
          if (last.size() >= 6) {
            variant = seq.size() >= 2 ? seq.surface_join(0, seq.size() - 2) + " " : "";
            variant += last.substr(0, 4);
          }
        }
        if (!variant.empty() && variant != base) cls.push_back(variant);
      }
      surfaces[a][base] = cls;
    }
    // a few "X and Y" values with "&" variants, swapped into attr-own slots
    const size_t n_and = 2;
    for (size_t k = 0; k < n_and && vocab[a].size() >= 2; ++k) {
      const std::string x = kValueNouns[uniform_index(rng, kValueNouns.size())];
      const std::string y = kValueNouns[uniform_index(rng, kValueNouns.size())];
      if (x == y) continue;
      const std::string base = x + " and " + y;
      if (surfaces[a].count(base)) continue;
      size_t slot = uniform_index(rng, vocab[a].size());
      int guard = 0;
      while (crossover_id[a][slot] >= 0 && ++guard < 100)
        slot = uniform_index(rng, vocab[a].size());
      if (crossover_id[a][slot] >= 0) continue;
      vocab[a][slot] = base;
      surfaces[a][base] = {base, x + " & " + y};
    }
    for (const auto& [base, cls] : surfaces[a])
      if (cls.size() > 1) gt.synonym_classes[a].push_back(cls);
  }

  // ---- applicability / importance plants ----
  const size_t n_groups = cfg.depth == 3 ? n_mid : heads_in_use;
  auto group_of_leaf = [&](size_t leaf_ix) { return leaf_mid[leaf_ix]; };
  std::map<size_t, std::map<AttrId, bool>> group_app;
  std::map<size_t, std::map<AttrId, double>> group_imp;
  for (size_t g = 0; g < n_groups; ++g) {
    group_app[g]["brand"] = true;
    group_imp[g]["brand"] = 0.85 + uniform_real(rng, 0.0, 0.1);
    group_app[g]["item_code"] = true;
    group_imp[g]["item_code"] = 0.05;  // seller-required: covered but unimportant
    size_t n_on = 0;
    for (size_t v = 0; v < n_value_attrs; ++v) {
      const bool on = uniform_real(rng, 0, 1) < 0.55;
      group_app[g][attrs[1 + v]] = on;
      group_imp[g][attrs[1 + v]] = on ? 0.2 + uniform_real(rng, 0.0, 0.7) : 0.0;
      n_on += on;
    }
    if (n_on == 0) {  // every category needs at least one value attribute
      group_app[g][attrs[1]] = true;
      group_imp[g][attrs[1]] = 0.2 + uniform_real(rng, 0.0, 0.7);
    }
  }
  // each value attr applies in at least two groups
  for (size_t v = 0; v < n_value_attrs; ++v) {
    size_t on = 0;
    for (size_t g = 0; g < n_groups; ++g) on += group_app[g][attrs[1 + v]];
    for (size_t g = 0; on < 2 && g < n_groups; ++g)
      if (!group_app[g][attrs[1 + v]]) {
        group_app[g][attrs[1 + v]] = true;
        group_imp[g][attrs[1 + v]] = 0.2 + uniform_real(rng, 0.0, 0.7);
        ++on;
      }
  }
  for (size_t l = 0; l < n_leaves; ++l) {
    gt.applicability[leaves[l]] = group_app[group_of_leaf(l)];
    gt.importance[leaves[l]] = group_imp[group_of_leaf(l)];
  }
  for (size_t g = 0; g < n_mid; ++g) {
    gt.applicability[mids[g]] = group_app[g];
    gt.importance[mids[g]] = group_imp[g];
  }

  // per-(leaf, attr) value subsets, honoring crossover roles: crossover
  // phrase k may appear under group g only for the pair side (k+g) % 2
  std::map<TypeId, std::map<AttrId, std::vector<std::string>>> type_values;
  for (size_t l = 0; l < n_leaves; ++l) {
    const size_t g = group_of_leaf(l);
    for (size_t v = 0; v < n_value_attrs; ++v) {
      const AttrId a = attrs[1 + v];
      if (!group_app[g][a]) continue;
      std::vector<std::string> pool;
      for (size_t i = 0; i < vocab[a].size(); ++i) {
        const int cid = crossover_id[a][i];
        if (cid >= 0) {
          const bool even_side = (v % 2 == 0);
          const bool role_even = ((static_cast<size_t>(cid) + g) % 2 == 0);
          if (even_side != role_even) continue;
        }
        pool.push_back(vocab[a][i]);
      }
      std::shuffle(pool.begin(), pool.end(), rng);
      pool.resize(std::min(pool.size(), cfg.values_per_type));
      std::sort(pool.begin(), pool.end());
      type_values[leaves[l]][a] = pool;
    }
    type_values[leaves[l]]["brand"] = vocab["brand"];
    type_values[leaves[l]]["item_code"] = vocab["item_code"];
  }

  // ---- products ----
  std::vector<double> tpl_weights;
  for (const auto& [t, w] : cfg.title_templates) tpl_weights.push_back(w);
  std::discrete_distribution<size_t> tpl_dist(tpl_weights.begin(), tpl_weights.end());
  std::lognormal_distribution<double> pop_dist(1.0, 0.8);

  struct ProductPlan {
    size_t leaf_ix;
    size_t tpl;
    std::map<AttrId, std::string> value;  // chosen surface
    std::string size_phrase;
    std::vector<AttrId> value_order;
  };
  std::vector<ProductPlan> plans(cfg.n_products);

  auto build_title = [&](const ProductPlan& plan) {
    const std::string& tpl = cfg.title_templates[plan.tpl].first;
    std::vector<std::string> values_part;
    for (const auto& a : plan.value_order)
      if (a != "brand") values_part.push_back(plan.value.at(a));
    std::string values_joined = join(values_part, " ");
    std::string title;
    size_t i = 0;
    while (i < tpl.size()) {
      if (tpl[i] == '{') {
        const size_t j = tpl.find('}', i);
        const std::string key = tpl.substr(i + 1, j - i - 1);
        if (key == "brand") title += plan.value.at("brand");
        else if (key == "values") title += values_joined;
        else if (key == "type") title += full.nodes.at(leaves[plan.leaf_ix]).name;
        else if (key == "size") title += plan.size_phrase;
        i = j + 1;
      } else {
        title += tpl[i++];
      }
    }
    return title;
  };

  // reserve enough products per withheld leaf so their names can be mentioned
  std::vector<size_t> withheld_list(withheld_ix.begin(), withheld_ix.end());
  const size_t reserved = withheld_list.empty() ? 0
                                                : withheld_list.size() * cfg.min_withheld_mentions;
  if (cfg.n_products > 0 && reserved > cfg.n_products)
    throw Error("generate_corpus: too few products for min_withheld_mentions");

  for (size_t i = 0; i < cfg.n_products; ++i) {
    ProductPlan& plan = plans[i];
    plan.leaf_ix = (i < reserved) ? withheld_list[i % withheld_list.size()]
                                  : uniform_index(rng, n_leaves);
    plan.tpl = tpl_dist(rng);
    plan.size_phrase = kSizes[uniform_index(rng, kSizes.size())];
    const TypeId leaf = leaves[plan.leaf_ix];

    plan.value["brand"] = vocab["brand"][uniform_index(rng, vocab["brand"].size())];
    plan.value["item_code"] = vocab["item_code"][uniform_index(rng, vocab["item_code"].size())];
    for (size_t v = 0; v < n_value_attrs; ++v) {
      const AttrId a = attrs[1 + v];
      auto it = type_values[leaf].find(a);
      if (it == type_values[leaf].end() || it->second.empty()) continue;
      const std::string base = it->second[uniform_index(rng, it->second.size())];
      const auto& cls = surfaces[a].at(base);
      plan.value[a] = cls[uniform_index(rng, cls.size())];
    }
    for (const auto& [a, v] : plan.value)
      if (a != "brand") plan.value_order.push_back(a);
    std::sort(plan.value_order.begin(), plan.value_order.end());
    // item_code reads naturally at the end
    auto ic = std::find(plan.value_order.begin(), plan.value_order.end(), "item_code");
    plan.value_order.erase(ic);
    plan.value_order.push_back("item_code");
    if (plan.value_order.size() > 2 && uniform_real(rng, 0, 1) < cfg.reorder_rate) {
      const size_t k = uniform_index(rng, plan.value_order.size() - 2);
      std::swap(plan.value_order[k], plan.value_order[k + 1]);
    }
  }

  // guarantee each withheld name shows up in enough titles
  std::map<size_t, size_t> mention_count;
  for (const auto& plan : plans)
    if (cfg.title_templates[plan.tpl].first.find("{type}") != std::string::npos)
      mention_count[plan.leaf_ix]++;
  for (size_t ix : withheld_ix) {
    size_t need = cfg.min_withheld_mentions > mention_count[ix]
                      ? cfg.min_withheld_mentions - mention_count[ix]
                      : 0;
    for (size_t i = 0; i < plans.size() && need > 0; ++i) {
      if (plans[i].leaf_ix != ix) continue;
      if (cfg.title_templates[plans[i].tpl].first.find("{type}") == std::string::npos) {
        plans[i].tpl = 0;
        --need;
      }
    }
    if (need > 0 && cfg.n_products > 0)
      throw Error("generate_corpus: cannot satisfy min_withheld_mentions; too few products");
  }

  for (size_t i = 0; i < cfg.n_products; ++i) {
    const ProductPlan& plan = plans[i];
    const TypeId true_leaf = leaves[plan.leaf_ix];
    const bool withheld = withheld_ix.count(plan.leaf_ix) > 0;

    Product p;
    p.id = "p" + std::to_string(i);
    // withheld-type products fall back to their parent in the catalog
    p.types.insert(withheld ? *full.nodes.at(true_leaf).parent : true_leaf);
    p.title = build_title(plan);
    p.popularity = std::round(pop_dist(rng) * 100.0) / 100.0;
    for (const auto& [a, v] : plan.value) p.values[a] = {v};

    if (uniform_real(rng, 0, 1) < 0.7) {
      const AttrId first = plan.value_order.front();
      p.description = "quality " + plan.value.at(first) + " by " + plan.value.at("brand");
    }
    const size_t n_bullets = uniform_index(rng, 3);
    for (size_t b = 0; b < n_bullets && !plan.value_order.empty(); ++b) {
      const AttrId a = plan.value_order[uniform_index(rng, plan.value_order.size())];
      p.bullets.push_back("real " + plan.value.at(a) + " inside");
    }

    gt.true_type[p.id] = true_leaf;
    for (const auto& [a, v] : plan.value) gt.values[p.id][a] = v;
    out.catalog.products.push_back(std::move(p));
  }
  out.catalog.rebuild_index();

  // ---- behavior logs ----
  // reviews mention a product's own values at a rate driven by importance
  for (size_t i = 0; i < cfg.n_products; ++i) {
    const ProductPlan& plan = plans[i];
    const size_t g = group_of_leaf(plan.leaf_ix);
    const size_t n_rev = poisson(rng, cfg.review_rate);
    for (size_t r = 0; r < n_rev; ++r) {
      std::string text = "good product";
      for (const auto& [a, v] : plan.value)  // includes brand
        if (uniform_real(rng, 0, 1) < group_imp[g][a] * 0.6)
          text += ", the " + v + " is great";
      if (uniform_real(rng, 0, 1) < 0.1 && !plan.value_order.empty()) {
        const AttrId a = plan.value_order[uniform_index(rng, plan.value_order.size())];
        const auto& tv = type_values[leaves[plan.leaf_ix]][a];
        if (!tv.empty()) text += ", wish they had " + tv[uniform_index(rng, tv.size())];
      }
      out.logs.reviews[out.catalog.products[i].id].push_back(text);
    }
  }

  // queries mention the true type name and sometimes a value
  std::map<size_t, std::vector<size_t>> leaf_products, group_products;
  for (size_t i = 0; i < cfg.n_products; ++i) {
    leaf_products[plans[i].leaf_ix].push_back(i);
    group_products[group_of_leaf(plans[i].leaf_ix)].push_back(i);
  }
  const size_t n_queries = static_cast<size_t>(cfg.n_products * cfg.query_rate);
  for (size_t q = 0; q < n_queries; ++q) {
    QueryRecord rec;
    rec.id = "q" + std::to_string(q);
    const double r = uniform_real(rng, 0, 1);
    if (r < 0.85) {
      const size_t pi = uniform_index(rng, cfg.n_products);
      const ProductPlan& plan = plans[pi];
      const std::string type_name = full.nodes.at(leaves[plan.leaf_ix]).name;
      const size_t g = group_of_leaf(plan.leaf_ix);
      std::string vmention;
      {
        std::vector<AttrId> pool_attrs;
        for (const auto& [a, v] : plan.value) pool_attrs.push_back(a);
        const AttrId a = pool_attrs[uniform_index(rng, pool_attrs.size())];
        if (uniform_real(rng, 0, 1) < group_imp[g][a] * 0.6) vmention = plan.value.at(a);
      }
      rec.text = (r < 0.55) ? type_name + (vmention.empty() ? "" : " " + vmention)
                            : (vmention.empty() ? type_name : vmention + " " + type_name);
      const auto& pool = leaf_products[plan.leaf_ix];
      const size_t n_buy = 1 + uniform_index(rng, std::min<size_t>(3, pool.size()));
      for (size_t b = 0; b < n_buy; ++b)
        rec.purchased.push_back("p" + std::to_string(pool[uniform_index(rng, pool.size())]));
    } else if (n_groups > 0) {
      const size_t g = uniform_index(rng, n_groups);
      rec.text = kHeads[g] + " " + kQueryFillers[uniform_index(rng, kQueryFillers.size())];
      const auto& pool = group_products[g];
      if (!pool.empty()) {
        const size_t n_buy = 1 + uniform_index(rng, std::min<size_t>(3, pool.size()));
        for (size_t b = 0; b < n_buy; ++b)
          rec.purchased.push_back("p" + std::to_string(pool[uniform_index(rng, pool.size())]));
      }
    }
    std::sort(rec.purchased.begin(), rec.purchased.end());
    rec.purchased.erase(std::unique(rec.purchased.begin(), rec.purchased.end()),
                        rec.purchased.end());
    if (!rec.text.empty() && !rec.purchased.empty()) out.logs.queries.push_back(std::move(rec));
  }

  // co-views: mostly within the same true leaf, some within the category
  std::map<std::pair<std::string, std::string>, uint64_t> coviews;
  for (size_t i = 0; i < cfg.n_products; ++i) {
    const size_t n_cv = poisson(rng, cfg.coview_rate / 2.0);
    for (size_t c = 0; c < n_cv; ++c) {
      const bool same_leaf = uniform_real(rng, 0, 1) < 0.85;
      const auto& pool = same_leaf ? leaf_products[plans[i].leaf_ix]
                                   : group_products[group_of_leaf(plans[i].leaf_ix)];
      if (pool.size() < 2) continue;
      size_t j = pool[uniform_index(rng, pool.size())];
      if (j == i) continue;
      std::string a = "p" + std::to_string(i), b = "p" + std::to_string(j);
      if (b < a) std::swap(a, b);
      coviews[{a, b}] += 1 + poisson(rng, 1.5);
    }
  }
  for (const auto& [pair, count] : coviews)
    out.logs.coviews.push_back({pair.first, pair.second, count});

  return out;
}

std::pair<Catalog, ErrorLedger> inject_noise(const Catalog& c, const NoiseSpec& spec,
                                             uint64_t seed) {
  for (double f : {spec.drop, spec.replace_same, spec.replace_other, spec.inject})
    if (f < 0 || f > 1) throw Error("inject_noise: fractions must be in [0,1]");
  if (spec.drop + spec.replace_same + spec.replace_other + spec.inject > 1.0 + 1e-12)
    throw Error("inject_noise: fractions must sum to at most 1");

  Catalog out = c;
  ErrorLedger ledger;
  Rng rng(derive_seed(seed, "inject-noise"));

  // eligible present cells, in stable order
  std::vector<std::pair<size_t, AttrId>> present;
  std::set<AttrId> attr_universe;
  for (size_t i = 0; i < out.products.size(); ++i)
    for (const auto& [a, vs] : out.products[i].values) {
      if (!vs.empty()) present.emplace_back(i, a);
      attr_universe.insert(a);
    }
  // per-attribute vocabulary of observed values
  std::map<AttrId, std::vector<std::string>> vocab;
  for (const auto& p : c.products)
    for (const auto& [a, vs] : p.values)
      for (const auto& v : vs) vocab[a].push_back(v);
  for (auto& [a, vs] : vocab) {
    std::sort(vs.begin(), vs.end());
    vs.erase(std::unique(vs.begin(), vs.end()), vs.end());
  }

  std::shuffle(present.begin(), present.end(), rng);
  const size_t n_drop = static_cast<size_t>(std::floor(spec.drop * present.size()));
  const size_t n_rs = static_cast<size_t>(std::floor(spec.replace_same * present.size()));
  const size_t n_ro = static_cast<size_t>(std::floor(spec.replace_other * present.size()));
  size_t cursor = 0;

  for (size_t k = 0; k < n_drop; ++k) {
    auto [pi, a] = present[cursor++];
    Product& p = out.products[pi];
    ledger.push_back({p.id, a, "drop", p.values[a][0], ""});
    p.values.erase(a);
  }
  for (size_t k = 0; k < n_rs; ++k) {
    auto [pi, a] = present[cursor++];
    Product& p = out.products[pi];
    const std::string orig = p.values[a][0];
    const auto& vs = vocab[a];
    std::string repl = orig;
    for (int tries = 0; tries < 50 && repl == orig; ++tries)
      repl = vs[uniform_index(rng, vs.size())];
    if (repl == orig) continue;  // degenerate single-value vocabulary
    p.values[a] = {repl};
    ledger.push_back({p.id, a, "replace-same", orig, repl});
  }
  for (size_t k = 0; k < n_ro; ++k) {
    auto [pi, a] = present[cursor++];
    Product& p = out.products[pi];
    const std::string orig = p.values[a][0];
    // prefer a value of another attribute of the same product (it appears in
    // the profile, which makes these the hard cleaning cases)
    std::vector<std::pair<AttrId, std::string>> others;
    for (const auto& [oa, ovs] : c.products[pi].values)
      if (oa != a && !ovs.empty()) others.emplace_back(oa, ovs[0]);
    std::string repl;
    if (!others.empty()) {
      repl = others[uniform_index(rng, others.size())].second;
    } else {
      std::vector<AttrId> other_attrs;
      for (const auto& oa : attr_universe)
        if (oa != a && !vocab[oa].empty()) other_attrs.push_back(oa);
      if (other_attrs.empty()) continue;
      const auto& vs = vocab[other_attrs[uniform_index(rng, other_attrs.size())]];
      repl = vs[uniform_index(rng, vs.size())];
    }
    if (repl == orig) continue;
    p.values[a] = {repl};
    ledger.push_back({p.id, a, "replace-other", orig, repl});
  }

  // injection targets cells that are empty in the input catalog
  std::vector<std::pair<size_t, AttrId>> empty_cells;
  for (size_t i = 0; i < c.products.size(); ++i)
    for (const auto& a : attr_universe)
      if (!c.products[i].values.count(a)) empty_cells.emplace_back(i, a);
  std::shuffle(empty_cells.begin(), empty_cells.end(), rng);
  const size_t n_inject = static_cast<size_t>(std::floor(spec.inject * empty_cells.size()));
  for (size_t k = 0; k < n_inject; ++k) {
    auto [pi, a] = empty_cells[k];
    const auto& vs = vocab[a];
    if (vs.empty()) continue;
    const std::string v = vs[uniform_index(rng, vs.size())];
    out.products[pi].values[a] = {v};
    ledger.push_back({out.products[pi].id, a, "inject", "", v});
  }

  return {std::move(out), std::move(ledger)};
}

void save_ground_truth(const GroundTruth& gt, const std::filesystem::path& file) {
  std::vector<json> rows;
  for (const auto& [id, node] : gt.full_taxonomy.nodes) {
    const bool withheld = std::binary_search(gt.withheld_types.begin(), gt.withheld_types.end(), id);
    json j{{"kind", "type"}, {"id", id}, {"name", node.name}, {"withheld", withheld}};
    j["parent"] = node.parent ? json(*node.parent) : json(nullptr);
    rows.push_back(std::move(j));
  }
  for (const auto& [pid, t] : gt.true_type)
    rows.push_back(json{{"kind", "product_type"}, {"product", pid}, {"type", t}});
  for (const auto& [pid, vals] : gt.values)
    for (const auto& [a, v] : vals)
      rows.push_back(json{{"kind", "value"}, {"product", pid}, {"attr", a}, {"value", v}});
  for (const auto& [t, attrs] : gt.applicability)
    for (const auto& [a, app] : attrs)
      rows.push_back(json{{"kind", "applicability"},
                          {"type", t},
                          {"attr", a},
                          {"applicable", app},
                          {"importance", gt.importance.at(t).at(a)}});
  for (const auto& [a, classes] : gt.synonym_classes)
    for (const auto& cls : classes)
      rows.push_back(json{{"kind", "synonym_class"}, {"attr", a}, {"surfaces", cls}});
  write_jsonl(file, rows);
}

GroundTruth load_ground_truth(const std::filesystem::path& file) {
  GroundTruth gt;
  for_each_jsonl(file, [&](const json& j, size_t) {
    const std::string kind = j.at("kind").get<std::string>();
    if (kind == "type") {
      TaxonomyNode n;
      n.id = j.at("id").get<std::string>();
      n.name = j.at("name").get<std::string>();
      if (!j.at("parent").is_null()) n.parent = j.at("parent").get<std::string>();
      if (!n.parent) gt.full_taxonomy.root = n.id;
      if (j.value("withheld", false)) gt.withheld_types.push_back(n.id);
      gt.full_taxonomy.nodes[n.id] = std::move(n);
    } else if (kind == "product_type") {
      gt.true_type[j.at("product").get<std::string>()] = j.at("type").get<std::string>();
    } else if (kind == "value") {
      gt.values[j.at("product").get<std::string>()][j.at("attr").get<std::string>()] =
          j.at("value").get<std::string>();
    } else if (kind == "applicability") {
      const auto t = j.at("type").get<std::string>();
      const auto a = j.at("attr").get<std::string>();
      gt.applicability[t][a] = j.at("applicable").get<bool>();
      gt.importance[t][a] = j.at("importance").get<double>();
    } else if (kind == "synonym_class") {
      gt.synonym_classes[j.at("attr").get<std::string>()].push_back(
          j.at("surfaces").get<std::vector<std::string>>());
    }
  });
  std::sort(gt.withheld_types.begin(), gt.withheld_types.end());
  return gt;
}

void save_ledger(const ErrorLedger& ledger, const std::filesystem::path& file) {
  std::vector<json> rows;
  for (const auto& e : ledger)
    rows.push_back(json{{"product", e.product},
                        {"attr", e.attr},
                        {"kind", e.kind},
                        {"original", e.original},
                        {"corrupted", e.corrupted}});
  write_jsonl(file, rows);
}

ErrorLedger load_ledger(const std::filesystem::path& file) {
  ErrorLedger out;
  for_each_jsonl(file, [&](const json& j, size_t) {
    out.push_back({j.at("product").get<std::string>(), j.at("attr").get<std::string>(),
                   j.at("kind").get<std::string>(), j.at("original").get<std::string>(),
                   j.at("corrupted").get<std::string>()});
  });
  return out;
}

}  // namespace prodkg::synth

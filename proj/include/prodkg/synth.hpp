#ifndef PRODKG_SYNTH_HPP
#define PRODKG_SYNTH_HPP

#include <filesystem>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "prodkg/corpus.hpp"

namespace prodkg::synth {

struct GenConfig {
  size_t n_types = 49;       // total nodes incl. root, mids and withheld leaves
  size_t depth = 3;          // 2 = root+leaves, 3 = root+mid+leaves
  size_t n_withheld = 10;    // leaves kept out of the emitted taxonomy
  size_t n_products = 2000;
  size_t n_attrs = 6;        // brand + item_code + value attributes
  size_t vocab_per_attr = 30;
  size_t values_per_type = 10;  // per-(leaf, attr) vocabulary subset
  double query_rate = 0.6;      // queries per product
  double review_rate = 2.0;     // mean reviews per product
  double coview_rate = 3.0;     // mean co-view partners per product
  // weighted title templates; {brand} {values} {type} {size} placeholders
  std::vector<std::pair<std::string, double>> title_templates = {
      {"{brand} {values} {type} {size}", 0.55},
      {"{brand} {values} {size}", 0.30},  // type mention dropped
      {"{brand} {type} {values} {size}", 0.15},
  };
  double reorder_rate = 0.25;        // adjacent value-phrase swap probability
  double synonym_class_rate = 0.35;  // fraction of values that get a variant
  double crossover_frac = 0.2;       // shared-pool fraction between paired attrs
  size_t min_withheld_mentions = 5;  // each withheld name appears in >= k titles
  uint64_t seed = 7;
};

struct GroundTruth {
  Taxonomy full_taxonomy;  // includes withheld types
  std::vector<TypeId> withheld_types;
  std::map<ProductId, TypeId> true_type;  // true (possibly withheld) leaf
  std::map<ProductId, std::map<AttrId, std::string>> values;
  // (type, attr) -> planted applicability / importance; covers mids and leaves
  std::map<TypeId, std::map<AttrId, bool>> applicability;
  std::map<TypeId, std::map<AttrId, double>> importance;
  std::map<AttrId, std::vector<std::vector<std::string>>> synonym_classes;

  bool applicable(const TypeId& t, const AttrId& a) const;
  // index of the class containing `value`, or -1
  int synonym_class_of(const AttrId& a, const std::string& value_folded) const;
};

struct NoiseSpec {
  double drop = 0.0;
  double replace_same = 0.0;   // wrong value of the same attribute
  double replace_other = 0.0;  // value of another attribute of the same product
  double inject = 0.0;         // value injected where the attribute does not apply
};

struct LedgerEntry {
  ProductId product;
  AttrId attr;
  std::string kind;  // "drop" | "replace-same" | "replace-other" | "inject"
  std::string original;
  std::string corrupted;
};
using ErrorLedger = std::vector<LedgerEntry>;

struct CorpusBundle {
  Catalog catalog;  // clean
  BehaviorLogs logs;
  GroundTruth truth;
};

// Deterministic: byte-identical output for identical config.
CorpusBundle generate_corpus(const GenConfig& cfg);

// Perturbs a copy; ledger covers exactly the perturbed cells, with
// floor(fraction x eligible) cells per kind.
std::pair<Catalog, ErrorLedger> inject_noise(const Catalog& c, const NoiseSpec& spec,
                                             uint64_t seed);

void save_ground_truth(const GroundTruth& gt, const std::filesystem::path& file);
GroundTruth load_ground_truth(const std::filesystem::path& file);
void save_ledger(const ErrorLedger& ledger, const std::filesystem::path& file);
ErrorLedger load_ledger(const std::filesystem::path& file);

}  // namespace prodkg::synth

#endif

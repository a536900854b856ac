#ifndef PRODKG_CORPUS_HPP
#define PRODKG_CORPUS_HPP

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "prodkg/common.hpp"

namespace prodkg {

using TypeId = std::string;
using AttrId = std::string;
using ProductId = std::string;
using QueryId = std::string;

struct TaxonomyNode {
  TypeId id;
  std::string name;
  std::optional<TypeId> parent;  // empty only for the root
};

// Tree-structured type taxonomy. Nodes are keyed by id; every non-root node
// carries exactly one parent, so the edge set is implied by the parent links.
struct Taxonomy {
  std::map<TypeId, TaxonomyNode> nodes;
  TypeId root;

  bool contains(const TypeId& id) const { return nodes.count(id) > 0; }
  const TaxonomyNode& node(const TypeId& id) const;

  // Path from x's parent up to the root, in order. Empty for the root.
  std::vector<TypeId> ancestors(const TypeId& x) const;
  size_t depth(const TypeId& x) const { return ancestors(x).size(); }

  std::vector<TypeId> children(const TypeId& x) const;
  std::vector<TypeId> leaves() const;
  // (parent, child) pairs sorted by (parent, child).
  std::vector<std::pair<TypeId, TypeId>> edges() const;
};

struct Product {
  ProductId id;
  std::set<TypeId> types;
  std::string title;
  std::string description;  // empty means absent
  std::vector<std::string> bullets;
  std::map<AttrId, std::vector<std::string>> values;
  double popularity = 1.0;
};

struct QueryRecord {
  QueryId id;
  std::string text;
  std::vector<ProductId> purchased;
};

struct CoviewRecord {
  ProductId a, b;  // stored with a < b
  uint64_t count = 1;
};

struct BehaviorLogs {
  std::vector<QueryRecord> queries;
  std::vector<CoviewRecord> coviews;
  std::map<ProductId, std::vector<std::string>> reviews;
  std::map<ProductId, std::vector<std::string>> qa;
};

struct Catalog {
  Taxonomy taxonomy;
  std::vector<Product> products;  // input order preserved
  std::map<ProductId, size_t> product_index;

  const Product* find(const ProductId& id) const;
  std::set<AttrId> attributes() const;
  void rebuild_index();
};

enum class Predicate { HasType, HasAttr, IsSubtypeOf, IsSynonymOf };
enum class Provenance { Catalog, Imputed, TaxonomyEnrichment, Synonym };

struct Triple {
  std::string subject;
  Predicate predicate = Predicate::HasAttr;
  AttrId attr;  // meaningful only for HasAttr
  std::string object;
  double confidence = 1.0;
  Provenance provenance = Provenance::Catalog;
};

std::string predicate_name(Predicate p);
std::string provenance_name(Provenance p);

struct Violation {
  std::string kind;     // "cycle", "root", "title", "dangling-type", ...
  std::string subject;  // offending id
  std::string message;
};
using ValidationReport = std::vector<Violation>;

// Pure: reports invariant violations without mutating anything.
ValidationReport validate_catalog(const Catalog& c);

}  // namespace prodkg

#endif

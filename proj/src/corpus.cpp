#include "prodkg/corpus.hpp"

#include <algorithm>

namespace prodkg {

const TaxonomyNode& Taxonomy::node(const TypeId& id) const {
  auto it = nodes.find(id);
  if (it == nodes.end()) throw Error("taxonomy: unknown type id '" + id + "'");
  return it->second;
}

std::vector<TypeId> Taxonomy::ancestors(const TypeId& x) const {
  std::vector<TypeId> path;
  const TaxonomyNode* cur = &node(x);
  while (cur->parent) {
    if (path.size() > nodes.size()) throw Error("taxonomy: cycle while walking ancestors of '" + x + "'");
    path.push_back(*cur->parent);
    cur = &node(*cur->parent);
  }
  return path;
}

std::vector<TypeId> Taxonomy::children(const TypeId& x) const {
  std::vector<TypeId> out;
  for (const auto& [id, n] : nodes)
    if (n.parent && *n.parent == x) out.push_back(id);
  return out;  // map order = sorted
}

std::vector<TypeId> Taxonomy::leaves() const {
  std::set<TypeId> has_child;
  for (const auto& [id, n] : nodes)
    if (n.parent) has_child.insert(*n.parent);
  std::vector<TypeId> out;
  for (const auto& [id, n] : nodes)
    if (!has_child.count(id)) out.push_back(id);
  return out;
}

std::vector<std::pair<TypeId, TypeId>> Taxonomy::edges() const {
  std::vector<std::pair<TypeId, TypeId>> out;
  for (const auto& [id, n] : nodes)
    if (n.parent) out.emplace_back(*n.parent, id);
  std::sort(out.begin(), out.end());
  return out;
}

const Product* Catalog::find(const ProductId& id) const {
  auto it = product_index.find(id);
  return it == product_index.end() ? nullptr : &products[it->second];
}

std::set<AttrId> Catalog::attributes() const {
  std::set<AttrId> out;
  for (const auto& p : products)
    for (const auto& [a, vs] : p.values) out.insert(a);
  return out;
}

void Catalog::rebuild_index() {
  product_index.clear();
  for (size_t i = 0; i < products.size(); ++i) product_index[products[i].id] = i;
}

std::string predicate_name(Predicate p) {
  switch (p) {
    case Predicate::HasType: return "hasType";
    case Predicate::HasAttr: return "hasAttr";
    case Predicate::IsSubtypeOf: return "isSubtypeOf";
    case Predicate::IsSynonymOf: return "isSynonymOf";
  }
  return "?";
}

std::string provenance_name(Provenance p) {
  switch (p) {
    case Provenance::Catalog: return "catalog";
    case Provenance::Imputed: return "imputed";
    case Provenance::TaxonomyEnrichment: return "taxonomy-enrichment";
    case Provenance::Synonym: return "synonym";
  }
  return "?";
}

ValidationReport validate_catalog(const Catalog& c) {
  ValidationReport report;
  const Taxonomy& t = c.taxonomy;

  size_t n_roots = 0;
  for (const auto& [id, n] : t.nodes) {
    if (!n.parent) {
      ++n_roots;
      if (id != t.root)
        report.push_back({"root", id, "parentless node '" + id + "' is not the declared root"});
    } else if (!t.contains(*n.parent)) {
      report.push_back({"dangling-type", id, "node '" + id + "' references missing parent '" + *n.parent + "'"});
    }
    if (n.name.empty()) report.push_back({"name", id, "type '" + id + "' has empty display name"});
  }
  if (!t.nodes.empty() && n_roots != 1)
    report.push_back({"root", t.root, "taxonomy must have exactly one parentless node"});
  if (!t.nodes.empty() && !t.contains(t.root))
    report.push_back({"root", t.root, "declared root '" + t.root + "' does not exist"});

  // Cycle check: walk parent links with a step budget.
  for (const auto& [id, n] : t.nodes) {
    const TaxonomyNode* cur = &n;
    size_t steps = 0;
    while (cur->parent && t.contains(*cur->parent)) {
      if (++steps > t.nodes.size()) {
        report.push_back({"cycle", id, "cycle in taxonomy edges reachable from '" + id + "'"});
        break;
      }
      cur = &t.nodes.at(*cur->parent);
    }
  }

  for (const auto& p : c.products) {
    if (p.id.empty()) report.push_back({"id", p.id, "product with empty id"});
    if (p.title.empty()) report.push_back({"title", p.id, "product '" + p.id + "' has empty title"});
    if (p.popularity < 0)
      report.push_back({"popularity", p.id, "product '" + p.id + "' has negative popularity"});
    for (const auto& ty : p.types)
      if (!t.contains(ty))
        report.push_back({"dangling-type", p.id, "product '" + p.id + "' references missing type '" + ty + "'"});
  }
  return report;
}

}  // namespace prodkg

#include "prodkg/corpus_io.hpp"

#include <fstream>

namespace prodkg {

using nlohmann::json;

void for_each_jsonl(const std::filesystem::path& file,
                    const std::function<void(const json&, size_t)>& fn) {
  std::ifstream in(file);
  if (!in) throw Error("cannot open " + file.string());
  std::string line;
  size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    json j;
    try {
      j = json::parse(line);
    } catch (const json::exception& e) {
      throw Error(file.string() + ":" + std::to_string(lineno) + ": parse error: " + e.what());
    }
    fn(j, lineno);
  }
}

void write_jsonl(const std::filesystem::path& file, const std::vector<json>& rows) {
  std::ofstream out(file, std::ios::binary);
  if (!out) throw Error("cannot write " + file.string());
  for (const auto& r : rows) out << r.dump() << "\n";
}

Catalog load_catalog(const std::filesystem::path& dir) {
  Catalog c;
  for_each_jsonl(dir / "taxonomy.jsonl", [&](const json& j, size_t line) {
    TaxonomyNode n;
    n.id = j.at("id").get<std::string>();
    n.name = j.value("name", n.id);
    if (j.contains("parent") && !j["parent"].is_null())
      n.parent = j["parent"].get<std::string>();
    if (c.taxonomy.nodes.count(n.id))
      throw Error(dir.string() + "/taxonomy.jsonl:" + std::to_string(line) +
                  ": duplicate type id '" + n.id + "'");
    if (!n.parent) c.taxonomy.root = n.id;
    c.taxonomy.nodes[n.id] = std::move(n);
  });
  for (const auto& [id, n] : c.taxonomy.nodes)
    if (n.parent && !c.taxonomy.contains(*n.parent))
      throw Error("taxonomy: node '" + id + "' references missing parent '" + *n.parent + "'");

  for_each_jsonl(dir / "products.jsonl", [&](const json& j, size_t line) {
    Product p;
    p.id = j.at("id").get<std::string>();
    p.title = j.at("title").get<std::string>();
    if (j.contains("types"))
      for (const auto& t : j["types"]) p.types.insert(t.get<std::string>());
    if (j.contains("description") && !j["description"].is_null())
      p.description = j["description"].get<std::string>();
    if (j.contains("bullets"))
      for (const auto& b : j["bullets"]) p.bullets.push_back(b.get<std::string>());
    if (j.contains("values"))
      for (const auto& [attr, vs] : j["values"].items())
        for (const auto& v : vs) p.values[attr].push_back(v.get<std::string>());
    p.popularity = j.value("popularity", 1.0);
    for (const auto& t : p.types)
      if (!c.taxonomy.contains(t))
        throw Error(dir.string() + "/products.jsonl:" + std::to_string(line) +
                    ": product '" + p.id + "' references missing type '" + t + "'");
    if (c.product_index.count(p.id))
      throw Error(dir.string() + "/products.jsonl:" + std::to_string(line) +
                  ": duplicate product id '" + p.id + "'");
    c.product_index[p.id] = c.products.size();
    c.products.push_back(std::move(p));
  });
  return c;
}

void save_catalog(const Catalog& c, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  std::vector<json> rows;
  for (const auto& [id, n] : c.taxonomy.nodes) {
    json j{{"id", n.id}, {"name", n.name}};
    j["parent"] = n.parent ? json(*n.parent) : json(nullptr);
    rows.push_back(std::move(j));
  }
  write_jsonl(dir / "taxonomy.jsonl", rows);

  rows.clear();
  for (const auto& p : c.products) {
    json j{{"id", p.id}, {"title", p.title}};
    j["types"] = p.types;
    if (!p.description.empty()) j["description"] = p.description;
    j["bullets"] = p.bullets;
    json vals = json::object();
    for (const auto& [a, vs] : p.values) vals[a] = vs;
    j["values"] = vals;
    j["popularity"] = p.popularity;
    rows.push_back(std::move(j));
  }
  write_jsonl(dir / "products.jsonl", rows);
}

BehaviorLogs load_logs(const std::filesystem::path& dir) {
  BehaviorLogs logs;
  for_each_jsonl(dir / "logs_queries.jsonl", [&](const json& j, size_t) {
    QueryRecord q;
    q.id = j.at("id").get<std::string>();
    q.text = j.at("text").get<std::string>();
    if (j.contains("purchased"))
      for (const auto& p : j["purchased"]) q.purchased.push_back(p.get<std::string>());
    logs.queries.push_back(std::move(q));
  });
  for_each_jsonl(dir / "logs_coviews.jsonl", [&](const json& j, size_t line) {
    CoviewRecord r;
    r.a = j.at("a").get<std::string>();
    r.b = j.at("b").get<std::string>();
    r.count = j.value("count", 1ull);
    if (r.b < r.a) std::swap(r.a, r.b);  // unordered pair, id-lexicographic storage
    if (r.count < 1)
      throw Error(dir.string() + "/logs_coviews.jsonl:" + std::to_string(line) + ": count must be >= 1");
    logs.coviews.push_back(std::move(r));
  });
  for_each_jsonl(dir / "logs_reviews.jsonl", [&](const json& j, size_t) {
    auto pid = j.at("product").get<std::string>();
    for (const auto& t : j.at("texts")) logs.reviews[pid].push_back(t.get<std::string>());
  });
  auto qa_path = dir / "logs_qa.jsonl";
  if (std::filesystem::exists(qa_path))
    for_each_jsonl(qa_path, [&](const json& j, size_t) {
      auto pid = j.at("product").get<std::string>();
      for (const auto& t : j.at("texts")) logs.qa[pid].push_back(t.get<std::string>());
    });
  return logs;
}

void save_logs(const BehaviorLogs& logs, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  std::vector<json> rows;
  for (const auto& q : logs.queries)
    rows.push_back(json{{"id", q.id}, {"text", q.text}, {"purchased", q.purchased}});
  write_jsonl(dir / "logs_queries.jsonl", rows);

  rows.clear();
  for (const auto& cv : logs.coviews)
    rows.push_back(json{{"a", cv.a}, {"b", cv.b}, {"count", cv.count}});
  write_jsonl(dir / "logs_coviews.jsonl", rows);

  rows.clear();
  for (const auto& [pid, texts] : logs.reviews)
    rows.push_back(json{{"product", pid}, {"texts", texts}});
  write_jsonl(dir / "logs_reviews.jsonl", rows);

  if (!logs.qa.empty()) {
    rows.clear();
    for (const auto& [pid, texts] : logs.qa)
      rows.push_back(json{{"product", pid}, {"texts", texts}});
    write_jsonl(dir / "logs_qa.jsonl", rows);
  }
}

json triple_to_json(const Triple& t) {
  json j{{"subject", t.subject},
         {"predicate", predicate_name(t.predicate)},
         {"object", t.object},
         {"confidence", t.confidence},
         {"provenance", provenance_name(t.provenance)}};
  if (t.predicate == Predicate::HasAttr) j["attr"] = t.attr;
  return j;
}

Triple triple_from_json(const json& j) {
  Triple t;
  t.subject = j.at("subject").get<std::string>();
  auto pred = j.at("predicate").get<std::string>();
  if (pred == "hasType") t.predicate = Predicate::HasType;
  else if (pred == "hasAttr") t.predicate = Predicate::HasAttr;
  else if (pred == "isSubtypeOf") t.predicate = Predicate::IsSubtypeOf;
  else if (pred == "isSynonymOf") t.predicate = Predicate::IsSynonymOf;
  else throw Error("unknown predicate '" + pred + "'");
  t.attr = j.value("attr", "");
  t.object = j.at("object").get<std::string>();
  t.confidence = j.value("confidence", 1.0);
  auto prov = j.value("provenance", "catalog");
  if (prov == "catalog") t.provenance = Provenance::Catalog;
  else if (prov == "imputed") t.provenance = Provenance::Imputed;
  else if (prov == "taxonomy-enrichment") t.provenance = Provenance::TaxonomyEnrichment;
  else if (prov == "synonym") t.provenance = Provenance::Synonym;
  else throw Error("unknown provenance '" + prov + "'");
  return t;
}

}  // namespace prodkg

#ifndef PRODKG_CORPUS_IO_HPP
#define PRODKG_CORPUS_IO_HPP

#include <filesystem>
#include <functional>
#include <string>

#include <json.hpp>

#include "prodkg/corpus.hpp"

namespace prodkg {

// One JSON object per line, UTF-8. Parse errors carry file:line.
void for_each_jsonl(const std::filesystem::path& file,
                    const std::function<void(const nlohmann::json&, size_t line)>& fn);
void write_jsonl(const std::filesystem::path& file, const std::vector<nlohmann::json>& rows);

// Loads taxonomy.jsonl + products.jsonl from `dir`. Unknown fields are ignored.
// Throws on parse errors, dangling type references and duplicate product ids.
Catalog load_catalog(const std::filesystem::path& dir);
void save_catalog(const Catalog& c, const std::filesystem::path& dir);

// logs_queries.jsonl / logs_coviews.jsonl / logs_reviews.jsonl (+ optional logs_qa.jsonl).
BehaviorLogs load_logs(const std::filesystem::path& dir);
void save_logs(const BehaviorLogs& logs, const std::filesystem::path& dir);

nlohmann::json triple_to_json(const Triple& t);
Triple triple_from_json(const nlohmann::json& j);

}  // namespace prodkg

#endif

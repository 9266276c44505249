#include "proxyval/classify.hpp"

#include <fstream>

#include "proxyval/error.hpp"
#include "proxyval/text.hpp"

namespace proxyval {

KeywordRuleSet load_keywords(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open keyword config: " + path);
  KeywordRuleSet rules;
  std::set<std::string>* section = &rules.disease_keywords;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    std::size_t hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    std::string t{trim(line)};
    if (t.empty()) continue;
    if (t == "[disease]") {
      section = &rules.disease_keywords;
    } else if (t == "[function]") {
      section = &rules.function_keywords;
    } else if (t.front() == '[') {
      throw ConfigError("unknown section at line " + std::to_string(line_no) + ": " + t);
    } else if (t.rfind("require-category", 0) == 0) {
      std::string value = normalize_token(t.substr(16));
      if (!value.empty() && value.front() == '=') value = normalize_token(value.substr(1));
      if (value == "therapeutic_only")
        rules.require_category = CategoryGate::therapeutic_only;
      else if (value == "any")
        rules.require_category = CategoryGate::any;
      else
        throw ConfigError("require-category must be therapeutic_only or any (line " +
                          std::to_string(line_no) + ")");
    } else {
      section->insert(normalize_token(t));
    }
  }
  if (rules.disease_keywords.empty() || rules.function_keywords.empty())
    throw ConfigError("keyword config needs at least one [disease] and one [function] keyword");
  return rules;
}

KeywordRuleSet default_keywords() {
  KeywordRuleSet rules;
  for (const char* k : {"flutd", "lower urinary tract", "urinary disease", "struvite", "stone"})
    rules.disease_keywords.insert(k);
  for (const char* k : {"urinary", "ph control", "ph care", "ph balance", "mineral control"})
    rules.function_keywords.insert(k);
  return rules;
}

ProductLabel label_product(const ProductEntry& entry, const KeywordRuleSet& rules) {
  ProductLabel label;
  label.product_id = entry.product_id;
  std::string name = normalize_text(entry.name);
  for (const std::set<std::string>* set : {&rules.disease_keywords, &rules.function_keywords}) {
    for (const std::string& kw : *set) {
      if (!kw.empty() && name.find(kw) != std::string::npos) label.matched_keywords.insert(kw);
    }
  }
  bool category_ok = rules.require_category == CategoryGate::any ||
                     entry.category == Category::therapeutic;
  label.is_target = category_ok && !label.matched_keywords.empty();
  return label;
}

CatalogPartition partition_catalog(const Catalog& catalog, const KeywordRuleSet& rules) {
  CatalogPartition part;
  for (const auto& [id, entry] : catalog) {
    // Targets win over the general bucket so the two sets stay disjoint
    // even under require_category = any.
    if (label_product(entry, rules).is_target) {
      part.target_ids.insert(id);
    } else if (entry.category == Category::general) {
      part.general_ids.insert(id);
    }
  }
  return part;
}

std::set<std::string> ingredient_exposure(const std::set<std::string>& products,
                                          const Catalog& catalog) {
  std::set<std::string> out;
  for (const std::string& id : products) {
    auto it = catalog.find(id);
    if (it == catalog.end()) throw DomainError("UnknownProductId", "product_id " + id);
    out.insert(it->second.ingredients.begin(), it->second.ingredients.end());
  }
  return out;
}

}  // namespace proxyval

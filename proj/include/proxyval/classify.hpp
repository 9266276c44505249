#pragma once

#include <set>
#include <string>

#include "proxyval/ingest.hpp"

namespace proxyval {

enum class CategoryGate { therapeutic_only, any };

// Keyword rules for spotting therapeutic-diet products by name. Tokens are
// stored normalized (width/case folded) so matching is insensitive to
// letter case and fullwidth/halfwidth variants.
struct KeywordRuleSet {
  std::set<std::string> disease_keywords;
  std::set<std::string> function_keywords;
  CategoryGate require_category = CategoryGate::therapeutic_only;
};

struct ProductLabel {
  std::string product_id;
  bool is_target = false;
  std::set<std::string> matched_keywords;
};

struct CatalogPartition {
  std::set<std::string> target_ids;
  std::set<std::string> general_ids;
};

// Config format: one keyword per line, `#` comments, `[disease]` and
// `[function]` section headers, and a `require-category` directive with
// value `therapeutic_only` or `any`. Throws ConfigError on bad syntax or
// if either keyword set ends up empty.
KeywordRuleSet load_keywords(const std::string& path);

// Built-in seed list (the published keyword examples); used when no
// config file is given.
KeywordRuleSet default_keywords();

ProductLabel label_product(const ProductEntry& entry, const KeywordRuleSet& rules);

// target_ids: matched per label_product. general_ids: category == general.
// Therapeutic products with no keyword hit fall in neither set.
CatalogPartition partition_catalog(const Catalog& catalog, const KeywordRuleSet& rules);

// Union of ingredient sets; throws DomainError("UnknownProductId") for ids
// missing from the catalog.
std::set<std::string> ingredient_exposure(const std::set<std::string>& products,
                                          const Catalog& catalog);

}  // namespace proxyval

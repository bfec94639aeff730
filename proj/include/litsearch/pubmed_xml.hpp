#pragma once

#include <cstddef>
#include <string_view>
#include <vector>

#include "litsearch/corpus.hpp"

namespace litsearch {

struct ParsedArticles {
  // Records in document order. The abstract may be empty.
  std::vector<DocumentRecord> records;
  // Articles without a PMID or with an unreadable publication date.
  std::size_t malformed = 0;
};

// Parses an EFetch PubmedArticleSet (rettype=abstract, retmode=xml).
// Throws ServiceError if the payload is not well-formed XML.
ParsedArticles parse_pubmed_xml(std::string_view xml);

}  // namespace litsearch

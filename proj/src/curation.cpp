#include <fstream>
#include <sstream>

#include "litsearch/error.hpp"
#include "litsearch/ranker.hpp"

namespace litsearch {

namespace {

std::string trim(const std::string& s) {
  auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) return {};
  auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

}  // namespace

CurationList parse_curation(std::string_view text) {
  enum class Section { none, exclude, add, irregular, keep };
  CurationList out;
  Section section = Section::none;
  std::istringstream in{std::string(text)};
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line == "[exclude]") section = Section::exclude;
      else if (line == "[add]") section = Section::add;
      else if (line == "[irregular-plurals]") section = Section::irregular;
      else if (line == "[keep-plurals]") section = Section::keep;
      else throw SchemaError("unknown curation section " + line, line_no);
      continue;
    }
    switch (section) {
      case Section::none:
        throw SchemaError("entry outside of a section", line_no);
      case Section::exclude:
        out.exclusions.insert(line);
        break;
      case Section::add:
        out.additions.push_back(line);
        break;
      case Section::keep:
        out.keep_plurals.insert(line);
        break;
      case Section::irregular: {
        std::string plural, singular, arrow;
        std::istringstream pair(line);
        pair >> plural >> singular;
        if (singular == "->") pair >> singular;
        if (plural.empty() || singular.empty() || pair >> arrow) {
          throw SchemaError("expected 'plural singular' or 'plural -> singular'", line_no);
        }
        out.irregular_plurals[plural] = singular;
        break;
      }
    }
  }
  try {
    out.validate();
  } catch (const UsageError& e) {
    throw SchemaError(e.what());
  }
  return out;
}

CurationList load_curation(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open curation file " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  try {
    return parse_curation(buf.str());
  } catch (const SchemaError& e) {
    throw SchemaError(path.string() + ": " + e.what());
  }
}

}  // namespace litsearch

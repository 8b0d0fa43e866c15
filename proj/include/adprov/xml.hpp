// Minimal XML reader/writer used by the XES layer.
// Covers the subset XES documents need: prolog, comments, elements with
// attributes, character data, the five predefined entities and numeric
// character references. Parse errors carry line/column.

#pragma once

#include <map>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace adprov::xml {

class ParseError : public std::runtime_error {
public:
    ParseError(const std::string& msg, int line, int column)
        : std::runtime_error(msg + " at line " + std::to_string(line) +
                             ", column " + std::to_string(column)),
          line(line), column(column) {}
    int line;
    int column;
};

struct Element {
    std::string name;
    std::vector<std::pair<std::string, std::string>> attributes;  // source order
    std::vector<Element> children;
    std::string text;  // concatenated character data, whitespace-trimmed
    int line = 0;
    int column = 0;

    const std::string* attr(std::string_view key) const;
    const Element* first_child(std::string_view name) const;
};

// Parses one document, returns the root element. Throws ParseError.
Element parse(std::string_view document);

// Escapes &, <, >, " and ' for use in attribute values and text.
std::string escape(std::string_view raw);

class Writer {
public:
    std::string take() { return std::move(out_); }

    void prolog();
    void open(std::string_view name,
              const std::vector<std::pair<std::string, std::string>>& attrs = {});
    void self_closing(std::string_view name,
                      const std::vector<std::pair<std::string, std::string>>& attrs = {});
    void close(std::string_view name);

private:
    void indent();
    std::string out_;
    int depth_ = 0;
};

}  // namespace adprov::xml

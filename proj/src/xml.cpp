#include "adprov/xml.hpp"

#include <cctype>

namespace adprov::xml {

const std::string* Element::attr(std::string_view key) const {
    for (const auto& [k, v] : attributes)
        if (k == key) return &v;
    return nullptr;
}

const Element* Element::first_child(std::string_view name) const {
    for (const auto& c : children)
        if (c.name == name) return &c;
    return nullptr;
}

namespace {

class Cursor {
public:
    explicit Cursor(std::string_view text) : text_(text) {}

    bool eof() const { return pos_ >= text_.size(); }
    char peek() const { return text_[pos_]; }
    bool starts_with(std::string_view s) const { return text_.substr(pos_).starts_with(s); }

    char take() {
        char c = text_[pos_++];
        if (c == '\n') {
            ++line_;
            col_ = 1;
        } else {
            ++col_;
        }
        return c;
    }

    void expect(std::string_view s) {
        if (!starts_with(s)) fail("expected '" + std::string(s) + "'");
        for (size_t i = 0; i < s.size(); ++i) take();
    }

    void skip_ws() {
        while (!eof() && std::isspace(static_cast<unsigned char>(peek()))) take();
    }

    [[noreturn]] void fail(const std::string& msg) const {
        throw ParseError(msg, line_, col_);
    }

    int line() const { return line_; }
    int col() const { return col_; }

private:
    std::string_view text_;
    size_t pos_ = 0;
    int line_ = 1;
    int col_ = 1;
};

bool name_start(char c) {
    return std::isalpha(static_cast<unsigned char>(c)) || c == '_' || c == ':';
}

bool name_char(char c) {
    return name_start(c) || std::isdigit(static_cast<unsigned char>(c)) || c == '-' || c == '.';
}

std::string read_name(Cursor& in) {
    if (in.eof() || !name_start(in.peek())) in.fail("expected name");
    std::string name;
    while (!in.eof() && name_char(in.peek())) name += in.take();
    return name;
}

std::string read_reference(Cursor& in) {
    in.expect("&");
    std::string ent;
    while (!in.eof() && in.peek() != ';') ent += in.take();
    if (in.eof()) in.fail("unterminated entity reference");
    in.take();  // ';'
    if (ent == "amp") return "&";
    if (ent == "lt") return "<";
    if (ent == "gt") return ">";
    if (ent == "quot") return "\"";
    if (ent == "apos") return "'";
    if (ent.size() > 1 && ent[0] == '#') {
        long code = 0;
        try {
            code = ent[1] == 'x' ? std::stol(ent.substr(2), nullptr, 16)
                                 : std::stol(ent.substr(1));
        } catch (const std::exception&) {
            in.fail("bad character reference '&" + ent + ";'");
        }
        // Encode as UTF-8.
        std::string out;
        if (code < 0x80) {
            out += static_cast<char>(code);
        } else if (code < 0x800) {
            out += static_cast<char>(0xC0 | (code >> 6));
            out += static_cast<char>(0x80 | (code & 0x3F));
        } else if (code < 0x10000) {
            out += static_cast<char>(0xE0 | (code >> 12));
            out += static_cast<char>(0x80 | ((code >> 6) & 0x3F));
            out += static_cast<char>(0x80 | (code & 0x3F));
        } else {
            out += static_cast<char>(0xF0 | (code >> 18));
            out += static_cast<char>(0x80 | ((code >> 12) & 0x3F));
            out += static_cast<char>(0x80 | ((code >> 6) & 0x3F));
            out += static_cast<char>(0x80 | (code & 0x3F));
        }
        return out;
    }
    in.fail("unknown entity '&" + ent + ";'");
}

std::string read_attr_value(Cursor& in) {
    if (in.eof() || (in.peek() != '"' && in.peek() != '\'')) in.fail("expected quoted value");
    char quote = in.take();
    std::string value;
    while (!in.eof() && in.peek() != quote) {
        if (in.peek() == '&')
            value += read_reference(in);
        else if (in.peek() == '<')
            in.fail("'<' in attribute value");
        else
            value += in.take();
    }
    if (in.eof()) in.fail("unterminated attribute value");
    in.take();
    return value;
}

void skip_comment(Cursor& in) {
    in.expect("<!--");
    while (!in.starts_with("-->")) {
        if (in.eof()) in.fail("unterminated comment");
        in.take();
    }
    in.expect("-->");
}

void skip_misc(Cursor& in) {
    for (;;) {
        in.skip_ws();
        if (in.starts_with("<!--")) {
            skip_comment(in);
        } else if (in.starts_with("<?")) {
            while (!in.starts_with("?>")) {
                if (in.eof()) in.fail("unterminated processing instruction");
                in.take();
            }
            in.expect("?>");
        } else {
            return;
        }
    }
}

std::string rtrim(std::string s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.pop_back();
    size_t i = 0;
    while (i < s.size() && std::isspace(static_cast<unsigned char>(s[i]))) ++i;
    return s.substr(i);
}

Element read_element(Cursor& in) {
    Element el;
    el.line = in.line();
    el.column = in.col();
    in.expect("<");
    el.name = read_name(in);
    for (;;) {
        in.skip_ws();
        if (in.eof()) in.fail("unterminated start tag <" + el.name + ">");
        if (in.peek() == '/') {
            in.expect("/>");
            return el;
        }
        if (in.peek() == '>') {
            in.take();
            break;
        }
        std::string key = read_name(in);
        in.skip_ws();
        in.expect("=");
        in.skip_ws();
        el.attributes.emplace_back(std::move(key), read_attr_value(in));
    }
    // Content.
    std::string text;
    for (;;) {
        if (in.eof()) in.fail("missing end tag </" + el.name + ">");
        if (in.starts_with("</")) {
            in.expect("</");
            std::string end = read_name(in);
            if (end != el.name)
                in.fail("mismatched end tag </" + end + ">, expected </" + el.name + ">");
            in.skip_ws();
            in.expect(">");
            el.text = rtrim(std::move(text));
            return el;
        }
        if (in.starts_with("<!--")) {
            skip_comment(in);
        } else if (in.peek() == '<') {
            el.children.push_back(read_element(in));
        } else if (in.peek() == '&') {
            text += read_reference(in);
        } else {
            text += in.take();
        }
    }
}

}  // namespace

Element parse(std::string_view document) {
    Cursor in(document);
    skip_misc(in);
    if (in.eof()) in.fail("empty document");
    if (in.peek() != '<') in.fail("expected element");
    Element root = read_element(in);
    skip_misc(in);
    if (!in.eof()) in.fail("trailing content after root element");
    return root;
}

std::string escape(std::string_view raw) {
    std::string out;
    out.reserve(raw.size());
    for (char c : raw) {
        switch (c) {
            case '&': out += "&amp;"; break;
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '"': out += "&quot;"; break;
            case '\'': out += "&apos;"; break;
            default: out += c;
        }
    }
    return out;
}

void Writer::indent() {
    for (int i = 0; i < depth_; ++i) out_ += "  ";
}

void Writer::prolog() {
    out_ += "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
}

void Writer::open(std::string_view name,
                  const std::vector<std::pair<std::string, std::string>>& attrs) {
    indent();
    out_ += '<';
    out_ += name;
    for (const auto& [k, v] : attrs) {
        out_ += ' ';
        out_ += k;
        out_ += "=\"";
        out_ += escape(v);
        out_ += '"';
    }
    out_ += ">\n";
    ++depth_;
}

void Writer::self_closing(std::string_view name,
                          const std::vector<std::pair<std::string, std::string>>& attrs) {
    indent();
    out_ += '<';
    out_ += name;
    for (const auto& [k, v] : attrs) {
        out_ += ' ';
        out_ += k;
        out_ += "=\"";
        out_ += escape(v);
        out_ += '"';
    }
    out_ += "/>\n";
}

void Writer::close(std::string_view name) {
    --depth_;
    indent();
    out_ += "</";
    out_ += name;
    out_ += ">\n";
}

}  // namespace adprov::xml

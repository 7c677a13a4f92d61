// CSV emission: RFC-4180 quoting, '.' decimal separator, 17 significant
// digits for doubles so every emitted file is bit-reproducible.
#pragma once

#include <charconv>
#include <cstdint>
#include <fstream>
#include <string>
#include <string_view>
#include <vector>

namespace ccs {

inline std::string format_double(double v) {
    char buf[64];
    auto r = std::to_chars(buf, buf + sizeof(buf), v, std::chars_format::general, 17);
    return std::string(buf, r.ptr);
}

inline std::string csv_quote(std::string_view field) {
    bool needs = field.find_first_of(",\"\r\n") != std::string_view::npos;
    if (!needs) return std::string(field);
    std::string out = "\"";
    for (char c : field) {
        out += c;
        if (c == '"') out += '"';
    }
    out += '"';
    return out;
}

class CsvWriter {
public:
    explicit CsvWriter(const std::string& path) : out_(path, std::ios::binary) {}

    bool ok() const { return out_.good(); }

    CsvWriter& field(std::string_view s) {
        if (!first_) out_ << ',';
        out_ << csv_quote(s);
        first_ = false;
        return *this;
    }
    CsvWriter& field(double v) { return field(std::string_view(format_double(v))); }
    CsvWriter& field(std::int64_t v) { return field(std::string_view(std::to_string(v))); }
    CsvWriter& field(int v) { return field(static_cast<std::int64_t>(v)); }

    void endrow() {
        out_ << '\n';
        first_ = true;
    }

    void row(const std::vector<std::string>& fields) {
        for (const auto& f : fields) field(std::string_view(f));
        endrow();
    }

private:
    std::ofstream out_;
    bool first_ = true;
};

} // namespace ccs

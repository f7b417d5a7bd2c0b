#pragma once

#include <charconv>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <stdexcept>
#include <string>
#include <system_error>
#include <vector>

namespace gevo {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// One rejected input row: 1-based line number plus what went wrong.
struct RowIssue {
    std::size_t line = 0;
    std::string message;
};

inline std::vector<std::string> split_fields(const std::string& line, char delimiter) {
    std::vector<std::string> fields;
    std::size_t start = 0;
    while (true) {
        std::size_t pos = line.find(delimiter, start);
        if (pos == std::string::npos) {
            fields.emplace_back(line, start);
            return fields;
        }
        fields.emplace_back(line, start, pos - start);
        start = pos + 1;
    }
}

inline bool parse_double(const std::string& text, double& out) {
    const char* first = text.data();
    const char* last = text.data() + text.size();
    while (first != last && (*first == ' ' || *first == '\t')) ++first;
    auto [ptr, ec] = std::from_chars(first, last, out);
    return ec == std::errc{} && ptr == last;
}

inline bool parse_long(const std::string& text, long& out) {
    const char* first = text.data();
    const char* last = text.data() + text.size();
    while (first != last && (*first == ' ' || *first == '\t')) ++first;
    auto [ptr, ec] = std::from_chars(first, last, out);
    return ec == std::errc{} && ptr == last;
}

/// Shortest-first, then lexicographic. Orders unpadded numeric ids naturally
/// ("2" < "10") while staying total for arbitrary strings.
inline bool shortlex_less(const std::string& a, const std::string& b) {
    if (a.size() != b.size()) return a.size() < b.size();
    return a < b;
}

inline std::string format_double(double value) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.9g", value);
    return buf;
}

/// Line-oriented delimited reader. Keeps 1-based line numbers so malformed
/// rows can be reported against the source file.
class DelimitedReader {
public:
    DelimitedReader(const std::filesystem::path& path, char delimiter)
        : in_(path), delimiter_(delimiter) {
        if (!in_) throw Error("cannot open file: " + path.string());
    }

    bool next(std::size_t& line_no, std::vector<std::string>& fields) {
        std::string line;
        while (std::getline(in_, line)) {
            ++line_;
            if (!line.empty() && line.back() == '\r') line.pop_back();
            if (line.empty()) continue;
            line_no = line_;
            fields = split_fields(line, delimiter_);
            return true;
        }
        return false;
    }

private:
    std::ifstream in_;
    char delimiter_;
    std::size_t line_ = 0;
};

class DelimitedWriter {
public:
    DelimitedWriter(const std::filesystem::path& path, char delimiter)
        : out_(path, std::ios::binary), delimiter_(delimiter) {
        if (!out_) throw Error("cannot open file for writing: " + path.string());
    }

    void row(const std::vector<std::string>& fields) {
        for (std::size_t i = 0; i < fields.size(); ++i) {
            if (i > 0) out_ << delimiter_;
            out_ << fields[i];
        }
        out_ << '\n';
    }

    void flush_and_check() {
        out_.flush();
        if (!out_) throw Error("write failed");
    }

private:
    std::ofstream out_;
    char delimiter_;
};

}  // namespace gevo

#pragma once
// Flat key = value configuration with [section] grouping. Keys are addressed
// as "section.key". Values may use a "pi" suffix (e.g. -3pi) for domain
// bounds. Insertion order is preserved so a dumped config diffs cleanly
// against its source.

#include <cctype>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "gaugelens/model.hpp"

namespace gaugelens {

namespace detail {

inline std::string trim(const std::string& s) {
    std::size_t a = 0, b = s.size();
    while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
    while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
    return s.substr(a, b - a);
}

// Strips a trailing comment: '#' or ';' preceded by whitespace or at start.
inline std::string strip_comment(const std::string& s) {
    for (std::size_t i = 0; i < s.size(); ++i) {
        if ((s[i] == '#' || s[i] == ';') &&
            (i == 0 || std::isspace(static_cast<unsigned char>(s[i - 1]))))
            return s.substr(0, i);
    }
    return s;
}

inline double parse_double_value(const std::string& raw, const std::string& key) {
    const std::string v = trim(raw);
    if (v.empty()) throw std::invalid_argument("config: empty numeric value for '" + key + "'");
    std::string body = v;
    double mult = 1.0;
    if (v.size() >= 2 && (v.compare(v.size() - 2, 2, "pi") == 0)) {
        mult = pi;
        body = trim(v.substr(0, v.size() - 2));
        if (body.empty() || body == "+") return mult;
        if (body == "-") return -mult;
    }
    char* end = nullptr;
    const double x = std::strtod(body.c_str(), &end);
    if (end == body.c_str() || *end != '\0')
        throw std::invalid_argument("config: cannot parse number '" + v + "' for '" + key + "'");
    return x * mult;
}

}  // namespace detail

class Config {
  public:
    Config() = default;

    static Config from_string(const std::string& text, const std::string& origin = "<string>") {
        Config cfg;
        std::istringstream in(text);
        std::string line, section;
        int lineno = 0;
        while (std::getline(in, line)) {
            ++lineno;
            line = detail::trim(detail::strip_comment(line));
            if (line.empty()) continue;
            if (line.front() == '[') {
                if (line.back() != ']')
                    throw std::invalid_argument(origin + ":" + std::to_string(lineno) +
                                                ": unterminated section header");
                section = detail::trim(line.substr(1, line.size() - 2));
                if (section.empty())
                    throw std::invalid_argument(origin + ":" + std::to_string(lineno) +
                                                ": empty section name");
                continue;
            }
            const auto eq = line.find('=');
            if (eq == std::string::npos)
                throw std::invalid_argument(origin + ":" + std::to_string(lineno) +
                                            ": expected key = value");
            std::string key = detail::trim(line.substr(0, eq));
            const std::string val = detail::trim(line.substr(eq + 1));
            if (key.empty())
                throw std::invalid_argument(origin + ":" + std::to_string(lineno) +
                                            ": empty key");
            if (!section.empty()) key = section + "." + key;
            cfg.set(key, val);
        }
        return cfg;
    }

    static Config from_file(const std::string& path) {
        std::ifstream in(path);
        if (!in) throw std::runtime_error("config: cannot open '" + path + "'");
        std::ostringstream buf;
        buf << in.rdbuf();
        return from_string(buf.str(), path);
    }

    bool has(const std::string& key) const { return index_.count(key) != 0; }

    // Last assignment wins; order of first assignment is kept for dump().
    void set(const std::string& key, const std::string& value) {
        auto it = index_.find(key);
        if (it != index_.end()) {
            items_[it->second].second = value;
        } else {
            index_[key] = items_.size();
            items_.emplace_back(key, value);
        }
    }

    std::string get_string(const std::string& key) const {
        auto it = index_.find(key);
        if (it == index_.end()) throw std::out_of_range("config: missing key '" + key + "'");
        return items_[it->second].second;
    }
    std::string get_string(const std::string& key, const std::string& dflt) const {
        return has(key) ? get_string(key) : dflt;
    }

    double get_double(const std::string& key) const {
        return detail::parse_double_value(get_string(key), key);
    }
    double get_double(const std::string& key, double dflt) const {
        return has(key) ? get_double(key) : dflt;
    }

    int get_int(const std::string& key) const {
        const double x = get_double(key);
        const int n = static_cast<int>(std::lround(x));
        if (std::abs(x - n) > 1e-9)
            throw std::invalid_argument("config: '" + key + "' is not an integer");
        return n;
    }
    int get_int(const std::string& key, int dflt) const {
        return has(key) ? get_int(key) : dflt;
    }

    bool get_bool(const std::string& key) const {
        std::string v = get_string(key);
        for (auto& c : v) c = char(std::tolower(static_cast<unsigned char>(c)));
        if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
        if (v == "false" || v == "0" || v == "no" || v == "off") return false;
        throw std::invalid_argument("config: '" + key + "' is not a boolean: " + v);
    }
    bool get_bool(const std::string& key, bool dflt) const {
        return has(key) ? get_bool(key) : dflt;
    }

    std::vector<double> get_double_list(const std::string& key) const {
        const std::string raw = get_string(key);
        std::vector<double> out;
        std::size_t pos = 0;
        while (pos <= raw.size()) {
            const auto comma = raw.find(',', pos);
            const std::string tok =
                raw.substr(pos, comma == std::string::npos ? std::string::npos : comma - pos);
            if (!detail::trim(tok).empty())
                out.push_back(detail::parse_double_value(tok, key));
            if (comma == std::string::npos) break;
            pos = comma + 1;
        }
        if (out.empty()) throw std::invalid_argument("config: empty list for '" + key + "'");
        return out;
    }
    std::vector<double> get_double_list(const std::string& key,
                                        const std::vector<double>& dflt) const {
        return has(key) ? get_double_list(key) : dflt;
    }

    const std::vector<std::pair<std::string, std::string>>& entries() const { return items_; }

    // Regroups keys under their section headers, insertion-ordered.
    std::string dump() const {
        std::ostringstream out;
        std::string current;
        bool first = true;
        for (const auto& [key, value] : items_) {
            const auto dot = key.find('.');
            const std::string sec = (dot == std::string::npos) ? "" : key.substr(0, dot);
            const std::string bare = (dot == std::string::npos) ? key : key.substr(dot + 1);
            if (sec != current || first) {
                if (!first) out << "\n";
                if (!sec.empty()) out << "[" << sec << "]\n";
                current = sec;
            }
            out << bare << " = " << value << "\n";
            first = false;
        }
        return out.str();
    }

  private:
    std::vector<std::pair<std::string, std::string>> items_;
    std::map<std::string, std::size_t> index_;
};

}  // namespace gaugelens

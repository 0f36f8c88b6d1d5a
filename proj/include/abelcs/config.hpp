#pragma once

// Minimal TOML-shaped config reader: [section] headers and key = value lines
// with string, bool, integer, float, and flat numeric/string arrays.  The
// reader is strict — unknown sections or keys are reported, so typos fail
// fast with a config error instead of silently using defaults.

#include <cctype>
#include <complex>
#include <cstdint>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

namespace abelcs {

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

using ConfigValue = std::variant<bool, std::int64_t, double, std::string, std::vector<double>,
                                 std::vector<std::string>>;

class Config {
  public:
    Config() = default;

    static Config parse_file(const std::string& path) {
        std::ifstream in(path);
        if (!in) throw ConfigError("cannot open config file: " + path);
        std::ostringstream ss;
        ss << in.rdbuf();
        return parse(ss.str(), path);
    }

    static Config parse(const std::string& text, const std::string& origin = "<config>") {
        Config cfg;
        std::istringstream in(text);
        std::string line, section;
        int lineno = 0;
        while (std::getline(in, line)) {
            ++lineno;
            std::string s = strip_comment(line);
            s = trim(s);
            if (s.empty()) continue;
            if (s.front() == '[') {
                if (s.back() != ']')
                    throw ConfigError(origin + ":" + std::to_string(lineno) + ": unterminated section header");
                section = trim(s.substr(1, s.size() - 2));
                if (section.empty())
                    throw ConfigError(origin + ":" + std::to_string(lineno) + ": empty section name");
                continue;
            }
            auto eq = s.find('=');
            if (eq == std::string::npos)
                throw ConfigError(origin + ":" + std::to_string(lineno) + ": expected key = value");
            std::string key = trim(s.substr(0, eq));
            std::string val = trim(s.substr(eq + 1));
            if (key.empty() || val.empty())
                throw ConfigError(origin + ":" + std::to_string(lineno) + ": empty key or value");
            std::string full = section.empty() ? key : section + "." + key;
            cfg.values_[full] = parse_value(val, origin, lineno);
        }
        return cfg;
    }

    bool has(const std::string& key) const { return values_.count(key) > 0; }

    template <class T>
    T get(const std::string& key, T fallback) const {
        auto it = values_.find(key);
        if (it == values_.end()) return fallback;
        used_.insert(key);
        if constexpr (std::is_same_v<T, double>) {
            // integers written without a dot are fine where a float is expected
            if (auto* i = std::get_if<std::int64_t>(&it->second)) return double(*i);
        }
        if (auto* v = std::get_if<T>(&it->second)) return *v;
        throw ConfigError("config key has the wrong type: " + key);
    }

    // keys present in the file but never requested: almost certainly typos
    std::vector<std::string> unused_keys() const {
        std::vector<std::string> r;
        for (const auto& [k, v] : values_)
            if (!used_.count(k)) r.push_back(k);
        return r;
    }

  private:
    static std::string trim(const std::string& s) {
        size_t a = s.find_first_not_of(" \t\r");
        if (a == std::string::npos) return {};
        size_t b = s.find_last_not_of(" \t\r");
        return s.substr(a, b - a + 1);
    }

    static std::string strip_comment(const std::string& s) {
        bool in_str = false;
        for (size_t i = 0; i < s.size(); ++i) {
            if (s[i] == '"') in_str = !in_str;
            if (s[i] == '#' && !in_str) return s.substr(0, i);
        }
        return s;
    }

    static ConfigValue parse_scalar(const std::string& v, const std::string& origin, int lineno) {
        if (v == "true") return true;
        if (v == "false") return false;
        if (v.size() >= 2 && v.front() == '"' && v.back() == '"') return v.substr(1, v.size() - 2);
        try {
            size_t pos = 0;
            if (v.find_first_of(".eE") == std::string::npos) {
                std::int64_t i = std::stoll(v, &pos);
                if (pos == v.size()) return i;
            }
            pos = 0;
            double d = std::stod(v, &pos);
            if (pos == v.size()) return d;
        } catch (const std::exception&) {
        }
        throw ConfigError(origin + ":" + std::to_string(lineno) + ": cannot parse value: " + v);
    }

    static ConfigValue parse_value(const std::string& v, const std::string& origin, int lineno) {
        if (v.front() != '[') return parse_scalar(v, origin, lineno);
        if (v.back() != ']')
            throw ConfigError(origin + ":" + std::to_string(lineno) + ": unterminated array");
        std::vector<std::string> items;
        std::string body = v.substr(1, v.size() - 2);
        std::string cur;
        for (char ch : body) {
            if (ch == ',') {
                items.push_back(trim(cur));
                cur.clear();
            } else {
                cur += ch;
            }
        }
        if (!trim(cur).empty()) items.push_back(trim(cur));
        std::vector<double> nums;
        std::vector<std::string> strs;
        bool all_num = true, all_str = true;
        for (const auto& item : items) {
            ConfigValue sv = parse_scalar(item, origin, lineno);
            if (auto* d = std::get_if<double>(&sv))
                strs.clear(), all_str = false, nums.push_back(*d);
            else if (auto* i = std::get_if<std::int64_t>(&sv))
                strs.clear(), all_str = false, nums.push_back(double(*i));
            else if (auto* s = std::get_if<std::string>(&sv))
                all_num = false, strs.push_back(*s);
            else
                throw ConfigError(origin + ":" + std::to_string(lineno) + ": bad array element");
        }
        if (!all_num && !all_str)
            throw ConfigError(origin + ":" + std::to_string(lineno) + ": mixed array types");
        if (all_num) return nums;
        return strs;
    }

    std::map<std::string, ConfigValue> values_;
    mutable std::set<std::string> used_;
};

// Parses "a+bi" style complex literals: "1i", "-2", "0.3+1.1i", "0.2-0.3i".
inline std::complex<double> parse_complex(const std::string& text) {
    std::string s;
    for (char c : text)
        if (!std::isspace(static_cast<unsigned char>(c))) s += c;
    if (s.empty()) throw ConfigError("empty complex literal");
    auto read_num = [&](size_t& i) -> double {
        size_t start = i;
        if (i < s.size() && (s[i] == '+' || s[i] == '-')) ++i;
        while (i < s.size() && (std::isdigit(static_cast<unsigned char>(s[i])) || s[i] == '.')) ++i;
        if (i < s.size() && (s[i] == 'e' || s[i] == 'E')) {
            ++i;
            if (i < s.size() && (s[i] == '+' || s[i] == '-')) ++i;
            while (i < s.size() && std::isdigit(static_cast<unsigned char>(s[i]))) ++i;
        }
        std::string num = s.substr(start, i - start);
        if (num.empty() || num == "+") return 1.0;
        if (num == "-") return -1.0;
        size_t pos = 0;
        double v = std::stod(num, &pos);
        if (pos != num.size()) throw ConfigError("bad complex literal: " + text);
        return v;
    };
    double re = 0, im = 0;
    size_t i = 0;
    while (i < s.size()) {
        double v = read_num(i);
        if (i < s.size() && (s[i] == 'i' || s[i] == 'j')) {
            im += v;
            ++i;
        } else {
            re += v;
        }
        if (i < s.size() && s[i] != '+' && s[i] != '-') throw ConfigError("bad complex literal: " + text);
    }
    return {re, im};
}

}  // namespace abelcs

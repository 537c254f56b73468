#include "fsl/cli_util.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace fsl {

namespace {

std::vector<std::string> split(const std::string& text, char sep) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : text) {
        if (c == sep) {
            out.push_back(cur);
            cur.clear();
        } else {
            cur.push_back(c);
        }
    }
    out.push_back(cur);
    return out;
}

std::string strip(const std::string& s) {
    std::size_t a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return "";
    std::size_t b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
}

}  // namespace

double parse_double_token(const std::string& key, const std::string& text) {
    std::string t = strip(text);
    if (t.empty()) throw std::invalid_argument(key + ": empty value");
    std::size_t used = 0;
    double v;
    try {
        v = std::stod(t, &used);
    } catch (const std::exception&) {
        throw std::invalid_argument(key + ": malformed number '" + t + "'");
    }
    if (used != t.size()) throw std::invalid_argument(key + ": malformed number '" + t + "'");
    if (!std::isfinite(v)) throw std::invalid_argument(key + ": non-finite value '" + t + "'");
    return v;
}

long long parse_int_token(const std::string& key, const std::string& text) {
    std::string t = strip(text);
    if (t.empty()) throw std::invalid_argument(key + ": empty value");
    std::size_t used = 0;
    long long v;
    try {
        v = std::stoll(t, &used);
    } catch (const std::exception&) {
        throw std::invalid_argument(key + ": malformed integer '" + t + "'");
    }
    if (used != t.size()) throw std::invalid_argument(key + ": malformed integer '" + t + "'");
    return v;
}

std::vector<double> parse_double_list(const std::string& key, const std::string& text) {
    std::vector<double> out;
    for (const std::string& tok : split(text, ','))
        out.push_back(parse_double_token(key, tok));
    return out;
}

std::vector<double> parse_alpha_list(const std::string& text) {
    std::vector<double> out;
    if (text.find(':') != std::string::npos) {
        auto parts = split(text, ':');
        if (parts.size() != 3)
            throw std::invalid_argument("alphas: range must be start:stop:step, got '" + text + "'");
        double a0 = parse_double_token("alphas", parts[0]);
        double a1 = parse_double_token("alphas", parts[1]);
        double step = parse_double_token("alphas", parts[2]);
        if (!(step > 0.0)) throw std::invalid_argument("alphas: step must be positive");
        if (a1 < a0) throw std::invalid_argument("alphas: stop below start");
        for (double a = a0; a <= a1 + 1e-9; a += step) out.push_back(a);
    } else {
        out = parse_double_list("alphas", text);
    }
    if (out.empty()) throw std::invalid_argument("alphas: empty list");
    for (double a : out)
        if (!(a > 0.0) || !(a < 2.0))
            throw std::invalid_argument("alphas: value " + std::to_string(a) +
                                        " outside the open interval (0,2)");
    return out;
}

Point parse_point(const std::string& key, const std::string& text) {
    auto parts = split(text, ',');
    if (parts.size() != 1 && parts.size() != 2)
        throw std::invalid_argument(key + ": expected 'x' or 'x,y', got '" + text + "'");
    Point p{parse_double_token(key, parts[0]), 0.0};
    if (parts.size() == 2) p[1] = parse_double_token(key, parts[1]);
    return p;
}

std::map<std::string, std::string> parse_key_values(const std::string& text) {
    std::map<std::string, std::string> out;
    std::istringstream in(text);
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        std::string t = strip(line);
        if (t.empty() || t[0] == '#') continue;
        std::size_t eq = t.find('=');
        if (eq == std::string::npos)
            throw std::invalid_argument("config line " + std::to_string(lineno) +
                                        " has no '=': '" + t + "'");
        std::string key = strip(t.substr(0, eq));
        std::string value = strip(t.substr(eq + 1));
        if (key.empty())
            throw std::invalid_argument("config line " + std::to_string(lineno) + " has empty key");
        if (out.count(key))
            throw std::invalid_argument("config: duplicate key '" + key + "'");
        out[key] = value;
    }
    return out;
}

}  // namespace fsl

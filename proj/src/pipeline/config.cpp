#include "swapforge/pipeline/config.hpp"

#include <cctype>
#include <charconv>
#include <fstream>
#include <sstream>

#include "swapforge/errors.hpp"

namespace swapforge::pipeline {

namespace fs = std::filesystem;

namespace {

std::string_view trim(std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    return s;
}

[[noreturn]] void fail(int line, const std::string& msg) {
    throw InvalidArgument("toml line " + std::to_string(line) + ": " + msg);
}

bool is_bare_key(std::string_view k) {
    if (k.empty()) return false;
    for (char c : k)
        if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-' || c == '.')) return false;
    return k.front() != '.' && k.back() != '.';
}

// Parses a value starting at s; `rest` receives what follows it.
TomlValue parse_value(std::string_view s, int line, std::string_view& rest) {
    if (s.empty()) fail(line, "missing value");
    if (s.front() == '"') {
        std::string out;
        std::size_t i = 1;
        for (; i < s.size() && s[i] != '"'; ++i) {
            if (s[i] != '\\') {
                out.push_back(s[i]);
                continue;
            }
            if (++i >= s.size()) break;
            switch (s[i]) {
                case 'n': out.push_back('\n'); break;
                case 't': out.push_back('\t'); break;
                case '"': out.push_back('"'); break;
                case '\\': out.push_back('\\'); break;
                default: fail(line, std::string("unsupported escape \\") + s[i]);
            }
        }
        if (i >= s.size()) fail(line, "unterminated string");
        rest = s.substr(i + 1);
        return out;
    }
    if (s.front() == '\'') {
        const auto end = s.find('\'', 1);
        if (end == std::string_view::npos) fail(line, "unterminated string");
        rest = s.substr(end + 1);
        return std::string(s.substr(1, end - 1));
    }
    std::size_t n = 0;
    while (n < s.size() && s[n] != '#' && !std::isspace(static_cast<unsigned char>(s[n]))) ++n;
    const std::string_view tok = s.substr(0, n);
    rest = s.substr(n);
    if (tok == "true") return true;
    if (tok == "false") return false;
    std::string clean;
    for (char c : tok)
        if (c != '_') clean.push_back(c);
    const bool is_float = clean.find_first_of(".eE") != std::string::npos || clean == "inf" || clean == "nan";
    if (!is_float) {
        long long v = 0;
        const auto* b = clean.data();
        const auto* e = b + clean.size();
        if (!clean.empty() && clean.front() == '+') ++b;
        const auto r = std::from_chars(b, e, v);
        if (r.ec == std::errc() && r.ptr == e) return v;
    } else {
        double v = 0;
        const auto* b = clean.data();
        const auto* e = b + clean.size();
        if (!clean.empty() && clean.front() == '+') ++b;
        const auto r = std::from_chars(b, e, v);
        if (r.ec == std::errc() && r.ptr == e) return v;
    }
    fail(line, "unsupported value '" + std::string(tok) + "'");
}

}  // namespace

std::map<std::string, TomlValue> parse_toml(std::string_view text) {
    std::map<std::string, TomlValue> out;
    std::string table;
    int line_no = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        const auto nl = text.find('\n', pos);
        std::string_view line = text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
        pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
        ++line_no;
        line = trim(line);
        if (line.empty() || line.front() == '#') continue;
        if (line.front() == '[') {
            const auto close = line.find(']');
            if (close == std::string_view::npos || line.substr(0, 2) == "[[") fail(line_no, "bad table header");
            const auto after = trim(line.substr(close + 1));
            if (!after.empty() && after.front() != '#') fail(line_no, "trailing characters after table header");
            table = std::string(trim(line.substr(1, close - 1)));
            if (!is_bare_key(table)) fail(line_no, "bad table name");
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string_view::npos) fail(line_no, "expected key = value");
        const auto key = trim(line.substr(0, eq));
        if (!is_bare_key(key)) fail(line_no, "bad key '" + std::string(key) + "'");
        std::string_view rest;
        TomlValue v = parse_value(trim(line.substr(eq + 1)), line_no, rest);
        rest = trim(rest);
        if (!rest.empty() && rest.front() != '#') fail(line_no, "trailing characters after value");
        const std::string full = table.empty() ? std::string(key) : table + "." + std::string(key);
        if (!out.emplace(full, std::move(v)).second) fail(line_no, "duplicate key '" + full + "'");
    }
    return out;
}

namespace {

template <typename T>
T take(std::map<std::string, TomlValue>& kv, const std::string& key, T fallback) {
    const auto it = kv.find(key);
    if (it == kv.end()) return fallback;
    const TomlValue v = it->second;
    kv.erase(it);
    if constexpr (std::is_same_v<T, std::string>) {
        if (auto* s = std::get_if<std::string>(&v)) return *s;
        throw InvalidArgument("config: '" + key + "' must be a string");
    } else if constexpr (std::is_same_v<T, bool>) {
        if (auto* b = std::get_if<bool>(&v)) return *b;
        throw InvalidArgument("config: '" + key + "' must be a boolean");
    } else if constexpr (std::is_floating_point_v<T>) {
        if (auto* d = std::get_if<double>(&v)) return *d;
        if (auto* i = std::get_if<long long>(&v)) return static_cast<double>(*i);
        throw InvalidArgument("config: '" + key + "' must be a number");
    } else {
        if (auto* i = std::get_if<long long>(&v)) {
            if (*i < 0) throw InvalidArgument("config: '" + key + "' must be non-negative");
            return static_cast<T>(*i);
        }
        throw InvalidArgument("config: '" + key + "' must be an integer");
    }
}

fs::path resolve(const fs::path& base, const std::string& p) {
    if (p.empty()) return {};
    const fs::path path(p);
    return path.is_absolute() || base.empty() ? path : base / path;
}

}  // namespace

ConversionConfig parse_conversion_config(std::string_view toml_text, const fs::path& base_dir) {
    auto kv = parse_toml(toml_text);
    ConversionConfig c;
    c.checkpoint = resolve(base_dir, take<std::string>(kv, "checkpoint", ""));
    c.target_identity = model::parse_identity(take<std::string>(kv, "target_identity", "B"));
    c.squeeze_px = take<int>(kv, "squeeze_px", c.squeeze_px);
    c.conventional = take<bool>(kv, "conventional", false);
    c.frames_dir = resolve(base_dir, take<std::string>(kv, "frames_dir", ""));
    c.landmarks_dir = resolve(base_dir, take<std::string>(kv, "landmarks_dir", ""));
    c.masks_dir = resolve(base_dir, take<std::string>(kv, "masks_dir", ""));
    c.generated_masks_dir = resolve(base_dir, take<std::string>(kv, "generated_masks_dir", ""));
    c.out_dir = resolve(base_dir, take<std::string>(kv, "out_dir", ""));
    c.workers = take<unsigned>(kv, "workers", 1u);
    c.solver.tol = take<double>(kv, "solver.tol", c.solver.tol);
    c.solver.max_iter = take<std::size_t>(kv, "solver.max_iter", c.solver.max_iter);
    const auto method = take<std::string>(kv, "solver.method", "conjugate_gradient");
    if (method != "conjugate_gradient") throw InvalidArgument("config: unsupported solver.method '" + method + "'");
    if (!kv.empty()) throw InvalidArgument("config: unknown key '" + kv.begin()->first + "'");
    return c;
}

ConversionConfig load_conversion_config(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot read config " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_conversion_config(ss.str(), path.parent_path());
}

void ConversionConfig::validate() const {
    solver.validate();
    if (squeeze_px < 0) throw InvalidArgument("config: squeeze_px must be >= 0");
    auto need = [](const fs::path& p, const char* what, bool dir) {
        if (p.empty()) throw InvalidArgument(std::string("config: ") + what + " is required");
        if (dir ? !fs::is_directory(p) : !fs::is_regular_file(p)) {
            throw InvalidArgument(std::string("config: ") + what + " not found: " + p.string());
        }
    };
    need(checkpoint, "checkpoint", false);
    need(frames_dir, "frames_dir", true);
    need(landmarks_dir, "landmarks_dir", true);
    need(masks_dir, "masks_dir", true);
    if (!generated_masks_dir.empty()) need(generated_masks_dir, "generated_masks_dir", true);
    if (out_dir.empty()) throw InvalidArgument("config: out_dir is required");
}

}  // namespace swapforge::pipeline

#pragma once

#include <yaml-cpp/yaml.h>

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "kcurves/errors.hpp"
#include "kcurves/fitting.hpp"
#include "kcurves/kernel.hpp"
#include "kcurves/star_sum.hpp"

namespace kcurves::cli {

inline int line_of(const YAML::Node& n) { return n.Mark().is_null() ? 0 : n.Mark().line + 1; }

inline YAML::Node load_config_file(const std::filesystem::path& path) {
    if (!std::filesystem::exists(path)) throw ConfigError("config file not found: " + path.string(), 0);
    try {
        YAML::Node root = YAML::LoadFile(path.string());
        if (root.IsNull()) return YAML::Node(YAML::NodeType::Map);
        if (!root.IsMap()) throw ConfigError("config root must be a mapping", line_of(root));
        return root;
    } catch (const YAML::ParserException& e) {
        throw ConfigError(e.msg, e.mark.line + 1);
    }
}

/// One mapping of the config. Every key read through it is recorded, together with the value
/// actually used (the default when absent), so that finish() can reject unknown keys and
/// return the fully resolved section.
class Section {
public:
    Section(YAML::Node node, std::string path) : node_(std::move(node)), path_(std::move(path)) {
        if (node_ && !node_.IsNull() && !node_.IsMap()) throw ConfigError(where() + " must be a mapping", line_of(node_));
    }

    [[nodiscard]] bool has(const std::string& key) const { return node_.IsMap() && node_[key] && !node_[key].IsNull(); }

    [[nodiscard]] int line(const std::string& key) const { return has(key) ? line_of(node_[key]) : line_of(node_); }

    template <class T>
    T get(const std::string& key, const T& fallback) {
        used_.insert(key);
        T v = has(key) ? convert<T>(key) : fallback;
        resolved_[key] = v;
        return v;
    }

    template <class T>
    T require(const std::string& key) {
        used_.insert(key);
        if (!has(key)) throw ConfigError(where() + ": missing required key '" + key + "'", line_of(node_));
        T v = convert<T>(key);
        resolved_[key] = v;
        return v;
    }

    template <class T>
    std::optional<T> optional(const std::string& key) {
        used_.insert(key);
        if (!has(key)) return std::nullopt;
        T v = convert<T>(key);
        resolved_[key] = v;
        return v;
    }

    /// Overrides the resolved value of `key` (command-line flags).
    template <class T>
    void set(const std::string& key, const T& v) {
        used_.insert(key);
        resolved_[key] = v;
    }

    /// Runs fn on the child mapping `key` (empty if absent) and stores its resolved form.
    template <class Fn>
    auto with(const std::string& key, Fn&& fn) {
        used_.insert(key);
        Section child(has(key) ? node_[key] : YAML::Node(YAML::NodeType::Map), path_.empty() ? key : path_ + "." + key);
        auto result = fn(child);
        resolved_[key] = child.finish();
        return result;
    }

    /// Throws on the first key that was never read.
    YAML::Node finish() {
        if (node_.IsMap()) {
            for (const auto& kv : node_) {
                const auto key = kv.first.as<std::string>();
                if (!used_.count(key)) throw ConfigError("unknown key '" + key + "' in " + where(), line_of(kv.first));
            }
        }
        return resolved_;
    }

    [[nodiscard]] std::string where() const { return path_.empty() ? "config" : "section '" + path_ + "'"; }

    [[noreturn]] void fail(const std::string& key, const std::string& what) const {
        throw ConfigError(where() + "." + key + ": " + what, line(key));
    }

private:
    template <class T>
    T convert(const std::string& key) const {
        try {
            return node_[key].as<T>();
        } catch (const YAML::Exception&) {
            throw ConfigError(where() + ": bad value for '" + key + "'", line_of(node_[key]));
        }
    }

    YAML::Node node_;
    std::string path_;
    std::set<std::string> used_;
    YAML::Node resolved_{YAML::NodeType::Map};
};

inline KernelSpec parse_kernel(Section& s) {
    KernelSpec k;
    const auto family = s.require<std::string>("family");
    try {
        k.family = family_from_string(family);
    } catch (const DomainError&) {
        s.fail("family", "invalid kernel name '" + family + "' (expected gaussian, laplace or matern)");
    }
    k.sigma = s.get<double>("sigma", 1.0);
    k.amplitude = s.get<double>("amplitude", 1.0);
    if (k.family == KernelFamily::Matern) k.nu = s.require<double>("nu");
    try {
        k.validate();
    } catch (const DomainError& e) {
        throw ConfigError(s.where() + ": " + e.what(), s.line("sigma"));
    }
    return k;
}

inline KernelSpec kernel_at(Section& s, const std::string& key) {
    if (!s.has(key)) throw ConfigError(s.where() + ": missing required key '" + key + "'", s.line(key));
    return s.with(key, [](Section& c) { return parse_kernel(c); });
}

/// Integer grid given either as a list or as {min, max, per_decade} (log-spaced, rounded,
/// duplicates dropped).
inline std::vector<std::size_t> size_grid(Section& s, const std::string& key) {
    const int line = s.line(key);
    std::vector<std::size_t> g;
    if (!s.has(key)) throw ConfigError(s.where() + ": missing required key '" + key + "'", line);
    bool is_map = false;
    try {
        g = s.require<std::vector<std::size_t>>(key);
    } catch (const ConfigError&) {
        is_map = true;
    }
    if (is_map) {
        g = s.with(key, [&](Section& c) {
            const auto lo = c.require<double>("min");
            const auto hi = c.require<double>("max");
            const auto per = c.get<double>("per_decade", 10.0);
            if (!(lo >= 1.0) || !(hi >= lo) || !(per > 0.0)) throw ConfigError(c.where() + ": need 1 <= min <= max, per_decade > 0", line);
            std::vector<std::size_t> out;
            const double steps = std::floor(per * std::log10(hi / lo) + 1e-9);
            for (double k = 0; k <= steps; ++k) {
                const auto v = static_cast<std::size_t>(std::llround(lo * std::pow(10.0, k / per)));
                if (out.empty() || v > out.back()) out.push_back(v);
            }
            return out;
        });
    }
    if (g.empty()) throw ConfigError(s.where() + ": '" + key + "' is empty", line);
    for (std::size_t i = 1; i < g.size(); ++i)
        if (g[i] <= g[i - 1]) throw ConfigError(s.where() + ": '" + key + "' must be strictly increasing", line);
    return g;
}

inline std::optional<FitWindow> fit_window(Section& s, const std::string& key = "fit_window") {
    const auto w = s.optional<std::vector<double>>(key);
    if (!w) return std::nullopt;
    if (w->size() != 2 || !((*w)[0] > 0.0) || !((*w)[1] > (*w)[0]))
        throw ConfigError(s.where() + ": '" + key + "' must be [lo, hi] with 0 < lo < hi", s.line(key));
    return FitWindow{(*w)[0], (*w)[1]};
}

inline StarSumConfig star_sum_config(Section& s) {
    StarSumConfig c;
    c.truncation = s.get<int>("truncation", c.truncation);
    c.max_truncation = s.get<int>("max_truncation", c.max_truncation);
    c.rel_tol = s.get<double>("rel_tol", c.rel_tol);
    const auto route = s.get<std::string>("route", "auto");
    if (route == "auto") c.route = StarSumRoute::Auto;
    else if (route == "frequency") c.route = StarSumRoute::Frequency;
    else if (route == "real_space") c.route = StarSumRoute::RealSpace;
    else s.fail("route", "expected auto, frequency or real_space");
    if (c.truncation < 1 || c.max_truncation < c.truncation || !(c.rel_tol > 0.0))
        throw ConfigError(s.where() + ": need 1 <= truncation <= max_truncation and rel_tol > 0", s.line("truncation"));
    return c;
}

inline std::filesystem::path existing_path(Section& s, const std::string& key) {
    const std::filesystem::path p = s.require<std::string>(key);
    if (!std::filesystem::exists(p)) s.fail(key, "file not found: " + p.string());
    return p;
}

}  // namespace kcurves::cli

#pragma once

#include <cstdint>
#include <fstream>
#include <functional>
#include <istream>
#include <sstream>
#include <string>
#include <vector>

#include "rate/errors.hpp"
#include "rate/scoring.hpp"
#include "rate/trainer.hpp"

namespace rate {

/// Everything one run needs: model hyperparameters, training loop knobs, and
/// the data/IO settings. Parsed from flat key=value text; unknown keys are
/// rejected so typos fail loudly.
struct RunConfig {
    ModelConfig model;
    TrainingConfig training;
    std::string data_dir = "data";
    std::size_t threads = 1;
    bool allow_unknown = false;  // skip (not reject) valid/test lines with unseen entities
};

namespace detail {

inline bool parse_bool(const std::string& v) {
    if (v == "true" || v == "1") return true;
    if (v == "false" || v == "0") return false;
    throw ParseError("expected boolean, got '" + v + "'");
}

inline double parse_real(const std::string& v) {
    std::size_t used = 0;
    double x = 0.0;
    try {
        x = std::stod(v, &used);
    } catch (const std::exception&) {
        throw ParseError("expected number, got '" + v + "'");
    }
    if (used != v.size()) throw ParseError("trailing characters in number '" + v + "'");
    return x;
}

inline std::uint64_t parse_count(const std::string& v) {
    // stoull wraps negatives silently; reject anything but plain digits.
    if (v.empty() || v.find_first_not_of("0123456789") != std::string::npos)
        throw ParseError("expected non-negative integer, got '" + v + "'");
    try {
        return std::stoull(v);
    } catch (const std::exception&) {
        throw ParseError("expected non-negative integer, got '" + v + "'");
    }
}

inline std::string trim(const std::string& s) {
    std::size_t b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    std::size_t e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

struct ConfigKey {
    const char* name;
    std::function<void(RunConfig&, const std::string&)> set;
    std::function<std::string(const RunConfig&)> get;
};

inline const std::vector<ConfigKey>& config_keys() {
    auto real_str = [](double x) {
        std::ostringstream os;
        os.precision(17);
        os << x;
        return os.str();
    };
    static const std::vector<ConfigKey> keys = {
        {"model", [](RunConfig& c, const std::string& v) { c.model.kind = model_from_name(v); },
         [](const RunConfig& c) { return std::string(model_name(c.model.kind)); }},
        {"dim",
         [](RunConfig& c, const std::string& v) { c.model.dim = static_cast<std::size_t>(parse_count(v)); },
         [](const RunConfig& c) { return std::to_string(c.model.dim); }},
        {"margin", [](RunConfig& c, const std::string& v) { c.model.margin = parse_real(v); },
         [real_str](const RunConfig& c) { return real_str(c.model.margin); }},
        {"seed", [](RunConfig& c, const std::string& v) { c.model.seed = parse_count(v); },
         [](const RunConfig& c) { return std::to_string(c.model.seed); }},
        {"learning_rate",
         [](RunConfig& c, const std::string& v) { c.training.learning_rate = parse_real(v); },
         [real_str](const RunConfig& c) { return real_str(c.training.learning_rate); }},
        {"weight_decay",
         [](RunConfig& c, const std::string& v) { c.training.weight_decay = parse_real(v); },
         [real_str](const RunConfig& c) { return real_str(c.training.weight_decay); }},
        {"negatives",
         [](RunConfig& c, const std::string& v) { c.training.negatives = static_cast<std::size_t>(parse_count(v)); },
         [](const RunConfig& c) { return std::to_string(c.training.negatives); }},
        {"batch_size",
         [](RunConfig& c, const std::string& v) { c.training.batch_size = static_cast<std::size_t>(parse_count(v)); },
         [](const RunConfig& c) { return std::to_string(c.training.batch_size); }},
        {"epochs",
         [](RunConfig& c, const std::string& v) { c.training.epochs = static_cast<std::size_t>(parse_count(v)); },
         [](const RunConfig& c) { return std::to_string(c.training.epochs); }},
        {"max_steps",
         [](RunConfig& c, const std::string& v) { c.training.max_steps = parse_count(v); },
         [](const RunConfig& c) { return std::to_string(c.training.max_steps); }},
        {"relation_adaptive",
         [](RunConfig& c, const std::string& v) { c.training.relation_adaptive = parse_bool(v); },
         [](const RunConfig& c) { return std::string(c.training.relation_adaptive ? "true" : "false"); }},
        {"weighted_product",
         [](RunConfig& c, const std::string& v) { c.training.weighted_product = parse_bool(v); },
         [](const RunConfig& c) { return std::string(c.training.weighted_product ? "true" : "false"); }},
        {"w_l1_reg",
         [](RunConfig& c, const std::string& v) { c.training.w_l1_reg = parse_bool(v); },
         [](const RunConfig& c) { return std::string(c.training.w_l1_reg ? "true" : "false"); }},
        {"local_cognitive_sampling",
         [](RunConfig& c, const std::string& v) { c.training.local_cognitive_sampling = parse_bool(v); },
         [](const RunConfig& c) {
             return std::string(c.training.local_cognitive_sampling ? "true" : "false");
         }},
        {"uniform_beta",
         [](RunConfig& c, const std::string& v) { c.training.uniform_beta = parse_bool(v); },
         [](const RunConfig& c) { return std::string(c.training.uniform_beta ? "true" : "false"); }},
        {"init_gamma",
         [](RunConfig& c, const std::string& v) { c.training.initial_gamma = parse_real(v); },
         [real_str](const RunConfig& c) { return real_str(c.training.initial_gamma); }},
        {"head_corruption_prob",
         [](RunConfig& c, const std::string& v) { c.training.head_corruption_prob = parse_real(v); },
         [real_str](const RunConfig& c) { return real_str(c.training.head_corruption_prob); }},
        {"temperature",
         [](RunConfig& c, const std::string& v) { c.training.temperature = parse_real(v); },
         [real_str](const RunConfig& c) { return real_str(c.training.temperature); }},
        {"w_init_noise",
         [](RunConfig& c, const std::string& v) { c.training.w_init_noise = parse_real(v); },
         [real_str](const RunConfig& c) { return real_str(c.training.w_init_noise); }},
        {"eval_every",
         [](RunConfig& c, const std::string& v) { c.training.eval_every = static_cast<std::size_t>(parse_count(v)); },
         [](const RunConfig& c) { return std::to_string(c.training.eval_every); }},
        {"valid_subsample",
         [](RunConfig& c, const std::string& v) { c.training.valid_subsample = static_cast<std::size_t>(parse_count(v)); },
         [](const RunConfig& c) { return std::to_string(c.training.valid_subsample); }},
        {"checkpoint_every",
         [](RunConfig& c, const std::string& v) { c.training.checkpoint_every = static_cast<std::size_t>(parse_count(v)); },
         [](const RunConfig& c) { return std::to_string(c.training.checkpoint_every); }},
        {"data_dir", [](RunConfig& c, const std::string& v) { c.data_dir = v; },
         [](const RunConfig& c) { return c.data_dir; }},
        {"threads",
         [](RunConfig& c, const std::string& v) { c.threads = static_cast<std::size_t>(parse_count(v)); },
         [](const RunConfig& c) { return std::to_string(c.threads); }},
        {"allow_unknown",
         [](RunConfig& c, const std::string& v) { c.allow_unknown = parse_bool(v); },
         [](const RunConfig& c) { return std::string(c.allow_unknown ? "true" : "false"); }},
    };
    return keys;
}

}  // namespace detail

/// Applies one key=value setting; the same path serves config files and
/// command-line overrides.
inline void apply_setting(RunConfig& config, const std::string& key, const std::string& value) {
    for (const auto& k : detail::config_keys()) {
        if (key == k.name) {
            k.set(config, value);
            return;
        }
    }
    throw ParseError("unknown config key '" + key + "'");
}

/// key=value per line, '#' starts a comment, blank lines ignored.
inline RunConfig parse_run_config(std::istream& in, RunConfig base = {}) {
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const std::size_t hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = detail::trim(line);
        if (line.empty()) continue;
        const std::size_t eq = line.find('=');
        if (eq == std::string::npos) throw ParseError("missing '=' in config line", lineno);
        const std::string key = detail::trim(line.substr(0, eq));
        const std::string value = detail::trim(line.substr(eq + 1));
        if (key.empty()) throw ParseError("empty config key", lineno);
        try {
            apply_setting(base, key, value);
        } catch (const ParseError& e) {
            throw ParseError(std::string(e.what()) + " (config line " + std::to_string(lineno) +
                             ")");
        }
    }
    return base;
}

inline RunConfig load_run_config(const std::string& path, RunConfig base = {}) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open config file: " + path);
    return parse_run_config(in, std::move(base));
}

/// Canonical text form: every key, declaration order. Feeding the dump back
/// through the parser reproduces the config exactly.
inline std::string dump_run_config(const RunConfig& config) {
    std::string out;
    for (const auto& k : detail::config_keys()) {
        out += k.name;
        out += " = ";
        out += k.get(config);
        out += "\n";
    }
    return out;
}

}  // namespace rate

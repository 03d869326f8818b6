#include "aqucb/config.hpp"

#include <cerrno>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "aqucb/text.hpp"

namespace aqucb {

namespace {

long long to_int(const std::string& value, const std::string& where) {
    char* end = nullptr;
    errno = 0;
    const long long v = std::strtoll(value.c_str(), &end, 10);
    if (errno != 0 || end == value.c_str() || *end != '\0')
        throw ConfigError(where + ": expected an integer, got '" + value + "'");
    return v;
}

double to_double(const std::string& value, const std::string& where) {
    char* end = nullptr;
    errno = 0;
    const double v = std::strtod(value.c_str(), &end);
    if (errno != 0 || end == value.c_str() || *end != '\0')
        throw ConfigError(where + ": expected a number, got '" + value + "'");
    return v;
}

}  // namespace

FlatConfig FlatConfig::parse_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file '" + path + "'");
    std::stringstream buffer;
    buffer << in.rdbuf();
    return parse_string(buffer.str(), path);
}

FlatConfig FlatConfig::parse_string(const std::string& text, const std::string& origin) {
    FlatConfig cfg;
    std::string section;
    std::size_t line_no = 0;
    for (const auto& raw : split(text, '\n')) {
        ++line_no;
        std::string_view line = trim(raw);
        if (line.empty() || line.front() == '#' || line.front() == ';') continue;
        const auto where = origin + ":" + std::to_string(line_no);
        if (line.front() == '[') {
            if (line.back() != ']' || line.size() < 3)
                throw ConfigError(where + ": malformed section header '" + std::string(line) + "'");
            section = std::string(trim(line.substr(1, line.size() - 2)));
            if (section.empty()) throw ConfigError(where + ": empty section name");
            cfg.sections_[section];
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string_view::npos)
            throw ConfigError(where + ": expected 'key = value', got '" + std::string(line) + "'");
        const std::string key{trim(line.substr(0, eq))};
        const std::string value{trim(line.substr(eq + 1))};
        if (key.empty()) throw ConfigError(where + ": empty key");
        if (section.empty())
            throw ConfigError(where + ": key '" + key + "' appears before any [section]");
        cfg.sections_[section][key] = value;
    }
    return cfg;
}

bool FlatConfig::has(const std::string& section, const std::string& key) const {
    const auto it = sections_.find(section);
    return it != sections_.end() && it->second.count(key) > 0;
}

std::string FlatConfig::get(const std::string& section, const std::string& key) const {
    const auto it = sections_.find(section);
    if (it == sections_.end() || !it->second.count(key))
        throw ConfigError("missing config field [" + section + "] " + key);
    return it->second.at(key);
}

std::string FlatConfig::get_or(const std::string& section, const std::string& key,
                               const std::string& fallback) const {
    return has(section, key) ? get(section, key) : fallback;
}

long long FlatConfig::get_int(const std::string& section, const std::string& key) const {
    return to_int(get(section, key), "[" + section + "] " + key);
}

long long FlatConfig::get_int_or(const std::string& section, const std::string& key,
                                 long long fallback) const {
    return has(section, key) ? get_int(section, key) : fallback;
}

double FlatConfig::get_double(const std::string& section, const std::string& key) const {
    return to_double(get(section, key), "[" + section + "] " + key);
}

double FlatConfig::get_double_or(const std::string& section, const std::string& key,
                                 double fallback) const {
    return has(section, key) ? get_double(section, key) : fallback;
}

void FlatConfig::set(const std::string& section, const std::string& key,
                     const std::string& value) {
    sections_[section][key] = value;
}

void FlatConfig::apply_override(const std::string& assignment) {
    const auto eq = assignment.find('=');
    if (eq == std::string::npos)
        throw ConfigError("override '" + assignment + "' is not of the form section.key=value");
    const std::string path{trim(assignment.substr(0, eq))};
    const std::string value{trim(assignment.substr(eq + 1))};
    const auto dot = path.find('.');
    if (dot == std::string::npos || dot == 0 || dot + 1 == path.size())
        throw ConfigError("override '" + assignment + "' is not of the form section.key=value");
    set(path.substr(0, dot), path.substr(dot + 1), value);
}

std::string FlatConfig::serialize() const {
    std::string out;
    bool first = true;
    for (const auto& [section, entries] : sections_) {
        if (!first) out += "\n";
        first = false;
        out += "[" + section + "]\n";
        for (const auto& [key, value] : entries) out += key + " = " + value + "\n";
    }
    return out;
}

nlohmann::ordered_json FlatConfig::to_json() const {
    nlohmann::ordered_json j = nlohmann::ordered_json::object();
    for (const auto& [section, entries] : sections_) {
        nlohmann::ordered_json s = nlohmann::ordered_json::object();
        for (const auto& [key, value] : entries) s[key] = value;
        j[section] = std::move(s);
    }
    return j;
}

std::vector<std::uint64_t> parse_seed_list(const std::string& text) {
    std::vector<std::uint64_t> seeds;
    for (const auto& piece : split(text, ',')) {
        const std::string item{trim(piece)};
        if (item.empty()) throw ConfigError("empty entry in seed list '" + text + "'");
        const auto range = item.find("..");
        if (range == std::string::npos) {
            seeds.push_back(static_cast<std::uint64_t>(to_int(item, "seed list")));
            continue;
        }
        const long long lo = to_int(item.substr(0, range), "seed range start");
        const long long hi = to_int(item.substr(range + 2), "seed range end");
        if (lo > hi) throw ConfigError("seed range '" + item + "' is decreasing");
        for (long long s = lo; s <= hi; ++s) seeds.push_back(static_cast<std::uint64_t>(s));
    }
    if (seeds.empty()) throw ConfigError("seed list '" + text + "' is empty");
    return seeds;
}

ExperimentConfig ExperimentConfig::from_flat(const FlatConfig& flat) {
    ExperimentConfig cfg;

    cfg.generator = flat.get("environment", "generator");
    if (cfg.generator == "chain") {
        cfg.horizon = static_cast<int>(flat.get_int("environment", "horizon"));
        cfg.chain_length = static_cast<int>(flat.get_int("environment", "length"));
        cfg.chain_slip = flat.get_double_or("environment", "slip", 0.0);
    } else if (cfg.generator == "random") {
        cfg.horizon = static_cast<int>(flat.get_int("environment", "horizon"));
        cfg.env_states = static_cast<int>(flat.get_int("environment", "states"));
        cfg.env_actions = static_cast<int>(flat.get_int("environment", "actions"));
        cfg.env_sparsity = flat.get_double_or("environment", "sparsity", 0.0);
        cfg.env_seed = static_cast<std::uint64_t>(flat.get_int_or("environment", "seed", 1));
        cfg.reward_lo = flat.get_double_or("environment", "reward_lo", 0.0);
        cfg.reward_hi = flat.get_double_or("environment", "reward_hi", 1.0);
    } else if (cfg.generator == "duplication") {
        cfg.horizon = static_cast<int>(flat.get_int("environment", "horizon"));
        cfg.dup_latent_states = static_cast<int>(flat.get_int("environment", "latent_states"));
        cfg.dup_actions = static_cast<int>(flat.get_int("environment", "actions"));
        cfg.dup_sparsity = flat.get_double_or("environment", "sparsity", 0.0);
        cfg.dup_base_seed = static_cast<std::uint64_t>(flat.get_int_or("environment", "base_seed", 1));
        cfg.dup_copies = static_cast<int>(flat.get_int("environment", "copies"));
        cfg.dup_perturbation = flat.get_double_or("environment", "perturbation", 0.0);
        cfg.dup_seed = static_cast<std::uint64_t>(flat.get_int_or("environment", "seed", 1));
        cfg.reward_lo = flat.get_double_or("environment", "reward_lo", 0.0);
        cfg.reward_hi = flat.get_double_or("environment", "reward_hi", 1.0);
    } else if (cfg.generator == "file") {
        cfg.mdp_path = flat.get("environment", "mdp_path");
    } else {
        throw ConfigError("[environment] generator '" + cfg.generator + "' is not one of " +
                          "chain | random | duplication | file");
    }

    cfg.aggregation_kind = flat.get_or("aggregation", "kind",
                                       cfg.generator == "duplication" ? "instance" : "trivial");
    if (cfg.aggregation_kind == "file") {
        cfg.aggregation_path = flat.get("aggregation", "path");
    } else if (cfg.aggregation_kind == "instance") {
        if (cfg.generator != "duplication")
            throw ConfigError("[aggregation] kind = instance requires the duplication generator");
    } else if (cfg.aggregation_kind != "trivial") {
        throw ConfigError("[aggregation] kind '" + cfg.aggregation_kind + "' is not one of " +
                          "trivial | instance | file");
    }

    cfg.algorithm = flat.get_or("agent", "algorithm", "aqucb");
    if (cfg.algorithm != "aqucb" && cfg.algorithm != "sarsa")
        throw ConfigError("[agent] algorithm '" + cfg.algorithm + "' is not one of aqucb | sarsa");
    cfg.episodes = flat.get_int("agent", "episodes");
    if (cfg.episodes < 1) throw ConfigError("[agent] episodes must be >= 1");
    cfg.delta = flat.get_double_or("agent", "delta", 0.1);
    if (!(cfg.delta > 0.0 && cfg.delta < 1.0))
        throw ConfigError("[agent] delta must lie in (0, 1)");
    cfg.epsilon = flat.get_or("agent", "epsilon", "auto");
    if (cfg.epsilon != "auto") {
        const double e = to_double(cfg.epsilon, "[agent] epsilon");
        if (e < 0.0) throw ConfigError("[agent] epsilon must be >= 0 or 'auto'");
    }

    cfg.seeds = parse_seed_list(flat.get("harness", "seeds"));
    const std::string stride = flat.get_or("harness", "stride", "auto");
    cfg.stride = stride == "auto" ? 0 : to_int(stride, "[harness] stride");
    if (stride != "auto" && cfg.stride < 1)
        throw ConfigError("[harness] stride must be >= 1 or 'auto'");
    cfg.eval_budget = flat.get_int_or("harness", "eval_budget", cfg.eval_budget);

    cfg.out_dir = flat.get_or("output", "dir", "out");
    return cfg;
}

FlatConfig ExperimentConfig::to_flat() const {
    FlatConfig flat;
    flat.set("environment", "generator", generator);
    if (generator == "chain") {
        flat.set("environment", "horizon", std::to_string(horizon));
        flat.set("environment", "length", std::to_string(chain_length));
        flat.set("environment", "slip", format_double(chain_slip));
    } else if (generator == "random") {
        flat.set("environment", "horizon", std::to_string(horizon));
        flat.set("environment", "states", std::to_string(env_states));
        flat.set("environment", "actions", std::to_string(env_actions));
        flat.set("environment", "sparsity", format_double(env_sparsity));
        flat.set("environment", "seed", std::to_string(env_seed));
        flat.set("environment", "reward_lo", format_double(reward_lo));
        flat.set("environment", "reward_hi", format_double(reward_hi));
    } else if (generator == "duplication") {
        flat.set("environment", "horizon", std::to_string(horizon));
        flat.set("environment", "latent_states", std::to_string(dup_latent_states));
        flat.set("environment", "actions", std::to_string(dup_actions));
        flat.set("environment", "sparsity", format_double(dup_sparsity));
        flat.set("environment", "base_seed", std::to_string(dup_base_seed));
        flat.set("environment", "copies", std::to_string(dup_copies));
        flat.set("environment", "perturbation", format_double(dup_perturbation));
        flat.set("environment", "seed", std::to_string(dup_seed));
        flat.set("environment", "reward_lo", format_double(reward_lo));
        flat.set("environment", "reward_hi", format_double(reward_hi));
    } else {
        flat.set("environment", "mdp_path", mdp_path);
    }

    flat.set("aggregation", "kind", aggregation_kind);
    if (aggregation_kind == "file") flat.set("aggregation", "path", aggregation_path);

    flat.set("agent", "algorithm", algorithm);
    flat.set("agent", "episodes", std::to_string(episodes));
    flat.set("agent", "delta", format_double(delta));
    flat.set("agent", "epsilon", epsilon);

    std::string seed_list;
    for (std::size_t i = 0; i < seeds.size(); ++i) {
        if (i) seed_list += ",";
        seed_list += std::to_string(seeds[i]);
    }
    flat.set("harness", "seeds", seed_list);
    flat.set("harness", "stride", stride == 0 ? "auto" : std::to_string(stride));
    flat.set("harness", "eval_budget", std::to_string(eval_budget));

    flat.set("output", "dir", out_dir);
    return flat;
}

}  // namespace aqucb

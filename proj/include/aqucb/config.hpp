#pragma once

#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"

namespace aqucb {

/// Raised for anything wrong with user-supplied configuration; the CLI maps it
/// to exit code 2.
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Flat INI-style configuration: [section] headers over key = value lines.
/// '#' and ';' start comments. Serialization is canonical (sections and keys
/// sorted), so identical configurations produce identical bytes.
class FlatConfig {
public:
    static FlatConfig parse_file(const std::string& path);
    static FlatConfig parse_string(const std::string& text,
                                   const std::string& origin = "<string>");

    bool has(const std::string& section, const std::string& key) const;
    /// Throws ConfigError naming the missing section/key.
    std::string get(const std::string& section, const std::string& key) const;
    std::string get_or(const std::string& section, const std::string& key,
                       const std::string& fallback) const;

    long long get_int(const std::string& section, const std::string& key) const;
    long long get_int_or(const std::string& section, const std::string& key,
                         long long fallback) const;
    double get_double(const std::string& section, const std::string& key) const;
    double get_double_or(const std::string& section, const std::string& key,
                         double fallback) const;

    void set(const std::string& section, const std::string& key, const std::string& value);
    /// Applies a "section.key=value" assignment; throws ConfigError otherwise.
    void apply_override(const std::string& assignment);

    std::string serialize() const;
    nlohmann::ordered_json to_json() const;

    const std::map<std::string, std::map<std::string, std::string>>& sections() const {
        return sections_;
    }

private:
    std::map<std::string, std::map<std::string, std::string>> sections_;
};

/// "1,2,3" lists with "a..b" inclusive ranges, e.g. "1..5,10".
std::vector<std::uint64_t> parse_seed_list(const std::string& text);

/// Typed, validated experiment description.
struct ExperimentConfig {
    // [environment]
    std::string generator = "chain";  // chain | random | duplication | file
    int horizon = 8;
    int chain_length = 6;
    double chain_slip = 0.1;
    int env_states = 4;
    int env_actions = 2;
    double env_sparsity = 0.0;
    std::uint64_t env_seed = 1;
    int dup_latent_states = 4;
    int dup_actions = 2;
    double dup_sparsity = 0.0;
    std::uint64_t dup_base_seed = 1;
    int dup_copies = 3;
    double dup_perturbation = 0.0;
    std::uint64_t dup_seed = 1;
    double reward_lo = 0.0;
    double reward_hi = 1.0;
    std::string mdp_path;

    // [aggregation]
    std::string aggregation_kind = "trivial";  // trivial | instance | file
    std::string aggregation_path;

    // [agent]
    std::string algorithm = "aqucb";  // aqucb | sarsa
    long long episodes = 1000;
    double delta = 0.1;
    std::string epsilon = "auto";  // "auto" or a number

    // [harness]
    std::vector<std::uint64_t> seeds = {1};
    long long stride = 0;  // 0 = auto: 1 for K <= 10^4, else 10
    long long eval_budget = 100'000'000;

    // [output]
    std::string out_dir = "out";

    static ExperimentConfig from_flat(const FlatConfig& flat);
    FlatConfig to_flat() const;
};

}  // namespace aqucb

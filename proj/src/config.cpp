#include "safeaci/config.hpp"

#include <cctype>
#include <cstdlib>
#include <fstream>
#include <vector>

#include "safeaci/errors.hpp"

namespace safeaci {

namespace {

enum class Kind { Real, Int, UInt, Boolean, List, Text };

struct KeySpec {
    const char* key;
    Kind kind;
    const char* def;
    const char* allowed;  // comma-separated choices for Text keys, or null
};

// The single source of defaults. Everything the simulator reads is here.
const std::vector<KeySpec>& schema() {
    static const std::vector<KeySpec> s = {
        {"plant.p1", Kind::Real, "3.473", nullptr},
        {"plant.p2", Kind::Real, "0.196", nullptr},
        {"plant.p3", Kind::Real, "0.242", nullptr},
        {"plant.fd1", Kind::Real, "5.3", nullptr},
        {"plant.fd2", Kind::Real, "1.1", nullptr},
        {"barrier.a", Kind::List, "5,5,5,5", nullptr},
        {"barrier.gamma", Kind::Real, "5", nullptr},
        {"cost.R", Kind::Text, "identity", nullptr},
        {"critic.p", Kind::Int, "30", nullptr},
        {"critic.inner_scale", Kind::Real, "1", nullptr},
        {"safety.lambda", Kind::Real, "100", nullptr},
        {"learner.eta_c", Kind::Real, "2", nullptr},
        {"learner.eta_a1", Kind::Real, "1", nullptr},
        {"learner.eta_a2", Kind::Real, "50", nullptr},
        {"learner.nu", Kind::Real, "5", nullptr},
        {"learner.beta", Kind::Real, "0.001", nullptr},
        {"learner.W_bar", Kind::Real, "0", nullptr},  // 0 = auto 3 sqrt(p)
        {"learner.proj_eps", Kind::Real, "0.1", nullptr},
        {"learner.gamma_max", Kind::Real, "0", nullptr},  // 0 = off
        {"identifier.l", Kind::Int, "5", nullptr},
        {"identifier.k", Kind::Real, "10", nullptr},
        {"identifier.gamma_wf", Kind::Real, "10", nullptr},
        {"identifier.gamma_vf", Kind::Real, "10", nullptr},
        {"identifier.wf_bar", Kind::Real, "10", nullptr},
        {"identifier.vf_bar", Kind::Real, "10", nullptr},
        {"identifier.proj_eps", Kind::Real, "0.1", nullptr},
        {"episode.dt", Kind::Real, "0.001", nullptr},
        {"episode.T", Kind::Real, "60", nullptr},
        {"episode.seed", Kind::UInt, "0", nullptr},
        {"episode.x0", Kind::List, "2,-2,0,0", nullptr},
        {"episode.mode", Kind::Text, "safe", "safe,baseline_aci"},
        {"episode.weight_init", Kind::List, "-1,1", nullptr},
        {"episode.gamma0", Kind::Real, "1", nullptr},
        {"episode.decimate", Kind::Int, "1", nullptr},
        {"episode.stop_on_violation", Kind::Boolean, "true", nullptr},
        {"episode.sample_hold", Kind::Boolean, "false", nullptr},
        {"excitation.enabled", Kind::Boolean, "false", nullptr},
        {"excitation.amplitude", Kind::Real, "0.5", nullptr},
        {"excitation.frequencies", Kind::List, "1,3.3,7.7", nullptr},
        {"harness.pe_window", Kind::Real, "5", nullptr},
        {"harness.norm_ceiling", Kind::Real, "1e6", nullptr},
        {"harness.perfect_model", Kind::Boolean, "false", nullptr},
        {"compare.baseline_T", Kind::Real, "0", nullptr},  // 0 = episode.T
        {"verify.samples", Kind::Int, "100000", nullptr},
        {"sweep.seeds", Kind::Int, "50", nullptr},
    };
    return s;
}

const KeySpec* find_spec(const std::string& key) {
    for (const KeySpec& s : schema())
        if (key == s.key) return &s;
    return nullptr;
}

std::string trim(const std::string& s) {
    std::size_t b = 0, e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return s.substr(b, e - b);
}

double parse_double(const std::string& key, const std::string& v) {
    const char* c = v.c_str();
    char* end = nullptr;
    const double d = std::strtod(c, &end);
    if (end == c || *end != '\0')
        throw ConfigError("config key '" + key + "': '" + v + "' is not a number");
    return d;
}

long long parse_int(const std::string& key, const std::string& v) {
    const char* c = v.c_str();
    char* end = nullptr;
    const long long d = std::strtoll(c, &end, 10);
    if (end == c || *end != '\0')
        throw ConfigError("config key '" + key + "': '" + v + "' is not an integer");
    return d;
}

std::uint64_t parse_u64(const std::string& key, const std::string& v) {
    const char* c = v.c_str();
    char* end = nullptr;
    const unsigned long long d = std::strtoull(c, &end, 10);
    if (end == c || *end != '\0' || v.find('-') != std::string::npos)
        throw ConfigError("config key '" + key + "': '" + v +
                          "' is not an unsigned integer");
    return d;
}

bool parse_bool(const std::string& key, const std::string& v) {
    if (v == "true" || v == "1") return true;
    if (v == "false" || v == "0") return false;
    throw ConfigError("config key '" + key + "': '" + v +
                      "' is not a boolean (true/false)");
}

Vec parse_list(const std::string& key, const std::string& v) {
    Vec out;
    std::size_t pos = 0;
    while (pos <= v.size()) {
        std::size_t comma = v.find(',', pos);
        if (comma == std::string::npos) comma = v.size();
        const std::string item = trim(v.substr(pos, comma - pos));
        if (item.empty())
            throw ConfigError("config key '" + key + "': empty list element");
        out.push_back(parse_double(key, item));
        pos = comma + 1;
    }
    return out;
}

void validate_value(const KeySpec& spec, const std::string& v) {
    switch (spec.kind) {
        case Kind::Real:
            parse_double(spec.key, v);
            break;
        case Kind::Int:
            parse_int(spec.key, v);
            break;
        case Kind::UInt:
            parse_u64(spec.key, v);
            break;
        case Kind::Boolean:
            parse_bool(spec.key, v);
            break;
        case Kind::List:
            parse_list(spec.key, v);
            break;
        case Kind::Text:
            if (spec.allowed) {
                const std::string allowed = spec.allowed;
                std::size_t pos = 0;
                bool ok = false;
                while (pos <= allowed.size()) {
                    std::size_t comma = allowed.find(',', pos);
                    if (comma == std::string::npos) comma = allowed.size();
                    if (allowed.substr(pos, comma - pos) == v) {
                        ok = true;
                        break;
                    }
                    pos = comma + 1;
                }
                if (!ok)
                    throw ConfigError("config key '" + std::string(spec.key) +
                                      "': '" + v + "' is not one of {" + allowed +
                                      "}");
            }
            break;
    }
}

}  // namespace

Config Config::defaults() {
    Config c;
    for (const KeySpec& s : schema()) c.kv_[s.key] = s.def;
    return c;
}

Config Config::load(const std::string& path) {
    Config c = defaults();
    c.apply_file(path);
    return c;
}

void Config::apply_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file '" + path + "'");
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const std::size_t hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        const std::size_t eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError(path + ":" + std::to_string(lineno) +
                              ": expected 'key = value'");
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key.rfind("manifest.", 0) == 0) continue;  // run metadata
        set(key, value);
    }
}

void Config::apply_env() {
    for (const KeySpec& s : schema()) {
        std::string name = "SAFEACI_";
        for (const char* c = s.key; *c; ++c)
            name += *c == '.' ? '_' : static_cast<char>(std::toupper(
                                          static_cast<unsigned char>(*c)));
        if (const char* v = std::getenv(name.c_str())) set(s.key, v);
    }
}

void Config::set(const std::string& key, const std::string& value) {
    if (key.rfind("manifest.", 0) == 0)
        throw ConfigError("'" + key + "': manifest.* keys are run metadata, not settings");
    const KeySpec* spec = find_spec(key);
    if (!spec) throw ConfigError("unknown config key '" + key + "'");
    validate_value(*spec, value);
    kv_[key] = value;
}

bool Config::has(const std::string& key) const { return kv_.count(key) != 0; }

const std::string& Config::get_str(const std::string& key) const {
    auto it = kv_.find(key);
    if (it == kv_.end()) throw ConfigError("unknown config key '" + key + "'");
    return it->second;
}

double Config::get_double(const std::string& key) const {
    return parse_double(key, get_str(key));
}

long long Config::get_int(const std::string& key) const {
    return parse_int(key, get_str(key));
}

std::uint64_t Config::get_u64(const std::string& key) const {
    return parse_u64(key, get_str(key));
}

bool Config::get_bool(const std::string& key) const {
    return parse_bool(key, get_str(key));
}

Vec Config::get_list(const std::string& key) const {
    return parse_list(key, get_str(key));
}

}  // namespace safeaci

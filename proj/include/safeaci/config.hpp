#ifndef SAFEACI_CONFIG_HPP
#define SAFEACI_CONFIG_HPP

#include <cstdint>
#include <map>
#include <string>

#include "safeaci/linalg.hpp"

// Flat dotted-key configuration ("section.key = value" lines, # comments).
// Every key has a centrally declared default; unknown keys are errors that
// name the key. Values are kept as strings and parsed by the typed getters,
// so a resolved snapshot can be echoed verbatim into a run manifest and fed
// back in as a config file. Keys under "manifest." are reserved for run
// metadata: they are skipped when loading files and rejected by set().

namespace safeaci {

class Config {
  public:
    // All keys at their defaults.
    static Config defaults();
    // Defaults overlaid with a config file.
    static Config load(const std::string& path);

    void apply_file(const std::string& path);
    // Environment overrides: key a.b_c maps to SAFEACI_A_B_C.
    void apply_env();
    void set(const std::string& key, const std::string& value);

    bool has(const std::string& key) const;
    double get_double(const std::string& key) const;
    long long get_int(const std::string& key) const;
    std::uint64_t get_u64(const std::string& key) const;
    bool get_bool(const std::string& key) const;
    Vec get_list(const std::string& key) const;
    const std::string& get_str(const std::string& key) const;

    // Resolved snapshot, sorted by key.
    const std::map<std::string, std::string>& entries() const { return kv_; }

  private:
    std::map<std::string, std::string> kv_;
};

}  // namespace safeaci

#endif

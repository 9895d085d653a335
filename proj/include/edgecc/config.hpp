#ifndef EDGECC_CONFIG_HPP
#define EDGECC_CONFIG_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "edgecc/cce.hpp"
#include "edgecc/meetsim.hpp"

namespace edgecc::config {

/// One problem found while parsing or validating a config. line == 0 marks
/// file-level problems (e.g. a required key that never appeared).
struct ConfigError {
    int line = 0;
    std::string key;
    std::string message;

    std::string to_string() const;
};

/// Full experiment description, the one schema every workflow shares.
/// Defaults follow the values documented in the README; required keys are
/// population.n_mn, population.r0, population.h0, meeting.m_lambda and
/// deadlines.ttls.
struct ScenarioConfig {
    // [population]
    double n_mn = 0.0;
    double r0 = 0.0;
    std::vector<double> h0_values; ///< holder-count axis of the experiment

    // [meeting]
    double m_lambda = 0.0;
    meetsim::RateDist rate_dist = meetsim::RateDist::deterministic;
    std::optional<double> gamma_shape; ///< required iff rate_dist == gamma
    meetsim::Mode mode = meetsim::Mode::epidemic;

    // [deadlines]
    std::vector<double> ttls_s;

    // [sim]
    double horizon_s = 3600.0;
    std::optional<int> replications; ///< required by simulate/validate
    std::optional<std::uint64_t> seed;
    std::optional<std::string> trace_out;

    // [analytic]
    double t_max_s = 3600.0;
    double t_step_s = 60.0;

    // [cce]
    double theta_high = 0.9;
    double theta_low = 0.7;
    double drain_headroom = 0.8;
    double guard_s = 0.0;
    std::optional<double> buffer_bits; ///< absent = unbounded
    double capacity_bps = 1e7;
    double dt_ttl_s = 600.0;

    // [load]
    std::string profile = "peak-hour"; ///< peak-hour | zero-dt | all-dt | custom
    std::vector<cce::LoadSegment> segments;    ///< custom profile only
    std::vector<double> dt_schedule_s;         ///< custom: arrival times
    double dt_size_bits = 0.0;                 ///< custom: per-arrival size

    bool operator==(const ScenarioConfig&) const = default;
};

struct ParseResult {
    std::optional<ScenarioConfig> config;
    std::vector<ConfigError> errors;

    bool ok() const { return config.has_value() && errors.empty(); }
};

/// Parses the line-oriented `key = value` format with `[section]` headers
/// and `#` comments. Unknown sections, unknown keys, duplicates, malformed
/// values and semantic violations (hysteresis order, missing required keys,
/// non-contiguous custom segments, ...) are all collected; nothing is
/// guessed or silently defaulted for a typo.
ParseResult parse_config(std::string_view text);

/// parse_config over the contents of `path`; unreadable files produce a
/// single file-level error.
ParseResult load_config(const std::string& path);

/// Canonical text form: every field written explicitly, sections and keys
/// in schema order, doubles at full precision. parse(serialize(c)) == c.
std::string serialize_config(const ScenarioConfig& config);

/// Builds the CCE load profile a config refers to (a canned name or the
/// custom segments/schedule). Throws InvalidParams for unknown names.
cce::LoadProfile profile_from_config(const ScenarioConfig& config);

/// The engine knobs of a config, bundled for cce::run_scenario.
cce::CceConfig cce_config_from(const ScenarioConfig& config);

} // namespace edgecc::config

#endif // EDGECC_CONFIG_HPP

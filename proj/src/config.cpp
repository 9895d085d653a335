#include "edgecc/config.hpp"

#include <cctype>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

#include "edgecc/csv.hpp"
#include "edgecc/errors.hpp"

namespace edgecc::config {

namespace {

std::string_view trim(std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    return s;
}

bool parse_double(std::string_view text, double& out) {
    const std::string buf(trim(text));
    if (buf.empty()) return false;
    char* end = nullptr;
    out = std::strtod(buf.c_str(), &end);
    return end == buf.c_str() + buf.size() && std::isfinite(out);
}

bool parse_u64(std::string_view text, std::uint64_t& out) {
    const std::string buf(trim(text));
    if (buf.empty() || buf.front() == '-' || buf.front() == '+') return false;
    char* end = nullptr;
    out = std::strtoull(buf.c_str(), &end, 10);
    return end == buf.c_str() + buf.size();
}

bool parse_int(std::string_view text, int& out) {
    const std::string buf(trim(text));
    if (buf.empty()) return false;
    char* end = nullptr;
    const long v = std::strtol(buf.c_str(), &end, 10);
    if (end != buf.c_str() + buf.size()) return false;
    out = static_cast<int>(v);
    return static_cast<long>(out) == v;
}

std::vector<std::string_view> split(std::string_view text, char sep) {
    std::vector<std::string_view> parts;
    std::size_t start = 0;
    while (start <= text.size()) {
        const std::size_t pos = text.find(sep, start);
        if (pos == std::string_view::npos) {
            parts.push_back(trim(text.substr(start)));
            break;
        }
        parts.push_back(trim(text.substr(start, pos - start)));
        start = pos + 1;
    }
    return parts;
}

bool parse_double_list(std::string_view text, std::vector<double>& out) {
    out.clear();
    for (std::string_view part : split(text, ',')) {
        double v;
        if (!parse_double(part, v)) return false;
        out.push_back(v);
    }
    return !out.empty();
}

// "start:end:rate" triples, comma separated.
bool parse_segments(std::string_view text, std::vector<cce::LoadSegment>& out) {
    out.clear();
    for (std::string_view part : split(text, ',')) {
        const auto fields = split(part, ':');
        if (fields.size() != 3) return false;
        cce::LoadSegment seg;
        if (!parse_double(fields[0], seg.t_start_s) || !parse_double(fields[1], seg.t_end_s) ||
            !parse_double(fields[2], seg.rate_bps)) {
            return false;
        }
        out.push_back(seg);
    }
    return !out.empty();
}

struct Parser {
    ScenarioConfig cfg;
    std::vector<ConfigError> errors;
    std::map<std::string, int> seen; ///< section.key -> first line

    void fail(int line, const std::string& key, const std::string& message) {
        errors.push_back(ConfigError{line, key, message});
    }

    bool mark_seen(int line, const std::string& full_key) {
        const auto [it, inserted] = seen.emplace(full_key, line);
        if (!inserted) {
            fail(line, full_key, "duplicate key (first set on line " +
                                     std::to_string(it->second) + ")");
            return false;
        }
        return true;
    }

    int line_of(const std::string& full_key) const {
        const auto it = seen.find(full_key);
        return it == seen.end() ? 0 : it->second;
    }

    bool has(const std::string& full_key) const { return seen.count(full_key) > 0; }
};

using Handler = std::function<void(Parser&, int line, std::string_view value)>;

void number_key(Parser& p, int line, const std::string& key, std::string_view value,
                double& target) {
    if (!parse_double(value, target)) {
        p.fail(line, key, "expected a finite number, got '" + std::string(value) + "'");
    }
}

const std::map<std::string, Handler>& handlers() {
    static const std::map<std::string, Handler> table = {
        {"population.n_mn",
         [](Parser& p, int line, std::string_view v) {
             number_key(p, line, "population.n_mn", v, p.cfg.n_mn);
         }},
        {"population.r0",
         [](Parser& p, int line, std::string_view v) {
             number_key(p, line, "population.r0", v, p.cfg.r0);
         }},
        {"population.h0",
         [](Parser& p, int line, std::string_view v) {
             if (!parse_double_list(v, p.cfg.h0_values)) {
                 p.fail(line, "population.h0", "expected a comma-separated list of numbers");
             }
         }},
        {"meeting.m_lambda",
         [](Parser& p, int line, std::string_view v) {
             number_key(p, line, "meeting.m_lambda", v, p.cfg.m_lambda);
         }},
        {"meeting.rate_dist",
         [](Parser& p, int line, std::string_view v) {
             if (v == "deterministic") {
                 p.cfg.rate_dist = meetsim::RateDist::deterministic;
             } else if (v == "exponential") {
                 p.cfg.rate_dist = meetsim::RateDist::exponential;
             } else if (v == "gamma") {
                 p.cfg.rate_dist = meetsim::RateDist::gamma;
             } else {
                 p.fail(line, "meeting.rate_dist",
                        "expected deterministic|exponential|gamma, got '" + std::string(v) + "'");
             }
         }},
        {"meeting.gamma_shape",
         [](Parser& p, int line, std::string_view v) {
             double shape;
             if (!parse_double(v, shape)) {
                 p.fail(line, "meeting.gamma_shape", "expected a finite number");
             } else {
                 p.cfg.gamma_shape = shape;
             }
         }},
        {"meeting.mode",
         [](Parser& p, int line, std::string_view v) {
             if (v == "epidemic") {
                 p.cfg.mode = meetsim::Mode::epidemic;
             } else if (v == "fixed-holders") {
                 p.cfg.mode = meetsim::Mode::fixed_holders;
             } else {
                 p.fail(line, "meeting.mode",
                        "expected epidemic|fixed-holders, got '" + std::string(v) + "'");
             }
         }},
        {"deadlines.ttls",
         [](Parser& p, int line, std::string_view v) {
             if (!parse_double_list(v, p.cfg.ttls_s)) {
                 p.fail(line, "deadlines.ttls", "expected a comma-separated list of numbers");
             }
         }},
        {"sim.horizon_s",
         [](Parser& p, int line, std::string_view v) {
             number_key(p, line, "sim.horizon_s", v, p.cfg.horizon_s);
         }},
        {"sim.replications",
         [](Parser& p, int line, std::string_view v) {
             int n;
             if (!parse_int(v, n)) {
                 p.fail(line, "sim.replications", "expected an integer");
             } else {
                 p.cfg.replications = n;
             }
         }},
        {"sim.seed",
         [](Parser& p, int line, std::string_view v) {
             std::uint64_t seed;
             if (!parse_u64(v, seed)) {
                 p.fail(line, "sim.seed", "expected an unsigned 64-bit integer");
             } else {
                 p.cfg.seed = seed;
             }
         }},
        {"sim.trace_out",
         [](Parser& p, int, std::string_view v) { p.cfg.trace_out = std::string(v); }},
        {"analytic.t_max_s",
         [](Parser& p, int line, std::string_view v) {
             number_key(p, line, "analytic.t_max_s", v, p.cfg.t_max_s);
         }},
        {"analytic.t_step_s",
         [](Parser& p, int line, std::string_view v) {
             number_key(p, line, "analytic.t_step_s", v, p.cfg.t_step_s);
         }},
        {"cce.theta_high",
         [](Parser& p, int line, std::string_view v) {
             number_key(p, line, "cce.theta_high", v, p.cfg.theta_high);
         }},
        {"cce.theta_low",
         [](Parser& p, int line, std::string_view v) {
             number_key(p, line, "cce.theta_low", v, p.cfg.theta_low);
         }},
        {"cce.drain_headroom",
         [](Parser& p, int line, std::string_view v) {
             number_key(p, line, "cce.drain_headroom", v, p.cfg.drain_headroom);
         }},
        {"cce.guard_s",
         [](Parser& p, int line, std::string_view v) {
             number_key(p, line, "cce.guard_s", v, p.cfg.guard_s);
         }},
        {"cce.buffer_bits",
         [](Parser& p, int line, std::string_view v) {
             double bits;
             if (!parse_double(v, bits)) {
                 p.fail(line, "cce.buffer_bits", "expected a finite number");
             } else {
                 p.cfg.buffer_bits = bits;
             }
         }},
        {"cce.capacity_bps",
         [](Parser& p, int line, std::string_view v) {
             number_key(p, line, "cce.capacity_bps", v, p.cfg.capacity_bps);
         }},
        {"cce.dt_ttl_s",
         [](Parser& p, int line, std::string_view v) {
             number_key(p, line, "cce.dt_ttl_s", v, p.cfg.dt_ttl_s);
         }},
        {"load.profile",
         [](Parser& p, int, std::string_view v) { p.cfg.profile = std::string(v); }},
        {"load.segments",
         [](Parser& p, int line, std::string_view v) {
             if (!parse_segments(v, p.cfg.segments)) {
                 p.fail(line, "load.segments",
                        "expected comma-separated start:end:rate triples");
             }
         }},
        {"load.dt_schedule",
         [](Parser& p, int line, std::string_view v) {
             if (!parse_double_list(v, p.cfg.dt_schedule_s)) {
                 p.fail(line, "load.dt_schedule", "expected a comma-separated list of numbers");
             }
         }},
        {"load.dt_size_bits",
         [](Parser& p, int line, std::string_view v) {
             number_key(p, line, "load.dt_size_bits", v, p.cfg.dt_size_bits);
         }},
    };
    return table;
}

const char* const kSections[] = {"population", "meeting", "deadlines", "sim",
                                 "analytic",   "cce",     "load"};

bool known_section(std::string_view name) {
    for (const char* s : kSections) {
        if (name == s) return true;
    }
    return false;
}

void require_key(Parser& p, const std::string& full_key) {
    if (!p.has(full_key)) p.fail(0, full_key, "required key is missing");
}

void check_positive(Parser& p, const std::string& key, double v, const char* what) {
    if (!(v > 0.0) || !std::isfinite(v)) {
        p.fail(p.line_of(key), key, std::string(what) + " must be > 0");
    }
}

void validate_semantics(Parser& p) {
    ScenarioConfig& cfg = p.cfg;

    require_key(p, "population.n_mn");
    require_key(p, "population.r0");
    require_key(p, "population.h0");
    require_key(p, "meeting.m_lambda");
    require_key(p, "deadlines.ttls");
    if (!p.errors.empty()) return; // missing pieces, skip cross-checks

    check_positive(p, "population.n_mn", cfg.n_mn, "n_mn");
    check_positive(p, "population.r0", cfg.r0, "r0");
    if (cfg.r0 > cfg.n_mn) {
        p.fail(p.line_of("population.r0"), "population.r0",
               "initial requesters exceed the mobile-node population");
    }
    for (double h0 : cfg.h0_values) {
        if (!std::isfinite(h0) || h0 < 0.0) {
            p.fail(p.line_of("population.h0"), "population.h0", "every h0 must be >= 0");
            break;
        }
    }
    check_positive(p, "meeting.m_lambda", cfg.m_lambda, "m_lambda");

    if (cfg.rate_dist == meetsim::RateDist::gamma) {
        if (!cfg.gamma_shape.has_value()) {
            p.fail(p.line_of("meeting.rate_dist"), "meeting.gamma_shape",
                   "rate_dist = gamma requires gamma_shape");
        } else if (!(*cfg.gamma_shape > 0.0)) {
            p.fail(p.line_of("meeting.gamma_shape"), "meeting.gamma_shape",
                   "gamma_shape must be > 0");
        }
    } else if (cfg.gamma_shape.has_value()) {
        p.fail(p.line_of("meeting.gamma_shape"), "meeting.gamma_shape",
               "gamma_shape is only meaningful with rate_dist = gamma");
    }

    for (double ttl : cfg.ttls_s) {
        if (!std::isfinite(ttl) || ttl < 0.0) {
            p.fail(p.line_of("deadlines.ttls"), "deadlines.ttls", "every ttl must be >= 0");
            break;
        }
    }

    check_positive(p, "sim.horizon_s", cfg.horizon_s, "horizon_s");
    if (cfg.replications.has_value() && *cfg.replications < 1) {
        p.fail(p.line_of("sim.replications"), "sim.replications", "replications must be >= 1");
    }

    check_positive(p, "analytic.t_max_s", cfg.t_max_s, "t_max_s");
    check_positive(p, "analytic.t_step_s", cfg.t_step_s, "t_step_s");
    if (cfg.t_step_s > cfg.t_max_s) {
        p.fail(p.line_of("analytic.t_step_s"), "analytic.t_step_s",
               "t_step_s exceeds t_max_s");
    }

    if (!(cfg.theta_low > 0.0) || !(cfg.theta_high <= 1.0) || cfg.theta_low > cfg.theta_high) {
        const std::string key =
            p.has("cce.theta_low") ? "cce.theta_low" : "cce.theta_high";
        p.fail(p.line_of(key), key,
               "hysteresis order violated: need 0 < theta_low <= theta_high <= 1");
    }
    if (!(cfg.drain_headroom > 0.0) || cfg.drain_headroom > 1.0) {
        p.fail(p.line_of("cce.drain_headroom"), "cce.drain_headroom",
               "drain_headroom must be in (0, 1]");
    }
    if (!(cfg.guard_s >= 0.0)) {
        p.fail(p.line_of("cce.guard_s"), "cce.guard_s", "guard_s must be >= 0");
    }
    if (cfg.buffer_bits.has_value() && !(*cfg.buffer_bits > 0.0)) {
        p.fail(p.line_of("cce.buffer_bits"), "cce.buffer_bits", "buffer_bits must be > 0");
    }
    check_positive(p, "cce.capacity_bps", cfg.capacity_bps, "capacity_bps");
    if (!(cfg.dt_ttl_s >= 0.0)) {
        p.fail(p.line_of("cce.dt_ttl_s"), "cce.dt_ttl_s", "dt_ttl_s must be >= 0");
    }

    const bool custom = cfg.profile == "custom";
    if (!custom && cfg.profile != "peak-hour" && cfg.profile != "zero-dt" &&
        cfg.profile != "all-dt") {
        p.fail(p.line_of("load.profile"), "load.profile",
               "expected peak-hour|zero-dt|all-dt|custom, got '" + cfg.profile + "'");
    }
    if (custom) {
        if (cfg.segments.empty()) {
            p.fail(p.line_of("load.profile"), "load.segments",
                   "custom profile requires load.segments");
        } else {
            double cursor = 0.0;
            bool tiled = true;
            for (const cce::LoadSegment& seg : cfg.segments) {
                if (seg.t_start_s != cursor || !(seg.t_end_s > seg.t_start_s) ||
                    seg.rate_bps < 0.0) {
                    p.fail(p.line_of("load.segments"), "load.segments",
                           "segments must tile [0, horizon] contiguously with rates >= 0");
                    tiled = false;
                    break;
                }
                cursor = seg.t_end_s;
            }
            if (tiled && cursor != cfg.horizon_s) {
                p.fail(p.line_of("load.segments"), "load.segments",
                       "segments end at " + csv::format_double(cursor) +
                           " but sim.horizon_s is " + csv::format_double(cfg.horizon_s));
            }
        }
        if (!cfg.dt_schedule_s.empty()) {
            if (!(cfg.dt_size_bits > 0.0)) {
                p.fail(p.line_of("load.dt_schedule"), "load.dt_size_bits",
                       "dt_schedule requires dt_size_bits > 0");
            }
            double last = 0.0;
            for (double t : cfg.dt_schedule_s) {
                if (t < last || t < 0.0 || t > cfg.horizon_s) {
                    p.fail(p.line_of("load.dt_schedule"), "load.dt_schedule",
                           "arrival times must be sorted and within [0, horizon]");
                    break;
                }
                last = t;
            }
        }
    } else {
        for (const char* key : {"load.segments", "load.dt_schedule", "load.dt_size_bits"}) {
            if (p.has(key)) {
                p.fail(p.line_of(key), key, "only meaningful with load.profile = custom");
            }
        }
    }
}

} // namespace

std::string ConfigError::to_string() const {
    std::string where = line > 0 ? "line " + std::to_string(line) : "config";
    return where + ": " + key + ": " + message;
}

ParseResult parse_config(std::string_view text) {
    Parser parser;
    std::string section;

    int line_no = 0;
    std::size_t start = 0;
    while (start <= text.size()) {
        const std::size_t eol = text.find('\n', start);
        std::string_view line = eol == std::string_view::npos
                                    ? text.substr(start)
                                    : text.substr(start, eol - start);
        start = eol == std::string_view::npos ? text.size() + 1 : eol + 1;
        ++line_no;

        const std::size_t hash = line.find('#');
        if (hash != std::string_view::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;

        if (line.front() == '[') {
            if (line.back() != ']') {
                parser.fail(line_no, std::string(line), "malformed section header");
                continue;
            }
            const std::string_view name = trim(line.substr(1, line.size() - 2));
            if (!known_section(name)) {
                parser.fail(line_no, std::string(name), "unknown section");
                section.clear();
                continue;
            }
            section = std::string(name);
            continue;
        }

        const std::size_t eq = line.find('=');
        if (eq == std::string_view::npos) {
            parser.fail(line_no, std::string(line), "expected 'key = value'");
            continue;
        }
        const std::string key(trim(line.substr(0, eq)));
        const std::string_view value = trim(line.substr(eq + 1));
        if (section.empty()) {
            parser.fail(line_no, key, "key appears before any [section] header");
            continue;
        }
        const std::string full_key = section + "." + key;
        const auto handler = handlers().find(full_key);
        if (handler == handlers().end()) {
            parser.fail(line_no, full_key, "unknown key");
            continue;
        }
        if (!parser.mark_seen(line_no, full_key)) continue;
        handler->second(parser, line_no, value);
    }

    validate_semantics(parser);

    ParseResult result;
    result.errors = std::move(parser.errors);
    if (result.errors.empty()) result.config = std::move(parser.cfg);
    return result;
}

ParseResult load_config(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        ParseResult result;
        result.errors.push_back(ConfigError{0, path, "cannot open config file"});
        return result;
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_config(buf.str());
}

std::string serialize_config(const ScenarioConfig& cfg) {
    std::ostringstream out;
    const auto num = [](double v) { return csv::format_double_exact(v); };
    const auto list = [&num](const std::vector<double>& values) {
        std::string joined;
        for (std::size_t i = 0; i < values.size(); ++i) {
            if (i > 0) joined += ", ";
            joined += num(values[i]);
        }
        return joined;
    };

    out << "[population]\n";
    out << "n_mn = " << num(cfg.n_mn) << "\n";
    out << "r0 = " << num(cfg.r0) << "\n";
    out << "h0 = " << list(cfg.h0_values) << "\n";

    out << "\n[meeting]\n";
    out << "m_lambda = " << num(cfg.m_lambda) << "\n";
    out << "rate_dist = "
        << (cfg.rate_dist == meetsim::RateDist::deterministic ? "deterministic"
            : cfg.rate_dist == meetsim::RateDist::exponential ? "exponential"
                                                              : "gamma")
        << "\n";
    if (cfg.gamma_shape.has_value()) out << "gamma_shape = " << num(*cfg.gamma_shape) << "\n";
    out << "mode = " << (cfg.mode == meetsim::Mode::epidemic ? "epidemic" : "fixed-holders")
        << "\n";

    out << "\n[deadlines]\n";
    out << "ttls = " << list(cfg.ttls_s) << "\n";

    out << "\n[sim]\n";
    out << "horizon_s = " << num(cfg.horizon_s) << "\n";
    if (cfg.replications.has_value()) out << "replications = " << *cfg.replications << "\n";
    if (cfg.seed.has_value()) out << "seed = " << *cfg.seed << "\n";
    if (cfg.trace_out.has_value()) out << "trace_out = " << *cfg.trace_out << "\n";

    out << "\n[analytic]\n";
    out << "t_max_s = " << num(cfg.t_max_s) << "\n";
    out << "t_step_s = " << num(cfg.t_step_s) << "\n";

    out << "\n[cce]\n";
    out << "theta_high = " << num(cfg.theta_high) << "\n";
    out << "theta_low = " << num(cfg.theta_low) << "\n";
    out << "drain_headroom = " << num(cfg.drain_headroom) << "\n";
    out << "guard_s = " << num(cfg.guard_s) << "\n";
    if (cfg.buffer_bits.has_value()) out << "buffer_bits = " << num(*cfg.buffer_bits) << "\n";
    out << "capacity_bps = " << num(cfg.capacity_bps) << "\n";
    out << "dt_ttl_s = " << num(cfg.dt_ttl_s) << "\n";

    out << "\n[load]\n";
    out << "profile = " << cfg.profile << "\n";
    if (!cfg.segments.empty()) {
        out << "segments = ";
        for (std::size_t i = 0; i < cfg.segments.size(); ++i) {
            if (i > 0) out << ", ";
            out << num(cfg.segments[i].t_start_s) << ':' << num(cfg.segments[i].t_end_s) << ':'
                << num(cfg.segments[i].rate_bps);
        }
        out << "\n";
    }
    if (!cfg.dt_schedule_s.empty()) {
        out << "dt_schedule = " << list(cfg.dt_schedule_s) << "\n";
        out << "dt_size_bits = " << num(cfg.dt_size_bits) << "\n";
    }
    return out.str();
}

cce::LoadProfile profile_from_config(const ScenarioConfig& cfg) {
    if (cfg.profile == "peak-hour") return cce::make_peak_hour_profile(cfg.capacity_bps);
    if (cfg.profile == "zero-dt") return cce::make_zero_dt_profile(cfg.capacity_bps);
    if (cfg.profile == "all-dt") return cce::make_all_dt_profile(cfg.capacity_bps);
    if (cfg.profile != "custom") {
        throw InvalidParams("unknown load profile '" + cfg.profile + "'");
    }
    cce::LoadProfile profile;
    profile.horizon_s = cfg.horizon_s;
    profile.ds_segments = cfg.segments;
    std::uint64_t id = 1;
    for (double t : cfg.dt_schedule_s) {
        cce::ContentItem item;
        item.id = id++;
        item.size_bits = cfg.dt_size_bits;
        item.traffic_class = cce::TrafficClass::delay_tolerant;
        item.created_at_s = t;
        profile.dt_arrivals.push_back(item);
    }
    return profile;
}

cce::CceConfig cce_config_from(const ScenarioConfig& cfg) {
    cce::CceConfig out;
    out.capacity_bps = cfg.capacity_bps;
    out.theta_high = cfg.theta_high;
    out.theta_low = cfg.theta_low;
    out.drain_headroom = cfg.drain_headroom;
    out.guard_s = cfg.guard_s;
    out.buffer_bits = cfg.buffer_bits.value_or(0.0);
    return out;
}

} // namespace edgecc::config

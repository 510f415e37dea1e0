#pragma once

#include <cctype>
#include <cstdint>
#include <fstream>
#include <limits>
#include <map>
#include <set>
#include <sstream>
#include <string>

#include "omtnet/types.hpp"

namespace omtnet {

/// Sectioned key=value experiment configuration. Frequencies are given as
/// value/2pi (Hz/kHz/MHz/GHz suffixes) and converted to internal angular
/// units where the reference frequency is 1; times accept s/ms/us/ns. Bare
/// numbers are taken as already-internal (or dimensionless) values.
class ExperimentConfig {
  public:
    static ExperimentConfig parse_file(const std::string& path) {
        std::ifstream in(path);
        if (!in) throw ConfigError("config: cannot open " + path);
        std::stringstream ss;
        ss << in.rdbuf();
        return parse(ss.str());
    }

    static ExperimentConfig parse(const std::string& text) {
        ExperimentConfig cfg;
        std::istringstream in(text);
        std::string line, section;
        int lineno = 0;
        while (std::getline(in, line)) {
            ++lineno;
            const auto hash = line.find('#');
            if (hash != std::string::npos) line.erase(hash);
            line = trim(line);
            if (line.empty()) continue;
            if (line.front() == '[') {
                if (line.back() != ']')
                    throw ConfigError("config line " + std::to_string(lineno) +
                                      ": malformed section header");
                section = trim(line.substr(1, line.size() - 2));
                continue;
            }
            const auto eq = line.find('=');
            if (eq == std::string::npos)
                throw ConfigError("config line " + std::to_string(lineno) +
                                  ": expected key = value");
            const std::string key = trim(line.substr(0, eq));
            const std::string value = trim(line.substr(eq + 1));
            if (section.empty() || key.empty() || value.empty())
                throw ConfigError("config line " + std::to_string(lineno) +
                                  ": empty section, key, or value");
            cfg.values_[section + "." + key] = value;
        }
        cfg.reference_hz_ = cfg.has("units.frequency_reference")
                                ? cfg.raw_frequency_hz("units.frequency_reference")
                                : 0.0;
        return cfg;
    }

    bool has(const std::string& dotted) const { return values_.count(dotted) > 0; }

    std::string str(const std::string& dotted) const {
        const auto it = values_.find(dotted);
        if (it == values_.end()) throw ConfigError("config: missing key " + dotted);
        return it->second;
    }

    std::string str_or(const std::string& dotted, const std::string& fallback) const {
        return has(dotted) ? str(dotted) : fallback;
    }

    double number(const std::string& dotted) const { return to_number(str(dotted), dotted); }

    double number_or(const std::string& dotted, double fallback) const {
        return has(dotted) ? number(dotted) : fallback;
    }

    int integer(const std::string& dotted) const {
        const double v = number(dotted);
        return static_cast<int>(v);
    }

    int integer_or(const std::string& dotted, int fallback) const {
        return has(dotted) ? integer(dotted) : fallback;
    }

    /// Frequency in internal angular units (reference = 1).
    double frequency(const std::string& dotted) const {
        const double hz = raw_frequency_hz(dotted);
        if (reference_hz_ <= 0.0)
            throw ConfigError("config: " + dotted +
                              " has a frequency unit but units.frequency_reference is unset");
        return hz / reference_hz_;
    }

    double frequency_or(const std::string& dotted, double fallback) const {
        return has(dotted) ? frequency(dotted) : fallback;
    }

    /// Time in internal units (1/reference angular frequency).
    double time(const std::string& dotted) const {
        const std::string v = str(dotted);
        if (v == "inf") return std::numeric_limits<double>::infinity();
        auto [num, unit] = split_unit(v, dotted);
        double seconds = num;
        if (unit == "s") {
        } else if (unit == "ms") {
            seconds *= 1e-3;
        } else if (unit == "us") {
            seconds *= 1e-6;
        } else if (unit == "ns") {
            seconds *= 1e-9;
        } else if (unit.empty()) {
            return num;  // already internal
        } else {
            throw ConfigError("config: " + dotted + ": unknown time unit '" + unit + "'");
        }
        if (reference_hz_ <= 0.0)
            throw ConfigError("config: " + dotted +
                              " has a time unit but units.frequency_reference is unset");
        return seconds * 2.0 * kPi * reference_hz_;
    }

    double time_or(const std::string& dotted, double fallback) const {
        return has(dotted) ? time(dotted) : fallback;
    }

    double reference_hz() const { return reference_hz_; }

    /// FNV-1a hash of the canonical (sorted) content, for CSV provenance.
    std::uint64_t hash() const {
        std::uint64_t h = 1469598103934665603ull;
        for (const auto& [k, v] : values_) {
            for (char c : k + "=" + v + "\n") {
                h ^= static_cast<unsigned char>(c);
                h *= 1099511628211ull;
            }
        }
        return h;
    }

    /// Rejects keys outside the known schema.
    void validate_schema(const std::set<std::string>& known_keys) const {
        for (const auto& [k, v] : values_) {
            (void)v;
            if (!known_keys.count(k))
                throw ConfigError("config: unknown key '" + k + "'");
        }
    }

  private:
    static std::string trim(const std::string& s) {
        size_t a = 0, b = s.size();
        while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
        while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
        return s.substr(a, b - a);
    }

    static std::pair<double, std::string> split_unit(const std::string& v,
                                                     const std::string& key) {
        size_t pos = 0;
        double num = 0.0;
        try {
            num = std::stod(v, &pos);
        } catch (const std::exception&) {
            throw ConfigError("config: " + key + ": cannot parse number from '" + v + "'");
        }
        std::string unit = v.substr(pos);
        size_t a = 0;
        while (a < unit.size() && std::isspace(static_cast<unsigned char>(unit[a]))) ++a;
        return {num, unit.substr(a)};
    }

    double raw_frequency_hz(const std::string& dotted) const {
        auto [num, unit] = split_unit(str(dotted), dotted);
        if (unit == "Hz") return num;
        if (unit == "kHz") return num * 1e3;
        if (unit == "MHz") return num * 1e6;
        if (unit == "GHz") return num * 1e9;
        if (unit.empty()) {
            // already internal: convert back through the reference
            return num * (reference_hz_ > 0.0 ? reference_hz_ : 1.0);
        }
        throw ConfigError("config: " + dotted + ": unknown frequency unit '" + unit + "'");
    }

    static double to_number(const std::string& v, const std::string& key) {
        if (v == "inf") return std::numeric_limits<double>::infinity();
        size_t pos = 0;
        double num = 0.0;
        try {
            num = std::stod(v, &pos);
        } catch (const std::exception&) {
            throw ConfigError("config: " + key + ": cannot parse number from '" + v + "'");
        }
        while (pos < v.size() && std::isspace(static_cast<unsigned char>(v[pos]))) ++pos;
        if (pos != v.size())
            throw ConfigError("config: " + key + ": unexpected unit on plain number");
        return num;
    }

    std::map<std::string, std::string> values_;
    double reference_hz_ = 0.0;
};

}  // namespace omtnet

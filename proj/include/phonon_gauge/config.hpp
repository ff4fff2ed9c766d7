#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace phonon_gauge {

/// Parsed scalar: booleans, integers, reals or words.
using ConfigValue = std::variant<bool, std::int64_t, double, std::string>;

enum class ValueKind { boolean, integer, real, choice };

struct KeyRule {
    std::string key;
    ValueKind kind = ValueKind::real;
    double min = -1e300;
    double max = 1e300;
    bool min_exclusive = false;
    std::vector<std::string> choices;
    std::string help;
};

struct ExperimentConfig {
    std::string experiment;
    std::string format = "csv";
    /// Every parameter the experiment consumes, after presets are applied.
    std::map<std::string, ConfigValue> values;
    /// Keys set explicitly in the document.
    std::vector<std::string> supplied;

    bool has(const std::string& key) const { return values.count(key) != 0; }
    double real(const std::string& key) const;
    std::int64_t integer(const std::string& key) const;
    bool flag(const std::string& key) const;
    const std::string& word(const std::string& key) const;
};

/// Names accepted by the `experiment` key, in listing order.
const std::vector<std::string>& experiment_names();

/// One-line description of an experiment preset.
std::string_view experiment_summary(std::string_view name);

/// Keys consumed by an experiment (for custom this depends on drive.mode).
std::vector<KeyRule> experiment_schema(std::string_view name, std::string_view drive_mode = "laser");

/// Preset document for an experiment, suitable for `preset --show`.
std::string preset_document(std::string_view name);

/// Parses a `key = value` document with `#` comments. Collects every violation and
/// throws ConfigError listing them with their paths.
ExperimentConfig parse_config(std::string_view text);

/// Reals accept plain numbers or multiples of pi: `pi`, `-pi`, `2pi`, `0.5*pi`, `pi/2`.
std::optional<double> parse_real(std::string_view text);

std::string format_value(const ConfigValue& value);

}  // namespace phonon_gauge

#include "phonon_gauge/errors.hpp"

namespace phonon_gauge {

namespace {

std::string summarize(const std::vector<ConfigIssue>& issues) {
    std::string out = "invalid configuration";
    for (const auto& issue : issues) {
        out += "\n  ";
        out += issue.path.empty() ? "<document>" : issue.path;
        out += ": ";
        out += issue.reason;
    }
    return out;
}

}  // namespace

ConfigError::ConfigError(std::vector<ConfigIssue> issues)
    : Error(summarize(issues)), issues_(std::move(issues)) {}

}  // namespace phonon_gauge

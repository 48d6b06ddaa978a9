#pragma once

#include <stdexcept>
#include <string>

namespace badskill {

struct UnknownSkillError : std::runtime_error {
    explicit UnknownSkillError(const std::string& id)
        : std::runtime_error("unknown skill: " + id) {}
};

struct MissingArgumentError : std::runtime_error {
    explicit MissingArgumentError(const std::string& what) : std::runtime_error(what) {}
};

struct InfeasibleConfigError : std::runtime_error {
    explicit InfeasibleConfigError(const std::string& what) : std::runtime_error(what) {}
};

struct FormatError : std::runtime_error {
    explicit FormatError(const std::string& what) : std::runtime_error(what) {}
};

struct DegenerateValidationError : std::runtime_error {
    explicit DegenerateValidationError(const std::string& what) : std::runtime_error(what) {}
};

struct InvalidThresholdError : std::runtime_error {
    explicit InvalidThresholdError(const std::string& what) : std::runtime_error(what) {}
};

struct SandboxUnwritableError : std::runtime_error {
    explicit SandboxUnwritableError(const std::string& what) : std::runtime_error(what) {}
};

struct ArtifactCorruptError : std::runtime_error {
    explicit ArtifactCorruptError(const std::string& what) : std::runtime_error(what) {}
};

struct IoError : std::runtime_error {
    explicit IoError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace badskill

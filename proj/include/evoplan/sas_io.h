#pragma once

#include "evoplan/task.h"

#include <filesystem>
#include <iosfwd>
#include <stdexcept>
#include <string>

namespace evoplan {

// Reader/writer for the Fast Downward translator output format, version 3.
//
// Mutex groups are read and discarded. Axioms (derived variables or
// begin_rule sections) and conditional effects are rejected.

class SasError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class SasParseError : public SasError {
public:
    SasParseError(int line, const std::string &what);
    int line() const { return line_; }

private:
    int line_;
};

class UnsupportedVersionError : public SasError {
public:
    explicit UnsupportedVersionError(int version);
    int version() const { return version_; }

private:
    int version_;
};

class UnsupportedFeatureError : public SasError {
public:
    UnsupportedFeatureError(int line, const std::string &feature);
};

Task parse_sas(std::istream &in);
Task parse_sas(const std::string &text);
Task load_sas_file(const std::filesystem::path &path);

void serialize_sas(const Task &task, std::ostream &out);
std::string serialize_sas(const Task &task);

}  // namespace evoplan

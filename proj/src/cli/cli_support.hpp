#pragma once

#include <algorithm>
#include <map>
#include <memory>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "hsdcov/matcore.hpp"

namespace hsdcov::cli {

/// Exit code 2.
class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Exit code 3.
class DomainError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Shortest text that parses back to the same double.
std::string format_real(double x);

/// Numeric CSV: comma-separated, optional header line, blank lines only at
/// the end. Throws UsageError naming the file and line for ragged or
/// non-numeric content.
DenseMatrix read_csv_matrix(const std::string& path, bool header);

/// Rows of integers that may differ in length.
std::vector<std::vector<int>> read_csv_int_rows(const std::string& path);

/// "-" is standard output.
class OutputTarget {
 public:
  OutputTarget(const std::string& path, std::ostream& fallback);
  std::ostream& stream() { return file_ ? *file_ : fallback_; }
  bool is_file() const noexcept { return file_ != nullptr; }

 private:
  std::ostream& fallback_;
  std::unique_ptr<std::ostream> file_;
};

enum class Kind { Count, Real, Text, Flag, RealList, TextList, Seed };

struct OptSpec {
  std::string key;
  Kind kind;
  nlohmann::json fallback;
  std::string help;
};

/// The flags of one subcommand, mirrored by the keys of a JSON config file.
/// Resolution order: flag, then config file, then HSDCOV_SEED (seed only),
/// then the built-in default.
class OptionSet {
 public:
  OptionSet(CLI::App* app, std::vector<OptSpec> specs);
  OptionSet(const OptionSet&) = delete;
  OptionSet& operator=(const OptionSet&) = delete;

  /// A JSON object with one entry per key plus "command". A null value
  /// marks a required key with no value.
  nlohmann::json resolve(const std::string& command) const;

 private:
  CLI::App* app_;
  std::vector<OptSpec> specs_;
  std::map<std::string, std::string> raw_;
  std::map<std::string, bool> flags_;
  std::string config_path_;
};

/// Throws UsageError when `key` is null.
const nlohmann::json& required(const nlohmann::json& cfg, const std::string& key);

}  // namespace hsdcov::cli

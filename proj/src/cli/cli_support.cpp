#include "cli_support.hpp"

#include <charconv>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <sstream>

namespace hsdcov::cli {

namespace {

std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t");
  return std::string(s.substr(first, last - first + 1));
}

std::vector<std::string> split(std::string_view s, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = s.find(sep, start);
    out.push_back(trim(s.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start)));
    if (pos == std::string_view::npos) return out;
    start = pos + 1;
  }
}

template <typename T>
std::optional<T> parse_number(const std::string& text) {
  T value{};
  const char* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, value);
  if (ec != std::errc{} || ptr != end || text.empty()) return std::nullopt;
  if constexpr (std::is_floating_point_v<T>) {
    if (!std::isfinite(value)) return std::nullopt;
  }
  return value;
}

/// Lines with '\r' stripped and trailing blank lines dropped.
std::vector<std::string> read_lines(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot open '" + path + "'");
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    lines.push_back(line);
  }
  while (!lines.empty() && trim(lines.back()).empty()) lines.pop_back();
  return lines;
}

std::string where(const std::string& path, std::size_t line) {
  return path + ":" + std::to_string(line);
}

nlohmann::json from_text(const OptSpec& spec, const std::string& text) {
  const std::string flag = "--" + spec.key;
  switch (spec.kind) {
    case Kind::Count:
    case Kind::Seed:
      if (auto v = parse_number<std::uint64_t>(text)) return *v;
      throw UsageError(flag + " expects a nonnegative integer, got '" + text + "'");
    case Kind::Real:
      if (auto v = parse_number<double>(text)) return *v;
      throw UsageError(flag + " expects a finite number, got '" + text + "'");
    case Kind::Text:
      return text;
    case Kind::Flag:
      return true;
    case Kind::RealList: {
      nlohmann::json arr = nlohmann::json::array();
      for (const std::string& item : split(text, ',')) {
        const auto v = parse_number<double>(item);
        if (!v) throw UsageError(flag + " expects comma-separated numbers, got '" + text + "'");
        arr.push_back(*v);
      }
      return arr;
    }
    case Kind::TextList: {
      nlohmann::json arr = nlohmann::json::array();
      for (const std::string& item : split(text, ',')) {
        if (item.empty()) throw UsageError(flag + " has an empty list item in '" + text + "'");
        arr.push_back(item);
      }
      return arr;
    }
  }
  return nullptr;
}

nlohmann::json from_json(const OptSpec& spec, const nlohmann::json& v, const std::string& path) {
  const std::string what = path + ": key '" + spec.key + "'";
  switch (spec.kind) {
    case Kind::Count:
    case Kind::Seed:
      if (v.is_number_unsigned()) return v.get<std::uint64_t>();
      if (v.is_number_integer() && v.get<std::int64_t>() >= 0) return static_cast<std::uint64_t>(v.get<std::int64_t>());
      throw UsageError(what + " expects a nonnegative integer");
    case Kind::Real:
      if (v.is_number() && std::isfinite(v.get<double>())) return v.get<double>();
      throw UsageError(what + " expects a finite number");
    case Kind::Text:
      if (v.is_string()) return v;
      throw UsageError(what + " expects a string");
    case Kind::Flag:
      if (v.is_boolean()) return v;
      throw UsageError(what + " expects true or false");
    case Kind::RealList: {
      if (v.is_number()) return from_json(spec, nlohmann::json::array({v}), path);
      if (!v.is_array()) throw UsageError(what + " expects an array of numbers");
      nlohmann::json arr = nlohmann::json::array();
      for (const auto& item : v) {
        if (!item.is_number() || !std::isfinite(item.get<double>()))
          throw UsageError(what + " expects an array of finite numbers");
        arr.push_back(item.get<double>());
      }
      return arr;
    }
    case Kind::TextList: {
      if (v.is_string()) return from_text(spec, v.get<std::string>());
      if (!v.is_array()) throw UsageError(what + " expects an array of strings");
      for (const auto& item : v) {
        if (!item.is_string()) throw UsageError(what + " expects an array of strings");
      }
      return v;
    }
  }
  return nullptr;
}

const char* type_name(Kind kind) {
  switch (kind) {
    case Kind::Count: return "UINT";
    case Kind::Seed: return "UINT64";
    case Kind::Real: return "REAL";
    case Kind::RealList: return "REAL,...";
    case Kind::TextList: return "TEXT,...";
    default: return "TEXT";
  }
}

std::string describe_default(const nlohmann::json& v) {
  if (v.is_null()) return {};
  if (v.is_string()) return "default " + v.get<std::string>();
  if (v.is_array()) {
    std::string s;
    for (const auto& item : v) s += (s.empty() ? "" : ",") + (item.is_string() ? item.get<std::string>() : item.dump());
    return "default " + s;
  }
  return "default " + v.dump();
}

}  // namespace

std::string format_real(double x) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

DenseMatrix read_csv_matrix(const std::string& path, bool header) {
  const std::vector<std::string> lines = read_lines(path);
  const std::size_t first = header && !lines.empty() ? 1 : 0;
  std::size_t cols = 0;
  std::vector<double> data;
  for (std::size_t i = first; i < lines.size(); ++i) {
    if (trim(lines[i]).empty()) throw UsageError(where(path, i + 1) + ": empty line inside the data");
    const std::vector<std::string> fields = split(lines[i], ',');
    if (i == first) {
      cols = fields.size();
    } else if (fields.size() != cols) {
      throw UsageError(where(path, i + 1) + ": expected " + std::to_string(cols) + " fields, found " +
                       std::to_string(fields.size()));
    }
    for (std::size_t c = 0; c < fields.size(); ++c) {
      const auto v = parse_number<double>(fields[c]);
      if (!v) {
        throw UsageError(where(path, i + 1) + ": field " + std::to_string(c + 1) + " '" + fields[c] +
                         "' is not a finite number");
      }
      data.push_back(*v);
    }
  }
  const std::size_t rows = lines.size() - first;
  return DenseMatrix(rows, rows == 0 ? 0 : cols, std::move(data));
}

std::vector<std::vector<int>> read_csv_int_rows(const std::string& path) {
  const std::vector<std::string> lines = read_lines(path);
  std::vector<std::vector<int>> rows;
  for (std::size_t i = 0; i < lines.size(); ++i) {
    std::vector<int> row;
    for (const std::string& field : split(lines[i], ',')) {
      const auto v = parse_number<int>(field);
      if (!v) throw UsageError(where(path, i + 1) + ": '" + field + "' is not an integer");
      row.push_back(*v);
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

OutputTarget::OutputTarget(const std::string& path, std::ostream& fallback) : fallback_(fallback) {
  if (path == "-") return;
  auto file = std::make_unique<std::ofstream>(path, std::ios::binary);
  if (!*file) throw std::runtime_error("cannot write '" + path + "'");
  file_ = std::move(file);
}

OptionSet::OptionSet(CLI::App* app, std::vector<OptSpec> specs) : app_(app), specs_(std::move(specs)) {
  app_->add_option("--config", config_path_, "JSON file with the same keys as the flags; flags take precedence");
  for (const OptSpec& s : specs_) {
    const std::string def = describe_default(s.fallback);
    const std::string help = def.empty() ? s.help : s.help + " (" + def + ")";
    if (s.kind == Kind::Flag) {
      app_->add_flag("--" + s.key, flags_[s.key], help);
    } else {
      app_->add_option("--" + s.key, raw_[s.key], help)->type_name(type_name(s.kind));
    }
  }
}

nlohmann::json OptionSet::resolve(const std::string& command) const {
  nlohmann::json cfg = nlohmann::json::object();
  for (const OptSpec& s : specs_) cfg[s.key] = s.fallback;

  if (const char* env = std::getenv("HSDCOV_SEED")) {
    for (const OptSpec& s : specs_) {
      if (s.kind != Kind::Seed) continue;
      const auto v = parse_number<std::uint64_t>(trim(env));
      if (!v) throw UsageError(std::string("HSDCOV_SEED must be a nonnegative integer, got '") + env + "'");
      cfg[s.key] = *v;
    }
  }

  if (!config_path_.empty()) {
    std::ifstream in(config_path_);
    if (!in) throw UsageError("cannot open config '" + config_path_ + "'");
    nlohmann::json file;
    try {
      file = nlohmann::json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
      throw UsageError(config_path_ + ": " + e.what());
    }
    // A report embeds its resolved config under "config"; accept it directly.
    if (file.is_object() && file.contains("config") && file["config"].is_object()) file = file["config"];
    if (!file.is_object()) throw UsageError(config_path_ + ": expected a JSON object");
    for (const auto& [key, value] : file.items()) {
      if (key == "command") {
        if (value != command) throw UsageError(config_path_ + ": config is for '" + value.dump() + "', not '" + command + "'");
        continue;
      }
      const auto it = std::find_if(specs_.begin(), specs_.end(), [&](const OptSpec& s) { return s.key == key; });
      if (it == specs_.end()) throw UsageError(config_path_ + ": unknown key '" + key + "' for " + command);
      cfg[key] = from_json(*it, value, config_path_);
    }
  }

  for (const OptSpec& s : specs_) {
    if (app_->count("--" + s.key) == 0) continue;
    cfg[s.key] = s.kind == Kind::Flag ? nlohmann::json(true) : from_text(s, raw_.at(s.key));
  }
  cfg["command"] = command;
  return cfg;
}

const nlohmann::json& required(const nlohmann::json& cfg, const std::string& key) {
  const nlohmann::json& v = cfg.at(key);
  if (v.is_null()) throw UsageError("--" + key + " is required");
  return v;
}

}  // namespace hsdcov::cli

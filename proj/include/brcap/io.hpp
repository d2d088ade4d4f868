#pragma once

#include <json.hpp>
#include <memory>
#include <string>
#include <vector>

#include "brcap/green.hpp"

namespace brcap {

using json = nlohmann::ordered_json;

constexpr const char* kVersion = "1.0.0";
constexpr const char* kJsonSchema = "brcap/1";

// Module versions echoed in every manifest.
json module_versions();

// Shortest round-trip decimal form of a double.
std::string fmt_num(double x);

class CsvTable {
 public:
  explicit CsvTable(std::vector<std::string> header) : header_(std::move(header)) {}
  CsvTable& row(const std::vector<std::string>& cells);
  CsvTable& row(const std::vector<double>& cells);
  std::string str() const;
  std::size_t rows() const { return rows_.size(); }

 private:
  std::vector<std::string> header_;
  std::vector<std::vector<std::string>> rows_;
};

void write_text(const std::string& path, const std::string& text);
std::string read_text(const std::string& path);
void write_json(const std::string& path, const json& j);
std::string dump_json(const json& j);

// Green tables stored on disk under content-hash keys.
class TableCache {
 public:
  TableCache(std::string dir, bool enabled);
  std::shared_ptr<const GreenTable> green(const StepLaw& law, int radius, GreenMethod method,
                                          const GreenOptions& opt = {});
  bool enabled() const { return enabled_; }
  int hits() const { return hits_; }
  int misses() const { return misses_; }

  static std::string green_key(const StepLaw& law, int radius, GreenMethod method, const GreenOptions& opt);

 private:
  std::string dir_;
  bool enabled_;
  int hits_ = 0, misses_ = 0;
};

void save_green(const std::string& path, const GreenTable& t);
// Returns null when the file is missing or does not match the law.
std::shared_ptr<GreenTable> load_green(const std::string& path, const StepLaw& law);

// Manifest with the resolved config, versions and artifact digests. The
// timestamp is the only field that differs between identical runs.
json make_manifest(const std::string& subcommand, const json& config, const std::vector<std::string>& artifacts);

}  // namespace brcap

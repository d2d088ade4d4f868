#include "brcap/io.hpp"

#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace brcap {

namespace fs = std::filesystem;

json module_versions() {
  json v;
  for (const char* m : {"lattice", "offspring", "brw_mc", "field_solver", "bcap", "snake", "riesz", "scaling_limit", "cli"})
    v[m] = kVersion;
  return v;
}

std::string fmt_num(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[64];
  auto r = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, r.ptr);
}

CsvTable& CsvTable::row(const std::vector<std::string>& cells) {
  if (cells.size() != header_.size()) throw ValidationError("CSV row has the wrong number of cells");
  rows_.push_back(cells);
  return *this;
}

CsvTable& CsvTable::row(const std::vector<double>& cells) {
  std::vector<std::string> s;
  s.reserve(cells.size());
  for (double c : cells) s.push_back(fmt_num(c));
  return row(s);
}

std::string CsvTable::str() const {
  std::string out;
  auto line = [&](const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (i) out += ',';
      out += cells[i];
    }
    out += '\n';
  };
  line(header_);
  for (const auto& r : rows_) line(r);
  return out;
}

void write_text(const std::string& path, const std::string& text) {
  const fs::path p(path);
  if (p.has_parent_path()) fs::create_directories(p.parent_path());
  std::ofstream f(path, std::ios::binary);
  if (!f) throw ValidationError("cannot write " + path);
  f << text;
}

std::string read_text(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw ValidationError("cannot read " + path);
  std::ostringstream s;
  s << f.rdbuf();
  return s.str();
}

std::string dump_json(const json& j) { return j.dump(2) + "\n"; }

void write_json(const std::string& path, const json& j) { write_text(path, dump_json(j)); }

namespace {

constexpr char kMagic[8] = {'B', 'R', 'C', 'G', 'R', 'N', '0', '1'};

template <class T>
void put(std::ofstream& f, const T& v) {
  f.write(reinterpret_cast<const char*>(&v), sizeof v);
}

template <class T>
bool get(std::ifstream& f, T& v) {
  return static_cast<bool>(f.read(reinterpret_cast<char*>(&v), sizeof v));
}

void put_vec(std::ofstream& f, const std::vector<double>& v) {
  put(f, static_cast<std::uint64_t>(v.size()));
  f.write(reinterpret_cast<const char*>(v.data()), static_cast<std::streamsize>(v.size() * sizeof(double)));
}

bool get_vec(std::ifstream& f, std::vector<double>& v) {
  std::uint64_t n = 0;
  if (!get(f, n) || n > (1ULL << 32)) return false;
  v.resize(n);
  return static_cast<bool>(f.read(reinterpret_cast<char*>(v.data()), static_cast<std::streamsize>(n * sizeof(double))));
}

}  // namespace

void save_green(const std::string& path, const GreenTable& t) {
  const fs::path p(path);
  if (p.has_parent_path()) fs::create_directories(p.parent_path());
  // Write to a temporary name first so readers never see a partial file.
  const std::string tmp = path + ".tmp";
  {
    std::ofstream f(tmp, std::ios::binary);
    if (!f) throw ValidationError("cannot write " + tmp);
    f.write(kMagic, sizeof kMagic);
    put(f, t.law.hash());
    put(f, static_cast<std::int32_t>(t.box->radius()));
    put(f, static_cast<std::int32_t>(t.box->free_dims()));
    put(f, static_cast<std::int32_t>(t.method));
    put(f, t.tol);
    put(f, static_cast<std::int32_t>(t.terms));
    put_vec(f, t.value);
    put_vec(f, t.lower);
    put_vec(f, t.upper);
  }
  fs::rename(tmp, path);
}

std::shared_ptr<GreenTable> load_green(const std::string& path, const StepLaw& law) {
  std::ifstream f(path, std::ios::binary);
  if (!f) return nullptr;
  char magic[sizeof kMagic];
  if (!f.read(magic, sizeof magic) || std::memcmp(magic, kMagic, sizeof magic) != 0) return nullptr;
  std::uint64_t h = 0;
  std::int32_t radius = 0, free_dims = 0, method = 0, terms = 0;
  double tol = 0.0;
  if (!get(f, h) || h != law.hash()) return nullptr;
  if (!get(f, radius) || !get(f, free_dims) || !get(f, method) || !get(f, tol) || !get(f, terms)) return nullptr;
  auto t = std::make_shared<GreenTable>();
  t->law = law;
  t->box = std::make_shared<const Box>(law.dim, radius, 0, free_dims);
  t->method = static_cast<GreenMethod>(method);
  t->tol = tol;
  t->terms = terms;
  if (!get_vec(f, t->value) || !get_vec(f, t->lower) || !get_vec(f, t->upper)) return nullptr;
  if (t->value.size() != t->box->size()) return nullptr;
  return t;
}

TableCache::TableCache(std::string dir, bool enabled) : dir_(std::move(dir)), enabled_(enabled && !dir_.empty()) {}

std::string TableCache::green_key(const StepLaw& law, int radius, GreenMethod method, const GreenOptions& opt) {
  Digest h;
  h.add("green").add(std::int64_t(law.hash())).add(std::int64_t(radius)).add(to_string(method));
  h.add(opt.tol).add(std::int64_t(opt.min_terms)).add(std::int64_t(opt.max_terms)).add(std::int64_t(opt.walk_radius));
  h.add(kVersion);
  return h.hex();
}

std::shared_ptr<const GreenTable> TableCache::green(const StepLaw& law, int radius, GreenMethod method,
                                                    const GreenOptions& opt) {
  if (!enabled_) {
    ++misses_;
    return std::make_shared<const GreenTable>(green_table(law, radius, method, opt));
  }
  const std::string path = (fs::path(dir_) / ("green-" + green_key(law, radius, method, opt) + ".bin")).string();
  if (auto t = load_green(path, law)) {
    ++hits_;
    return t;
  }
  ++misses_;
  auto t = std::make_shared<const GreenTable>(green_table(law, radius, method, opt));
  save_green(path, *t);
  return t;
}

json make_manifest(const std::string& subcommand, const json& config, const std::vector<std::string>& artifacts) {
  json m;
  m["schema"] = kJsonSchema;
  m["subcommand"] = subcommand;
  m["config"] = config;
  m["versions"] = module_versions();
  json arts = json::array();
  for (const auto& a : artifacts) {
    Digest h;
    h.add(read_text(a));
    arts.push_back({{"path", fs::path(a).filename().string()}, {"digest", h.hex()}});
  }
  m["artifacts"] = arts;
  // SOURCE_DATE_EPOCH pins the timestamp for reproducible manifests.
  if (const char* epoch = std::getenv("SOURCE_DATE_EPOCH")) {
    m["timestamp"] = std::stoll(epoch);
  } else {
    const auto now = std::chrono::system_clock::now().time_since_epoch();
    m["timestamp"] = std::chrono::duration_cast<std::chrono::seconds>(now).count();
  }
  return m;
}

}  // namespace brcap

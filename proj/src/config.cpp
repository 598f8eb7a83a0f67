#include "ganforge/config.hpp"

#include <cctype>

#include "ganforge/bytes.hpp"
#include "ganforge/errors.hpp"
#include "ganforge/models.hpp"

namespace ganforge {

Precision parse_precision(const std::string& name) {
  if (name == "f32") return Precision::F32;
  if (name == "f64") return Precision::F64;
  throw ConfigError("precision must be 'f32' or 'f64', got '" + name + "'");
}

std::string precision_name(Precision p) { return p == Precision::F32 ? "f32" : "f64"; }

namespace {

std::string trim(const std::string& s) {
  size_t a = 0, b = s.size();
  while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
  while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
  return s.substr(a, b - a);
}

class FieldParser {
 public:
  FieldParser(const std::string& origin, size_t line, const std::string& section,
              const std::string& key, const std::string& value)
      : origin_(origin), line_(line), section_(section), key_(key), value_(value) {}

  [[noreturn]] void fail(const std::string& msg) const {
    throw ConfigError(origin_ + ": line " + std::to_string(line_) + ": [" + section_ + "] " +
                      key_ + ": " + msg);
  }

  long integer(long lo, long hi) const {
    try {
      size_t used = 0;
      const long v = std::stol(value_, &used);
      if (used != value_.size()) throw std::invalid_argument(value_);
      if (v < lo || v > hi)
        fail("value " + value_ + " outside [" + std::to_string(lo) + ", " + std::to_string(hi) +
             "]");
      return v;
    } catch (const ConfigError&) {
      throw;
    } catch (const std::exception&) {
      fail("expected integer, got '" + value_ + "'");
    }
  }

  uint64_t unsigned64() const {
    try {
      size_t used = 0;
      const unsigned long long v = std::stoull(value_, &used);
      if (used != value_.size()) throw std::invalid_argument(value_);
      return v;
    } catch (const std::exception&) {
      fail("expected unsigned integer, got '" + value_ + "'");
    }
  }

  double real(double lo, double hi) const {
    try {
      size_t used = 0;
      const double v = std::stod(value_, &used);
      if (used != value_.size()) throw std::invalid_argument(value_);
      if (!(v >= lo) || !(v <= hi))
        fail("value " + value_ + " outside [" + std::to_string(lo) + ", " + std::to_string(hi) +
             "]");
      return v;
    } catch (const ConfigError&) {
      throw;
    } catch (const std::exception&) {
      fail("expected number, got '" + value_ + "'");
    }
  }

  bool boolean() const {
    if (value_ == "true") return true;
    if (value_ == "false") return false;
    fail("expected 'true' or 'false', got '" + value_ + "'");
  }

  template <typename F>
  auto parsed(F&& f) const {
    try {
      return f(value_);
    } catch (const ConfigError& e) {
      fail(e.what());
    }
  }

  const std::string& str() const { return value_; }

 private:
  const std::string& origin_;
  size_t line_;
  const std::string& section_;
  const std::string& key_;
  const std::string& value_;
};

}  // namespace

RunConfig parse_run_config(const std::string& text, const std::string& origin) {
  RunConfig cfg;
  cfg.source_text = text;

  std::string section;
  size_t line_no = 0;
  size_t start = 0;
  while (start <= text.size()) {
    size_t end = text.find('\n', start);
    if (end == std::string::npos) end = text.size();
    std::string line = text.substr(start, end - start);
    start = end + 1;
    ++line_no;
    if (end == text.size() && line.empty() && start > text.size()) break;

    const size_t hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    line = trim(line);
    if (line.empty()) continue;

    if (line.front() == '[') {
      if (line.back() != ']')
        throw ConfigError(origin + ": line " + std::to_string(line_no) +
                          ": unterminated section header '" + line + "'");
      section = trim(line.substr(1, line.size() - 2));
      if (section != "run" && section != "model" && section != "data" && section != "latent" &&
          section != "train")
        throw ConfigError(origin + ": line " + std::to_string(line_no) + ": unknown section [" +
                          section + "]");
      continue;
    }

    const size_t eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError(origin + ": line " + std::to_string(line_no) +
                        ": expected 'key = value', got '" + line + "'");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (section.empty())
      throw ConfigError(origin + ": line " + std::to_string(line_no) + ": key '" + key +
                        "' appears before any [section] header");
    if (key.empty())
      throw ConfigError(origin + ": line " + std::to_string(line_no) + ": empty key");

    const FieldParser field(origin, line_no, section, key, value);
    bool known = true;
    if (section == "run") {
      if (key == "seed") cfg.seed = field.unsigned64();
      else if (key == "precision")
        cfg.precision = field.parsed([](const std::string& v) { return parse_precision(v); });
      else if (key == "checkpoint_dir") cfg.checkpoint_dir = field.str();
      else if (key == "checkpoint_interval") cfg.checkpoint_interval = field.integer(1, 1000000000L);
      else known = false;
    } else if (section == "model") {
      if (key == "resolution") cfg.resolution = static_cast<int>(field.integer(1, 1 << 20));
      else if (key == "width_multiplier") cfg.width_multiplier = field.real(1e-6, 64.0);
      else known = false;
    } else if (section == "data") {
      if (key == "dir") cfg.data_dir = field.str();
      else if (key == "batch_override")
        cfg.batch_override = static_cast<int>(field.integer(1, 1 << 20));
      else known = false;
    } else if (section == "latent") {
      if (key == "dim") cfg.latent_dim = static_cast<int>(field.integer(1, 1 << 20));
      else known = false;
    } else {  // train
      if (key == "total_steps") cfg.total_steps = field.integer(1, 4000000000L);
      else if (key == "alt_interval") cfg.alt_interval = static_cast<int>(field.integer(1, 1 << 30));
      else if (key == "guard_window") cfg.guard_window = static_cast<int>(field.integer(1, 1 << 30));
      else if (key == "d_loss_band") cfg.d_loss_band = field.real(1e-12, 1e12);
      else if (key == "g_loss_band") cfg.g_loss_band = field.real(1e-12, 1e12);
      else if (key == "learning_rate") cfg.learning_rate = field.real(1e-12, 1.0);
      else if (key == "beta1") cfg.beta1 = field.real(0.0, 0.9999999);
      else if (key == "beta2") cfg.beta2 = field.real(0.0, 0.9999999);
      else if (key == "g_loss_mode")
        cfg.g_loss_mode = field.parsed([](const std::string& v) { return parse_g_loss_mode(v); });
      else if (key == "schedule_mode")
        cfg.schedule_mode =
            field.parsed([](const std::string& v) { return parse_schedule_mode(v); });
      else if (key == "halt_on_warn") cfg.halt_on_warn = field.boolean();
      else known = false;
    }
    if (!known)
      throw ConfigError(origin + ": line " + std::to_string(line_no) + ": unknown key '" + key +
                        "' in section [" + section + "]");
  }

  if (cfg.resolution == 0)
    throw ConfigError(origin + ": [model] resolution is required");
  resolve_stages(cfg.resolution);
  return cfg;
}

RunConfig load_run_config(const std::string& path) {
  const auto bytes = read_file(path);
  return parse_run_config(std::string(bytes.begin(), bytes.end()), path);
}

int scheduled_batch(const RunConfig& cfg) {
  return batch_size_for(cfg.resolution, cfg.batch_override);
}

}  // namespace ganforge

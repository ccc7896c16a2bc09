#include <charconv>
#include <cstdlib>
#include <functional>
#include <map>
#include <string>

#include "lwvc/codec.hpp"
#include "lwvc/error.hpp"

namespace lwvc {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

struct Line {
  std::size_t number;
  std::string key;
  std::string value;

  [[noreturn]] void bad(const std::string& why) const {
    fail(ErrorKind::Config, "config line " + std::to_string(number) + " (" + key + "): " + why);
  }

  double real() const {
    char* end = nullptr;
    const double v = std::strtod(value.c_str(), &end);
    if (value.empty() || end != value.c_str() + value.size()) bad("expected a number, got '" + value + "'");
    return v;
  }

  int integer() const {
    int v = 0;
    const auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), v);
    if (ec != std::errc{} || ptr != value.data() + value.size()) bad("expected an integer, got '" + value + "'");
    return v;
  }

  bool flag() const {
    if (value == "1" || value == "true" || value == "yes" || value == "on") return true;
    if (value == "0" || value == "false" || value == "no" || value == "off") return false;
    bad("expected a boolean, got '" + value + "'");
  }

  std::vector<int> integers() const {
    std::vector<int> out;
    std::string_view rest = value;
    while (!rest.empty()) {
      const auto comma = rest.find(',');
      const std::string_view item = trim(rest.substr(0, comma));
      int v = 0;
      const auto [ptr, ec] = std::from_chars(item.data(), item.data() + item.size(), v);
      if (item.empty() || ec != std::errc{} || ptr != item.data() + item.size()) {
        bad("expected a comma-separated integer list");
      }
      out.push_back(v);
      rest = comma == std::string_view::npos ? std::string_view{} : rest.substr(comma + 1);
    }
    return out;
  }
};

using Setter = std::function<void(CodecConfig&, const Line&)>;

const std::map<std::string, Setter>& setters() {
  static const std::map<std::string, Setter> table = [] {
    std::map<std::string, Setter> t;
    t["q"] = [](CodecConfig& c, const Line& l) { c.quant.q = l.real(); };
    t["q_num"] = [](CodecConfig& c, const Line& l) { c.quant.q_num = l.integer(); };
    t["lambda_min"] = [](CodecConfig& c, const Line& l) { c.quant.lambda_min = l.real(); };
    t["lambda_max"] = [](CodecConfig& c, const Line& l) { c.quant.lambda_max = l.real(); };
    t["qp_low_min"] = [](CodecConfig& c, const Line& l) { c.quant.qp_low.lo = l.real(); };
    t["qp_low_max"] = [](CodecConfig& c, const Line& l) { c.quant.qp_low.hi = l.real(); };
    t["qp_high_min"] = [](CodecConfig& c, const Line& l) { c.quant.qp_high.lo = l.real(); };
    t["qp_high_max"] = [](CodecConfig& c, const Line& l) { c.quant.qp_high.hi = l.real(); };
    for (int j = 1; j <= kMaxTemporalLevels; ++j) {
      const auto k = static_cast<std::size_t>(j - 1);
      const std::string n = std::to_string(j);
      t["q_scale_" + n + "_min"] = [k](CodecConfig& c, const Line& l) { c.quant.q_scale[k].lo = l.real(); };
      t["q_scale_" + n + "_max"] = [k](CodecConfig& c, const Line& l) { c.quant.q_scale[k].hi = l.real(); };
      t["lambda_mv_" + n + "_min"] = [k](CodecConfig& c, const Line& l) { c.quant.lambda_mv[k].lo = l.real(); };
      t["lambda_mv_" + n + "_max"] = [k](CodecConfig& c, const Line& l) { c.quant.lambda_mv[k].hi = l.real(); };
      t["search_range_" + n] = [k](CodecConfig& c, const Line& l) { c.search_range[k] = l.integer(); };
    }
    t["search_range"] = [](CodecConfig& c, const Line& l) { c.search_range.fill(l.integer()); };
    t["block_size"] = [](CodecConfig& c, const Line& l) { c.block_size = l.integer(); };
    t["gop"] = [](CodecConfig& c, const Line& l) { c.gop.fixed_size = l.value == "auto" ? 0 : l.integer(); };
    t["gop_candidates"] = [](CodecConfig& c, const Line& l) { c.gop.candidates = l.integers(); };
    t["gop_selection"] = [](CodecConfig& c, const Line& l) {
      if (l.value == "heuristic") {
        c.gop.selection = GopSelection::Heuristic;
      } else if (l.value == "exhaustive") {
        c.gop.selection = GopSelection::Exhaustive;
      } else {
        l.bad("expected heuristic or exhaustive");
      }
    };
    t["gop_threshold"] = [](CodecConfig& c, const Line& l) { c.gop.threshold = l.real(); };
    t["gop_fallback_threshold"] = [](CodecConfig& c, const Line& l) { c.gop.fallback_threshold = l.real(); };
    t["lossless"] = [](CodecConfig& c, const Line& l) { c.lossless = l.flag(); };
    t["kernel"] = [](CodecConfig& c, const Line& l) {
      if (l.value == "5/3" || l.value == "53") {
        c.kernel = Kernel::LeGall53;
      } else if (l.value == "9/7" || l.value == "97") {
        c.kernel = Kernel::Cdf97;
      } else {
        l.bad("expected 5/3 or 9/7");
      }
    };
    t["spatial_levels"] = [](CodecConfig& c, const Line& l) { c.spatial_levels = l.integer(); };
    return t;
  }();
  return table;
}

}  // namespace

CodecConfig parse_config(std::string_view text, CodecConfig base) {
  std::size_t number = 0;
  while (!text.empty()) {
    const auto eol = text.find('\n');
    std::string_view raw = text.substr(0, eol);
    text = eol == std::string_view::npos ? std::string_view{} : text.substr(eol + 1);
    ++number;
    if (const auto hash = raw.find('#'); hash != std::string_view::npos) raw = raw.substr(0, hash);
    raw = trim(raw);
    if (raw.empty()) continue;
    const auto eq = raw.find('=');
    if (eq == std::string_view::npos) {
      fail(ErrorKind::Config, "config line " + std::to_string(number) + ": expected key = value");
    }
    const Line line{number, std::string(trim(raw.substr(0, eq))), std::string(trim(raw.substr(eq + 1)))};
    const auto it = setters().find(line.key);
    if (it == setters().end()) line.bad("unknown key");
    it->second(base, line);
  }
  return base;
}

CodecConfig load_config(const std::string& path, CodecConfig base) {
  const auto bytes = read_file(path);
  try {
    return parse_config(std::string_view(reinterpret_cast<const char*>(bytes.data()), bytes.size()), base);
  } catch (const Error& e) {
    throw Error(e.kind(), path + ": " + e.what());
  }
}

}  // namespace lwvc

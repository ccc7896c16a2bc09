#include "lwvc/metrics.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <sstream>

#include "lwvc/error.hpp"

namespace lwvc {

namespace {

void check_geometry(const Frame& a, const Frame& b) {
  if (a.width() != b.width() || a.height() != b.height() || a.bit_depth() != b.bit_depth()) {
    fail(ErrorKind::Argument, "metrics: frame geometry or bit depth mismatch");
  }
}

struct ErrorSums {
  std::array<double, 3> sse{};
  std::array<double, 3> count{};

  void add(const Frame& ref, const Frame& dist) {
    for (int c = 0; c < 3; ++c) {
      auto r = ref.plane(c).samples();
      auto d = dist.plane(c).samples();
      double s = 0.0;
      for (std::size_t i = 0; i < r.size(); ++i) {
        const double e = static_cast<double>(r[i]) - d[i];
        s += e * e;
      }
      sse[c] += s;
      count[c] += static_cast<double>(r.size());
    }
  }

  PsnrReport report(int bit_depth) const {
    PsnrReport r;
    r.y = psnr_from_mse(sse[0] / count[0], bit_depth);
    r.cb = psnr_from_mse(sse[1] / count[1], bit_depth);
    r.cr = psnr_from_mse(sse[2] / count[2], bit_depth);
    r.combined = psnr_from_mse((sse[0] + sse[1] + sse[2]) / (count[0] + count[1] + count[2]), bit_depth);
    r.weighted_611 = (6.0 * r.y + r.cb + r.cr) / 8.0;
    return r;
  }
};

}  // namespace

double psnr_from_mse(double mse_value, int bit_depth) {
  if (mse_value <= 0.0) return kInfinitePsnr;
  const double peak = static_cast<double>((1 << bit_depth) - 1);
  return 10.0 * std::log10(peak * peak / mse_value);
}

double mse(const Frame& ref, const Frame& dist) {
  check_geometry(ref, dist);
  ErrorSums sums;
  sums.add(ref, dist);
  return (sums.sse[0] + sums.sse[1] + sums.sse[2]) / (sums.count[0] + sums.count[1] + sums.count[2]);
}

PsnrReport psnr(const Frame& ref, const Frame& dist) {
  check_geometry(ref, dist);
  ErrorSums sums;
  sums.add(ref, dist);
  return sums.report(ref.bit_depth());
}

PsnrReport psnr(const VideoSequence& ref, const VideoSequence& dist) {
  if (ref.size() != dist.size() || ref.empty()) {
    fail(ErrorKind::Argument, "metrics: sequences must be nonempty and of equal length");
  }
  ErrorSums sums;
  for (std::size_t i = 0; i < ref.size(); ++i) {
    check_geometry(ref.frame(i), dist.frame(i));
    sums.add(ref.frame(i), dist.frame(i));
  }
  return sums.report(ref.bit_depth());
}

namespace {

constexpr int kScales = 5;
constexpr std::array<double, kScales> kScaleWeights{0.0448, 0.2856, 0.3001, 0.2363, 0.1333};
constexpr int kWindow = 11;
constexpr double kSigma = 1.5;
constexpr int kMinExtent = 176;

std::array<double, kWindow> gaussian_taps() {
  std::array<double, kWindow> taps{};
  double sum = 0.0;
  for (int i = 0; i < kWindow; ++i) {
    const double x = i - kWindow / 2;
    taps[i] = std::exp(-(x * x) / (2.0 * kSigma * kSigma));
    sum += taps[i];
  }
  for (auto& t : taps) t /= sum;
  return taps;
}

// Separable Gaussian filtering with 'valid' output.
RealPlane filter_valid(const RealPlane& in) {
  static const auto taps = gaussian_taps();
  const int ow = in.width() - kWindow + 1;
  const int oh = in.height() - kWindow + 1;
  RealPlane horiz(ow, in.height());
  for (int y = 0; y < in.height(); ++y) {
    for (int x = 0; x < ow; ++x) {
      double s = 0.0;
      for (int k = 0; k < kWindow; ++k) s += taps[k] * in(x + k, y);
      horiz(x, y) = s;
    }
  }
  RealPlane out(ow, oh);
  for (int y = 0; y < oh; ++y) {
    for (int x = 0; x < ow; ++x) {
      double s = 0.0;
      for (int k = 0; k < kWindow; ++k) s += taps[k] * horiz(x, y + k);
      out(x, y) = s;
    }
  }
  return out;
}

RealPlane product(const RealPlane& a, const RealPlane& b) {
  RealPlane out(a.width(), a.height());
  auto pa = a.samples();
  auto pb = b.samples();
  auto po = out.samples();
  for (std::size_t i = 0; i < po.size(); ++i) po[i] = pa[i] * pb[i];
  return out;
}

RealPlane downsample_average(const RealPlane& in) {
  RealPlane out((in.width() + 1) / 2, (in.height() + 1) / 2);
  for (int y = 0; y < out.height(); ++y) {
    for (int x = 0; x < out.width(); ++x) {
      out(x, y) = (in.clamped(2 * x, 2 * y) + in.clamped(2 * x + 1, 2 * y) + in.clamped(2 * x, 2 * y + 1) +
                   in.clamped(2 * x + 1, 2 * y + 1)) / 4.0;
    }
  }
  return out;
}

// Mean contrast-structure term and mean full SSIM at one scale.
std::pair<double, double> ssim_terms(const RealPlane& a, const RealPlane& b, double c1, double c2) {
  const RealPlane mu_a = filter_valid(a);
  const RealPlane mu_b = filter_valid(b);
  const RealPlane aa = filter_valid(product(a, a));
  const RealPlane bb = filter_valid(product(b, b));
  const RealPlane ab = filter_valid(product(a, b));
  double cs_sum = 0.0, ssim_sum = 0.0;
  const auto n = mu_a.size();
  for (std::size_t i = 0; i < n; ++i) {
    const double ma = mu_a.samples()[i], mb = mu_b.samples()[i];
    const double va = aa.samples()[i] - ma * ma;
    const double vb = bb.samples()[i] - mb * mb;
    const double cov = ab.samples()[i] - ma * mb;
    const double cs = (2.0 * cov + c2) / (va + vb + c2);
    const double lum = (2.0 * ma * mb + c1) / (ma * ma + mb * mb + c1);
    cs_sum += cs;
    ssim_sum += lum * cs;
  }
  return {cs_sum / static_cast<double>(n), ssim_sum / static_cast<double>(n)};
}

}  // namespace

double ms_ssim(const IntPlane& ref, const IntPlane& dist, int bit_depth) {
  if (ref.width() != dist.width() || ref.height() != dist.height()) {
    fail(ErrorKind::Argument, "ms-ssim: plane dimensions differ");
  }
  if (ref.width() < kMinExtent || ref.height() < kMinExtent) {
    fail(ErrorKind::Argument, "ms-ssim: needs at least " + std::to_string(kMinExtent) + "x" +
                                  std::to_string(kMinExtent) + " for five scales; fewer scales are not supported");
  }
  if (ref == dist) return 1.0;
  const double peak = static_cast<double>((1 << bit_depth) - 1);
  const double c1 = (0.01 * peak) * (0.01 * peak);
  const double c2 = (0.03 * peak) * (0.03 * peak);
  RealPlane a = plane_cast<double>(ref);
  RealPlane b = plane_cast<double>(dist);
  double result = 1.0;
  for (int s = 0; s < kScales; ++s) {
    const auto [cs, full] = ssim_terms(a, b, c1, c2);
    const double term = std::max(0.0, s + 1 < kScales ? cs : full);
    result *= std::pow(term, kScaleWeights[s]);
    if (s + 1 < kScales) {
      a = downsample_average(a);
      b = downsample_average(b);
    }
  }
  return std::min(result, 1.0);
}

double ms_ssim(const VideoSequence& ref, const VideoSequence& dist) {
  if (ref.size() != dist.size() || ref.empty()) {
    fail(ErrorKind::Argument, "metrics: sequences must be nonempty and of equal length");
  }
  double sum = 0.0;
  for (std::size_t i = 0; i < ref.size(); ++i) {
    check_geometry(ref.frame(i), dist.frame(i));
    sum += ms_ssim(ref.frame(i).luma(), dist.frame(i).luma(), ref.bit_depth());
  }
  return sum / static_cast<double>(ref.size());
}

double ms_ssim_db(double value) {
  if (value >= 1.0) return kInfinitePsnr;
  return -10.0 * std::log10(1.0 - value);
}

std::vector<std::string> curve_warnings(const RDCurve& curve) {
  std::vector<std::string> warnings;
  for (std::size_t i = 1; i < curve.points.size(); ++i) {
    if (curve.points[i].quality <= curve.points[i - 1].quality) {
      warnings.push_back("curve '" + curve.label + "': quality does not increase between points " +
                         std::to_string(i - 1) + " and " + std::to_string(i));
    }
  }
  return warnings;
}

namespace {

struct Cubic {
  std::array<double, 4> c{};  // in normalized abscissa u = (x - center) / scale
  double center = 0.0;
  double scale = 1.0;

  // Integral of the fit over [lo, hi] in original units.
  double integral(double lo, double hi) const {
    auto antiderivative = [&](double x) {
      const double u = (x - center) / scale;
      return scale * (c[0] * u + c[1] * u * u / 2.0 + c[2] * u * u * u / 3.0 + c[3] * u * u * u * u / 4.0);
    };
    return antiderivative(hi) - antiderivative(lo);
  }
};

Cubic fit_cubic(const std::vector<RDPoint>& pts) {
  Cubic fit;
  double lo = pts.front().quality, hi = lo;
  for (const auto& p : pts) {
    lo = std::min(lo, p.quality);
    hi = std::max(hi, p.quality);
  }
  fit.center = (lo + hi) / 2.0;
  fit.scale = (hi - lo) / 2.0;
  if (!(fit.scale > 0.0)) fail(ErrorKind::Domain, "bd-rate: curve has no quality spread");

  // Normal equations in the normalized abscissa.
  std::array<std::array<double, 5>, 4> m{};
  for (const auto& p : pts) {
    const double u = (p.quality - fit.center) / fit.scale;
    const double y = std::log(p.rate);
    std::array<double, 4> powers{1.0, u, u * u, u * u * u};
    for (int r = 0; r < 4; ++r) {
      for (int c = 0; c < 4; ++c) m[r][c] += powers[r] * powers[c];
      m[r][4] += powers[r] * y;
    }
  }
  for (int col = 0; col < 4; ++col) {
    int pivot = col;
    for (int r = col + 1; r < 4; ++r) {
      if (std::fabs(m[r][col]) > std::fabs(m[pivot][col])) pivot = r;
    }
    std::swap(m[col], m[pivot]);
    if (std::fabs(m[col][col]) < 1e-12) fail(ErrorKind::Domain, "bd-rate: degenerate curve fit");
    for (int r = 0; r < 4; ++r) {
      if (r == col) continue;
      const double f = m[r][col] / m[col][col];
      for (int c = col; c < 5; ++c) m[r][c] -= f * m[col][c];
    }
  }
  for (int r = 0; r < 4; ++r) fit.c[r] = m[r][4] / m[r][r];
  return fit;
}

void check_curve(const RDCurve& curve, const char* role) {
  if (curve.points.size() < 4) {
    fail(ErrorKind::Argument, std::string("bd-rate: ") + role + " curve needs at least 4 points, has " +
                                  std::to_string(curve.points.size()));
  }
  for (std::size_t i = 0; i < curve.points.size(); ++i) {
    const auto& p = curve.points[i];
    if (!(p.rate > 0.0) || !std::isfinite(p.rate) || !std::isfinite(p.quality)) {
      fail(ErrorKind::Argument, std::string("bd-rate: ") + role + " curve has an invalid point");
    }
    if (i > 0 && !(p.rate > curve.points[i - 1].rate)) {
      fail(ErrorKind::Argument, std::string("bd-rate: ") + role + " curve rates must strictly increase");
    }
  }
}

}  // namespace

double bd_rate(const RDCurve& anchor, const RDCurve& test) {
  check_curve(anchor, "anchor");
  check_curve(test, "test");
  auto range = [](const RDCurve& c) {
    double lo = c.points.front().quality, hi = lo;
    for (const auto& p : c.points) {
      lo = std::min(lo, p.quality);
      hi = std::max(hi, p.quality);
    }
    return std::pair{lo, hi};
  };
  const auto [alo, ahi] = range(anchor);
  const auto [tlo, thi] = range(test);
  const double lo = std::max(alo, tlo);
  const double hi = std::min(ahi, thi);
  if (!(hi > lo)) fail(ErrorKind::Domain, "bd-rate: curves do not overlap in quality");
  const Cubic fa = fit_cubic(anchor.points);
  const Cubic ft = fit_cubic(test.points);
  const double mean_log_diff = (ft.integral(lo, hi) - fa.integral(lo, hi)) / (hi - lo);
  return 100.0 * (std::exp(mean_log_diff) - 1.0);
}

std::string emit_rd_csv(std::span<const RDCurve> curves) {
  std::ostringstream os;
  os << "label,rate,rate_unit,quality,metric\n";
  char buf[64];
  for (const auto& c : curves) {
    for (const auto& p : c.points) {
      os << c.label << ',';
      std::snprintf(buf, sizeof buf, "%.17g", p.rate);
      os << buf << ',' << c.rate_unit << ',';
      std::snprintf(buf, sizeof buf, "%.17g", p.quality);
      os << buf << ',' << c.metric << '\n';
    }
  }
  return os.str();
}

namespace {

double parse_double(std::string_view s, std::size_t line) {
  std::string tmp(s);
  char* end = nullptr;
  const double v = std::strtod(tmp.c_str(), &end);
  if (tmp.empty() || end != tmp.c_str() + tmp.size()) {
    fail(ErrorKind::Format, "csv line " + std::to_string(line) + ": bad number '" + tmp + "'");
  }
  return v;
}

}  // namespace

std::vector<RDCurve> parse_rd_csv(std::string_view text) {
  std::vector<RDCurve> curves;
  std::size_t line_no = 0;
  bool header_seen = false;
  while (!text.empty()) {
    const auto eol = text.find('\n');
    std::string_view line = text.substr(0, eol);
    text = eol == std::string_view::npos ? std::string_view{} : text.substr(eol + 1);
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.empty()) continue;
    if (!header_seen) {
      if (line != "label,rate,rate_unit,quality,metric") {
        fail(ErrorKind::Format, "csv: unexpected header '" + std::string(line) + "'");
      }
      header_seen = true;
      continue;
    }
    std::vector<std::string_view> fields;
    std::size_t start = 0;
    while (true) {
      const auto comma = line.find(',', start);
      fields.push_back(line.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start));
      if (comma == std::string_view::npos) break;
      start = comma + 1;
    }
    if (fields.size() != 5) {
      fail(ErrorKind::Format, "csv line " + std::to_string(line_no) + ": expected 5 fields");
    }
    const std::string label(fields[0]), unit(fields[2]), metric(fields[4]);
    auto it = std::find_if(curves.begin(), curves.end(), [&](const RDCurve& c) {
      return c.label == label && c.rate_unit == unit && c.metric == metric;
    });
    if (it == curves.end()) {
      curves.push_back({label, unit, metric, {}});
      it = std::prev(curves.end());
    }
    it->points.push_back({parse_double(fields[1], line_no), parse_double(fields[3], line_no)});
  }
  if (!header_seen) fail(ErrorKind::Format, "csv: empty input");
  return curves;
}

}  // namespace lwvc

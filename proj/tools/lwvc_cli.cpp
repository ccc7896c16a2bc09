#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "lwvc/bitstream.hpp"
#include "lwvc/codec.hpp"
#include "lwvc/error.hpp"
#include "lwvc/media_io.hpp"
#include "lwvc/metrics.hpp"

namespace {

using namespace lwvc;

constexpr int kExitOk = 0;
constexpr int kExitIo = 1;
constexpr int kExitUsage = 2;
constexpr int kExitFormat = 3;
constexpr int kExitConfig = 4;

int exit_code(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::Format:
    case ErrorKind::Truncation:
    case ErrorKind::Unsupported:
    case ErrorKind::Consistency:
    case ErrorKind::Corruption:
      return kExitFormat;
    case ErrorKind::Config:
    case ErrorKind::Plan:
    case ErrorKind::LevelOverflow:
      return kExitConfig;
    case ErrorKind::Argument:
    case ErrorKind::Domain:
      return kExitUsage;
    case ErrorKind::Io:
      return kExitIo;
  }
  return kExitIo;
}

bool ends_with(const std::string& s, const std::string& suffix) {
  return s.size() >= suffix.size() && s.compare(s.size() - suffix.size(), suffix.size(), suffix) == 0;
}

struct RawGeometry {
  std::string size;  // WxH
  int bit_depth = 8;
  double fps = 30.0;
};

VideoSequence load_video(const std::string& path, const RawGeometry& raw) {
  const auto bytes = read_file(path);
  try {
    if (ends_with(path, ".y4m")) return parse_y4m(bytes);
    int w = 0, h = 0;
    char x = 0;
    std::istringstream is(raw.size);
    if (raw.size.empty() || !(is >> w >> x >> h) || x != 'x') {
      fail(ErrorKind::Argument, "raw input needs --size WxH");
    }
    const std::size_t frame_size = frame_byte_size(w, h, raw.bit_depth);
    if (bytes.size() % frame_size != 0) {
      fail(ErrorKind::Truncation, "raw input ends inside frame " + std::to_string(bytes.size() / frame_size));
    }
    const auto rate = FrameRate{static_cast<std::uint32_t>(std::lround(raw.fps * 1000.0)), 1000};
    return read_raw_yuv(bytes, w, h, raw.bit_depth, bytes.size() / frame_size, rate);
  } catch (const Error& e) {
    throw Error(e.kind(), path + ": " + e.what());
  }
}

void save_video(const std::string& path, const VideoSequence& video) {
  write_file(path, ends_with(path, ".y4m") ? write_y4m(video) : write_raw_yuv(video));
}

void add_raw_options(CLI::App* cmd, RawGeometry& raw) {
  cmd->add_option("--size", raw.size, "Frame size WxH for headerless .yuv input");
  cmd->add_option("--bit-depth", raw.bit_depth, "Sample bit depth for .yuv input")->check(CLI::IsMember({8, 10}));
  cmd->add_option("--fps", raw.fps, "Frame rate for .yuv input")->check(CLI::PositiveNumber);
}

struct EncodeOptions {
  std::optional<double> q;
  std::string gop;
  bool lossless = false;
  std::string config_path;
  std::string kernel;
  std::optional<int> spatial_levels;
  std::string selection;
};

void add_encode_options(CLI::App* cmd, EncodeOptions& o) {
  auto* q = cmd->add_option("--q", o.q, "Continuous quantization index in [0, 20]; 0 is finest")
                ->check(CLI::Range(0.0, 20.0));
  auto* lossless = cmd->add_flag("--lossless", o.lossless, "Lossless coding (integer 5/3, no quantization)");
  lossless->excludes(q);
  cmd->add_option("--gop", o.gop, "GOP size 1|2|4|8|16, or auto for content-adaptive selection");
  cmd->add_option("--gop-selection", o.selection, "Adaptive GOP mode: heuristic or exhaustive")
      ->check(CLI::IsMember({"heuristic", "exhaustive"}));
  cmd->add_option("--config", o.config_path, "key = value config file (default: $LWVC_CONFIG)");
  auto* kernel = cmd->add_option("--kernel", o.kernel, "Spatial wavelet: 5/3 or 9/7")
                     ->check(CLI::IsMember({"5/3", "9/7"}));
  lossless->excludes(kernel);
  cmd->add_option("--spatial-levels", o.spatial_levels, "Luma spatial decomposition levels (0 = automatic)")
      ->check(CLI::NonNegativeNumber);
}

CodecConfig build_config(const EncodeOptions& o) {
  CodecConfig config;
  std::string path = o.config_path;
  if (path.empty()) {
    if (const char* env = std::getenv("LWVC_CONFIG")) path = env;
  }
  if (!path.empty()) config = load_config(path);
  if (o.q) config.quant.q = *o.q;
  if (!o.gop.empty()) {
    if (o.gop == "auto") {
      config.gop.fixed_size = 0;
    } else {
      try {
        std::size_t used = 0;
        config.gop.fixed_size = std::stoi(o.gop, &used);
        if (used != o.gop.size()) throw std::invalid_argument(o.gop);
      } catch (const std::exception&) {
        fail(ErrorKind::Argument, "--gop expects 1, 2, 4, 8, 16 or auto, got '" + o.gop + "'");
      }
    }
  }
  if (o.selection == "exhaustive") config.gop.selection = GopSelection::Exhaustive;
  if (o.selection == "heuristic") config.gop.selection = GopSelection::Heuristic;
  if (o.lossless) config.lossless = true;
  if (config.lossless) config.kernel = Kernel::LeGall53;
  if (o.kernel == "5/3") config.kernel = Kernel::LeGall53;
  if (o.kernel == "9/7") config.kernel = Kernel::Cdf97;
  if (o.spatial_levels) config.spatial_levels = *o.spatial_levels;
  config.validate();
  return config;
}

std::vector<double> parse_q_list(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    char* end = nullptr;
    const double v = std::strtod(item.c_str(), &end);
    if (item.empty() || end != item.c_str() + item.size()) {
      fail(ErrorKind::Argument, "--q-list: bad value '" + item + "'");
    }
    if (v < 0.0 || v > 20.0) fail(ErrorKind::Argument, "--q-list: " + item + " outside [0, 20]");
    out.push_back(v);
  }
  if (out.empty()) fail(ErrorKind::Argument, "--q-list is empty");
  return out;
}

const RDCurve& pick_curve(const std::vector<RDCurve>& curves, const std::string& metric, const std::string& label,
                          const std::string& file) {
  for (const auto& c : curves) {
    if (c.metric == metric && (label.empty() || c.label == label)) return c;
  }
  fail(ErrorKind::Argument, file + ": no curve with metric '" + metric + "'" +
                                (label.empty() ? std::string() : " and label '" + label + "'"));
}

std::string format_db(double v) {
  if (std::isinf(v)) return "inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4f", v);
  return buf;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"lwvc: scalable wavelet video codec with motion-compensated temporal filtering"};
  app.require_subcommand(1);
  app.set_help_all_flag("--help-all", "Show help for every subcommand");

  RawGeometry raw;
  EncodeOptions enc_opts;
  std::string input, output, ref, dist, anchor, test, emit_csv, q_list, metric = "psnr", anchor_label, test_label,
      label;
  int drop = 0;
  int precision = 1;
  bool want_psnr = false, want_msssim = false;

  auto* encode = app.add_subcommand("encode", "Encode a .y4m or .yuv sequence");
  encode->add_option("--input", input, "Source video (.y4m, or .yuv with --size)")->required();
  encode->add_option("--output", output, "Output stream (.lwv)")->required();
  add_encode_options(encode, enc_opts);
  add_raw_options(encode, raw);

  auto* decode = app.add_subcommand("decode", "Decode a stream to .y4m or .yuv");
  decode->add_option("--input", input, "Input stream")->required();
  decode->add_option("--output", output, "Reconstructed video (.y4m or .yuv)")->required();
  decode->add_option("--drop-layers", drop, "Temporal layers to discard before decoding")
      ->check(CLI::NonNegativeNumber);

  auto* dropcmd = app.add_subcommand("drop", "Remove temporal layers from a stream");
  dropcmd->add_option("--input", input, "Input stream")->required();
  dropcmd->add_option("--output", output, "Output stream")->required();
  dropcmd->add_option("--layers", drop, "Number of finest temporal layers to remove")
      ->required()
      ->check(CLI::NonNegativeNumber);

  auto* metrics = app.add_subcommand("metrics", "Compare two videos");
  metrics->add_option("--ref", ref, "Reference video")->required();
  metrics->add_option("--dist", dist, "Distorted video")->required();
  metrics->add_flag("--psnr", want_psnr, "Report PSNR per plane and combined (default)");
  metrics->add_flag("--msssim", want_msssim, "Report luma MS-SSIM (frames of at least 176x176)");
  add_raw_options(metrics, raw);

  auto* bdrate = app.add_subcommand("bdrate", "Bjontegaard delta rate between two RD CSV files");
  bdrate->add_option("--anchor", anchor, "Anchor curve CSV")->required();
  bdrate->add_option("--test", test, "Test curve CSV")->required();
  bdrate->add_option("--metric", metric, "Quality metric to compare (psnr or ms-ssim-db)");
  bdrate->add_option("--anchor-label", anchor_label, "Curve label to use from the anchor CSV");
  bdrate->add_option("--test-label", test_label, "Curve label to use from the test CSV");
  bdrate->add_option("--precision", precision, "Digits after the decimal point")->check(CLI::Range(0, 17));

  auto* sweep = app.add_subcommand("sweep", "Encode, decode and measure over a list of q values");
  sweep->add_option("--input", input, "Source video")->required();
  sweep->add_option("--q-list", q_list, "Comma-separated q values, e.g. 0,5,10,15,20")->required();
  sweep->add_option("--emit-csv", emit_csv, "Write the RD CSV here instead of standard output");
  sweep->add_option("--label", label, "Curve label (default: input file name)");
  sweep->add_option("--gop", enc_opts.gop, "GOP size 1|2|4|8|16, or auto");
  sweep->add_option("--gop-selection", enc_opts.selection, "Adaptive GOP mode: heuristic or exhaustive")
      ->check(CLI::IsMember({"heuristic", "exhaustive"}));
  sweep->add_option("--config", enc_opts.config_path, "key = value config file (default: $LWVC_CONFIG)");
  sweep->add_option("--kernel", enc_opts.kernel, "Spatial wavelet: 5/3 or 9/7")->check(CLI::IsMember({"5/3", "9/7"}));
  sweep->add_option("--spatial-levels", enc_opts.spatial_levels, "Luma spatial decomposition levels (0 = automatic)")
      ->check(CLI::NonNegativeNumber);
  add_raw_options(sweep, raw);

  auto* dump = app.add_subcommand("dump-units", "List the units of a stream");
  dump->add_option("--input", input, "Input stream")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (encode->parsed()) {
      const CodecConfig config = build_config(enc_opts);
      const VideoSequence video = load_video(input, raw);
      const EncodeResult r = encode_sequence_detailed(video, config);
      write_file(output, r.bytes);
      std::cerr << "encoded " << video.size() << " frames in " << r.gop_sizes.size() << " GOPs, "
                << r.bytes.size() << " bytes\n";
    } else if (decode->parsed()) {
      const auto bytes = read_file(input);
      VideoSequence video;
      try {
        video = decode_sequence(bytes, drop);
      } catch (const Error& e) {
        throw Error(e.kind(), input + ": " + e.what());
      }
      save_video(output, video);
      std::cerr << "decoded " << video.size() << " frames\n";
    } else if (dropcmd->parsed()) {
      const auto bytes = read_file(input);
      std::vector<std::uint8_t> out;
      try {
        out = drop_layers(bytes, drop);
      } catch (const Error& e) {
        throw Error(e.kind(), input + ": " + e.what());
      }
      write_file(output, out);
    } else if (metrics->parsed()) {
      const VideoSequence a = load_video(ref, raw);
      const VideoSequence b = load_video(dist, raw);
      if (!want_psnr && !want_msssim) want_psnr = true;
      if (want_psnr) {
        const PsnrReport p = psnr(a, b);
        std::cout << "psnr_y " << format_db(p.y) << "\npsnr_cb " << format_db(p.cb) << "\npsnr_cr "
                  << format_db(p.cr) << "\npsnr " << format_db(p.combined) << "\n";
      }
      if (want_msssim) {
        char buf[32];
        std::snprintf(buf, sizeof buf, "%.6f", ms_ssim(a, b));
        std::cout << "msssim " << buf << "\n";
      }
    } else if (bdrate->parsed()) {
      auto load_curves = [](const std::string& path) {
        const auto bytes = read_file(path);
        try {
          return parse_rd_csv(std::string_view(reinterpret_cast<const char*>(bytes.data()), bytes.size()));
        } catch (const Error& e) {
          throw Error(e.kind(), path + ": " + e.what());
        }
      };
      const auto anchors = load_curves(anchor);
      const auto tests = load_curves(test);
      const RDCurve& a = pick_curve(anchors, metric, anchor_label, anchor);
      const RDCurve& t = pick_curve(tests, metric, test_label, test);
      for (const auto& w : curve_warnings(a)) std::cerr << "warning: " << w << "\n";
      for (const auto& w : curve_warnings(t)) std::cerr << "warning: " << w << "\n";
      char buf[64];
      std::snprintf(buf, sizeof buf, "%+.*f%%", precision, bd_rate(a, t));
      std::cout << buf << "\n";
    } else if (sweep->parsed()) {
      const auto qs = parse_q_list(q_list);
      CodecConfig base = build_config(enc_opts);
      const VideoSequence video = load_video(input, raw);
      const bool with_msssim = video.width() >= 176 && video.height() >= 176;
      if (label.empty()) {
        const auto slash = input.find_last_of('/');
        label = slash == std::string::npos ? input : input.substr(slash + 1);
      }
      RDCurve psnr_curve{label, "bpp", "psnr", {}};
      RDCurve msssim_curve{label, "bpp", "ms-ssim-db", {}};
      const double pixels = static_cast<double>(video.width()) * video.height() * video.size();
      for (double q : qs) {
        CodecConfig config = base;
        config.quant.q = q;
        const auto bytes = encode_sequence(video, config);
        const VideoSequence rec = decode_sequence(bytes);
        const double bpp = 8.0 * static_cast<double>(bytes.size()) / pixels;
        const double p = psnr(video, rec).combined;
        if (std::isfinite(p)) psnr_curve.points.push_back({bpp, p});
        if (with_msssim) {
          const double m = ms_ssim_db(ms_ssim(video, rec));
          if (std::isfinite(m)) msssim_curve.points.push_back({bpp, m});
        }
        std::cerr << "q " << q << ": " << bytes.size() << " bytes\n";
      }
      std::vector<RDCurve> curves{psnr_curve};
      if (with_msssim) curves.push_back(msssim_curve);
      const std::string csv = emit_rd_csv(curves);
      if (emit_csv.empty()) {
        std::cout << csv;
      } else {
        write_file(emit_csv, std::span<const std::uint8_t>(reinterpret_cast<const std::uint8_t*>(csv.data()),
                                                           csv.size()));
      }
    } else if (dump->parsed()) {
      const auto bytes = read_file(input);
      try {
        std::cout << dump_units(parse_stream(bytes));
      } catch (const Error& e) {
        throw Error(e.kind(), input + ": " + e.what());
      }
    }
  } catch (const Error& e) {
    std::cerr << "lwvc: " << to_string(e.kind()) << ": " << e.what() << "\n";
    return exit_code(e.kind());
  } catch (const std::bad_alloc&) {
    std::cerr << "lwvc: out of memory\n";
    return kExitIo;
  }
  return kExitOk;
}

#include <pybind11/numpy.h>
#include <pybind11/operators.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <optional>
#include <string>

#include "lwvc/bitstream.hpp"
#include "lwvc/codec.hpp"
#include "lwvc/error.hpp"
#include "lwvc/media_io.hpp"
#include "lwvc/metrics.hpp"
#include "lwvc/quant.hpp"

namespace py = pybind11;
using namespace lwvc;

namespace {

using Samples = py::array_t<std::int32_t, py::array::c_style | py::array::forcecast>;

IntPlane to_plane(const Samples& a) {
  if (a.ndim() != 2) throw py::value_error("plane must be a 2-D array");
  IntPlane p(static_cast<int>(a.shape(1)), static_cast<int>(a.shape(0)));
  std::copy(a.data(), a.data() + a.size(), p.samples().begin());
  return p;
}

Samples to_array(const IntPlane& p) {
  Samples a({p.height(), p.width()});
  std::copy(p.samples().begin(), p.samples().end(), a.mutable_data());
  return a;
}

py::bytes to_bytes(const std::vector<std::uint8_t>& v) {
  return py::bytes(reinterpret_cast<const char*>(v.data()), v.size());
}

std::span<const std::uint8_t> view(const std::string& s) {
  return {reinterpret_cast<const std::uint8_t*>(s.data()), s.size()};
}

VideoSequence make_video(const std::vector<std::tuple<Samples, Samples, Samples>>& frames, int bit_depth,
                         std::uint32_t rate_num, std::uint32_t rate_den) {
  std::vector<Frame> out;
  out.reserve(frames.size());
  for (const auto& [y, cb, cr] : frames) out.emplace_back(PlaneSet{to_plane(y), to_plane(cb), to_plane(cr)}, bit_depth);
  return VideoSequence(std::move(out), FrameRate{rate_num, rate_den});
}

Kernel parse_kernel(const std::string& name) {
  if (name == "5/3") return Kernel::LeGall53;
  if (name == "9/7") return Kernel::Cdf97;
  throw py::value_error("kernel must be '5/3' or '9/7'");
}

CodecConfig make_config(std::optional<double> q, const py::object& gop, bool lossless, std::optional<std::string> kernel,
                        int spatial_levels, const std::string& gop_selection, const std::string& config_text) {
  CodecConfig c = parse_config(config_text);
  if (q) c.quant.q = *q;
  if (py::isinstance<py::str>(gop)) {
    if (gop.cast<std::string>() != "auto") throw py::value_error("gop must be 1, 2, 4, 8, 16 or 'auto'");
    c.gop.fixed_size = 0;
  } else if (!gop.is_none()) {
    c.gop.fixed_size = gop.cast<int>();
  }
  if (gop_selection == "exhaustive") {
    c.gop.selection = GopSelection::Exhaustive;
  } else if (gop_selection != "heuristic") {
    throw py::value_error("gop_selection must be 'heuristic' or 'exhaustive'");
  }
  c.lossless = lossless;
  if (kernel) {
    c.kernel = parse_kernel(*kernel);
  } else if (lossless) {
    c.kernel = Kernel::LeGall53;
  }
  if (spatial_levels) c.spatial_levels = spatial_levels;
  return c;
}

const char* kind_name(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::Format: return "format";
    case ErrorKind::Truncation: return "truncation";
    case ErrorKind::Unsupported: return "unsupported";
    case ErrorKind::Config: return "config";
    case ErrorKind::Argument: return "argument";
    case ErrorKind::Consistency: return "consistency";
    case ErrorKind::LevelOverflow: return "level_overflow";
    case ErrorKind::Plan: return "plan";
    case ErrorKind::Corruption: return "corruption";
    case ErrorKind::Domain: return "domain";
    case ErrorKind::Io: return "io";
  }
  return "error";
}

RDCurve make_curve(const std::vector<std::pair<double, double>>& points) {
  RDCurve c;
  for (const auto& [rate, quality] : points) c.points.push_back({rate, quality});
  return c;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Scalable wavelet video codec with motion-compensated temporal filtering.";

  static py::exception<Error> error(m, "Error");
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const Error& e) {
      PyErr_SetObject(error.ptr(), py::make_tuple(kind_name(e.kind()), e.what()).ptr());
    }
  });

  py::class_<VideoSequence>(m, "Video")
      .def(py::init(&make_video), py::arg("frames"), py::arg("bit_depth") = 8, py::arg("rate_num") = 30,
           py::arg("rate_den") = 1, "Frames are (Y, Cb, Cr) 2-D integer arrays in 4:2:0 layout.")
      .def_static(
          "from_y4m", [](const py::bytes& b) { return parse_y4m(view(b)); }, py::arg("data"))
      .def("to_y4m", [](const VideoSequence& v) { return to_bytes(write_y4m(v)); })
      .def_static(
          "from_yuv",
          [](const py::bytes& b, int width, int height, int bit_depth, std::uint32_t rate_num, std::uint32_t rate_den) {
            const std::string s = b;
            const std::size_t n = s.size() / frame_byte_size(width, height, bit_depth);
            return read_raw_yuv(view(s), width, height, bit_depth, n, FrameRate{rate_num, rate_den});
          },
          py::arg("data"), py::arg("width"), py::arg("height"), py::arg("bit_depth") = 8, py::arg("rate_num") = 30,
          py::arg("rate_den") = 1)
      .def("to_yuv", [](const VideoSequence& v) { return to_bytes(write_raw_yuv(v)); })
      .def("__len__", &VideoSequence::size)
      .def("frame",
           [](const VideoSequence& v, std::size_t i) {
             const Frame& f = v.frame(i);
             return py::make_tuple(to_array(f.luma()), to_array(f.cb()), to_array(f.cr()));
           })
      .def_property_readonly("width", &VideoSequence::width)
      .def_property_readonly("height", &VideoSequence::height)
      .def_property_readonly("bit_depth", &VideoSequence::bit_depth)
      .def_property_readonly("frame_rate",
                             [](const VideoSequence& v) { return py::make_tuple(v.frame_rate().num, v.frame_rate().den); })
      .def(py::self == py::self);

  m.def(
      "encode",
      [](const VideoSequence& video, std::optional<double> q, const py::object& gop, bool lossless,
         std::optional<std::string> kernel, int spatial_levels, const std::string& gop_selection,
         const std::string& config) {
        const CodecConfig c = make_config(q, gop, lossless, kernel, spatial_levels, gop_selection, config);
        std::vector<std::uint8_t> bytes;
        {
          py::gil_scoped_release release;
          bytes = encode_sequence(video, c);
        }
        return to_bytes(bytes);
      },
      py::arg("video"), py::arg("q") = py::none(), py::arg("gop") = py::none(), py::arg("lossless") = false,
      py::arg("kernel") = py::none(), py::arg("spatial_levels") = 0, py::arg("gop_selection") = "heuristic",
      py::arg("config") = "", "Encode to a layered stream. `config` holds key = value lines applied first.");

  m.def(
      "decode",
      [](const py::bytes& stream, int drop_layers) {
        const std::string s = stream;
        py::gil_scoped_release release;
        return decode_sequence(view(s), drop_layers);
      },
      py::arg("stream"), py::arg("drop_layers") = 0);

  m.def(
      "drop_layers",
      [](const py::bytes& stream, int k) {
        const std::string s = stream;
        return to_bytes(drop_layers(view(s), k));
      },
      py::arg("stream"), py::arg("k"));

  m.def(
      "dump_units", [](const py::bytes& stream) { return dump_units(parse_stream(view(std::string(stream)))); },
      py::arg("stream"));

  m.def(
      "psnr",
      [](const VideoSequence& ref, const VideoSequence& dist) {
        const PsnrReport r = psnr(ref, dist);
        py::dict d;
        d["y"] = r.y;
        d["cb"] = r.cb;
        d["cr"] = r.cr;
        d["combined"] = r.combined;
        d["weighted_611"] = r.weighted_611;
        return d;
      },
      py::arg("ref"), py::arg("dist"));

  m.def(
      "ms_ssim", [](const Samples& ref, const Samples& dist, int bit_depth) {
        return ms_ssim(to_plane(ref), to_plane(dist), bit_depth);
      },
      py::arg("ref"), py::arg("dist"), py::arg("bit_depth") = 8, "Luma MS-SSIM of two 2-D planes.");

  m.def(
      "bd_rate",
      [](const std::vector<std::pair<double, double>>& anchor, const std::vector<std::pair<double, double>>& test) {
        return bd_rate(make_curve(anchor), make_curve(test));
      },
      py::arg("anchor"), py::arg("test"), "Points are (rate, quality) pairs; returns percent.");

  m.def(
      "interpolate_lambda", [](double q) { return interpolate_lambda(q, QuantConfig{}); }, py::arg("q"));
  m.def("layer_scale_qp", &layer_scale_qp, py::arg("qp"), py::arg("q_scale"));
}

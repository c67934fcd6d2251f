#include <pybind11/complex.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <json.hpp>

#include "ofdmgen/channel.hpp"
#include "ofdmgen/container.hpp"
#include "ofdmgen/dataset.hpp"
#include "ofdmgen/error.hpp"
#include "ofdmgen/evaluate.hpp"
#include "ofdmgen/fft.hpp"
#include "ofdmgen/metrics.hpp"
#include "ofdmgen/parallel.hpp"
#include "ofdmgen/serialize.hpp"
#include "ofdmgen/stft.hpp"

namespace py = pybind11;
using nlohmann::json;
using namespace ofdmgen;

namespace {

using ComplexArray = py::array_t<std::complex<double>, py::array::c_style | py::array::forcecast>;

py::object to_py(const json& j) { return py::module_::import("json").attr("loads")(j.dump()); }

json from_py(const py::handle& obj) {
  return json::parse(py::module_::import("json").attr("dumps")(obj).cast<std::string>());
}

// A spec argument is either a preset name or a dict in the container JSON form.
WaveformSpec spec_arg(const py::object& obj) {
  WaveformSpec spec;
  if (py::isinstance<py::str>(obj)) {
    spec = preset(obj.cast<std::string>());
  } else {
    try {
      spec = from_py(obj).get<WaveformSpec>();
    } catch (const json::exception& e) {
      throw Error(ErrorCode::invalid_argument, std::string("bad spec: ") + e.what());
    }
  }
  spec.validate();
  return spec;
}

IqWaveform waveform_arg(const ComplexArray& x) {
  if (x.ndim() != 1) throw Error(ErrorCode::dimension_mismatch, "expected a 1-D complex array");
  IqWaveform w;
  w.samples.assign(x.data(), x.data() + x.size());
  return w;
}

std::vector<IqWaveform> waveform_set_arg(const ComplexArray& x) {
  if (x.ndim() != 2) throw Error(ErrorCode::dimension_mismatch, "expected a 2-D complex array (count, length)");
  std::vector<IqWaveform> out(x.shape(0));
  const std::size_t len = x.shape(1);
  for (std::size_t i = 0; i < out.size(); ++i) out[i].samples.assign(x.data() + i * len, x.data() + (i + 1) * len);
  return out;
}

ComplexArray waveforms_out(const std::vector<IqWaveform>& set) {
  const std::size_t len = set.empty() ? 0 : set.front().size();
  ComplexArray out({set.size(), len});
  auto* dst = out.mutable_data();
  for (const auto& w : set) dst = std::copy(w.samples.begin(), w.samples.end(), dst);
  return out;
}

ComplexArray waveform_out(const IqWaveform& w) {
  ComplexArray out(w.size());
  std::copy(w.samples.begin(), w.samples.end(), out.mutable_data());
  return out;
}

ComplexArray grid_out(const ResourceGrid& g) {
  ComplexArray out({g.n_symbols(), g.n_subcarriers()});
  std::copy(g.values().begin(), g.values().end(), out.mutable_data());
  return out;
}

py::array_t<float> dataset_array(const Dataset& ds) {
  std::vector<py::ssize_t> shape{static_cast<py::ssize_t>(ds.header.count)};
  for (auto d : ds.header.item_shape()) shape.push_back(static_cast<py::ssize_t>(d));
  py::array_t<float> out(shape);
  std::copy(ds.data.begin(), ds.data.end(), out.mutable_data());
  return out;
}

py::dict psd_out(const Psd& p) {
  py::array_t<double> f(p.nfft()), v(p.nfft());
  for (std::size_t i = 0; i < p.nfft(); ++i) {
    f.mutable_at(i) = p.frequency(i);
    v.mutable_at(i) = p.values[i];
  }
  py::dict d;
  d["frequency"] = f;
  d["psd"] = v;
  return d;
}

Psd psd_arg(const py::array_t<double, py::array::c_style | py::array::forcecast>& a) {
  return Psd{std::vector<double>(a.data(), a.data() + a.size())};
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "OFDM waveform generation, transforms and evaluation metrics";

  static py::exception<Error> error_type(m, "Error", PyExc_ValueError);
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const Error& e) {
      py::object err = py::handle(error_type.ptr())(e.what());
      err.attr("code") = to_string(e.code());
      PyErr_SetObject(error_type.ptr(), err.ptr());
    }
  });

  m.def("presets", &preset_names, "Names of the built-in configurations.");
  m.def(
      "preset", [](const std::string& name) { return to_py(json(preset(name))); }, py::arg("name"),
      "Spec dict of a built-in configuration.");

  m.def("set_threads", &set_thread_count, py::arg("n"), "Worker thread override; 0 restores the default.");

  m.def(
      "generate",
      [](const py::object& spec, std::uint64_t count, std::uint64_t seed) {
        WaveformSpec s = spec_arg(spec);
        std::vector<IqWaveform> w;
        {
          py::gil_scoped_release release;
          w = to_waveforms(generate_dataset(s, count, seed));
        }
        return waveforms_out(w);
      },
      py::arg("spec"), py::arg("count"), py::arg("seed"),
      "Complex waveforms, shape (count, length). The cast to float32 matches the container payload.");

  m.def(
      "generate_waveform",
      [](const py::object& spec, std::uint64_t index) {
        const auto g = generate_waveform(spec_arg(spec), index);
        py::array_t<std::uint8_t> bits(g.bits.size());
        std::copy(g.bits.begin(), g.bits.end(), bits.mutable_data());
        py::dict d;
        d["waveform"] = waveform_out(g.waveform);
        d["grid"] = grid_out(g.grid);
        d["bits"] = bits;
        return d;
      },
      py::arg("spec"), py::arg("index") = 0, "One waveform at full precision with its resource grid and bits.");

  m.def(
      "generate_file",
      [](const py::object& spec, std::uint64_t count, std::uint64_t seed, const std::filesystem::path& path) {
        WaveformSpec s = spec_arg(spec);
        py::gil_scoped_release release;
        generate_dataset_file(s, count, seed, path);
      },
      py::arg("spec"), py::arg("count"), py::arg("seed"), py::arg("path"));

  m.def(
      "read_container",
      [](const std::filesystem::path& path) {
        const auto ds = read_container(path);
        return py::make_tuple(to_py(json::parse(serialize_header(ds.header))), dataset_array(ds));
      },
      py::arg("path"), "(header dict, float32 array shaped (count, *item_shape)).");

  m.def(
      "read_waveforms",
      [](const std::filesystem::path& path) {
        const auto ds = read_container(path);
        return waveforms_out(to_waveforms(ds));
      },
      py::arg("path"), "Unscaled time-domain waveforms of any container.");

  m.def(
      "convert_file",
      [](const std::filesystem::path& in, const std::filesystem::path& out, const std::string& to,
         std::optional<std::string> scaling) {
        std::optional<ScalingMode> mode;
        if (scaling) mode = parse_scaling_mode(*scaling);
        const auto rep = parse_representation(to);
        py::gil_scoped_release release;
        convert_file(in, out, rep, mode);
      },
      py::arg("src"), py::arg("dst"), py::arg("to"), py::arg("scaling") = py::none());

  m.def(
      "modulate",
      [](const ComplexArray& grid, const py::object& spec) {
        const auto s = spec_arg(spec);
        if (grid.ndim() != 2) throw Error(ErrorCode::dimension_mismatch, "grid must be 2-D");
        ResourceGrid g(grid.shape(0), grid.shape(1));
        std::copy(grid.data(), grid.data() + grid.size(), g.values().begin());
        return waveform_out(modulate(g, s));
      },
      py::arg("grid"), py::arg("spec"));
  m.def(
      "demodulate",
      [](const ComplexArray& x, const py::object& spec) { return grid_out(demodulate(waveform_arg(x), spec_arg(spec))); },
      py::arg("waveform"), py::arg("spec"));

  m.def(
      "constellation",
      [](int order) {
        const auto c = build_constellation(order);
        ComplexArray out(c.points.size());
        std::copy(c.points.begin(), c.points.end(), out.mutable_data());
        return out;
      },
      py::arg("order"), "Unit-power points indexed by bit label.");

  m.def(
      "stft",
      [](const ComplexArray& x, std::size_t window_len) {
        const auto g = stft(waveform_arg(x), window_len);
        ComplexArray out({g.bins(), g.frames});
        std::copy(g.values.begin(), g.values.end(), out.mutable_data());
        return out;
      },
      py::arg("waveform"), py::arg("window_len"), "Centered complex STFT, shape (bins, frames).");
  m.def(
      "istft",
      [](const ComplexArray& s, std::size_t length) {
        if (s.ndim() != 2) throw Error(ErrorCode::dimension_mismatch, "STFT must be 2-D (bins, frames)");
        StftGrid g;
        g.window_len = s.shape(0);
        g.hop = g.window_len / 4;
        g.frames = s.shape(1);
        g.original_length = length;
        g.padded_length = fft::next_pow2(length);
        g.values.assign(s.data(), s.data() + s.size());
        return waveform_out(istft(g));
      },
      py::arg("stft"), py::arg("length"));

  m.def(
      "multitaper_psd",
      [](const ComplexArray& x, double nw, std::size_t tapers) {
        return psd_out(multitaper_psd(waveform_arg(x), MultitaperConfig{nw, tapers}));
      },
      py::arg("waveform"), py::arg("nw") = 4.0, py::arg("tapers") = 7);
  m.def(
      "median_psd",
      [](const ComplexArray& x) {
        const auto set = waveform_set_arg(x);
        Psd p;
        {
          py::gil_scoped_release release;
          p = median_psd(set);
        }
        return psd_out(p);
      },
      py::arg("waveforms"));
  m.def(
      "psd_distance",
      [](const py::array_t<double, py::array::c_style | py::array::forcecast>& generated,
         const py::array_t<double, py::array::c_style | py::array::forcecast>& target) {
        return psd_geodesic_distance(psd_arg(generated), psd_arg(target));
      },
      py::arg("generated"), py::arg("target"), "Log-spectral geodesic distance between two PSD vectors.");

  m.def(
      "evm_db",
      [](const ComplexArray& symbols, int order) {
        std::span<const std::complex<double>> s(symbols.data(), symbols.size());
        return evm_db(s, build_constellation(order));
      },
      py::arg("symbols"), py::arg("order"));

  m.def(
      "cp_correlation",
      [](const ComplexArray& x, const py::object& spec) {
        const auto r = cp_crosscorr(waveform_arg(x), spec_arg(spec));
        py::array_t<double> prof({r.profiles.size(), r.n_lags()});
        for (std::size_t s = 0; s < r.profiles.size(); ++s)
          std::copy(r.profiles[s].begin(), r.profiles[s].end(), prof.mutable_data() + s * r.n_lags());
        py::dict d;
        d["profiles"] = prof;
        d["symbol_max"] = r.symbol_max;
        d["max"] = r.max;
        d["expected_relative_lag"] = r.expected_relative_lag();
        std::vector<std::ptrdiff_t> peaks;
        for (std::size_t s = 0; s < r.profiles.size(); ++s) peaks.push_back(r.peak_relative_lag(s));
        d["peak_relative_lag"] = peaks;
        return d;
      },
      py::arg("waveform"), py::arg("spec"));

  m.def(
      "apply_channel",
      [](const ComplexArray& x, const std::string& profile, double max_doppler_hz, double sample_rate_hz,
         std::uint64_t seed) {
        const auto w = waveform_arg(x);
        Rng rng(seed, 0, Stream::channel);
        const auto ch = realize_channel(ChannelSpec{parse_channel_profile(profile), max_doppler_hz, sample_rate_hz, 0},
                                        w.size(), rng);
        return waveform_out(apply_channel(w, ch));
      },
      py::arg("waveform"), py::arg("profile"), py::arg("max_doppler_hz"), py::arg("sample_rate_hz") = 7.68e6,
      py::arg("seed") = 0);

  m.def(
      "evaluate",
      [](const ComplexArray& generated, const ComplexArray& target, const py::object& spec) {
        const auto s = spec_arg(spec);
        const auto g = waveform_set_arg(generated);
        const auto t = waveform_set_arg(target);
        json j;
        {
          py::gil_scoped_release release;
          j = report_to_json(evaluate(g, t, s));
        }
        return to_py(j);
      },
      py::arg("generated"), py::arg("target"), py::arg("spec"), "Full evaluation report as a dict.");
}

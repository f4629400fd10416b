/* Copyright 2026 The GateCNN Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/

#include "gatecnn/quant.h"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "gatecnn/binary_io.h"
#include "gatecnn/errors.h"
#include "gatecnn/model_io.h"

namespace gatecnn {
namespace {

enum Slot : std::size_t {
  kWc0, kBc0, kWc1, kBc1, kWg, kBg, kWp, kBp, kWc2, kBc2,
  kWc3, kBc3, kWc4, kBc4, kWavg, kBavg, kWcls, kBcls
};

// Row-major views over code buffers. Rank-2 tensors are treated as C x 1 x W.
struct Codes3 {
  std::size_t c, h, w;
  std::vector<std::int32_t> v;

  Codes3(std::size_t c_, std::size_t h_, std::size_t w_)
      : c(c_), h(h_), w(w_), v(c_ * h_ * w_, 0) {}
  std::int32_t& at(std::size_t i, std::size_t j, std::size_t k) {
    return v[(i * h + j) * w + k];
  }
  std::int32_t at(std::size_t i, std::size_t j, std::size_t k) const {
    return v[(i * h + j) * w + k];
  }
};

Codes3 conv2d_fixed(const Codes3& in, const FixedTensor& kernel,
                    const FixedTensor& bias, std::size_t pad,
                    const FixedPointSpec& spec) {
  const std::size_t out_ch = kernel.shape[0], kh = kernel.shape[2],
                    kw = kernel.shape[3];
  const std::size_t out_h = in.h + 2 * pad - kh + 1;
  const std::size_t out_w = in.w + 2 * pad - kw + 1;
  Codes3 out(out_ch, out_h, out_w);
  for (std::size_t o = 0; o < out_ch; ++o) {
    for (std::size_t y = 0; y < out_h; ++y) {
      for (std::size_t x = 0; x < out_w; ++x) {
        WideAccumulator acc = accumulate_bias({}, {bias.codes[o]}, spec);
        for (std::size_t c = 0; c < in.c; ++c) {
          for (std::size_t i = 0; i < kh; ++i) {
            const std::ptrdiff_t iy = static_cast<std::ptrdiff_t>(y + i) -
                                      static_cast<std::ptrdiff_t>(pad);
            if (iy < 0 || iy >= static_cast<std::ptrdiff_t>(in.h)) continue;
            for (std::size_t j = 0; j < kw; ++j) {
              const std::ptrdiff_t ix = static_cast<std::ptrdiff_t>(x + j) -
                                        static_cast<std::ptrdiff_t>(pad);
              if (ix < 0 || ix >= static_cast<std::ptrdiff_t>(in.w)) continue;
              const std::size_t widx = ((o * in.c + c) * kh + i) * kw + j;
              acc = fixed_mac(acc, {kernel.codes[widx]},
                              {in.at(c, static_cast<std::size_t>(iy),
                                     static_cast<std::size_t>(ix))});
            }
          }
        }
        out.at(o, y, x) = renormalize(acc, spec).code;
      }
    }
  }
  return out;
}

// Depthwise same-padded time convolution over a D x 1 x L map.
Codes3 conv1d_time_fixed(const Codes3& in, const FixedTensor& kernel,
                         const FixedTensor& bias, const FixedPointSpec& spec) {
  const std::size_t taps = kernel.shape[1];
  const std::ptrdiff_t half = static_cast<std::ptrdiff_t>(taps / 2);
  const std::ptrdiff_t len = static_cast<std::ptrdiff_t>(in.w);
  Codes3 out(in.c, 1, in.w);
  for (std::size_t d = 0; d < in.c; ++d) {
    for (std::ptrdiff_t t = 0; t < len; ++t) {
      WideAccumulator acc = accumulate_bias({}, {bias.codes[d]}, spec);
      for (std::size_t j = 0; j < taps; ++j) {
        const std::ptrdiff_t src = t + static_cast<std::ptrdiff_t>(j) - half;
        if (src < 0 || src >= len) continue;
        acc = fixed_mac(acc, {kernel.codes[d * taps + j]},
                        {in.at(d, 0, static_cast<std::size_t>(src))});
      }
      out.at(d, 0, static_cast<std::size_t>(t)) = renormalize(acc, spec).code;
    }
  }
  return out;
}

Codes3 maxpool_fixed(const Codes3& in, Extent2 window) {
  Codes3 out(in.c, in.h / window.h, in.w / window.w);
  for (std::size_t c = 0; c < out.c; ++c) {
    for (std::size_t y = 0; y < out.h; ++y) {
      for (std::size_t x = 0; x < out.w; ++x) {
        std::int32_t best = in.at(c, y * window.h, x * window.w);
        for (std::size_t i = 0; i < window.h; ++i) {
          for (std::size_t j = 0; j < window.w; ++j) {
            best = std::max(best, in.at(c, y * window.h + i, x * window.w + j));
          }
        }
        out.at(c, y, x) = best;
      }
    }
  }
  return out;
}

void relu_fixed(Codes3& t) {
  for (auto& v : t.v) v = std::max<std::int32_t>(v, 0);
}

Codes3 reshape(Codes3 t, std::size_t c, std::size_t h, std::size_t w) {
  Codes3 out(c, h, w);
  out.v = std::move(t.v);
  return out;
}

FixedTensor read_fixed_tensor(ByteReader& in, std::string_view expected,
                              const Shape& expected_shape) {
  const std::uint16_t name_len = in.u16();
  const std::string_view name = in.bytes(name_len);
  if (name != expected) {
    throw FormatError("quantized tensor named '" + std::string(name) +
                      "', expected '" + std::string(expected) + "'");
  }
  FixedTensor t;
  t.shape.resize(in.u8());
  for (auto& e : t.shape) e = in.u32();
  if (t.shape != expected_shape) {
    throw FormatError("quantized tensor '" + std::string(name) + "' has shape " +
                      shape_string(t.shape) + ", config implies " +
                      shape_string(expected_shape));
  }
  t.codes.resize(shape_elements(t.shape));
  for (auto& c : t.codes) c = in.i32();
  return t;
}

}  // namespace

FixedTensor quantize_tensor(const Tensor& t, const FixedPointSpec& spec,
                            std::size_t* saturations) {
  FixedTensor out{t.shape(), std::vector<std::int32_t>(t.size())};
  const double lo = spec.min_value(), hi = spec.max_value();
  for (std::size_t i = 0; i < t.size(); ++i) {
    const double x = t[i];
    if (saturations && (x < lo || x > hi)) ++*saturations;
    out.codes[i] = quantize(x, spec).code;
  }
  return out;
}

Tensor dequantize_tensor(const FixedTensor& t, const FixedPointSpec& spec) {
  std::vector<double> data(t.codes.size());
  for (std::size_t i = 0; i < data.size(); ++i) {
    data[i] = dequantize({t.codes[i]}, spec);
  }
  return Tensor(t.shape, std::move(data));
}

const FixedTensor& QuantizedModel::tensor(std::string_view name) const {
  const auto& names = ModelWeights::names();
  for (std::size_t i = 0; i < names.size(); ++i) {
    if (names[i] == name) return tensors[i];
  }
  throw ValueError("no quantized tensor named '" + std::string(name) + "'");
}

std::size_t QuantizedModel::parameter_count() const {
  std::size_t n = 0;
  for (const FixedTensor& t : tensors) n += t.size();
  return n;
}

bool QuantizedModel::same_codes(const QuantizedModel& other) const {
  return spec == other.spec && config == other.config &&
         tensors == other.tensors;
}

QuantizedModel quantize_model(const GateCNNConfig& cfg, const ModelWeights& w,
                              const FixedPointSpec& spec) {
  spec.validate();
  cfg.validate();
  check_weights(cfg, w);
  if (!w.all_finite()) throw NumericError("quantize_model: non-finite weight");
  QuantizedModel qm;
  qm.spec = spec;
  qm.config = cfg;
  const auto slots = w.tensors();
  for (std::size_t i = 0; i < ModelWeights::kTensorCount; ++i) {
    std::size_t sat = 0;
    qm.tensors[i] = quantize_tensor(*slots[i], spec, &sat);
    if (sat > 0) {
      qm.warnings.push_back(std::to_string(sat) + " weights of '" +
                            std::string(ModelWeights::names()[i]) +
                            "' saturated under " + spec.name());
    }
    qm.saturations += sat;
  }
  return qm;
}

ModelWeights dequantize_model(const QuantizedModel& qm) {
  ModelWeights w;
  auto slots = w.tensors();
  for (std::size_t i = 0; i < ModelWeights::kTensorCount; ++i) {
    *slots[i] = dequantize_tensor(qm.tensors[i], qm.spec);
  }
  return w;
}

std::vector<FixedScalar> forward_fixed(const QuantizedModel& qm,
                                       const Tensor& input) {
  const GateCNNConfig& cfg = qm.config;
  const FixedPointSpec& spec = qm.spec;
  if (input.shape() != cfg.input_shape()) {
    throw DimensionError("forward_fixed: input has shape " +
                         shape_string(input.shape()) + ", expected " +
                         shape_string(cfg.input_shape()));
  }
  const auto& t = qm.tensors;
  const std::size_t d = cfg.embed_dim, wp = cfg.pooled_width();
  const std::size_t cascade_pad = cfg.cascade_kernel / 2;

  Codes3 x(cfg.in_channels, cfg.doppler_bins, cfg.time_steps);
  for (std::size_t i = 0; i < input.size(); ++i) {
    x.v[i] = quantize(input[i], spec).code;
  }

  const Codes3 x1 = conv2d_fixed(x, t[kWc0], t[kBc0], cfg.fuse_kernel / 2, spec);
  const Codes3 x_ds = maxpool_fixed(x1, cfg.pool);
  // C1 x H' x W' -> D x 1 x W'
  const Codes3 x_conv1 = conv2d_fixed(x_ds, t[kWc1], t[kBc1], 0, spec);
  const Codes3 z = conv1d_time_fixed(x_conv1, t[kWg], t[kBg], spec);
  const Codes3 x_conv2 = conv1d_time_fixed(x_conv1, t[kWp], t[kBp], spec);

  Codes3 x_conv3 = conv2d_fixed(reshape(x_conv2, 1, d, wp), t[kWc2], t[kBc2],
                                cascade_pad, spec);
  relu_fixed(x_conv3);
  Codes3 x_conv4 = conv2d_fixed(x_conv3, t[kWc3], t[kBc3], cascade_pad, spec);
  relu_fixed(x_conv4);
  const Codes3 x_conv5 =
      conv2d_fixed(x_conv4, t[kWc4], t[kBc4], cascade_pad, spec);

  // y = x5 * relu(z) + x1, one rounding.
  Codes3 y(1, d, wp);
  for (std::size_t i = 0; i < y.v.size(); ++i) {
    const FixedScalar gate{std::max<std::int32_t>(z.v[i], 0)};
    WideAccumulator acc = fixed_mac({}, {x_conv5.v[i]}, gate);
    acc = accumulate_bias(acc, {x_conv1.v[i]}, spec);
    y.v[i] = renormalize(acc, spec).code;
  }

  const Codes3 v = conv2d_fixed(y, t[kWavg], t[kBavg], 0, spec);  // 1 x 1 x W'

  const std::size_t classes = cfg.num_classes;
  std::vector<FixedScalar> logits(classes);
  for (std::size_t n = 0; n < classes; ++n) {
    WideAccumulator acc = accumulate_bias({}, {t[kBcls].codes[n]}, spec);
    for (std::size_t j = 0; j < wp; ++j) {
      acc = fixed_mac(acc, {t[kWcls].codes[n * wp + j]}, {v.v[j]});
    }
    logits[n] = renormalize(acc, spec);
  }
  return logits;
}

std::size_t predict_fixed(const QuantizedModel& qm, const Tensor& input) {
  const std::vector<FixedScalar> logits = forward_fixed(qm, input);
  std::size_t best = 0;
  for (std::size_t i = 1; i < logits.size(); ++i) {
    if (logits[i].code > logits[best].code) best = i;
  }
  return best;
}

int required_integer_bits(double max_abs) {
  if (!(max_abs > 0.0)) return 1;
  const int magnitude = static_cast<int>(std::ceil(std::log2(max_abs)));
  return std::max(magnitude, 0) + 1;
}

int RangeAudit::max_required_integer_bits() const {
  int bits = 0;
  for (const StageRange& s : stages) bits = std::max(bits, s.required_integer_bits);
  return bits;
}

bool RangeAudit::fits(const FixedPointSpec& spec) const {
  // integer_bits() includes the sign bit.
  return max_required_integer_bits() <= spec.integer_bits() - 1;
}

RangeAudit audit_ranges(const GateCNNConfig& cfg, const ModelWeights& w,
                        std::span<const MicroDopplerFrame> calibration) {
  if (calibration.empty()) throw ValueError("audit_ranges: empty calibration set");
  RangeAudit audit;
  const std::array<std::string_view, 12> names = {
      "input",   "x1",      "x_ds",    "x_conv1", "z", "x_conv2",
      "x_conv3", "x_conv4", "x_conv5", "y",       "v", "logits"};
  for (std::string_view n : names) {
    audit.stages.push_back({std::string(n), INFINITY, -INFINITY, 1});
  }
  for (const MicroDopplerFrame& f : calibration) {
    const ForwardTrace t = forward(cfg, w, f.data);
    const std::array<const Tensor*, 12> acts = {
        &t.input,   &t.x1,      &t.x_ds,    &t.x_conv1, &t.z, &t.x_conv2,
        &t.x_conv3, &t.x_conv4, &t.x_conv5, &t.y,       &t.v, &t.logits};
    for (std::size_t s = 0; s < acts.size(); ++s) {
      const auto [lo, hi] =
          std::minmax_element(acts[s]->data().begin(), acts[s]->data().end());
      audit.stages[s].min = std::min(audit.stages[s].min, *lo);
      audit.stages[s].max = std::max(audit.stages[s].max, *hi);
    }
  }
  for (StageRange& s : audit.stages) {
    s.required_integer_bits =
        required_integer_bits(std::max(std::fabs(s.min), std::fabs(s.max)));
  }
  return audit;
}

std::string format_audit(const RangeAudit& audit) {
  std::string out;
  char buf[192];
  for (const StageRange& s : audit.stages) {
    std::snprintf(buf, sizeof(buf), "stage=%s min=%.9g max=%.9g integer_bits=%d\n",
                  s.stage.c_str(), s.min, s.max, s.required_integer_bits);
    out += buf;
  }
  return out;
}

FidelityReport compare_fixed_float(const GateCNNConfig& cfg,
                                   const ModelWeights& w,
                                   const QuantizedModel& qm,
                                   std::span<const MicroDopplerFrame> frames) {
  FidelityReport r;
  r.max_abs_logit_error.assign(cfg.num_classes, 0.0);
  for (const MicroDopplerFrame& f : frames) {
    const ForwardTrace t = forward(cfg, w, f.data);
    const std::vector<FixedScalar> fixed = forward_fixed(qm, f.data);
    std::size_t best = 0;
    for (std::size_t n = 0; n < fixed.size(); ++n) {
      const double err = std::fabs(dequantize(fixed[n], qm.spec) - t.logits[n]);
      r.max_abs_logit_error[n] = std::max(r.max_abs_logit_error[n], err);
      if (fixed[n].code > fixed[best].code) best = n;
    }
    ++r.frames;
    if (best == argmax(t.logits.data())) ++r.argmax_agreements;
  }
  return r;
}

std::string format_fidelity(const FidelityReport& r) {
  char buf[128];
  std::snprintf(buf, sizeof(buf), "frames=%zu argmax_agreement=%.4f\n", r.frames,
                r.agreement());
  std::string out = buf;
  for (std::size_t n = 0; n < r.max_abs_logit_error.size(); ++n) {
    std::snprintf(buf, sizeof(buf), "class=%zu max_abs_logit_error=%.3g\n", n,
                  r.max_abs_logit_error[n]);
    out += buf;
  }
  return out;
}

std::string serialize_quantized(const QuantizedModel& qm) {
  ByteWriter out;
  out.bytes("GCNQ");
  out.u16(kQuantizedFormatVersion);
  out.u8(static_cast<std::uint8_t>(qm.spec.total_bits));
  out.u8(static_cast<std::uint8_t>(qm.spec.frac_bits));
  out.u8(static_cast<std::uint8_t>(qm.spec.rounding));
  out.u8(static_cast<std::uint8_t>(qm.spec.overflow));
  write_config(out, qm.config);
  for (std::size_t i = 0; i < ModelWeights::kTensorCount; ++i) {
    const std::string_view name = ModelWeights::names()[i];
    out.u16(static_cast<std::uint16_t>(name.size()));
    out.bytes(name);
    const FixedTensor& t = qm.tensors[i];
    out.u8(static_cast<std::uint8_t>(t.shape.size()));
    for (std::size_t e : t.shape) out.u32(static_cast<std::uint32_t>(e));
    for (std::int32_t c : t.codes) out.i32(c);
  }
  return out.release();
}

QuantizedModel deserialize_quantized(std::string_view bytes) {
  ByteReader in(bytes);
  in.expect_magic("GCNQ", "GCNQ quantized model");
  const std::uint16_t version = in.u16();
  if (version != kQuantizedFormatVersion) {
    throw FormatError("unsupported GCNQ version " + std::to_string(version));
  }
  QuantizedModel qm;
  qm.spec.total_bits = in.u8();
  qm.spec.frac_bits = in.u8();
  const std::uint8_t rounding = in.u8(), overflow = in.u8();
  if (rounding > 1 || overflow > 1) {
    throw FormatError("GCNQ: unknown rounding/overflow mode");
  }
  qm.spec.rounding = static_cast<Rounding>(rounding);
  qm.spec.overflow = static_cast<Overflow>(overflow);
  try {
    qm.spec.validate();
  } catch (const ValueError& e) {
    throw FormatError(std::string("GCNQ: ") + e.what());
  }
  qm.config = read_config(in);
  const auto shapes = weight_shapes(qm.config);
  for (std::size_t i = 0; i < ModelWeights::kTensorCount; ++i) {
    qm.tensors[i] = read_fixed_tensor(in, ModelWeights::names()[i], shapes[i]);
  }
  if (!in.at_end()) {
    throw FormatError(std::to_string(in.remaining()) +
                      " trailing bytes after GCNQ payload");
  }
  return qm;
}

void save_quantized(const std::string& path, const QuantizedModel& qm) {
  write_file(path, serialize_quantized(qm));
}

QuantizedModel load_quantized(const std::string& path) {
  return deserialize_quantized(read_file(path));
}

}  // namespace gatecnn

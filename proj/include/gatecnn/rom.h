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

// Weight ROM export: the quantized model as C++ source with one constant
// int32 array per tensor, the form in which weights become LUT-ROM when the
// file is compiled into an HLS design.
//
//   // gatecnn weight rom v1
//   // fixed_point: Q16.16 total_bits=32 frac_bits=16 rounding=nearest-even overflow=saturate
//   // config: in_channels=1 doppler_bins=30 ... num_classes=6
//   // parameters: 2826
//   // total_bytes: 11304
//   #include <cstdint>
//
//   // shape: 1x1x3x3
//   static const std::int32_t w_c0[9] = {
//     -12345, 6789, ...
//   };
//
// Arrays appear in ModelWeights::names() order, values row-major, at most
// eight literals per line.

#ifndef GATECNN_ROM_H_
#define GATECNN_ROM_H_

#include <string>
#include <string_view>

#include "gatecnn/quant.h"

namespace gatecnn {

/// Bytes of weight storage: parameter count x 4.
std::size_t rom_bytes(const QuantizedModel& qm);

std::string export_rom(const QuantizedModel& qm);

/// Parses text produced by export_rom. Throws FormatError on anything else.
QuantizedModel parse_rom(std::string_view text);

}  // namespace gatecnn

#endif  // GATECNN_ROM_H_

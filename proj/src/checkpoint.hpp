// Copyright 2026 The BiSyn Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <string>

#include "model.hpp"

namespace bisyn {

// A checkpoint is a directory with two files:
//   model.json  {"format", "version", "config": {key: value}, "vocab": [...],
//                "params": [{"name", "shape", "offset"}]}
//   params.bin  every parameter as little-endian float32, in name order
void SaveModel(const Model &model, const std::string &dir);

// Reopens the embedding archive of an archive-mode model from
// `archive_override` when given, else from the stored encoder.archive path.
Model LoadModel(const std::string &dir, const std::string &archive_override = "");

}  // namespace bisyn

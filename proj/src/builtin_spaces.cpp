// Copyright 2026 The Tunescape Authors.
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

#include "tunescape/space.hpp"

#include <array>
#include <utility>

#include "tunescape/error.hpp"

namespace tunescape {

namespace {

// Embedded definition files, one per benchmark, in the same format accepted by
// load_space(). Built-ins carry no constraints.
constexpr std::array<std::pair<std::string_view, std::string_view>, 7> kBuiltins{{
    {"gemm", R"json({"name":"gemm","parameters":[{"name":"MWG","values":[16,32,64,128]},{"name":"NWG","values":[16,32,64,128]},{"name":"MDIMC","values":[8,16,32]},{"name":"NDIMC","values":[8,16,32]},{"name":"MDIMA","values":[8,16,32]},{"name":"NDIMB","values":[8,16,32]},{"name":"VWM","values":[1,2,4,8]},{"name":"VWN","values":[1,2,4,8]},{"name":"SA","values":[0,1]},{"name":"SB","values":[0,1]}],"constraints":[]})json"},
    {"nbody", R"json({"name":"nbody","parameters":[{"name":"block_size","values":[64,128,256,512]},{"name":"outer_unroll_factor","values":[1,2,4,8]},{"name":"inner_unroll_factor1","values":[0,1,2,4,8,16,32]},{"name":"inner_unroll_factor2","values":[0,1,2,4,8,16,32]},{"name":"use_soa","values":[0,1]},{"name":"local_mem","values":[0,1]},{"name":"vector_type","values":[1,2,4]}],"constraints":[]})json"},
    {"hotspot", R"json({"name":"hotspot","parameters":[{"name":"block_size_x","values":[1,2,4,8,16,32,64,96,128,160,192,224,256,288,320,352,384,416,448,480,512,544,576,608,640,672,704,736,768,800,832,864,896,928,960,992,1024]},{"name":"block_size_y","values":[1,2,4,8,16,32]},{"name":"tile_size_x","values":[1,2,3,4,5,6,7,8,9,10]},{"name":"tile_size_y","values":[1,2,3,4,5,6,7,8,9,10]},{"name":"temporal_tiling_factor","values":[1,2,3,4,5,6,7,8,9,10]},{"name":"loop_unroll_factor_t","values":[1,2,3,4,5,6,7,8,9,10]},{"name":"sh_power","values":[0,1]},{"name":"blocks_per_sm","values":[0,1,2,3,4]}],"constraints":[]})json"},
    {"pnpoly", R"json({"name":"pnpoly","parameters":[{"name":"block_size_x","values":[32,64,96,128,160,192,224,256,288,320,352,384,416,448,480,512,544,576,608,640,672,704,736,768,800,832,864,896,928,960,992]},{"name":"tile_size","values":[1,2,4,6,8,10,12,14,16,18,20]},{"name":"between_method","values":[0,1,2,3]},{"name":"use_method","values":[0,1,2]}],"constraints":[]})json"},
    {"convolution", R"json({"name":"convolution","parameters":[{"name":"block_size_x","values":[1,2,4,8,16,32,48,64,80,96,112,128]},{"name":"block_size_y","values":[1,2,4,8,16,32]},{"name":"tile_size_x","values":[1,2,3,4,5,6,7,8]},{"name":"tile_size_y","values":[1,2,3,4,5,6,7,8]},{"name":"use_padding","values":[0,1]},{"name":"read_only","values":[0,1]}],"constraints":[]})json"},
    {"expdist", R"json({"name":"expdist","parameters":[{"name":"block_size_x","values":[32,64,128,256,512,1024]},{"name":"block_size_y","values":[1,2,4,8,16,32]},{"name":"tile_size_x","values":[1,2,3,4,5,6,7,8]},{"name":"tile_size_y","values":[1,2,3,4,5,6,7,8]},{"name":"use_shared_mem","values":[0,1,2]},{"name":"loop_unroll_factor_x","values":[1,2,3,4,5,6,7,8]},{"name":"loop_unroll_factor_y","values":[1,2,3,4,5,6,7,8]},{"name":"use_column","values":[0,1]},{"name":"n_y_blocks","values":[1,2,4,8,16,32,64,128,256,512,1024]}],"constraints":[]})json"},
    {"dedisp", R"json({"name":"dedisp","parameters":[{"name":"block_size_x","values":[1,2,4,8,16,32,48,64,80,96,112,128,144,160,176,192,208,224,240,256,272,288,304,320,336,352,368,384,400,416,432,448,464,480,496,512]},{"name":"block_size_y","values":[4,8,12,16,20,24,28,32,36,40,44,48,52,56,60,64,68,72,76,80,84,88,92,96,100,104,108,112,116,120,124,128]},{"name":"tile_size_x","values":[1,2,3,4,5,6,7,8,9,10,11,12,13,14,15,16]},{"name":"tile_size_y","values":[1,2,3,4,5,6,7,8,9,10,11,12,13,14,15,16]},{"name":"tile_stride_x","values":[0,1]},{"name":"tile_stride_y","values":[0,1]},{"name":"loop_unroll_factor_channel","values":[0,1,2,3,4,6,8,12,16,24,32,48,64,96,128,192,256,384,512,768,1536]},{"name":"blocks_per_sm","values":[0,1,2,3,4]}],"constraints":[]})json"},
}};

}  // namespace

std::vector<std::string> builtin_space_names() {
  std::vector<std::string> names;
  for (const auto& [name, _] : kBuiltins) names.emplace_back(name);
  return names;
}

ParameterSpace builtin_space(std::string_view name) {
  for (const auto& [id, definition] : kBuiltins)
    if (id == name) return space_from_json(nlohmann::json::parse(definition));
  throw UnknownBenchmark(std::string(name));
}

}  // namespace tunescape

// Copyright 2026 The lefcert Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Binary embedding files.
//
// Layout, all integers little-endian:
//
//   offset  size  field
//   0       4     magic "LEFC"
//   4       2     format version (1)
//   6       4     dim d
//   10      8     count n
//   18      4     flags: bit 0 normalized, bit 1 noisy-sample-set,
//                 bit 2 denoised; other bits must be zero
//   22      ...   n label records: u32 byte length, then UTF-8 bytes
//   ...     4nd   payload: n rows of d binary32 values, row-major
//
// Nothing may follow the payload. Files are written to a temporary sibling
// and renamed into place, so readers never observe a partial file.

#ifndef LEFCERT_IO_H_
#define LEFCERT_IO_H_

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "lefcert/harness.h"
#include "lefcert/types.h"

namespace lefcert::io {

inline constexpr char kMagic[4] = {'L', 'E', 'F', 'C'};
inline constexpr std::uint16_t kFormatVersion = 1;
inline constexpr std::uint32_t kFlagNormalized = 1u << 0;
inline constexpr std::uint32_t kFlagNoisySampleSet = 1u << 1;
inline constexpr std::uint32_t kFlagDenoised = 1u << 2;
inline constexpr std::size_t kHeaderSize = 22;

struct EmbeddingFile {
  std::uint32_t dim = 0;
  bool normalized = false;
  bool noisy_sample_set = false;
  bool denoised = false;
  // One label per record; empty for queries and text files.
  std::vector<std::string> labels;
  // count() * dim values, row-major.
  std::vector<float> values;

  std::size_t count() const { return labels.size(); }
  std::span<const float> row(std::size_t i) const {
    return std::span<const float>(values).subspan(i * dim, dim);
  }
  bool operator==(const EmbeddingFile&) const = default;
};

// Serialization to and from bytes. decode() throws BAD_MAGIC,
// VERSION_UNSUPPORTED, TRUNCATED, TRAILING_BYTES or NORM_VIOLATION.
std::string encode(const EmbeddingFile& f);
EmbeddingFile decode(std::string_view bytes);

// Throws IO_FAILURE on filesystem errors, plus everything decode() throws.
void write_embeddings(const EmbeddingFile& f, const std::string& path);
EmbeddingFile read_embeddings(const std::string& path);

// Writes `content` atomically through a temporary file and rename.
void write_file_atomic(const std::string& path, std::string_view content);
std::string read_file(const std::string& path);

// Rows as double-precision embeddings. The normalized flag carries over and
// is checked with the wire tolerance.
std::vector<Embedding> to_embeddings(const EmbeddingFile& f);
// Rows narrowed to binary32. All embeddings must share one dimension.
EmbeddingFile from_embeddings(std::span<const Embedding> rows,
                              std::vector<std::string> labels, bool normalized);

// File rows after collapsing noisy-sample sets. A plain file maps one row to
// one embedding. A noisy file holds consecutive runs of `noise_samples`
// rows; each run becomes its smoothed mean and keeps the label of its first
// row.
struct LoadedRows {
  std::vector<std::string> labels;
  std::vector<Embedding> embeddings;
};
LoadedRows load_rows(const EmbeddingFile& f, int noise_samples);

// Assembles an episode from a support file (labels name the classes; classes
// appear in order of first appearance and must all have K rows), a text file
// (one row per class, matched by label, or by position when labels are
// empty) and a query file (labels optional; an empty label leaves the query
// unlabeled). Throws SHAPE_MISMATCH, LABEL_OUT_OF_RANGE or DIM_MISMATCH.
Episode assemble_episode(const LoadedRows& support, const LoadedRows& text,
                         const LoadedRows& queries);

// A pool is stored as two files: `path` with labelled members and
// `path.text` with one labelled text row per class.
void write_pool(const harness::EmbeddingPool& pool, const std::string& path);
harness::EmbeddingPool read_pool(const std::string& path);

}  // namespace lefcert::io

#endif  // LEFCERT_IO_H_

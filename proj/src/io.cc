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

#include "lefcert/io.h"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <system_error>

#include "lefcert/error.h"
#include "lefcert/smoothing.h"

namespace lefcert::io {
namespace {

constexpr std::uint32_t kKnownFlags =
    kFlagNormalized | kFlagNoisySampleSet | kFlagDenoised;

template <typename T>
void put(std::string& out, T v) {
  for (std::size_t i = 0; i < sizeof(T); ++i) {
    out.push_back(static_cast<char>((static_cast<std::uint64_t>(v) >> (8 * i)) & 0xff));
  }
}

class Reader {
 public:
  explicit Reader(std::string_view bytes) : bytes_(bytes) {}

  std::size_t remaining() const { return bytes_.size() - pos_; }

  template <typename T>
  T get(const char* what) {
    need(sizeof(T), what);
    std::uint64_t v = 0;
    for (std::size_t i = 0; i < sizeof(T); ++i) {
      v |= static_cast<std::uint64_t>(static_cast<unsigned char>(bytes_[pos_ + i]))
           << (8 * i);
    }
    pos_ += sizeof(T);
    return static_cast<T>(v);
  }

  std::string_view take(std::size_t n, const char* what) {
    need(n, what);
    auto s = bytes_.substr(pos_, n);
    pos_ += n;
    return s;
  }

 private:
  void need(std::size_t n, const char* what) const {
    if (remaining() < n) {
      throw Error(ErrorCode::kTruncated,
                  std::string("file ends inside ") + what + " at byte " +
                      std::to_string(pos_));
    }
  }

  std::string_view bytes_;
  std::size_t pos_ = 0;
};

std::string with_suffix(const std::string& path, const char* suffix) {
  return path + suffix;
}

}  // namespace

std::string encode(const EmbeddingFile& f) {
  if (f.values.size() != f.count() * f.dim) {
    throw Error(ErrorCode::kShapeMismatch,
                "payload holds " + std::to_string(f.values.size()) +
                    " values, expected " + std::to_string(f.count() * f.dim));
  }
  std::string out(kMagic, sizeof(kMagic));
  put<std::uint16_t>(out, kFormatVersion);
  put<std::uint32_t>(out, f.dim);
  put<std::uint64_t>(out, f.count());
  std::uint32_t flags = 0;
  if (f.normalized) flags |= kFlagNormalized;
  if (f.noisy_sample_set) flags |= kFlagNoisySampleSet;
  if (f.denoised) flags |= kFlagDenoised;
  put<std::uint32_t>(out, flags);
  for (const auto& label : f.labels) {
    if (label.size() > UINT32_MAX) {
      throw Error(ErrorCode::kInvalidParameter, "label longer than 4 GiB");
    }
    put<std::uint32_t>(out, static_cast<std::uint32_t>(label.size()));
    out += label;
  }
  out.reserve(out.size() + 4 * f.values.size());
  for (float v : f.values) put<std::uint32_t>(out, std::bit_cast<std::uint32_t>(v));
  return out;
}

EmbeddingFile decode(std::string_view bytes) {
  Reader r(bytes);
  const auto magic = r.take(sizeof(kMagic), "magic");
  if (std::memcmp(magic.data(), kMagic, sizeof(kMagic)) != 0) {
    throw Error(ErrorCode::kBadMagic, "not an embedding file");
  }
  const auto version = r.get<std::uint16_t>("header");
  if (version != kFormatVersion) {
    throw Error(ErrorCode::kVersionUnsupported,
                "format version " + std::to_string(version));
  }
  EmbeddingFile f;
  f.dim = r.get<std::uint32_t>("header");
  const auto count = r.get<std::uint64_t>("header");
  const auto flags = r.get<std::uint32_t>("header");
  if ((flags & ~kKnownFlags) != 0) {
    throw Error(ErrorCode::kVersionUnsupported,
                "unknown flag bits " + std::to_string(flags & ~kKnownFlags));
  }
  f.normalized = (flags & kFlagNormalized) != 0;
  f.noisy_sample_set = (flags & kFlagNoisySampleSet) != 0;
  f.denoised = (flags & kFlagDenoised) != 0;

  // Every record needs at least its 4-byte label length, which bounds count
  // before anything is allocated.
  if (count > r.remaining() / 4) {
    throw Error(ErrorCode::kTruncated,
                "declared " + std::to_string(count) + " records, file too short");
  }
  f.labels.reserve(count);
  for (std::uint64_t i = 0; i < count; ++i) {
    const auto len = r.get<std::uint32_t>("label block");
    f.labels.emplace_back(r.take(len, "label block"));
  }
  const std::uint64_t values = count * f.dim;
  if (f.dim != 0 && count > r.remaining() / (4ull * f.dim)) {
    throw Error(ErrorCode::kTruncated,
                "payload shorter than " + std::to_string(count) + " rows of dim " +
                    std::to_string(f.dim));
  }
  f.values.resize(values);
  for (auto& v : f.values) {
    v = std::bit_cast<float>(r.get<std::uint32_t>("payload"));
  }
  if (r.remaining() != 0) {
    throw Error(ErrorCode::kTrailingBytes,
                std::to_string(r.remaining()) + " bytes after payload");
  }
  for (float v : f.values) {
    if (!std::isfinite(v)) {
      throw Error(ErrorCode::kNormViolation, "payload holds a non-finite value");
    }
  }
  if (f.normalized) to_embeddings(f);  // norm check
  return f;
}

void write_file_atomic(const std::string& path, std::string_view content) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorCode::kIoFailure, "cannot open " + tmp);
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    out.flush();
    if (!out) throw Error(ErrorCode::kIoFailure, "cannot write " + tmp);
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp, ec);
    throw Error(ErrorCode::kIoFailure, "cannot rename into " + path);
  }
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIoFailure, "cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  if (in.bad()) throw Error(ErrorCode::kIoFailure, "cannot read " + path);
  return std::move(ss).str();
}

void write_embeddings(const EmbeddingFile& f, const std::string& path) {
  write_file_atomic(path, encode(f));
}

EmbeddingFile read_embeddings(const std::string& path) {
  return decode(read_file(path));
}

std::vector<Embedding> to_embeddings(const EmbeddingFile& f) {
  std::vector<Embedding> out;
  out.reserve(f.count());
  for (std::size_t i = 0; i < f.count(); ++i) {
    const auto row = f.row(i);
    out.emplace_back(std::vector<double>(row.begin(), row.end()), f.normalized,
                     kWireNormTolerance);
  }
  return out;
}

EmbeddingFile from_embeddings(std::span<const Embedding> rows,
                              std::vector<std::string> labels, bool normalized) {
  if (labels.size() != rows.size()) {
    throw Error(ErrorCode::kShapeMismatch, "one label per row required");
  }
  EmbeddingFile f;
  f.normalized = normalized;
  f.labels = std::move(labels);
  f.dim = rows.empty() ? 0 : static_cast<std::uint32_t>(rows.front().dim());
  f.values.reserve(rows.size() * f.dim);
  for (const auto& x : rows) {
    if (x.dim() != f.dim) throw Error(ErrorCode::kDimMismatch, "rows differ in dim");
    for (double v : x.values()) f.values.push_back(static_cast<float>(v));
  }
  return f;
}

LoadedRows load_rows(const EmbeddingFile& f, int noise_samples) {
  LoadedRows out;
  auto rows = to_embeddings(f);
  if (!f.noisy_sample_set) {
    out.labels = f.labels;
    out.embeddings = std::move(rows);
    return out;
  }
  if (noise_samples < 1) {
    throw Error(ErrorCode::kInvalidParameter,
                "noisy-sample-set file needs the noise sample count n");
  }
  const auto n = static_cast<std::size_t>(noise_samples);
  if (rows.size() % n != 0) {
    throw Error(ErrorCode::kShapeMismatch,
                std::to_string(rows.size()) + " rows do not split into runs of " +
                    std::to_string(n));
  }
  for (std::size_t start = 0; start < rows.size(); start += n) {
    smoothing::NoisySampleSet set;
    set.denoised = f.denoised;
    set.samples.assign(rows.begin() + static_cast<std::ptrdiff_t>(start),
                       rows.begin() + static_cast<std::ptrdiff_t>(start + n));
    out.embeddings.push_back(smoothing::smoothed_embedding(set));
    out.labels.push_back(f.labels[start]);
  }
  return out;
}

Episode assemble_episode(const LoadedRows& support, const LoadedRows& text,
                         const LoadedRows& queries) {
  Episode e;
  std::map<std::string, int> index;
  for (std::size_t i = 0; i < support.embeddings.size(); ++i) {
    const auto& name = support.labels[i];
    if (name.empty()) {
      throw Error(ErrorCode::kShapeMismatch, "support row " + std::to_string(i) +
                                                 " has no class label");
    }
    auto [it, fresh] = index.try_emplace(name, static_cast<int>(e.label_names.size()));
    if (fresh) {
      e.label_names.push_back(name);
      e.support.emplace_back();
    }
    e.support[static_cast<std::size_t>(it->second)].push_back(support.embeddings[i]);
  }
  if (e.support.empty()) throw Error(ErrorCode::kEmptySet, "support file is empty");
  e.num_classes = static_cast<int>(e.support.size());
  e.shots = static_cast<int>(e.support.front().size());
  for (std::size_t c = 0; c < e.support.size(); ++c) {
    if (e.support[c].size() != static_cast<std::size_t>(e.shots)) {
      throw Error(ErrorCode::kShapeMismatch,
                  "class " + e.label_names[c] + " has " +
                      std::to_string(e.support[c].size()) + " shots, class " +
                      e.label_names[0] + " has " + std::to_string(e.shots));
    }
  }

  if (text.embeddings.size() != e.support.size()) {
    throw Error(ErrorCode::kShapeMismatch,
                "text file has " + std::to_string(text.embeddings.size()) +
                    " rows for " + std::to_string(e.num_classes) + " classes");
  }
  const bool by_name = std::any_of(text.labels.begin(), text.labels.end(),
                                   [](const std::string& s) { return !s.empty(); });
  if (by_name) {
    e.text.resize(e.support.size());
    std::vector<bool> seen(e.support.size(), false);
    for (std::size_t i = 0; i < text.embeddings.size(); ++i) {
      auto it = index.find(text.labels[i]);
      if (it == index.end() || seen[static_cast<std::size_t>(it->second)]) {
        throw Error(ErrorCode::kLabelOutOfRange,
                    "text row '" + text.labels[i] + "' matches no unique class");
      }
      seen[static_cast<std::size_t>(it->second)] = true;
      e.text[static_cast<std::size_t>(it->second)] = text.embeddings[i];
    }
  } else {
    e.text = text.embeddings;
  }

  for (std::size_t i = 0; i < queries.embeddings.size(); ++i) {
    int label = 0;
    if (!queries.labels[i].empty()) {
      auto it = index.find(queries.labels[i]);
      if (it == index.end()) {
        throw Error(ErrorCode::kLabelOutOfRange,
                    "query label '" + queries.labels[i] + "' is not a class");
      }
      label = it->second + 1;
    }
    e.queries.push_back({queries.embeddings[i], label});
  }
  validate_episode(e);
  return e;
}

void write_pool(const harness::EmbeddingPool& pool, const std::string& path) {
  std::vector<Embedding> members;
  std::vector<std::string> member_labels;
  std::vector<Embedding> texts;
  std::vector<std::string> text_labels;
  for (const auto& c : pool.classes) {
    for (const auto& m : c.members) {
      members.push_back(m);
      member_labels.push_back(c.name);
    }
    texts.push_back(c.text);
    text_labels.push_back(c.name);
  }
  write_embeddings(from_embeddings(members, std::move(member_labels), true), path);
  write_embeddings(from_embeddings(texts, std::move(text_labels), true),
                   with_suffix(path, ".text"));
}

harness::EmbeddingPool read_pool(const std::string& path) {
  const auto members = read_embeddings(path);
  const auto texts = read_embeddings(with_suffix(path, ".text"));
  const auto member_rows = to_embeddings(members);
  const auto text_rows = to_embeddings(texts);
  harness::EmbeddingPool pool;
  std::map<std::string, std::size_t> index;
  for (std::size_t i = 0; i < member_rows.size(); ++i) {
    const auto& name = members.labels[i];
    auto [it, fresh] = index.try_emplace(name, pool.classes.size());
    if (fresh) pool.classes.push_back({name, {}, {}});
    pool.classes[it->second].members.push_back(member_rows[i]);
  }
  if (text_rows.size() != pool.classes.size()) {
    throw Error(ErrorCode::kShapeMismatch,
                "pool text file has " + std::to_string(text_rows.size()) +
                    " rows for " + std::to_string(pool.classes.size()) + " classes");
  }
  std::vector<bool> seen(pool.classes.size(), false);
  for (std::size_t i = 0; i < text_rows.size(); ++i) {
    auto it = index.find(texts.labels[i]);
    if (it == index.end() || seen[it->second]) {
      throw Error(ErrorCode::kLabelOutOfRange,
                  "pool text row '" + texts.labels[i] + "' matches no unique class");
    }
    seen[it->second] = true;
    pool.classes[it->second].text = text_rows[i];
  }
  return pool;
}

}  // namespace lefcert::io

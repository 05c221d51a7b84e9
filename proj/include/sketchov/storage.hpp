/*******************************************************************************
 * Copyright 2026 The sketchov Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 *******************************************************************************/
#pragma once

// On-disk matrix storage.
//
// A chunked store is a directory:
//
//   manifest.json        format description, chunk map, metadata
//   chunk_NNNNNN.bin     raw column-major IEEE-754 binary64 little-endian
//                        blocks of `chunk_cols` columns (last may be narrower)
//   columns.map          one byte per column, 1 once the column was written
//
// A merged (monolithic) file is
//
//   bytes [0, 8)         magic "SKOVMAT1"
//   bytes [8, 16)        manifest length L, uint64 little-endian
//   bytes [16, 16 + L)   manifest JSON
//   zero padding up to the next multiple of 8
//   data segment         rows * cols binary64 little-endian, column-major
//
// Manifest fields (readers ignore unknown keys):
//   format           "sketchov-matrix"
//   format_version   1
//   form             "chunked" | "merged"
//   rows, cols       matrix shape
//   dtype            "float64-le"
//   order            "column-major"
//   chunk_cols       chunk width used when the data was written
//   chunks           [{id, file, col_start, col_count, crc32?}] (chunked only)
//   sealed           true once checksums were recorded (chunked only)
//   data_crc32       CRC-32 of the data segment (merged only)
//   metadata         free-form object (seed, decomposition parameters, ...)

#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "sketchov/common.hpp"
#include "sketchov/operator.hpp"

namespace sketchov::storage {

using Json = nlohmann::json;
namespace fs = std::filesystem;

inline constexpr int kFormatVersion = 1;
inline constexpr char kMonolithMagic[8] = {'S', 'K', 'O', 'V', 'M', 'A', 'T', '1'};
/// Columns held in memory by the streaming merge.
inline constexpr Index kMergeBufferColumns = 1;
/// Chunk count the default layout stays under.
inline constexpr Index kMaxDefaultChunks = 1024;

struct ChunkInfo {
  Index id = 0;
  std::string file;
  Index col_start = 0;
  Index col_count = 0;
  std::optional<std::uint32_t> crc32;
};

struct Manifest {
  int format_version = kFormatVersion;
  std::string form = "chunked";
  Index rows = 0;
  Index cols = 0;
  Index chunk_cols = 0;
  std::vector<ChunkInfo> chunks;
  bool sealed = false;
  std::optional<std::uint32_t> data_crc32;
  Json metadata = Json::object();

  Json to_json() const;
  static Manifest from_json(const Json& j);
};

/// Smallest chunk width keeping the chunk count <= kMaxDefaultChunks.
Index default_chunk_cols(Index cols);

class ChunkedMatrixStore {
 public:
  /// Writes the manifest, pre-sizes (sparse) chunk files and the column map.
  /// An existing path is refused unless `overwrite`.
  static ChunkedMatrixStore create(const fs::path& dir, Index rows, Index cols, Index chunk_cols,
                                   bool overwrite = false, Json metadata = Json::object());
  static ChunkedMatrixStore open(const fs::path& dir);

  ChunkedMatrixStore(ChunkedMatrixStore&&) noexcept;
  ChunkedMatrixStore& operator=(ChunkedMatrixStore&&) noexcept;
  ~ChunkedMatrixStore();

  const fs::path& path() const { return dir_; }
  const Manifest& manifest() const { return manifest_; }
  Index rows() const { return manifest_.rows; }
  Index cols() const { return manifest_.cols; }

  /// Persist `block` into columns [col_start, col_start + block.cols()).
  /// Safe to call concurrently for disjoint column ranges; overlapping
  /// in-flight ranges throw ContractError.
  void write_columns(Index col_start, const Matrix& block);

  Matrix read_columns(Index col_start, Index width) const;

  /// Number of columns marked written in the column map.
  Index written_columns() const;
  bool complete() const { return written_columns() == cols(); }

  /// Record per-chunk CRC-32 in the manifest. Requires a complete store.
  void seal();

  /// Replace the metadata object and rewrite the manifest.
  void set_metadata(Json metadata);

 private:
  struct InflightRanges;
  ChunkedMatrixStore(fs::path dir, Manifest manifest);
  void write_manifest() const;

  fs::path dir_;
  Manifest manifest_;
  std::unique_ptr<InflightRanges> inflight_;
};

/// Read-only view of a merged file.
class MonolithicMatrix {
 public:
  static MonolithicMatrix open(const fs::path& file);
  const Manifest& manifest() const { return manifest_; }
  const fs::path& path() const { return file_; }
  std::uint64_t data_offset() const { return data_offset_; }
  Matrix read_columns(Index col_start, Index width) const;

 private:
  fs::path file_;
  Manifest manifest_;
  std::uint64_t data_offset_ = 0;
};

struct MergeReport {
  std::uint64_t bytes_written = 0;
  /// Largest number of matrix elements buffered at once.
  Index peak_buffer_elements = 0;
};

/// Stream a complete chunked store into one monolithic file. Fails with
/// IntegrityError naming the chunk on a missing/short chunk, an incomplete
/// column map or (if sealed) a checksum mismatch.
MergeReport merge(const ChunkedMatrixStore& store, const fs::path& out_file,
                  bool overwrite = false);

struct VerifyReport {
  bool ok = true;
  std::vector<std::string> problems;
};

/// Structural and checksum checks on either form.
VerifyReport verify(const fs::path& path);

/// Manifest of either form.
Manifest read_manifest(const fs::path& path);

/// Columns of either form (directory = chunked, regular file = merged).
Matrix read_columns(const fs::path& path, Index col_start, Index width);
Matrix load_matrix(const fs::path& path);

/// Write a whole matrix as a sealed chunked store.
ChunkedMatrixStore save_matrix(const fs::path& dir, const Matrix& m, Index chunk_cols,
                               bool overwrite = false, Json metadata = Json::object());

/// Dense operator backed by a stored matrix.
DenseOperator load_dense_operator(const fs::path& path, bool hermitian);

}  // namespace sketchov::storage

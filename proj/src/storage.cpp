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
#include "sketchov/storage.hpp"

#include <fcntl.h>
#include <sys/stat.h>
#include <unistd.h>
#include <zlib.h>

#include <algorithm>
#include <bit>
#include <cerrno>
#include <cstring>
#include <fstream>
#include <iomanip>
#include <mutex>
#include <sstream>
#include <utility>

namespace sketchov::storage {

static_assert(std::endian::native == std::endian::little,
              "storage writes host doubles directly; big-endian hosts need byte swapping");

namespace {

constexpr const char* kManifestName = "manifest.json";
constexpr const char* kColumnMapName = "columns.map";

std::string chunk_file_name(Index id) {
  std::ostringstream os;
  os << "chunk_" << std::setw(6) << std::setfill('0') << id << ".bin";
  return os.str();
}

// RAII POSIX file descriptor.
class Fd {
 public:
  Fd(const fs::path& path, int flags, mode_t mode = 0644) : fd_(::open(path.c_str(), flags, mode)) {
    if (fd_ < 0) throw IoError("cannot open " + path.string() + ": " + std::strerror(errno));
  }
  Fd(const Fd&) = delete;
  Fd& operator=(const Fd&) = delete;
  ~Fd() {
    if (fd_ >= 0) ::close(fd_);
  }
  int get() const { return fd_; }

 private:
  int fd_;
};

void pwrite_all(int fd, const void* data, std::size_t size, std::uint64_t offset,
                const std::string& what) {
  const auto* p = static_cast<const char*>(data);
  while (size > 0) {
    const ssize_t n = ::pwrite(fd, p, size, static_cast<off_t>(offset));
    if (n < 0) {
      if (errno == EINTR) continue;
      throw IoError("write failed (" + what + "): " + std::strerror(errno));
    }
    p += n;
    size -= static_cast<std::size_t>(n);
    offset += static_cast<std::uint64_t>(n);
  }
}

void pread_all(int fd, void* data, std::size_t size, std::uint64_t offset,
               const std::string& what) {
  auto* p = static_cast<char*>(data);
  while (size > 0) {
    const ssize_t n = ::pread(fd, p, size, static_cast<off_t>(offset));
    if (n < 0) {
      if (errno == EINTR) continue;
      throw IoError("read failed (" + what + "): " + std::strerror(errno));
    }
    if (n == 0) throw IntegrityError("unexpected end of file (" + what + ")");
    p += n;
    size -= static_cast<std::size_t>(n);
    offset += static_cast<std::uint64_t>(n);
  }
}

std::uint64_t file_size_or_zero(const fs::path& p) {
  std::error_code ec;
  const auto size = fs::file_size(p, ec);
  return ec ? 0 : static_cast<std::uint64_t>(size);
}

std::uint64_t chunk_bytes(const Manifest& m, const ChunkInfo& c) {
  return static_cast<std::uint64_t>(m.rows) * static_cast<std::uint64_t>(c.col_count) * 8u;
}

std::uint32_t crc_update(std::uint32_t crc, const void* data, std::size_t size) {
  const auto* p = static_cast<const Bytef*>(data);
  uLong c = crc;
  while (size > 0) {
    const uInt step = static_cast<uInt>(std::min<std::size_t>(size, 1u << 30));
    c = ::crc32(c, p, step);
    p += step;
    size -= step;
  }
  return static_cast<std::uint32_t>(c);
}

std::uint32_t crc_of_file(const fs::path& p, std::uint64_t offset, std::uint64_t length) {
  Fd fd(p, O_RDONLY);
  std::vector<char> buf(1 << 20);
  std::uint32_t crc = static_cast<std::uint32_t>(::crc32(0L, Z_NULL, 0));
  while (length > 0) {
    const std::size_t step = static_cast<std::size_t>(std::min<std::uint64_t>(length, buf.size()));
    pread_all(fd.get(), buf.data(), step, offset, p.string());
    crc = crc_update(crc, buf.data(), step);
    offset += step;
    length -= step;
  }
  return crc;
}

void write_text_atomic(const fs::path& target, const std::string& text) {
  const fs::path tmp = target.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write " + tmp.string());
    out << text;
    if (!out) throw IoError("write failed: " + tmp.string());
  }
  std::error_code ec;
  fs::rename(tmp, target, ec);
  if (ec) throw IoError("cannot rename " + tmp.string() + ": " + ec.message());
}

Index checked_index(const Json& j, const char* key) {
  if (!j.contains(key) || !j.at(key).is_number_integer())
    throw IntegrityError(std::string("manifest: missing integer field '") + key + "'");
  return j.at(key).get<Index>();
}

void validate_chunk_map(const Manifest& m) {
  Index next = 0;
  for (std::size_t i = 0; i < m.chunks.size(); ++i) {
    const auto& c = m.chunks[i];
    if (c.id != static_cast<Index>(i) || c.col_start != next || c.col_count < 1)
      throw IntegrityError("manifest: chunk map not contiguous at chunk " + std::to_string(i));
    next += c.col_count;
  }
  if (next != m.cols)
    throw IntegrityError("manifest: chunk widths sum to " + std::to_string(next) +
                         ", expected " + std::to_string(m.cols));
}

std::uint64_t align8(std::uint64_t v) { return (v + 7u) & ~std::uint64_t{7u}; }

}  // namespace

Json Manifest::to_json() const {
  Json j;
  j["format"] = "sketchov-matrix";
  j["format_version"] = format_version;
  j["form"] = form;
  j["rows"] = rows;
  j["cols"] = cols;
  j["dtype"] = "float64-le";
  j["order"] = "column-major";
  j["chunk_cols"] = chunk_cols;
  j["metadata"] = metadata;
  if (form == "chunked") {
    Json arr = Json::array();
    for (const auto& c : chunks) {
      Json e{{"id", c.id}, {"file", c.file}, {"col_start", c.col_start},
             {"col_count", c.col_count}};
      if (c.crc32) e["crc32"] = *c.crc32;
      arr.push_back(std::move(e));
    }
    j["chunks"] = std::move(arr);
    j["sealed"] = sealed;
  } else if (data_crc32) {
    j["data_crc32"] = *data_crc32;
  }
  return j;
}

Manifest Manifest::from_json(const Json& j) {
  if (!j.is_object() || j.value("format", "") != "sketchov-matrix")
    throw IntegrityError("manifest: not a sketchov matrix manifest");
  Manifest m;
  m.format_version = j.value("format_version", 0);
  if (m.format_version < 1 || m.format_version > kFormatVersion)
    throw IntegrityError("manifest: unsupported format_version " +
                         std::to_string(m.format_version));
  if (j.value("dtype", "") != "float64-le" || j.value("order", "") != "column-major")
    throw IntegrityError("manifest: unsupported dtype/order");
  m.form = j.value("form", "chunked");
  m.rows = checked_index(j, "rows");
  m.cols = checked_index(j, "cols");
  m.chunk_cols = checked_index(j, "chunk_cols");
  if (m.rows < 1 || m.cols < 1 || m.chunk_cols < 1)
    throw IntegrityError("manifest: shape fields must be positive");
  if (j.contains("metadata")) m.metadata = j.at("metadata");
  if (m.form == "chunked") {
    if (!j.contains("chunks") || !j.at("chunks").is_array())
      throw IntegrityError("manifest: missing chunk list");
    for (const auto& e : j.at("chunks")) {
      ChunkInfo c;
      c.id = checked_index(e, "id");
      c.col_start = checked_index(e, "col_start");
      c.col_count = checked_index(e, "col_count");
      c.file = e.value("file", "");
      if (c.file.empty() || c.file.find('/') != std::string::npos)
        throw IntegrityError("manifest: bad chunk file name");
      if (e.contains("crc32")) c.crc32 = e.at("crc32").get<std::uint32_t>();
      m.chunks.push_back(std::move(c));
    }
    m.sealed = j.value("sealed", false);
    validate_chunk_map(m);
  } else if (m.form == "merged") {
    if (j.contains("data_crc32")) m.data_crc32 = j.at("data_crc32").get<std::uint32_t>();
  } else {
    throw IntegrityError("manifest: unknown form '" + m.form + "'");
  }
  return m;
}

Index default_chunk_cols(Index cols) {
  return std::max<Index>(1, (cols + kMaxDefaultChunks - 1) / kMaxDefaultChunks);
}

struct ChunkedMatrixStore::InflightRanges {
  std::mutex mutex;
  std::vector<std::pair<Index, Index>> ranges;
};

ChunkedMatrixStore::ChunkedMatrixStore(fs::path dir, Manifest manifest)
    : dir_(std::move(dir)), manifest_(std::move(manifest)),
      inflight_(std::make_unique<InflightRanges>()) {}

ChunkedMatrixStore::ChunkedMatrixStore(ChunkedMatrixStore&&) noexcept = default;
ChunkedMatrixStore& ChunkedMatrixStore::operator=(ChunkedMatrixStore&&) noexcept = default;
ChunkedMatrixStore::~ChunkedMatrixStore() = default;

ChunkedMatrixStore ChunkedMatrixStore::create(const fs::path& dir, Index rows, Index cols,
                                              Index chunk_cols, bool overwrite, Json metadata) {
  if (rows < 1 || cols < 1 || chunk_cols < 1)
    throw ParameterError("create_layout: rows, cols and chunk_cols must be >= 1");
  std::error_code ec;
  if (fs::exists(dir, ec)) {
    if (!overwrite) throw IoError("create_layout: " + dir.string() + " already exists");
    fs::remove_all(dir, ec);
    if (ec) throw IoError("cannot remove " + dir.string() + ": " + ec.message());
  }
  fs::create_directories(dir, ec);
  if (ec) throw IoError("cannot create " + dir.string() + ": " + ec.message());

  Manifest m;
  m.rows = rows;
  m.cols = cols;
  m.chunk_cols = chunk_cols;
  m.metadata = metadata.is_null() ? Json::object() : std::move(metadata);
  for (Index start = 0, id = 0; start < cols; start += chunk_cols, ++id)
    m.chunks.push_back({id, chunk_file_name(id), start, std::min(chunk_cols, cols - start), {}});

  ChunkedMatrixStore store(dir, std::move(m));
  for (const auto& c : store.manifest_.chunks) {
    Fd fd(dir / c.file, O_CREAT | O_TRUNC | O_WRONLY);
    if (::ftruncate(fd.get(), static_cast<off_t>(chunk_bytes(store.manifest_, c))) != 0)
      throw IoError("cannot size chunk " + std::to_string(c.id) + ": " + std::strerror(errno));
  }
  {
    Fd fd(dir / kColumnMapName, O_CREAT | O_TRUNC | O_WRONLY);
    if (::ftruncate(fd.get(), static_cast<off_t>(cols)) != 0)
      throw IoError("cannot size column map: " + std::string(std::strerror(errno)));
  }
  store.write_manifest();
  return store;
}

ChunkedMatrixStore ChunkedMatrixStore::open(const fs::path& dir) {
  Manifest m = read_manifest(dir);
  if (m.form != "chunked") throw IntegrityError(dir.string() + " is not a chunked store");
  return ChunkedMatrixStore(dir, std::move(m));
}

void ChunkedMatrixStore::write_manifest() const {
  write_text_atomic(dir_ / kManifestName, manifest_.to_json().dump(2) + "\n");
}

void ChunkedMatrixStore::write_columns(Index col_start, const Matrix& block) {
  const Index width = block.cols();
  if (block.rows() != rows())
    throw ShapeError("write_columns: block has " + std::to_string(block.rows()) +
                     " rows, store has " + std::to_string(rows()));
  if (col_start < 0 || width < 0 || col_start + width > cols())
    throw ShapeError("write_columns: range [" + std::to_string(col_start) + ", " +
                     std::to_string(col_start + width) + ") exceeds " + std::to_string(cols()) +
                     " columns");
  if (width == 0) return;
  const Index col_end = col_start + width;
  {
    std::lock_guard lock(inflight_->mutex);
    for (const auto& [s, e] : inflight_->ranges)
      if (col_start < e && s < col_end)
        throw ContractError("write_columns: range overlaps an in-flight write");
    inflight_->ranges.emplace_back(col_start, col_end);
  }
  auto release = [&] {
    std::lock_guard lock(inflight_->mutex);
    auto& r = inflight_->ranges;
    r.erase(std::find(r.begin(), r.end(), std::make_pair(col_start, col_end)));
  };
  try {
    const std::uint64_t col_bytes = static_cast<std::uint64_t>(rows()) * 8u;
    for (const auto& c : manifest_.chunks) {
      const Index lo = std::max(col_start, c.col_start);
      const Index hi = std::min(col_end, c.col_start + c.col_count);
      if (lo >= hi) continue;
      Fd fd(dir_ / c.file, O_WRONLY);
      pwrite_all(fd.get(), block.col(lo - col_start).data(),
                 static_cast<std::size_t>(hi - lo) * col_bytes,
                 static_cast<std::uint64_t>(lo - c.col_start) * col_bytes,
                 "chunk " + std::to_string(c.id));
    }
    const std::vector<char> marks(static_cast<std::size_t>(width), 1);
    Fd map(dir_ / kColumnMapName, O_WRONLY);
    pwrite_all(map.get(), marks.data(), marks.size(), static_cast<std::uint64_t>(col_start),
               "column map");
  } catch (...) {
    release();
    throw;
  }
  release();
}

Matrix ChunkedMatrixStore::read_columns(Index col_start, Index width) const {
  if (col_start < 0 || width < 0 || col_start + width > cols())
    throw ShapeError("read_columns: range out of bounds");
  Matrix out(rows(), width);
  const Index col_end = col_start + width;
  const std::uint64_t col_bytes = static_cast<std::uint64_t>(rows()) * 8u;
  for (const auto& c : manifest_.chunks) {
    const Index lo = std::max(col_start, c.col_start);
    const Index hi = std::min(col_end, c.col_start + c.col_count);
    if (lo >= hi) continue;
    const fs::path file = dir_ / c.file;
    if (!fs::exists(file)) throw IntegrityError("chunk " + std::to_string(c.id) + " is missing");
    Fd fd(file, O_RDONLY);
    pread_all(fd.get(), out.col(lo - col_start).data(),
              static_cast<std::size_t>(hi - lo) * col_bytes,
              static_cast<std::uint64_t>(lo - c.col_start) * col_bytes,
              "chunk " + std::to_string(c.id));
  }
  return out;
}

Index ChunkedMatrixStore::written_columns() const {
  const fs::path map_path = dir_ / kColumnMapName;
  if (file_size_or_zero(map_path) != static_cast<std::uint64_t>(cols())) return 0;
  std::vector<char> marks(static_cast<std::size_t>(cols()));
  Fd fd(map_path, O_RDONLY);
  pread_all(fd.get(), marks.data(), marks.size(), 0, "column map");
  return static_cast<Index>(std::count(marks.begin(), marks.end(), 1));
}

void ChunkedMatrixStore::seal() {
  if (!complete())
    throw IntegrityError("seal: only " + std::to_string(written_columns()) + " of " +
                         std::to_string(cols()) + " columns written");
  for (auto& c : manifest_.chunks) {
    const fs::path file = dir_ / c.file;
    if (file_size_or_zero(file) != chunk_bytes(manifest_, c))
      throw IntegrityError("chunk " + std::to_string(c.id) + " has wrong length");
    c.crc32 = crc_of_file(file, 0, chunk_bytes(manifest_, c));
  }
  manifest_.sealed = true;
  write_manifest();
}

void ChunkedMatrixStore::set_metadata(Json metadata) {
  manifest_.metadata = std::move(metadata);
  write_manifest();
}

MonolithicMatrix MonolithicMatrix::open(const fs::path& file) {
  Fd fd(file, O_RDONLY);
  char header[16];
  const std::uint64_t size = file_size_or_zero(file);
  if (size < 16) throw IntegrityError(file.string() + ": truncated header");
  pread_all(fd.get(), header, sizeof header, 0, file.string());
  if (std::memcmp(header, kMonolithMagic, 8) != 0)
    throw IntegrityError(file.string() + ": bad magic");
  std::uint64_t len = 0;
  std::memcpy(&len, header + 8, 8);
  if (len > size - 16) throw IntegrityError(file.string() + ": manifest length exceeds file");
  std::string text(static_cast<std::size_t>(len), '\0');
  pread_all(fd.get(), text.data(), text.size(), 16, file.string());
  Json j;
  try {
    j = Json::parse(text);
  } catch (const Json::exception& e) {
    throw IntegrityError(file.string() + ": manifest is not valid JSON: " + e.what());
  }
  MonolithicMatrix mm;
  mm.file_ = file;
  mm.manifest_ = Manifest::from_json(j);
  if (mm.manifest_.form != "merged") throw IntegrityError(file.string() + ": not a merged file");
  mm.data_offset_ = align8(16 + len);
  const std::uint64_t expected = mm.data_offset_ + static_cast<std::uint64_t>(mm.manifest_.rows) *
                                                       static_cast<std::uint64_t>(mm.manifest_.cols) * 8u;
  if (size != expected)
    throw IntegrityError(file.string() + ": data segment has wrong length");
  return mm;
}

Matrix MonolithicMatrix::read_columns(Index col_start, Index width) const {
  if (col_start < 0 || width < 0 || col_start + width > manifest_.cols)
    throw ShapeError("read_columns: range out of bounds");
  Matrix out(manifest_.rows, width);
  if (width == 0) return out;
  Fd fd(file_, O_RDONLY);
  const std::uint64_t col_bytes = static_cast<std::uint64_t>(manifest_.rows) * 8u;
  pread_all(fd.get(), out.data(), static_cast<std::size_t>(width) * col_bytes,
            data_offset_ + static_cast<std::uint64_t>(col_start) * col_bytes, file_.string());
  return out;
}

MergeReport merge(const ChunkedMatrixStore& store, const fs::path& out_file, bool overwrite) {
  const Manifest& src = store.manifest();
  if (store.written_columns() != src.cols)
    throw IntegrityError("merge: store incomplete (" + std::to_string(store.written_columns()) +
                         " of " + std::to_string(src.cols) + " columns written)");
  for (const auto& c : src.chunks) {
    const fs::path file = store.path() / c.file;
    if (!fs::exists(file)) throw IntegrityError("merge: chunk " + std::to_string(c.id) + " missing");
    if (file_size_or_zero(file) != chunk_bytes(src, c))
      throw IntegrityError("merge: chunk " + std::to_string(c.id) + " has wrong length");
  }
  if (fs::exists(out_file) && !overwrite)
    throw IoError("merge: " + out_file.string() + " already exists");

  // Pass 1: stream every chunk, check seals, accumulate the data CRC.
  const Index rows = src.rows;
  const std::uint64_t col_bytes = static_cast<std::uint64_t>(rows) * 8u;
  std::vector<double> buffer(static_cast<std::size_t>(rows * kMergeBufferColumns));
  MergeReport report;
  report.peak_buffer_elements = static_cast<Index>(buffer.size());

  auto for_each_column = [&](auto&& sink) {
    for (const auto& c : src.chunks) {
      Fd in(store.path() / c.file, O_RDONLY);
      std::uint32_t chunk_crc = static_cast<std::uint32_t>(::crc32(0L, Z_NULL, 0));
      for (Index j = 0; j < c.col_count; ++j) {
        pread_all(in.get(), buffer.data(), static_cast<std::size_t>(col_bytes),
                  static_cast<std::uint64_t>(j) * col_bytes, "chunk " + std::to_string(c.id));
        chunk_crc = crc_update(chunk_crc, buffer.data(), static_cast<std::size_t>(col_bytes));
        sink();
      }
      if (c.crc32 && *c.crc32 != chunk_crc)
        throw IntegrityError("merge: chunk " + std::to_string(c.id) + " checksum mismatch");
    }
  };

  std::uint32_t data_crc = static_cast<std::uint32_t>(::crc32(0L, Z_NULL, 0));
  for_each_column(
      [&] { data_crc = crc_update(data_crc, buffer.data(), static_cast<std::size_t>(col_bytes)); });

  Manifest out = src;
  out.form = "merged";
  out.chunks.clear();
  out.sealed = false;
  out.data_crc32 = data_crc;
  const std::string text = out.to_json().dump(2) + "\n";
  const std::uint64_t len = text.size();
  const std::uint64_t data_offset = align8(16 + len);

  // Pass 2: write header, manifest, data.
  const fs::path tmp = out_file.string() + ".tmp";
  {
    Fd fd(tmp, O_CREAT | O_TRUNC | O_WRONLY);
    char header[16];
    std::memcpy(header, kMonolithMagic, 8);
    std::memcpy(header + 8, &len, 8);
    pwrite_all(fd.get(), header, sizeof header, 0, tmp.string());
    pwrite_all(fd.get(), text.data(), text.size(), 16, tmp.string());
    const std::vector<char> pad(static_cast<std::size_t>(data_offset - 16 - len), 0);
    if (!pad.empty()) pwrite_all(fd.get(), pad.data(), pad.size(), 16 + len, tmp.string());
    std::uint64_t offset = data_offset;
    for_each_column([&] {
      pwrite_all(fd.get(), buffer.data(), static_cast<std::size_t>(col_bytes), offset, tmp.string());
      offset += col_bytes;
    });
    if (::fsync(fd.get()) != 0) throw IoError("fsync failed on " + tmp.string());
    report.bytes_written = offset;
  }
  std::error_code ec;
  fs::rename(tmp, out_file, ec);
  if (ec) throw IoError("cannot rename " + tmp.string() + ": " + ec.message());
  return report;
}

Manifest read_manifest(const fs::path& path) {
  if (fs::is_directory(path)) {
    std::ifstream in(path / kManifestName);
    if (!in) throw IoError("cannot open manifest in " + path.string());
    Json j;
    try {
      in >> j;
    } catch (const Json::exception& e) {
      throw IntegrityError("manifest is not valid JSON: " + std::string(e.what()));
    }
    return Manifest::from_json(j);
  }
  if (!fs::exists(path)) throw IoError(path.string() + " does not exist");
  return MonolithicMatrix::open(path).manifest();
}

VerifyReport verify(const fs::path& path) {
  VerifyReport report;
  auto fail = [&](std::string msg) {
    report.ok = false;
    report.problems.push_back(std::move(msg));
  };
  try {
    if (fs::is_directory(path)) {
      const auto store = ChunkedMatrixStore::open(path);
      const Manifest& m = store.manifest();
      const Index written = store.written_columns();
      if (written != m.cols)
        fail("incomplete: " + std::to_string(written) + " of " + std::to_string(m.cols) +
             " columns written");
      for (const auto& c : m.chunks) {
        const fs::path file = path / c.file;
        if (!fs::exists(file)) {
          fail("chunk " + std::to_string(c.id) + " missing");
          continue;
        }
        if (file_size_or_zero(file) != chunk_bytes(m, c)) {
          fail("chunk " + std::to_string(c.id) + " has wrong length");
          continue;
        }
        if (c.crc32 && crc_of_file(file, 0, chunk_bytes(m, c)) != *c.crc32)
          fail("chunk " + std::to_string(c.id) + " checksum mismatch");
      }
      if (!m.sealed) fail("store not sealed; checksums unavailable");
    } else {
      const auto mm = MonolithicMatrix::open(path);
      const Manifest& m = mm.manifest();
      const std::uint64_t bytes =
          static_cast<std::uint64_t>(m.rows) * static_cast<std::uint64_t>(m.cols) * 8u;
      if (!m.data_crc32) {
        fail("merged file carries no data checksum");
      } else if (crc_of_file(path, mm.data_offset(), bytes) != *m.data_crc32) {
        fail("data segment checksum mismatch");
      }
    }
  } catch (const std::exception& e) {
    fail(e.what());
  }
  return report;
}

Matrix read_columns(const fs::path& path, Index col_start, Index width) {
  if (fs::is_directory(path)) return ChunkedMatrixStore::open(path).read_columns(col_start, width);
  return MonolithicMatrix::open(path).read_columns(col_start, width);
}

Matrix load_matrix(const fs::path& path) {
  const Manifest m = read_manifest(path);
  return read_columns(path, 0, m.cols);
}

ChunkedMatrixStore save_matrix(const fs::path& dir, const Matrix& m, Index chunk_cols,
                               bool overwrite, Json metadata) {
  auto store = ChunkedMatrixStore::create(dir, m.rows(), m.cols(), chunk_cols, overwrite,
                                          std::move(metadata));
  store.write_columns(0, m);
  store.seal();
  return store;
}

DenseOperator load_dense_operator(const fs::path& path, bool hermitian) {
  return DenseOperator(load_matrix(path), hermitian);
}

}  // namespace sketchov::storage

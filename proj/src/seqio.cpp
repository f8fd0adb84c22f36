#include "modesift/seqio.hpp"

#include "modesift/error.hpp"

#include <png.h>

#include <nlohmann/json.hpp>

#include <algorithm>
#include <array>
#include <bit>
#include <cctype>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <iterator>
#include <memory>
#include <sstream>

namespace modesift {

namespace fs = std::filesystem;

namespace {

constexpr std::array<char, 4> kRawMagic = {'M', 'S', 'Q', '1'};
constexpr std::size_t kRawHeaderBytes = 4 + 4 * 4;

bool valid_intensity(double v) { return std::isfinite(v) && v >= 0.0 && v <= 1.0; }

void put_u32(std::string& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xffu));
}

std::uint32_t get_u32(const unsigned char* p) {
  return static_cast<std::uint32_t>(p[0]) | (static_cast<std::uint32_t>(p[1]) << 8) |
         (static_cast<std::uint32_t>(p[2]) << 16) | (static_cast<std::uint32_t>(p[3]) << 24);
}

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  require(static_cast<bool>(in), ErrorCode::IoFailure, "cannot open " + path.string());
  return std::string(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

void write_file(const fs::path& path, const std::string& bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  require(static_cast<bool>(out), ErrorCode::IoFailure, "cannot write " + path.string());
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  require(static_cast<bool>(out), ErrorCode::IoFailure, "short write to " + path.string());
}

FrameSequence load_raw(const fs::path& path) {
  const std::string bytes = read_file(path);
  require(bytes.size() >= kRawHeaderBytes, ErrorCode::MalformedHeader,
          path.string() + ": file shorter than header");
  require(std::equal(kRawMagic.begin(), kRawMagic.end(), bytes.begin()), ErrorCode::MalformedHeader,
          path.string() + ": bad magic");
  const auto* p = reinterpret_cast<const unsigned char*>(bytes.data());
  const std::uint32_t rows = get_u32(p + 4);
  const std::uint32_t cols = get_u32(p + 8);
  const std::uint32_t frames = get_u32(p + 12);
  const float fps = std::bit_cast<float>(get_u32(p + 16));
  require(rows > 0 && cols > 0, ErrorCode::MalformedHeader, path.string() + ": zero frame size");
  require(std::isfinite(fps) && fps > 0.0f, ErrorCode::MalformedHeader,
          path.string() + ": fps must be positive");
  const std::uint64_t count = std::uint64_t{rows} * cols * frames;
  require(bytes.size() == kRawHeaderBytes + 4 * count, ErrorCode::MalformedHeader,
          path.string() + ": payload size does not match header");
  require(frames >= 2, ErrorCode::TooFewFrames, path.string() + ": need at least two frames");

  std::vector<double> values(count);
  for (std::uint64_t i = 0; i < count; ++i) {
    values[i] = std::bit_cast<float>(get_u32(p + kRawHeaderBytes + 4 * i));
  }
  return FrameSequence(rows, cols, std::move(values), fps, path.filename().string());
}

void write_raw(const FrameSequence& seq, const fs::path& path) {
  std::string out;
  out.reserve(kRawHeaderBytes + 4 * seq.values().size());
  out.append(kRawMagic.begin(), kRawMagic.end());
  put_u32(out, static_cast<std::uint32_t>(seq.rows()));
  put_u32(out, static_cast<std::uint32_t>(seq.cols()));
  put_u32(out, static_cast<std::uint32_t>(seq.frame_count()));
  put_u32(out, std::bit_cast<std::uint32_t>(static_cast<float>(seq.fps())));
  for (double v : seq.values()) put_u32(out, std::bit_cast<std::uint32_t>(static_cast<float>(v)));
  write_file(path, out);
}

struct GrayImage {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> values;
};

// Netpbm P2/P3/P5/P6 with maxval <= 255. Color is reduced to luma.
GrayImage load_pnm(const fs::path& path) {
  const std::string bytes = read_file(path);
  std::size_t pos = 0;
  auto skip_space = [&] {
    while (pos < bytes.size()) {
      if (bytes[pos] == '#') {
        while (pos < bytes.size() && bytes[pos] != '\n') ++pos;
      } else if (std::isspace(static_cast<unsigned char>(bytes[pos]))) {
        ++pos;
      } else {
        break;
      }
    }
  };
  auto read_int = [&]() -> long {
    skip_space();
    std::size_t start = pos;
    while (pos < bytes.size() && std::isdigit(static_cast<unsigned char>(bytes[pos]))) ++pos;
    require(pos > start, ErrorCode::MalformedHeader, path.string() + ": expected integer");
    return std::stol(bytes.substr(start, pos - start));
  };

  require(bytes.size() >= 2 && bytes[0] == 'P', ErrorCode::MalformedHeader,
          path.string() + ": not a netpbm file");
  const char kind = bytes[1];
  require(kind == '2' || kind == '3' || kind == '5' || kind == '6', ErrorCode::MalformedHeader,
          path.string() + ": unsupported netpbm variant");
  pos = 2;
  const long cols = read_int();
  const long rows = read_int();
  const long maxval = read_int();
  require(cols > 0 && rows > 0, ErrorCode::MalformedHeader, path.string() + ": bad size");
  require(maxval > 0 && maxval <= 255, ErrorCode::MalformedHeader,
          path.string() + ": only 8-bit images are supported");
  const bool color = kind == '3' || kind == '6';
  const bool binary = kind == '5' || kind == '6';
  const std::size_t channels = color ? 3 : 1;
  const std::size_t n = static_cast<std::size_t>(rows * cols);

  std::vector<double> samples(n * channels);
  if (binary) {
    ++pos;  // single whitespace after maxval
    require(bytes.size() >= pos + samples.size(), ErrorCode::MalformedHeader,
            path.string() + ": truncated pixel data");
    for (std::size_t i = 0; i < samples.size(); ++i) {
      samples[i] = static_cast<unsigned char>(bytes[pos + i]);
    }
  } else {
    for (auto& s : samples) s = static_cast<double>(read_int());
  }

  GrayImage img{static_cast<std::size_t>(rows), static_cast<std::size_t>(cols),
                std::vector<double>(n)};
  const double scale = 1.0 / static_cast<double>(maxval);
  for (std::size_t i = 0; i < n; ++i) {
    img.values[i] = color ? luma(samples[3 * i], samples[3 * i + 1], samples[3 * i + 2]) * scale
                          : samples[i] * scale;
  }
  return img;
}

GrayImage load_png(const fs::path& path) {
  png_image image;
  std::memset(&image, 0, sizeof(image));
  image.version = PNG_IMAGE_VERSION;
  require(png_image_begin_read_from_file(&image, path.c_str()) != 0, ErrorCode::MalformedHeader,
          path.string() + ": " + image.message);
  const bool color = (image.format & PNG_FORMAT_FLAG_COLOR) != 0;
  image.format = color ? PNG_FORMAT_RGB : PNG_FORMAT_GRAY;
  std::vector<png_byte> buffer(PNG_IMAGE_SIZE(image));
  if (png_image_finish_read(&image, nullptr, buffer.data(), 0, nullptr) == 0) {
    std::string msg = image.message;
    png_image_free(&image);
    fail(ErrorCode::MalformedHeader, path.string() + ": " + msg);
  }
  GrayImage img{image.height, image.width, std::vector<double>(std::size_t{image.height} * image.width)};
  for (std::size_t i = 0; i < img.values.size(); ++i) {
    img.values[i] = color ? luma(buffer[3 * i], buffer[3 * i + 1], buffer[3 * i + 2]) / 255.0
                          : buffer[i] / 255.0;
  }
  return img;
}

std::string lower_extension(const fs::path& p) {
  std::string ext = p.extension().string();
  std::transform(ext.begin(), ext.end(), ext.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return ext;
}

FrameSequence load_image_dir(const fs::path& dir) {
  require(fs::is_directory(dir), ErrorCode::IoFailure, dir.string() + " is not a directory");
  const fs::path meta_path = dir / "meta.json";
  require(fs::exists(meta_path), ErrorCode::MalformedHeader, dir.string() + ": missing meta.json");
  double fps = 0.0;
  try {
    fps = nlohmann::json::parse(read_file(meta_path)).at("fps").get<double>();
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::MalformedHeader, meta_path.string() + ": " + e.what());
  }
  require(std::isfinite(fps) && fps > 0.0, ErrorCode::MalformedHeader,
          meta_path.string() + ": fps must be positive");

  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (!entry.is_regular_file()) continue;
    const std::string ext = lower_extension(entry.path());
    if (ext == ".pgm" || ext == ".png" || ext == ".ppm") files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end(),
            [](const fs::path& a, const fs::path& b) { return a.filename() < b.filename(); });
  require(files.size() >= 2, ErrorCode::TooFewFrames, dir.string() + ": need at least two frames");

  std::vector<double> values;
  std::size_t rows = 0;
  std::size_t cols = 0;
  for (std::size_t i = 0; i < files.size(); ++i) {
    GrayImage img = lower_extension(files[i]) == ".png" ? load_png(files[i]) : load_pnm(files[i]);
    if (i == 0) {
      rows = img.rows;
      cols = img.cols;
      values.reserve(rows * cols * files.size());
    }
    require(img.rows == rows && img.cols == cols, ErrorCode::DimensionMismatch,
            files[i].string() + " differs in size from the first frame");
    values.insert(values.end(), img.values.begin(), img.values.end());
  }
  return FrameSequence(rows, cols, std::move(values), fps, dir.filename().string());
}

void write_image_dir(const FrameSequence& seq, const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  require(!ec && fs::is_directory(dir), ErrorCode::IoFailure, "cannot create " + dir.string());
  for (std::size_t t = 0; t < seq.frame_count(); ++t) {
    char name[32];
    std::snprintf(name, sizeof(name), "frame_%05zu.pgm", t);
    std::string out = "P5\n" + std::to_string(seq.cols()) + " " + std::to_string(seq.rows()) +
                      "\n255\n";
    for (double v : seq.frame(t)) {
      out.push_back(static_cast<char>(static_cast<unsigned char>(std::lround(v * 255.0))));
    }
    write_file(dir / name, out);
  }
  nlohmann::json meta = {{"fps", seq.fps()}};
  write_file(dir / "meta.json", meta.dump() + "\n");
}

}  // namespace

FrameSequence::FrameSequence(std::size_t rows, std::size_t cols, std::vector<double> values,
                             double fps, std::string source_id)
    : rows_(rows), cols_(cols), frames_(0), fps_(fps), source_id_(std::move(source_id)),
      values_(std::move(values)) {
  require(rows_ > 0 && cols_ > 0, ErrorCode::InvalidArgument, "frame size must be positive");
  require(std::isfinite(fps_) && fps_ > 0.0, ErrorCode::InvalidArgument, "fps must be positive");
  require(values_.size() % (rows_ * cols_) == 0, ErrorCode::DimensionMismatch,
          "value count is not a whole number of frames");
  frames_ = values_.size() / (rows_ * cols_);
  require(frames_ >= 2, ErrorCode::TooFewFrames, "need at least two frames");
  require(std::all_of(values_.begin(), values_.end(), valid_intensity), ErrorCode::MalformedData,
          "intensities must be finite and within [0,1]");
}

FrameSequence FrameSequence::from_stack(std::size_t rows, std::size_t cols,
                                        const Eigen::MatrixXd& stack, double fps,
                                        std::string source_id, bool clamp) {
  require(static_cast<std::size_t>(stack.rows()) == rows * cols, ErrorCode::DimensionMismatch,
          "stack height must equal rows * cols");
  std::vector<double> values(stack.data(), stack.data() + stack.size());
  if (clamp) {
    for (auto& v : values) v = std::isfinite(v) ? std::clamp(v, 0.0, 1.0) : 0.0;
  }
  return FrameSequence(rows, cols, std::move(values), fps, std::move(source_id));
}

std::span<const double> FrameSequence::frame(std::size_t t) const {
  require(t < frames_, ErrorCode::InvalidArgument, "frame index out of range");
  return std::span<const double>(values_).subspan(t * rows_ * cols_, rows_ * cols_);
}

Eigen::Map<const Eigen::MatrixXd> FrameSequence::as_matrix() const {
  return Eigen::Map<const Eigen::MatrixXd>(values_.data(),
                                           static_cast<Eigen::Index>(rows_ * cols_),
                                           static_cast<Eigen::Index>(frames_));
}

FrameSequence FrameSequence::with_fps(double fps) const {
  FrameSequence copy = *this;
  require(std::isfinite(fps) && fps > 0.0, ErrorCode::InvalidArgument, "fps must be positive");
  copy.fps_ = fps;
  return copy;
}

FrameSequence FrameSequence::with_source_id(std::string id) const {
  FrameSequence copy = *this;
  copy.source_id_ = std::move(id);
  return copy;
}

FrameSequence FrameSequence::select_frames(std::span<const std::size_t> indices) const {
  std::vector<double> values;
  values.reserve(indices.size() * pixels_per_frame());
  for (std::size_t t : indices) {
    auto f = frame(t);
    values.insert(values.end(), f.begin(), f.end());
  }
  return FrameSequence(rows_, cols_, std::move(values), fps_, source_id_);
}

bool operator==(const FrameSequence& a, const FrameSequence& b) {
  return a.rows_ == b.rows_ && a.cols_ == b.cols_ && a.frames_ == b.frames_ && a.fps_ == b.fps_ &&
         a.values_ == b.values_;
}

SequenceFormat detect_format(const fs::path& path) {
  return fs::is_directory(path) ? SequenceFormat::ImageDir : SequenceFormat::RawTensor;
}

FrameSequence load_sequence(const fs::path& path, SequenceFormat format) {
  require(fs::exists(path), ErrorCode::IoFailure, path.string() + " does not exist");
  return format == SequenceFormat::RawTensor ? load_raw(path) : load_image_dir(path);
}

void write_sequence(const FrameSequence& seq, const fs::path& path, SequenceFormat format) {
  if (format == SequenceFormat::RawTensor) {
    write_raw(seq, path);
  } else {
    write_image_dir(seq, path);
  }
}

FrameSequence resize(const FrameSequence& seq, std::size_t rows, std::size_t cols) {
  require(rows >= 1 && cols >= 1, ErrorCode::InvalidArgument, "target size must be positive");
  if (rows == seq.rows() && cols == seq.cols()) return seq;

  struct Tap {
    std::size_t lo, hi;
    double w;
  };
  auto taps = [](std::size_t out, std::size_t in) {
    std::vector<Tap> result(out);
    const double scale = static_cast<double>(in) / static_cast<double>(out);
    for (std::size_t i = 0; i < out; ++i) {
      double src = (static_cast<double>(i) + 0.5) * scale - 0.5;
      src = std::clamp(src, 0.0, static_cast<double>(in - 1));
      const auto lo = static_cast<std::size_t>(std::floor(src));
      const std::size_t hi = std::min(lo + 1, in - 1);
      result[i] = {lo, hi, src - static_cast<double>(lo)};
    }
    return result;
  };
  const auto row_taps = taps(rows, seq.rows());
  const auto col_taps = taps(cols, seq.cols());

  const std::size_t n_f = seq.frame_count();
  std::vector<double> out(rows * cols * n_f);
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t t = 0; t < static_cast<std::ptrdiff_t>(n_f); ++t) {
    const auto tt = static_cast<std::size_t>(t);
    for (std::size_t r = 0; r < rows; ++r) {
      const Tap& ry = row_taps[r];
      for (std::size_t c = 0; c < cols; ++c) {
        const Tap& cx = col_taps[c];
        const double top = (1.0 - cx.w) * seq.at(tt, ry.lo, cx.lo) + cx.w * seq.at(tt, ry.lo, cx.hi);
        const double bottom =
            (1.0 - cx.w) * seq.at(tt, ry.hi, cx.lo) + cx.w * seq.at(tt, ry.hi, cx.hi);
        out[(tt * rows + r) * cols + c] = std::clamp((1.0 - ry.w) * top + ry.w * bottom, 0.0, 1.0);
      }
    }
  }
  return FrameSequence(rows, cols, std::move(out), seq.fps(), seq.source_id());
}

SnapshotPair snapshots_from_stack(const Eigen::MatrixXd& stack, double fps) {
  require(stack.cols() >= 2, ErrorCode::TooFewFrames, "need at least two snapshots");
  require(std::isfinite(fps) && fps > 0.0, ErrorCode::InvalidArgument, "fps must be positive");
  const Eigen::Index n = stack.cols() - 1;
  require(stack.rows() >= n, ErrorCode::DimensionMismatch,
          "snapshot matrix must be tall (pixels >= snapshot pairs)");
  return SnapshotPair{stack.leftCols(n), stack.rightCols(n), fps};
}

SnapshotPair to_snapshots(const FrameSequence& seq) {
  return snapshots_from_stack(seq.as_matrix(), seq.fps());
}

}  // namespace modesift

#include "modesift/features.hpp"

#include "modesift/error.hpp"

#include <algorithm>
#include <bit>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace modesift::features {

namespace {

using Hist = std::vector<double>;

// Neighbor order is 0, 90, 180, 270 degrees; bit p set when neighbor >= center.
inline std::uint32_t encode(double c, double n0, double n1, double n2, double n3) {
  return static_cast<std::uint32_t>(n0 >= c) | (static_cast<std::uint32_t>(n1 >= c) << 1) |
         (static_cast<std::uint32_t>(n2 >= c) << 2) | (static_cast<std::uint32_t>(n3 >= c) << 3);
}

struct BlockRect {
  std::size_t r0, r1, c0, c1;
};

BlockRect block_rect(const FrameSequence& seq, std::size_t n_b, std::size_t block) {
  const std::size_t bi = block / n_b;
  const std::size_t bj = block % n_b;
  return {block_start(seq.rows(), n_b, bi), block_start(seq.rows(), n_b, bi + 1),
          block_start(seq.cols(), n_b, bj), block_start(seq.cols(), n_b, bj + 1)};
}

// Fills the 3 * bins slots of one block starting at `out`.
void encode_block(const FrameSequence& seq, const LbptopConfig& cfg,
                  const std::vector<std::uint8_t>& table, std::size_t block, double* out) {
  const BlockRect b = block_rect(seq, cfg.blocks, block);
  const std::size_t rx = cfg.radii[0], ry = cfg.radii[1], rt = cfg.radii[2];
  const std::size_t nf = seq.frame_count();
  const std::size_t bins = cfg.bins();
  double* xy = out;
  double* xt = out + bins;
  double* yt = out + 2 * bins;

  for (std::size_t t = 0; t < nf; ++t) {
    for (std::size_t y = b.r0 + ry; y + ry < b.r1; ++y) {
      for (std::size_t x = b.c0 + rx; x + rx < b.c1; ++x) {
        const auto code = encode(seq.at(t, y, x), seq.at(t, y, x + rx), seq.at(t, y - ry, x),
                                 seq.at(t, y, x - rx), seq.at(t, y + ry, x));
        xy[table[code]] += 1.0;
      }
    }
  }
  for (std::size_t y = b.r0; y < b.r1; ++y) {
    for (std::size_t t = rt; t + rt < nf; ++t) {
      for (std::size_t x = b.c0 + rx; x + rx < b.c1; ++x) {
        const auto code = encode(seq.at(t, y, x), seq.at(t, y, x + rx), seq.at(t - rt, y, x),
                                 seq.at(t, y, x - rx), seq.at(t + rt, y, x));
        xt[table[code]] += 1.0;
      }
    }
  }
  for (std::size_t x = b.c0; x < b.c1; ++x) {
    for (std::size_t t = rt; t + rt < nf; ++t) {
      for (std::size_t y = b.r0 + ry; y + ry < b.r1; ++y) {
        const auto code = encode(seq.at(t, y, x), seq.at(t, y + ry, x), seq.at(t - rt, y, x),
                                 seq.at(t, y - ry, x), seq.at(t + rt, y, x));
        yt[table[code]] += 1.0;
      }
    }
  }

  if (cfg.normalize) {
    for (double* h : {xy, xt, yt}) {
      double s = 0.0;
      for (std::size_t k = 0; k < bins; ++k) s += h[k];
      if (s > 0.0) {
        for (std::size_t k = 0; k < bins; ++k) h[k] /= s;
      }
    }
  }
}

void check_id(const std::string& s) {
  require(s.find_first_of(",\n\r\"") == std::string::npos, ErrorCode::InvalidArgument,
          "identifier '" + s + "' contains a CSV delimiter");
}

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream ss(line);
  while (std::getline(ss, cell, ',')) out.push_back(cell);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

}  // namespace

int circular_transitions(std::uint32_t code, std::size_t bits) {
  int n = 0;
  for (std::size_t i = 0; i < bits; ++i) {
    const auto a = (code >> i) & 1u;
    const auto b = (code >> ((i + 1) % bits)) & 1u;
    n += static_cast<int>(a != b);
  }
  return n;
}

std::vector<std::uint8_t> uniform_pattern_table(std::size_t neighbors) {
  require(neighbors == 4 || neighbors == 8, ErrorCode::InvalidArgument,
          "neighbor count must be 4 or 8");
  const std::size_t codes = std::size_t{1} << neighbors;
  const auto other = static_cast<std::uint8_t>(neighbors * (neighbors - 1) + 2);
  std::vector<std::uint8_t> table(codes, other);
  std::uint8_t next = 0;
  for (std::size_t c = 0; c < codes; ++c) {
    if (circular_transitions(static_cast<std::uint32_t>(c), neighbors) <= 2) table[c] = next++;
  }
  return table;
}

void validate(const FrameSequence& seq, const LbptopConfig& config) {
  require(config.neighbors == 4, ErrorCode::InvalidArgument,
          "only P = 4 axis-aligned neighbors are supported");
  require(config.blocks >= 1, ErrorCode::InvalidArgument, "block grid must be at least 1x1");
  require(config.radii[0] >= 1 && config.radii[1] >= 1 && config.radii[2] >= 1,
          ErrorCode::InvalidArgument, "radii must be positive");
  require(seq.frame_count() >= config.min_frames(), ErrorCode::SequenceTooShort,
          "LBPTOP needs at least " + std::to_string(config.min_frames()) + " frames, got " +
              std::to_string(seq.frame_count()));
  const std::size_t need = 2 * std::max(config.radii[0], config.radii[1]) + 1;
  const std::size_t min_rows = seq.rows() / config.blocks;
  const std::size_t min_cols = seq.cols() / config.blocks;
  require(min_rows >= need && min_cols >= need, ErrorCode::FrameTooSmall,
          "blocks of " + std::to_string(min_rows) + "x" + std::to_string(min_cols) +
              " pixels are smaller than " + std::to_string(need) + "x" + std::to_string(need));
}

LbptopFeature lbptop(const FrameSequence& seq, const LbptopConfig& config) {
  validate(seq, config);
  const auto table = uniform_pattern_table(config.neighbors);
  LbptopFeature f{std::vector<double>(config.dimension(), 0.0), config};
  const auto n_blocks = static_cast<std::ptrdiff_t>(config.blocks * config.blocks);
  const std::size_t stride = kPlaneCount * config.bins();
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t b = 0; b < n_blocks; ++b) {
    const auto blk = static_cast<std::size_t>(b);
    encode_block(seq, config, table, blk, f.values.data() + blk * stride);
  }
  return f;
}

namespace serial {

LbptopFeature lbptop(const FrameSequence& seq, const LbptopConfig& config) {
  validate(seq, config);
  const auto table = uniform_pattern_table(config.neighbors);
  LbptopFeature f{std::vector<double>(config.dimension(), 0.0), config};
  const std::size_t stride = kPlaneCount * config.bins();
  for (std::size_t b = 0; b < config.blocks * config.blocks; ++b) {
    encode_block(seq, config, table, b, f.values.data() + b * stride);
  }
  return f;
}

}  // namespace serial

void write_feature_csv(std::ostream& out, const std::vector<FeatureRow>& rows) {
  const std::size_t dim = rows.empty() ? 0 : rows.front().values.size();
  out << "sample_id,label,subject_id";
  for (std::size_t k = 0; k < dim; ++k) out << ",f" << k;
  out << '\n';
  char buf[40];
  for (const auto& r : rows) {
    check_id(r.sample_id);
    check_id(r.label);
    check_id(r.subject_id);
    require(r.values.size() == dim, ErrorCode::DimensionMismatch, "feature rows differ in length");
    out << r.sample_id << ',' << r.label << ',' << r.subject_id;
    for (double v : r.values) {
      std::snprintf(buf, sizeof(buf), "%.17g", v);
      out << ',' << buf;
    }
    out << '\n';
  }
}

std::vector<FeatureRow> read_feature_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  require(in.good(), ErrorCode::IoFailure, "cannot open " + path.string());
  std::string line;
  require(static_cast<bool>(std::getline(in, line)), ErrorCode::MalformedData,
          path.string() + ": empty feature file");
  const std::size_t cols = split(line).size();
  require(cols >= 3, ErrorCode::MalformedData, path.string() + ": bad header");
  std::vector<FeatureRow> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto cells = split(line);
    require(cells.size() == cols, ErrorCode::MalformedData,
            path.string() + ": row has " + std::to_string(cells.size()) + " cells");
    FeatureRow r{cells[0], cells[1], cells[2], {}};
    r.values.reserve(cols - 3);
    for (std::size_t k = 3; k < cols; ++k) {
      try {
        r.values.push_back(std::stod(cells[k]));
      } catch (const std::exception&) {
        fail(ErrorCode::MalformedData, path.string() + ": bad number '" + cells[k] + "'");
      }
    }
    rows.push_back(std::move(r));
  }
  return rows;
}

void write_feature_matrix(const std::filesystem::path& path, const std::vector<FeatureRow>& rows) {
  const std::size_t dim = rows.empty() ? 0 : rows.front().values.size();
  std::string buf = "MSF1";
  auto put = [&buf](std::uint32_t v) {
    for (int i = 0; i < 4; ++i) buf.push_back(static_cast<char>((v >> (8 * i)) & 0xffu));
  };
  put(static_cast<std::uint32_t>(rows.size()));
  put(static_cast<std::uint32_t>(dim));
  for (const auto& r : rows) {
    require(r.values.size() == dim, ErrorCode::DimensionMismatch, "feature rows differ in length");
    for (double v : r.values) put(std::bit_cast<std::uint32_t>(static_cast<float>(v)));
  }
  std::ofstream out(path, std::ios::binary);
  require(out.good(), ErrorCode::IoFailure, "cannot write " + path.string());
  out.write(buf.data(), static_cast<std::streamsize>(buf.size()));
  require(out.good(), ErrorCode::IoFailure, "write failed for " + path.string());
}

std::vector<std::vector<float>> read_feature_matrix(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  require(in.good(), ErrorCode::IoFailure, "cannot open " + path.string());
  const std::string data((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  require(data.size() >= 12 && data.compare(0, 4, "MSF1") == 0, ErrorCode::MalformedHeader,
          path.string() + ": not a feature matrix");
  auto get = [&data](std::size_t at) {
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) {
      v |= static_cast<std::uint32_t>(static_cast<unsigned char>(data[at + i])) << (8 * i);
    }
    return v;
  };
  const std::size_t rows = get(4), cols = get(8);
  require(data.size() == 12 + 4 * rows * cols, ErrorCode::MalformedHeader,
          path.string() + ": size does not match header");
  std::vector<std::vector<float>> m(rows, std::vector<float>(cols));
  for (std::size_t i = 0; i < rows; ++i) {
    for (std::size_t j = 0; j < cols; ++j) m[i][j] = std::bit_cast<float>(get(12 + 4 * (i * cols + j)));
  }
  return m;
}

}  // namespace modesift::features

#include "guirec/model_io.hpp"

#include <array>
#include <bit>
#include <cstring>
#include <fstream>
#include <string>

#include "guirec/errors.hpp"

namespace guirec {

namespace {

constexpr std::array<char, 8> kMagic = {'G', 'R', 'E', 'C', 'M', 'D', 'L', '\0'};

void put_u64(std::ostream& out, std::uint64_t v) {
  std::array<char, 8> bytes;
  for (std::size_t i = 0; i < 8; ++i) bytes[i] = static_cast<char>((v >> (8 * i)) & 0xFF);
  out.write(bytes.data(), bytes.size());
}

void put_u32(std::ostream& out, std::uint32_t v) {
  std::array<char, 4> bytes;
  for (std::size_t i = 0; i < 4; ++i) bytes[i] = static_cast<char>((v >> (8 * i)) & 0xFF);
  out.write(bytes.data(), bytes.size());
}

void put_f64(std::ostream& out, double v) { put_u64(out, std::bit_cast<std::uint64_t>(v)); }

std::uint64_t get_u64(std::istream& in) {
  std::array<unsigned char, 8> bytes;
  if (!in.read(reinterpret_cast<char*>(bytes.data()), bytes.size())) throw ParseError("truncated model file", 0);
  std::uint64_t v = 0;
  for (std::size_t i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(bytes[i]) << (8 * i);
  return v;
}

std::uint32_t get_u32(std::istream& in) {
  std::array<unsigned char, 4> bytes;
  if (!in.read(reinterpret_cast<char*>(bytes.data()), bytes.size())) throw ParseError("truncated model file", 0);
  std::uint32_t v = 0;
  for (std::size_t i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(bytes[i]) << (8 * i);
  return v;
}

double get_f64(std::istream& in) { return std::bit_cast<double>(get_u64(in)); }

void write_tensors(std::ostream& out, const Parameters& p) {
  auto write = [&](const auto& m) {
    put_u64(out, static_cast<std::uint64_t>(m.rows()));
    put_u64(out, static_cast<std::uint64_t>(m.cols()));
    for (Eigen::Index i = 0; i < m.size(); ++i) put_f64(out, m.data()[i]);
  };
  write(p.embedding);
  for (const auto& gate : p.gates) {
    write(gate.input);
    write(gate.recurrent);
    write(gate.bias);
  }
  write(p.output_weight);
  write(p.output_bias);
}

void read_tensors(std::istream& in, Parameters& p) {
  auto read = [&](auto& m) {
    const auto rows = get_u64(in);
    const auto cols = get_u64(in);
    if (rows != static_cast<std::uint64_t>(m.rows()) || cols != static_cast<std::uint64_t>(m.cols())) {
      throw IntegrityError("model tensor shape " + std::to_string(rows) + "x" + std::to_string(cols) +
                           " does not match its configuration");
    }
    for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = get_f64(in);
  };
  read(p.embedding);
  for (auto& gate : p.gates) {
    read(gate.input);
    read(gate.recurrent);
    read(gate.bias);
  }
  read(p.output_weight);
  read(p.output_bias);
}

std::uint32_t tensor_count(const Parameters& p) { return static_cast<std::uint32_t>(3 + 3 * p.gates.size()); }

}  // namespace

void save_model(std::ostream& out, const RecurrentModel& model) {
  const auto& c = model.config;
  out.write(kMagic.data(), kMagic.size());
  put_u32(out, kModelFormatVersion);
  put_u32(out, static_cast<std::uint32_t>(c.cell_kind));
  put_u32(out, static_cast<std::uint32_t>(c.loss_kind));
  put_u64(out, c.n_actions);
  put_u64(out, c.hidden_size);
  put_u64(out, c.batch_size);
  put_f64(out, c.learning_rate);
  put_f64(out, c.adagrad_epsilon);
  put_f64(out, c.init_scale);
  put_u64(out, c.epochs);
  put_u64(out, c.seed);
  put_u64(out, c.bptt_steps);
  put_f64(out, c.convergence_tolerance);
  out.put(c.stop_at_convergence ? 1 : 0);
  put_u32(out, 2 * tensor_count(model.params));
  write_tensors(out, model.params);
  write_tensors(out, model.adagrad_accumulator);
  if (!out) throw Error("failed writing model");
}

RecurrentModel load_model(std::istream& in) {
  std::array<char, 8> magic{};
  if (!in.read(magic.data(), magic.size()) || magic != kMagic) throw ParseError("not a guirec model file", 0);
  const auto version = get_u32(in);
  if (version != kModelFormatVersion) {
    throw ParseError("unsupported model format version " + std::to_string(version), 0);
  }
  NetworkConfig c;
  const auto cell = get_u32(in);
  const auto loss = get_u32(in);
  if (cell > 1 || loss > 2) throw ParseError("invalid cell or loss kind in model header", 0);
  c.cell_kind = static_cast<CellKind>(cell);
  c.loss_kind = static_cast<LossKind>(loss);
  c.n_actions = get_u64(in);
  c.hidden_size = get_u64(in);
  c.batch_size = get_u64(in);
  c.learning_rate = get_f64(in);
  c.adagrad_epsilon = get_f64(in);
  c.init_scale = get_f64(in);
  c.epochs = get_u64(in);
  c.seed = get_u64(in);
  c.bptt_steps = get_u64(in);
  c.convergence_tolerance = get_f64(in);
  const int stop = in.get();
  if (stop != 0 && stop != 1) throw ParseError("invalid model header", 0);
  c.stop_at_convergence = stop == 1;
  c.validate();

  RecurrentModel model{c, Parameters::zeros(c), Parameters::zeros(c)};
  if (get_u32(in) != 2 * tensor_count(model.params)) throw IntegrityError("model tensor count mismatch");
  read_tensors(in, model.params);
  read_tensors(in, model.adagrad_accumulator);
  return model;
}

void save_model(const std::filesystem::path& path, const RecurrentModel& model) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot open output file '" + path.string() + "'");
  save_model(out, model);
}

RecurrentModel load_model(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open input file '" + path.string() + "'");
  return load_model(in);
}

bool is_model_stream(std::istream& in) {
  const auto start = in.tellg();
  std::array<char, 8> magic{};
  in.read(magic.data(), magic.size());
  const bool match = in.gcount() == static_cast<std::streamsize>(magic.size()) && magic == kMagic;
  in.clear();
  in.seekg(start);
  return match;
}

}  // namespace guirec

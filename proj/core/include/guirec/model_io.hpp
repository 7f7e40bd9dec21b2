#pragma once

#include <filesystem>
#include <istream>
#include <ostream>

#include "guirec/network.hpp"

namespace guirec {

// Binary model file, all integers and IEEE-754 doubles little-endian:
//
//   magic    8 bytes  "GRECMDL\0"
//   version  u32      = 1
//   config   u32 cell_kind, u32 loss_kind, u64 n_actions, u64 hidden_size,
//            u64 batch_size, f64 learning_rate, f64 adagrad_epsilon,
//            f64 init_scale, u64 epochs, u64 seed, u64 bptt_steps,
//            f64 convergence_tolerance, u8 stop_at_convergence
//   tensors  u32 count, then per tensor: u64 rows, u64 cols, rows*cols f64
//            in column-major order. Parameters first (for_each_tensor
//            order), then the Adagrad accumulators in the same order.
inline constexpr std::uint32_t kModelFormatVersion = 1;

void save_model(std::ostream& out, const RecurrentModel& model);
RecurrentModel load_model(std::istream& in);

void save_model(const std::filesystem::path& path, const RecurrentModel& model);
RecurrentModel load_model(const std::filesystem::path& path);

// True when the stream starts with the model magic; the stream position is restored.
bool is_model_stream(std::istream& in);

}  // namespace guirec

#pragma once

#include <filesystem>
#include <vector>

#include "hsigan/gan/model.hpp"
#include "hsigan/gan/train.hpp"

namespace hsigan::gan {

/// GANC container: magic, u16 version, u32 config block (n_y, bands, w, k,
/// noise_dim, spectral layers, spatial layers), then every state buffer of the
/// discriminator and generator as little-endian f32 in layer order.
std::vector<std::uint8_t> encode_checkpoint(GanModel<float>& model);
GanModel<float> decode_checkpoint(std::span<const std::uint8_t> bytes);
void save_checkpoint(const std::filesystem::path& path, GanModel<float>& model);
GanModel<float> load_checkpoint(const std::filesystem::path& path);

/// Columns step,l_sup,l_d1,l_d2,l_semi,l_g; values printed round-trip exact.
void write_loss_csv(const std::filesystem::path& path, const std::vector<LossRecord>& history);
std::vector<LossRecord> read_loss_csv(const std::filesystem::path& path);

}  // namespace hsigan::gan

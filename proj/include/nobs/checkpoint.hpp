#pragma once

#include <map>
#include <string>

#include "nobs/fno.hpp"

namespace nobs {

// NOBSCK01 container: 8-byte magic, u32 little-endian header length, UTF-8
// JSON header (model kind, config, dimensions, normalization, parameter
// table with shapes and payload offsets, metadata), then all parameter
// tensors as f64 little-endian in registration order. Round-trips bit-exact.
struct Checkpoint {
  FnoModel model;
  std::map<std::string, double> meta;
};

void write_checkpoint(const std::string& path, const Checkpoint& ck);
Checkpoint read_checkpoint(const std::string& path);  // MissingCheckpoint, BadMagic, HeaderMismatch, TruncatedPayload

}  // namespace nobs

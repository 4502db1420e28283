#pragma once

#include <cstdint>
#include <string>

#include "astgcn/augment.hpp"
#include "astgcn/dataset.hpp"
#include "astgcn/model.hpp"

namespace astgcn {

/// Self-describing model container: dims, augmentation spec, attribute
/// encodings (with vocabulary order), normalization constant, and all
/// parameter matrices. The version field is mandatory; loading rejects
/// unknown versions. Serialized as JSON with shortest round-trip number
/// formatting, so save -> load -> save is byte-stable.
struct Checkpoint {
  int version = 1;
  ModelParameters params;
  AugmentSpec spec;
  CategoricalEncoding static_encoding;
  CategoricalEncoding dynamic_encoding;
  double max_speed = 0.0;
  int interval_minutes = 15;
  Index seq_len = 4;
  std::uint64_t seed = 0;
};

void save_checkpoint(const std::string& path, const Checkpoint& checkpoint);

/// Errors: io_error, checkpoint_error (bad JSON, missing fields, wrong
/// version, inconsistent matrix shapes).
Checkpoint load_checkpoint(const std::string& path);

}  // namespace astgcn

#pragma once

#include <string>

#include "swloc/sim.hpp"

namespace swloc::io {

// .lwr labeled waveform recording: one JSON header line (fs, channels, sample
// count, label table, generating config, seed) followed by raw little-endian
// IEEE-754 float32 samples, channel-interleaved.
void write_lwr(const sim::LabeledRecording& rec, const std::string& path);
sim::LabeledRecording read_lwr(const std::string& path);

}  // namespace swloc::io

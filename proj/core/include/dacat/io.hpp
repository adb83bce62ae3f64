#pragma once

#include <string>
#include <vector>

#include "dacat/types.hpp"

namespace dacat::data {

// Embedding file, little-endian: magic "DCAT", u32 version (1), u32 d,
// u64 n_frames, then n_frames*d float32 values row-major. Doubles are
// narrowed on write and widened on read.
void write_embeddings(const std::string& path,
                      const std::vector<std::vector<double>>& frames);
std::vector<std::vector<double>> load_embeddings(const std::string& path);

// Annotation file: UTF-8 CSV lines "frame_index,phase_id", no header,
// frame indices contiguous from 0.
void write_annotations(const std::string& path, const PhaseTimeline& timeline);
PhaseTimeline load_annotations(const std::string& path, int num_phases);

}  // namespace dacat::data

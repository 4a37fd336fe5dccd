#pragma once

#include <string>

#include "mecsim/episode.hpp"

namespace mecsim {

// Serializes a trace as JSON lines, one step object per line, fields in a
// fixed documented order. Deterministic: equal traces produce equal bytes.
std::string trace_to_jsonl(const EpisodeTrace& trace);

// Appends the trace's step lines to the file at path.
void append_trace_jsonl(const EpisodeTrace& trace, const std::string& path);

}  // namespace mecsim

#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "sptc/sequence.hpp"

namespace sptc {

/// Dataset file format: JSON-lines, one object per line with fields
/// `task`, `index`, `input`, `target`. UTF-8, LF line endings, fixed key
/// order so regeneration under the same seed is byte-identical.
void write_jsonl_line(std::ostream& os, const Example& ex);
void write_jsonl(const std::string& path, const std::vector<Example>& examples);

Example parse_jsonl_line(const std::string& line);
std::vector<Example> read_jsonl(const std::string& path);

}  // namespace sptc

#pragma once

#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace symdiff::pipeline {

/// Whitespace-delimited tokens times 1.3, rounded up.
std::size_t estimate_tokens(std::string_view text);

class ChunkError : public std::runtime_error {
 public:
  ChunkError(const std::string& msg, int line) : std::runtime_error(msg), line(line) {}
  int line;
};

struct Chunk {
  std::string text;
  int first_line = 1;
};

/// Contiguous pieces of a C function definition: the header through the
/// opening brace, each top-level statement (with the whitespace and comments
/// before it), and the closing brace. Concatenation gives back `fn`.
std::vector<std::string> split_statements(std::string_view fn);

/// Splits `fn` so that context_tokens + estimate(chunk) <= budget for every
/// chunk. Throws ChunkError when one statement cannot fit.
std::vector<Chunk> chunk_function(std::string_view fn, std::size_t budget, std::size_t context_tokens = 0);

std::string reassemble(const std::vector<std::string>& pieces);

}  // namespace symdiff::pipeline

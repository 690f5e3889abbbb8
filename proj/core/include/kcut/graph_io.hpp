#pragma once

#include <iosfwd>
#include <stdexcept>
#include <string>

#include "kcut/graph.hpp"

namespace kcut {

/// Parse failure with the 1-based line number where it occurred.
class ParseError : public std::runtime_error {
public:
  ParseError(int line, const std::string& what)
      : std::runtime_error("line " + std::to_string(line) + ": " + what),
        line_(line) {}
  int line() const { return line_; }

private:
  int line_ = 0;
};

/// GSet format: an ASCII header line "n m", then exactly m lines "i j w"
/// with 1-based endpoints and mandatory weight. Fields are separated by
/// spaces or tabs, CRLF is accepted, trailing blank lines are ignored.
/// Violations (malformed header, bad field count, endpoint out of range,
/// self-loop, duplicate edge, missing or extra records) throw ParseError.
WeightedGraph parse_gset(std::istream& in);
WeightedGraph parse_gset(const std::string& text);
WeightedGraph parse_gset_file(const std::string& path);

/// Edge-list variant of the same layout: the weight may be omitted
/// (defaults to 1), and a leading "# zero-indexed" comment switches the
/// endpoints to 0-based.
WeightedGraph parse_edge_list(std::istream& in);
WeightedGraph parse_edge_list(const std::string& text);
WeightedGraph parse_edge_list_file(const std::string& path);

/// Writes in GSet format (1-based, weight column always present).
void write_gset(std::ostream& out, const WeightedGraph& g);

} // namespace kcut

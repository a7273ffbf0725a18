#pragma once

#include <iosfwd>
#include <span>
#include <string>

#include "racewitness/trace.hpp"

namespace rw {

enum class TraceFormat { Simple, Std };

class ParseError : public std::runtime_error {
 public:
  ParseError(int line, const std::string& reason)
      : std::runtime_error(line > 0 ? "line " + std::to_string(line) + ": " + reason : reason), line_(line) {}
  int line() const { return line_; }

 private:
  int line_;
};

std::vector<RawEvent> parse_events(std::istream& in, TraceFormat format);
Trace parse(std::istream& in, TraceFormat format, const BuildOptions& opt = {});
Trace parse_string(const std::string& text, TraceFormat format = TraceFormat::Simple,
                   const BuildOptions& opt = {});
Trace parse_file(const std::string& path, TraceFormat format, const BuildOptions& opt = {});

// Simple-format line for one event, without the trailing annotation.
std::string format_event(const Trace& t, EventId e);
// One line per event in order, annotated with the input ordinal; synthesized
// initial writes are skipped.
void emit_witness(const Trace& t, std::span<const EventId> seq, std::ostream& out);
// Input events in trace order, in simple format.
void emit_trace(const Trace& t, std::ostream& out);

}  // namespace rw

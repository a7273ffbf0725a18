#include "racewitness/trace_io.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

namespace rw {

namespace {

std::string trim(std::string s) {
  auto ws = [](unsigned char c) { return std::isspace(c) != 0; };
  while (!s.empty() && ws(s.back())) s.pop_back();
  std::size_t i = 0;
  while (i < s.size() && ws(s[i])) ++i;
  return s.substr(i);
}

std::string lower(std::string s) {
  for (char& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return s;
}

bool op_from(const std::string& word, Op& op) {
  std::string w = lower(word);
  if (w == "r" || w == "read") op = Op::Read;
  else if (w == "w" || w == "write") op = Op::Write;
  else if (w == "acq" || w == "acquire") op = Op::Acquire;
  else if (w == "rel" || w == "release") op = Op::Release;
  else if (w == "fork") op = Op::Fork;
  else if (w == "join") op = Op::Join;
  else return false;
  return true;
}

bool thread_ok(const std::string& s) {
  if (s.size() < 2 || s[0] != 'T') return false;
  return std::all_of(s.begin() + 1, s.end(), [](unsigned char c) { return std::isdigit(c); });
}

bool name_ok(const std::string& s) {
  return !s.empty() && std::none_of(s.begin(), s.end(), [](unsigned char c) {
    return std::isspace(c) || c == '#' || c == '|' || c == '(' || c == ')';
  });
}

RawEvent parse_simple(const std::string& line, int no) {
  std::istringstream ss(line);
  std::vector<std::string> words;
  for (std::string w; ss >> w;) words.push_back(w);
  if (words.size() < 3 || words.size() > 4) throw ParseError(no, "expected '<thread> <op> <target> [@<location>]'");
  RawEvent ev;
  ev.line = no;
  ev.thread = words[0];
  if (!thread_ok(ev.thread)) throw ParseError(no, "bad thread '" + ev.thread + "'");
  if (!op_from(words[1], ev.op)) throw ParseError(no, "unknown operation '" + words[1] + "'");
  ev.target = words[2];
  if (!name_ok(ev.target)) throw ParseError(no, "bad target '" + ev.target + "'");
  if (words.size() == 4) {
    if (words[3].size() < 2 || words[3][0] != '@') throw ParseError(no, "location must look like '@label'");
    ev.location = words[3].substr(1);
  }
  return ev;
}

RawEvent parse_std(const std::string& line, int no) {
  auto bar1 = line.find('|');
  if (bar1 == std::string::npos) throw ParseError(no, "expected '<thread>|<op>(<target>)|<location>'");
  auto bar2 = line.find('|', bar1 + 1);
  RawEvent ev;
  ev.line = no;
  ev.thread = trim(line.substr(0, bar1));
  std::string action = trim(line.substr(bar1 + 1, bar2 == std::string::npos ? std::string::npos : bar2 - bar1 - 1));
  if (bar2 != std::string::npos) ev.location = trim(line.substr(bar2 + 1));
  if (ev.thread.empty() || !name_ok(ev.thread)) throw ParseError(no, "bad thread '" + ev.thread + "'");
  auto open = action.find('(');
  if (open == std::string::npos || action.back() != ')') throw ParseError(no, "bad action '" + action + "'");
  if (!op_from(trim(action.substr(0, open)), ev.op)) throw ParseError(no, "unknown operation in '" + action + "'");
  ev.target = trim(action.substr(open + 1, action.size() - open - 2));
  if (!name_ok(ev.target)) throw ParseError(no, "bad target in '" + action + "'");
  if (ev.location.find('|') != std::string::npos) throw ParseError(no, "too many fields");
  return ev;
}

}  // namespace

std::vector<RawEvent> parse_events(std::istream& in, TraceFormat format) {
  std::vector<RawEvent> out;
  std::string line;
  int no = 0;
  while (std::getline(in, line)) {
    ++no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    auto hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    line = trim(line);
    if (line.empty()) continue;
    out.push_back(format == TraceFormat::Simple ? parse_simple(line, no) : parse_std(line, no));
  }
  if (out.empty()) throw ParseError(0, "empty trace");
  return out;
}

Trace parse(std::istream& in, TraceFormat format, const BuildOptions& opt) {
  return build_trace(parse_events(in, format), opt);
}

Trace parse_string(const std::string& text, TraceFormat format, const BuildOptions& opt) {
  std::istringstream in(text);
  return parse(in, format, opt);
}

Trace parse_file(const std::string& path, TraceFormat format, const BuildOptions& opt) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError(0, "cannot open " + path);
  return parse(in, format, opt);
}

std::string format_event(const Trace& t, EventId e) {
  const Event& ev = t[e];
  std::string s = t.thread_name(ev.tid) + " " + op_name(ev.op) + " " + t.target_name(e);
  if (ev.loc >= 0) s += " @" + t.location(ev.loc);
  return s;
}

void emit_witness(const Trace& t, std::span<const EventId> seq, std::ostream& out) {
  for (EventId e : seq) {
    if (t.is_init(e)) continue;
    out << format_event(t, e) << " # e" << t[e].input << '\n';
  }
}

void emit_trace(const Trace& t, std::ostream& out) {
  for (const Event& ev : t.events())
    if (!t.is_init(ev.id)) out << format_event(t, ev.id) << '\n';
}

}  // namespace rw

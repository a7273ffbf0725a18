#pragma once

#include <string>
#include <vector>

#include "racewitness/closure.hpp"

namespace rw {

enum class Method { HB, SHB, WCP, DC };

const char* method_name(Method m);
bool method_from(const std::string& s, Method& m);

// Conflicting access pairs (a <_t b) left unordered by the method's relation.
std::vector<Edge> hb_races(const Trace& t);
std::vector<Edge> shb_races(const Trace& t);
std::vector<Edge> wcp_races(const Trace& t);
std::vector<Edge> dc_races(const Trace& t);
std::vector<Edge> baseline_races(const Trace& t, Method m);

}  // namespace rw

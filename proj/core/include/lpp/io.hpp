#pragma once

#include <string>

#include "lpp/grid.hpp"

namespace lpp {

// Per-game value vocabulary, defined by the environment registry.
const Vocabulary& vocabulary_for(Game g);

struct JsonParseError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// JSON forms:
//   GridState     {"height":H,"width":W,"cells":[[tag,...],...]}
//   Trajectory    {"game":g,"steps":[{"state":...,"action":[r,c]},...],"final_state":...}
//   TaskInstance  {"game":g,"initial_state":...,"split":"train"|"test","id":...}
// One object per file, UTF-8. Deserializers validate every data model
// invariant and report the offending field on failure.

std::string serialize(const GridState& s, const Vocabulary& vocab);
std::string serialize(const Trajectory& t);
std::string serialize(const TaskInstance& inst);

GridState deserialize_grid(const std::string& json_text, const Vocabulary& vocab);
Trajectory deserialize_trajectory(const std::string& json_text);
TaskInstance deserialize_instance(const std::string& json_text);

std::string read_file(const std::string& path);
void write_file(const std::string& path, const std::string& contents);

}  // namespace lpp

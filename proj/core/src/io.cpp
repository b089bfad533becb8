#include "lpp/io.hpp"

#include <fstream>
#include <sstream>

#include "json.hpp"

namespace lpp {

using nlohmann::json;

namespace {

json grid_to_json(const GridState& s, const Vocabulary& vocab) {
  json rows = json::array();
  for (int r = 0; r < s.height(); ++r) {
    json row = json::array();
    for (int c = 0; c < s.width(); ++c) {
      row.push_back(vocab.tag_of(s.at(r, c)));
    }
    rows.push_back(std::move(row));
  }
  return json{{"height", s.height()}, {"width", s.width()}, {"cells", std::move(rows)}};
}

GridState grid_from_json(const json& j, const Vocabulary& vocab) {
  if (!j.is_object()) throw JsonParseError("grid: expected an object");
  if (!j.contains("height") || !j["height"].is_number_integer()) {
    throw JsonParseError("grid: missing or non-integer field 'height'");
  }
  if (!j.contains("width") || !j["width"].is_number_integer()) {
    throw JsonParseError("grid: missing or non-integer field 'width'");
  }
  if (!j.contains("cells") || !j["cells"].is_array()) {
    throw JsonParseError("grid: missing or non-array field 'cells'");
  }
  const int h = j["height"].get<int>();
  const int w = j["width"].get<int>();
  if (h < kMinGridDim || h > kMaxGridDim) throw JsonParseError("grid: 'height' out of range [2,30]");
  if (w < kMinGridDim || w > kMaxGridDim) throw JsonParseError("grid: 'width' out of range [2,30]");
  const json& cells = j["cells"];
  if (static_cast<int>(cells.size()) != h) {
    throw JsonParseError("grid: 'cells' row count does not match 'height'");
  }
  GridState s(h, w, CellValue{1});
  for (int r = 0; r < h; ++r) {
    const json& row = cells[r];
    if (!row.is_array() || static_cast<int>(row.size()) != w) {
      throw JsonParseError("grid: 'cells' row " + std::to_string(r) + " does not match 'width'");
    }
    for (int c = 0; c < w; ++c) {
      if (!row[c].is_string()) {
        throw JsonParseError("grid: non-string cell tag at row " + std::to_string(r));
      }
      const std::string tag = row[c].get<std::string>();
      if (tag == kOffscreenTag) {
        throw JsonParseError("grid: 'offscreen' may not appear in 'cells'");
      }
      if (!vocab.contains(tag)) {
        throw JsonParseError("grid: unknown cell value tag '" + tag + "'");
      }
      s.set(r, c, vocab.id_of(tag));
    }
  }
  return s;
}

json action_to_json(Action a) { return json::array({a.row, a.col}); }

Action action_from_json(const json& j, const GridState& paired_state) {
  if (!j.is_array() || j.size() != 2 || !j[0].is_number_integer() || !j[1].is_number_integer()) {
    throw JsonParseError("action: expected [row, col] integers");
  }
  Action a{j[0].get<int>(), j[1].get<int>()};
  if (!paired_state.in_bounds(a)) {
    throw JsonParseError("action: [" + std::to_string(a.row) + "," + std::to_string(a.col) +
                         "] outside its state's bounds");
  }
  return a;
}

json parse_text(const std::string& text) {
  json j = json::parse(text, nullptr, false);
  if (j.is_discarded()) throw JsonParseError("malformed JSON document");
  return j;
}

Game game_field(const json& j) {
  if (!j.contains("game") || !j["game"].is_string()) {
    throw JsonParseError("missing or non-string field 'game'");
  }
  try {
    return game_from_name(j["game"].get<std::string>());
  } catch (const ValidationError& e) {
    throw JsonParseError(std::string("field 'game': ") + e.what());
  }
}

}  // namespace

std::string serialize(const GridState& s, const Vocabulary& vocab) {
  return grid_to_json(s, vocab).dump();
}

std::string serialize(const Trajectory& t) {
  const Vocabulary& vocab = vocabulary_for(t.game);
  json steps = json::array();
  for (const auto& step : t.steps) {
    steps.push_back(json{{"state", grid_to_json(step.state, vocab)},
                         {"action", action_to_json(step.action)}});
  }
  return json{{"game", game_name(t.game)},
              {"steps", std::move(steps)},
              {"final_state", grid_to_json(t.final_state, vocab)}}
      .dump();
}

std::string serialize(const TaskInstance& inst) {
  const Vocabulary& vocab = vocabulary_for(inst.game);
  return json{{"game", game_name(inst.game)},
              {"initial_state", grid_to_json(inst.initial_state, vocab)},
              {"split", inst.split == Split::kTrain ? "train" : "test"},
              {"id", inst.id}}
      .dump();
}

GridState deserialize_grid(const std::string& text, const Vocabulary& vocab) {
  return grid_from_json(parse_text(text), vocab);
}

Trajectory deserialize_trajectory(const std::string& text) {
  json j = parse_text(text);
  Trajectory t;
  t.game = game_field(j);
  const Vocabulary& vocab = vocabulary_for(t.game);
  if (!j.contains("steps") || !j["steps"].is_array()) {
    throw JsonParseError("trajectory: missing or non-array field 'steps'");
  }
  if (j["steps"].size() > kHorizon) {
    throw JsonParseError("trajectory: 'steps' exceeds the horizon of 60");
  }
  for (const json& js : j["steps"]) {
    if (!js.is_object() || !js.contains("state") || !js.contains("action")) {
      throw JsonParseError("trajectory: each step needs 'state' and 'action'");
    }
    GridState s = grid_from_json(js["state"], vocab);
    Action a = action_from_json(js["action"], s);
    t.steps.push_back(TrajectoryStep{std::move(s), a});
  }
  if (!j.contains("final_state")) throw JsonParseError("trajectory: missing field 'final_state'");
  t.final_state = grid_from_json(j["final_state"], vocab);
  return t;
}

TaskInstance deserialize_instance(const std::string& text) {
  json j = parse_text(text);
  TaskInstance inst;
  inst.game = game_field(j);
  if (!j.contains("initial_state")) throw JsonParseError("instance: missing field 'initial_state'");
  inst.initial_state = grid_from_json(j["initial_state"], vocabulary_for(inst.game));
  if (!j.contains("split") || !j["split"].is_string()) {
    throw JsonParseError("instance: missing or non-string field 'split'");
  }
  const std::string split = j["split"].get<std::string>();
  if (split == "train") {
    inst.split = Split::kTrain;
  } else if (split == "test") {
    inst.split = Split::kTest;
  } else {
    throw JsonParseError("instance: field 'split' must be 'train' or 'test'");
  }
  if (!j.contains("id") || !j["id"].is_string()) {
    throw JsonParseError("instance: missing or non-string field 'id'");
  }
  inst.id = j["id"].get<std::string>();
  return inst;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, const std::string& contents) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write file: " + path);
  out << contents;
}

}  // namespace lpp

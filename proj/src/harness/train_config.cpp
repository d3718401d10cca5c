// Copyright 2026 The Linkgate Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "linkgate/harness/train_config.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include "linkgate/error.hpp"

namespace linkgate::harness {
namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

std::uint64_t parse_uint(const std::string& v, const std::string& where) {
  std::uint64_t out = 0;
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || ptr != v.data() + v.size()) throw ConfigError(where + ": expected a non-negative integer");
  return out;
}

double parse_double(const std::string& v, const std::string& where) {
  std::istringstream in(v);
  in.imbue(std::locale::classic());
  double out = 0;
  if (!(in >> out) || !in.eof()) throw ConfigError(where + ": expected a number");
  return out;
}

bool parse_bool(const std::string& v, const std::string& where) {
  if (v == "true" || v == "1") return true;
  if (v == "false" || v == "0") return false;
  throw ConfigError(where + ": expected true or false");
}

std::string format_double(double v) {
  std::ostringstream out;
  out.imbue(std::locale::classic());
  out.precision(17);
  out << v;
  return out.str();
}

}  // namespace

TrainConfig parse_train_config(std::string_view text) {
  TrainConfig c;
  std::istringstream in{std::string(text)};
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    const std::string body = trim(line);
    if (body.empty()) continue;
    const auto eq = body.find('=');
    const std::string where = "config line " + std::to_string(line_no);
    if (eq == std::string::npos) throw ConfigError(where + ": expected key = value");
    const std::string key = trim(std::string_view(body).substr(0, eq));
    const std::string value = trim(std::string_view(body).substr(eq + 1));
    const std::string at = where + " (" + key + ")";
    if (key == "seed") {
      c.seed = parse_uint(value, at);
    } else if (key == "d") {
      c.model.d = parse_uint(value, at);
    } else if (key == "L") {
      c.model.gnn_steps = parse_uint(value, at);
    } else if (key == "lr") {
      c.lr = parse_double(value, at);
    } else if (key == "batch_size") {
      c.batch_size = parse_uint(value, at);
    } else if (key == "epochs") {
      c.epochs = parse_uint(value, at);
    } else if (key == "patience") {
      c.patience = parse_uint(value, at);
    } else if (key == "eval_every") {
      c.eval_every = parse_uint(value, at);
    } else if (key == "target_accuracy") {
      c.target_accuracy = parse_double(value, at);
    } else if (key == "clip_norm") {
      c.clip_norm = parse_double(value, at);
    } else if (key == "monitor") {
      if (value == "dev") {
        c.monitor = Monitor::Dev;
      } else if (value == "train") {
        c.monitor = Monitor::Train;
      } else {
        throw ConfigError(at + ": expected dev or train");
      }
    } else if (key == "gate_mode") {
      c.model.gate_mode = parse_gate_mode(value);
    } else if (key == "remove_generated") {
      c.model.remove_generated = parse_bool(value, at);
    } else if (key == "max_steps") {
      c.model.max_steps = parse_uint(value, at);
    } else if (key == "w_exact") {
      c.model.linking.exact = parse_double(value, at);
    } else if (key == "w_partial") {
      c.model.linking.partial = parse_double(value, at);
    } else if (key == "w_lemma") {
      c.model.linking.lemma = parse_double(value, at);
    } else if (key == "w_edit") {
      c.model.linking.edit = parse_double(value, at);
    } else if (key == "temperature") {
      c.model.linking.temperature = parse_double(value, at);
    } else {
      throw ConfigError(where + ": unknown key '" + key + "'");
    }
  }
  validate(c);
  return c;
}

TrainConfig load_train_config(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw LoadError("cannot read config " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_train_config(buf.str());
}

std::string format_train_config(const TrainConfig& c) {
  std::ostringstream out;
  out << "seed = " << c.seed << '\n'
      << "d = " << c.model.d << '\n'
      << "L = " << c.model.gnn_steps << '\n'
      << "lr = " << format_double(c.lr) << '\n'
      << "batch_size = " << c.batch_size << '\n'
      << "epochs = " << c.epochs << '\n'
      << "patience = " << c.patience << '\n'
      << "eval_every = " << c.eval_every << '\n'
      << "target_accuracy = " << format_double(c.target_accuracy) << '\n'
      << "clip_norm = " << format_double(c.clip_norm) << '\n'
      << "monitor = " << (c.monitor == Monitor::Dev ? "dev" : "train") << '\n'
      << "gate_mode = " << gate_mode_name(c.model.gate_mode) << '\n'
      << "remove_generated = " << (c.model.remove_generated ? "true" : "false") << '\n'
      << "max_steps = " << c.model.max_steps << '\n'
      << "w_exact = " << format_double(c.model.linking.exact) << '\n'
      << "w_partial = " << format_double(c.model.linking.partial) << '\n'
      << "w_lemma = " << format_double(c.model.linking.lemma) << '\n'
      << "w_edit = " << format_double(c.model.linking.edit) << '\n'
      << "temperature = " << format_double(c.model.linking.temperature) << '\n';
  return out.str();
}

void validate(const TrainConfig& c) {
  if (c.model.d < 2 || c.model.d % 2 != 0) throw ConfigError("d must be an even number >= 2");
  if (!(c.lr > 0)) throw ConfigError("lr must be positive");
  if (c.batch_size == 0) throw ConfigError("batch_size must be positive");
  if (c.eval_every == 0) throw ConfigError("eval_every must be positive");
  if (c.clip_norm < 0) throw ConfigError("clip_norm must be non-negative");
  if (!(c.model.linking.temperature > 0)) throw ConfigError("temperature must be positive");
  if (c.model.max_steps == 0) throw ConfigError("max_steps must be positive");
}

nlohmann::json to_json(const TrainConfig& c) {
  return {{"seed", c.seed},
          {"d", c.model.d},
          {"L", c.model.gnn_steps},
          {"lr", c.lr},
          {"batch_size", c.batch_size},
          {"epochs", c.epochs},
          {"patience", c.patience},
          {"eval_every", c.eval_every},
          {"target_accuracy", c.target_accuracy},
          {"clip_norm", c.clip_norm},
          {"monitor", c.monitor == Monitor::Dev ? "dev" : "train"},
          {"gate_mode", std::string(gate_mode_name(c.model.gate_mode))},
          {"remove_generated", c.model.remove_generated},
          {"max_steps", c.model.max_steps},
          {"w_exact", c.model.linking.exact},
          {"w_partial", c.model.linking.partial},
          {"w_lemma", c.model.linking.lemma},
          {"w_edit", c.model.linking.edit},
          {"temperature", c.model.linking.temperature}};
}

TrainConfig train_config_from_json(const nlohmann::json& j) {
  try {
    TrainConfig c;
    c.seed = j.at("seed").get<std::uint64_t>();
    c.model.d = j.at("d").get<std::size_t>();
    c.model.gnn_steps = j.at("L").get<std::size_t>();
    c.lr = j.at("lr").get<double>();
    c.batch_size = j.at("batch_size").get<std::size_t>();
    c.epochs = j.at("epochs").get<std::size_t>();
    c.patience = j.at("patience").get<std::size_t>();
    c.eval_every = j.at("eval_every").get<std::size_t>();
    c.target_accuracy = j.at("target_accuracy").get<double>();
    c.clip_norm = j.at("clip_norm").get<double>();
    c.monitor = j.at("monitor").get<std::string>() == "train" ? Monitor::Train : Monitor::Dev;
    c.model.gate_mode = parse_gate_mode(j.at("gate_mode").get<std::string>());
    c.model.remove_generated = j.at("remove_generated").get<bool>();
    c.model.max_steps = j.at("max_steps").get<std::size_t>();
    c.model.linking.exact = j.at("w_exact").get<double>();
    c.model.linking.partial = j.at("w_partial").get<double>();
    c.model.linking.lemma = j.at("w_lemma").get<double>();
    c.model.linking.edit = j.at("w_edit").get<double>();
    c.model.linking.temperature = j.at("temperature").get<double>();
    validate(c);
    return c;
  } catch (const nlohmann::json::exception& e) {
    throw LoadError(std::string("bad training config in checkpoint: ") + e.what());
  }
}

}  // namespace linkgate::harness

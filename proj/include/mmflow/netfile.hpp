#pragma once

// JSON network/session files:
//   nodes:      [string]
//   links:      [{id, tail, head}]
//   collisions: {link-id: [link-id]}
//   delays:     [{from, to, d}]           (integer d)
//   sessions:   [{source, sinks: [...], gamma}]  (number or "0.5" / "1/2")

#include <algorithm>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>

#include "json.hpp"
#include "mmflow/generators.hpp"
#include "mmflow/network.hpp"

namespace mmflow {

/// Parse or schema failure. `line` is 1-based when known, else 0.
class NetfileError : public std::runtime_error {
 public:
  NetfileError(const std::string& message, std::size_t line = 0)
      : std::runtime_error(line ? "line " + std::to_string(line) + ": " + message : message),
        message_(message),
        line_(line) {}
  std::size_t line() const { return line_; }
  /// The message without the line prefix.
  const std::string& message() const { return message_; }

 private:
  std::string message_;
  std::size_t line_;
};

namespace detail {

inline std::size_t line_of_offset(const std::string& text, std::size_t offset) {
  offset = std::min(offset, text.size());
  return 1 + static_cast<std::size_t>(std::count(text.begin(), text.begin() + offset, '\n'));
}

inline Rational json_rational(const nlohmann::json& value, const std::string& where) {
  try {
    if (value.is_string()) return parse_rational(value.get<std::string>());
    if (value.is_number_integer()) return Rational(value.get<long>());
    if (value.is_number()) return parse_rational(value.dump());
  } catch (const std::invalid_argument& e) {
    throw NetfileError(where + ": " + e.what());
  }
  throw NetfileError(where + ": expected a number or numeric string");
}

// Best-effort line anchor for a semantic error: the first line mentioning
// the offending token.
inline std::size_t line_of_token(const std::string& text, const std::string& token) {
  auto pos = text.find("\"" + token + "\"");
  return pos == std::string::npos ? 0 : line_of_offset(text, pos);
}

}  // namespace detail

inline Instance parse_netfile(const std::string& text) {
  using nlohmann::json;
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw NetfileError(e.what(), detail::line_of_offset(text, e.byte == 0 ? 0 : e.byte - 1));
  }
  if (!doc.is_object()) throw NetfileError("top level must be an object", 1);

  auto require = [&](const char* key, bool array) -> const json& {
    if (!doc.contains(key)) throw NetfileError(std::string("missing field '") + key + "'");
    const json& value = doc.at(key);
    if (array ? !value.is_array() : !value.is_object())
      throw NetfileError(std::string("field '") + key + "' has the wrong type",
                         detail::line_of_token(text, key));
    return value;
  };

  Instance inst;
  Network& net = inst.network;
  try {
    for (const auto& name : require("nodes", true)) net.nodes.push_back(name.get<std::string>());

    auto node_index = [&](const std::string& name, const std::string& where) {
      auto v = net.find_node(name);
      if (!v) throw NetfileError(where + ": unknown node '" + name + "'", detail::line_of_token(text, name));
      return *v;
    };

    const json& links = require("links", true);
    for (std::size_t k = 0; k < links.size(); ++k) {
      const auto& entry = links[k];
      const std::string where = "links[" + std::to_string(k) + "]";
      const auto id = entry.at("id").get<std::string>();
      net.links.push_back(
          {id, node_index(entry.at("tail").get<std::string>(), where + ".tail"),
           node_index(entry.at("head").get<std::string>(), where + ".head")});
    }

    auto link_index = [&](const std::string& id, const std::string& where) {
      auto l = net.find_link(id);
      if (!l) throw NetfileError(where + ": unknown link '" + id + "'", detail::line_of_token(text, id));
      return *l;
    };

    net.collisions.assign(net.links.size(), {});
    if (doc.contains("collisions")) {
      for (const auto& [id, targets] : require("collisions", false).items()) {
        const LinkIndex l = link_index(id, "collisions");
        for (const auto& target : targets)
          net.collisions[l].push_back(link_index(target.get<std::string>(), "collisions." + id));
        std::sort(net.collisions[l].begin(), net.collisions[l].end());
      }
    }

    if (doc.contains("delays")) {
      const json& delays = require("delays", true);
      for (std::size_t k = 0; k < delays.size(); ++k) {
        const auto& entry = delays[k];
        const std::string where = "delays[" + std::to_string(k) + "]";
        const LinkIndex from = link_index(entry.at("from").get<std::string>(), where + ".from");
        const LinkIndex to = link_index(entry.at("to").get<std::string>(), where + ".to");
        if (!entry.at("d").is_number_integer())
          throw NetfileError(where + ".d: delay must be an integer");
        if (!net.delays.emplace(std::pair{from, to}, entry.at("d").get<std::int64_t>()).second)
          throw NetfileError(where + ": duplicate delay entry");
      }
    }

    if (doc.contains("sessions")) {
      const json& sessions = require("sessions", true);
      for (std::size_t k = 0; k < sessions.size(); ++k) {
        const auto& entry = sessions[k];
        const std::string where = "sessions[" + std::to_string(k) + "]";
        Session s;
        s.source = node_index(entry.at("source").get<std::string>(), where + ".source");
        for (const auto& sink : entry.at("sinks"))
          s.sinks.push_back(node_index(sink.get<std::string>(), where + ".sinks"));
        s.gamma = entry.contains("gamma") ? detail::json_rational(entry.at("gamma"), where + ".gamma")
                                          : Rational(1);
        inst.sessions.sessions.push_back(std::move(s));
      }
    }
  } catch (const json::exception& e) {
    throw NetfileError(std::string("schema error: ") + e.what());
  }
  return inst;
}

inline Instance read_netfile(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw NetfileError("cannot open '" + path + "'");
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_netfile(buffer.str());
}

inline std::string write_netfile(const Instance& inst) {
  using nlohmann::ordered_json;
  const Network& net = inst.network;
  ordered_json doc;
  doc["nodes"] = net.nodes;
  doc["links"] = ordered_json::array();
  for (const auto& link : net.links)
    doc["links"].push_back({{"id", link.id}, {"tail", net.nodes[link.tail]}, {"head", net.nodes[link.head]}});
  doc["collisions"] = ordered_json::object();
  for (LinkIndex l = 0; l < net.num_links(); ++l) {
    auto& targets = doc["collisions"][net.links[l].id] = ordered_json::array();
    for (LinkIndex other : net.collisions[l]) targets.push_back(net.links[other].id);
  }
  doc["delays"] = ordered_json::array();
  for (const auto& [pair, d] : net.delays)
    doc["delays"].push_back({{"from", net.links[pair.first].id}, {"to", net.links[pair.second].id}, {"d", d}});
  doc["sessions"] = ordered_json::array();
  for (const auto& s : inst.sessions.sessions) {
    ordered_json sinks = ordered_json::array();
    for (NodeIndex t : s.sinks) sinks.push_back(net.nodes[t]);
    doc["sessions"].push_back({{"source", net.nodes[s.source]}, {"sinks", sinks}, {"gamma", to_string(s.gamma)}});
  }
  return doc.dump(2) + "\n";
}

}  // namespace mmflow

#include "mpj/instance_io.hpp"

#include <fstream>

namespace mpj {

using nlohmann::json;

namespace {

std::size_t to_zero_based(std::size_t v, std::size_t n, const char* what) {
  if (v < 1 || v > n) {
    throw ValidationError(std::string(what) + " = " + std::to_string(v) + " outside [1, " +
                          std::to_string(n) + "]");
  }
  return v - 1;
}

LayerFunction layer_from_json(const json& values, std::size_t n) {
  if (!values.is_array() || values.size() != n) {
    throw ValidationError("every layer must list n = " + std::to_string(n) + " values");
  }
  std::vector<std::size_t> map;
  for (const auto& v : values) map.push_back(to_zero_based(v.get<std::size_t>(), n, "layer value"));
  return LayerFunction(std::move(map));
}

}  // namespace

json instance_to_json(const Instance& inst) {
  json doc;
  doc["n"] = width_of(inst);
  doc["k"] = players_of(inst);
  doc["variant"] = std::string(to_string(variant_of(inst)));
  std::visit(
      [&](const auto& in) {
        doc["i"] = in.i + 1;
        json layers = json::array();
        if constexpr (std::is_same_v<std::decay_t<decltype(in)>, MpjInstance>) {
          for (const auto& f : in.middles) layers.push_back(f.to_one_based());
          doc["layers"] = layers;
          doc["x"] = in.x.to_string();
        } else {
          for (const auto& f : in.layers) layers.push_back(f.to_one_based());
          doc["layers"] = layers;
          if (!in.perm_mask.empty()) doc["perm_mask"] = in.perm_mask;
        }
      },
      inst);
  return doc;
}

Instance instance_from_json(const json& doc) {
  try {
    const auto n = doc.at("n").get<std::size_t>();
    const auto k = doc.at("k").get<std::size_t>();
    const auto variant = doc.at("variant").get<std::string>();
    const std::size_t i = to_zero_based(doc.at("i").get<std::size_t>(), n, "i");
    std::vector<LayerFunction> layers;
    for (const auto& l : doc.at("layers")) layers.push_back(layer_from_json(l, n));

    Instance inst;
    if (variant == "mpj") {
      if (doc.contains("perm_mask")) throw ValidationError("perm_mask is a hat-variant field");
      inst = MpjInstance{n, i, std::move(layers), BitVector::from_string(doc.at("x").get<std::string>())};
    } else if (variant == "mpjhat") {
      if (doc.contains("x")) throw ValidationError("the hat variant carries no x");
      std::vector<bool> mask;
      if (doc.contains("perm_mask")) mask = doc["perm_mask"].get<std::vector<bool>>();
      inst = MpjHatInstance{n, i, std::move(layers), std::move(mask)};
    } else {
      throw ValidationError("unknown variant '" + variant + "'");
    }
    if (players_of(inst) != k) {
      throw ValidationError("k = " + std::to_string(k) + " does not match " +
                            std::to_string(doc.at("layers").size()) + " layers");
    }
    validate(inst);
    return inst;
  } catch (const json::exception& e) {
    throw ValidationError(std::string("malformed instance: ") + e.what());
  }
}

Instance read_instance(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  json doc;
  try {
    in >> doc;
  } catch (const json::exception& e) {
    throw ValidationError(path + ": " + e.what());
  }
  return instance_from_json(doc);
}

void write_instance(const std::string& path, const Instance& inst) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << instance_to_json(inst).dump(2) << '\n';
}

json transcript_to_json(const Transcript& t, Variant variant) {
  json doc;
  json messages = json::array();
  for (const auto& m : t.messages) messages.push_back(m.to_string());
  doc["messages"] = messages;
  doc["per_player_bits"] = t.per_player_bits;
  doc["total_cost"] = t.total_cost();
  doc["message_cost"] = t.message_cost();
  if (variant == Variant::Mpj) {
    doc["output"] = t.output;
  } else {
    doc["output"] = t.output + 1;
  }
  return doc;
}

}  // namespace mpj

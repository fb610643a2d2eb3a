#pragma once

#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "syncoord/molgraph.hpp"

namespace syncoord {

namespace detail {

inline int json_int(const nlohmann::json& j, const char* what) {
  if (!j.is_number_integer()) throw GraphError(std::string("schema violation: ") + what + " must be an integer");
  return j.get<int>();
}

}  // namespace detail

/// Builds a graph from a parsed canonical-schema document. Hybridization and
/// ring size are taken verbatim where present and recomputed elsewhere.
inline MolecularGraph graph_from_json(const nlohmann::json& doc) {
  if (!doc.is_object()) throw GraphError("schema violation: document must be an object");
  if (!doc.contains("atoms") || !doc["atoms"].is_array())
    throw GraphError("schema violation: missing 'atoms' array");
  const auto& jatoms = doc["atoms"];
  std::vector<Atom> atoms;
  std::vector<int> keep_hyb;
  std::vector<int> keep_ring;
  for (std::size_t i = 0; i < jatoms.size(); ++i) {
    const auto& ja = jatoms[i];
    if (!ja.is_object()) throw GraphError("schema violation: atom entries must be objects");
    if (!ja.contains("element")) throw GraphError("schema violation: atom " + std::to_string(i) + " lacks 'element'");
    Atom a;
    a.index = static_cast<int>(i);
    a.element = detail::json_int(ja["element"], "element");
    if (a.element < 1 || a.element > kMaxAtomicNumber)
      throw GraphError("schema violation: atom " + std::to_string(i) + " element out of range");
    if (ja.contains("charge")) a.formal_charge = detail::json_int(ja["charge"], "charge");
    if (ja.contains("aromatic")) {
      if (!ja["aromatic"].is_boolean()) throw GraphError("schema violation: aromatic must be a boolean");
      a.aromatic = ja["aromatic"].get<bool>();
    }
    if (ja.contains("hybridization")) {
      const auto& jh = ja["hybridization"];
      auto h = jh.is_string() ? hybridization_from_string(jh.get<std::string>()) : std::nullopt;
      if (!h) throw GraphError("schema violation: bad hybridization on atom " + std::to_string(i));
      a.hybridization = *h;
      keep_hyb.push_back(a.index);
    }
    if (ja.contains("ring_size")) {
      const auto& jr = ja["ring_size"];
      if (!jr.is_null()) {
        const int size = detail::json_int(jr, "ring_size");
        if (size < 3) throw GraphError("schema violation: ring_size must be >= 3");
        a.in_ring = true;
        a.smallest_ring_size = size;
      }
      keep_ring.push_back(a.index);
    }
    atoms.push_back(a);
  }

  std::vector<Bond> bonds;
  if (doc.contains("bonds")) {
    const auto& jbonds = doc["bonds"];
    if (!jbonds.is_array()) throw GraphError("schema violation: 'bonds' must be an array");
    for (const auto& jb : jbonds) {
      Bond b;
      if (jb.is_array()) {
        if (jb.size() < 2 || jb.size() > 3) throw GraphError("schema violation: bond arrays are [a, b] or [a, b, order]");
        b.a = detail::json_int(jb[0], "bond endpoint");
        b.b = detail::json_int(jb[1], "bond endpoint");
        if (jb.size() == 3) {
          auto o = jb[2].is_string() ? bond_order_from_string(jb[2].get<std::string>()) : std::nullopt;
          if (!o) throw GraphError("schema violation: bad bond order");
          b.order = *o;
        }
      } else if (jb.is_object()) {
        if (!jb.contains("a") || !jb.contains("b")) throw GraphError("schema violation: bond lacks 'a'/'b'");
        b.a = detail::json_int(jb["a"], "bond endpoint");
        b.b = detail::json_int(jb["b"], "bond endpoint");
        if (jb.contains("order")) {
          auto o = jb["order"].is_string() ? bond_order_from_string(jb["order"].get<std::string>()) : std::nullopt;
          if (!o) throw GraphError("schema violation: bad bond order");
          b.order = *o;
        }
      } else {
        throw GraphError("schema violation: bond entries must be objects or arrays");
      }
      bonds.push_back(b);
    }
  }

  // Ring fields are recomputed first so the validating constructor sees a
  // consistent in_ring/ring_size pair on every atom.
  for (Atom& a : atoms) {
    if (std::find(keep_ring.begin(), keep_ring.end(), a.index) == keep_ring.end()) {
      a.in_ring = false;
      a.smallest_ring_size.reset();
    }
  }
  MolecularGraph g(std::move(atoms), std::move(bonds));
  g = perceive_rings(g, keep_ring);
  return infer_hybridization(g, keep_hyb);
}

inline MolecularGraph parse_json(std::string_view text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(std::string("invalid JSON: ") + e.what(), e.byte);
  }
  return graph_from_json(doc);
}

/// Canonical-schema document, including the derived per-atom fields.
inline nlohmann::json graph_to_json(const MolecularGraph& g) {
  nlohmann::json jatoms = nlohmann::json::array();
  for (const Atom& a : g.atoms()) {
    nlohmann::json ja = {{"element", a.element},
                         {"charge", a.formal_charge},
                         {"aromatic", a.aromatic},
                         {"hybridization", std::string(to_string(a.hybridization))}};
    ja["ring_size"] = a.smallest_ring_size ? nlohmann::json(*a.smallest_ring_size) : nlohmann::json(nullptr);
    jatoms.push_back(std::move(ja));
  }
  nlohmann::json jbonds = nlohmann::json::array();
  for (const Bond& b : g.bonds())
    jbonds.push_back({{"a", b.a}, {"b", b.b}, {"order", std::string(to_string(b.order))}});
  return {{"atoms", std::move(jatoms)}, {"bonds", std::move(jbonds)}};
}

inline std::string serialize_json(const MolecularGraph& g) { return graph_to_json(g).dump(); }

}  // namespace syncoord

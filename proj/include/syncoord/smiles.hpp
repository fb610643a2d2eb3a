#pragma once

#include <cctype>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "syncoord/elements.hpp"
#include "syncoord/error.hpp"
#include "syncoord/molgraph.hpp"

namespace syncoord {

namespace detail {

class SmilesParser {
 public:
  SmilesParser(std::string_view text, Warnings* warnings) : text_(text), warnings_(warnings) {}

  MolecularGraph parse() {
    skip_space();
    if (pos_ >= text_.size()) throw ParseError("syntax error: empty SMILES", pos_);
    while (pos_ < text_.size()) {
      const char c = text_[pos_];
      if (std::isspace(static_cast<unsigned char>(c))) break;
      if (c == '(') {
        if (prev_ < 0) throw ParseError("syntax error: branch before any atom", pos_);
        if (pending_.has_value()) throw ParseError("syntax error: bond before branch", pos_);
        branches_.push_back({prev_, pos_});
        ++pos_;
      } else if (c == ')') {
        if (branches_.empty()) throw ParseError("unbalanced parenthesis", pos_);
        if (pending_.has_value()) throw ParseError("syntax error: dangling bond", pos_);
        prev_ = branches_.back().atom;
        branches_.pop_back();
        ++pos_;
      } else if (c == '.') {
        if (pending_.has_value()) throw ParseError("syntax error: dangling bond", pos_);
        prev_ = -1;
        ++pos_;
      } else if (is_bond_symbol(c)) {
        if (pending_.has_value()) throw ParseError("syntax error: consecutive bond symbols", pos_);
        pending_ = PendingBond{bond_from_symbol(c), pos_};
        ++pos_;
      } else if (std::isdigit(static_cast<unsigned char>(c)) || c == '%') {
        ring_closure();
      } else {
        atom();
      }
    }
    if (!branches_.empty()) throw ParseError("unbalanced parenthesis", branches_.back().offset);
    if (pending_.has_value()) throw ParseError("syntax error: dangling bond", pending_->offset);
    if (!open_rings_.empty()) {
      const auto& [label, ring] = *open_rings_.begin();
      throw ParseError("unmatched ring closure " + std::to_string(label), ring.offset);
    }
    if (stereo_seen_) warn(warnings_, "stereo descriptors ignored");
    if (isotope_seen_) warn(warnings_, "isotope labels ignored");

    MolecularGraph g(std::move(atoms_), std::move(bonds_));
    g = perceive_rings(g);
    // Implicit aromatic bonds outside any ring are biaryl links; make them single.
    std::vector<Bond> bonds = g.bonds();
    bool changed = false;
    for (std::size_t b = 0; b < bonds.size(); ++b) {
      if (implicit_[b] && bonds[b].order == BondOrder::AROMATIC &&
          !smallest_ring_through_bond(g, static_cast<int>(b))) {
        bonds[b].order = BondOrder::SINGLE;
        changed = true;
      }
    }
    if (changed) g = MolecularGraph(g.atoms(), std::move(bonds));
    return infer_hybridization(g);
  }

 private:
  struct PendingBond {
    std::optional<BondOrder> order;  // nullopt: stereo bond, treated as implicit
    std::size_t offset;
  };
  struct Branch {
    int atom;
    std::size_t offset;
  };
  struct OpenRing {
    int atom;
    std::optional<PendingBond> bond;
    std::size_t offset;
  };

  static bool is_bond_symbol(char c) {
    return c == '-' || c == '=' || c == '#' || c == ':' || c == '/' || c == '\\';
  }

  std::optional<BondOrder> bond_from_symbol(char c) {
    switch (c) {
      case '-': return BondOrder::SINGLE;
      case '=': return BondOrder::DOUBLE;
      case '#': return BondOrder::TRIPLE;
      case ':': return BondOrder::AROMATIC;
      default:
        stereo_seen_ = true;
        return std::nullopt;
    }
  }

  void skip_space() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  void add_bond(int a, int b, const std::optional<PendingBond>& pb, std::size_t offset) {
    if (a == b) throw ParseError("syntax error: self-loop ring closure", offset);
    for (const Bond& existing : bonds_)
      if (existing.connects(a, b)) throw ParseError("syntax error: duplicate bond", offset);
    std::optional<BondOrder> order = pb ? pb->order : std::nullopt;
    const bool implicit = !order.has_value();
    if (implicit) order = (atoms_[a].aromatic && atoms_[b].aromatic) ? BondOrder::AROMATIC : BondOrder::SINGLE;
    bonds_.push_back({a, b, *order});
    implicit_.push_back(implicit);
  }

  void ring_closure() {
    const std::size_t start = pos_;
    int label = 0;
    if (text_[pos_] == '%') {
      if (pos_ + 2 >= text_.size() || !std::isdigit(static_cast<unsigned char>(text_[pos_ + 1])) ||
          !std::isdigit(static_cast<unsigned char>(text_[pos_ + 2])))
        throw ParseError("syntax error: '%' must be followed by two digits", pos_);
      label = (text_[pos_ + 1] - '0') * 10 + (text_[pos_ + 2] - '0');
      pos_ += 3;
    } else {
      label = text_[pos_] - '0';
      ++pos_;
    }
    if (prev_ < 0) throw ParseError("syntax error: ring closure before any atom", start);
    auto it = open_rings_.find(label);
    if (it == open_rings_.end()) {
      open_rings_[label] = OpenRing{prev_, pending_, start};
    } else {
      std::optional<PendingBond> bond = pending_;
      const auto& opened = it->second.bond;
      if (opened && opened->order) {
        if (bond && bond->order && *bond->order != *opened->order)
          throw ParseError("syntax error: conflicting ring-closure bond symbols", start);
        bond = opened;
      }
      add_bond(it->second.atom, prev_, bond, start);
      open_rings_.erase(it);
    }
    pending_.reset();
  }

  int push_atom(int element, bool aromatic, int charge, std::size_t offset) {
    const int idx = static_cast<int>(atoms_.size());
    Atom a;
    a.index = idx;
    a.element = element;
    a.aromatic = aromatic;
    a.formal_charge = charge;
    atoms_.push_back(a);
    if (prev_ >= 0) add_bond(prev_, idx, pending_, offset);
    pending_.reset();
    prev_ = idx;
    return idx;
  }

  void atom() {
    const std::size_t start = pos_;
    const char c = text_[pos_];
    if (c == '[') {
      bracket_atom();
      return;
    }
    auto two = text_.substr(pos_, 2);
    if (two == "Cl" || two == "Br") {
      push_atom(two == "Cl" ? 17 : 35, false, 0, start);
      pos_ += 2;
      return;
    }
    int z = 0;
    bool aromatic = false;
    switch (c) {
      case 'B': z = 5; break;
      case 'C': z = 6; break;
      case 'N': z = 7; break;
      case 'O': z = 8; break;
      case 'P': z = 15; break;
      case 'S': z = 16; break;
      case 'F': z = 9; break;
      case 'I': z = 53; break;
      case 'b': z = 5; aromatic = true; break;
      case 'c': z = 6; aromatic = true; break;
      case 'n': z = 7; aromatic = true; break;
      case 'o': z = 8; aromatic = true; break;
      case 'p': z = 15; aromatic = true; break;
      case 's': z = 16; aromatic = true; break;
      default:
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '*')
          throw ParseError(std::string("unsupported element '") + c + "'", start);
        throw ParseError(std::string("syntax error: unexpected '") + c + "'", start);
    }
    push_atom(z, aromatic, 0, start);
    ++pos_;
  }

  int read_int() {
    int v = 0;
    while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) {
      v = v * 10 + (text_[pos_] - '0');
      ++pos_;
    }
    return v;
  }

  bool peek_digit() const {
    return pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]));
  }

  void bracket_atom() {
    const std::size_t start = pos_;
    ++pos_;  // '['
    if (peek_digit()) {
      read_int();
      isotope_seen_ = true;
    }
    if (pos_ >= text_.size()) throw ParseError("syntax error: unterminated bracket atom", start);

    int z = 0;
    bool aromatic = false;
    const std::size_t sym_at = pos_;
    const char c = text_[pos_];
    if (std::islower(static_cast<unsigned char>(c))) {
      auto two = text_.substr(pos_, 2);
      if (two == "se" || two == "as") {
        z = two == "se" ? 34 : 33;
        pos_ += 2;
      } else {
        switch (c) {
          case 'b': z = 5; break;
          case 'c': z = 6; break;
          case 'n': z = 7; break;
          case 'o': z = 8; break;
          case 'p': z = 15; break;
          case 's': z = 16; break;
          default: throw ParseError(std::string("unsupported element '") + c + "'", sym_at);
        }
        ++pos_;
      }
      aromatic = true;
    } else if (std::isupper(static_cast<unsigned char>(c))) {
      std::optional<int> found;
      if (pos_ + 1 < text_.size() && std::islower(static_cast<unsigned char>(text_[pos_ + 1])))
        found = atomic_number(text_.substr(pos_, 2));
      if (found) {
        pos_ += 2;
      } else {
        found = atomic_number(text_.substr(pos_, 1));
        if (!found) throw ParseError(std::string("unsupported element '") + c + "'", sym_at);
        ++pos_;
      }
      z = *found;
    } else {
      throw ParseError("unsupported element in bracket atom", sym_at);
    }

    // Chirality: '@', '@@', '@TH1', '@AL2', '@SP3', '@TB12', '@OH30'.
    if (pos_ < text_.size() && text_[pos_] == '@') {
      stereo_seen_ = true;
      ++pos_;
      if (pos_ < text_.size() && text_[pos_] == '@') {
        ++pos_;
      } else {
        for (std::string_view cls : {"TH", "AL", "SP", "TB", "OH"}) {
          if (text_.substr(pos_, 2) == cls) {
            pos_ += 2;
            read_int();
            break;
          }
        }
      }
    }
    // Hydrogen count is ignored: hydrogens are never materialized.
    if (pos_ < text_.size() && text_[pos_] == 'H') {
      ++pos_;
      read_int();
    }
    int charge = 0;
    if (pos_ < text_.size() && (text_[pos_] == '+' || text_[pos_] == '-')) {
      const char sign = text_[pos_];
      const int s = sign == '+' ? 1 : -1;
      ++pos_;
      if (peek_digit()) {
        charge = s * read_int();
      } else {
        charge = s;
        while (pos_ < text_.size() && text_[pos_] == sign) {
          charge += s;
          ++pos_;
        }
      }
    }
    if (pos_ < text_.size() && text_[pos_] == ':') {
      ++pos_;
      if (!peek_digit()) throw ParseError("syntax error: atom class needs digits", pos_);
      read_int();
    }
    if (pos_ >= text_.size() || text_[pos_] != ']')
      throw ParseError("syntax error: expected ']'", pos_);
    ++pos_;
    push_atom(z, aromatic, charge, start);
  }

  std::string_view text_;
  Warnings* warnings_;
  std::size_t pos_ = 0;
  int prev_ = -1;
  std::optional<PendingBond> pending_;
  std::vector<Branch> branches_;
  std::map<int, OpenRing> open_rings_;
  std::vector<Atom> atoms_;
  std::vector<Bond> bonds_;
  std::vector<bool> implicit_;
  bool stereo_seen_ = false;
  bool isotope_seen_ = false;
};

}  // namespace detail

/// Parses one SMILES string (subset: organic atoms, bracket atoms, bonds,
/// branches, ring closures) into a heavy-atom graph with ring and
/// hybridization fields filled in. Text after the first whitespace is ignored.
inline MolecularGraph parse_smiles(std::string_view text, Warnings* warnings = nullptr) {
  return detail::SmilesParser(text, warnings).parse();
}

}  // namespace syncoord

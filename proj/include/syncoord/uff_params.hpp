#pragma once

#include <cmath>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>

#include "syncoord/elements.hpp"
#include "syncoord/error.hpp"
#include "syncoord/molgraph.hpp"

namespace syncoord {

/// UFF bond-order correction coefficient.
inline constexpr double kUffLambda = 0.1332;

struct UffAtomParams {
  double radius = 0.0;  // r1, Angstrom
  double chi = 0.0;     // GMP electronegativity

  friend bool operator==(const UffAtomParams&, const UffAtomParams&) = default;
};

// Mirror of data/uff_bond_params.csv; tests keep the two in sync.
inline constexpr std::string_view kBuiltinUffCsv = R"(element,hybridization,radius_angstrom,chi
H,*,0.354,4.528
B,SP2,0.828,5.110
B,SP3,0.838,5.110
B,*,0.838,5.110
C,SP,0.706,5.343
C,SP2,0.732,5.343
C,AROMATIC,0.729,5.343
C,SP3,0.757,5.343
C,*,0.757,5.343
N,SP,0.656,6.899
N,SP2,0.685,6.899
N,AROMATIC,0.699,6.899
N,SP3,0.700,6.899
N,*,0.700,6.899
O,SP,0.639,8.741
O,SP2,0.634,8.741
O,AROMATIC,0.680,8.741
O,SP3,0.658,8.741
O,*,0.658,8.741
F,*,0.668,10.874
Si,*,1.117,4.168
P,*,1.101,8.000
S,SP2,0.854,6.928
S,AROMATIC,1.077,6.928
S,SP3,1.064,6.928
S,*,1.064,6.928
Cl,*,1.044,8.564
Se,*,1.190,6.428
Br,*,1.192,7.790
I,*,1.382,6.822
*,*,0.757,5.343
)";

/// Per (element, hybridization) bond parameters. Keys use atomic number 0 and
/// hybridization "*" as wildcards.
class BondParams {
 public:
  using Key = std::pair<int, std::string>;

  static BondParams from_csv(std::string_view text) {
    BondParams p;
    std::istringstream in{std::string(text)};
    std::string line;
    bool header = true;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
      ++lineno;
      if (!line.empty() && line.back() == '\r') line.pop_back();
      if (line.empty() || line[0] == '#') continue;
      if (header) {
        if (line != "element,hybridization,radius_angstrom,chi")
          throw Error("bond parameter file: unexpected header '" + line + "'");
        header = false;
        continue;
      }
      std::istringstream fields(line);
      std::string elem, hyb, radius, chi;
      if (!std::getline(fields, elem, ',') || !std::getline(fields, hyb, ',') ||
          !std::getline(fields, radius, ',') || !std::getline(fields, chi))
        throw Error("bond parameter file: malformed line " + std::to_string(lineno));
      int z = 0;
      if (elem != "*") {
        auto found = atomic_number(elem);
        if (!found) throw Error("bond parameter file: unknown element '" + elem + "'");
        z = *found;
      }
      UffAtomParams v{std::stod(radius), std::stod(chi)};
      if (!(v.radius > 0.0)) throw Error("bond parameter file: radius must be positive (line " + std::to_string(lineno) + ")");
      p.table_[{z, hyb}] = v;
    }
    if (!p.table_.count({0, "*"})) throw Error("bond parameter file: missing default row '*,*'");
    return p;
  }

  static BondParams from_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open bond parameter file " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return from_csv(ss.str());
  }

  static const BondParams& builtin() {
    static const BondParams params = from_csv(kBuiltinUffCsv);
    return params;
  }

  std::optional<UffAtomParams> find(int element, std::string_view hyb) const {
    auto it = table_.find({element, std::string(hyb)});
    if (it == table_.end()) return std::nullopt;
    return it->second;
  }

  /// Lookup order: exact hybridization (AROMATIC, then SP2 for aromatic
  /// atoms), element wildcard, global default.
  UffAtomParams lookup(const Atom& atom, Warnings* warnings = nullptr) const {
    if (atom.aromatic) {
      if (auto p = find(atom.element, "AROMATIC")) return *p;
    }
    if (auto p = find(atom.element, to_string(atom.hybridization))) return *p;
    if (auto p = find(atom.element, "*")) return *p;
    warn(warnings, "no bond parameters for element " + std::string(element_symbol(atom.element)) +
                       "; using default radius");
    return table_.at({0, "*"});
  }

  const std::map<Key, UffAtomParams>& table() const noexcept { return table_; }

  friend bool operator==(const BondParams&, const BondParams&) = default;

 private:
  std::map<Key, UffAtomParams> table_;
};

/// UFF natural bond length r_i + r_j + r_BO − r_EN, in Angstrom.
inline double uff_bond_length(const UffAtomParams& a, const UffAtomParams& b, double order) {
  const double r_bo = -kUffLambda * (a.radius + b.radius) * std::log(order);
  const double dchi = std::sqrt(a.chi) - std::sqrt(b.chi);
  const double r_en = a.radius * b.radius * dchi * dchi / (a.chi * a.radius + b.chi * b.radius);
  return a.radius + b.radius + r_bo - r_en;
}

inline double equilibrium_bond_length(const Atom& a, const Atom& b, BondOrder order,
                                      const BondParams& params = BondParams::builtin(),
                                      Warnings* warnings = nullptr) {
  return uff_bond_length(params.lookup(a, warnings), params.lookup(b, warnings), numeric_order(order));
}

}  // namespace syncoord

#pragma once

#include <complex>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "atomlab/errors.hpp"
#include "atomlab/fbundle.hpp"
#include "atomlab/json_io.hpp"
#include "atomlab/qde.hpp"
#include "atomlab/rational.hpp"

namespace atomlab {

/// (p, q)-table of Hodge numbers of a d-dimensional variety.
class HodgeDiamond {
 public:
  HodgeDiamond(int d, std::map<std::pair<int, int>, long> entries, bool strict = true) : d_(d) {
    if (d < 0) throw InvalidDiamond("HodgeDiamond: negative dimension");
    h_.assign(static_cast<size_t>(d + 1) * static_cast<size_t>(d + 1), 0);
    for (const auto& [pq, v] : entries) {
      const auto [p, q] = pq;
      if (p < 0 || p > d || q < 0 || q > d) throw InvalidDiamond("HodgeDiamond: entry out of range");
      if (v < 0) throw InvalidDiamond("HodgeDiamond: negative Hodge number");
      at(p, q) = v;
    }
    if (strict) {
      if (at(0, 0) < 1) throw InvalidDiamond("HodgeDiamond: h^{0,0} must be >= 1");
      for (int p = 0; p <= d; ++p)
        for (int q = 0; q <= d; ++q) {
          if (at(p, q) != at(q, p))
            throw InvalidDiamond("HodgeDiamond: conjugation symmetry violated at (" +
                                 std::to_string(p) + "," + std::to_string(q) + ")");
          if (at(p, q) != at(d - p, d - q))
            throw InvalidDiamond("HodgeDiamond: Serre symmetry violated at (" +
                                 std::to_string(p) + "," + std::to_string(q) + ")");
        }
    }
  }

  int dim() const { return d_; }
  long operator()(int p, int q) const { return h_[index(p, q)]; }
  long total() const {
    long t = 0;
    for (long v : h_) t += v;
    return t;
  }

  static HodgeDiamond point() { return HodgeDiamond(0, {{{0, 0}, 1}}); }
  static HodgeDiamond projective_space(int n) {
    std::map<std::pair<int, int>, long> e;
    for (int i = 0; i <= n; ++i) e[{i, i}] = 1;
    return HodgeDiamond(n, std::move(e));
  }
  static HodgeDiamond curve(long genus) {
    return HodgeDiamond(1, {{{0, 0}, 1}, {{1, 0}, genus}, {{0, 1}, genus}, {{1, 1}, 1}});
  }
  static HodgeDiamond k3() {
    return HodgeDiamond(2, {{{0, 0}, 1}, {{2, 0}, 1}, {{0, 2}, 1}, {{1, 1}, 20}, {{2, 2}, 1}});
  }
  static HodgeDiamond abelian_surface() {
    return HodgeDiamond(2, {{{0, 0}, 1},
                            {{1, 0}, 2}, {{0, 1}, 2},
                            {{2, 0}, 1}, {{0, 2}, 1}, {{1, 1}, 4},
                            {{2, 1}, 2}, {{1, 2}, 2},
                            {{2, 2}, 1}});
  }
  static HodgeDiamond cubic_fourfold() {
    return HodgeDiamond(4, {{{0, 0}, 1}, {{1, 1}, 1}, {{3, 1}, 1}, {{1, 3}, 1},
                            {{2, 2}, 21}, {{3, 3}, 1}, {{4, 4}, 1}});
  }
  static HodgeDiamond quintic_threefold() {
    return HodgeDiamond(3, {{{0, 0}, 1}, {{1, 1}, 1}, {{2, 2}, 1}, {{3, 3}, 1},
                            {{3, 0}, 1}, {{0, 3}, 1},
                            {{2, 1}, 101}, {{1, 2}, 101}});
  }

 private:
  size_t index(int p, int q) const {
    return static_cast<size_t>(p) * static_cast<size_t>(d_ + 1) + static_cast<size_t>(q);
  }
  long& at(int p, int q) { return h_[index(p, q)]; }
  int d_;
  std::vector<long> h_;
};

/// Z/2-folded Hodge polynomial: Laurent coefficients c_k, k in [-d, d].
class FoldedPoly {
 public:
  explicit FoldedPoly(int d) : d_(d), c_(static_cast<size_t>(2 * d + 1), 0) {
    if (d < 0) throw InvalidDiamond("FoldedPoly: negative dimension");
  }
  FoldedPoly(int d, std::map<int, long> coeffs) : FoldedPoly(d) {
    for (const auto& [k, v] : coeffs) {
      if (v < 0) throw InvalidDiamond("FoldedPoly: negative coefficient");
      if (v != 0) coeff(k) = v;
    }
  }

  int range() const { return d_; }
  long operator[](int k) const {
    if (k < -d_ || k > d_) return 0;
    return c_[static_cast<size_t>(k + d_)];
  }
  long& coeff(int k) {
    if (k < -d_ || k > d_) throw InvalidDiamond("FoldedPoly: index out of range");
    return c_[static_cast<size_t>(k + d_)];
  }
  long total() const {
    long t = 0;
    for (long v : c_) t += v;
    return t;
  }
  bool reciprocal() const {
    for (int k = 1; k <= d_; ++k)
      if ((*this)[k] != (*this)[-k]) return false;
    return true;
  }
  /// Largest |k| with c_k != 0 (0 for constants and the zero polynomial).
  int support_radius() const {
    for (int k = d_; k >= 1; --k)
      if ((*this)[k] != 0 || (*this)[-k] != 0) return k;
    return 0;
  }
  /// Equality as Laurent polynomials (ranges may differ).
  friend bool operator==(const FoldedPoly& a, const FoldedPoly& b) {
    const int m = std::max(a.d_, b.d_);
    for (int k = -m; k <= m; ++k)
      if (a[k] != b[k]) return false;
    return true;
  }
  friend bool operator!=(const FoldedPoly& a, const FoldedPoly& b) { return !(a == b); }

  std::string str() const;

 private:
  int d_;
  std::vector<long> c_;
};

inline std::string FoldedPoly::str() const {
  std::string out;
  for (int k = d_; k >= -d_; --k) {
    const long v = (*this)[k];
    if (v == 0) continue;
    if (!out.empty()) out += " + ";
    if (v != 1 || k == 0) out += std::to_string(v);
    if (k != 0) {
      if (v != 1) out += "*";
      out += "t";
      if (k != 1) out += "^" + std::to_string(k);
    }
  }
  return out.empty() ? "0" : out;
}

/// c_k = sum_{p-q=k} h^{p,q}; the result is reciprocal and total-preserving.
inline FoldedPoly fold(const HodgeDiamond& dia) {
  FoldedPoly out(dia.dim());
  for (int p = 0; p <= dia.dim(); ++p)
    for (int q = 0; q <= dia.dim(); ++q)
      if (dia(p, q) != 0) out.coeff(p - q) += dia(p, q);
  return out;
}

/// An atom's numerical invariants: folded Hodge polynomial, dimension of the
/// Hodge-class subspace, and a dimension witness.
struct Atom {
  std::string id;
  FoldedPoly hodge_poly;
  long rho = 1;
  std::optional<int> dim_witness;
  std::optional<Complex> eigenvalue;

  void validate() const {
    if (rho < 1) throw DomainError("atom " + id + ": rho must be >= 1");
    if (rho > hodge_poly[0])
      throw DomainError("atom " + id + ": rho exceeds the p-q = 0 coefficient");
  }

  /// Structural identity: invariants only, not the label.
  bool same_invariants(const Atom& o) const {
    const bool eig_match = eigenvalue.has_value() == o.eigenvalue.has_value() &&
                           (!eigenvalue || std::abs(*eigenvalue - *o.eigenvalue) < 1e-12);
    return hodge_poly == o.hodge_poly && rho == o.rho && dim_witness == o.dim_witness && eig_match;
  }

  static Atom point_atom() {
    return Atom{"pt", FoldedPoly(0, {{0, 1}}), 1, 0, std::nullopt};
  }
};

/// Finite multiset of atoms: an atom table keyed by id plus multiplicities.
class ChemicalFormula {
 public:
  ChemicalFormula() = default;

  void add(const Atom& atom, long mult = 1) {
    if (mult < 0) throw DomainError("chemical formula: negative multiplicity");
    if (mult == 0) return;
    atom.validate();
    auto it = atoms_.find(atom.id);
    if (it == atoms_.end()) {
      atoms_.emplace(atom.id, atom);
    } else if (!it->second.same_invariants(atom)) {
      throw IdCollision("chemical formula: id '" + atom.id + "' bound to different invariants");
    }
    mult_[atom.id] += mult;
  }

  const std::map<std::string, Atom>& table() const { return atoms_; }
  const std::map<std::string, long>& multiplicities() const { return mult_; }
  long multiplicity(const std::string& id) const {
    auto it = mult_.find(id);
    return it == mult_.end() ? 0 : it->second;
  }
  long total_atoms() const {
    long t = 0;
    for (const auto& [id, m] : mult_) t += m;
    return t;
  }
  /// Sum over atoms of multiplicity * atom dimension (total of hodge_poly).
  long total_dimension() const {
    long t = 0;
    for (const auto& [id, m] : mult_) t += m * atoms_.at(id).hodge_poly.total();
    return t;
  }
  bool empty() const { return mult_.empty(); }

  friend bool operator==(const ChemicalFormula& a, const ChemicalFormula& b) {
    if (a.mult_ != b.mult_) return false;
    for (const auto& [id, atom] : a.atoms_)
      if (b.mult_.count(id) && !b.atoms_.at(id).same_invariants(atom)) return false;
    return true;
  }

 private:
  std::map<std::string, Atom> atoms_;
  std::map<std::string, long> mult_;
};

/// Multiset sum; atom tables merge by id and must agree on invariants.
inline ChemicalFormula cf_add(const ChemicalFormula& a, const ChemicalFormula& b) {
  ChemicalFormula out = a;
  for (const auto& [id, m] : b.multiplicities()) out.add(b.table().at(id), m);
  return out;
}

inline ChemicalFormula cf_scale(const ChemicalFormula& a, long m) {
  if (m < 0) throw DomainError("cf_scale: negative scalar");
  ChemicalFormula out;
  if (m == 0) return out;
  for (const auto& [id, mult] : a.multiplicities()) out.add(a.table().at(id), mult * m);
  return out;
}

/// CF(Xhat) = CF(X) + (r-1) CF(Z) for a blowup along a codimension-r center.
inline ChemicalFormula blowup_cf(const ChemicalFormula& cf_x, const ChemicalFormula& cf_z, int r) {
  if (r < 2) throw DomainError("blowup_cf: r must be >= 2");
  return cf_add(cf_x, cf_scale(cf_z, r - 1));
}

/// CF(P(V)) = r * CF(X) for a rank-r projective bundle.
inline ChemicalFormula proj_bundle_cf(const ChemicalFormula& cf_x, int r) {
  if (r < 1) throw DomainError("proj_bundle_cf: r must be >= 1");
  return cf_scale(cf_x, r);
}

/// Single-atom composition of a variety with nef canonical class.
inline ChemicalFormula nef_singleton_cf(const HodgeDiamond& dia, long rho,
                                        const std::string& id = "eta") {
  if (rho < 1) throw DomainError("nef_singleton_cf: rho must be >= 1");
  Atom eta{id, fold(dia), rho, dia.dim(), std::nullopt};
  ChemicalFormula cf;
  cf.add(eta);
  return cf;
}

/// Primitive middle-cohomology input for the hypersurface pipeline: Hodge
/// numbers h^{d-q, q}_prim for q = 0..d.
using PrimitiveRow = std::vector<long>;

inline bool hypersurface_atoms_applicable(const CompleteIntersection& ci) {
  // validated list: the argument killing quantum corrections on primitive
  // classes is checked in the source only for the cubic fourfold
  return ci.ambient_n == 6 && ci.degrees == std::vector<int>{3};
}

/// Atoms of a validated even-dimensional hypersurface: one 1-dimensional atom
/// per nonzero ambient eigenvalue, and a 0-atom absorbing the ambient 0-block
/// together with the primitive middle cohomology.
inline ChemicalFormula hypersurface_atoms(const CompleteIntersection& ci,
                                          const SplitBlocks& split,
                                          const PrimitiveRow& primitive) {
  if (!hypersurface_atoms_applicable(ci))
    throw NotValidated("hypersurface_atoms: only validated cases are admitted");
  const int d = ci.dim();
  if (static_cast<int>(primitive.size()) != d + 1)
    throw DomainError("hypersurface_atoms: primitive row must list h^{d-q,q} for q = 0..d");

  int total_split = 0;
  for (const auto& b : split) total_split += b.dim;
  if (total_split != ci.rank())
    throw DomainError("hypersurface_atoms: split does not cover the ambient fiber");

  ChemicalFormula cf;
  int zero_dim = -1;
  int counter = 0;
  for (const auto& b : split) {
    if (std::abs(b.cluster.value) < 1e-9) {
      if (zero_dim >= 0) throw DomainError("hypersurface_atoms: multiple zero clusters");
      zero_dim = b.dim;
      continue;
    }
    if (b.dim != 1)
      throw NotValidated("hypersurface_atoms: nonzero ambient cluster of dimension > 1");
    Atom a{"ev" + std::to_string(counter++), FoldedPoly(0, {{0, 1}}), 1, 1, b.cluster.value};
    cf.add(a);
  }
  if (zero_dim < 0) throw DomainError("hypersurface_atoms: no zero cluster in the ambient split");

  FoldedPoly p(d);
  p.coeff(0) += zero_dim;  // ambient classes are all (p,p)
  for (int q = 0; q <= d; ++q) {
    const int k = (d - q) - q;
    p.coeff(k) += primitive[static_cast<size_t>(q)];
  }
  Atom zero_atom{"zero", std::move(p), zero_dim, d, Complex(0.0, 0.0)};
  cf.add(zero_atom);
  return cf;
}

/// Admission rule for atoms of varieties of dimension <= max_dim. All present
/// requirement fields must hold; min_c2 selects which atoms the rule speaks
/// about at all.
struct CatalogRule {
  std::string id;
  int max_dim = 2;
  std::optional<int> support_bound;  // require c_k = 0 for |k| > bound
  std::optional<long> min_c2;        // rule applies only when c_2 >= min_c2
  std::optional<long> min_rho;       // require rho >= min_rho

  bool admits(const Atom& a) const {
    if (min_c2 && a.hodge_poly[2] < *min_c2) return false;
    if (support_bound && a.hodge_poly.support_radius() > *support_bound) return false;
    if (min_rho && a.rho < *min_rho) return false;
    return true;
  }
};

/// The dim <= 2 classification: points/curves and p_g = 0 surfaces carry no
/// |p-q| = 2 classes; surfaces with geometric genus have a single atom with at
/// least three Hodge classes.
inline std::vector<CatalogRule> default_catalog() {
  return {
      CatalogRule{"points", 0, 0, std::nullopt, std::nullopt},
      CatalogRule{"points-and-curves", 1, 1, std::nullopt, std::nullopt},
      CatalogRule{"surface-pg-zero", 2, 1, std::nullopt, std::nullopt},
      CatalogRule{"surface-pg-positive", 2, 2, 1, 3},
  };
}

/// Rules are plain data so the classification can be extended at runtime:
/// [{"id", "max_dim", "support_bound"?, "min_c2"?, "min_rho"?}, ...]
inline std::vector<CatalogRule> rules_from_json(const Json& j) {
  std::vector<CatalogRule> rules;
  for (const auto& e : j) {
    CatalogRule r;
    r.id = e.at("id").get<std::string>();
    r.max_dim = e.at("max_dim").get<int>();
    if (e.contains("support_bound")) r.support_bound = e.at("support_bound").get<int>();
    if (e.contains("min_c2")) r.min_c2 = e.at("min_c2").get<long>();
    if (e.contains("min_rho")) r.min_rho = e.at("min_rho").get<long>();
    rules.push_back(std::move(r));
  }
  return rules;
}

struct VerdictRuleTrace {
  std::string atom_id;
  bool admissible = false;
  std::string admitted_by;  // rule id when admissible
};

struct Verdict {
  bool obstructed = false;
  std::optional<std::string> witness;
  std::vector<VerdictRuleTrace> trace;
};

/// Obstructed when some atom fails every admission rule for dimensions
/// <= d-2; Inconclusive otherwise.
inline Verdict nonrationality_verdict(const ChemicalFormula& cf, int d,
                                      const std::vector<CatalogRule>& rules = default_catalog()) {
  if (d < 2) throw DomainError("nonrationality_verdict: dimension must be >= 2");
  Verdict v;
  for (const auto& [id, atom] : cf.table()) {
    VerdictRuleTrace t;
    t.atom_id = id;
    for (const auto& rule : rules) {
      if (rule.max_dim > d - 2) continue;
      if (rule.admits(atom)) {
        t.admissible = true;
        t.admitted_by = rule.id;
        break;
      }
    }
    if (!t.admissible && !v.obstructed) {
      v.obstructed = true;
      v.witness = id;
    }
    v.trace.push_back(std::move(t));
  }
  return v;
}

enum class CyConsistency { Consistent, Inconsistent };

struct CyCheck {
  CyConsistency verdict = CyConsistency::Consistent;
  int k = 0;          // first differing degree when inconsistent
  long lhs = 0, rhs = 0;
};

/// Necessary condition for birational equivalence of Calabi-Yau manifolds:
/// equal folded Hodge polynomials.
inline CyCheck cy_birational_check(const HodgeDiamond& a, const HodgeDiamond& b) {
  if (a.dim() != b.dim())
    throw DimensionMismatch("cy_birational_check: diamonds of different dimension");
  const int d = a.dim();
  if (a(d, 0) != 1 || b(d, 0) != 1)
    throw DomainError("cy_birational_check: h^{d,0} = 1 (Calabi-Yau) required");
  const FoldedPoly fa = fold(a), fb = fold(b);
  for (int k = -d; k <= d; ++k)
    if (fa[k] != fb[k]) return CyCheck{CyConsistency::Inconsistent, k, fa[k], fb[k]};
  return CyCheck{};
}

// --- JSON interfaces -------------------------------------------------------

/// {"d": int, "h": [[p, q, value], ...]} with unlisted entries zero.
inline HodgeDiamond diamond_from_json(const Json& j, bool strict = true) {
  const int d = j.at("d").get<int>();
  std::map<std::pair<int, int>, long> entries;
  for (const auto& e : j.at("h")) {
    if (!e.is_array() || e.size() != 3)
      throw std::invalid_argument("diamond: h entries must be [p, q, value]");
    entries[{e[0].get<int>(), e[1].get<int>()}] = e[2].get<long>();
  }
  return HodgeDiamond(d, std::move(entries), strict);
}

inline Json folded_to_json(const FoldedPoly& p) {
  Json arr = Json::array();
  for (int k = -p.range(); k <= p.range(); ++k)
    if (p[k] != 0) arr.push_back(Json::array({k, p[k]}));
  return arr;
}

inline FoldedPoly folded_from_json(const Json& j) {
  int range = 0;
  std::map<int, long> coeffs;
  for (const auto& e : j) {
    if (!e.is_array() || e.size() != 2)
      throw std::invalid_argument("folded polynomial: entries must be [k, c]");
    const int k = e[0].get<int>();
    coeffs[k] = e[1].get<long>();
    range = std::max(range, std::abs(k));
  }
  return FoldedPoly(range, std::move(coeffs));
}

/// {"atoms": [{"id", "P", "rho", "dim_witness"}], "mult": {"id": m}}
inline ChemicalFormula cf_from_json(const Json& j) {
  std::map<std::string, Atom> table;
  for (const auto& a : j.at("atoms")) {
    Atom atom{a.at("id").get<std::string>(), folded_from_json(a.at("P")),
              a.at("rho").get<long>(), std::nullopt, std::nullopt};
    if (a.contains("dim_witness") && !a.at("dim_witness").is_null())
      atom.dim_witness = a.at("dim_witness").get<int>();
    table.emplace(atom.id, std::move(atom));
  }
  ChemicalFormula cf;
  for (const auto& [id, m] : j.at("mult").items()) {
    auto it = table.find(id);
    if (it == table.end())
      throw std::invalid_argument("chemical formula: multiplicity for unknown atom '" + id + "'");
    cf.add(it->second, m.get<long>());
  }
  return cf;
}

inline Json cf_to_json(const ChemicalFormula& cf) {
  Json atoms = Json::array();
  for (const auto& [id, atom] : cf.table()) {
    Json a{{"id", id}, {"P", folded_to_json(atom.hodge_poly)}, {"rho", atom.rho}};
    a["dim_witness"] = atom.dim_witness ? Json(*atom.dim_witness) : Json(nullptr);
    if (atom.eigenvalue) a["eigenvalue"] = complex_to_json(*atom.eigenvalue);
    atoms.push_back(std::move(a));
  }
  Json mult = Json::object();
  for (const auto& [id, m] : cf.multiplicities()) mult[id] = m;
  return Json{{"atoms", atoms}, {"mult", mult}};
}

inline Json verdict_to_json(const Verdict& v) {
  Json trace = Json::array();
  for (const auto& t : v.trace) {
    Json e{{"atom", t.atom_id}, {"admissible", t.admissible}};
    if (t.admissible) e["admitted_by"] = t.admitted_by;
    trace.push_back(std::move(e));
  }
  return Json{{"verdict", v.obstructed ? "obstructed" : "inconclusive"},
              {"witness", v.witness ? Json(*v.witness) : Json(nullptr)},
              {"rule_trace", trace}};
}

}  // namespace atomlab

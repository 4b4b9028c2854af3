#pragma once

#include <map>
#include <vector>

#include "spectral/measure.hpp"

// Flattened view of a measure as a sum of primitive parts with shifts and
// coefficients folded in. Shared by the decomposition and sigma-space code.
namespace spectral::detail {

struct CanonicalParts {
  std::vector<Density> densities;
  std::map<double, double> atoms;
  std::vector<Lattice> lattices;
  std::vector<SelfSimilar> ifs;
};

CanonicalParts canonicalize(const SpectralMeasure& m);
SpectralMeasure assemble(const CanonicalParts& parts);

Density shift_density(const Density& d, double a);
Density scale_density(const Density& d, double c);
Density restrict_density(const Density& d, const Interval& I);

/// Disjoint sorted intervals covering the union of the supports.
std::vector<Interval> support_union(const std::vector<Density>& ds);
/// Complement of a disjoint sorted union within `I`.
std::vector<Interval> complement_within(const std::vector<Interval>& pieces, const Interval& I);

bool same_points(const Lattice& a, const Lattice& b);
bool on_lattice(const Lattice& l, double x);

enum class IfsRelation { Identical, Singular, Unknown };
IfsRelation relate(const SelfSimilar& a, const SelfSimilar& b);
/// Attractor has zero Lebesgue measure (similarity dimension below 1).
bool lebesgue_null(const SelfSimilar& s);

}  // namespace spectral::detail

#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>

#include "obda/ontology/model.hpp"

namespace obda {

/// One axiom per line:
///
///   A sub B                 exists R sub B           exists inv(R) sub B
///   exists F sub B          A sub exists R           agg:min F >= 0.9 sub B
///   R1 subrole inv(R2)      F1 subattr F2            funct R | funct inv(R) | funct attr F
///   disjoint A exists R     disjoint role R1 R2      disjoint attr F1 F2
///
/// `exists X` denotes an attribute existential when X is used as an attribute
/// anywhere in the file (subattr, funct attr, disjoint attr, agg:), and a role
/// existential otherwise; `exists attr X` / `exists role X` force the kind.
/// '#' starts a comment. Only syntax is checked here; see validate_ontology.
Ontology parse_ontology(std::string_view text, const std::string& source = "<ontology>");
Ontology read_ontology_file(const std::filesystem::path& path);

/// CSV rows `kind,subject,predicate,object`, kind in {concept, role, attr}.
/// A header row with exactly those names is optional.
Dataset parse_dataset(std::istream& in, const std::string& source = "<dataset>");
Dataset read_dataset_file(const std::filesystem::path& path);
void write_dataset(std::ostream& out, const Dataset& d);

/// `q(x,y) :- A(x), R(x,y), F(x,_), [agg:min F >= 0.9](x), B('c1')`.
/// Bare identifiers are variables, quoted names individuals, numbers data values.
/// Binary predicates are classified as roles or attributes through `vocab`.
ConjunctiveQuery parse_cq(std::string_view text, const Vocabulary& vocab, const std::string& source = "<query>");

}  // namespace obda

#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "obda/mapping/ir.hpp"
#include "obda/ontology/model.hpp"

namespace obda {

/// P(x[,y]) <- body, with the body's output columns named after the head variables.
struct ClassicalMapping {
  PredicateKind kind = PredicateKind::Concept;
  std::string predicate;
  std::vector<std::string> head;
  ir::PlanNode body;
  int line = 0;
};

/// GRAPH i { ?s P ?v } <- Slice(source, i, r, sl, st) projected to (s, v).
/// Window parameters stay open until a query instantiates them.
struct StreamMapping {
  std::string predicate;
  std::string subject;  // head variable names, without '?'
  std::string object;
  std::string source;   // stream name, or a generic relation name matching every stream
  std::string subject_column = "sid";
  std::string value_column = "sval";
  std::vector<ir::Condition> conditions;
  std::string label;
  int line = 0;
};

class MappingSet {
 public:
  void add(ClassicalMapping m) { classical_.push_back(std::move(m)); }
  void add(StreamMapping m) { streaming_.push_back(std::move(m)); }

  const std::vector<ClassicalMapping>& classical() const { return classical_; }
  const std::vector<StreamMapping>& streaming() const { return streaming_; }

  std::vector<const ClassicalMapping*> find(PredicateKind kind, const std::string& predicate) const;
  std::vector<const StreamMapping*> find_stream(const std::string& predicate) const;

  /// Predicates with a classical mapping (stream predicates are attributes too).
  Vocabulary vocabulary() const;

 private:
  std::vector<ClassicalMapping> classical_;
  std::vector<StreamMapping> streaming_;
};

/// One mapping per line; '#' starts a comment.
///
///   map concept Reliable(x) <- scan(sensors; x=sid; where kind=test) as sql1
///   map role    partOf(x,y) <- scan(parts; x=part, y=whole)
///   map attr    testScore(x,y) <- scan(scores; x=sid, y=score; where score>=0)
///   map stream  hasValue(?s,?v) <- slice(Msmt; s=sid, v=sval)
///
/// Conditions compare a column with a literal (=, !=, <, <=, >, >=); literals
/// are numbers, 'quoted' or bare words. Stream columns are sid, sval and time
/// (aliases sensor_id, value, time_ms).
MappingSet parse_mappings(std::string_view text, const std::string& source = "<mappings>");
MappingSet read_mappings_file(const std::filesystem::path& path);

/// Maps every predicate of `vocab` onto a dataset CSV loaded as table `table`
/// (columns kind, subject, predicate, object).
MappingSet identity_mappings(const Vocabulary& vocab, const std::string& table = "dataset");

}  // namespace obda

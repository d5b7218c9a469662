#pragma once

#include <filesystem>
#include <string>
#include <string_view>

#include "obda/starql/ast.hpp"

namespace obda::starql {

/// Clause order is fixed:
///
///   PREFIX p: <iri> ...
///   CREATE PULSE name WITH START = NOW|<ms>, FREQUENCY = <duration>
///   CREATE STREAM name AS
///   CONSTRUCT GRAPH NOW { ?x a C . ... }  |  SELECT ?x ?y ...
///   FROM STATIC ONTOLOGY name, DATA name
///   WHERE { triples }
///   FROM STREAM name [<setback> <-] [NOW - <range>, NOW] -> <slide> [,] ...
///   USING PULSE name
///   SEQUENCE BY strategy AS alias
///   HAVING expression
///
/// Durations are a number glued to a unit: ms, sec, min, hour, day, year.
/// Throws ParseError with line and column.
StarqlQuery parse_starql(std::string_view text, const std::string& source = "<query>");
StarqlQuery read_starql_file(const std::filesystem::path& path);

/// "1min" -> 60000. Throws obda::Error on a bad number or unknown unit.
Millis parse_duration(std::string_view text);

}  // namespace obda::starql

#include <gtest/gtest.h>

#include <sstream>

#include "obda/common/error.hpp"
#include "obda/ontology/io.hpp"
#include "obda/ontology/oracle.hpp"
#include "obda/ontology/reasoning.hpp"

using namespace obda;

namespace {

const char* kSensorOntology =
    "precisionScore subattr testScore\n"
    "agg:min testScore >= 0.9 sub Reliable\n";

Dataset sensor_data() {
  std::istringstream in("attr,s1,precisionScore,0.9\nattr,s2,testScore,0.95\nattr,s3,testScore,0.5\n");
  return parse_dataset(in);
}

Dataset csv(const std::string& text) {
  std::istringstream in(text);
  return parse_dataset(in);
}

std::set<std::string> names(const std::set<Individual>& xs) {
  std::set<std::string> out;
  for (const auto& x : xs) out.insert(x.name);
  return out;
}

AggregateConcept agg(AggFn fn, const std::string& f, CmpOp cmp, const std::string& r) {
  return AggregateConcept{fn, cmp, *parse_rational(r), f};
}

}  // namespace

TEST(OntologyParse, AllAxiomForms) {
  auto o = parse_ontology(
      "A sub B\n"
      "exists R sub B   # comment\n"
      "exists inv(R) sub B\n"
      "exists F sub B\n"
      "agg:min F >= 0.9 sub B\n"
      "A sub exists R\n"
      "R1 subrole inv(R2)\n"
      "F1 subattr F\n"
      "funct R\n"
      "funct attr F\n"
      "disjoint A B\n"
      "disjoint role R1 R2\n"
      "disjoint attr F1 F\n");
  ASSERT_EQ(o.axioms().size(), 13u);
  auto ci = std::get<ConceptInclusion>(o.axioms()[3]);
  EXPECT_EQ(ci.sub.kind, ConceptKind::ExistsAttribute);
  auto ri = std::get<RoleInclusion>(o.axioms()[6]);
  EXPECT_TRUE(ri.sup.inverse);
  for (const auto& a : o.axioms()) {
    auto again = parse_ontology(to_string(a) + "\n" + kSensorOntology + "F subattr G\nF1 subattr G\n");
    EXPECT_EQ(to_string(again.axioms()[0]), to_string(a));
  }
}

TEST(OntologyParse, ErrorsCarryLineAndColumn) {
  try {
    parse_ontology("A sub B\nA sub\n");
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 2);
  }
  EXPECT_THROW(parse_ontology("A sub agg:min F >= 1\n"), ParseError);
  EXPECT_THROW(parse_ontology("agg:median F >= 1 sub A\n"), ParseError);
  EXPECT_THROW(parse_ontology("A B C D\n"), ParseError);
}

TEST(DatasetParse, RejectsBadRows) {
  EXPECT_THROW(csv("attr,s1,F,abc\n"), ParseError);
  EXPECT_THROW(csv("weird,s1,F,1\n"), ParseError);
  EXPECT_THROW(csv("concept,_:n1,A,\n"), ParseError);
  auto d = csv("kind,subject,predicate,object\nconcept,a,A,\nconcept,a,A,\nrole,a,R,b\nattr,a,F,1/2\n");
  EXPECT_EQ(d.size(), 3u);
}

TEST(ValidateOntology, FunctionalRoleWithSubRole) {
  auto report = validate_ontology(parse_ontology("funct hasPart\npartOf subrole hasPart\n"));
  ASSERT_EQ(report.violations.size(), 1u);
  EXPECT_EQ(report.violations[0].rule, "funct-role-inclusion");
  EXPECT_EQ(report.violations[0].axioms, (std::vector<std::size_t>{0, 1}));
}

TEST(ValidateOntology, FunctionalAttributeWithSubAttribute) {
  auto report = validate_ontology(parse_ontology("funct attr F\nG subattr F\n"));
  ASSERT_EQ(report.violations.size(), 1u);
  EXPECT_EQ(report.violations[0].rule, "funct-attribute-inclusion");
}

TEST(ValidateOntology, SensorOntologyAndEmptyAreValid) {
  EXPECT_TRUE(validate_ontology(parse_ontology(kSensorOntology)).ok());
  EXPECT_TRUE(validate_ontology(Ontology{}).ok());
}

TEST(ValidateOntology, AttributeExistentialOnRight) {
  Ontology o;
  o.add(ConceptInclusion{Concept::atomic("A"), Concept::exists_attribute("F")});
  auto report = validate_ontology(o);
  ASSERT_EQ(report.violations.size(), 1u);
  EXPECT_EQ(report.violations[0].rule, "attribute-existential-rhs");
  EXPECT_THROW(require_valid(o), Error);
}

TEST(Closure, AttributeInclusionPropagates) {
  auto c = deductive_closure(sensor_data(), parse_ontology(kSensorOntology));
  EXPECT_TRUE(c.attributes.count(AttributeAssertion{"testScore", {"s1"}, *parse_rational("0.9")}));
  EXPECT_TRUE(c.concepts.count(ConceptAssertion{"Reliable", {"s1"}}));
  EXPECT_TRUE(c.concepts.count(ConceptAssertion{"Reliable", {"s2"}}));
  EXPECT_FALSE(c.concepts.count(ConceptAssertion{"Reliable", {"s3"}}));
}

TEST(Closure, EmptyStaysEmpty) { EXPECT_TRUE(deductive_closure(Dataset{}, parse_ontology(kSensorOntology)).empty()); }

TEST(Closure, AttributeChain) {
  auto c = deductive_closure(csv("attr,a,F1,1\n"), parse_ontology("F1 subattr F2\nF2 subattr F3\n"));
  EXPECT_EQ(c, csv("attr,a,F1,1\nattr,a,F2,1\nattr,a,F3,1\n"));
}

TEST(Closure, RolesAndConcepts) {
  auto o = parse_ontology("R subrole inv(S)\nexists inv(S) sub A\nA sub B\nexists F sub C\nF subattr G\n");
  auto c = deductive_closure(csv("role,a,R,b\nattr,x,F,3\n"), o);
  EXPECT_TRUE(c.roles.count(RoleAssertion{"S", {"b"}, {"a"}}));
  EXPECT_TRUE(c.concepts.count(ConceptAssertion{"A", {"a"}}));
  EXPECT_TRUE(c.concepts.count(ConceptAssertion{"B", {"a"}}));
  EXPECT_TRUE(c.concepts.count(ConceptAssertion{"C", {"x"}}));
  EXPECT_EQ(deductive_closure(c, o), c);
}

TEST(AggregateConcept, SensorExample) {
  auto o = parse_ontology(kSensorOntology);
  auto d = sensor_data();
  EXPECT_EQ(names(eval_aggregate_concept(agg(AggFn::Min, "testScore", CmpOp::Ge, "0.9"), d, o)),
            (std::set<std::string>{"s1", "s2"}));
  EXPECT_EQ(names(eval_aggregate_concept(agg(AggFn::Min, "precisionScore", CmpOp::Ge, "0.9"), d, o)),
            (std::set<std::string>{"s1"}));
  EXPECT_TRUE(eval_aggregate_concept(agg(AggFn::Count, "testScore", CmpOp::Ge, "0"), Dataset{}, o).empty());
}

TEST(AggregateConcept, AllFunctionsExact) {
  auto d = csv("attr,a,F,1/3\nattr,a,F,2/3\nattr,a,F,1\nattr,b,F,1\nattr,b,G,1\n");
  Ontology o;
  auto members = [&](AggFn fn, CmpOp cmp, const std::string& r) {
    return names(eval_aggregate_concept(agg(fn, "F", cmp, r), d, o));
  };
  using S = std::set<std::string>;
  EXPECT_EQ(members(AggFn::Sum, CmpOp::Eq, "2"), S{"a"});
  EXPECT_EQ(members(AggFn::Avg, CmpOp::Eq, "2/3"), S{"a"});
  EXPECT_EQ(members(AggFn::Min, CmpOp::Lt, "1"), S{"a"});
  EXPECT_EQ(members(AggFn::Max, CmpOp::Eq, "1"), (S{"a", "b"}));
  EXPECT_EQ(members(AggFn::Count, CmpOp::Gt, "1"), S{"a"});
  EXPECT_EQ(members(AggFn::CountDistinct, CmpOp::Eq, "1"), S{"b"});
  EXPECT_EQ(members(AggFn::Sum, CmpOp::Ne, "2"), S{"b"});
  EXPECT_EQ(members(AggFn::Count, CmpOp::Le, "0"), S{});
}

TEST(AggregateConcept, IgnoresConceptAssertions) {
  auto o = parse_ontology(kSensorOntology);
  auto d = sensor_data();
  auto e = agg(AggFn::Min, "testScore", CmpOp::Ge, "0.9");
  auto before = eval_aggregate_concept(e, d, o);
  d.add(ConceptAssertion{"Reliable", {"s3"}});
  EXPECT_EQ(eval_aggregate_concept(e, d, o), before);
}

TEST(Satisfiability, FunctionalAttribute) {
  auto r = check_satisfiability(parse_ontology("funct attr F\n"), csv("attr,a,F,1\nattr,a,F,2\n"));
  EXPECT_FALSE(r.satisfiable);
  ASSERT_EQ(r.violations.size(), 1u);
  EXPECT_EQ(r.violations[0].axiom, "funct attr F");
  EXPECT_EQ(r.violations[0].witnesses, (std::vector<std::string>{"F(a,1)", "F(a,2)"}));
}

TEST(Satisfiability, ConceptDisjointness) {
  auto r = check_satisfiability(parse_ontology("disjoint A B\n"), csv("concept,a,A,\nconcept,a,B,\n"));
  EXPECT_FALSE(r.satisfiable);
  ASSERT_EQ(r.violations.size(), 1u);
  EXPECT_EQ(r.violations[0].witnesses, (std::vector<std::string>{"a : A", "a : B"}));
}

TEST(Satisfiability, SensorExampleIsSatisfiable) {
  EXPECT_TRUE(check_satisfiability(parse_ontology(kSensorOntology), sensor_data()).satisfiable);
}

TEST(Satisfiability, ThroughInclusionsAndAnonymousSuccessors) {
  auto o = parse_ontology("A sub exists R\nexists inv(R) sub C\ndisjoint C D\nexists inv(R) sub D\n");
  auto r = check_satisfiability(o, csv("concept,a,A,\n"));
  EXPECT_FALSE(r.satisfiable);
  auto derived = check_satisfiability(parse_ontology("A sub B\ndisjoint B C\n"), csv("concept,a,A,\nconcept,a,C,\n"));
  EXPECT_FALSE(derived.satisfiable);
  auto roles = check_satisfiability(parse_ontology("funct R\nS subrole R\n"), csv("role,a,R,b\nrole,a,S,c\n"));
  EXPECT_FALSE(roles.satisfiable);
  auto rd = check_satisfiability(parse_ontology("disjoint role R S\n"), csv("role,a,R,b\nrole,a,S,b\n"));
  EXPECT_FALSE(rd.satisfiable);
  auto ad = check_satisfiability(parse_ontology("disjoint attr F G\n"), csv("attr,a,F,1\nattr,a,G,1\n"));
  EXPECT_FALSE(ad.satisfiable);
}

TEST(Satisfiability, DuplicationInvariant) {
  auto o = parse_ontology("disjoint A B\n");
  auto d = csv("concept,a,A,\nconcept,a,A,\nconcept,a,B,\n");
  EXPECT_EQ(check_satisfiability(o, d).satisfiable, check_satisfiability(o, csv("concept,a,A,\nconcept,a,B,\n")).satisfiable);
}

TEST(Oracle, SensorExample) {
  auto o = parse_ontology(kSensorOntology);
  auto q = parse_cq("q(x) :- Reliable(x)", o.vocabulary());
  auto r = certain_answers_oracle(q, o, sensor_data());
  EXPECT_EQ(r.status, OracleStatus::Complete);
  std::set<AnswerTuple> expected{{Term::individual("s1")}, {Term::individual("s2")}};
  EXPECT_EQ(r.answers, expected);
}

TEST(Oracle, EmptyDataset) {
  Vocabulary v;
  auto r = certain_answers_oracle(parse_cq("q(x) :- A(x)", v), Ontology{}, Dataset{});
  EXPECT_TRUE(r.answers.empty());
}

TEST(Oracle, ExistentialsAndNulls) {
  auto o = parse_ontology("A sub exists R\nexists inv(R) sub B\n");
  auto d = csv("concept,a,A,\n");
  auto q1 = parse_cq("q(x) :- R(x,y), B(y)", o.vocabulary());
  EXPECT_EQ(certain_answers_oracle(q1, o, d).answers, (std::set<AnswerTuple>{{Term::individual("a")}}));
  auto q2 = parse_cq("q(x,y) :- R(x,y)", o.vocabulary());
  EXPECT_TRUE(certain_answers_oracle(q2, o, d).answers.empty());
}

TEST(Oracle, DepthExhaustionIsFlagged) {
  auto o = parse_ontology("A sub exists R\nexists inv(R) sub A\n");
  auto q = parse_cq("q(x) :- R(x,y), R(y,z), R(z,w)", o.vocabulary());
  auto r = certain_answers_oracle(q, o, csv("concept,a,A,\n"));
  EXPECT_EQ(r.status, OracleStatus::DepthExhausted);
  EXPECT_EQ(r.answers, (std::set<AnswerTuple>{{Term::individual("a")}}));
}

TEST(Oracle, UnsatisfiableReported) {
  auto o = parse_ontology("disjoint A B\n");
  auto q = parse_cq("q(x) :- A(x)", o.vocabulary());
  EXPECT_EQ(certain_answers_oracle(q, o, csv("concept,a,A,\nconcept,a,B,\n")).status, OracleStatus::Unsatisfiable);
}

TEST(CqParse, Forms) {
  auto o = parse_ontology("R subrole S\nF subattr G\n");
  auto q = parse_cq("q(x, y) :- A(x), R(x,y), F(x,_), [agg:min F >= 0.9](x), B('c1'), G(y, 3)", o.vocabulary());
  ASSERT_EQ(q.atoms.size(), 6u);
  EXPECT_EQ(q.atoms[1].kind, AtomKind::Role);
  EXPECT_EQ(q.atoms[2].kind, AtomKind::Attribute);
  EXPECT_EQ(q.atoms[3].kind, AtomKind::Aggregate);
  EXPECT_EQ(to_string(q), "q(x,y) :- A(x), R(x,y), F(x,_), [agg:min F >= 0.9](x), B('c1'), G(y,3)");
  EXPECT_THROW(parse_cq("q(x) :- Unknown(x,y)", o.vocabulary()), ParseError);
  EXPECT_THROW(parse_cq("q(z) :- A(x)", o.vocabulary()), Error);
}

#include <doctest.h>

#include "faas/model.hpp"
#include "faas/workload.hpp"
#include "helpers.hpp"

using namespace faas;
using testing::make_instance;

TEST_CASE("minimal well-formed instance validates") {
  const Instance inst = make_instance({{5, 3, 2}}, {{1}});
  CHECK(validate_instance(inst).empty());
}

TEST_CASE("unknown family is reported") {
  Instance inst = make_instance({{5, 3, 2}}, {{1}});
  inst.jobs[0].tasks[0].family = 9;
  const auto report = validate_instance(inst);
  REQUIRE(report.size() == 1);
  CHECK(report[0].find("unknown family") != std::string::npos);
}

TEST_CASE("forward precedence is reported") {
  Instance inst = make_instance({{5, 3, 2}}, {{1, 1, 1, 1}});
  // Task at index 3 depending on the task at index 4.
  inst.jobs[0].tasks[2].preds = {inst.jobs[0].tasks[3].id};
  const auto report = validate_instance(inst);
  REQUIRE(report.size() == 1);
  CHECK(report[0].find("forward precedence") != std::string::npos);
}

TEST_CASE("bad family parameters are reported") {
  Instance inst = make_instance({{5, 3, 2}}, {{1}});
  inst.families[0].duration = 0;
  inst.families[0].setup = -1;
  CHECK(validate_instance(inst).size() == 2);
}

TEST_CASE("validate_instance is pure") {
  GenParams params;
  params.tasks = 40;
  params.chain_min = 2;
  params.chain_max = 8;
  params.families = 5;
  params.seed = 11;
  const Instance inst = generate_chain_instance(params);
  CHECK(validate_instance(inst) == validate_instance(inst));
}

TEST_CASE("policy string encoding round-trips") {
  CHECK(PolicyConfig::parse("OW").has_value());
  CHECK(PolicyConfig::parse("OW")->ow);
  CHECK(PolicyConfig::make_ow().str() == "OW");
  for (const PolicyConfig& p : all_tuple_policies()) {
    const auto back = PolicyConfig::parse(p.str());
    REQUIRE(back.has_value());
    CHECK(*back == p);
  }
  CHECK(all_tuple_policies().size() == 90);
  CHECK_FALSE(PolicyConfig::parse("EF,LRU,wait").has_value());
  CHECK_FALSE(PolicyConfig::parse("EF,LRU,maybe,def").has_value());
}

TEST_CASE("policy parse example from the docs") {
  const auto p = PolicyConfig::parse("EF,LRU,wait,start");
  REQUIRE(p.has_value());
  CHECK(p->ordering == Ordering::EF);
  CHECK(p->removal == Removal::LRU);
  CHECK(p->wait);
  CHECK(p->dep == DepMode::Start);
}

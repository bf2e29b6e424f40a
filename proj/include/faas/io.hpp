#pragma once

#include <filesystem>
#include <stdexcept>
#include <string>

#include "faas/model.hpp"
#include "faas/state.hpp"

namespace faas {

struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct ParseError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct ValidationError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Instance files: {"meta": {...}, "families": [{"id","duration","size",
// "setup"}], "jobs": [{"id","tasks":[{"id","family","preds":[...]}]}]}.
// Task array order within a job defines index order. Serialization is
// canonical (stable key order, fixed indentation) so round-trips are
// byte-stable.
void write_instance(const Instance& instance, const std::filesystem::path& path);
Instance read_instance(const std::filesystem::path& path);

std::string instance_to_json(const Instance& instance);
Instance instance_from_json(const std::string& text);

void write_result(const SimResult& result, const std::filesystem::path& path);
SimResult read_result(const std::filesystem::path& path);

std::string result_to_json(const SimResult& result);
SimResult result_from_json(const std::string& text);

}  // namespace faas

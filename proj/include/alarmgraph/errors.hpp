#pragma once

#include <stdexcept>
#include <string>

namespace alarmgraph {

enum class errc {
  index_out_of_vocabulary,
  empty_presence,
  dead_end,
  empty_graph,
  empty_corpus,
  zero_norm_row,
  too_few_points,
  shape_mismatch,
  too_few_items,
  invalid_cut,
  degenerate_input,
  invalid_spec,
  invalid_config,
  invalid_argument,
  missing_input,
  io_error,
};

/// Library-wide exception carrying a machine-checkable error code.
class error : public std::runtime_error {
 public:
  error(errc code, const std::string& what) : std::runtime_error(what), code_(code) {}
  errc code() const noexcept { return code_; }

 private:
  errc code_;
};

}  // namespace alarmgraph

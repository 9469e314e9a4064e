#ifndef FEEDBACK_KMEANS_CLI_HPP
#define FEEDBACK_KMEANS_CLI_HPP

#include <iosfwd>

namespace fbk {

/// Entry point of the feedback-kmeans tool (generate | run | experiment |
/// validate). Returns 0 on success, 1 on runtime failure, 2 on usage errors.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace fbk

#endif  // FEEDBACK_KMEANS_CLI_HPP

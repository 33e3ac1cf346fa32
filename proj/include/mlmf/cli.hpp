#pragma once

namespace mlmf {

/// Entry point of the `mlmf` tool. Returns the process exit code: 0 on
/// success, otherwise the ErrorClass value of the failure (2..5), 1 for
/// anything unexpected. Errors go to stderr as a single line
/// `error[<Code>:<class>] <message>`.
int run_cli(int argc, char** argv);

}  // namespace mlmf

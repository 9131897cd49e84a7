#pragma once

namespace wipet::cli {

enum ExitCode : int { kOk = 0, kConfigError = 2, kDataError = 3 };

/// Entry point of the `wipet` tool.
int run(int argc, char** argv);

}  // namespace wipet::cli

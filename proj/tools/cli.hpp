#pragma once

namespace gasfc {

/// Command-line entry point. Exit codes: 0 success, 1 usage or configuration
/// error, 2 data error, 3 numerical or model failure.
int cli_main(int argc, char** argv);

}  // namespace gasfc

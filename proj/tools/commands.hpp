#pragma once

namespace collgram::cli {

// Exit status: 0 success, 1 internal failure, 2 user or input error.
int run(int argc, char** argv);

}  // namespace collgram::cli

// Copyright 2026 The rcab Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Native stand-in target speaking the trace-file protocol. Behaviour is
// selected by the first input byte:
//
//   4   crash (SIGSEGV) after writing `S 11`
//   5   crash (SIGSEGV) without a terminal line
//   6   abort after writing `S 6`
//   7   write no trace file
//   8   write a corrupt trace
//   9   hang
//   10  write `X 0` but exit 3
//   11  emit a block id missing from the block map
//   12  emit block 3 iff RCAB_LEAK is visible
//   *   exit 0

#include <unistd.h>

#include <csignal>
#include <cstdio>
#include <cstdlib>

namespace {

FILE* g_trace = nullptr;

void emit(const char* line) {
  if (g_trace) std::fputs(line, g_trace);
}

[[noreturn]] void die(int sig) {
  if (g_trace) std::fflush(g_trace);
  std::signal(sig, SIG_DFL);
  std::raise(sig);
  std::_Exit(1);
}

}  // namespace

int main(int argc, char** argv) {
  FILE* in = stdin;
  if (argc > 1 && argv[1][0] != '-') in = std::fopen(argv[1], "rb");
  if (!in) return 2;
  const int first = std::fgetc(in);
  const int mode = first == EOF ? 0 : first;

  if (const char* path = std::getenv("RCAB_TRACE"); path && mode != 7) {
    g_trace = std::fopen(path, "w");
  }
  emit("RCAB1\n");
  if (mode == 8) {
    emit("B not-a-number\n");
  }
  emit("B 1\n");
  if (g_trace) std::fprintf(g_trace, "V 1 %d\n", mode);

  switch (mode) {
    case 4:
      emit("B 2\nS 11\n");
      die(SIGSEGV);
    case 5:
      emit("B 2\n");
      die(SIGSEGV);
    case 6:
      emit("S 6\n");
      die(SIGABRT);
    case 9:
      if (g_trace) std::fflush(g_trace);
      for (;;) pause();
    case 10:
      emit("X 0\n");
      if (g_trace) std::fclose(g_trace);
      return 3;
    case 11:
      emit("B 99\n");
      break;
    case 12:
      if (std::getenv("RCAB_LEAK")) emit("B 3\n");
      break;
    default:
      break;
  }
  emit("X 0\n");
  if (g_trace) std::fclose(g_trace);
  return 0;
}

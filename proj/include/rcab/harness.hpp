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

// Runs a target on one input and turns the outcome into a Sample.
//
// Native targets are started in their own process group with a cleared
// environment (plus an allowlist) and RCAB_TRACE pointing at a per-executor
// trace file. The trace file is authoritative for events; the process
// status is authoritative for the verdict. A crashing run whose trace lacks
// a terminal line gets an `S <signal>` terminal appended. Any other
// disagreement, or a missing/corrupt trace, is a HarnessError sample.

#pragma once

#include <fcntl.h>
#include <signal.h>
#include <sys/types.h>
#include <sys/wait.h>
#include <unistd.h>

#include <array>
#include <chrono>
#include <cstdlib>
#include <cstring>
#include <filesystem>
#include <string>
#include <thread>
#include <vector>

#include "rcab/dataset_io.hpp"
#include "rcab/manifest.hpp"
#include "rcab/mock.hpp"
#include "rcab/model.hpp"
#include "rcab/trace_format.hpp"

namespace rcab {

inline constexpr std::array<const char*, 6> kEnvAllowlist = {
    "PATH", "HOME", "LANG", "LC_ALL", "TMPDIR", "ASAN_OPTIONS"};

inline constexpr const char* kTraceEnv = "RCAB_TRACE";

// Owns a scratch directory for one worker. Not thread-safe; create one per
// worker.
class Executor {
 public:
  explicit Executor(const TargetSpec& spec) : spec_(&spec) {
    if (!spec.mock) {
      std::string tmpl =
          (std::filesystem::temp_directory_path() / "rcab-XXXXXX").string();
      if (::mkdtemp(tmpl.data()) == nullptr) {
        throw IoError("mkdtemp failed: " + std::string(std::strerror(errno)));
      }
      scratch_ = tmpl;
    }
  }

  Executor(const Executor&) = delete;
  Executor& operator=(const Executor&) = delete;

  ~Executor() {
    if (!scratch_.empty()) {
      std::error_code ec;
      std::filesystem::remove_all(scratch_, ec);
    }
  }

  const TargetSpec& spec() const { return *spec_; }

  Sample run(const Bytes& input) {
    return run(input, std::chrono::milliseconds(spec_->timeout_ms));
  }

  Sample run(const Bytes& input, std::chrono::milliseconds deadline) {
    if (spec_->mock) return interpret_mock(*spec_->mock, input, spec_->crash);
    return run_native(input, deadline);
  }

 private:
  Sample run_native(const Bytes& input, std::chrono::milliseconds deadline) {
    namespace fs = std::filesystem;
    Sample s;
    s.input = input;
    const auto input_path = scratch_ / "input";
    const auto trace_path = scratch_ / "trace";
    write_bytes(input_path, input);
    std::error_code ec;
    fs::remove(trace_path, ec);

    std::vector<std::string> args = spec_->exec;
    for (auto& a : args) {
      if (a == kInputPlaceholder) a = input_path.string();
    }
    std::vector<std::string> env;
    for (const char* name : kEnvAllowlist) {
      if (const char* v = std::getenv(name)) env.push_back(std::string(name) + "=" + v);
    }
    env.push_back(std::string(kTraceEnv) + "=" + trace_path.string());

    std::vector<char*> argv, envp;
    for (auto& a : args) argv.push_back(a.data());
    argv.push_back(nullptr);
    for (auto& e : env) envp.push_back(e.data());
    envp.push_back(nullptr);
    const std::string cwd = spec_->base_dir.string();
    const std::string stdin_path = spec_->input_mode == InputMode::Stdin
                                       ? input_path.string()
                                       : std::string("/dev/null");

    const pid_t pid = ::fork();
    if (pid < 0) throw IoError("fork failed: " + std::string(std::strerror(errno)));
    if (pid == 0) {
      // Only async-signal-safe calls from here on.
      ::setpgid(0, 0);
      if (!cwd.empty() && ::chdir(cwd.c_str()) != 0) ::_exit(127);
      const int in = ::open(stdin_path.c_str(), O_RDONLY);
      const int null_out = ::open("/dev/null", O_WRONLY);
      if (in < 0 || null_out < 0) ::_exit(127);
      ::dup2(in, STDIN_FILENO);
      ::dup2(null_out, STDOUT_FILENO);
      ::dup2(null_out, STDERR_FILENO);
      if (std::strchr(argv[0], '/') != nullptr) {
        ::execve(argv[0], argv.data(), envp.data());
      } else {
        ::execvpe(argv[0], argv.data(), envp.data());
      }
      ::_exit(127);
    }
    ::setpgid(pid, pid);

    int status = 0;
    const auto start = std::chrono::steady_clock::now();
    auto pause = std::chrono::microseconds(20);
    bool timed_out = false;
    for (;;) {
      const pid_t r = ::waitpid(pid, &status, WNOHANG);
      if (r == pid) break;
      if (r < 0 && errno != EINTR) {
        s.verdict = Verdict::harness_error();
        return s;
      }
      if (std::chrono::steady_clock::now() - start >= deadline) {
        ::kill(-pid, SIGKILL);
        ::kill(pid, SIGKILL);
        while (::waitpid(pid, &status, 0) < 0 && errno == EINTR) {
        }
        timed_out = true;
        break;
      }
      std::this_thread::sleep_for(pause);
      pause = std::min(pause * 2, std::chrono::microseconds(1000));
    }

    std::optional<Trace> trace;
    if (fs::exists(trace_path)) {
      try {
        trace = parse_trace(read_file(trace_path), trace_path.string(),
                            TerminalPolicy::Optional);
      } catch (const Error&) {
        trace.reset();
      }
    }
    if (timed_out) {
      if (trace) {
        s.trace = std::move(*trace);
        s.trace.terminal.reset();
      }
      s.verdict = Verdict::timeout();
      return s;
    }
    if (!trace) {
      s.verdict = Verdict::harness_error();
      return s;
    }
    s.trace = std::move(*trace);

    Terminal actual;
    if (WIFSIGNALED(status)) {
      actual = {TerminalKind::Signal, WTERMSIG(status)};
    } else {
      actual = {TerminalKind::Exit, WEXITSTATUS(status)};
    }
    const Verdict verdict = spec_->crash.classify(actual);
    if (!s.trace.terminal && verdict.is_crash() &&
        actual.kind == TerminalKind::Signal) {
      s.trace.terminal = actual;
    }
    if (!s.trace.terminal || *s.trace.terminal != actual) {
      s.verdict = Verdict::harness_error();
      return s;
    }
    for (const auto& e : s.trace.events) {
      const bool known = e.kind == EventKind::Block
                             ? spec_->block_site(e.id) != nullptr
                             : spec_->value_site(e.id) != nullptr;
      if (!known) {
        s.verdict = Verdict::harness_error();
        return s;
      }
    }
    s.verdict = verdict;
    return s;
  }

  const TargetSpec* spec_;
  std::filesystem::path scratch_;
};

// One-shot convenience wrapper around Executor.
inline Sample execute(const TargetSpec& spec, const Bytes& input,
                      std::chrono::milliseconds deadline) {
  Executor ex(spec);
  return ex.run(input, deadline);
}

}  // namespace rcab

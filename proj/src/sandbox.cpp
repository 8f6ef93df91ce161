// Copyright 2026 The sdsbench Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "sds/sandbox.hpp"

#include <fcntl.h>
#include <poll.h>
#include <signal.h>
#include <sys/resource.h>
#include <sys/wait.h>
#include <unistd.h>

#include <atomic>
#include <cerrno>
#include <chrono>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <sstream>
#include <thread>

#include <json.hpp>
#include <openssl/evp.h>

#include "sds/generate.hpp"

namespace sds::sandbox {
namespace {

using json = nlohmann::json;
using Clock = std::chrono::steady_clock;
namespace fs = std::filesystem;

constexpr const char* kOutcomeNames[] = {
    "none", "timeout", "constraint", "syntax", "runtime", "json_parse",
};

std::once_flag sigpipe_once;

void ignore_sigpipe() {
  // Broken stdin pipes (candidate exits without reading) must surface as
  // EPIPE, not kill the harness.
  std::call_once(sigpipe_once, [] { ::signal(SIGPIPE, SIG_IGN); });
}

struct ExecResult {
  bool spawn_failed = false;
  int spawn_errno = 0;
  bool timed_out = false;
  bool signaled = false;
  int exit_code = 0;
  int term_signal = 0;
  std::string out;
  std::string err;
  double elapsed_sec = 0.0;
};

void set_nonblocking(int fd) {
  ::fcntl(fd, F_SETFL, ::fcntl(fd, F_GETFL, 0) | O_NONBLOCK);
}

void close_quiet(int& fd) {
  if (fd >= 0) {
    ::close(fd);
    fd = -1;
  }
}

// Spawns argv with stdin fed from `stdin_data`, captures stdout/stderr, and
// hard-kills the whole process group at the wall-clock deadline.
ExecResult run_process(const std::vector<std::string>& argv,
                       const std::string& stdin_data, double timeout_sec,
                       std::uint64_t memory_limit_bytes, std::size_t out_cap,
                       std::size_t err_cap) {
  ignore_sigpipe();
  ExecResult result;

  int in_pipe[2], out_pipe[2], err_pipe[2], exec_pipe[2];
  if (::pipe(in_pipe) || ::pipe(out_pipe) || ::pipe(err_pipe) ||
      ::pipe2(exec_pipe, O_CLOEXEC)) {
    throw HarnessError("pipe() failed: " + std::string(std::strerror(errno)));
  }

  std::vector<char*> cargv;
  cargv.reserve(argv.size() + 1);
  for (const auto& a : argv) cargv.push_back(const_cast<char*>(a.c_str()));
  cargv.push_back(nullptr);

  const auto start = Clock::now();
  const pid_t pid = ::fork();
  if (pid < 0) {
    throw HarnessError("fork() failed: " + std::string(std::strerror(errno)));
  }
  if (pid == 0) {
    ::setpgid(0, 0);
    if (memory_limit_bytes > 0) {
      rlimit lim{memory_limit_bytes, memory_limit_bytes};
      ::setrlimit(RLIMIT_AS, &lim);
    }
    ::dup2(in_pipe[0], STDIN_FILENO);
    ::dup2(out_pipe[1], STDOUT_FILENO);
    ::dup2(err_pipe[1], STDERR_FILENO);
    for (int fd : {in_pipe[0], in_pipe[1], out_pipe[0], out_pipe[1], err_pipe[0],
                   err_pipe[1]}) {
      ::close(fd);
    }
    ::execvp(cargv[0], cargv.data());
    const int code = errno;
    [[maybe_unused]] auto n = ::write(exec_pipe[1], &code, sizeof(code));
    ::_exit(127);
  }

  ::setpgid(pid, pid);  // mirror the child's call to close the race
  close_quiet(in_pipe[0]);
  close_quiet(out_pipe[1]);
  close_quiet(err_pipe[1]);
  close_quiet(exec_pipe[1]);
  int stdin_fd = in_pipe[1];
  int stdout_fd = out_pipe[0];
  int stderr_fd = err_pipe[0];
  set_nonblocking(stdin_fd);
  set_nonblocking(stdout_fd);
  set_nonblocking(stderr_fd);

  std::size_t written = 0;
  bool reaped = false;
  int status = 0;
  const auto deadline =
      start + std::chrono::duration_cast<Clock::duration>(
                  std::chrono::duration<double>(timeout_sec));
  // After the child exits, keep draining briefly; an orphaned grandchild may
  // hold the pipes open forever and must not stall the harness.
  Clock::time_point drain_deadline = Clock::time_point::max();

  auto read_some = [&](int& fd, std::string& sink, std::size_t cap) {
    char buf[65536];
    while (true) {
      const ssize_t n = ::read(fd, buf, sizeof(buf));
      if (n > 0) {
        if (sink.size() < cap) {
          sink.append(buf, buf + std::min<std::size_t>(
                                     static_cast<std::size_t>(n), cap - sink.size()));
        }
        continue;
      }
      if (n == 0) {
        close_quiet(fd);
      }
      break;  // EOF, EAGAIN, or error; error treated as end of stream
    }
  };

  while (true) {
    if (!reaped) {
      if (::waitpid(pid, &status, WNOHANG) == pid) {
        reaped = true;
        result.elapsed_sec =
            std::chrono::duration<double>(Clock::now() - start).count();
        drain_deadline = Clock::now() + std::chrono::milliseconds(200);
      }
    }
    const auto now = Clock::now();
    if (!reaped && now >= deadline) {
      result.timed_out = true;
      ::kill(-pid, SIGKILL);
      ::kill(pid, SIGKILL);
      while (::waitpid(pid, &status, 0) < 0 && errno == EINTR) {
      }
      reaped = true;
      result.elapsed_sec =
          std::chrono::duration<double>(Clock::now() - start).count();
      break;
    }
    if (reaped && (now >= drain_deadline ||
                   (stdout_fd < 0 && stderr_fd < 0))) {
      break;
    }

    pollfd fds[3];
    nfds_t nfds = 0;
    int stdin_slot = -1, stdout_slot = -1, stderr_slot = -1;
    if (stdin_fd >= 0 && written < stdin_data.size()) {
      stdin_slot = static_cast<int>(nfds);
      fds[nfds++] = {stdin_fd, POLLOUT, 0};
    } else if (stdin_fd >= 0) {
      close_quiet(stdin_fd);  // everything written; signal EOF to the child
    }
    if (stdout_fd >= 0) {
      stdout_slot = static_cast<int>(nfds);
      fds[nfds++] = {stdout_fd, POLLIN, 0};
    }
    if (stderr_fd >= 0) {
      stderr_slot = static_cast<int>(nfds);
      fds[nfds++] = {stderr_fd, POLLIN, 0};
    }
    const int rc = ::poll(fds, nfds, 20);
    if (rc < 0 && errno != EINTR) break;
    if (rc > 0) {
      if (stdin_slot >= 0 && (fds[stdin_slot].revents & (POLLOUT | POLLERR))) {
        const ssize_t n = ::write(stdin_fd, stdin_data.data() + written,
                                  stdin_data.size() - written);
        if (n > 0) {
          written += static_cast<std::size_t>(n);
          if (written == stdin_data.size()) close_quiet(stdin_fd);
        } else if (n < 0 && errno != EAGAIN && errno != EINTR) {
          close_quiet(stdin_fd);  // EPIPE: the child stopped reading
        }
      }
      if (stdout_slot >= 0 &&
          (fds[stdout_slot].revents & (POLLIN | POLLHUP | POLLERR))) {
        read_some(stdout_fd, result.out, out_cap);
      }
      if (stderr_slot >= 0 &&
          (fds[stderr_slot].revents & (POLLIN | POLLHUP | POLLERR))) {
        read_some(stderr_fd, result.err, err_cap);
      }
    }
  }
  // Final nonblocking drain of whatever arrived before the kill.
  if (stdout_fd >= 0) read_some(stdout_fd, result.out, out_cap);
  if (stderr_fd >= 0) read_some(stderr_fd, result.err, err_cap);
  close_quiet(stdin_fd);
  close_quiet(stdout_fd);
  close_quiet(stderr_fd);

  int exec_errno = 0;
  if (::read(exec_pipe[0], &exec_errno, sizeof(exec_errno)) ==
      sizeof(exec_errno)) {
    result.spawn_failed = true;
    result.spawn_errno = exec_errno;
  }
  close_quiet(exec_pipe[0]);

  if (WIFEXITED(status)) {
    result.exit_code = WEXITSTATUS(status);
  } else if (WIFSIGNALED(status)) {
    result.signaled = true;
    result.term_signal = WTERMSIG(status);
  }
  return result;
}

std::vector<std::string> substitute_file(const std::vector<std::string>& tmpl,
                                         const std::string& path) {
  std::vector<std::string> argv;
  bool substituted = false;
  for (const auto& token : tmpl) {
    if (token == "{file}") {
      argv.push_back(path);
      substituted = true;
    } else {
      argv.push_back(token);
    }
  }
  if (!substituted) argv.push_back(path);
  return argv;
}

// Scratch directory removed on scope exit.
class ScratchDir {
 public:
  ScratchDir() {
    std::string tmpl = (fs::temp_directory_path() / "sds-run-XXXXXX").string();
    std::vector<char> buf(tmpl.begin(), tmpl.end());
    buf.push_back('\0');
    if (::mkdtemp(buf.data()) == nullptr) {
      throw HarnessError("mkdtemp failed: " + std::string(std::strerror(errno)));
    }
    path_ = buf.data();
  }
  ~ScratchDir() {
    std::error_code ec;
    fs::remove_all(path_, ec);
  }
  const fs::path& path() const { return path_; }

 private:
  fs::path path_;
};

std::string truncated(const std::string& text, std::size_t limit) {
  if (text.size() <= limit) return text;
  return text.substr(0, limit);
}

// Parses the first JSON document on stdout into a Selection. Any shape or
// index problem is a schema failure (JsonParseError), not a crash.
std::optional<Selection> parse_selection(const std::string& stdout_text, int n) {
  json doc;
  try {
    std::istringstream stream(stdout_text);
    stream >> doc;
    if (stream.fail()) return std::nullopt;
  } catch (const json::exception&) {
    return std::nullopt;
  }
  if (!doc.is_object() || !doc.contains("selection")) return std::nullopt;
  const json& sel = doc["selection"];
  if (!sel.is_object() || !sel.contains("variables")) return std::nullopt;
  const json& vars = sel["variables"];
  if (!vars.is_array()) return std::nullopt;
  std::vector<int> indices;
  indices.reserve(vars.size());
  for (const auto& v : vars) {
    if (!v.is_number_integer()) return std::nullopt;
    const auto idx = v.get<std::int64_t>();
    if (idx < 0 || idx >= n) return std::nullopt;
    indices.push_back(static_cast<int>(idx));
  }
  return Selection::of(std::move(indices));
}

}  // namespace

const char* outcome_name(Outcome o) {
  return kOutcomeNames[static_cast<int>(o)];
}

std::string canonicalize_source(std::string_view text) {
  std::string out;
  out.reserve(text.size());
  std::string line;
  auto flush_line = [&] {
    while (!line.empty() && (line.back() == ' ' || line.back() == '\t')) {
      line.pop_back();
    }
    if (!out.empty()) out.push_back('\n');
    out += line;
    line.clear();
  };
  for (std::size_t i = 0; i < text.size(); ++i) {
    const char c = text[i];
    if (c == '\r') {
      if (i + 1 < text.size() && text[i + 1] == '\n') ++i;
      flush_line();
    } else if (c == '\n') {
      flush_line();
    } else {
      line.push_back(c);
    }
  }
  if (!line.empty()) flush_line();
  return out;
}

std::string sha256_hex(std::string_view data) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(data.data(), data.size(), digest, &len, EVP_sha256(),
                 nullptr) != 1) {
    throw HarnessError("SHA-256 digest failed");
  }
  static constexpr char kHex[] = "0123456789abcdef";
  std::string hex(static_cast<std::size_t>(len) * 2, '0');
  for (unsigned int i = 0; i < len; ++i) {
    hex[2 * i] = kHex[digest[i] >> 4];
    hex[2 * i + 1] = kHex[digest[i] & 0xF];
  }
  return hex;
}

Candidate Candidate::of(std::string source, std::string origin) {
  Candidate c;
  c.source_text = canonicalize_source(source);
  c.source_hash = sha256_hex(c.source_text);
  c.origin = std::move(origin);
  return c;
}

std::optional<Candidate> extract_code_block(std::string_view generation_text,
                                            std::string origin) {
  constexpr std::string_view kOpen = "<code>";
  constexpr std::string_view kClose = "</code>";
  const auto first = generation_text.find(kOpen);
  if (first == std::string_view::npos) return std::nullopt;
  if (generation_text.find(kOpen, first + kOpen.size()) !=
      std::string_view::npos) {
    return std::nullopt;  // exactly one block required
  }
  const auto close = generation_text.find(kClose, first + kOpen.size());
  if (close == std::string_view::npos) return std::nullopt;
  const auto body = generation_text.substr(first + kOpen.size(),
                                           close - first - kOpen.size());
  return Candidate::of(std::string(body), std::move(origin));
}

RunnerConfig RunnerConfig::python3() {
  RunnerConfig cfg;
  cfg.run_cmd = {"python3", "{file}"};
  cfg.compile_cmd = {"python3", "-m", "py_compile", "{file}"};
  return cfg;
}

CandidateRun run_candidate(const Candidate& cand, const Instance& inst,
                           double timeout_sec, const RunnerConfig& runner) {
  if (timeout_sec <= 0) {
    throw ContractViolation("run_candidate: timeout must be > 0");
  }
  if (runner.run_cmd.empty()) {
    throw HarnessError("runner has an empty run command");
  }

  CandidateRun run;
  run.instance_uuid = inst.uuid();

  ScratchDir scratch;
  const fs::path source_path = scratch.path() / "candidate.py";
  {
    std::ofstream out(source_path);
    out << cand.source_text;
    if (!out) throw HarnessError("cannot write " + source_path.string());
  }

  auto raise_if_spawn_failed = [&](const ExecResult& r) {
    if (r.spawn_failed) {
      throw HarnessError("runner command not executable: " +
                         std::string(std::strerror(r.spawn_errno)));
    }
  };

  if (!runner.compile_cmd.empty()) {
    const auto compile = run_process(
        substitute_file(runner.compile_cmd, source_path.string()), "",
        timeout_sec, runner.memory_limit_bytes, runner.stdout_limit,
        runner.stderr_excerpt_limit);
    raise_if_spawn_failed(compile);
    if (compile.timed_out) {
      run.outcome = Outcome::kTimeout;
      run.elapsed_sec = compile.elapsed_sec;
      run.stderr_excerpt = truncated(compile.err, runner.stderr_excerpt_limit);
      return run;
    }
    if (compile.signaled || compile.exit_code != 0) {
      run.outcome = Outcome::kSyntaxError;
      run.elapsed_sec = compile.elapsed_sec;
      run.stderr_excerpt = truncated(compile.err, runner.stderr_excerpt_limit);
      return run;
    }
  }

  const auto exec = run_process(
      substitute_file(runner.run_cmd, source_path.string()),
      gen::candidate_payload(inst), timeout_sec, runner.memory_limit_bytes,
      runner.stdout_limit, runner.stderr_excerpt_limit);
  raise_if_spawn_failed(exec);
  run.elapsed_sec = exec.elapsed_sec;
  run.stderr_excerpt = truncated(exec.err, runner.stderr_excerpt_limit);

  if (exec.timed_out) {
    run.outcome = Outcome::kTimeout;
    return run;
  }
  if (exec.signaled || exec.exit_code != 0) {
    run.outcome = Outcome::kRuntimeError;
    return run;
  }
  auto selection = parse_selection(exec.out, inst.n());
  if (!selection) {
    run.outcome = Outcome::kJsonParseError;
    return run;
  }
  run.n_vio = check_feasibility(inst, *selection).n_vio();
  run.score = score(inst, *selection);  // recomputed here; never self-reported
  run.selection = std::move(selection);
  run.outcome =
      run.n_vio > 0 ? Outcome::kConstraintViolation : Outcome::kValid;
  return run;
}

std::vector<CandidateRun> run_batch(const Candidate& cand,
                                    const std::vector<Instance>& instances,
                                    double timeout_sec, int workers,
                                    const RunnerConfig& runner) {
  if (workers < 1) throw ContractViolation("run_batch: workers must be >= 1");
  std::vector<CandidateRun> results(instances.size());
  if (instances.empty()) return results;

  std::atomic<std::size_t> next{0};
  std::mutex error_mutex;
  std::exception_ptr harness_failure;

  auto work = [&] {
    while (true) {
      const std::size_t i = next.fetch_add(1);
      if (i >= instances.size()) return;
      try {
        results[i] = run_candidate(cand, instances[i], timeout_sec, runner);
      } catch (const HarnessError&) {
        std::lock_guard lock(error_mutex);
        if (!harness_failure) harness_failure = std::current_exception();
        next.store(instances.size());  // configuration error: stop all workers
        return;
      }
    }
  };

  const int thread_count =
      std::min<int>(workers, static_cast<int>(instances.size()));
  std::vector<std::thread> pool;
  pool.reserve(static_cast<std::size_t>(thread_count));
  for (int t = 0; t < thread_count; ++t) pool.emplace_back(work);
  for (auto& t : pool) t.join();

  if (harness_failure) std::rethrow_exception(harness_failure);
  return results;
}

}  // namespace sds::sandbox

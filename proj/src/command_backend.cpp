// Copyright 2026 The Tunescape Authors.
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

#include <fcntl.h>
#include <poll.h>
#include <signal.h>
#include <sys/wait.h>
#include <unistd.h>

#include <cerrno>
#include <cstring>

#include "tunescape/error.hpp"
#include "tunescape/tuners.hpp"

namespace tunescape {

namespace {

class Fd {
 public:
  Fd() = default;
  explicit Fd(int fd) : fd_(fd) {}
  Fd(const Fd&) = delete;
  Fd& operator=(const Fd&) = delete;
  ~Fd() { reset(); }
  int get() const noexcept { return fd_; }
  void reset() {
    if (fd_ >= 0) ::close(fd_);
    fd_ = -1;
  }

 private:
  int fd_ = -1;
};

// Restores the previous SIGPIPE disposition on scope exit.
class IgnoreSigpipe {
 public:
  IgnoreSigpipe() {
    struct sigaction ignore{};
    ignore.sa_handler = SIG_IGN;
    sigemptyset(&ignore.sa_mask);
    ::sigaction(SIGPIPE, &ignore, &previous_);
  }
  ~IgnoreSigpipe() { ::sigaction(SIGPIPE, &previous_, nullptr); }

 private:
  struct sigaction previous_{};
};

}  // namespace

CommandBackend::CommandBackend(std::vector<std::string> argv, const ParameterSpace& space,
                               std::chrono::milliseconds timeout)
    : argv_(std::move(argv)), space_(&space), timeout_(timeout) {
  if (argv_.empty()) throw ValueError("command backend needs an executable");
}

std::string CommandBackend::describe() const {
  std::string out = "command:";
  for (std::size_t i = 0; i < argv_.size(); ++i) out += (i ? " " : "") + argv_[i];
  return out;
}

BackendResult CommandBackend::measure(const Configuration& config, std::uint32_t samples) {
  nlohmann::json params = nlohmann::json::object();
  for (std::size_t i = 0; i < space_->dimension(); ++i)
    params[space_->parameter_names()[i]] = config.values.at(i);
  const std::string request =
      nlohmann::json{{"parameters", params}, {"samples", samples}}.dump() + "\n";

  int in_pipe[2], out_pipe[2];
  if (::pipe(in_pipe) != 0) throw BackendFailure(std::string("pipe: ") + std::strerror(errno));
  Fd in_read(in_pipe[0]), in_write(in_pipe[1]);
  if (::pipe(out_pipe) != 0) throw BackendFailure(std::string("pipe: ") + std::strerror(errno));
  Fd out_read(out_pipe[0]), out_write(out_pipe[1]);

  std::vector<char*> args;
  for (auto& a : argv_) args.push_back(a.data());
  args.push_back(nullptr);

  const pid_t pid = ::fork();
  if (pid < 0) throw BackendFailure(std::string("fork: ") + std::strerror(errno));
  if (pid == 0) {
    ::dup2(in_read.get(), STDIN_FILENO);
    ::dup2(out_write.get(), STDOUT_FILENO);
    ::close(in_pipe[0]);
    ::close(in_pipe[1]);
    ::close(out_pipe[0]);
    ::close(out_pipe[1]);
    ::execvp(args[0], args.data());
    ::_exit(127);
  }
  in_read.reset();
  out_write.reset();

  {
    IgnoreSigpipe guard;
    std::size_t written = 0;
    while (written < request.size()) {
      const auto n = ::write(in_write.get(), request.data() + written, request.size() - written);
      if (n < 0) {
        if (errno == EINTR) continue;
        break;  // child closed stdin early; its output decides
      }
      written += static_cast<std::size_t>(n);
    }
    in_write.reset();
  }

  std::string response;
  const auto deadline = std::chrono::steady_clock::now() + timeout_;
  bool timed_out = false;
  char buf[4096];
  for (;;) {
    const auto left = std::chrono::duration_cast<std::chrono::milliseconds>(
        deadline - std::chrono::steady_clock::now());
    if (left.count() <= 0) {
      timed_out = true;
      break;
    }
    pollfd pfd{out_read.get(), POLLIN, 0};
    const int ready = ::poll(&pfd, 1, static_cast<int>(std::min<long long>(left.count(), 1 << 30)));
    if (ready < 0) {
      if (errno == EINTR) continue;
      break;
    }
    if (ready == 0) {
      timed_out = true;
      break;
    }
    const auto n = ::read(out_read.get(), buf, sizeof buf);
    if (n < 0 && errno == EINTR) continue;
    if (n <= 0) break;
    response.append(buf, static_cast<std::size_t>(n));
  }
  if (timed_out) ::kill(pid, SIGKILL);
  int status = 0;
  while (::waitpid(pid, &status, 0) < 0 && errno == EINTR) {
  }
  if (timed_out)
    throw BackendTimeout("command timed out after " + std::to_string(timeout_.count()) + " ms");
  if (!WIFEXITED(status) || WEXITSTATUS(status) != 0)
    throw BackendFailure("command exited with status " +
                         std::to_string(WIFEXITED(status) ? WEXITSTATUS(status) : -1));

  try {
    const auto doc = nlohmann::json::parse(response);
    const auto st = parse_status(doc.at("status").get<std::string>());
    BackendResult result{st, std::nullopt};
    if (st == Status::ok) {
      const auto& ob = doc.at("objective_ms");
      if (!ob.is_number() || !(ob.get<double>() > 0.0))
        throw BackendFailure("command reported status ok without a positive objective_ms");
      result.objective = ob.get<double>();
    }
    return result;
  } catch (const nlohmann::json::exception& e) {
    throw BackendFailure(std::string("unreadable command output: ") + e.what());
  } catch (const ValueError& e) {
    throw BackendFailure(std::string("unreadable command output: ") + e.what());
  }
}

}  // namespace tunescape

// Copyright 2026 The dcbo Authors
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

#include "dcbo/cli/external.hpp"

#include <fcntl.h>
#include <poll.h>
#include <signal.h>
#include <sys/wait.h>
#include <unistd.h>

#include <cerrno>
#include <cmath>
#include <cstring>
#include <mutex>

#include <json.hpp>

namespace dcbo::cli {
namespace {

using Clock = std::chrono::steady_clock;

void ignoreSigpipe() {
  static std::once_flag once;
  std::call_once(once, [] { ::signal(SIGPIPE, SIG_IGN); });
}

std::string errnoText(const char* what) { return std::string(what) + ": " + std::strerror(errno); }

}  // namespace

std::string_view toString(ExternalErrorKind k) {
  switch (k) {
    case ExternalErrorKind::Spawn:
      return "spawn failure";
    case ExternalErrorKind::Timeout:
      return "timeout";
    case ExternalErrorKind::MalformedReply:
      return "malformed reply";
    case ExternalErrorKind::ChildError:
      return "child error";
    case ExternalErrorKind::ChildExited:
      return "child exited";
  }
  return "external error";
}

ExternalObjective::ExternalObjective(const std::string& command, std::chrono::milliseconds timeout)
    : timeout_(timeout) {
  ignoreSigpipe();
  int in[2];
  int out[2];
  if (::pipe2(in, O_CLOEXEC) != 0) throw ExternalError(ExternalErrorKind::Spawn, errnoText("pipe"));
  if (::pipe2(out, O_CLOEXEC) != 0) {
    ::close(in[0]);
    ::close(in[1]);
    throw ExternalError(ExternalErrorKind::Spawn, errnoText("pipe"));
  }
  const pid_t pid = ::fork();
  if (pid < 0) {
    for (int fd : {in[0], in[1], out[0], out[1]}) ::close(fd);
    throw ExternalError(ExternalErrorKind::Spawn, errnoText("fork"));
  }
  if (pid == 0) {
    ::dup2(in[0], STDIN_FILENO);
    ::dup2(out[1], STDOUT_FILENO);
    ::signal(SIGPIPE, SIG_DFL);
    ::execl("/bin/sh", "sh", "-c", command.c_str(), static_cast<char*>(nullptr));
    ::_exit(127);
  }
  ::close(in[0]);
  ::close(out[1]);
  pid_ = pid;
  toChild_ = in[1];
  fromChild_ = out[0];
}

ExternalObjective::~ExternalObjective() { terminate(); }

void ExternalObjective::terminate() {
  if (toChild_ >= 0) ::close(toChild_);
  if (fromChild_ >= 0) ::close(fromChild_);
  toChild_ = fromChild_ = -1;
  if (pid_ > 0) {
    ::kill(pid_, SIGKILL);
    int status = 0;
    while (::waitpid(pid_, &status, 0) < 0 && errno == EINTR) {
    }
    pid_ = -1;
  }
}

std::string ExternalObjective::readLine() {
  const auto deadline = Clock::now() + timeout_;
  while (true) {
    const auto nl = buffer_.find('\n');
    if (nl != std::string::npos) {
      std::string line = buffer_.substr(0, nl);
      buffer_.erase(0, nl + 1);
      return line;
    }
    const auto left = std::chrono::duration_cast<std::chrono::milliseconds>(deadline - Clock::now()).count();
    if (left <= 0) {
      terminate();
      throw ExternalError(ExternalErrorKind::Timeout, "no reply within " + std::to_string(timeout_.count()) + " ms");
    }
    pollfd p{fromChild_, POLLIN, 0};
    const int rc = ::poll(&p, 1, static_cast<int>(left));
    if (rc < 0) {
      if (errno == EINTR) continue;
      throw ExternalError(ExternalErrorKind::ChildExited, errnoText("poll"));
    }
    if (rc == 0) continue;
    char chunk[4096];
    const ssize_t n = ::read(fromChild_, chunk, sizeof chunk);
    if (n < 0) {
      if (errno == EINTR || errno == EAGAIN) continue;
      throw ExternalError(ExternalErrorKind::ChildExited, errnoText("read"));
    }
    if (n == 0) {
      terminate();
      throw ExternalError(ExternalErrorKind::ChildExited, "child closed its output");
    }
    buffer_.append(chunk, static_cast<std::size_t>(n));
  }
}

Observation ExternalObjective::operator()(const Vector& x) {
  if (!alive()) throw ExternalError(ExternalErrorKind::ChildExited, "child is not running");
  nlohmann::json req;
  req["x"] = std::vector<double>(x.data(), x.data() + x.size());
  const std::string line = req.dump() + "\n";
  std::size_t sent = 0;
  while (sent < line.size()) {
    const ssize_t n = ::write(toChild_, line.data() + sent, line.size() - sent);
    if (n < 0) {
      if (errno == EINTR) continue;
      const std::string msg = errnoText("write");
      terminate();
      throw ExternalError(ExternalErrorKind::ChildExited, msg);
    }
    sent += static_cast<std::size_t>(n);
  }
  return parseReply(readLine());
}

Observation parseReply(std::string_view line) {
  nlohmann::json reply;
  try {
    reply = nlohmann::json::parse(line);
  } catch (const nlohmann::json::parse_error&) {
    throw ExternalError(ExternalErrorKind::MalformedReply, "not JSON: " + std::string(line.substr(0, 200)));
  }
  if (!reply.is_object()) throw ExternalError(ExternalErrorKind::MalformedReply, "reply is not an object");
  if (reply.contains("error") && !reply["error"].is_null()) {
    const auto& e = reply["error"];
    throw ExternalError(ExternalErrorKind::ChildError, e.is_string() ? e.get<std::string>() : e.dump());
  }
  if (!reply.contains("f") || !reply["f"].is_number()) {
    throw ExternalError(ExternalErrorKind::MalformedReply, "missing numeric \"f\"");
  }
  Observation obs{reply["f"].get<double>(), std::nullopt};
  if (reply.contains("c") && !reply["c"].is_null()) {
    const auto& c = reply["c"];
    if (!c.is_array()) throw ExternalError(ExternalErrorKind::MalformedReply, "\"c\" is not an array");
    for (const auto& v : c) {
      if (!v.is_number()) throw ExternalError(ExternalErrorKind::MalformedReply, "non-numeric constraint value");
      const double cv = v.get<double>();
      obs.constraint = obs.constraint ? std::max(*obs.constraint, cv) : cv;
    }
  }
  return obs;
}

BlackBox makeExternalEvaluator(const std::string& command, std::chrono::milliseconds timeout) {
  auto child = std::make_shared<ExternalObjective>(command, timeout);
  return [child](const Vector& x) { return (*child)(x); };
}

ProblemFactory makeProblemFactory(const ExperimentConfig& config) {
  if (config.problem != ProblemKind::External) return syntheticFactory(config);
  if (!config.external) throw ConfigError("external", "external problems need a command");
  const ExternalSettings ext = *config.external;
  const Box box = config.box;
  return [ext, box] {
    return Problem{box, makeExternalEvaluator(ext.command, std::chrono::milliseconds(ext.timeoutMs)),
                   ext.constraintThreshold};
  };
}

}  // namespace dcbo::cli

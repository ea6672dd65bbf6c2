#include "hybridopt/external_objective.hpp"

#include <fcntl.h>
#include <poll.h>
#include <signal.h>
#include <sys/wait.h>
#include <unistd.h>

#include <array>
#include <cerrno>
#include <cmath>
#include <cstring>
#include <mutex>

#include "hybridopt/error.hpp"

namespace hybridopt {
namespace {

struct ProcessResult {
  int exit_status = 0;
  bool signaled = false;
  bool timed_out = false;
  std::string out;
  std::string err;
};

class Pipe {
 public:
  Pipe() {
    if (::pipe2(fds_.data(), O_CLOEXEC) != 0) throw EvaluationError(std::string("pipe: ") + std::strerror(errno));
  }
  ~Pipe() {
    close_read();
    close_write();
  }
  Pipe(const Pipe&) = delete;
  Pipe& operator=(const Pipe&) = delete;

  int read_end() const { return fds_[0]; }
  int write_end() const { return fds_[1]; }
  void close_read() { close_fd(fds_[0]); }
  void close_write() { close_fd(fds_[1]); }

 private:
  static void close_fd(int& fd) {
    if (fd >= 0) ::close(fd);
    fd = -1;
  }
  std::array<int, 2> fds_{-1, -1};
};

std::string tail(const std::string& text, std::size_t limit = 2000) {
  return text.size() <= limit ? text : "..." + text.substr(text.size() - limit);
}

ProcessResult run_process(const std::string& command, const std::string& input, std::chrono::milliseconds timeout) {
  static std::once_flag sigpipe_once;
  std::call_once(sigpipe_once, [] { ::signal(SIGPIPE, SIG_IGN); });

  Pipe in, out, err;
  const pid_t pid = ::fork();
  if (pid < 0) throw EvaluationError(std::string("fork: ") + std::strerror(errno));
  if (pid == 0) {
    // Own process group so a timeout kills the whole command tree.
    ::setpgid(0, 0);
    ::dup2(in.read_end(), STDIN_FILENO);
    ::dup2(out.write_end(), STDOUT_FILENO);
    ::dup2(err.write_end(), STDERR_FILENO);
    ::execl("/bin/sh", "sh", "-c", command.c_str(), static_cast<char*>(nullptr));
    ::_exit(127);
  }
  ::setpgid(pid, pid);
  in.close_read();
  out.close_write();
  err.close_write();

  std::size_t written = 0;
  while (written < input.size()) {
    const ssize_t n = ::write(in.write_end(), input.data() + written, input.size() - written);
    if (n < 0) {
      if (errno == EINTR) continue;
      break;  // EPIPE: the command ignores its input
    }
    written += static_cast<std::size_t>(n);
  }
  in.close_write();

  ProcessResult result;
  const auto deadline = std::chrono::steady_clock::now() + timeout;
  std::array<pollfd, 2> fds{pollfd{out.read_end(), POLLIN, 0}, pollfd{err.read_end(), POLLIN, 0}};
  std::array<std::string*, 2> sinks{&result.out, &result.err};
  int open = 2;
  char buffer[4096];
  while (open > 0) {
    const auto left = std::chrono::duration_cast<std::chrono::milliseconds>(deadline - std::chrono::steady_clock::now());
    if (left.count() <= 0) {
      result.timed_out = true;
      break;
    }
    const int ready = ::poll(fds.data(), fds.size(), static_cast<int>(left.count()));
    if (ready < 0) {
      if (errno == EINTR) continue;
      break;
    }
    for (std::size_t i = 0; i < fds.size(); ++i) {
      if (fds[i].fd < 0 || fds[i].revents == 0) continue;
      const ssize_t n = ::read(fds[i].fd, buffer, sizeof buffer);
      if (n > 0) {
        sinks[i]->append(buffer, static_cast<std::size_t>(n));
      } else if (n == 0 || errno != EINTR) {
        fds[i].fd = -1;
        --open;
      }
    }
  }

  if (result.timed_out) ::kill(-pid, SIGKILL);
  int status = 0;
  while (::waitpid(pid, &status, 0) < 0 && errno == EINTR) {
  }
  if (WIFEXITED(status)) {
    result.exit_status = WEXITSTATUS(status);
  } else if (WIFSIGNALED(status)) {
    result.signaled = true;
    result.exit_status = WTERMSIG(status);
  }
  return result;
}

}  // namespace

nlohmann::json external_request(const MixedSpace& space, const Arm& arm, std::span<const double> x) {
  nlohmann::json discrete = nlohmann::json::object();
  for (std::size_t i = 0; i < space.discrete_dim(); ++i) {
    const double v = arm.values.at(i);
    if (std::nearbyint(v) == v && std::fabs(v) < 9.0e15) {
      discrete[space.discrete()[i].name] = static_cast<long long>(v);
    } else {
      discrete[space.discrete()[i].name] = v;
    }
  }
  nlohmann::json continuous = nlohmann::json::object();
  for (std::size_t i = 0; i < space.continuous_dim(); ++i) continuous[space.continuous()[i].name] = x[i];
  return {{"discrete", std::move(discrete)}, {"continuous", std::move(continuous)}};
}

double parse_external_response(const std::string& stdout_text) {
  nlohmann::json body;
  try {
    body = nlohmann::json::parse(stdout_text);
  } catch (const nlohmann::json::exception& e) {
    throw EvaluationError("external objective wrote malformed JSON: " + tail(stdout_text, 200));
  }
  if (!body.is_object() || !body.contains("value") || !body["value"].is_number())
    throw EvaluationError("external objective response lacks a numeric \"value\": " + tail(stdout_text, 200));
  const double value = body["value"].get<double>();
  if (!std::isfinite(value)) throw EvaluationError("external objective returned a non-finite value");
  return value;
}

double external_objective(const std::string& command, const MixedSpace& space, const Arm& arm,
                          std::span<const double> x, std::chrono::milliseconds timeout) {
  const std::string request = external_request(space, arm, x).dump() + "\n";
  const ProcessResult result = run_process(command, request, timeout);
  if (result.timed_out) {
    throw EvaluationError("external objective timed out after " + std::to_string(timeout.count()) +
                          " ms; stderr: " + tail(result.err));
  }
  if (result.signaled) {
    throw EvaluationError("external objective killed by signal " + std::to_string(result.exit_status) +
                          "; stderr: " + tail(result.err));
  }
  if (result.exit_status != 0) {
    throw EvaluationError("external objective exited with status " + std::to_string(result.exit_status) +
                          "; stderr: " + tail(result.err));
  }
  try {
    return parse_external_response(result.out);
  } catch (const EvaluationError& e) {
    throw EvaluationError(std::string(e.what()) + "; stderr: " + tail(result.err));
  }
}

ExternalObjective::ExternalObjective(MixedSpace space, ExternalObjectiveSpec spec)
    : space_(std::move(space)), spec_(std::move(spec)) {
  if (spec_.command.empty()) throw InvalidArgument("external objective needs a command");
  if (spec_.timeout.count() <= 0) throw InvalidArgument("external objective timeout must be positive");
}

double ExternalObjective::evaluate(const Arm& arm, std::span<const double> x) const {
  return external_objective(spec_.command, space_, arm, x, spec_.timeout);
}

}  // namespace hybridopt
